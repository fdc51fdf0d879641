#include <doctest.h>

#include <cmath>

#include "jumpsupport/config.hpp"
#include "test_util.hpp"

using namespace jumpsupport;
using namespace jumpsupport::config;
using test::vec;

TEST_CASE("model specs round-trip byte-identically") {
    const std::vector<std::string> specs{
        R"({"alpha":[0.5,1.5],"scale":[1.0,2.0],"variant":"cylindrical_stable"})",
        R"({"alpha":1.2,"dim":2,"scale":0.5,"variant":"radial_stable"})",
        R"({"alpha":1.5,"gamma":1.2,"scale":1.0,"variant":"curve_image"})",
        R"({"alpha":1.5,"scale":1.0,"variant":"one_sided_stable_1d"})",
        R"({"atoms":[{"u":[1.0,-0.25],"w":0.3}],"variant":"discrete"})",
    };
    for (const auto& s : specs) {
        CAPTURE(s);
        const auto m = model_from_json(Json::parse(s));
        CHECK(model_to_json(m).dump() == s);
        CHECK(model_to_json(model_from_json(model_to_json(m))).dump() == s);
    }
    CHECK_THROWS_AS(model_from_json(Json::parse(R"({"variant":"gaussian"})")), ConfigError);
    CHECK_THROWS_AS(model_from_json(Json::parse(R"({"variant":"radial_stable"})")), ConfigError);
    CHECK_THROWS_AS(model_from_json(Json::parse(R"({"variant":"radial_stable","alpha":"x"})")), ConfigError);
}

TEST_CASE("coefficients and skeleton specs round-trip") {
    const Json cj = Json::parse(R"({"A":[[-1.0,0.5],[0.0,-2.0]],"a":[0.1,0.2],"sigma0":[[1.0,0.0],[0.5,1.0]],
        "remainder":{"r0":0.5,"r1":[0.0,1.0],"e":[1.0,0.0]},"beta":1.8,"C":2.0})");
    const auto c = coefficients_from_json(cj, 2);
    const Json once = coefficients_to_json(c);
    CHECK(coefficients_to_json(coefficients_from_json(once, 2)).dump() == once.dump());
    CHECK(c.drift(vec({1, 1})).isApprox(vec({-0.4, -1.8})));

    CHECK_THROWS_AS(coefficients_from_json(Json::parse(R"({"sigma0":[[1.0,0.0]]})"), 1), ConfigError);
    CHECK_THROWS_AS(coefficients_from_json(Json::parse(R"({"A":[[1.0],[1.0,2.0]]})"), 1), ConfigError);

    const Json sj = Json::parse(R"({"x0":[1.0,0.0],"T":2.0,"control":{"breakpoints":[0.0,1.0],"values":[[0.0,1.0],[0.0,-1.0]]},
        "jumps":[{"t":0.5,"u":[0.3,0.0]},{"t":1.5,"target":[0.0,0.0]}]})");
    const auto spec = skeleton_from_json(sj, 2, 2);
    CHECK(spec.plan.jumps.size() == 2);
    const Json again = skeleton_to_json(spec);
    CHECK(skeleton_to_json(skeleton_from_json(again, 2, 2)).dump() == again.dump());
    CHECK_THROWS_AS(skeleton_from_json(Json::parse(R"({"x0":[1.0]})"), 2, 2), ConfigError);
}

TEST_CASE("paths from config") {
    const auto p = path_from_json(Json::parse(R"({"times":[0,0.5,1],"values":[[0],[1],[1]],
        "jumps":[{"t":0.5,"pre":[0],"post":[1]}]})"));
    CHECK(p.jumps().size() == 1);
    CHECK(p.at(0.75)[0] == 1.0);
    CHECK_THROWS(path_from_json(Json::parse(R"({"times":[0,1],"values":[[0]]})")));
}

TEST_CASE("overrides and hashing") {
    Json root = Json::parse(R"({"params":{"n":10},"seed":1})");
    apply_override(root, "params.n=20");
    apply_override(root, "params.mode=truncated");
    apply_override(root, "model.alpha=[1.5]");
    CHECK(root["params"]["n"] == 20);
    CHECK(root["params"]["mode"] == "truncated");
    CHECK(root["model"]["alpha"][0] == 1.5);
    CHECK_THROWS_AS(apply_override(root, "noequals"), ConfigError);
    CHECK_THROWS_AS(apply_override(root, "seed.x=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(root, "a..b=1"), ConfigError);

    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(Json::parse(root.dump()).dump() == root.dump());
}
