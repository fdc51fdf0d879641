#include "jumpsupport/config.hpp"

#include <cstdio>

namespace jumpsupport::config {

using levy::LevyModel;

namespace {

template <class Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad ") + what + ": " + e.what());
    }
}

}  // namespace

const Json& require(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("config: missing required key '") + key + "'");
    return j.at(key);
}

Vector to_vector(const Json& j, const std::string& what) {
    if (j.is_number()) return Vector::Constant(1, j.get<double>());
    if (!j.is_array()) throw ConfigError("config: " + what + " must be a number array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError("config: " + what + " must be a number array");
        v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
    }
    return v;
}

Matrix to_matrix(const Json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw ConfigError("config: " + what + " must be a non-empty array of rows");
    const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
    Matrix M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = to_vector(j[r], what);
        if (static_cast<std::size_t>(row.size()) != cols || !j[r].is_array())
            throw ConfigError("config: " + what + " rows must have equal length");
        M.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return M;
}

Json from_vector(const Vector& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
    return j;
}

Json from_matrix(const Matrix& M) {
    Json j = Json::array();
    for (Eigen::Index r = 0; r < M.rows(); ++r) j.push_back(from_vector(M.row(r).transpose()));
    return j;
}

// ---------------------------------------------------------------------------

LevyModel model_from_json(const Json& j) {
    return guarded("model", [&] {
        const auto variant = require(j, "variant").get<std::string>();
        if (variant == "cylindrical_stable") {
            std::vector<double> alpha;
            for (double a : to_vector(require(j, "alpha"), "alpha")) alpha.push_back(a);
            std::vector<double> scale;
            if (j.contains("scale"))
                for (double s : to_vector(j["scale"], "scale")) scale.push_back(s);
            return LevyModel::cylindrical(alpha, scale);
        }
        if (variant == "radial_stable")
            return LevyModel::radial(require(j, "alpha").get<double>(), get_or(j, "dim", 1), get_or(j, "scale", 1.0));
        if (variant == "curve_image")
            return LevyModel::curve(require(j, "alpha").get<double>(), require(j, "gamma").get<double>(),
                                    get_or(j, "scale", 1.0));
        if (variant == "one_sided_stable_1d" || variant == "one_sided_stable")
            return LevyModel::one_sided(require(j, "alpha").get<double>(), get_or(j, "scale", 1.0));
        if (variant == "discrete") {
            std::vector<levy::Atom> atoms;
            for (const auto& a : require(j, "atoms")) atoms.push_back({to_vector(require(a, "u"), "atom u"), require(a, "w").get<double>()});
            return LevyModel::discrete(atoms);
        }
        throw ConfigError("config: unknown Levy model variant '" + variant + "'");
    });
}

Json model_to_json(const LevyModel& m) {
    Json j;
    j["variant"] = m.variant_name();
    std::visit(
        [&](const auto& v) {
            using V = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<V, levy::CylindricalStable>) {
                j["alpha"] = v.alpha;
                j["scale"] = v.scale;
            } else if constexpr (std::is_same_v<V, levy::RadialStable>) {
                j["alpha"] = v.alpha;
                j["dim"] = v.dim;
                j["scale"] = v.scale;
            } else if constexpr (std::is_same_v<V, levy::CurveImage>) {
                j["alpha"] = v.alpha;
                j["gamma"] = v.gamma;
                j["scale"] = v.scale;
            } else if constexpr (std::is_same_v<V, levy::OneSidedStable1D>) {
                j["alpha"] = v.alpha;
                j["scale"] = v.scale;
            } else {
                Json atoms = Json::array();
                for (const auto& a : v.atoms) atoms.push_back({{"u", from_vector(a.u)}, {"w", a.weight}});
                j["atoms"] = atoms;
            }
        },
        m.variant());
    return j;
}

// ---------------------------------------------------------------------------

sde::CoefficientSet coefficients_from_json(const Json& j, int d) {
    return guarded("coefficients", [&] {
        if (!j.is_null() && !j.is_object()) throw ConfigError("config: coefficients must be an object");
        const int m = get_or(j, "m", d);
        sde::AffineForm f;
        f.A = j.contains("A") ? to_matrix(j["A"], "A") : Matrix::Zero(m, m);
        f.a = j.contains("a") ? to_vector(j["a"], "a") : Vector::Zero(f.A.rows());
        f.sigma0 = j.contains("sigma0") ? to_matrix(j["sigma0"], "sigma0") : Matrix::Identity(f.A.rows(), d);
        if (j.contains("sigma1"))
            for (const auto& S : j["sigma1"]) f.sigma1.push_back(to_matrix(S, "sigma1"));
        if (j.contains("remainder")) {
            const auto& r = j["remainder"];
            f.has_remainder = true;
            f.r0 = get_or(r, "r0", 0.0);
            if (r.contains("r1")) f.r1 = to_vector(r["r1"], "remainder.r1");
            f.e = to_vector(require(r, "e"), "remainder.e");
        }
        if (f.sigma0.cols() != d) throw ConfigError("config: sigma0 must have one column per noise dimension");
        return sde::CoefficientSet::affine(f, get_or(j, "beta", 2.0), get_or(j, "C", 1.0));
    });
}

Json coefficients_to_json(const sde::CoefficientSet& c) {
    if (!c.affine_form()) throw ConfigError("config: only affine coefficients serialize");
    const auto& f = *c.affine_form();
    Json j;
    j["m"] = c.m();
    j["A"] = from_matrix(f.A);
    j["a"] = from_vector(f.a);
    j["sigma0"] = from_matrix(f.sigma0);
    if (!f.sigma1.empty()) {
        Json s = Json::array();
        for (const auto& S : f.sigma1) s.push_back(from_matrix(S));
        j["sigma1"] = s;
    }
    if (f.has_remainder) j["remainder"] = {{"r0", f.r0}, {"r1", from_vector(f.r1)}, {"e", from_vector(f.e)}};
    j["beta"] = c.beta();
    j["C"] = c.C();
    return j;
}

// ---------------------------------------------------------------------------

SkeletonSpec skeleton_from_json(const Json& j, int m, int d) {
    return guarded("skeleton", [&] {
        SkeletonSpec s;
        s.x0 = j.contains("x0") ? to_vector(j["x0"], "skeleton.x0") : Vector::Zero(m);
        if (s.x0.size() != m) throw ConfigError("config: skeleton.x0 must have the state dimension");
        s.T = get_or(j, "T", 1.0);
        s.opts.h = get_or(j, "h", s.opts.h);
        s.opts.admissible_tol = get_or(j, "admissible_tol", s.opts.admissible_tol);
        if (j.contains("control")) {
            const auto& c = j["control"];
            if (c.is_array() && (c.empty() || c[0].is_number())) {
                s.values.push_back(to_vector(c, "skeleton.control"));
            } else {
                s.breakpoints = get_or(c, "breakpoints", std::vector<double>{0.0});
                s.values.clear();
                for (const auto& v : require(c, "values")) s.values.push_back(to_vector(v, "skeleton.control.values"));
            }
            for (const auto& v : s.values)
                if (v.size() != d) throw ConfigError("config: control values must have the noise dimension");
        }
        if (j.contains("jumps"))
            for (const auto& jj : j["jumps"]) {
                skeleton::PlannedJump pj;
                pj.time = require(jj, "t").get<double>();
                if (jj.contains("u")) pj.amplitude = to_vector(jj["u"], "jump u");
                if (jj.contains("target")) pj.target = to_vector(jj["target"], "jump target");
                s.plan.jumps.push_back(pj);
            }
        return s;
    });
}

Json skeleton_to_json(const SkeletonSpec& s) {
    Json j;
    j["x0"] = from_vector(s.x0);
    j["T"] = s.T;
    j["h"] = s.opts.h;
    j["admissible_tol"] = s.opts.admissible_tol;
    if (!s.values.empty()) {
        Json vals = Json::array();
        for (const auto& v : s.values) vals.push_back(from_vector(v));
        j["control"] = {{"breakpoints", s.breakpoints}, {"values", vals}};
    }
    Json jumps = Json::array();
    for (const auto& pj : s.plan.jumps) {
        Json e{{"t", pj.time}};
        if (pj.amplitude) e["u"] = from_vector(*pj.amplitude);
        if (pj.target) e["target"] = from_vector(*pj.target);
        jumps.push_back(e);
    }
    j["jumps"] = jumps;
    return j;
}

skeleton::ControlFunction control_of(const SkeletonSpec& s, const levy::IntegrabilitySubspace& L) {
    if (s.values.empty()) return skeleton::ControlFunction::zero(L);
    return skeleton::ControlFunction(s.breakpoints, s.values, L);
}

CadlagPath path_from_json(const Json& j) {
    return guarded("path", [&] {
        const auto times = require(j, "times").get<std::vector<double>>();
        std::vector<Vector> values;
        for (const auto& v : require(j, "values")) values.push_back(to_vector(v, "path values"));
        std::vector<PathJump> jumps;
        if (j.contains("jumps"))
            for (const auto& e : j["jumps"])
                jumps.push_back({require(e, "t").get<double>(), to_vector(require(e, "pre"), "jump pre"),
                                 to_vector(require(e, "post"), "jump post")});
        return CadlagPath(times, values, jumps);
    });
}

levy::SmallJumpConfig small_jump_from_json(const Json& j) {
    levy::SmallJumpConfig c;
    c.tol_var_rate = get_or(j, "tol_var_rate", c.tol_var_rate);
    c.max_rate = get_or(j, "max_rate", c.max_rate);
    c.gaussian_band = get_or(j, "gaussian_band", c.gaussian_band);
    return c;
}

// ---------------------------------------------------------------------------

void apply_override(Json& root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + assignment + "'");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    Json value = Json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;
    Json* node = &root;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("--set: empty path component in '" + key + "'");
        if (!node->is_object()) {
            if (!node->is_null()) throw ConfigError("--set: '" + key + "' descends into a non-object");
            *node = Json::object();
        }
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        start = dot + 1;
    }
}

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace jumpsupport::config
