#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jumpsupport/errors.hpp"
#include "jumpsupport/levy.hpp"
#include "jumpsupport/path.hpp"
#include "jumpsupport/sde.hpp"
#include "jumpsupport/skeleton.hpp"

namespace jumpsupport::config {

using Json = nlohmann::json;

Vector to_vector(const Json& j, const std::string& what);
Matrix to_matrix(const Json& j, const std::string& what);
Json from_vector(const Vector& v);
Json from_matrix(const Matrix& M);

/// {"variant": "cylindrical_stable", "alpha": [0.5, 1.5], "scale": [1, 1]} and friends.
levy::LevyModel model_from_json(const Json& j);
Json model_to_json(const levy::LevyModel& m);

/// Affine coefficients; missing entries default to A = 0, a = 0, Σ₀ = I (m = d).
sde::CoefficientSet coefficients_from_json(const Json& j, int d);
Json coefficients_to_json(const sde::CoefficientSet& c);

struct SkeletonSpec {
    Vector x0;
    double T = 1.0;
    std::vector<double> breakpoints{0.0};
    std::vector<Vector> values;  // empty means f ≡ 0
    skeleton::JumpPlan plan;
    skeleton::SkeletonOptions opts;
};

SkeletonSpec skeleton_from_json(const Json& j, int m, int d);
Json skeleton_to_json(const SkeletonSpec& s);
skeleton::ControlFunction control_of(const SkeletonSpec& s, const levy::IntegrabilitySubspace& L);

/// {"times": [...], "values": [[...], ...], "jumps": [{"t", "pre", "post"}]}
CadlagPath path_from_json(const Json& j);

levy::SmallJumpConfig small_jump_from_json(const Json& j);

/// Sets a dotted key; the value is parsed as JSON when possible, else kept as a string.
void apply_override(Json& root, const std::string& assignment);

/// 64-bit FNV-1a of the canonical dump, as 16 hex digits.
std::string fnv1a_hex(const std::string& s);

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

const Json& require(const Json& j, const char* key);

}  // namespace jumpsupport::config
