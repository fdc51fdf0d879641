#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jumpsupport/levy.hpp"
#include "jumpsupport/path.hpp"
#include "jumpsupport/sde.hpp"
#include "jumpsupport/time_change.hpp"

namespace jumpsupport::skeleton {

/// Piecewise-constant control valued in L^⊥; piece i acts on
/// [breakpoints[i], breakpoints[i+1]) and the last piece runs to the horizon.
class ControlFunction {
public:
    ControlFunction(std::vector<double> breakpoints, std::vector<Vector> values, const levy::IntegrabilitySubspace& L);
    static ControlFunction constant(const Vector& value, const levy::IntegrabilitySubspace& L);
    static ControlFunction zero(const levy::IntegrabilitySubspace& L);

    const Vector& value_at(double t) const { return values_[piece_at(t)]; }
    std::size_t piece_at(double t) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<Vector>& values() const { return values_; }
    std::size_t pieces() const { return values_.size(); }
    int dim() const { return static_cast<int>(values_.front().size()); }

    /// Same values on breakpoints moved through a time change.
    ControlFunction transported(const TimeChange& lambda) const;

private:
    ControlFunction() = default;
    std::vector<double> breakpoints_;
    std::vector<Vector> values_;
};

struct PlannedJump {
    double time = 0.0;
    std::optional<Vector> amplitude;  // u_k in supp μ
    std::optional<Vector> target;     // y_k, resolved at solve time
};

struct JumpPlan {
    std::vector<PlannedJump> jumps;

    std::vector<double> times() const;
    void validate(double T) const;
    static JumpPlan from_amplitudes(const std::vector<double>& times, const std::vector<Vector>& amplitudes);
};

enum class Decision { Yes, No, Boundary };
const char* to_string(Decision d);

struct AdmissibleResult {
    Decision decision = Decision::No;
    double distance = 0.0;   // inf_u |x + c(x,u) - y|
    Vector amplitude;        // a minimizing u (smallest |u| among ties)
    std::string diagnostic;
};

/// Is y in the support of J(x, ·) = law of x + c(x, u), u ~ μ?
AdmissibleResult admissible(const Vector& x, const Vector& y, const sde::CoefficientSet& coeffs,
                            const levy::LevyModel& model, double tol = 1e-6);

/// The data of the skeleton ODE dφ = (b̃(φ) + σ(φ) f) dt with jumps φ ← φ⁻ + c(φ⁻, u).
struct SkeletonSystem {
    sde::VectorField drift;
    sde::CoefficientSet coeffs;
    levy::LevyModel model;

    SkeletonSystem(sde::VectorField drift, sde::CoefficientSet coeffs, levy::LevyModel model);
    /// Drift b̃ from the effective-drift construction.
    static SkeletonSystem effective(const sde::CoefficientSet& coeffs, const levy::LevyModel& model);

    Vector rhs(const Vector& x, const Vector& f) const { return drift(x) + coeffs.sigma(x) * f; }
};

struct SkeletonOptions {
    double h = 1e-3;
    double admissible_tol = 1e-6;
    double blowup_cap = 1e12;
};

struct SkeletonPath {
    CadlagPath path;
    ControlFunction control;
    JumpPlan plan;  // amplitudes resolved
    SkeletonOptions opts;
    double T = 0.0;
};

SkeletonPath solve_skeleton(const SkeletonSystem& sys, const Vector& x0, const ControlFunction& f, const JumpPlan& plan,
                            double T, const SkeletonOptions& opts = {});

/// RK4 flow with a constant control over [t0, t1] in `steps` equal steps.
Vector ode_flow(const SkeletonSystem& sys, const Vector& x, const Vector& f, double t0, double t1, int steps);

/// λ(t_j) = s_j.
TimeChange time_change_lambda(const std::vector<double>& times_t, const std::vector<double>& times_s, double T);

/// Half the smallest gap among {0, t_1, ..., t_K, T}.
double jump_gap(const std::vector<double>& times, double T);

/// Re-solve with jump times moved to s_k, same amplitudes, control transported by λ.
SkeletonPath perturb_jump_times(const SkeletonSystem& sys, const SkeletonPath& skeleton,
                                const std::vector<double>& times_s);

/// Max over interior grid points of |central difference - (b̃ + σ f)|.
double ode_residual(const SkeletonSystem& sys, const SkeletonPath& skeleton);

}  // namespace jumpsupport::skeleton
