#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "jumpsupport/levy.hpp"
#include "jumpsupport/metric.hpp"
#include "jumpsupport/sde.hpp"
#include "jumpsupport/skeleton.hpp"

namespace jumpsupport::support {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (95% by default).
Interval wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

struct McOptions {
    int n_steps = 200;
    int jobs = 1;
    sde::SimOptions sim;
    metric::SkorokhodOptions metric;
};

struct SupportCheckReport {
    std::string target_id;
    double eps = 0.0;
    std::size_t n = 0;
    std::size_t hits = 0;
    double estimate = 0.0;
    Interval ci;
    bool positive = false;
    /// Per-path Skorokhod upper bounds, in path order.
    std::vector<double> distances;

    /// Hit fraction for another radius, from the same sample.
    double estimate_at(double eps) const;
};

/// Fraction of N full-SDE paths within d_upper <= ε of the skeleton φ.
SupportCheckReport mc_support_probability(const sde::CoefficientSet& coeffs, const levy::LevyModel& model,
                                          const skeleton::SkeletonPath& phi, double eps, std::size_t N, double eta,
                                          std::uint64_t seed, const McOptions& opts = {},
                                          const std::string& id = "skeleton");

struct InclusionOptions {
    Vector x0;
    double T = 1.0;
    int n_steps = 200;
    int ode_substeps = 4;
    int jobs = 1;
    double admissible_tol = 1e-6;
    sde::SimOptions sim;
};

struct InclusionReport {
    std::size_t n_paths = 0;
    std::size_t passed = 0;
    double pass_rate = 1.0;
    double tol = 0.0;
    std::size_t jumps = 0;
    std::size_t jumps_admissible = 0;
    /// Largest segment deviation of each path.
    std::vector<double> max_deviation;
    /// Median over all segments of all paths.
    double median_segment_deviation = 0.0;
};

/// Path-wise comparison of simulated paths (jumps decomposed at η) with the
/// skeleton ODE restarted after every large jump.
InclusionReport forward_inclusion_check(const sde::CoefficientSet& coeffs, const levy::LevyModel& model, double eta,
                                        std::size_t n_paths, double tol, std::uint64_t seed,
                                        const InclusionOptions& opts);

/// 3 sqrt(T ∫_{|u|<η} |u|^2 μ(du)) |σ(x0)|: tolerance scaled to the neglected small-jump noise.
double neglected_noise_scale(const sde::CoefficientSet& coeffs, const levy::LevyModel& model, double eta, double T,
                             const Vector& x0);

/// e^{-T m} (2 δ m)^K with m = μ(|u| >= η).
double jump_window_probability(const levy::LevyModel& model, double eta, const std::vector<double>& times,
                               double delta, double T);

struct FrequencyReport {
    std::size_t hits = 0;
    std::size_t n = 0;
    double frequency = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo frequency of {J = K, |τ_k - t_k| < δ for all k}.
FrequencyReport jump_window_frequency(const levy::LevyModel& model, double eta, const std::vector<double>& times,
                                      double delta, double T, std::size_t N, std::uint64_t seed, int jobs = 1);

struct ReachOptions {
    int initial_jumps = 2;
    int max_jumps = 64;
    double max_amplitude = std::numeric_limits<double>::infinity();
    int n_pieces = 64;
    skeleton::SkeletonOptions skeleton;
};

struct ReachCertificate {
    std::string route;  // "cone" or "control"
    Vector x;
    Vector y;
    double T = 0.0;
    double eps = 0.0;
    std::optional<skeleton::JumpPlan> plan;
    std::optional<skeleton::ControlFunction> control;
    double terminal_error = 0.0;
    skeleton::SkeletonOptions opts;
};

/// For every unit ℓ and every ε, does μ charge {u·ℓ >= θ|u|, |u| < ε}? θ in (0, 1).
bool cone_condition(const levy::LevyModel& model, double theta);

ReachCertificate reach_cone(const skeleton::SkeletonSystem& sys, const Vector& x, const Vector& y, double T,
                            double eps, double theta, const ReachOptions& opts = {});

ReachCertificate reach_control(const skeleton::SkeletonSystem& sys, const levy::IntegrabilitySubspace& L,
                               const Vector& x, const Vector& y, double T, const ReachOptions& opts = {});

/// Re-solves the certificate's skeleton.
skeleton::SkeletonPath replay(const skeleton::SkeletonSystem& sys, const ReachCertificate& cert);

struct ScalingDirection {
    Vector dir;
    double slope = 0.0;
    double implied_alpha = 0.0;
    double nonlinearity = 0.0;  // max |residual| of the log-log fit
};

struct ScalingReport {
    std::vector<ScalingDirection> directions;
    double spread = 0.0;
    bool holds = false;
};

struct ScalingOptions {
    double spread_tol = 0.05;
    double nonlinear_tol = 0.05;
};

/// Fits ε ↦ ∫_{|u|<=ε} (u·ℓ)^2 μ(du) ≍ ε^{2-α} per direction.
ScalingReport check_scaling_condition(const levy::LevyModel& model, const std::vector<double>& eps_grid,
                                      const std::vector<Vector>& directions, const ScalingOptions& opts = {});

/// Unit directions on a uniform angle grid (d = 2), ±e_i otherwise.
std::vector<Vector> direction_grid(int d, int per_half_turn = 36);

}  // namespace jumpsupport::support
