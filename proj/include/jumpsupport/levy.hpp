#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "jumpsupport/quadrature.hpp"
#include "jumpsupport/rng.hpp"
#include "jumpsupport/types.hpp"

namespace jumpsupport::levy {

// ---------------------------------------------------------------------------
// Parametric Lévy measures
// ---------------------------------------------------------------------------

/// Independent symmetric α_i-stable components; μ lives on the coordinate
/// axes with density c_i |z|^{-1-α_i} on axis i.
struct CylindricalStable {
    std::vector<double> alpha;
    std::vector<double> scale;
};

/// Isotropic density c |u|^{-d-α} on R^d.
struct RadialStable {
    double alpha = 1.5;
    double scale = 1.0;
    int dim = 1;
};

/// Image of c|z|^{-1-α}dz on R under z ↦ (z, |z|^γ sgn z).
struct CurveImage {
    double alpha = 1.5;
    double gamma = 2.0;
    double scale = 1.0;
};

/// Density c z^{-1-α} on (0, 1].
struct OneSidedStable1D {
    double alpha = 1.5;
    double scale = 1.0;
};

struct Atom {
    Vector u;
    double weight = 0.0;
};

/// Finite measure Σ w_j δ_{u_j}.
struct Discrete {
    std::vector<Atom> atoms;
};

using Variant = std::variant<CylindricalStable, RadialStable, CurveImage, OneSidedStable1D, Discrete>;

/// Radial window {lo ⋖ |u| ⋖ hi}; the inclusivity flags only matter for
/// atoms of a Discrete measure.
struct Range {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool include_lo = false;
    bool include_hi = false;

    bool contains(double r) const {
        const bool above = include_lo ? r >= lo : r > lo;
        const bool below = include_hi ? r <= hi : r < hi;
        return above && below;
    }
    /// {|u| <= 1}
    static Range unit_ball() { return {0.0, 1.0, false, true}; }
    /// {|u| >= eta}
    static Range tail(double eta) {
        return {eta, std::numeric_limits<double>::infinity(), true, false};
    }
    /// {|u| < eta}
    static Range below(double eta) { return {0.0, eta, false, false}; }
    /// {eta <= |u| <= 1}
    static Range shift_window(double eta) { return {eta, 1.0, true, true}; }
};

/// Mass of one sign pattern (sign(ℓ_j·u))_j inside a radial window.
struct SignCell {
    std::vector<int> pattern;  // entries in {-1, 0, +1}
    double mass = 0.0;
};

class LevyModel;

/// Precomputed inverse-CDF sampler for μ restricted to a radial window
/// (window must exclude the origin for non-discrete measures).
class WindowSampler {
public:
    WindowSampler(const LevyModel& model, const Range& window);

    double mass() const { return mass_; }
    Vector draw(Stream& rng) const;

private:
    enum class Kind { Linear, Curve, Radial, Atom };
    struct Component {
        Kind kind;
        double cumulative;
        Vector dir;           // Linear: unit direction; Atom: the atom
        double sign = 1.0;    // Curve branch
        double lo_pow = 0.0;  // z_lo^{-α}
        double hi_pow = 0.0;  // z_hi^{-α}
        double alpha = 1.0;
        double gamma = 1.0;
        int dim = 1;
    };
    std::vector<Component> components_;
    double mass_ = 0.0;
};

class LevyModel {
public:
    explicit LevyModel(Variant v);

    static LevyModel cylindrical(std::vector<double> alpha, std::vector<double> scale = {});
    static LevyModel radial(double alpha, int dim, double scale = 1.0);
    static LevyModel curve(double alpha, double gamma, double scale = 1.0);
    static LevyModel one_sided(double alpha, double scale = 1.0);
    static LevyModel discrete(std::vector<Atom> atoms);

    const Variant& variant() const { return variant_; }
    std::string variant_name() const;
    int dim() const { return dim_; }
    /// Largest stability index (0 for a Discrete measure).
    double max_stability_index() const;
    /// μ(-A) = μ(A).
    bool is_symmetric() const;
    bool is_discrete() const { return std::holds_alternative<Discrete>(variant_); }

    // Closed-form (or curve-parameter quadrature) measure queries over a
    // radial window. Divergent integrals throw DivergenceError.

    /// ∫ |u|^p μ(du)
    double radial_moment(double p, const Range& r) const;
    double mass(const Range& r) const { return radial_moment(0.0, r); }
    /// ∫ u μ(du)
    Vector first_moment(const Range& r) const;
    /// ∫ u u^T μ(du)
    Matrix second_moment(const Range& r) const;
    /// M_ij = ∫ (ℓ_i·u) sign(ℓ_j·u) μ(du); directions are the columns of `dirs`.
    Matrix sign_moment(const Matrix& dirs, const Range& r) const;
    /// Partition of the window by the sign vector (sign(ℓ_j·u))_j.
    std::vector<SignCell> sign_cells(const Matrix& dirs, const Range& r) const;

    /// Independent quadrature route: ∫ F(u) μ(du) over a window with lo > 0,
    /// evaluated along the parametrized support with adaptive Gauss-Kronrod.
    /// `sign_dirs` adds breakpoints where F may jump (sign(ℓ·u) switches).
    double integrate(const std::function<double(const Vector&)>& F, const Range& r,
                     const Matrix& sign_dirs = Matrix(), const quad::Options& opts = {}) const;

    /// One draw from μ restricted to the window, normalized.
    Vector sample(const Range& r, Stream& rng) const;

    /// Unit directions of the support at radii below `radius` (sampled along
    /// the support parametrization); empty optional means every direction.
    std::optional<std::vector<Vector>> small_jump_directions(double radius) const;

    /// For CurveImage: the parameter z > 0 with |(z, z^γ)| = radius.
    double curve_parameter(double radius) const;

    /// ∫ (|u|^2 ∧ 1) μ(du); finite for every valid model.
    double levy_integral() const;

private:
    Variant variant_;
    int dim_ = 1;
};

// ---------------------------------------------------------------------------
// Integrability subspace and the operations built on it
// ---------------------------------------------------------------------------

class IntegrabilitySubspace {
public:
    IntegrabilitySubspace(Matrix basis, int dim);

    int dim() const { return dim_; }
    /// Orthonormal basis of L as columns (possibly zero columns).
    const Matrix& basis() const { return basis_; }
    /// Orthonormal basis of L^⊥ as columns.
    const Matrix& complement() const { return complement_; }
    bool is_full() const { return basis_.cols() == dim_; }
    bool is_trivial() const { return basis_.cols() == 0; }

    Vector project(const Vector& u) const;
    Vector project_complement(const Vector& u) const { return u - project(u); }

private:
    Matrix basis_;
    Matrix complement_;
    int dim_;
};

IntegrabilitySubspace integrability_subspace(const LevyModel& model);

/// u_L, the orthogonal projection of u on L.
Vector project_onto_L(const Vector& u, const IntegrabilitySubspace& L);

/// ∫_{|u|<=1} |u|^β μ(du).
double beta_moment(const LevyModel& model, double beta);

/// ∫_{η<=|u|<=1} (u - u_L) μ(du) ∈ L^⊥.
Vector upsilon_eta(const LevyModel& model, const IntegrabilitySubspace& L, double eta);

/// ∫_{|u|<=1} u_L μ(du); finite by construction of L.
Vector integrable_mean(const LevyModel& model, const IntegrabilitySubspace& L, const Range& r);

/// μ(|u| >= η).
double tail_mass(const LevyModel& model, double eta);

struct TimedJump {
    double time = 0.0;
    Vector amplitude;
};

/// Atoms of the Poisson point measure with |u| >= η on [0, T], sorted by time.
std::vector<TimedJump> sample_large_jumps(const LevyModel& model, double eta, double T,
                                          Stream& rng);


struct SmallJumpConfig {
    /// Neglected-band variance rate target: ∫_{|u|<=ζ_in}|u|^2 μ(du) <= tol_var_rate.
    double tol_var_rate = 1e-10;
    /// Cap on μ(ζ_in < |u| < η); raises ζ_in when the variance target is unaffordable.
    double max_rate = 2e4;
    /// Replace the neglected band by a centered Gaussian with matching covariance.
    bool gaussian_band = true;
    /// ζ_in never exceeds this radius (used by the tilted sampler).
    double max_inner = std::numeric_limits<double>::infinity();
};

/// Increment of the compensated small-jump integral ∫_{|u|<η} u Ñ(du, dt)
/// over an interval of length dt (builds a sampler per call).
Vector sample_small_jump_increment(const LevyModel& model, double eta, double dt, Stream& rng,
                                   const SmallJumpConfig& cfg = {});

/// Compound-Poisson-plus-Gaussian sampler for ∫_{|u|<η} u Ñ(du, dt).
class SmallJumpSampler {
public:
    SmallJumpSampler(const LevyModel& model, double eta, const SmallJumpConfig& cfg = {},
                     double beta = 0.0);

    struct Increment {
        Vector du;           // compensated Σ u over atoms (+ Gaussian band)
        double dpow = 0.0;   // compensated Σ |u|^β over annulus atoms
    };

    Increment sample(double dt, Stream& rng) const;

    /// Draws raw annulus atoms over an interval of length dt (uncompensated).
    template <class Visitor>
    void for_each_atom(double dt, Stream& rng, Visitor&& visit) const {
        const auto n = rng.poisson(rate_ * dt);
        for (std::uint64_t i = 0; i < n; ++i) visit(window_.draw(rng));
    }

    double eta() const { return eta_; }
    double inner_cut() const { return inner_; }
    double annulus_rate() const { return rate_; }
    const Range& annulus() const { return annulus_; }
    const Vector& annulus_mean() const { return mean_; }
    double annulus_pow_mean() const { return pow_mean_; }
    /// Covariance rate of the band {|u| <= ζ_in}.
    const Matrix& band_covariance() const { return band_cov_; }
    /// Covariance rate of the whole window {|u| < η}.
    Matrix total_covariance() const;
    double beta() const { return beta_; }
    const LevyModel& model() const { return model_; }

private:
    LevyModel model_;
    WindowSampler window_;
    double eta_;
    double inner_ = 0.0;
    double beta_ = 0.0;
    Range annulus_;
    double rate_ = 0.0;
    Vector mean_;
    double pow_mean_ = 0.0;
    Matrix band_cov_;
    Matrix band_chol_;
    bool gaussian_ = true;
};

}  // namespace jumpsupport::levy
