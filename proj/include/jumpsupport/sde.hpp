#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "jumpsupport/levy.hpp"
#include "jumpsupport/path.hpp"
#include "jumpsupport/rng.hpp"

namespace jumpsupport::tilt {
class TiltFunction;
}

namespace jumpsupport::sde {

using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;
using ScalarField = std::function<double(const Vector&)>;

/// Built-in parametric coefficients:
///   b(x) = A x + a
///   σ(x) = Σ₀ + Σ_k x_k Σ₁[k]
///   r(x,u) = (r₀ + r₁·x) |u|^β e    (present only when has_remainder)
struct AffineForm {
    Matrix A;
    Vector a;
    Matrix sigma0;
    std::vector<Matrix> sigma1;
    bool has_remainder = false;
    double r0 = 0.0;
    Vector r1;
    Vector e;
};

class CoefficientSet {
public:
    static CoefficientSet affine(AffineForm form, double beta = 2.0, double C = 1.0);
    /// Registration point for externally supplied evaluators. `R` may be empty
    /// (then r ≡ 0); the Lipschitz constants are the declared H1 constants.
    static CoefficientSet custom(int m, int d, VectorField b, MatrixField sigma, ScalarField R, Vector e,
                                 double beta, double C, double lip_b, double lip_sigma);

    int m() const { return m_; }
    int d() const { return d_; }
    double beta() const { return beta_; }
    double C() const { return C_; }
    double lipschitz_b() const { return lip_b_; }
    double lipschitz_sigma() const { return lip_sigma_; }
    const std::optional<AffineForm>& affine_form() const { return form_; }

    Vector drift(const Vector& x) const { return b_(x); }
    Matrix sigma(const Vector& x) const { return sigma_(x); }
    bool has_remainder() const { return static_cast<bool>(R_); }
    double remainder_scale(const Vector& x) const { return R_ ? R_(x) : 0.0; }
    const Vector& remainder_direction() const { return e_; }
    /// r(x, u)
    Vector remainder(const Vector& x, const Vector& u) const;
    /// c(x, u) = σ(x) u + r(x, u)
    Vector jump(const Vector& x, const Vector& u) const;

    /// Dimensions agree and β exceeds every stability index of the model.
    void check_compatible(const levy::LevyModel& model) const;

private:
    int m_ = 1;
    int d_ = 1;
    double beta_ = 2.0;
    double C_ = 1.0;
    double lip_b_ = 0.0;
    double lip_sigma_ = 0.0;
    VectorField b_;
    MatrixField sigma_;
    ScalarField R_;
    Vector e_;
    std::optional<AffineForm> form_;
};

struct HypothesisReport {
    double b_quotient = 0.0;      // max |b(x)-b(y)| / |x-y|
    double sigma_quotient = 0.0;  // max |σ(x)-σ(y)|_F / |x-y|
    double r_lipschitz = 0.0;     // max |r(x,u)-r(y,u)| / (|x-y||u|^β)
    double r_growth = 0.0;        // max |r(0,u)| / |u|^β
    bool h1 = false;
    bool h2 = false;
};

/// Sampled H1/H2 check on `pairs` random pairs in the box [-box, box]^m.
HypothesisReport check_hypotheses(const CoefficientSet& coeffs, double box, int pairs, Stream& rng);

/// x ↦ b(x) - σ(x)·shift - R(x)·weight·e
class Drift {
public:
    Drift(CoefficientSet coeffs, Vector sigma_shift, double remainder_weight);

    Vector operator()(const Vector& x) const;
    const Vector& sigma_shift() const { return shift_; }
    double remainder_weight() const { return weight_; }
    const CoefficientSet& coefficients() const { return coeffs_; }

private:
    CoefficientSet coeffs_;
    Vector shift_;
    double weight_;
};

/// b̃(x) = b(x) - ∫_{|u|<=1} σ(x)u_L μ(du) - ∫_{|u|<=1} r(x,u) μ(du)
Drift effective_drift(const CoefficientSet& coeffs, const levy::LevyModel& model);
/// b̃_η, the same integrals over η <= |u| <= 1.
Drift effective_drift_eta(const CoefficientSet& coeffs, const levy::LevyModel& model, double eta);
/// b̃_η - σ υ_η = b - ∫_{η<=|u|<=1} c(x,u) μ(du); the drift paired with
/// the compensated small-jump integral below η.
Drift simulation_drift(const CoefficientSet& coeffs, const levy::LevyModel& model, double eta);

struct SimOptions {
    levy::SmallJumpConfig small;
    double blowup_cap = 1e12;
};

/// Full SDE with the jump decomposition at η: compensated small jumps on the
/// Euler grid, large jumps applied exactly at their times.
CadlagPath euler_simulate(const CoefficientSet& coeffs, const levy::LevyModel& model, const Vector& x0, double T,
                          int n_steps, double eta, Stream& rng, const SimOptions& opts = {});

/// Large-jump-truncated SDE on [S, Q] started at X_S = x.
CadlagPath simulate_truncated(const CoefficientSet& coeffs, const levy::LevyModel& model, const Vector& x, double S,
                              double Q, int n_steps, double eta, Stream& rng, const SimOptions& opts = {});

struct TiltAtom {
    double time = 0.0;
    Vector u;
};

struct TiltedPath {
    CadlagPath path;
    double log_density = 0.0;
    /// Atoms of the tilted measure inside the tilt annulus.
    std::vector<TiltAtom> atoms;
};

/// Truncated SDE driven by the point measure with intensity (1+g_t(u))μ(du)dt.
TiltedPath simulate_tilted(const CoefficientSet& coeffs, const levy::LevyModel& model, const Vector& x, double S,
                           double Q, int n_steps, double eta, const tilt::TiltFunction& g, Stream& rng,
                           const SimOptions& opts = {});

}  // namespace jumpsupport::sde
