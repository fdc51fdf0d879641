#include "jumpsupport/sde.hpp"

#include <algorithm>
#include <cmath>

#include "jumpsupport/errors.hpp"
#include "jumpsupport/tilt.hpp"

namespace jumpsupport::sde {

using levy::LevyModel;
using levy::Range;

// ---------------------------------------------------------------------------
// Coefficients
// ---------------------------------------------------------------------------

CoefficientSet CoefficientSet::affine(AffineForm form, double beta, double C) {
    const auto m = form.A.rows();
    if (m < 1 || form.A.cols() != m) throw PreconditionError("affine drift: A must be square");
    if (form.a.size() == 0) form.a = Vector::Zero(m);
    if (form.a.size() != m) throw PreconditionError("affine drift: offset dimension");
    if (form.sigma0.rows() != m || form.sigma0.cols() < 1) throw PreconditionError("affine sigma: Σ₀ must be m×d");
    const auto d = form.sigma0.cols();
    if (!form.sigma1.empty() && static_cast<Eigen::Index>(form.sigma1.size()) != m)
        throw PreconditionError("affine sigma: need one Σ₁ matrix per state coordinate");
    for (const auto& S : form.sigma1)
        if (S.rows() != m || S.cols() != d) throw PreconditionError("affine sigma: Σ₁ entries must be m×d");
    if (form.has_remainder) {
        if (form.r1.size() == 0) form.r1 = Vector::Zero(m);
        if (form.r1.size() != m || form.e.size() != m) throw PreconditionError("remainder: dimension mismatch");
        if (std::abs(form.e.norm() - 1.0) > 1e-12) throw PreconditionError("remainder: e must be a unit vector");
    }

    CoefficientSet c;
    c.m_ = static_cast<int>(m);
    c.d_ = static_cast<int>(d);
    if (!(beta > 0.0) || !(C > 0.0)) throw PreconditionError("coefficients: beta and C must be positive");
    c.beta_ = beta;
    c.C_ = C;
    c.lip_b_ = form.A.operatorNorm();
    double s1 = 0.0;
    for (const auto& S : form.sigma1) s1 += S.squaredNorm();
    c.lip_sigma_ = std::sqrt(s1);
    c.b_ = [A = form.A, a = form.a](const Vector& x) -> Vector { return A * x + a; };
    if (form.sigma1.empty()) {
        c.sigma_ = [S0 = form.sigma0](const Vector&) -> Matrix { return S0; };
    } else {
        c.sigma_ = [S0 = form.sigma0, S1 = form.sigma1](const Vector& x) -> Matrix {
            Matrix S = S0;
            for (std::size_t k = 0; k < S1.size(); ++k) S += x[static_cast<Eigen::Index>(k)] * S1[k];
            return S;
        };
    }
    if (form.has_remainder) {
        c.R_ = [r0 = form.r0, r1 = form.r1](const Vector& x) { return r0 + r1.dot(x); };
        c.e_ = form.e;
        if (std::abs(form.r0) > C || form.r1.norm() > C)
            throw PreconditionError("remainder: C must bound |R(0)| and the Lipschitz constant of R");
    } else {
        c.e_ = Vector::Zero(m);
    }
    c.form_ = std::move(form);
    return c;
}

CoefficientSet CoefficientSet::custom(int m, int d, VectorField b, MatrixField sigma, ScalarField R, Vector e,
                                      double beta, double C, double lip_b, double lip_sigma) {
    if (m < 1 || d < 1) throw PreconditionError("coefficients: dimensions must be positive");
    if (!b || !sigma) throw PreconditionError("coefficients: drift and sigma evaluators are required");
    if (!(beta > 0.0) || !(C > 0.0)) throw PreconditionError("coefficients: beta and C must be positive");
    CoefficientSet c;
    c.m_ = m;
    c.d_ = d;
    c.beta_ = beta;
    c.C_ = C;
    c.lip_b_ = lip_b;
    c.lip_sigma_ = lip_sigma;
    c.b_ = std::move(b);
    c.sigma_ = std::move(sigma);
    c.R_ = std::move(R);
    c.e_ = c.R_ ? std::move(e) : Vector::Zero(m);
    if (c.e_.size() != m) throw PreconditionError("remainder: direction dimension");
    return c;
}

Vector CoefficientSet::remainder(const Vector& x, const Vector& u) const {
    if (!R_) return Vector::Zero(m_);
    return (R_(x) * std::pow(u.norm(), beta_)) * e_;
}

Vector CoefficientSet::jump(const Vector& x, const Vector& u) const {
    Vector c = sigma_(x) * u;
    if (R_) c += (R_(x) * std::pow(u.norm(), beta_)) * e_;
    return c;
}

void CoefficientSet::check_compatible(const LevyModel& model) const {
    if (model.dim() != d_)
        throw PreconditionError("coefficients expect noise dimension " + std::to_string(d_) + ", model has " +
                                std::to_string(model.dim()));
    if (R_ && !(beta_ > model.max_stability_index()))
        throw DivergenceError("remainder moment diverges: beta must exceed every stability index of the model");
}

HypothesisReport check_hypotheses(const CoefficientSet& coeffs, double box, int pairs, Stream& rng) {
    HypothesisReport rep;
    const int m = coeffs.m();
    auto point = [&] {
        Vector x(m);
        for (int i = 0; i < m; ++i) x[i] = box * (2.0 * rng.uniform() - 1.0);
        return x;
    };
    for (int k = 0; k < pairs; ++k) {
        const Vector x = point();
        const Vector y = point();
        const double dx = (x - y).norm();
        if (dx == 0.0) continue;
        rep.b_quotient = std::max(rep.b_quotient, (coeffs.drift(x) - coeffs.drift(y)).norm() / dx);
        rep.sigma_quotient = std::max(rep.sigma_quotient, (coeffs.sigma(x) - coeffs.sigma(y)).norm() / dx);
        if (coeffs.has_remainder()) {
            const Vector u = rng.normal_vector(coeffs.d()) * rng.uniform();
            const double up = std::pow(u.norm(), coeffs.beta());
            if (up > 0.0) {
                rep.r_lipschitz =
                    std::max(rep.r_lipschitz, (coeffs.remainder(x, u) - coeffs.remainder(y, u)).norm() / (dx * up));
                rep.r_growth =
                    std::max(rep.r_growth, coeffs.remainder(Vector::Zero(m), u).norm() / up);
            }
        }
    }
    const double slack = 1.0 + 1e-6;
    rep.h1 = rep.b_quotient <= coeffs.lipschitz_b() * slack && rep.sigma_quotient <= coeffs.lipschitz_sigma() * slack;
    rep.h2 = rep.r_lipschitz <= coeffs.C() * slack && rep.r_growth <= coeffs.C() * slack;
    return rep;
}

// ---------------------------------------------------------------------------
// Drifts
// ---------------------------------------------------------------------------

Drift::Drift(CoefficientSet coeffs, Vector sigma_shift, double remainder_weight)
    : coeffs_(std::move(coeffs)), shift_(std::move(sigma_shift)), weight_(remainder_weight) {
    if (shift_.size() != coeffs_.d()) throw PreconditionError("drift: shift must live in the noise space");
}

Vector Drift::operator()(const Vector& x) const {
    Vector v = coeffs_.drift(x);
    if (shift_.squaredNorm() > 0.0) v -= coeffs_.sigma(x) * shift_;
    if (weight_ != 0.0) v -= (coeffs_.remainder_scale(x) * weight_) * coeffs_.remainder_direction();
    return v;
}

namespace {

double remainder_weight(const CoefficientSet& coeffs, const LevyModel& model, const Range& r) {
    if (!coeffs.has_remainder()) return 0.0;
    return model.radial_moment(coeffs.beta(), r);
}

}  // namespace

Drift effective_drift(const CoefficientSet& coeffs, const LevyModel& model) {
    coeffs.check_compatible(model);
    const auto L = levy::integrability_subspace(model);
    const Range ball = Range::unit_ball();
    return Drift(coeffs, levy::integrable_mean(model, L, ball), remainder_weight(coeffs, model, ball));
}

Drift effective_drift_eta(const CoefficientSet& coeffs, const LevyModel& model, double eta) {
    coeffs.check_compatible(model);
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("effective drift: eta must lie in (0, 1]");
    const auto L = levy::integrability_subspace(model);
    const Range win = Range::shift_window(eta);
    return Drift(coeffs, levy::integrable_mean(model, L, win), remainder_weight(coeffs, model, win));
}

Drift simulation_drift(const CoefficientSet& coeffs, const LevyModel& model, double eta) {
    coeffs.check_compatible(model);
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("simulation drift: eta must lie in (0, 1]");
    const Range win = Range::shift_window(eta);
    Vector shift = model.is_symmetric() ? Vector::Zero(model.dim()) : model.first_moment(win);
    return Drift(coeffs, std::move(shift), remainder_weight(coeffs, model, win));
}

// ---------------------------------------------------------------------------
// Simulators
// ---------------------------------------------------------------------------

namespace {

std::vector<double> uniform_grid(double S, double Q, int n) {
    std::vector<double> g(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) g[static_cast<std::size_t>(i)] = S + (Q - S) * i / n;
    g.back() = Q;
    return g;
}

/// Merge extra times into a grid, dropping duplicates.
std::vector<double> merge_times(std::vector<double> grid, const std::vector<double>& extra) {
    grid.insert(grid.end(), extra.begin(), extra.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

void guard(const Vector& x, double t, double cap) {
    if (!x.allFinite() || x.norm() > cap) throw BlowUpError(t, "state left the blow-up cap");
}

struct Stepper {
    const CoefficientSet& coeffs;
    Drift drift;
    levy::SmallJumpSampler small;

    Stepper(const CoefficientSet& c, const LevyModel& model, double eta, const levy::SmallJumpConfig& cfg)
        : coeffs(c),
          drift(simulation_drift(c, model, eta)),
          small(model, eta, cfg, c.has_remainder() ? c.beta() : 0.0) {}

    void step(Vector& x, double dt, Stream& rng) const {
        const auto inc = small.sample(dt, rng);
        Vector dx = drift(x) * dt + coeffs.sigma(x) * inc.du;
        if (coeffs.has_remainder()) dx += (coeffs.remainder_scale(x) * inc.dpow) * coeffs.remainder_direction();
        x += dx;
    }
};

void check_common(const CoefficientSet& coeffs, const LevyModel& model, const Vector& x, int n_steps, double eta) {
    coeffs.check_compatible(model);
    if (x.size() != coeffs.m()) throw PreconditionError("initial state dimension mismatch");
    if (n_steps < 1) throw PreconditionError("n_steps must be at least 1");
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("eta must lie in (0, 1]");
}

}  // namespace

CadlagPath euler_simulate(const CoefficientSet& coeffs, const LevyModel& model, const Vector& x0, double T,
                          int n_steps, double eta, Stream& rng, const SimOptions& opts) {
    check_common(coeffs, model, x0, n_steps, eta);
    if (!(T > 0.0)) throw PreconditionError("horizon T must be positive");
    const Stepper stepper(coeffs, model, eta, opts.small);
    const auto large = levy::sample_large_jumps(model, eta, T, rng);
    std::vector<double> jt;
    jt.reserve(large.size());
    for (const auto& j : large) jt.push_back(j.time);
    const auto grid = merge_times(uniform_grid(0.0, T, n_steps), jt);

    std::vector<Vector> values;
    values.reserve(grid.size());
    std::vector<PathJump> jumps;
    Vector x = x0;
    values.push_back(x);
    std::size_t next = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        stepper.step(x, grid[i] - grid[i - 1], rng);
        guard(x, grid[i], opts.blowup_cap);
        // several jumps may share one time stamp
        Vector pre = x;
        bool jumped = false;
        while (next < large.size() && large[next].time == grid[i]) {
            x += coeffs.jump(x, large[next].amplitude);
            jumped = true;
            ++next;
        }
        if (jumped) {
            guard(x, grid[i], opts.blowup_cap);
            jumps.push_back({grid[i], std::move(pre), x});
        }
        values.push_back(x);
    }
    return CadlagPath(grid, std::move(values), std::move(jumps));
}

CadlagPath simulate_truncated(const CoefficientSet& coeffs, const LevyModel& model, const Vector& x, double S,
                              double Q, int n_steps, double eta, Stream& rng, const SimOptions& opts) {
    check_common(coeffs, model, x, n_steps, eta);
    if (!(S >= 0.0) || Q < S) throw PreconditionError("need 0 <= S <= Q");
    if (Q == S) return CadlagPath::constant(S, x);
    const Stepper stepper(coeffs, model, eta, opts.small);
    const auto grid = uniform_grid(S, Q, n_steps);
    std::vector<Vector> values;
    values.reserve(grid.size());
    Vector y = x;
    values.push_back(y);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        stepper.step(y, grid[i] - grid[i - 1], rng);
        guard(y, grid[i], opts.blowup_cap);
        values.push_back(y);
    }
    return CadlagPath(grid, std::move(values));
}

TiltedPath simulate_tilted(const CoefficientSet& coeffs, const LevyModel& model, const Vector& x, double S,
                           double Q, int n_steps, double eta, const tilt::TiltFunction& g, Stream& rng,
                           const SimOptions& opts) {
    check_common(coeffs, model, x, n_steps, eta);
    if (!(S >= 0.0) || Q < S) throw PreconditionError("need 0 <= S <= Q");
    if (std::abs(g.eta() - eta) > 1e-12 * eta) throw PreconditionError("tilt outer radius must equal eta");
    if (g.sup_bound() > 0.5 + 1e-12) throw PreconditionError("tilt magnitude exceeds 1/2");
    TiltedPath out;
    if (Q == S) {
        out.path = CadlagPath::constant(S, x);
        return out;
    }

    // Base noise below the tilt annulus, explicit atoms on it.
    const double zeta = g.inner_radius();
    const double beta = coeffs.has_remainder() ? coeffs.beta() : 0.0;
    const Drift drift = simulation_drift(coeffs, model, eta);
    const levy::SmallJumpSampler base(model, zeta, opts.small, beta);
    const Range annulus{zeta, eta, false, false};
    const levy::WindowSampler ring(model, annulus);
    const double ring_rate = ring.mass();
    const Vector ring_mean = model.first_moment(annulus);
    const double ring_pow_mean = beta > 0.0 ? model.radial_moment(beta, annulus) : 0.0;
    const double gmax = g.sup_bound();
    std::vector<double> piece_mean;
    for (const auto& p : g.pieces()) piece_mean.push_back(p.mean(model));

    std::vector<double> cuts;
    for (double b : g.breakpoints())
        if (b > S && b < Q) cuts.push_back(b);
    const auto grid = merge_times(uniform_grid(S, Q, n_steps), cuts);

    std::vector<Vector> values;
    values.reserve(grid.size());
    Vector y = x;
    values.push_back(y);
    double log_sum = 0.0;
    double compensator = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double t0 = grid[i - 1];
        const double dt = grid[i] - t0;
        const auto pi = g.piece_at(t0);
        const auto& piece = g.pieces()[pi];
        auto inc = base.sample(dt, rng);
        auto take = [&](const Vector& u, double gu) {
            inc.du += u;
            if (beta > 0.0) inc.dpow += std::pow(u.norm(), beta);
            log_sum += std::log1p(gu);
            out.atoms.push_back({t0 + dt * rng.uniform(), u});
        };
        // base atoms retained with probability min(1, 1+g)
        const auto n = rng.poisson(ring_rate * dt);
        for (std::uint64_t k = 0; k < n; ++k) {
            const Vector u = ring.draw(rng);
            const double gu = piece.value(u);
            if (gu >= 0.0 || rng.uniform() < 1.0 + gu) take(u, gu);
        }
        // extra atoms at rate max(0, g) μ
        if (gmax > 0.0) {
            const auto n_add = rng.poisson(gmax * ring_rate * dt);
            for (std::uint64_t k = 0; k < n_add; ++k) {
                const Vector u = ring.draw(rng);
                const double gu = piece.value(u);
                if (gu > 0.0 && rng.uniform() * gmax < gu) take(u, gu);
            }
        }
        inc.du -= dt * ring_mean;
        inc.dpow -= dt * ring_pow_mean;
        compensator += dt * piece_mean[pi];

        Vector dx = drift(y) * dt + coeffs.sigma(y) * inc.du;
        if (coeffs.has_remainder()) dx += (coeffs.remainder_scale(y) * inc.dpow) * coeffs.remainder_direction();
        y += dx;
        guard(y, grid[i], opts.blowup_cap);
        values.push_back(y);
    }
    std::sort(out.atoms.begin(), out.atoms.end(), [](const TiltAtom& a, const TiltAtom& b) { return a.time < b.time; });
    out.path = CadlagPath(grid, std::move(values));
    out.log_density = -log_sum + compensator;
    return out;
}

}  // namespace jumpsupport::sde
