#include "jumpsupport/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "jumpsupport/errors.hpp"
#include "jumpsupport/path.hpp"
#include "jumpsupport/skeleton.hpp"

namespace jumpsupport::tilt {

using levy::IntegrabilitySubspace;
using levy::LevyModel;
using levy::Range;

namespace {

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

Range shell(const TiltTerm& t) { return {t.inner, t.outer, false, false}; }

/// Column index of `dir` among the columns of B.
Eigen::Index column_of(const Matrix& B, const Vector& dir) {
    for (Eigen::Index j = 0; j < B.cols(); ++j)
        if ((B.col(j) - dir).norm() < 1e-12) return j;
    throw PreconditionError("tilt: term direction is not a basis vector of L-perp");
}

}  // namespace

// ---------------------------------------------------------------------------
// TiltPiece / TiltFunction
// ---------------------------------------------------------------------------

double TiltPiece::value(const Vector& u) const {
    const double r = u.norm();
    if (!(r > zeta && r < eta)) return 0.0;
    double g = 0.0;
    for (const auto& t : terms)
        if (r > t.inner && r < t.outer) g += t.coef * sgn(t.dir.dot(u));
    return g;
}

double TiltPiece::sup_bound() const {
    std::vector<double> cuts;
    for (const auto& t : terms) {
        cuts.push_back(t.inner);
        cuts.push_back(t.outer);
    }
    std::sort(cuts.begin(), cuts.end());
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
        double s = 0.0;
        for (const auto& t : terms)
            if (mid > t.inner && mid < t.outer) s += std::abs(t.coef);
        worst = std::max(worst, s);
    }
    return worst;
}

double TiltPiece::mean(const LevyModel& model) const {
    double total = 0.0;
    for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        Matrix dir(t.dir.size(), 1);
        dir.col(0) = t.dir;
        for (const auto& cell : model.sign_cells(dir, shell(t))) total += t.coef * cell.pattern[0] * cell.mass;
    }
    return total;
}

Vector TiltPiece::matching_integral(const LevyModel& model, const IntegrabilitySubspace& L) const {
    const Matrix& B = L.complement();
    Vector coords = Vector::Zero(B.cols());
    for (const auto& t : terms) {
        if (t.coef == 0.0) continue;
        const auto j = column_of(B, t.dir);
        coords += t.coef * model.sign_moment(B, shell(t)).col(j);
    }
    return B * coords;
}

TiltFunction::TiltFunction(std::vector<double> breakpoints, std::vector<TiltPiece> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty() || breakpoints_.size() != pieces_.size())
        throw PreconditionError("tilt: need one breakpoint per piece");
    if (breakpoints_.front() != 0.0) throw PreconditionError("tilt: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1])) throw PreconditionError("tilt: breakpoints must increase");
    const double eta = pieces_.front().eta;
    for (const auto& p : pieces_) {
        if (!(p.zeta > 0.0 && p.zeta < p.eta)) throw PreconditionError("tilt: need 0 < zeta < eta");
        if (p.eta != eta) throw PreconditionError("tilt: every piece must share the outer radius");
        for (const auto& t : p.terms)
            if (t.inner < p.zeta || t.outer > p.eta || !(t.inner < t.outer))
                throw PreconditionError("tilt: term shell outside the support annulus");
        if (p.sup_bound() > 0.5 + 1e-12) throw PreconditionError("tilt: sup|g| exceeds 1/2");
    }
}

TiltFunction TiltFunction::zero(double eta, double zeta) {
    TiltPiece p;
    p.eta = eta;
    p.zeta = zeta;
    return TiltFunction({0.0}, {p});
}

std::size_t TiltFunction::piece_at(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.begin()) return 0;
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double TiltFunction::inner_radius() const {
    double z = pieces_.front().zeta;
    for (const auto& p : pieces_) z = std::min(z, p.zeta);
    return z;
}

double TiltFunction::sup_bound() const {
    double s = 0.0;
    for (const auto& p : pieces_) s = std::max(s, p.sup_bound());
    return s;
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

namespace {

double rcond(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[0] == 0.0) return 0.0;
    return s[s.size() - 1] / s[0];
}

/// Quadrature of ∫ (u - u_L) g dμ, independent of the closed-form moments.
Vector quadrature_matching(const TiltPiece& piece, const LevyModel& model, const IntegrabilitySubspace& L) {
    const int d = model.dim();
    Vector v = Vector::Zero(d);
    quad::Options opts;
    opts.rel_tol = 1e-10;
    opts.max_subdivisions = 20000;
    for (const auto& t : piece.terms) {
        if (t.coef == 0.0) continue;
        Matrix dir(d, 1);
        dir.col(0) = t.dir;
        for (int i = 0; i < d; ++i) {
            auto F = [&](const Vector& u) {
                const Vector w = L.project_complement(u);
                return w[i] * sgn(t.dir.dot(u));
            };
            v[i] += t.coef * model.integrate(F, shell(t), dir, opts);
        }
    }
    return v;
}

}  // namespace

TiltSolution solve_tilt(const LevyModel& model, const IntegrabilitySubspace& L, const Vector& w, double eta,
                        const SolveOptions& opts) {
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("solve_tilt: eta must lie in (0, 1]");
    if (w.size() != model.dim() || L.dim() != model.dim()) throw PreconditionError("solve_tilt: dimension mismatch");
    if (L.project(w).norm() > 1e-10 * std::max(1.0, w.norm()))
        throw PreconditionError("solve_tilt: target has a component in the integrability subspace L");

    TiltSolution sol;
    sol.piece.eta = eta;
    sol.piece.zeta = 0.5 * eta;
    if (w.norm() == 0.0) return sol;
    const Matrix& B = L.complement();
    const auto k = B.cols();
    if (k == 0) throw InfeasibleError("solve_tilt: L-perp is {0} but the target is nonzero");
    const Vector W = B.transpose() * w;

    bool found = false;
    double zeta = 0.5 * eta;
    while (zeta >= opts.min_zeta) {
        const Matrix M = model.sign_moment(B, {zeta, eta, false, false});
        if (rcond(M) > opts.rcond_floor) {
            const Vector c = M.fullPivLu().solve(W);
            if (c.lpNorm<1>() <= 0.5) {
                for (Eigen::Index j = 0; j < k; ++j) sol.piece.terms.push_back({B.col(j), c[j], zeta, eta});
                found = true;
            }
        } else {
            // sign(ℓ_j·u) coincide on the support: give each direction its own shell
            std::vector<double> radii(static_cast<std::size_t>(k) + 1);
            for (Eigen::Index j = 0; j <= k; ++j)
                radii[static_cast<std::size_t>(j)] = zeta * std::pow(eta / zeta, static_cast<double>(j) / k);
            radii.back() = eta;
            Matrix Ms(k, k);
            for (Eigen::Index j = 0; j < k; ++j) {
                const auto jj = static_cast<std::size_t>(j);
                Ms.col(j) = model.sign_moment(B, {radii[jj], radii[jj + 1], false, false}).col(j);
            }
            if (rcond(Ms) > opts.rcond_floor) {
                const Vector c = Ms.fullPivLu().solve(W);
                if (c.lpNorm<Eigen::Infinity>() <= 0.5) {
                    for (Eigen::Index j = 0; j < k; ++j) {
                        const auto jj = static_cast<std::size_t>(j);
                        sol.piece.terms.push_back({B.col(j), c[j], radii[jj], radii[jj + 1]});
                    }
                    sol.shell_split = true;
                    found = true;
                }
            }
        }
        if (found) break;
        zeta *= 0.5;
        ++sol.halvings;
    }
    if (!found)
        throw InfeasibleError("solve_tilt: no feasible inner radius above " + format_double(opts.min_zeta) +
                              " (target norm " + format_double(w.norm()) + ")");
    sol.piece.zeta = zeta;

    try {
        const Vector v = quadrature_matching(sol.piece, model, L);
        sol.residual = (v - w).norm() / w.norm();
    } catch (const PreconditionError&) {
        sol.residual = std::numeric_limits<double>::quiet_NaN();
    }
    if (sol.residual > opts.verify_tol)
        throw NumericalError("solve_tilt: matching integral misses the target by relative " +
                             format_double(sol.residual));
    return sol;
}

TiltFunction control_to_tilt(const skeleton::ControlFunction& f, const LevyModel& model,
                             const IntegrabilitySubspace& L, double eta, const SolveOptions& opts) {
    const Vector ups = levy::upsilon_eta(model, L, eta);
    std::vector<TiltPiece> pieces;
    for (const auto& v : f.values()) pieces.push_back(solve_tilt(model, L, v + ups, eta, opts).piece);
    return TiltFunction(f.breakpoints(), std::move(pieces));
}

double density_log(const TiltFunction& g, const std::vector<sde::TiltAtom>& atoms, double T,
                   const LevyModel& model) {
    if (!(T > 0.0)) throw PreconditionError("density_log: T must be positive");
    double v = 0.0;
    for (const auto& a : atoms) {
        if (a.time < 0.0 || a.time > T) throw PreconditionError("density_log: atom outside [0, T]");
        v -= std::log1p(g(a.time, a.u));
    }
    const auto& bp = g.breakpoints();
    for (std::size_t i = 0; i < bp.size(); ++i) {
        const double hi = i + 1 < bp.size() ? std::min(bp[i + 1], T) : T;
        const double dur = hi - bp[i];
        if (dur > 0.0) v += dur * g.pieces()[i].mean(model);
    }
    return v;
}

}  // namespace jumpsupport::tilt
