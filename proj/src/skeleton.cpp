#include "jumpsupport/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "jumpsupport/errors.hpp"

namespace jumpsupport::skeleton {

using levy::LevyModel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

// ---------------------------------------------------------------------------
// Controls and plans
// ---------------------------------------------------------------------------

ControlFunction::ControlFunction(std::vector<double> breakpoints, std::vector<Vector> values,
                                 const levy::IntegrabilitySubspace& L)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.empty() || breakpoints_.size() != values_.size())
        throw PreconditionError("control: need one breakpoint per value");
    if (breakpoints_.front() != 0.0) throw PreconditionError("control: first breakpoint must be 0");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1])) throw PreconditionError("control: breakpoints must increase");
    for (const auto& v : values_) {
        if (v.size() != L.dim()) throw PreconditionError("control: value dimension differs from the noise dimension");
        if (!v.allFinite()) throw PreconditionError("control: non-finite value");
        if (L.project(v).norm() > 1e-10 * std::max(1.0, v.norm()))
            throw PreconditionError("control: value has a component in the integrability subspace L");
    }
}

ControlFunction ControlFunction::constant(const Vector& value, const levy::IntegrabilitySubspace& L) {
    return ControlFunction({0.0}, {value}, L);
}

ControlFunction ControlFunction::zero(const levy::IntegrabilitySubspace& L) {
    return constant(Vector::Zero(L.dim()), L);
}

std::size_t ControlFunction::piece_at(double t) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
    if (it == breakpoints_.begin()) return 0;
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

ControlFunction ControlFunction::transported(const TimeChange& lambda) const {
    ControlFunction out;
    out.values_ = values_;
    out.breakpoints_.reserve(breakpoints_.size());
    for (double b : breakpoints_) out.breakpoints_.push_back(b == 0.0 ? 0.0 : lambda(b));
    return out;
}

std::vector<double> JumpPlan::times() const {
    std::vector<double> t;
    t.reserve(jumps.size());
    for (const auto& j : jumps) t.push_back(j.time);
    return t;
}

void JumpPlan::validate(double T) const {
    double prev = 0.0;
    for (const auto& j : jumps) {
        if (!(j.time > 0.0 && j.time < T)) throw PreconditionError("jump plan: times must lie in (0, T)");
        if (!(j.time > prev)) throw PreconditionError("jump plan: times must strictly increase");
        if (j.amplitude.has_value() == j.target.has_value())
            throw PreconditionError("jump plan: each jump needs exactly one of amplitude or target");
        prev = j.time;
    }
}

JumpPlan JumpPlan::from_amplitudes(const std::vector<double>& times, const std::vector<Vector>& amplitudes) {
    if (times.size() != amplitudes.size()) throw PreconditionError("jump plan: times and amplitudes differ in length");
    JumpPlan p;
    for (std::size_t k = 0; k < times.size(); ++k) p.jumps.push_back({times[k], amplitudes[k], std::nullopt});
    return p;
}

const char* to_string(Decision d) {
    switch (d) {
        case Decision::Yes: return "yes";
        case Decision::No: return "no";
        default: return "boundary";
    }
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

namespace {

struct Candidate {
    double dist = kInf;
    Vector u;
};

void consider(Candidate& best, double dist, const Vector& u, double tie) {
    if (dist < best.dist - tie || (dist <= best.dist + tie && u.norm() < best.u.norm())) {
        best.dist = dist;
        best.u = u;
    }
}

/// Minimize over a one-parameter branch u(z), z in [zmin, zmax].
Candidate search_branch(const std::function<Vector(double)>& branch, const std::function<double(const Vector&)>& dist,
                        double zmin, double zmax, double tie) {
    const double S = std::max(std::abs(zmin), std::abs(zmax));
    std::vector<double> zs;
    constexpr int K = 400;
    zs.push_back(0.0);
    for (int k = 0; k <= K; ++k) {
        const double z = S * std::pow(10.0, -10.0 + 10.0 * k / K);
        if (z <= zmax) zs.push_back(z);
        if (-z >= zmin) zs.push_back(-z);
    }
    std::sort(zs.begin(), zs.end());
    std::vector<double> f(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) f[i] = dist(branch(zs[i]));

    Candidate best;
    for (std::size_t i = 0; i < zs.size(); ++i) consider(best, f[i], branch(zs[i]), tie);
    // golden-section refinement around every local minimum of the scan
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t i = 0; i < zs.size(); ++i) {
        const bool left_ok = i == 0 || f[i] <= f[i - 1];
        const bool right_ok = i + 1 == zs.size() || f[i] <= f[i + 1];
        if (!(left_ok && right_ok)) continue;
        double a = zs[i == 0 ? 0 : i - 1];
        double b = zs[i + 1 == zs.size() ? i : i + 1];
        double c = b - g * (b - a);
        double d = a + g * (b - a);
        double fc = dist(branch(c));
        double fd = dist(branch(d));
        for (int it = 0; it < 200 && (b - a) > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = dist(branch(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = dist(branch(d));
            }
        }
        const double z = 0.5 * (a + b);
        consider(best, dist(branch(z)), branch(z), tie);
    }
    return best;
}

/// Levenberg-Marquardt on F(u) = x + c(x,u) - y over u in R^d.
Candidate search_full(const std::function<Vector(const Vector&)>& F, const Vector& start, double tie, bool& converged) {
    Candidate best;
    const auto d = start.size();
    std::vector<Vector> starts{start, Vector::Zero(d)};
    for (Eigen::Index i = 0; i < d; ++i) {
        Vector s = start;
        s[i] += 0.1 * start.norm() + 1e-3;
        starts.push_back(s);
    }
    converged = false;
    for (const auto& s0 : starts) {
        Vector u = s0;
        Vector r = F(u);
        double lambda = 1e-3;
        for (int it = 0; it < 200; ++it) {
            Matrix J(r.size(), d);
            for (Eigen::Index k = 0; k < d; ++k) {
                const double hk = 1e-7 * (1.0 + std::abs(u[k]));
                Vector up = u;
                Vector um = u;
                up[k] += hk;
                um[k] -= hk;
                J.col(k) = (F(up) - F(um)) / (2.0 * hk);
            }
            const Vector grad = J.transpose() * r;
            if (grad.norm() < 1e-14 * (1.0 + r.norm()) || r.norm() < 1e-15) {
                converged = true;
                break;
            }
            Matrix H = J.transpose() * J;
            H.diagonal() *= (1.0 + lambda);
            H.diagonal().array() += 1e-300;
            const Vector step = H.ldlt().solve(-grad);
            const Vector r_new = F(u + step);
            if (r_new.norm() < r.norm()) {
                u += step;
                r = r_new;
                lambda = std::max(lambda * 0.3, 1e-12);
                if (step.norm() < 1e-15 * (1.0 + u.norm())) {
                    converged = true;
                    break;
                }
            } else {
                lambda *= 10.0;
                if (lambda > 1e12) {
                    converged = true;
                    break;
                }
            }
        }
        consider(best, r.norm(), u, tie);
    }
    return best;
}

}  // namespace

AdmissibleResult admissible(const Vector& x, const Vector& y, const sde::CoefficientSet& coeffs,
                            const LevyModel& model, double tol) {
    if (!(tol > 0.0)) throw PreconditionError("admissible: tol must be positive");
    coeffs.check_compatible(model);
    if (x.size() != coeffs.m() || y.size() != coeffs.m()) throw PreconditionError("admissible: state dimension");
    const double scale = 1.0 + (y - x).norm();
    const double tie = 1e-12 * scale;
    auto dist = [&](const Vector& u) { return (x + coeffs.jump(x, u) - y).norm(); };
    const int d = model.dim();

    AdmissibleResult res;
    Candidate best;
    bool converged = true;
    if (const auto* disc = std::get_if<levy::Discrete>(&model.variant())) {
        for (const auto& a : disc->atoms) consider(best, dist(a.u), a.u, tie);
    } else if (const auto* rad = std::get_if<levy::RadialStable>(&model.variant()); rad && rad->dim >= 2) {
        const Matrix S = coeffs.sigma(x);
        const Vector start = S.completeOrthogonalDecomposition().solve(y - x);
        best = search_full([&](const Vector& u) -> Vector { return x + coeffs.jump(x, u) - y; }, start, tie,
                           converged);
    } else {
        std::vector<std::function<Vector(double)>> branches;
        double zmin = -kInf;
        double zmax = kInf;
        if (const auto* cyl = std::get_if<levy::CylindricalStable>(&model.variant())) {
            for (int i = 0; i < static_cast<int>(cyl->alpha.size()); ++i)
                branches.push_back([i, d](double z) {
                    Vector u = Vector::Zero(d);
                    u[i] = z;
                    return u;
                });
        } else if (const auto* cur = std::get_if<levy::CurveImage>(&model.variant())) {
            const double gam = cur->gamma;
            branches.push_back([gam](double z) {
                Vector u(2);
                u << z, (z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0)) * std::pow(std::abs(z), gam);
                return u;
            });
        } else {
            branches.push_back([](double z) { return Vector::Constant(1, z); });
            if (std::holds_alternative<levy::OneSidedStable1D>(model.variant())) {
                zmin = 0.0;
                zmax = 1.0;
            }
        }
        for (const auto& br : branches) {
            const double response = (coeffs.jump(x, br(1.0)) - coeffs.jump(x, br(0.0))).norm();
            const double S = std::min(1e8, std::max(1.0, 10.0 * scale / std::max(response, 1e-12)));
            const auto c = search_branch(br, dist, std::max(zmin, -S), std::min(zmax, S), tie);
            consider(best, c.dist, c.u, tie);
        }
    }

    res.distance = best.dist;
    res.amplitude = best.u;
    if (best.dist <= tol * scale) {
        res.decision = Decision::Yes;
    } else if (best.dist >= 10.0 * tol * scale && converged) {
        res.decision = Decision::No;
    } else {
        res.decision = Decision::Boundary;
        res.diagnostic = converged ? "distance inside the boundary band" : "local search did not converge";
    }
    return res;
}

// ---------------------------------------------------------------------------
// Skeleton ODE
// ---------------------------------------------------------------------------

SkeletonSystem::SkeletonSystem(sde::VectorField drift_, sde::CoefficientSet coeffs_, LevyModel model_)
    : drift(std::move(drift_)), coeffs(std::move(coeffs_)), model(std::move(model_)) {
    if (!drift) throw PreconditionError("skeleton: drift evaluator required");
    coeffs.check_compatible(model);
}

SkeletonSystem SkeletonSystem::effective(const sde::CoefficientSet& coeffs, const LevyModel& model) {
    return SkeletonSystem(sde::effective_drift(coeffs, model), coeffs, model);
}

namespace {

Vector rk4_step(const SkeletonSystem& sys, const Vector& x, const Vector& f, double h) {
    const Vector k1 = sys.rhs(x, f);
    const Vector k2 = sys.rhs(x + 0.5 * h * k1, f);
    const Vector k3 = sys.rhs(x + 0.5 * h * k2, f);
    const Vector k4 = sys.rhs(x + h * k3, f);
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

sde::CoefficientSet identity_coefficients(int d) {
    sde::AffineForm form;
    form.A = Matrix::Zero(d, d);
    form.sigma0 = Matrix::Identity(d, d);
    return sde::CoefficientSet::affine(form);
}

}  // namespace

Vector ode_flow(const SkeletonSystem& sys, const Vector& x, const Vector& f, double t0, double t1, int steps) {
    if (steps < 1) throw PreconditionError("ode_flow: need at least one step");
    const double h = (t1 - t0) / steps;
    Vector y = x;
    for (int i = 0; i < steps; ++i) y = rk4_step(sys, y, f, h);
    return y;
}

SkeletonPath solve_skeleton(const SkeletonSystem& sys, const Vector& x0, const ControlFunction& f, const JumpPlan& plan,
                            double T, const SkeletonOptions& opts) {
    if (!(T > 0.0)) throw PreconditionError("skeleton: T must be positive");
    if (!(opts.h > 0.0)) throw PreconditionError("skeleton: step size must be positive");
    if (x0.size() != sys.coeffs.m()) throw PreconditionError("skeleton: initial state dimension");
    if (f.dim() != sys.coeffs.d()) throw PreconditionError("skeleton: control dimension");
    plan.validate(T);

    std::vector<double> events{0.0, T};
    for (double b : f.breakpoints())
        if (b > 0.0 && b < T) events.push_back(b);
    for (const auto& j : plan.jumps) events.push_back(j.time);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end()), events.end());

    SkeletonPath out{CadlagPath(), f, JumpPlan{}, opts, T};
    std::vector<double> times{0.0};
    std::vector<Vector> values{x0};
    std::vector<PathJump> jumps;
    Vector x = x0;
    std::size_t next_jump = 0;
    const auto id = identity_coefficients(sys.model.dim());
    for (std::size_t e = 1; e < events.size(); ++e) {
        const double a = events[e - 1];
        const double b = events[e];
        const Vector& fv = f.value_at(a);
        const int n = std::max(1, static_cast<int>(std::ceil((b - a) / opts.h - 1e-9)));
        const double h = (b - a) / n;
        for (int i = 1; i <= n; ++i) {
            x = rk4_step(sys, x, fv, h);
            if (!x.allFinite() || x.norm() > opts.blowup_cap) throw BlowUpError(a + i * h, "skeleton blew up");
            times.push_back(i == n ? b : a + i * h);
            values.push_back(x);
        }
        if (next_jump < plan.jumps.size() && plan.jumps[next_jump].time == b) {
            const auto& pj = plan.jumps[next_jump];
            Vector u;
            if (pj.target) {
                const auto adm = admissible(x, *pj.target, sys.coeffs, sys.model, opts.admissible_tol);
                if (adm.decision != Decision::Yes)
                    throw PreconditionError("skeleton: target jump at t=" + format_double(b) + " is not admissible (" +
                                            to_string(adm.decision) + ", distance " + format_double(adm.distance) +
                                            ")");
                u = adm.amplitude;
            } else {
                u = *pj.amplitude;
                if (u.size() != sys.model.dim()) throw PreconditionError("skeleton: amplitude dimension");
                const auto adm = admissible(Vector::Zero(u.size()), u, id, sys.model, opts.admissible_tol);
                if (adm.decision == Decision::No)
                    throw PreconditionError("skeleton: amplitude at t=" + format_double(b) +
                                            " lies outside the support of the Levy measure");
            }
            Vector pre = x;
            x += sys.coeffs.jump(x, u);
            if (!x.allFinite() || x.norm() > opts.blowup_cap) throw BlowUpError(b, "skeleton blew up at a jump");
            values.back() = x;
            jumps.push_back({b, std::move(pre), x});
            out.plan.jumps.push_back({b, u, std::nullopt});
            ++next_jump;
        }
    }
    out.path = CadlagPath(std::move(times), std::move(values), std::move(jumps));
    return out;
}

TimeChange time_change_lambda(const std::vector<double>& times_t, const std::vector<double>& times_s, double T) {
    return TimeChange(times_t, times_s, T);
}

double jump_gap(const std::vector<double>& times, double T) {
    double prev = 0.0;
    double gap = kInf;
    for (double t : times) {
        gap = std::min(gap, t - prev);
        prev = t;
    }
    gap = std::min(gap, T - prev);
    return 0.5 * gap;
}

SkeletonPath perturb_jump_times(const SkeletonSystem& sys, const SkeletonPath& skeleton,
                                const std::vector<double>& times_s) {
    const auto t = skeleton.plan.times();
    if (t.size() != times_s.size()) throw PreconditionError("perturb: one new time per planned jump");
    const double delta = jump_gap(t, skeleton.T);
    for (std::size_t k = 0; k < t.size(); ++k)
        if (!(std::abs(times_s[k] - t[k]) < delta))
            throw PreconditionError("perturb: |s_k - t_k| must stay below half the minimal gap");
    const Vector& x0 = skeleton.path.values().front();
    if (times_s == t) return solve_skeleton(sys, x0, skeleton.control, skeleton.plan, skeleton.T, skeleton.opts);
    const auto lambda = time_change_lambda(t, times_s, skeleton.T);
    JumpPlan plan = skeleton.plan;
    for (std::size_t k = 0; k < t.size(); ++k) plan.jumps[k].time = times_s[k];
    return solve_skeleton(sys, x0, skeleton.control.transported(lambda), plan, skeleton.T, skeleton.opts);
}

double ode_residual(const SkeletonSystem& sys, const SkeletonPath& skeleton) {
    const auto& p = skeleton.path;
    const auto& ts = p.times();
    std::vector<double> events = skeleton.plan.times();
    for (double b : skeleton.control.breakpoints()) events.push_back(b);
    std::sort(events.begin(), events.end());
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
        if (std::binary_search(events.begin(), events.end(), ts[i])) continue;
        const Vector fd = (p.left_value(i + 1) - p.values()[i - 1]) / (ts[i + 1] - ts[i - 1]);
        const Vector rhs = sys.rhs(p.values()[i], skeleton.control.value_at(ts[i]));
        worst = std::max(worst, (fd - rhs).norm());
    }
    return worst;
}

}  // namespace jumpsupport::skeleton
