// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "jumpsupport/cli.hpp"
#include "jumpsupport/errors.hpp"
#include "jumpsupport/levy.hpp"
#include "jumpsupport/metric.hpp"
#include "jumpsupport/parallel.hpp"
#include "jumpsupport/sde.hpp"
#include "jumpsupport/skeleton.hpp"
#include "jumpsupport/support.hpp"
#include "jumpsupport/tilt.hpp"

using namespace jumpsupport;
using levy::LevyModel;
using skeleton::ControlFunction;
using skeleton::JumpPlan;
using skeleton::SkeletonSystem;

namespace {

// ---------------------------------------------------------------------------
// Pinned tolerances and budgets
// ---------------------------------------------------------------------------

constexpr double kSubspaceTol = 1e-12;     // projector agreement
constexpr double kClosedFormRel = 1e-6;    // υ_η and β-moment
constexpr double kSkeletonAbs = 1e-8;      // e^{-1}
constexpr double kResidualFactor = 3.5;    // per halving of h
constexpr double kDeltaRatio = 1.5;        // C·δ validation
constexpr double kTiltMagnitude = 0.5;
constexpr double kTiltMatchRel = 1e-6;
constexpr double kSigmas = 3.0;
constexpr double kTrackingFloor = 2.0 / 3.0;
constexpr double kInclusionAlpha = 0.9;
constexpr double kConeEps = 0.05;
constexpr double kControlEps = 1e-3;

constexpr double kBudgetC1 = 1.0;
constexpr double kBudgetC4 = 30.0;
constexpr double kBudgetC6 = 300.0;
constexpr double kBudgetC8 = 600.0;

constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

sde::CoefficientSet linear(const Matrix& A, const Vector& a, const Matrix& S) {
    sde::AffineForm f;
    f.A = A;
    f.a = a;
    f.sigma0 = S;
    return sde::CoefficientSet::affine(f);
}

sde::CoefficientSet decay1d() { return linear(Matrix::Constant(1, 1, -1.0), vec({0}), Matrix::Identity(1, 1)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------
// C1 integrability subspace
// ---------------------------------------------------------------------------

Matrix projector_onto(std::initializer_list<int> axes, int d) {
    Matrix P = Matrix::Zero(d, d);
    for (int a : axes) P(a, a) = 1.0;
    return P;
}

Verdict c1() {
    struct Case {
        const char* name;
        LevyModel model;
        Matrix expected;
    };
    const Matrix I2 = Matrix::Identity(2, 2);
    const std::vector<Case> cases{
        {"cyl(0.5,1.5)", LevyModel::cylindrical({0.5, 1.5}), projector_onto({0}, 2)},
        {"cyl(1.5,0.5)", LevyModel::cylindrical({1.5, 0.5}), projector_onto({1}, 2)},
        {"cyl(0.5,0.7)", LevyModel::cylindrical({0.5, 0.7}), I2},
        {"cyl(1.2,1.5)", LevyModel::cylindrical({1.2, 1.5}), Matrix::Zero(2, 2)},
        {"cyl(0.5,1.5,0.8)", LevyModel::cylindrical({0.5, 1.5, 0.8}), projector_onto({0, 2}, 3)},
        {"radial(0.5)", LevyModel::radial(0.5, 2), I2},
        {"radial(1.2)", LevyModel::radial(1.2, 2), Matrix::Zero(2, 2)},
        {"radial(1.5)", LevyModel::radial(1.5, 3), Matrix::Zero(3, 3)},
        {"curve(1.5,1.2)", LevyModel::curve(1.5, 1.2), Matrix::Zero(2, 2)},
        {"curve(1.5,2.0)", LevyModel::curve(1.5, 2.0), projector_onto({1}, 2)},
        {"discrete", LevyModel::discrete({{vec({1, 2}), 0.3}, {vec({-1, 0.5}), 1.0}}), I2},
        {"one_sided(1.5)", LevyModel::one_sided(1.5), Matrix::Zero(1, 1)},
    };
    const auto t0 = std::chrono::steady_clock::now();
    int agree = 0;
    std::string bad;
    for (const auto& c : cases) {
        const auto L = levy::integrability_subspace(c.model);
        const Matrix P = L.basis() * L.basis().transpose();
        if ((P - c.expected).cwiseAbs().maxCoeff() <= kSubspaceTol)
            ++agree;
        else
            bad += std::string(" ") + c.name;
    }
    const double dt = seconds_since(t0);
    return {agree == static_cast<int>(cases.size()) && dt < kBudgetC1,
            std::to_string(agree) + "/" + std::to_string(cases.size()) + " models agree" + bad + ", " + fmt(dt) + " s"};
}

// ---------------------------------------------------------------------------
// C2 closed-form integrals
// ---------------------------------------------------------------------------

Verdict c2() {
    const auto os = LevyModel::one_sided(1.5);
    const double ups = levy::upsilon_eta(os, levy::integrability_subspace(os), 0.01)[0];
    const double mom = levy::beta_moment(LevyModel::radial(1.5, 1), 1.6);
    const double e1 = std::abs(ups - 18.0) / 18.0;
    const double e2 = std::abs(mom - 20.0) / 20.0;
    return {e1 <= kClosedFormRel && e2 <= kClosedFormRel,
            "upsilon " + fmt(ups) + " (rel " + fmt(e1) + "), beta moment " + fmt(mom) + " (rel " + fmt(e2) + ")"};
}

// ---------------------------------------------------------------------------
// C3 skeleton solver
// ---------------------------------------------------------------------------

Verdict c3() {
    const auto m1 = LevyModel::discrete({{vec({1}), 1e-6}, {vec({-1}), 1e-6}});
    const auto sys1 = SkeletonSystem::effective(decay1d(), m1);
    const auto L1 = levy::integrability_subspace(m1);
    const double x1 = skeleton::solve_skeleton(sys1, vec({1}), ControlFunction::zero(L1), {}, 1.0).path.terminal()[0];
    const double err = std::abs(x1 - std::exp(-1.0));

    const auto m = LevyModel::cylindrical({0.5, 1.5});
    const auto c = linear((Matrix(2, 2) << -1, 2, -2, -0.5).finished(), vec({1, 0}), Matrix::Identity(2, 2));
    const auto sys = SkeletonSystem::effective(c, m);
    const auto L = levy::integrability_subspace(m);
    const ControlFunction f({0.0, 0.45}, {vec({0, 1}), vec({0, -2})}, L);
    const auto plan = JumpPlan::from_amplitudes({0.6}, {vec({0.4, 0})});
    std::vector<double> res;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        skeleton::SkeletonOptions o;
        o.h = h;
        res.push_back(skeleton::ode_residual(sys, skeleton::solve_skeleton(sys, vec({1, 1}), f, plan, 1.0, o)));
    }
    const double r1 = res[0] / res[1];
    const double r2 = res[1] / res[2];
    return {err <= kSkeletonAbs && r1 >= kResidualFactor && r2 >= kResidualFactor,
            "|x(1) - e^-1| = " + fmt(err) + ", residual factors " + fmt(r1) + ", " + fmt(r2)};
}

// ---------------------------------------------------------------------------
// C4 perturbed skeleton convergence
// ---------------------------------------------------------------------------

Verdict c4() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = LevyModel::cylindrical({0.5, 1.5});
    const auto c = linear((Matrix(2, 2) << -1, 1, 0, -0.5).finished(), vec({0, 0.5}), Matrix::Identity(2, 2));
    const auto sys = SkeletonSystem::effective(c, m);
    const auto L = levy::integrability_subspace(m);
    const ControlFunction f({0.0, 0.5}, {vec({0, 1}), vec({0, -1})}, L);
    const std::vector<double> t{0.3, 0.6};
    const auto plan = JumpPlan::from_amplitudes(t, {vec({0.5, 0}), vec({0, 0.7})});
    const auto sk = skeleton::solve_skeleton(sys, vec({0, 0}), f, plan, 1.0);
    const std::vector<double> deltas{0.1, 0.05, 0.01, 0.005};
    std::vector<double> dist;
    for (double d : deltas) {
        const std::vector<double> s{t[0] + d, t[1] - d};
        const auto p = skeleton::perturb_jump_times(sys, sk, s);
        dist.push_back(metric::composite_distance(p.path, sk.path, skeleton::time_change_lambda(t, s, 1.0)).total());
    }
    const double C = std::max(dist[0] / deltas[0], dist[1] / deltas[1]);
    const double v1 = dist[2] / (C * deltas[2]);
    const double v2 = dist[3] / (C * deltas[3]);
    const double dt = seconds_since(t0);
    return {v1 <= kDeltaRatio && v2 <= kDeltaRatio && dt < kBudgetC4,
            "C = " + fmt(C) + ", ratios " + fmt(v1) + ", " + fmt(v2) + ", " + fmt(dt) + " s"};
}

// ---------------------------------------------------------------------------
// C5 tilt solver
// ---------------------------------------------------------------------------

Verdict c5() {
    const std::vector<LevyModel> models{
        LevyModel::cylindrical({0.5, 1.5}), LevyModel::cylindrical({1.2, 1.7}), LevyModel::radial(1.5, 1),
        LevyModel::radial(1.2, 2),          LevyModel::curve(1.5, 1.2),         LevyModel::curve(1.5, 2.0),
        LevyModel::one_sided(1.5),
    };
    const double eta = 0.1;
    Stream rng(kSeed);
    int total = 0, ok = 0;
    double worst_match = 0.0, worst_mag = 0.0;
    for (const auto& m : models) {
        const auto L = levy::integrability_subspace(m);
        const Matrix& K = L.complement();
        for (int k = 0; k < 20; ++k) {
            ++total;
            const double size = std::exp(std::log(0.05) + (std::log(5.0) - std::log(0.05)) * rng.uniform());
            const Vector w = K * rng.normal_vector(static_cast<int>(K.cols())).normalized() * size;
            const auto sol = tilt::solve_tilt(m, L, w, eta);
            const auto& g = sol.piece;
            bool good = g.sup_bound() <= kTiltMagnitude;
            worst_mag = std::max(worst_mag, g.sup_bound());
            // support: zero off the annulus, bounded on it
            for (int s = 0; s < 200; ++s) {
                Vector u = rng.normal_vector(m.dim()).normalized();
                const double r_in = g.zeta * rng.uniform();
                const double r_out = eta * (1.0 + 4.0 * rng.uniform());
                const double r_mid = g.zeta + (eta - g.zeta) * rng.uniform();
                good = good && g.value(u * r_in) == 0.0 && g.value(u * r_out) == 0.0 &&
                       std::abs(g.value(u * r_mid)) <= kTiltMagnitude;
            }
            // independent quadrature along the support parametrization
            Matrix dirs(m.dim(), static_cast<Eigen::Index>(g.terms.size()));
            for (std::size_t j = 0; j < g.terms.size(); ++j) dirs.col(static_cast<Eigen::Index>(j)) = g.terms[j].dir;
            std::vector<double> radii{g.zeta, eta};
            for (const auto& t : g.terms) radii.insert(radii.end(), {t.inner, t.outer});
            std::sort(radii.begin(), radii.end());
            radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
            Vector got = Vector::Zero(m.dim());
            for (std::size_t r = 0; r + 1 < radii.size(); ++r) {
                if (radii[r] < g.zeta || radii[r + 1] > eta) continue;
                for (int i = 0; i < m.dim(); ++i)
                    got[i] += m.integrate([&](const Vector& u) { return L.project_complement(u)[i] * g.value(u); },
                                          {radii[r], radii[r + 1], false, false}, dirs);
            }
            const double rel = (got - w).norm() / w.norm();
            worst_match = std::max(worst_match, rel);
            good = good && rel <= kTiltMatchRel;
            ok += good;
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " targets, worst |g| " + fmt(worst_mag) +
                             ", worst matching rel " + fmt(worst_match)};
}

// ---------------------------------------------------------------------------
// C6 density martingale and tilted intensity
// ---------------------------------------------------------------------------

Verdict c6() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = LevyModel::radial(1.5, 1);
    const auto L = levy::integrability_subspace(m);
    const double eta = 0.5;
    const double T = 1.0;
    const auto sol = tilt::solve_tilt(m, L, vec({0.5}), eta);
    const tilt::TiltFunction g({0.0}, {sol.piece});
    const auto coeffs = linear(Matrix::Zero(1, 1), vec({0}), Matrix::Identity(1, 1));
    sde::SimOptions so;
    so.small.max_rate = 200.0;

    const std::size_t N = 100000;
    const int shells = 5;
    const double zeta = sol.piece.zeta;
    auto bin_of = [&](double u) {
        const int s = std::min(shells - 1, static_cast<int>((std::abs(u) - zeta) / (eta - zeta) * shells));
        return (u > 0 ? shells : 0) + s;
    };
    std::vector<double> density(N);
    std::vector<std::vector<int>> counts(N, std::vector<int>(2 * shells, 0));
    parallel_for(N, 1, [&](std::size_t i) {
        Stream rng = Stream::substream(kSeed + 6, i);
        const auto tp = sde::simulate_tilted(coeffs, m, vec({0}), 0.0, T, 10, eta, g, rng, so);
        density[i] = std::exp(tp.log_density);
        for (const auto& a : tp.atoms) ++counts[i][bin_of(a.u[0])];
    });
    double s1 = 0.0, s2 = 0.0;
    for (double e : density) {
        s1 += e;
        s2 += e * e;
    }
    const double mean = s1 / N;
    const double se = std::sqrt((s2 / N - mean * mean) / N);
    const double z_mean = std::abs(mean - 1.0) / se;

    double worst_z = 0.0;
    for (int b = 0; b < 2 * shells; ++b) {
        const int s = b % shells;
        const double sign = b >= shells ? 1.0 : -1.0;
        const double lo = zeta + (eta - zeta) * s / shells;
        const double hi = zeta + (eta - zeta) * (s + 1) / shells;
        const double rate = m.integrate(
            [&](const Vector& u) { return u[0] * sign > 0 ? 1.0 + g(0.0, u) : 0.0; }, {lo, hi, false, false});
        const double expected = rate * T * N;
        double observed = 0.0;
        for (const auto& c : counts) observed += c[b];
        worst_z = std::max(worst_z, std::abs(observed - expected) / std::sqrt(expected));
    }
    const double dt = seconds_since(t0);
    return {z_mean <= kSigmas && worst_z <= kSigmas && dt < kBudgetC6,
            "E[exp] = " + fmt(mean) + " (" + fmt(z_mean) + " se), worst bin " + fmt(worst_z) + " sigma over " +
                std::to_string(2 * shells) + " bins, " + fmt(dt) + " s"};
}

// ---------------------------------------------------------------------------
// C7 tilted process tracks the skeleton as η shrinks
// ---------------------------------------------------------------------------

Verdict c7() {
    const auto m = LevyModel::radial(1.5, 1, 0.05);
    const auto L = levy::integrability_subspace(m);
    const auto coeffs = decay1d();
    const auto sys = SkeletonSystem::effective(coeffs, m);
    const auto f = ControlFunction::constant(vec({1.0}), L);
    const auto phi = skeleton::solve_skeleton(sys, vec({0}), f, {}, 1.0);
    const double gamma = 0.5;
    const std::size_t N = 1000;
    sde::SimOptions so;
    so.small.max_rate = 500.0;
    std::vector<double> p;
    for (double eta : {0.2, 0.1, 0.05}) {
        const auto g = tilt::control_to_tilt(f, m, L, eta);
        std::vector<char> hit(N);
        parallel_for(N, 1, [&](std::size_t i) {
            Stream rng = Stream::substream(kSeed + 7, i);
            const auto y = sde::simulate_tilted(coeffs, m, vec({0}), 0.0, 1.0, 100, eta, g, rng, so);
            hit[i] = metric::uniform_distance(y.path, phi.path) <= gamma;
        });
        p.push_back(static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / N);
    }
    const bool monotone = p[1] >= p[0] && p[2] >= p[1];
    return {monotone && p[2] > kTrackingFloor,
            "P(sup <= 0.5) at eta 0.2/0.1/0.05: " + fmt(p[0]) + ", " + fmt(p[1]) + ", " + fmt(p[2])};
}

// ---------------------------------------------------------------------------
// C8 support positivity
// ---------------------------------------------------------------------------

Verdict c8() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t N = 10000;
    support::McOptions mo;
    mo.n_steps = 100;
    mo.sim.small.max_rate = 500.0;
    std::string detail;
    bool ok = true;
    auto report = [&](const support::SupportCheckReport& r, bool want_positive) {
        const bool good = want_positive ? r.positive : r.estimate == 0.0;
        ok = ok && good;
        detail += r.target_id + " " + fmt(r.estimate) + " [" + fmt(r.ci.lo) + ", " + fmt(r.ci.hi) + "]; ";
    };

    {
        const auto m = LevyModel::discrete({{vec({1}), 1e-3}, {vec({-1}), 1e-3}});
        const auto sys = SkeletonSystem::effective(decay1d(), m);
        const auto phi = skeleton::solve_skeleton(sys, vec({1}), ControlFunction::zero(levy::integrability_subspace(m)),
                                                  {}, 1.0);
        report(support::mc_support_probability(decay1d(), m, phi, 0.3, N, 0.5, kSeed + 81, mo, "pure-drift"), true);
    }
    {
        const auto m = LevyModel::discrete({{vec({1}), 0.5}, {vec({-1}), 0.5}});
        const auto sys = SkeletonSystem::effective(decay1d(), m);
        const auto phi = skeleton::solve_skeleton(sys, vec({0}), ControlFunction::zero(levy::integrability_subspace(m)),
                                                  JumpPlan::from_amplitudes({0.5}, {vec({1})}), 1.0);
        report(support::mc_support_probability(decay1d(), m, phi, 0.3, N, 0.5, kSeed + 82, mo, "one-jump"), true);
    }
    {
        const auto m = LevyModel::radial(1.5, 1, 0.1);
        const auto L = levy::integrability_subspace(m);
        const auto sys = SkeletonSystem::effective(decay1d(), m);
        const auto phi = skeleton::solve_skeleton(sys, vec({0}), ControlFunction::constant(vec({1}), L), {}, 1.0);
        report(support::mc_support_probability(decay1d(), m, phi, 0.4, N, 0.1, kSeed + 83, mo, "control-only"), true);

        auto far = phi;
        std::vector<Vector> values;
        for (const auto& v : phi.path.values()) values.push_back(v + vec({100}));
        far.path = CadlagPath(phi.path.times(), values);
        report(support::mc_support_probability(decay1d(), m, far, 0.4, N, 0.1, kSeed + 84, mo, "far-shifted"), false);
    }
    const double dt = seconds_since(t0);
    return {ok && dt < kBudgetC8, detail + fmt(dt) + " s"};
}

// ---------------------------------------------------------------------------
// C9 forward inclusion
// ---------------------------------------------------------------------------

Verdict c9() {
    support::InclusionOptions o;
    o.x0 = vec({0.5});
    o.n_steps = 100;
    o.sim.small.max_rate = 500.0;
    const auto c = linear(Matrix::Constant(1, 1, -1.0), vec({0.2}), Matrix::Identity(1, 1));
    const auto discrete = LevyModel::discrete({{vec({1}), 1.0}, {vec({-0.7}), 2.0}});
    // Euler against RK4 on the same grid: the gap is O(h), far below 0.05
    const auto d = support::forward_inclusion_check(c, discrete, 0.5, 1000, 0.05, kSeed + 91, o);

    const auto stable = LevyModel::radial(1.5, 1);
    const double tol = support::neglected_noise_scale(decay1d(), stable, 0.2, o.T, o.x0);
    const auto s = support::forward_inclusion_check(decay1d(), stable, 0.2, 1000, tol, kSeed + 92, o);
    return {d.pass_rate == 1.0 && d.jumps_admissible == d.jumps && s.pass_rate >= kInclusionAlpha &&
                s.jumps_admissible == s.jumps,
            "discrete pass rate " + fmt(d.pass_rate) + ", alpha 1.5 pass rate " + fmt(s.pass_rate) + " at tol " +
                fmt(tol)};
}

// ---------------------------------------------------------------------------
// C10 big-jump window
// ---------------------------------------------------------------------------

Verdict c10() {
    const auto m = LevyModel::radial(1.5, 1);
    const std::vector<std::vector<double>> scenarios{{}, {0.5}, {0.3, 0.7}};
    bool ok = true;
    std::string detail;
    for (std::size_t k = 0; k < scenarios.size(); ++k) {
        const double p = support::jump_window_probability(m, 1.0, scenarios[k], 0.1, 1.0);
        const auto f = support::jump_window_frequency(m, 1.0, scenarios[k], 0.1, 1.0, 100000, kSeed + 100 + k);
        const double z = std::abs(f.frequency - p) / std::sqrt(p * (1 - p) / 100000.0);
        ok = ok && z <= kSigmas;
        detail += "K=" + std::to_string(k) + " " + fmt(p) + " vs " + fmt(f.frequency) + " (" + fmt(z) + " sigma); ";
    }
    return {ok, detail};
}

// ---------------------------------------------------------------------------
// C11 reachability and scaling diagnostic
// ---------------------------------------------------------------------------

Verdict c11() {
    const auto id2 = linear(Matrix::Zero(2, 2), vec({0, 0}), Matrix::Identity(2, 2));
    support::ReachOptions ro;
    ro.max_amplitude = 0.2;
    const auto cyl = LevyModel::cylindrical({0.5, 1.5});
    const auto cone = support::reach_cone(SkeletonSystem::effective(id2, cyl), vec({0, 0}), vec({1, 1}), 1.0, kConeEps,
                                          0.5, ro);

    const auto rad = LevyModel::radial(1.5, 2);
    const auto rot = linear((Matrix(2, 2) << -0.5, 1, -1, -0.5).finished(), vec({0.3, 0}), Matrix::Identity(2, 2));
    const auto ctl = support::reach_control(SkeletonSystem::effective(rot, rad), levy::integrability_subspace(rad),
                                            vec({0, 0}), vec({1, -1}), 1.0);

    const std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const auto axes = support::direction_grid(2, 12);
    const bool cyl_fails = !support::check_scaling_condition(cyl, eps, axes).holds;
    const bool curve_fails = !support::check_scaling_condition(LevyModel::curve(1.5, 1.2), eps, axes).holds;
    const bool radial_holds = support::check_scaling_condition(rad, eps, axes).holds;
    return {cone.terminal_error <= kConeEps && ctl.terminal_error <= kControlEps && cyl_fails && curve_fails &&
                radial_holds,
            "cone error " + fmt(cone.terminal_error) + " with " + std::to_string(cone.plan->jumps.size()) +
                " jumps, control error " + fmt(ctl.terminal_error) + ", scaling cyl/curve/radial " +
                (cyl_fails ? "fails" : "holds") + "/" + (curve_fails ? "fails" : "holds") + "/" +
                (radial_holds ? "holds" : "fails")};
}

// ---------------------------------------------------------------------------
// C12 determinism through the command line
// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Verdict c12(const std::filesystem::path& configs) {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "jumpsupport_acceptance";
    fs::remove_all(root);
    struct Run {
        const char* command;
        const char* config;
        std::vector<std::string> extra;
    };
    const std::vector<Run> runs{
        {"analyze-levy", "analyze_cylindrical.json", {}},
        {"skeleton", "skeleton_decay.json", {}},
        {"simulate", "simulate_radial.json", {}},
        {"support-check", "support_drift.json", {"--set", "params.n=2000"}},
        {"inclusion-check", "inclusion_radial.json", {"--set", "params.n_paths=300"}},
        {"tilt-check", "tilt_radial.json", {"--set", "params.n_sims=3000"}},
        {"reach", "reach_cylindrical.json", {}},
        {"metric", "metric_step.json", {}},
    };
    std::size_t files = 0;
    std::string mismatch;
    bool ok = true;
    for (const auto& r : runs) {
        std::vector<fs::path> dirs;
        for (int jobs : {1, 1, 3}) {
            const fs::path out = root / (std::string(r.command) + "_" + std::to_string(dirs.size()));
            std::vector<std::string> args{r.command, "--config", (configs / r.config).string(), "--out", out.string(),
                                          "--jobs", std::to_string(jobs)};
            args.insert(args.end(), r.extra.begin(), r.extra.end());
            std::ostringstream sink;
            if (cli::run(args, sink, sink) != 0) {
                ok = false;
                mismatch += std::string(" ") + r.command + " failed: " + sink.str();
            }
            dirs.push_back(out);
        }
        for (const auto& e : fs::directory_iterator(dirs[0])) {
            const auto name = e.path().filename();
            const std::string a = slurp(e.path());
            ++files;
            for (std::size_t k = 1; k < dirs.size(); ++k)
                if (!fs::exists(dirs[k] / name) || slurp(dirs[k] / name) != a) {
                    ok = false;
                    mismatch += " " + std::string(r.command) + "/" + name.string();
                }
        }
    }

    // library-level parallel paths
    const auto m = LevyModel::radial(1.5, 1);
    const auto f1 = support::jump_window_frequency(m, 1.0, {0.5}, 0.1, 1.0, 20000, kSeed, 1);
    const auto f3 = support::jump_window_frequency(m, 1.0, {0.5}, 0.1, 1.0, 20000, kSeed, 3);
    ok = ok && f1.hits == f3.hits;
    fs::remove_all(root);
    return {ok, std::to_string(files) + " output files identical across 3 runs (jobs 1, 1, 3)" + mismatch};
}

}  // namespace

int main(int argc, char** argv) {
    const std::filesystem::path configs = argc > 1 ? argv[1] : "configs";
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"C1  integrability subspace oracle", c1},
        {"C2  closed-form integrals", c2},
        {"C3  skeleton solver", c3},
        {"C4  perturbed skeleton convergence", c4},
        {"C5  tilt solver", c5},
        {"C6  density martingale and tilted intensity", c6},
        {"C7  tilted process tracks the skeleton", c7},
        {"C8  support positivity", c8},
        {"C9  forward inclusion", c9},
        {"C10 big-jump window", c10},
        {"C11 reachability and scaling diagnostic", c11},
        {"C12 determinism", [&] { return c12(configs); }},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << " | " << v.detail << " | " << fmt(seconds_since(t0))
                  << " s" << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
