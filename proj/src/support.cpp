#include "jumpsupport/support.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jumpsupport/errors.hpp"
#include "jumpsupport/parallel.hpp"

namespace jumpsupport::support {

using levy::LevyModel;
using levy::Range;

Interval wilson_interval(std::size_t hits, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval ci{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // the score interval is exact at the boundary proportions
    if (hits == 0) ci.lo = 0.0;
    if (hits == n) ci.hi = 1.0;
    return ci;
}

double SupportCheckReport::estimate_at(double radius) const {
    if (distances.empty()) return 0.0;
    const auto k = std::count_if(distances.begin(), distances.end(), [&](double d) { return d <= radius; });
    return static_cast<double>(k) / static_cast<double>(distances.size());
}

SupportCheckReport mc_support_probability(const sde::CoefficientSet& coeffs, const LevyModel& model,
                                          const skeleton::SkeletonPath& phi, double eps, std::size_t N, double eta,
                                          std::uint64_t seed, const McOptions& opts, const std::string& id) {
    if (N < 100) throw PreconditionError("support check: need N >= 100 paths");
    if (!(eps > 0.0)) throw PreconditionError("support check: eps must be positive");
    const Vector& x0 = phi.path.values().front();
    SupportCheckReport rep;
    rep.target_id = id;
    rep.eps = eps;
    rep.n = N;
    rep.distances.assign(N, 0.0);
    parallel_for(N, opts.jobs, [&](std::size_t i) {
        Stream rng = Stream::substream(seed, i);
        const auto X = sde::euler_simulate(coeffs, model, x0, phi.T, opts.n_steps, eta, rng, opts.sim);
        rep.distances[i] = metric::skorokhod_distance_upper(X, phi.path, opts.metric).skorokhod_upper;
    });
    rep.hits = static_cast<std::size_t>(
        std::count_if(rep.distances.begin(), rep.distances.end(), [&](double d) { return d <= eps; }));
    rep.estimate = static_cast<double>(rep.hits) / static_cast<double>(N);
    rep.ci = wilson_interval(rep.hits, N);
    rep.positive = rep.ci.lo > 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// First inclusion
// ---------------------------------------------------------------------------

double neglected_noise_scale(const sde::CoefficientSet& coeffs, const LevyModel& model, double eta, double T,
                             const Vector& x0) {
    const double var = model.radial_moment(2.0, Range::below(eta));
    return 3.0 * std::sqrt(T * var) * coeffs.sigma(x0).operatorNorm();
}

InclusionReport forward_inclusion_check(const sde::CoefficientSet& coeffs, const LevyModel& model, double eta,
                                        std::size_t n_paths, double tol, std::uint64_t seed,
                                        const InclusionOptions& opts) {
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("inclusion check: eta must lie in (0, 1]");
    if (opts.x0.size() != coeffs.m()) throw PreconditionError("inclusion check: x0 dimension");
    InclusionReport rep;
    rep.n_paths = n_paths;
    rep.tol = tol;
    if (n_paths == 0) return rep;

    const auto sys = skeleton::SkeletonSystem::effective(coeffs, model);
    const auto L = levy::integrability_subspace(model);
    const Vector f = -levy::upsilon_eta(model, L, eta);

    struct PathResult {
        double max_dev = 0.0;
        std::vector<double> segments;
        std::size_t jumps = 0;
        std::size_t admissible = 0;
    };
    std::vector<PathResult> results(n_paths);
    parallel_for(n_paths, opts.jobs, [&](std::size_t p) {
        Stream rng = Stream::substream(seed, p);
        const auto X = sde::euler_simulate(coeffs, model, opts.x0, opts.T, opts.n_steps, eta, rng, opts.sim);
        auto& r = results[p];
        const auto& ts = X.times();
        Vector phi = X.values().front();
        double seg = 0.0;
        for (std::size_t i = 1; i < ts.size(); ++i) {
            phi = skeleton::ode_flow(sys, phi, f, ts[i - 1], ts[i], opts.ode_substeps);
            seg = std::max(seg, (X.left_value(i) - phi).norm());
            if (X.is_jump_index(i) || i + 1 == ts.size()) {
                r.segments.push_back(seg);
                r.max_dev = std::max(r.max_dev, seg);
                seg = 0.0;
                phi = X.values()[i];
            }
        }
        for (const auto& j : X.jumps()) {
            ++r.jumps;
            const auto adm = skeleton::admissible(j.pre, j.post, coeffs, model, opts.admissible_tol);
            if (adm.decision == skeleton::Decision::Yes) ++r.admissible;
        }
    });

    std::vector<double> all;
    for (const auto& r : results) {
        rep.max_deviation.push_back(r.max_dev);
        all.insert(all.end(), r.segments.begin(), r.segments.end());
        rep.jumps += r.jumps;
        rep.jumps_admissible += r.admissible;
        if (r.max_dev <= tol && r.admissible == r.jumps) ++rep.passed;
    }
    rep.pass_rate = static_cast<double>(rep.passed) / static_cast<double>(n_paths);
    if (!all.empty()) {
        const auto mid = all.begin() + static_cast<std::ptrdiff_t>(all.size() / 2);
        std::nth_element(all.begin(), mid, all.end());
        rep.median_segment_deviation = *mid;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Big-jump window
// ---------------------------------------------------------------------------

namespace {

void check_window(const std::vector<double>& times, double delta, double T) {
    if (!(T > 0.0)) throw PreconditionError("jump window: T must be positive");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev && t < T)) throw PreconditionError("jump window: times must increase inside (0, T)");
        prev = t;
    }
    if (!(delta > 0.0) || !(delta < skeleton::jump_gap(times, T)))
        throw PreconditionError("jump window: delta must be below half the minimal gap of {0, t_k, T}");
}

}  // namespace

double jump_window_probability(const LevyModel& model, double eta, const std::vector<double>& times, double delta,
                               double T) {
    check_window(times, delta, T);
    const double m = levy::tail_mass(model, eta);
    return std::exp(-T * m) * std::pow(2.0 * delta * m, static_cast<double>(times.size()));
}

FrequencyReport jump_window_frequency(const LevyModel& model, double eta, const std::vector<double>& times,
                                      double delta, double T, std::size_t N, std::uint64_t seed, int jobs) {
    check_window(times, delta, T);
    std::vector<char> hit(N, 0);
    parallel_for(N, jobs, [&](std::size_t i) {
        Stream rng = Stream::substream(seed, i);
        const auto J = levy::sample_large_jumps(model, eta, T, rng);
        if (J.size() != times.size()) return;
        for (std::size_t k = 0; k < J.size(); ++k)
            if (!(std::abs(J[k].time - times[k]) < delta)) return;
        hit[i] = 1;
    });
    FrequencyReport rep;
    rep.n = N;
    rep.hits = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    rep.frequency = N ? static_cast<double>(rep.hits) / static_cast<double>(N) : 0.0;
    rep.std_error = N ? std::sqrt(rep.frequency * (1.0 - rep.frequency) / static_cast<double>(N)) : 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// Reachability
// ---------------------------------------------------------------------------

std::vector<Vector> direction_grid(int d, int per_half_turn) {
    std::vector<Vector> dirs;
    if (d == 2) {
        for (int k = 0; k < 2 * per_half_turn; ++k) {
            const double a = std::numbers::pi * k / per_half_turn;
            Vector v(2);
            v << std::cos(a), std::sin(a);
            dirs.push_back(v);
        }
        return dirs;
    }
    for (int i = 0; i < d; ++i)
        for (double s : {1.0, -1.0}) {
            Vector v = Vector::Zero(d);
            v[i] = s;
            dirs.push_back(v);
        }
    if (d >= 3)
        for (int mask = 0; mask < (1 << d); ++mask) {
            Vector v(d);
            for (int i = 0; i < d; ++i) v[i] = (mask >> i & 1) ? -1.0 : 1.0;
            dirs.push_back(v.normalized());
        }
    return dirs;
}

bool cone_condition(const LevyModel& model, double theta) {
    if (!(theta > 0.0 && theta < 1.0)) throw PreconditionError("cone condition: theta must lie in (0, 1)");
    const auto grid = direction_grid(model.dim());
    std::vector<double> radii{1e-2, 1e-4, 1e-6, 1e-8};
    if (model.is_discrete()) radii = {std::numeric_limits<double>::infinity()};
    for (double r : radii) {
        const auto dirs = model.small_jump_directions(r);
        if (!dirs) continue;
        for (const auto& v : grid) {
            bool covered = false;
            for (const auto& s : *dirs)
                if (s.dot(v) >= theta - 1e-12) {
                    covered = true;
                    break;
                }
            if (!covered) return false;
        }
    }
    return true;
}

namespace {

void require_full_rank(const Matrix& S, const char* who) {
    Eigen::JacobiSVD<Matrix> svd(S);
    const auto& sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv.size() ? sv[0] : 0.0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    if (rank < S.rows()) throw PreconditionError(std::string(who) + ": sigma loses rank along the path");
}

int steps_for(double len, double h) { return std::max(1, static_cast<int>(std::ceil(len / h - 1e-9))); }

}  // namespace

ReachCertificate reach_cone(const skeleton::SkeletonSystem& sys, const Vector& x, const Vector& y, double T,
                            double eps, double theta, const ReachOptions& opts) {
    const auto& model = sys.model;
    if (x.size() != sys.coeffs.m() || y.size() != sys.coeffs.m()) throw PreconditionError("reach_cone: dimension");
    if (!(eps > 0.0) || !(T > 0.0)) throw PreconditionError("reach_cone: eps and T must be positive");
    if (!cone_condition(model, theta))
        throw NotAnalyzableError("reach_cone: the cone condition cannot be certified for " + model.variant_name());
    const auto L = levy::integrability_subspace(model);
    const auto zero = skeleton::ControlFunction::zero(L);
    const Vector f0 = Vector::Zero(model.dim());
    const double h = opts.skeleton.h;

    // candidate jump directions: whole rays for continuous models, atoms otherwise
    std::vector<Vector> dirs;
    std::vector<double> reach;  // largest amplitude along each direction
    const bool discrete = model.is_discrete();
    const auto support_dirs = model.small_jump_directions(1.0);
    const bool all_dirs = !support_dirs.has_value();
    if (discrete) {
        for (const auto& a : std::get<levy::Discrete>(model.variant()).atoms) {
            dirs.push_back(a.u);
            reach.push_back(1.0);
        }
    } else if (!all_dirs) {
        for (const auto& s : *support_dirs) {
            dirs.push_back(s);
            reach.push_back(std::holds_alternative<levy::OneSidedStable1D>(model.variant()) ? 1.0
                                                                                          : opts.max_amplitude);
        }
    }

    for (int n = std::max(1, opts.initial_jumps); n <= opts.max_jumps; n *= 2) {
        skeleton::JumpPlan plan;
        Vector phi = x;
        double t_prev = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double tk = T * k / (n + 1);
            phi = skeleton::ode_flow(sys, phi, f0, t_prev, tk, steps_for(tk - t_prev, h));
            t_prev = tk;
            require_full_rank(sys.coeffs.sigma(phi), "reach_cone");
            const Vector psi = skeleton::ode_flow(sys, phi, f0, tk, T, steps_for(T - tk, h));
            const Vector r = y - psi;
            if (r.norm() <= 0.25 * eps) continue;
            Vector best_u;
            double best = r.norm();
            auto offer = [&](const Vector& u) {
                const double e = (r - sys.coeffs.jump(phi, u)).norm();
                if (e < best) {
                    best = e;
                    best_u = u;
                }
            };
            if (discrete) {
                for (const auto& u : dirs) offer(u);
            } else if (all_dirs) {
                Vector u = sys.coeffs.sigma(phi).completeOrthogonalDecomposition().solve(r);
                if (u.norm() > opts.max_amplitude) u *= opts.max_amplitude / u.norm();
                offer(u);
            } else {
                for (std::size_t j = 0; j < dirs.size(); ++j) {
                    const Vector v = sys.coeffs.jump(phi, dirs[j]);
                    const double vv = v.squaredNorm();
                    if (vv == 0.0) continue;
                    const double a = std::clamp(v.dot(r) / vv, 0.0, reach[j]);
                    if (a > 0.0) offer(a * dirs[j]);
                }
            }
            if (best_u.size() == 0) continue;
            phi += sys.coeffs.jump(phi, best_u);
            plan.jumps.push_back({tk, best_u, std::nullopt});
        }
        ReachCertificate cert;
        cert.route = "cone";
        cert.x = x;
        cert.y = y;
        cert.T = T;
        cert.eps = eps;
        cert.plan = plan;
        cert.opts = opts.skeleton;
        const auto sk = skeleton::solve_skeleton(sys, x, zero, plan, T, opts.skeleton);
        cert.terminal_error = (sk.path.terminal() - y).norm();
        if (cert.terminal_error <= eps) return cert;
    }
    throw InfeasibleError("reach_cone: iteration cap reached without meeting the terminal tolerance");
}

ReachCertificate reach_control(const skeleton::SkeletonSystem& sys, const levy::IntegrabilitySubspace& L,
                               const Vector& x, const Vector& y, double T, const ReachOptions& opts) {
    if (!L.is_trivial()) throw PreconditionError("reach_control: needs L = {0}");
    if (x.size() != sys.coeffs.m() || y.size() != sys.coeffs.m()) throw PreconditionError("reach_control: dimension");
    if (!(T > 0.0) || opts.n_pieces < 1) throw PreconditionError("reach_control: need T > 0 and n_pieces >= 1");
    const int n = opts.n_pieces;
    const double h = T / n;
    std::vector<double> bps;
    std::vector<Vector> vals;
    Vector phi = x;
    for (int i = 0; i < n; ++i) {
        const double t0 = T * i / n;
        const double t1 = T * (i + 1) / n;
        const Matrix S = sys.coeffs.sigma(phi);
        require_full_rank(S, "reach_control");
        const Vector target = x + (t1 / T) * (y - x);
        const Vector need = (target - phi) / h - sys.drift(phi);
        Vector f = S.completeOrthogonalDecomposition().solve(need);
        bps.push_back(t0);
        vals.push_back(f);
        phi = skeleton::ode_flow(sys, phi, f, t0, t1, steps_for(t1 - t0, opts.skeleton.h));
    }
    ReachCertificate cert;
    cert.route = "control";
    cert.x = x;
    cert.y = y;
    cert.T = T;
    cert.control = skeleton::ControlFunction(bps, vals, L);
    cert.opts = opts.skeleton;
    const auto sk = skeleton::solve_skeleton(sys, x, *cert.control, skeleton::JumpPlan{}, T, opts.skeleton);
    cert.terminal_error = (sk.path.terminal() - y).norm();
    cert.eps = cert.terminal_error;
    return cert;
}

skeleton::SkeletonPath replay(const skeleton::SkeletonSystem& sys, const ReachCertificate& cert) {
    const auto L = levy::integrability_subspace(sys.model);
    const auto control = cert.control ? *cert.control : skeleton::ControlFunction::zero(L);
    const auto plan = cert.plan ? *cert.plan : skeleton::JumpPlan{};
    return skeleton::solve_skeleton(sys, cert.x, control, plan, cert.T, cert.opts);
}

// ---------------------------------------------------------------------------
// Scaling diagnostic
// ---------------------------------------------------------------------------

ScalingReport check_scaling_condition(const LevyModel& model, const std::vector<double>& eps_grid,
                                      const std::vector<Vector>& directions, const ScalingOptions& opts) {
    if (eps_grid.size() < 2 || directions.empty()) throw PreconditionError("scaling check: grids must be non-empty");
    std::vector<Matrix> S;
    for (double e : eps_grid) {
        if (!(e > 0.0)) throw PreconditionError("scaling check: eps must be positive");
        S.push_back(model.second_moment({0.0, e, false, true}));
    }
    ScalingReport rep;
    rep.holds = true;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& d : directions) {
        if (d.size() != model.dim()) throw PreconditionError("scaling check: direction dimension");
        const Vector l = d.normalized();
        std::vector<double> xs;
        std::vector<double> ys;
        for (std::size_t k = 0; k < eps_grid.size(); ++k) {
            const double v = l.dot(S[k] * l);
            if (v > 0.0) {
                xs.push_back(std::log(eps_grid[k]));
                ys.push_back(std::log(v));
            }
        }
        ScalingDirection sd;
        sd.dir = l;
        if (xs.size() < 2) {
            // no mass along ℓ near the origin: the power law cannot hold
            sd.slope = std::numeric_limits<double>::quiet_NaN();
            sd.implied_alpha = std::numeric_limits<double>::quiet_NaN();
            rep.holds = false;
            rep.directions.push_back(sd);
            continue;
        }
        const double nx = static_cast<double>(xs.size());
        double mx = 0.0;
        double my = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            mx += xs[k] / nx;
            my += ys[k] / nx;
        }
        double sxy = 0.0;
        double sxx = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sxy += (xs[k] - mx) * (ys[k] - my);
            sxx += (xs[k] - mx) * (xs[k] - mx);
        }
        sd.slope = sxy / sxx;
        for (std::size_t k = 0; k < xs.size(); ++k)
            sd.nonlinearity = std::max(sd.nonlinearity, std::abs(ys[k] - (my + sd.slope * (xs[k] - mx))));
        sd.implied_alpha = 2.0 - sd.slope;
        if (sd.nonlinearity > opts.nonlinear_tol) rep.holds = false;
        lo = std::min(lo, sd.implied_alpha);
        hi = std::max(hi, sd.implied_alpha);
        rep.directions.push_back(sd);
    }
    rep.spread = hi >= lo ? hi - lo : std::numeric_limits<double>::quiet_NaN();
    if (!(rep.spread <= opts.spread_tol)) rep.holds = false;
    return rep;
}

}  // namespace jumpsupport::support
