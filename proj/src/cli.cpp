#include "jumpsupport/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "jumpsupport/config.hpp"
#include "jumpsupport/errors.hpp"
#include "jumpsupport/metric.hpp"
#include "jumpsupport/parallel.hpp"
#include "jumpsupport/support.hpp"
#include "jumpsupport/tilt.hpp"

namespace jumpsupport::cli {

namespace fs = std::filesystem;
using config::get_or;
using config::Json;
using config::require;
using levy::LevyModel;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Context {
    std::string command;
    Json cfg;
    std::uint64_t seed = 0;
    int jobs = 1;
    fs::path out_dir;
    std::vector<std::string> invocation;
    std::ostream* out = nullptr;

    const Json& params() const {
        static const Json empty = Json::object();
        return cfg.contains("params") ? cfg["params"] : empty;
    }
};

struct Outcome {
    Json summary;
    bool positive = true;
};

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + file.string());
    os << text;
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s + '\n';
}

std::string num(double x) { return format_double(x); }

std::vector<std::string> header_with(std::vector<std::string> head, const std::string& stem, int n) {
    for (int i = 1; i <= n; ++i) head.push_back(stem + std::to_string(i));
    return head;
}

void write_path(const fs::path& file, const CadlagPath& p) {
    std::ostringstream os;
    p.write_csv(os);
    write_text(file, os.str());
}

Json interval_json(const support::Interval& ci) { return Json::array({ci.lo, ci.hi}); }

// ---------------------------------------------------------------------------
// Common config pieces
// ---------------------------------------------------------------------------

LevyModel model_of(const Context& c) { return config::model_from_json(require(c.cfg, "model")); }

sde::CoefficientSet coefficients_of(const Context& c, const LevyModel& m) {
    const Json& j = c.cfg.contains("coefficients") ? c.cfg["coefficients"] : Json::object();
    auto coeffs = config::coefficients_from_json(j, m.dim());
    coeffs.check_compatible(m);
    return coeffs;
}

sde::SimOptions sim_of(const Json& p) {
    sde::SimOptions o;
    if (p.contains("small_jumps")) o.small = config::small_jump_from_json(p["small_jumps"]);
    o.blowup_cap = get_or(p, "blowup_cap", o.blowup_cap);
    return o;
}

Vector vector_param(const Json& p, const char* key, const Vector& fallback) {
    return p.contains(key) ? config::to_vector(p[key], key) : fallback;
}

skeleton::SkeletonPath solve_configured_skeleton(const Context& c, const skeleton::SkeletonSystem& sys) {
    const Json& sj = c.cfg.contains("skeleton") ? c.cfg["skeleton"] : Json::object();
    const auto spec = config::skeleton_from_json(sj, sys.coeffs.m(), sys.model.dim());
    const auto L = levy::integrability_subspace(sys.model);
    return skeleton::solve_skeleton(sys, spec.x0, config::control_of(spec, L), spec.plan, spec.T, spec.opts);
}

CadlagPath shifted(const CadlagPath& p, const Vector& shift) {
    std::vector<Vector> values;
    for (const auto& v : p.values()) values.push_back(v + shift);
    std::vector<PathJump> jumps;
    for (const auto& j : p.jumps()) jumps.push_back({j.time, j.pre + shift, j.post + shift});
    return CadlagPath(p.times(), values, jumps);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

Outcome analyze_levy(const Context& c) {
    const auto m = model_of(c);
    const auto& p = c.params();
    const int d = m.dim();
    const auto L = levy::integrability_subspace(m);
    Outcome o;
    std::string csv = csv_row({"quantity", "parameter", "component", "value"});
    for (Eigen::Index k = 0; k < L.basis().cols(); ++k)
        for (int i = 0; i < d; ++i)
            csv += csv_row({"L_basis", std::to_string(k), std::to_string(i + 1), num(L.basis()(i, k))});
    Json etas = Json::array();
    for (double eta : get_or(p, "eta", std::vector<double>{1.0, 0.5, 0.1, 0.01})) {
        const Vector ups = levy::upsilon_eta(m, L, eta);
        for (int i = 0; i < d; ++i) csv += csv_row({"upsilon", num(eta), std::to_string(i + 1), num(ups[i])});
        const double tm = levy::tail_mass(m, eta);
        csv += csv_row({"tail_mass", num(eta), "", num(tm)});
        etas.push_back({{"eta", eta}, {"upsilon", config::from_vector(ups)}, {"tail_mass", tm}});
    }
    Json betas = Json::array();
    for (double beta : get_or(p, "beta", std::vector<double>{2.0})) {
        try {
            const double v = levy::beta_moment(m, beta);
            csv += csv_row({"beta_moment", num(beta), "", num(v)});
            betas.push_back({{"beta", beta}, {"value", v}});
        } catch (const DivergenceError& e) {
            csv += csv_row({"beta_moment", num(beta), "", "inf"});
            betas.push_back({{"beta", beta}, {"diverges", e.what()}});
        }
    }
    write_text(c.out_dir / "levy.csv", csv);

    const Json sc = p.contains("scaling") ? p["scaling"] : Json::object();
    const auto eps = get_or(sc, "eps", std::vector<double>{1e-1, 3e-2, 1e-2, 3e-3, 1e-3});
    std::vector<Vector> dirs;
    if (sc.contains("directions"))
        for (const auto& v : sc["directions"]) dirs.push_back(config::to_vector(v, "scaling.directions"));
    else
        dirs = support::direction_grid(d, get_or(sc, "per_half_turn", 12));
    support::ScalingOptions so;
    so.spread_tol = get_or(sc, "spread_tol", so.spread_tol);
    so.nonlinear_tol = get_or(sc, "nonlinear_tol", so.nonlinear_tol);
    const auto rep = support::check_scaling_condition(m, eps, dirs, so);
    auto scols = header_with({}, "l_", d);
    scols.insert(scols.end(), {"slope", "implied_alpha", "nonlinearity"});
    std::string scsv = csv_row(scols);
    for (const auto& sd : rep.directions) {
        std::vector<std::string> row;
        for (int i = 0; i < d; ++i) row.push_back(num(sd.dir[i]));
        row.insert(row.end(), {num(sd.slope), num(sd.implied_alpha), num(sd.nonlinearity)});
        scsv += csv_row(row);
    }
    write_text(c.out_dir / "scaling.csv", scsv);

    o.summary = {{"model", config::model_to_json(m)},
                 {"L_dim", L.basis().cols()},
                 {"L_basis", config::from_matrix(L.basis().transpose())},
                 {"eta", etas},
                 {"beta_moment", betas},
                 {"scaling", {{"holds", rep.holds}, {"spread", rep.spread}}}};
    *c.out << "L dim " << L.basis().cols() << ", scaling " << (rep.holds ? "holds" : "fails") << '\n';
    return o;
}

Outcome run_skeleton(const Context& c) {
    const auto m = model_of(c);
    const auto coeffs = coefficients_of(c, m);
    const auto sys = skeleton::SkeletonSystem::effective(coeffs, m);
    const auto sk = solve_configured_skeleton(c, sys);
    write_path(c.out_dir / "skeleton.csv", sk.path);
    Json jumps = Json::array();
    for (const auto& j : sk.plan.jumps) jumps.push_back({{"t", j.time}, {"u", config::from_vector(*j.amplitude)}});
    Outcome o;
    o.summary = {{"terminal", config::from_vector(sk.path.terminal())},
                 {"ode_residual", skeleton::ode_residual(sys, sk)},
                 {"jumps", jumps},
                 {"grid_points", sk.path.size()}};
    *c.out << "terminal " << num(sk.path.terminal()[0]) << '\n';
    return o;
}

Outcome simulate(const Context& c) {
    const auto m = model_of(c);
    const auto coeffs = coefficients_of(c, m);
    const auto& p = c.params();
    const auto n = get_or<std::size_t>(p, "n_paths", 1);
    const int n_steps = get_or(p, "n_steps", 200);
    const double eta = get_or(p, "eta", 0.1);
    const double T = get_or(p, "T", 1.0);
    const std::string mode = get_or<std::string>(p, "mode", "full");
    if (mode != "full" && mode != "truncated") throw ConfigError("simulate: mode must be 'full' or 'truncated'");
    const Vector x0 = vector_param(p, "x0", Vector::Zero(coeffs.m()));
    const auto sim = sim_of(p);
    std::vector<CadlagPath> paths(n);
    parallel_for(n, c.jobs, [&](std::size_t i) {
        Stream rng = Stream::substream(c.seed, i);
        paths[i] = mode == "full" ? sde::euler_simulate(coeffs, m, x0, T, n_steps, eta, rng, sim)
                                  : sde::simulate_truncated(coeffs, m, x0, 0.0, T, n_steps, eta, rng, sim);
    });
    std::string term = csv_row(header_with({"path", "jumps"}, "x_", coeffs.m()));
    for (std::size_t i = 0; i < n; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "path_%05zu.csv", i);
        write_path(c.out_dir / name, paths[i]);
        std::vector<std::string> row{std::to_string(i), std::to_string(paths[i].jumps().size())};
        for (Eigen::Index k = 0; k < paths[i].terminal().size(); ++k) row.push_back(num(paths[i].terminal()[k]));
        term += csv_row(row);
    }
    write_text(c.out_dir / "terminal.csv", term);
    Outcome o;
    o.summary = {{"n_paths", n}, {"mode", mode}};
    *c.out << "simulated " << n << " paths\n";
    return o;
}

Outcome support_check(const Context& c) {
    const auto m = model_of(c);
    const auto coeffs = coefficients_of(c, m);
    const auto sys = skeleton::SkeletonSystem::effective(coeffs, m);
    auto phi = solve_configured_skeleton(c, sys);
    const auto& p = c.params();
    if (p.contains("shift")) phi.path = shifted(phi.path, config::to_vector(p["shift"], "shift"));
    support::McOptions mo;
    mo.n_steps = get_or(p, "n_steps", mo.n_steps);
    mo.jobs = c.jobs;
    mo.sim = sim_of(p);
    const double eps = require(p, "eps").get<double>();
    const auto rep = support::mc_support_probability(coeffs, m, phi, eps, get_or<std::size_t>(p, "n", 10000),
                                                     get_or(p, "eta", 0.1), c.seed, mo,
                                                     get_or<std::string>(p, "id", "skeleton"));
    std::string csv = csv_row({"path", "distance"});
    for (std::size_t i = 0; i < rep.distances.size(); ++i) csv += csv_row({std::to_string(i), num(rep.distances[i])});
    write_text(c.out_dir / "distances.csv", csv);
    Outcome o;
    o.positive = rep.positive;
    o.summary = {{"target_id", rep.target_id}, {"eps", rep.eps},         {"n", rep.n},
                 {"hits", rep.hits},           {"estimate", rep.estimate}, {"ci95", interval_json(rep.ci)},
                 {"positive", rep.positive}};
    *c.out << "estimate " << num(rep.estimate) << " ci [" << num(rep.ci.lo) << ", " << num(rep.ci.hi) << "] "
           << (rep.positive ? "positive" : "not positive") << '\n';
    return o;
}

Outcome inclusion_check(const Context& c) {
    const auto m = model_of(c);
    const auto coeffs = coefficients_of(c, m);
    const auto& p = c.params();
    support::InclusionOptions io;
    io.x0 = vector_param(p, "x0", Vector::Zero(coeffs.m()));
    io.T = get_or(p, "T", io.T);
    io.n_steps = get_or(p, "n_steps", io.n_steps);
    io.ode_substeps = get_or(p, "ode_substeps", io.ode_substeps);
    io.admissible_tol = get_or(p, "admissible_tol", io.admissible_tol);
    io.jobs = c.jobs;
    io.sim = sim_of(p);
    const double eta = get_or(p, "eta", 0.2);
    double tol = 0.0;
    if (p.contains("tol"))
        tol = p["tol"].get<double>();
    else
        tol = get_or(p, "tol_scale", 1.0) * support::neglected_noise_scale(coeffs, m, eta, io.T, io.x0);
    const auto rep = support::forward_inclusion_check(coeffs, m, eta, get_or<std::size_t>(p, "n_paths", 1000), tol,
                                                      c.seed, io);
    std::string csv = csv_row({"path", "max_deviation"});
    for (std::size_t i = 0; i < rep.max_deviation.size(); ++i)
        csv += csv_row({std::to_string(i), num(rep.max_deviation[i])});
    write_text(c.out_dir / "deviations.csv", csv);
    const double need = get_or(p, "min_pass_rate", 0.9);
    Outcome o;
    o.positive = rep.pass_rate >= need;
    o.summary = {{"eta", eta},
                 {"tol", tol},
                 {"n_paths", rep.n_paths},
                 {"passed", rep.passed},
                 {"pass_rate", rep.pass_rate},
                 {"jumps", rep.jumps},
                 {"jumps_admissible", rep.jumps_admissible},
                 {"median_segment_deviation", rep.median_segment_deviation},
                 {"min_pass_rate", need}};
    *c.out << "pass rate " << num(rep.pass_rate) << '\n';
    return o;
}

Outcome tilt_check(const Context& c) {
    const auto m = model_of(c);
    const auto coeffs = coefficients_of(c, m);
    const auto& p = c.params();
    const auto L = levy::integrability_subspace(m);
    const double eta = get_or(p, "eta", 0.1);
    std::vector<Vector> targets;
    if (p.contains("targets"))
        for (const auto& t : p["targets"]) targets.push_back(config::to_vector(t, "targets"));
    else
        for (Eigen::Index k = 0; k < L.complement().cols(); ++k) targets.push_back(L.complement().col(k));
    if (targets.empty()) throw PreconditionError("tilt-check: L-perp is {0}, nothing to tilt");

    auto cols = header_with({"target"}, "w_", m.dim());
    cols.insert(cols.end(), {"zeta", "halvings", "shell_split", "sup_bound", "residual"});
    std::string csv = csv_row(cols);
    std::vector<tilt::TiltSolution> sols;
    bool ok = true;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto s = tilt::solve_tilt(m, L, targets[i], eta);
        std::vector<std::string> row{std::to_string(i)};
        for (Eigen::Index k = 0; k < targets[i].size(); ++k) row.push_back(num(targets[i][k]));
        row.insert(row.end(), {num(s.piece.zeta), std::to_string(s.halvings), s.shell_split ? "1" : "0",
                               num(s.piece.sup_bound()), num(s.residual)});
        csv += csv_row(row);
        ok = ok && s.piece.sup_bound() <= 0.5 && !(s.residual > 1e-6);
        sols.push_back(s);
    }
    write_text(c.out_dir / "tilt.csv", csv);

    const auto n = get_or<std::size_t>(p, "n_sims", 10000);
    const tilt::TiltFunction g({0.0}, {sols.front().piece});
    const int n_steps = get_or(p, "n_steps", 10);
    const double T = get_or(p, "T", 1.0);
    const auto sim = sim_of(p);
    const Vector x0 = vector_param(p, "x0", Vector::Zero(coeffs.m()));
    std::vector<double> logd(n);
    parallel_for(n, c.jobs, [&](std::size_t i) {
        Stream rng = Stream::substream(c.seed, i);
        logd[i] = sde::simulate_tilted(coeffs, m, x0, 0.0, T, n_steps, eta, g, rng, sim).log_density;
    });
    double s1 = 0.0, s2 = 0.0;
    std::string dcsv = csv_row({"path", "log_density"});
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(logd[i]);
        s1 += e;
        s2 += e * e;
        dcsv += csv_row({std::to_string(i), num(logd[i])});
    }
    write_text(c.out_dir / "density.csv", dcsv);
    const double mean = n ? s1 / n : 0.0;
    const double se = n > 1 ? std::sqrt(std::max(0.0, s2 / n - mean * mean) / n) : 0.0;
    const bool martingale = n > 1 && std::abs(mean - 1.0) <= 3.0 * se;
    Outcome o;
    o.positive = ok && martingale;
    o.summary = {{"eta", eta},
                 {"targets", targets.size()},
                 {"solutions_valid", ok},
                 {"density_mean", mean},
                 {"density_std_error", se},
                 {"martingale", martingale}};
    *c.out << "E[exp(log density)] = " << num(mean) << " +- " << num(se) << '\n';
    return o;
}

Outcome reach(const Context& c) {
    const auto m = model_of(c);
    const auto coeffs = coefficients_of(c, m);
    const auto sys = skeleton::SkeletonSystem::effective(coeffs, m);
    const auto& p = c.params();
    const std::string route = get_or<std::string>(p, "route", "cone");
    const Vector x = config::to_vector(require(p, "x"), "x");
    const Vector y = config::to_vector(require(p, "y"), "y");
    const double T = get_or(p, "T", 1.0);
    support::ReachOptions ro;
    ro.initial_jumps = get_or(p, "initial_jumps", ro.initial_jumps);
    ro.max_jumps = get_or(p, "max_jumps", ro.max_jumps);
    ro.max_amplitude = get_or(p, "max_amplitude", ro.max_amplitude);
    ro.n_pieces = get_or(p, "n_pieces", ro.n_pieces);
    ro.skeleton.h = get_or(p, "h", ro.skeleton.h);
    support::ReachCertificate cert;
    double eps = 0.0;
    if (route == "cone") {
        eps = get_or(p, "eps", 0.05);
        cert = support::reach_cone(sys, x, y, T, eps, get_or(p, "theta", 0.5), ro);
    } else if (route == "control") {
        eps = get_or(p, "eps", 1e-3);
        cert = support::reach_control(sys, levy::integrability_subspace(m), x, y, T, ro);
    } else {
        throw ConfigError("reach: route must be 'cone' or 'control'");
    }
    const auto replayed = support::replay(sys, cert);
    write_path(c.out_dir / "replay.csv", replayed.path);
    Json cj{{"route", cert.route},
            {"x", config::from_vector(cert.x)},
            {"y", config::from_vector(cert.y)},
            {"T", cert.T},
            {"eps", eps},
            {"terminal_error", cert.terminal_error},
            {"h", cert.opts.h}};
    if (cert.plan) {
        Json jumps = Json::array();
        for (const auto& j : cert.plan->jumps) jumps.push_back({{"t", j.time}, {"u", config::from_vector(*j.amplitude)}});
        cj["jumps"] = jumps;
    }
    if (cert.control) {
        Json vals = Json::array();
        for (const auto& v : cert.control->values()) vals.push_back(config::from_vector(v));
        cj["control"] = {{"breakpoints", cert.control->breakpoints()}, {"values", vals}};
    }
    write_text(c.out_dir / "certificate.json", cj.dump(2) + "\n");
    Outcome o;
    o.positive = cert.terminal_error <= eps;
    o.summary = {{"route", cert.route},
                 {"terminal_error", cert.terminal_error},
                 {"replay_error", (replayed.path.terminal() - y).norm()},
                 {"eps", eps}};
    *c.out << "terminal error " << num(cert.terminal_error) << '\n';
    return o;
}

Outcome metric_cmd(const Context& c) {
    const auto& p = c.params();
    const auto a = config::path_from_json(require(p, "p"));
    const auto b = config::path_from_json(require(p, "q"));
    metric::SkorokhodOptions so;
    so.exhaustive_limit = get_or<std::size_t>(p, "exhaustive_limit", so.exhaustive_limit);
    const auto rep = metric::skorokhod_distance_upper(a, b, so);
    std::string csv = csv_row({"quantity", "value"});
    csv += csv_row({"uniform", num(rep.uniform)});
    csv += csv_row({"skorokhod_upper", num(rep.skorokhod_upper)});
    csv += csv_row({"slope_term", num(rep.slope_term)});
    csv += csv_row({"sup_term", num(rep.sup_term)});
    write_text(c.out_dir / "metric.csv", csv);
    std::string acsv = csv_row({"t", "lambda_t"});
    for (const auto& [t, s] : rep.anchors) acsv += csv_row({num(t), num(s)});
    write_text(c.out_dir / "anchors.csv", acsv);
    Outcome o;
    o.summary = {{"uniform", rep.uniform},
                 {"skorokhod_upper", rep.skorokhod_upper},
                 {"slope_term", rep.slope_term},
                 {"sup_term", rep.sup_term},
                 {"candidates", rep.candidates}};
    *c.out << "skorokhod upper bound " << num(rep.skorokhod_upper) << '\n';
    return o;
}

const std::map<std::string, std::pair<std::function<Outcome(const Context&)>, const char*>>& commands() {
    static const std::map<std::string, std::pair<std::function<Outcome(const Context&)>, const char*>> table{
        {"analyze-levy", {analyze_levy, "Integrability subspace, shifts, moments and scaling diagnostic"}},
        {"skeleton", {run_skeleton, "Solve a skeleton path and export it"}},
        {"simulate", {simulate, "Simulate SDE paths"}},
        {"support-check", {support_check, "Monte-Carlo probability of staying near a skeleton"}},
        {"inclusion-check", {inclusion_check, "Path-wise comparison with the skeleton ODE between large jumps"}},
        {"tilt-check", {tilt_check, "Solve intensity tilts and test the density martingale"}},
        {"reach", {reach, "Reachability certificates (cone or control route)"}},
        {"metric", {metric_cmd, "Path distance report"}},
    };
    return table;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Support-theorem toolkit for jump-noise SDEs", "jumpsupport"};
    app.require_subcommand(1);
    std::string config_path;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out_dir = "out";
    std::vector<std::string> sets;
    bool expect_positive = false;
    std::map<std::string, CLI::App*> subs;
    CLI::Option* seed_opt = nullptr;
    for (const auto& [name, entry] : commands()) {
        auto* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", config_path, "JSON experiment config");
        seed_opt = sub->add_option("--seed", seed, "Master seed (overrides the config)");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--set", sets, "Override KEY=VALUE (dotted keys, JSON values)");
        sub->add_flag("--expect-positive", expect_positive, "Exit 3 when the verdict is negative");
        subs[name] = sub;
    }

    std::vector<std::string> argv_store{"jumpsupport"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return ConfigFailure;
    }

    Context ctx;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) ctx.command = name;
    auto* sub = subs.at(ctx.command);
    seed_opt = sub->get_option("--seed");
    try {
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw ConfigError("cannot read config file " + config_path);
            ctx.cfg = Json::parse(is, nullptr, false);
            if (ctx.cfg.is_discarded() || !ctx.cfg.is_object())
                throw ConfigError("config file " + config_path + " is not a JSON object");
        } else {
            ctx.cfg = Json::object();
        }
        for (const auto& s : sets) config::apply_override(ctx.cfg, s);
        if (seed_opt->count() > 0) ctx.cfg["seed"] = seed;
        if (!ctx.cfg.contains("seed") || !ctx.cfg["seed"].is_number_unsigned())
            throw ConfigError("schema: 'seed' is required (non-negative integer; config key or --seed)");
        ctx.seed = ctx.cfg["seed"].get<std::uint64_t>();
        ctx.jobs = jobs;
        ctx.out_dir = out_dir;
        ctx.out = &out;
        fs::create_directories(ctx.out_dir);

        const auto outcome = commands().at(ctx.command).first(ctx);

        // --jobs and --out do not influence results and are left out of the record
        std::vector<std::string> inv{"jumpsupport", ctx.command};
        if (!config_path.empty()) inv.insert(inv.end(), {"--config", config_path});
        for (const auto& s : sets) inv.insert(inv.end(), {"--set", s});
        inv.insert(inv.end(), {"--seed", std::to_string(ctx.seed)});
        if (expect_positive) inv.push_back("--expect-positive");
        const std::string canonical = ctx.cfg.dump();
        Json manifest{{"command", ctx.command},
                      {"version", kVersion},
                      {"seed", ctx.seed},
                      {"config", ctx.cfg},
                      {"config_hash", config::fnv1a_hex(canonical)},
                      {"invocation", inv},
                      {"summary", outcome.summary},
                      {"verdict", outcome.positive ? "positive" : "negative"}};
        write_text(ctx.out_dir / "manifest.json", manifest.dump(2) + "\n");
        if (expect_positive && !outcome.positive) {
            err << "verdict negative\n";
            return NegativeVerdict;
        }
        return Ok;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return NumericalFailure;
    } catch (const fs::filesystem_error& e) {
        err << "config error: " << e.what() << '\n';
        return ConfigFailure;
    }
}

}  // namespace jumpsupport::cli
