#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "jumpsupport/errors.hpp"
#include "jumpsupport/support.hpp"
#include "test_util.hpp"

using namespace jumpsupport;
using namespace jumpsupport::support;
using levy::LevyModel;
using test::vec;

namespace {

McOptions cheap_mc() {
    McOptions o;
    o.n_steps = 50;
    o.sim.small.max_rate = 300.0;
    return o;
}

}  // namespace

TEST_CASE("wilson interval") {
    const auto ci = wilson_interval(50, 100);
    CHECK(ci.lo == doctest::Approx(0.4038).epsilon(1e-3));
    CHECK(ci.hi == doctest::Approx(0.5962).epsilon(1e-3));
    CHECK(wilson_interval(0, 100).lo == 0.0);
    CHECK(wilson_interval(100, 100).hi == 1.0);
    CHECK(wilson_interval(1, 100).lo > 0.0);
}

TEST_CASE("jump window probability") {
    const auto m = LevyModel::radial(1.5, 1);
    CHECK(jump_window_probability(m, 1.0, {}, 0.1, 1.0) == doctest::Approx(std::exp(-4.0 / 3.0)).epsilon(1e-9));
    CHECK(jump_window_probability(m, 1.0, {0.5}, 0.1, 1.0) ==
          doctest::Approx(std::exp(-4.0 / 3.0) * 4.0 / 15.0).epsilon(1e-9));
    CHECK_THROWS_AS(jump_window_probability(m, 1.0, {0.5}, 0.3, 1.0), PreconditionError);
    CHECK_THROWS_AS(jump_window_probability(m, 1.0, {0.3, 0.4}, 0.06, 1.0), PreconditionError);

    const auto f = jump_window_frequency(m, 1.0, {0.5}, 0.1, 1.0, 20000, 8);
    const double p = jump_window_probability(m, 1.0, {0.5}, 0.1, 1.0);
    CHECK(std::abs(f.frequency - p) < 3.0 * std::sqrt(p * (1 - p) / 20000));
}

TEST_CASE("monte carlo support probability") {
    const auto c = test::linear(Matrix::Constant(1, 1, -1.0), vec({0}), Matrix::Identity(1, 1));
    const auto m = LevyModel::radial(1.5, 1);
    const auto sys = skeleton::SkeletonSystem::effective(c, m);
    const auto L = levy::integrability_subspace(m);
    const auto phi = skeleton::solve_skeleton(sys, vec({1}), skeleton::ControlFunction::zero(L), {}, 1.0);

    CHECK_THROWS_AS(mc_support_probability(c, m, phi, 0.1, 50, 0.5, 1, cheap_mc()), PreconditionError);

    const auto wide = mc_support_probability(c, m, phi, 1e6, 200, 0.5, 1, cheap_mc());
    CHECK(wide.estimate == 1.0);
    CHECK(wide.positive);

    const auto far_phi = skeleton::solve_skeleton(sys, vec({101}), skeleton::ControlFunction::zero(L), {}, 1.0);
    auto shifted = far_phi;
    const auto far = mc_support_probability(c, m, shifted, 0.1, 200, 0.5, 1, cheap_mc());
    CHECK(far.estimate == 0.0);
    CHECK_FALSE(far.positive);

    const auto r = mc_support_probability(c, m, phi, 0.5, 300, 0.5, 2, cheap_mc());
    CHECK(r.ci.lo <= r.estimate);
    CHECK(r.estimate <= r.ci.hi);
    double prev = 0.0;
    for (double eps : {0.1, 0.2, 0.4, 0.8, 1.6}) {
        CHECK(r.estimate_at(eps) >= prev);
        prev = r.estimate_at(eps);
    }

    auto two = cheap_mc();
    two.jobs = 3;
    const auto r2 = mc_support_probability(c, m, phi, 0.5, 300, 0.5, 2, two);
    CHECK(r2.distances == r.distances);
}

TEST_CASE("forward inclusion") {
    InclusionOptions o;
    o.x0 = vec({0.5});
    o.n_steps = 100;
    o.sim.small.max_rate = 500.0;
    SUBCASE("zero paths pass vacuously") {
        const auto c = test::pure_noise(1);
        const auto rep = forward_inclusion_check(c, LevyModel::radial(1.5, 1), 0.2, 0, 0.1, 1, o);
        CHECK(rep.pass_rate == 1.0);
    }
    SUBCASE("discrete noise is reproduced exactly between jumps") {
        const auto c = test::linear(Matrix::Constant(1, 1, -1.0), vec({0.2}), Matrix::Identity(1, 1));
        const auto m = LevyModel::discrete({{vec({1}), 1.0}, {vec({-0.7}), 2.0}});
        // Euler against RK4 with h = 0.01: global error below h/2 · sup|b b'| · T
        const auto rep = forward_inclusion_check(c, m, 0.5, 200, 0.05, 3, o);
        CHECK(rep.pass_rate == 1.0);
        MESSAGE("largest deviation " << *std::max_element(rep.max_deviation.begin(), rep.max_deviation.end()));
        CHECK(rep.jumps > 0);
        CHECK(rep.jumps_admissible == rep.jumps);
    }
    SUBCASE("deviations shrink with the small-jump band") {
        const auto c = test::pure_noise(1);
        const auto m = LevyModel::radial(1.5, 1);
        double prev = INFINITY;
        for (double eta : {0.2, 0.1, 0.05}) {
            const auto rep = forward_inclusion_check(c, m, eta, 100, 1.0, 4, o);
            CHECK(rep.median_segment_deviation < prev);
            prev = rep.median_segment_deviation;
        }
    }
}

TEST_CASE("cone condition and reachability") {
    CHECK(cone_condition(LevyModel::cylindrical({0.5, 1.5}), 0.5));
    CHECK(cone_condition(LevyModel::radial(1.5, 3), 0.5));
    CHECK_FALSE(cone_condition(LevyModel::curve(1.5, 1.2), 0.5));
    CHECK_FALSE(cone_condition(LevyModel::one_sided(1.5), 0.5));
    CHECK(cone_condition(LevyModel::discrete({{vec({1}), 1.0}, {vec({-1}), 1.0}}), 0.5));

    const auto id = test::pure_noise(2);
    SUBCASE("staying put needs no jumps") {
        const auto sys = skeleton::SkeletonSystem::effective(id, LevyModel::cylindrical({0.5, 1.5}));
        const auto cert = reach_cone(sys, vec({0.3, 0.3}), vec({0.3, 0.3}), 1.0, 0.05, 0.5);
        CHECK(cert.plan->jumps.empty());
        CHECK(cert.terminal_error == 0.0);
    }
    SUBCASE("cylindrical steering and replay") {
        const auto sys = skeleton::SkeletonSystem::effective(id, LevyModel::cylindrical({0.5, 1.5}));
        ReachOptions o;
        o.max_amplitude = 0.2;
        const auto cert = reach_cone(sys, vec({0, 0}), vec({1, 1}), 1.0, 0.05, 0.5, o);
        CHECK(cert.terminal_error <= 0.05);
        CHECK(static_cast<int>(cert.plan->jumps.size()) <= o.max_jumps);
        const auto again = replay(sys, cert);
        CHECK((again.path.terminal() - vec({1, 1})).norm() == cert.terminal_error);
    }
    SUBCASE("curve image is not certifiable") {
        const auto sys = skeleton::SkeletonSystem::effective(id, LevyModel::curve(1.5, 1.2));
        CHECK_THROWS_AS(reach_cone(sys, vec({0, 0}), vec({1, 1}), 1.0, 0.05, 0.5), NotAnalyzableError);
    }
    SUBCASE("control route") {
        const auto m = LevyModel::radial(1.5, 1);
        const auto L = levy::integrability_subspace(m);
        const auto sys1 = skeleton::SkeletonSystem::effective(test::pure_noise(1), m);
        const auto exact = reach_control(sys1, L, vec({0}), vec({2}), 1.0);
        CHECK(exact.terminal_error <= 1e-12);
        for (const auto& v : exact.control->values()) CHECK(v[0] == doctest::Approx(2.0).epsilon(1e-12));

        const auto decay = test::linear(Matrix::Constant(1, 1, -1.0), vec({0}), Matrix::Identity(1, 1));
        const auto sys2 = skeleton::SkeletonSystem::effective(decay, m);
        const auto cert = reach_control(sys2, L, vec({0}), vec({1}), 1.0);
        CHECK(cert.terminal_error <= 1e-3);
        CHECK((replay(sys2, cert).path.terminal() - vec({1})).norm() == cert.terminal_error);

        const auto flat = test::linear(Matrix::Zero(1, 1), vec({0}), Matrix::Zero(1, 1));
        CHECK_THROWS_AS(reach_control(skeleton::SkeletonSystem::effective(flat, m), L, vec({0}), vec({1}), 1.0),
                        PreconditionError);
        const auto cyl = LevyModel::cylindrical({0.5, 1.5});
        CHECK_THROWS_AS(reach_control(skeleton::SkeletonSystem::effective(id, cyl), levy::integrability_subspace(cyl),
                                      vec({0, 0}), vec({1, 1}), 1.0),
                        PreconditionError);
    }
}

TEST_CASE("scaling condition") {
    const std::vector<double> eps{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const auto radial = check_scaling_condition(LevyModel::radial(1.5, 2), eps, direction_grid(2, 12));
    CHECK(radial.holds);
    for (const auto& d : radial.directions) CHECK(d.implied_alpha == doctest::Approx(1.5).epsilon(0.02 / 1.5));

    const auto cyl = check_scaling_condition(LevyModel::cylindrical({0.5, 1.5}), eps, {vec({1, 0}), vec({0, 1})});
    CHECK_FALSE(cyl.holds);
    CHECK(cyl.directions[0].implied_alpha == doctest::Approx(0.5).epsilon(0.01));
    CHECK(cyl.directions[1].implied_alpha == doctest::Approx(1.5).epsilon(0.01));

    const auto curve = check_scaling_condition(LevyModel::curve(1.5, 1.2), eps, {vec({1, 0}), vec({0, 1})});
    CHECK_FALSE(curve.holds);
    CHECK(curve.directions[0].implied_alpha != doctest::Approx(curve.directions[1].implied_alpha).epsilon(0.05));
}
