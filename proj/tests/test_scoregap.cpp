#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "purecert/errors.hpp"
#include "purecert/scoregap.hpp"
#include "test_helpers.hpp"

using namespace purecert;
using purecert::testing::demo_prototypes;
using purecert::testing::demo_schedule;

namespace {

ScorePerturbation constant_pert(double magnitude) {
    ScorePerturbation p;
    p.kind = PerturbationKind::ConstantVector;
    p.magnitude = magnitude;
    p.direction = {1.0, 0.0};
    return p;
}

}  // namespace

TEST_CASE("zero perturbation has exactly zero loss") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    auto est = estimate_jsm(dist, constant_pert(0.0), 0.5, sched, 2000, Rng(1));
    CHECK(est.value == 0.0);
    CHECK(est.stderr_ == 0.0);
    CHECK(est.samples == 2000);
}

TEST_CASE("constant perturbation matches the closed form") {
    // J = 1/2 |c|^2 int_0^t gamma = -1/2 |c|^2 log(alpha_bar(t))
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    for (double t : {0.3, 0.5, 0.9}) {
        const double mag = 0.7;
        auto est = estimate_jsm(dist, constant_pert(mag), t, sched, 40000, Rng(17));
        const double closed = -0.5 * mag * mag * std::log(sched.alpha_bar_at(t));
        CHECK(std::abs(est.value - closed) <= 3.0 * est.stderr_ + 1e-9);
    }
}

TEST_CASE("radial perturbation has the same norm, hence the same closed form") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    ScorePerturbation p;
    p.kind = PerturbationKind::Radial;
    p.magnitude = 0.4;
    auto est = estimate_jsm(dist, p, 0.6, sched, 40000, Rng(23));
    const double closed = -0.5 * 0.16 * std::log(sched.alpha_bar_at(0.6));
    CHECK(std::abs(est.value - closed) <= 3.0 * est.stderr_ + 1e-9);
}

TEST_CASE("loss is linear in the weighting and quadratic in the magnitude") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    auto base = estimate_jsm(dist, constant_pert(0.3), 0.5, sched, 2000, Rng(5), 1.0);
    auto doubled = estimate_jsm(dist, constant_pert(0.3), 0.5, sched, 2000, Rng(5), 2.0);
    CHECK(doubled.value == doctest::Approx(2.0 * base.value).epsilon(1e-12));

    auto mag2 = estimate_jsm(dist, constant_pert(0.6), 0.5, sched, 2000, Rng(5), 1.0);
    CHECK(mag2.value == doctest::Approx(4.0 * base.value).epsilon(1e-12));
}

TEST_CASE("estimate_jsm input validation") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    CHECK_THROWS_AS(estimate_jsm(dist, constant_pert(0.1), 0.0, sched, 2000, Rng(1)), InvalidRange);
    CHECK_THROWS_AS(estimate_jsm(dist, constant_pert(0.1), 0.5, sched, 500, Rng(1)), InvalidRange);
    ScorePerturbation bad = constant_pert(0.1);
    bad.direction = {1.0, 0.0, 0.0};
    CHECK_THROWS_AS(estimate_jsm(dist, bad, 0.5, sched, 2000, Rng(1)), DimensionMismatch);
    bad = constant_pert(-0.1);
    CHECK_THROWS_AS(estimate_jsm(dist, bad, 0.5, sched, 2000, Rng(1)), InvalidRange);
    bad = constant_pert(0.1);
    bad.direction = {0.0, 0.0};
    CHECK_THROWS_AS(estimate_jsm(dist, bad, 0.5, sched, 2000, Rng(1)), InvalidRange);
}

TEST_CASE("zero perturbation gives matching endpoint label distributions") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    auto rep = compare_endpoint_distributions(dist, constant_pert(0.0), {1.0, 1.0}, 0.4, sched,
                                              2000, 200, Rng(11), 2000);
    CHECK(rep.jsm.value == 0.0);
    // two independent equal-distribution sample sets: TV within sampling error
    CHECK(rep.endpoint_tv <= 1.5 * rep.tv_stderr);
}

TEST_CASE("endpoint TV respects the Pinsker-style bound at moderate magnitudes") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    for (double mag : {0.1, 0.5}) {
        auto rep = compare_endpoint_distributions(dist, constant_pert(mag), {1.0, 1.0}, 0.4, sched,
                                                  2000, 200, Rng(13), 4000);
        const double bound = std::sqrt(0.5 * (rep.jsm.value + 3.0 * rep.jsm.stderr_));
        CHECK(rep.endpoint_tv <= bound + 3.0 * rep.tv_stderr);
    }
}

TEST_CASE("endpoint TV grows with the perturbation magnitude (trend)") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    auto small = compare_endpoint_distributions(dist, constant_pert(0.1), {1.0, 1.0}, 0.4, sched,
                                                3000, 200, Rng(19), 2000);
    auto large = compare_endpoint_distributions(dist, constant_pert(2.0), {1.0, 1.0}, 0.4, sched,
                                                3000, 200, Rng(19), 2000);
    CHECK(large.endpoint_tv + 0.02 >= small.endpoint_tv);
    CHECK(large.jsm.value > small.jsm.value);
}

TEST_CASE("compare_endpoint_distributions rejects tiny run counts") {
    auto dist = demo_prototypes();
    auto sched = demo_schedule();
    CHECK_THROWS_AS(compare_endpoint_distributions(dist, constant_pert(0.1), {1.0, 1.0}, 0.4,
                                                   sched, 100, 100, Rng(1), 2000),
                    InvalidRange);
}
