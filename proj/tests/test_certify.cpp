#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "purecert/certify.hpp"
#include "purecert/errors.hpp"
#include "purecert/parallel.hpp"
#include "test_helpers.hpp"

using namespace purecert;
using purecert::testing::demo_schedule;

namespace {

SmoothingParams quick_params() {
    SmoothingParams p;
    p.sigma = 0.25;
    p.n0 = 20;
    p.n = 200;
    p.alpha = 0.01;
    p.k_votes = 1;
    p.b = 1;  // one-shot reverse: fastest deterministic path
    return p;
}

}  // namespace

TEST_CASE("classify dispatches to both classifier kinds") {
    auto dist = purecert::testing::two_prototypes();
    CHECK(classify(dist, ClassifierKind::NearestPrototype, {0.2, 0.0}) == 0);
    CHECK(classify(dist, ClassifierKind::NearestPrototype, {1.8, 0.0}) == 1);
    CHECK(classify(dist, ClassifierKind::Bayes, {0.2, 0.0}) == 0);
    // midpoint tie resolves to the smaller label under both
    CHECK(classify(dist, ClassifierKind::Bayes, {1.0, 0.0}) == 0);
    CHECK(classify(dist, ClassifierKind::NearestPrototype, {1.0, 0.0}) == 0);
}

TEST_CASE("SmoothingParams::validate rejects out-of-range fields") {
    SmoothingParams p = quick_params();
    p.sigma = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidRange);
    p = quick_params();
    p.n0 = 5;
    CHECK_THROWS_AS(p.validate(), InvalidRange);
    p = quick_params();
    p.n = p.n0 - 1;
    CHECK_THROWS_AS(p.validate(), InvalidRange);
    p = quick_params();
    p.alpha = 0.5;
    CHECK_THROWS_AS(p.validate(), InvalidRange);
    p = quick_params();
    p.k_votes = 0;
    CHECK_THROWS_AS(p.validate(), InvalidRange);
    p = quick_params();
    p.b = 0;
    CHECK_THROWS_AS(p.validate(), InvalidRange);
    CHECK_NOTHROW(quick_params().validate());
}

TEST_CASE("certify near a prototype predicts its label with a positive radius") {
    auto dist = purecert::testing::two_prototypes();
    auto sched = demo_schedule();
    ReverseConfig rcfg;
    auto res = certify(dist, ClassifierKind::NearestPrototype, {0.0, 0.0}, quick_params(), sched,
                       rcfg, 12345);
    CHECK(res.predicted_label == 0);
    CHECK(res.pa_lower > 0.5);
    CHECK(res.radius > 0.0);
    // radius identity holds exactly
    CHECK(res.radius == res.params.sigma * normal_quantile(res.pa_lower));
}

TEST_CASE("certify abstains at the symmetric midpoint") {
    auto dist = purecert::testing::two_prototypes();
    auto sched = demo_schedule();
    ReverseConfig rcfg;
    auto res = certify(dist, ClassifierKind::NearestPrototype, {1.0, 0.0}, quick_params(), sched,
                       rcfg, 7);
    CHECK(res.predicted_label == kAbstain);
    CHECK(res.radius == 0.0);
    CHECK(res.pa_lower <= 0.65);  // near 1/2 up to binomial noise
}

TEST_CASE("all-success certification hits the alpha^(1/n) bound") {
    // far from the boundary with tiny sigma: every draw classifies correctly
    auto dist = purecert::testing::two_prototypes();
    auto sched = demo_schedule();
    SmoothingParams p = quick_params();
    p.sigma = 0.05;
    ReverseConfig rcfg;
    auto res = certify(dist, ClassifierKind::NearestPrototype, {0.0, 0.0}, p, sched, rcfg, 99);
    std::size_t successes = 0;
    for (const auto& [label, count] : res.counts) {
        if (label == 0) successes = count;
    }
    REQUIRE(successes == p.n);
    CHECK(std::abs(res.pa_lower - std::pow(p.alpha, 1.0 / p.n)) <= 1e-5);
}

TEST_CASE("certify is reproducible and independent of the worker count") {
    auto dist = purecert::testing::demo_prototypes();
    auto sched = demo_schedule();
    SmoothingParams p = quick_params();
    ReverseConfig rcfg;
    const Vec x0{0.4, 0.3};

    set_worker_count(1);
    auto a = certify(dist, ClassifierKind::NearestPrototype, x0, p, sched, rcfg, 555);
    auto a2 = certify(dist, ClassifierKind::NearestPrototype, x0, p, sched, rcfg, 555);
    set_worker_count(4);
    auto b = certify(dist, ClassifierKind::NearestPrototype, x0, p, sched, rcfg, 555);
    set_worker_count(0);

    CHECK(a.predicted_label == a2.predicted_label);
    CHECK(a.pa_lower == a2.pa_lower);
    CHECK(a.counts == a2.counts);
    CHECK(a.predicted_label == b.predicted_label);
    CHECK(a.pa_lower == b.pa_lower);
    CHECK(a.radius == b.radius);
    CHECK(a.counts == b.counts);
}

TEST_CASE("different seeds shuffle the draw noise") {
    auto dist = purecert::testing::demo_prototypes();
    auto sched = demo_schedule();
    SmoothingParams p = quick_params();
    p.sigma = 1.0;  // enough noise that tallies almost surely differ
    ReverseConfig rcfg;
    auto a = certify(dist, ClassifierKind::NearestPrototype, {1.2, 1.2}, p, sched, rcfg, 1);
    auto b = certify(dist, ClassifierKind::NearestPrototype, {1.2, 1.2}, p, sched, rcfg, 2);
    CHECK(a.counts != b.counts);
}

TEST_CASE("denoised_predict_one with K votes is deterministic in the rng") {
    auto dist = purecert::testing::demo_prototypes();
    auto sched = demo_schedule();
    SmoothingParams p = quick_params();
    p.k_votes = 15;
    p.b = 5;
    ReverseConfig rcfg;
    const Vec x{0.3, 0.1};
    const int l1 = denoised_predict_one(dist, ClassifierKind::NearestPrototype, x, p, sched, rcfg,
                                         Rng(9));
    const int l2 = denoised_predict_one(dist, ClassifierKind::NearestPrototype, x, p, sched, rcfg,
                                         Rng(9));
    CHECK(l1 == l2);
    CHECK(l1 == 0);
}

TEST_CASE("two_class_radius matches hand values and degrades to zero") {
    // pa = pb = 1/2: no margin
    CHECK(two_class_radius(0.5, 0.5, 0.5) == doctest::Approx(0.0));
    // pa = 0.975, pb = 0.025, sigma = 1: radius = Phi^-1(0.975)
    CHECK(two_class_radius(1.0, 0.975, 0.025) ==
          doctest::Approx(1.959963984540054).epsilon(1e-9));
    // one-sided specialization: pb = 1 - pa halves into sigma * Phi^-1(pa)
    CHECK(two_class_radius(0.25, 0.9, 0.1) == doctest::Approx(0.25 * normal_quantile(0.9)));
}

TEST_CASE("certify_batch: curve is non-increasing and anchored at epsilon 0") {
    auto dist = purecert::testing::two_prototypes();
    auto sched = demo_schedule();
    SmoothingParams p = quick_params();
    ReverseConfig rcfg;
    const std::vector<Vec> pts{{0.0, 0.0}, {0.2, 0.1}, {2.0, 0.0}, {1.8, -0.2}, {1.0, 0.0}};
    const std::vector<int> labels{0, 0, 1, 1, 0};
    const std::vector<double> eps{0.0, 0.1, 0.25, 0.5, 5.0};
    auto batch = certify_batch(dist, ClassifierKind::NearestPrototype, pts, labels, p, sched, rcfg,
                               31, eps);
    REQUIRE(batch.results.size() == 5);
    REQUIRE(batch.curve.size() == 5);
    for (std::size_t i = 1; i < batch.curve.size(); ++i) {
        CHECK(batch.curve[i].certified_accuracy <= batch.curve[i - 1].certified_accuracy);
    }
    // the midpoint abstains, so the curve starts at most 4/5
    CHECK(batch.curve[0].certified_accuracy <= 0.8 + 1e-12);
    CHECK(batch.curve[0].certified_accuracy >= 0.6);  // clear points certify at eps 0
    // a 5-unit radius is impossible at sigma 0.25 with n = 200
    CHECK(batch.curve[4].certified_accuracy == 0.0);

    CHECK_THROWS_AS(certify_batch(dist, ClassifierKind::NearestPrototype, {}, {}, p, sched, rcfg,
                                  1, eps),
                    InvalidRange);
    CHECK_THROWS_AS(certify_batch(dist, ClassifierKind::NearestPrototype, pts, {0, 1}, p, sched,
                                  rcfg, 1, eps),
                    InvalidRange);
}

TEST_CASE("larger sigma certifies a larger radius on a safe point") {
    auto dist = purecert::testing::two_prototypes();
    auto sched = demo_schedule();
    ReverseConfig rcfg;
    SmoothingParams lo = quick_params();
    lo.sigma = 0.1;
    SmoothingParams hi = quick_params();
    hi.sigma = 0.3;
    auto a = certify(dist, ClassifierKind::NearestPrototype, {0.0, 0.0}, lo, sched, rcfg, 5);
    auto b = certify(dist, ClassifierKind::NearestPrototype, {0.0, 0.0}, hi, sched, rcfg, 5);
    REQUIRE(a.predicted_label == 0);
    REQUIRE(b.predicted_label == 0);
    CHECK(b.radius > a.radius);
}
