#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "purecert/errors.hpp"
#include "purecert/geometry.hpp"
#include "purecert/posterior.hpp"
#include "test_helpers.hpp"

using namespace purecert;
using purecert::testing::demo_prototypes;
using purecert::testing::union_demo;

TEST_CASE("bisector example: equal masses reduce to the perpendicular bisector") {
    auto dist = purecert::testing::two_prototypes();
    auto region = build_region(dist, 0, 1.0);
    REQUIRE(region.sub_regions().size() == 1);
    const auto& hs = region.sub_regions().at(0);
    REQUIRE(hs.size() == 1);
    CHECK(hs[0].normal == Vec{2.0, 0.0});
    CHECK(hs[0].offset == doctest::Approx(2.0).epsilon(1e-12));

    // constraint independent of the orthogonal coordinate
    CHECK(region.membership({0.5, 7.0}).status == Membership::InUnion);
    CHECK(region.membership({0.5, 7.0}).containing_subregions == std::vector<std::size_t>{0});
    CHECK(region.membership({1.5, -3.0}).status == Membership::Outside);
    // boundary is outside by declared strictness
    CHECK(region.membership({1.0, 0.0}).status == Membership::Outside);

    CHECK(region.sub_region_radius(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mass-ratio-e example: boundary shifts to 1.5") {
    // p0/p1 = e with sigma_t = 1 puts the boundary at x = 1.5
    const double p1 = 1.0 / (1.0 + std::exp(1.0));
    auto dist = make_prototype_set({
        {1.0 - p1, {0.0, 0.0}, {}, 0},
        {p1, {2.0, 0.0}, {}, 1},
    });
    auto region = build_region(dist, 0, 1.0);
    CHECK(region.sub_regions().at(0)[0].offset == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(region.sub_region_radius(0) == doctest::Approx(1.5).epsilon(1e-10));

    // oracle: posterior argmax flips exactly across the plane
    auto just_in = build_posterior(dist, {1.499, 0.0}, 1.0);
    auto just_out = build_posterior(dist, {1.501, 0.0}, 1.0);
    CHECK(highest_density_point(just_in).argmax_label == 0);
    CHECK(highest_density_point(just_out).argmax_label == 1);

    // dense directional sampling of the boundary confirms the radius
    double min_dist = 1e300;
    for (int k = 0; k < 4096; ++k) {
        const double a = 2.0 * M_PI * k / 4096.0;
        const Vec u{std::cos(a), std::sin(a)};
        // walk out until outside
        double r = 0.0;
        for (r = 0.0; r < 50.0; r += 1e-3) {
            Vec p{r * u[0], r * u[1]};
            if (region.membership(p).status == Membership::Outside) break;
        }
        min_dist = std::min(min_dist, r);
    }
    CHECK(min_dist == doctest::Approx(1.5).epsilon(1e-3));
}

TEST_CASE("negative offset clamps the radius at zero") {
    // heavy opposing mass drags the offset negative for the light prototype
    const double ratio = std::exp(-10.0);  // log ratio -10, offset -10 + 2 < 0
    const double p0 = ratio / (1.0 + ratio);
    auto dist = make_prototype_set({
        {p0, {0.0, 0.0}, {}, 0},
        {1.0 - p0, {2.0, 0.0}, {}, 1},
    });
    auto region = build_region(dist, 0, 1.0);
    CHECK(region.sub_region_radius(0) == 0.0);
}

TEST_CASE("region construction errors") {
    auto same_label = make_prototype_set({{0.5, {0.0, 0.0}, {}, 0}, {0.5, {2.0, 0.0}, {}, 0}});
    CHECK_THROWS_AS(build_region(same_label, 0, 1.0), NoOtherLabels);
    auto mix = purecert::testing::demo_mixture();
    CHECK_THROWS_AS(build_region(mix, 0, 1.0), UnsupportedKind);
}

TEST_CASE("union contains each same-label sub-region (grid inclusion)") {
    auto dist = union_demo();
    auto region = build_region(dist, 0, 1.0);
    for (int ix = 0; ix < 200; ++ix) {
        for (int iy = 0; iy < 200; ++iy) {
            const Vec p{-2.0 + 6.0 * ix / 199.0, -2.0 + 6.0 * iy / 199.0};
            if (region.in_sub_region(0, p) || region.in_sub_region(1, p)) {
                CHECK(region.membership(p).status == Membership::InUnion);
            }
        }
    }
}

TEST_CASE("membership equals the posterior-argmax oracle on random points") {
    auto dist = demo_prototypes();
    const double sigma_t = 1.0;
    auto region = build_region(dist, 0, sigma_t);
    Rng rng(2024);
    for (int k = 0; k < 10000; ++k) {
        const Vec p{-2.0 + 7.0 * rng.uniform(), -2.0 + 7.0 * rng.uniform()};
        const auto post = build_posterior(dist, p, sigma_t);
        const int argmax_label = highest_density_point(post).argmax_label;
        const bool in = region.membership(p).status == Membership::InUnion;
        CHECK(in == (argmax_label == region.label()));
    }
}

TEST_CASE("offset is monotone in the anchor's log mass") {
    auto lighter = make_prototype_set({{0.4, {0.0, 0.0}, {}, 0}, {0.6, {2.0, 0.0}, {}, 1}});
    auto heavier = make_prototype_set({{0.6, {0.0, 0.0}, {}, 0}, {0.4, {2.0, 0.0}, {}, 1}});
    auto r1 = build_region(lighter, 0, 1.0);
    auto r2 = build_region(heavier, 0, 1.0);
    CHECK(r2.sub_regions().at(0)[0].offset > r1.sub_regions().at(0)[0].offset);
}

TEST_CASE("equal-mass regions are invariant in sigma_t") {
    auto dist = purecert::testing::two_prototypes();
    auto r1 = build_region(dist, 0, 0.5);
    auto r2 = build_region(dist, 0, 2.0);
    CHECK(r1.sub_regions().at(0)[0].offset == doctest::Approx(r2.sub_regions().at(0)[0].offset));
}

TEST_CASE("sub-region convexity: midpoints stay inside") {
    auto dist = union_demo();
    auto region = build_region(dist, 0, 1.0);
    Rng rng(5);
    int tested = 0;
    while (tested < 10000) {
        const Vec a{-3.0 + 8.0 * rng.uniform(), -3.0 + 10.0 * rng.uniform()};
        const Vec b{-3.0 + 8.0 * rng.uniform(), -3.0 + 10.0 * rng.uniform()};
        if (!region.in_sub_region(0, a) || !region.in_sub_region(0, b)) continue;
        const Vec mid = 0.5 * (a + b);
        CHECK(region.in_sub_region(0, mid));
        ++tested;
    }
}

TEST_CASE("union radius: single sub-region equals the closed form") {
    auto dist = make_prototype_set({
        {0.4, {0.0, 0.0}, {}, 0},
        {0.3, {2.0, 0.0}, {}, 1},
        {0.3, {0.0, -2.0}, {}, 1},
    });
    auto region = build_region(dist, 0, 1.0);
    auto est = region.union_radius({0.0, 0.0}, 512, 1e-6);
    CHECK(std::abs(est.radius - region.sub_region_radius(0)) <= 1e-5);
}

TEST_CASE("union radius exceeds the sub-region radius on the union demo") {
    auto dist = union_demo();
    auto region = build_region(dist, 0, 1.0);
    const double r_sub = region.sub_region_radius(0);
    auto est = region.union_radius({0.0, 0.0}, 512, 1e-6);
    CHECK(est.radius > r_sub + 0.1);
    // fine grid scan oracle: distance to the nearest outside point bounds the
    // inscribed radius from above; the estimate must not exceed it
    double nearest_outside = 1e300;
    for (int ix = 0; ix <= 800; ++ix) {
        for (int iy = 0; iy <= 800; ++iy) {
            const Vec p{-4.0 + 8.0 * ix / 800.0, -4.0 + 8.0 * iy / 800.0};
            if (region.membership(p).status == Membership::Outside) {
                nearest_outside = std::min(nearest_outside, norm(p));
            }
        }
    }
    CHECK(est.radius <= nearest_outside + 0.02);
    CHECK(est.radius >= nearest_outside - 0.05);
}

TEST_CASE("union radius is non-increasing in direction count") {
    auto dist = union_demo();
    auto region = build_region(dist, 0, 1.0);
    auto a = region.union_radius({0.0, 0.0}, 256, 1e-6);
    auto b = region.union_radius({0.0, 0.0}, 512, 1e-6);
    CHECK(b.radius <= a.radius + 1e-6);
}

TEST_CASE("union radius rejects an outside center") {
    auto dist = purecert::testing::two_prototypes();
    auto region = build_region(dist, 0, 1.0);
    CHECK_THROWS_AS(region.union_radius({5.0, 0.0}, 128, 1e-6), CenterOutside);
    CHECK_THROWS_AS(region.union_radius({0.0, 0.0}, 32, 1e-6), InvalidRange);
}
