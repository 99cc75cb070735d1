#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nestedot/errors.hpp"
#include "nestedot/geodesics.hpp"

using namespace nestedot;

TEST_CASE("inner geodesic endpoints and Dirac midpoint") {
    const DiscreteMeasure mu = DiscreteMeasure::dirac({0.0});
    const DiscreteMeasure nu = DiscreteMeasure::dirac({2.0});
    const Coupling plan = wasserstein(mu, nu, 2.0).coupling;
    CHECK(exactly_equal(inner_geodesic(mu, nu, 2.0, plan, 0.0), mu));
    CHECK(exactly_equal(inner_geodesic(mu, nu, 2.0, plan, 1.0), nu));
    const DiscreteMeasure mid = inner_geodesic(mu, nu, 2.0, plan, 0.5);
    REQUIRE(mid.size() == 1);
    CHECK(mid.atom(0)[0] == doctest::Approx(1.0));
}

TEST_CASE("inner geodesic rejects bad parameters") {
    const DiscreteMeasure mu = DiscreteMeasure::dirac({0.0});
    const Coupling plan = wasserstein(mu, mu, 2.0).coupling;
    CHECK_THROWS_WITH_AS(inner_geodesic(mu, mu, 2.0, plan, 1.5), doctest::Contains("parameter out of range"),
                         InputError);
    CHECK_THROWS_WITH_AS(inner_geodesic(mu, mu, 2.0, plan, -0.1), doctest::Contains("parameter out of range"),
                         InputError);
    CHECK_THROWS_AS(inner_geodesic(mu, mu, 1.0, plan, 0.5), InputError);
}

TEST_CASE("inner geodesic endpoints equal the measures on random instances") {
    testutil::Rng rng(41);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = rng.uniform_int(1, 3);
        const DiscreteMeasure mu = rng.measure(dim, 4);
        const DiscreteMeasure nu = rng.measure(dim, 4);
        const Coupling plan = wasserstein(mu, nu, 2.0).coupling;
        CHECK(approx_equal(inner_geodesic(mu, nu, 2.0, plan, 0.0), mu, 1e-12));
        CHECK(approx_equal(inner_geodesic(mu, nu, 2.0, plan, 1.0), nu, 1e-12));
    }
}

TEST_CASE("inner geodesic has constant speed") {
    testutil::Rng rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const DiscreteMeasure mu = rng.measure(2, 4);
        const DiscreteMeasure nu = rng.measure(2, 4);
        const double full = wasserstein_distance(mu, nu, 2.0);
        const Coupling plan = wasserstein(mu, nu, 2.0).coupling;
        const double ts[4] = {0.2, 0.5, 0.7, 1.0};
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                const DiscreteMeasure ma = inner_geodesic(mu, nu, 2.0, plan, ts[a]);
                const DiscreteMeasure mb = inner_geodesic(mu, nu, 2.0, plan, ts[b]);
                const double d = wasserstein_distance(ma, mb, 2.0);
                CHECK(std::abs(d - (ts[b] - ts[a]) * full) <= 1e-7 * std::max(1.0, full));
            }
        }
    }
}

TEST_CASE("one-dimensional single-component geodesic matches quantile interpolation") {
    // sorted matching is the optimal plan in d = 1, so displacement
    // interpolation moves the k-th quantile linearly
    const DiscreteMeasure mu(1, {{0.0}, {1.0}, {4.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    const DiscreteMeasure nu(1, {{2.0}, {5.0}, {9.0}}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
    const Coupling plan = wasserstein(mu, nu, 2.0).coupling;
    const double t = 0.25;
    const DiscreteMeasure interp = consolidated(inner_geodesic(mu, nu, 2.0, plan, t));
    // sorted atoms pair in order: 0->2, 1->5, 4->9
    REQUIRE(interp.size() == 3);
    CHECK(interp.atom(0)[0] == doctest::Approx((1 - t) * 0.0 + t * 2.0).epsilon(1e-12));
    CHECK(interp.atom(1)[0] == doctest::Approx((1 - t) * 1.0 + t * 5.0).epsilon(1e-12));
    CHECK(interp.atom(2)[0] == doctest::Approx((1 - t) * 4.0 + t * 9.0).epsilon(1e-12));
}

TEST_CASE("inner geodesic curve object") {
    testutil::Rng rng(46);
    const DiscreteMeasure mu = rng.measure(2, 4);
    const DiscreteMeasure nu = rng.measure(2, 4);
    const InnerGeodesic geo(mu, nu, 2.0);
    CHECK(geo.cost() == doctest::Approx(wasserstein(mu, nu, 2.0).cost));
    CHECK(approx_equal(geo.sample(0.0), mu, 1e-12));
    CHECK(approx_equal(geo.sample(1.0), nu, 1e-12));
    const double full = metric_pow(geo.cost(), 0.5);
    const double half = wasserstein_distance(geo.sample(0.0), geo.sample(0.5), 2.0);
    CHECK(std::abs(half - 0.5 * full) <= 1e-9 * std::max(1.0, full));
    CHECK_THROWS_AS(InnerGeodesic(mu, nu, 1.0), InputError);
}

TEST_CASE("outer geodesic endpoints and nested Dirac line") {
    const RandomMeasure M = RandomMeasure::dirac(DiscreteMeasure::dirac({0.0}));
    const RandomMeasure N = RandomMeasure::dirac(DiscreteMeasure::dirac({1.0}));
    const OuterGeodesic geo(M, N, 2.0);
    CHECK(approx_equal(geo.sample(0.0), M));
    CHECK(approx_equal(geo.sample(1.0), N));
    const RandomMeasure mid = geo.sample(0.5);
    REQUIRE(mid.size() == 1);
    REQUIRE(mid.component(0).size() == 1);
    CHECK(mid.component(0).atom(0)[0] == doctest::Approx(0.5));
}

TEST_CASE("outer geodesic endpoints on random instances") {
    // endpoint equality as measures: components regrouped by the outer plan
    // carry last-ulp LP weights, so the check is metric, on the squared-cost
    // scale (the square root turns 1e-16 mass noise into ~1e-8 distance)
    testutil::Rng rng(43);
    for (int trial = 0; trial < 8; ++trial) {
        const RandomMeasure M = rng.random_measure(2, 3, 3);
        const RandomMeasure N = rng.random_measure(2, 3, 3);
        const OuterGeodesic geo(M, N, 2.0);
        CHECK(nested_wasserstein(geo.sample(0.0), M, 2.0).cost <= 1e-12);
        CHECK(nested_wasserstein(geo.sample(1.0), N, 2.0).cost <= 1e-12);
    }
}

TEST_CASE("the two outer geodesic routes agree canonically") {
    testutil::Rng rng(44);
    for (int trial = 0; trial < 8; ++trial) {
        const RandomMeasure M = rng.random_measure(2, 3, 3);
        const RandomMeasure N = rng.random_measure(2, 3, 3);
        const NestedResult res = nested_wasserstein(M, N, 2.0);
        const RandomCoupling P = optimal_random_coupling(M, N, res.coupling, 2.0);
        for (double t : {0.0, 0.3, 0.8, 1.0}) {
            const RandomMeasure via_plan = outer_geodesic_from_coupling(M, N, res.coupling, 2.0, t);
            const RandomMeasure via_random = outer_geodesic_from_random_coupling(P, t);
            CHECK(approx_equal(via_plan, via_random, 0.0));  // identical construction, bitwise
        }
    }
}

TEST_CASE("midpoint splits the distance") {
    testutil::Rng rng(45);
    for (int trial = 0; trial < 8; ++trial) {
        const RandomMeasure M = rng.random_measure(1, 2, 3);
        const RandomMeasure N = rng.random_measure(1, 2, 3);
        const OuterGeodesic geo(M, N, 2.0);
        const RandomMeasure mid = geo.sample(0.5);
        const double full = metric_pow(geo.cost(), 0.5);
        const double left = nested_distance(geo.sample(0.0), mid, 2.0);
        const double right = nested_distance(mid, geo.sample(1.0), 2.0);
        CHECK(std::abs(left + right - full) <= 1e-6 * std::max(1.0, full));
    }
}
