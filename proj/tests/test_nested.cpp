#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nestedot/errors.hpp"
#include "nestedot/nested.hpp"

using namespace nestedot;

TEST_CASE("single nested Diracs") {
    const RandomMeasure M = RandomMeasure::dirac(DiscreteMeasure::dirac({0.0}));
    const RandomMeasure N = RandomMeasure::dirac(DiscreteMeasure::dirac({1.0}));
    CHECK(nested_distance(M, N, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("identical random measures have zero distance") {
    testutil::Rng rng(31);
    const RandomMeasure M = rng.random_measure(2, 3, 4);
    CHECK(nested_wasserstein(M, M, 2.0).cost <= 1e-9);
}

TEST_CASE("diagonal outer plan wins when cross costs dominate") {
    // components at mutual inner distance 1 on the diagonal, 2 off-diagonal
    const RandomMeasure M({DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({10.0})}, {0.5, 0.5});
    const RandomMeasure N({DiscreteMeasure::dirac({1.0}), DiscreteMeasure::dirac({11.0})}, {0.5, 0.5});
    const NestedResult res = nested_wasserstein(M, N, 2.0);
    CHECK(res.cost == doctest::Approx(1.0));
    CHECK(res.coupling.mass_at(0, 0) == doctest::Approx(0.5));
    CHECK(res.coupling.mass_at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("two-level consistency with the flat distance") {
    testutil::Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = rng.uniform_int(1, 3);
        const DiscreteMeasure mu = rng.measure(dim, 4);
        const DiscreteMeasure nu = rng.measure(dim, 4);
        const double flat = wasserstein(mu, nu, 2.0).cost;
        const double nested = nested_wasserstein(RandomMeasure::dirac(mu), RandomMeasure::dirac(nu), 2.0).cost;
        CHECK(std::abs(flat - nested) <= 1e-9);
    }
}

TEST_CASE("barycenter contraction bound") {
    testutil::Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = rng.uniform_int(1, 2);
        const RandomMeasure M = rng.random_measure(dim, 3, 3);
        const RandomMeasure N = rng.random_measure(dim, 3, 3);
        const double nested = nested_distance(M, N, 2.0);
        const double flat = wasserstein_distance(barycenter(M), barycenter(N), 2.0);
        CHECK(nested >= flat - 1e-9);
    }
}

TEST_CASE("optimal random coupling realizes the nested cost") {
    testutil::Rng rng(34);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = rng.uniform_int(1, 3);
        const RandomMeasure M = rng.random_measure(dim, 3, 4);
        const RandomMeasure N = rng.random_measure(dim, 3, 4);
        const NestedResult res = nested_wasserstein(M, N, 2.0);
        const RandomCoupling P = optimal_random_coupling(M, N, res.coupling, 2.0);
        CHECK(std::abs(res.cost - random_coupling_cost(P)) <= 1e-9);
        for (const auto& e : P.plans) CHECK(e.weight > 0.0);
    }
}

TEST_CASE("unit diagonal costs against cross costs of four") {
    // diagonal inner costs 1, cross costs 4: the diagonal outer plan is
    // optimal and the nested squared distance is 1
    const RandomMeasure M({DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({3.0})}, {0.5, 0.5});
    const RandomMeasure N({DiscreteMeasure::dirac({1.0}), DiscreteMeasure::dirac({2.0})}, {0.5, 0.5});
    const NestedResult res = nested_wasserstein(M, N, 2.0);
    CHECK(res.coupling.cost_at(0, 0) == doctest::Approx(1.0));
    CHECK(res.coupling.cost_at(1, 1) == doctest::Approx(1.0));
    CHECK(res.coupling.cost_at(0, 1) == doctest::Approx(4.0));
    CHECK(res.coupling.cost_at(1, 0) == doctest::Approx(4.0));
    CHECK(res.cost == doctest::Approx(1.0));
    CHECK(res.coupling.mass_at(0, 0) == doctest::Approx(0.5));
    CHECK(res.coupling.mass_at(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("diagonal plan on identical measures has zero-cost inner plans") {
    testutil::Rng rng(38);
    const RandomMeasure M = rng.random_measure(2, 3, 3);
    const NestedResult res = nested_wasserstein(M, M, 2.0);
    const RandomCoupling P = optimal_random_coupling(M, M, res.coupling, 2.0);
    CHECK(random_coupling_cost(P) <= 1e-9);
}

TEST_CASE("inner cost assembly is schedule independent") {
    testutil::Rng rng(39);
    const RandomMeasure M = rng.random_measure(2, 3, 4);
    const RandomMeasure N = rng.random_measure(2, 3, 4);
    setenv("NESTED_OT_THREADS", "1", 1);
    const NestedResult serial = nested_wasserstein(M, N, 2.0);
    setenv("NESTED_OT_THREADS", "4", 1);
    const NestedResult threaded = nested_wasserstein(M, N, 2.0);
    unsetenv("NESTED_OT_THREADS");
    CHECK(serial.cost == threaded.cost);
    CHECK(serial.coupling.mass == threaded.coupling.mass);
    CHECK(serial.coupling.inner_costs == threaded.coupling.inner_costs);
}

TEST_CASE("single-pair outer plan gives one inner plan") {
    const DiscreteMeasure mu(1, {{0.0}, {1.0}}, {0.5, 0.5});
    const DiscreteMeasure nu(1, {{2.0}}, {1.0});
    const RandomMeasure M = RandomMeasure::dirac(mu);
    const RandomMeasure N = RandomMeasure::dirac(nu);
    const NestedResult res = nested_wasserstein(M, N, 2.0);
    const RandomCoupling P = optimal_random_coupling(M, N, res.coupling, 2.0);
    REQUIRE(P.plans.size() == 1);
    CHECK(P.plans[0].weight == doctest::Approx(1.0));
}

TEST_CASE("infeasible outer plan is rejected") {
    testutil::Rng rng(35);
    const RandomMeasure M = rng.random_measure(1, 2, 2);
    const RandomMeasure N = rng.random_measure(1, 2, 2);
    OuterCoupling bogus(static_cast<int>(M.size()), static_cast<int>(N.size()));
    bogus.mass_at(0, 0) = 1.0;  // marginals cannot match generic weights
    if (M.size() > 1 || N.size() > 1) {
        CHECK_THROWS_WITH_AS(optimal_random_coupling(M, N, bogus, 2.0),
                             doctest::Contains("marginal mismatch"), InputError);
    }
}

TEST_CASE("marginals of a dirac plan") {
    const RandomMeasure M = RandomMeasure::dirac(DiscreteMeasure::dirac({0.0}));
    const RandomMeasure N = RandomMeasure::dirac(DiscreteMeasure::dirac({1.0}));
    const NestedResult res = nested_wasserstein(M, N, 2.0);
    const RandomCoupling P = optimal_random_coupling(M, N, res.coupling, 2.0);
    const auto [m0, m1] = random_coupling_marginals(P);
    CHECK(approx_equal(m0, M));
    CHECK(approx_equal(m1, N));
}

TEST_CASE("marginals round-trip on random instances") {
    testutil::Rng rng(36);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = rng.uniform_int(1, 2);
        const RandomMeasure M = rng.random_measure(dim, 3, 3);
        const RandomMeasure N = rng.random_measure(dim, 3, 3);
        const NestedResult res = nested_wasserstein(M, N, 2.0);
        const RandomCoupling P = optimal_random_coupling(M, N, res.coupling, 2.0);
        const auto [m0, m1] = random_coupling_marginals(P);
        CHECK(approx_equal(m0, M, 1e-12));
        CHECK(approx_equal(m1, N, 1e-12));
    }
}

TEST_CASE("nested metric axioms") {
    testutil::Rng rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const RandomMeasure M = rng.random_measure(2, 2, 3);
        const RandomMeasure N = rng.random_measure(2, 2, 3);
        const RandomMeasure R = rng.random_measure(2, 2, 3);
        const double mn = nested_distance(M, N, 2.0);
        CHECK(std::abs(mn - nested_distance(N, M, 2.0)) <= 1e-9);
        CHECK(nested_distance(M, R, 2.0) <= mn + nested_distance(N, R, 2.0) + 1e-9);
    }
}
