#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nestedot/errors.hpp"
#include "nestedot/transport.hpp"

using namespace nestedot;

TEST_CASE("two Diracs at distance one") {
    const OTResult res = wasserstein(DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0}), 2.0);
    CHECK(res.cost == doctest::Approx(1.0));
    CHECK(res.coupling.at(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("identity of indiscernibles") {
    testutil::Rng rng(21);
    for (double p : {1.0, 2.0, 3.0}) {
        const DiscreteMeasure mu = rng.measure(2, 5);
        const OTResult res = wasserstein(mu, mu, p);
        CHECK(res.cost <= 1e-9);
        validate_coupling(res.coupling, mu.weights(), mu.weights());
    }
}

TEST_CASE("split mass onto one target atom") {
    const DiscreteMeasure mu(1, {{0.0}, {2.0}}, {0.5, 0.5});
    const DiscreteMeasure nu = DiscreteMeasure::dirac({1.0});
    CHECK(wasserstein(mu, nu, 2.0).cost == doctest::Approx(1.0));
}

TEST_CASE("input validation") {
    const DiscreteMeasure mu = DiscreteMeasure::dirac({0.0});
    const DiscreteMeasure nu2 = DiscreteMeasure::dirac({0.0, 0.0});
    CHECK_THROWS_WITH_AS(wasserstein(mu, nu2, 2.0), doctest::Contains("dimension mismatch"), InputError);
    CHECK_THROWS_WITH_AS(wasserstein(mu, mu, 0.5), doctest::Contains("invalid exponent"), InputError);
}

TEST_CASE("zero-weight atoms come back as zero rows") {
    const DiscreteMeasure mu(1, {{0.0}, {5.0}}, {1.0, 0.0});
    const DiscreteMeasure nu(1, {{1.0}}, {1.0});
    const OTResult res = wasserstein(mu, nu, 2.0);
    CHECK(res.cost == doctest::Approx(1.0));
    CHECK(res.coupling.rows == 2);
    CHECK(res.coupling.at(1, 0) == 0.0);
    validate_coupling(res.coupling, mu.weights(), nu.weights());
}

TEST_CASE("oracle: identity matching between separated uniform pairs") {
    const DiscreteMeasure mu(1, {{0.0}, {1.0}}, {0.5, 0.5});
    const DiscreteMeasure nu(1, {{10.0}, {11.0}}, {0.5, 0.5});
    CHECK(brute_force_wasserstein(mu, nu, 1.0) == doctest::Approx(10.0));
    CHECK(brute_force_wasserstein(mu, mu, 2.0) == doctest::Approx(0.0));
}

TEST_CASE("oracle size limit") {
    testutil::Rng rng(22);
    std::vector<Point> atoms;
    std::vector<double> weights;
    for (int i = 0; i < 6; ++i) {
        atoms.push_back(rng.point(1));
        weights.push_back(i + 1.0);
    }
    double total = 21.0;
    for (auto& w : weights) w /= total;
    const DiscreteMeasure big(1, atoms, weights);
    CHECK_THROWS_WITH_AS(brute_force_wasserstein(big, big, 2.0), doctest::Contains("oracle size limit"),
                         InputError);
}

TEST_CASE("solver equals oracle on random tiny instances") {
    testutil::Rng rng(23);
    for (int trial = 0; trial < 60; ++trial) {
        const int dim = rng.uniform_int(1, 3);
        const double p = (trial % 3) + 1.0;
        const DiscreteMeasure mu = rng.measure(dim, 5);
        const DiscreteMeasure nu = rng.measure(dim, 5);
        const double exact = wasserstein(mu, nu, p).cost;
        CHECK(std::abs(exact - brute_force_wasserstein(mu, nu, p)) <= 1e-9);
    }
}

TEST_CASE("metric axioms on random batches") {
    testutil::Rng rng(24);
    for (double p : {1.0, 2.0}) {
        for (int trial = 0; trial < 25; ++trial) {
            const DiscreteMeasure mu = rng.measure(2, 6);
            const DiscreteMeasure nu = rng.measure(2, 6);
            const DiscreteMeasure rho = rng.measure(2, 6);
            const double ab = wasserstein_distance(mu, nu, p);
            const double ba = wasserstein_distance(nu, mu, p);
            const double ac = wasserstein_distance(mu, rho, p);
            const double cb = wasserstein_distance(rho, nu, p);
            CHECK(std::abs(ab - ba) <= 1e-9);
            CHECK(ab <= ac + cb + 1e-9);
            CHECK(wasserstein_distance(mu, mu, p) <= 1e-9);
        }
    }
}

TEST_CASE("W_1 <= W_2 by Jensen") {
    testutil::Rng rng(25);
    for (int trial = 0; trial < 25; ++trial) {
        const DiscreteMeasure mu = rng.measure(2, 5);
        const DiscreteMeasure nu = rng.measure(2, 5);
        CHECK(wasserstein_distance(mu, nu, 1.0) <= wasserstein_distance(mu, nu, 2.0) + 1e-9);
    }
}

TEST_CASE("feasibility of returned couplings") {
    testutil::Rng rng(26);
    for (int trial = 0; trial < 30; ++trial) {
        const DiscreteMeasure mu = rng.measure(3, 6);
        const DiscreteMeasure nu = rng.measure(3, 6);
        const OTResult res = wasserstein(mu, nu, 2.0);
        validate_coupling(res.coupling, mu.weights(), nu.weights());
        double recomputed = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            for (std::size_t j = 0; j < nu.size(); ++j)
                recomputed += res.coupling.at(static_cast<int>(i), static_cast<int>(j)) *
                              metric_pow(dist2(mu.atom(i), nu.atom(j)), 2.0);
        CHECK(std::abs(recomputed - res.cost) <= 1e-9);
    }
}

TEST_CASE("kantorovich gap certifies optimality and flags perturbations") {
    const OTResult trivial = wasserstein(DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0}), 2.0);
    CHECK(kantorovich_gap(trivial, DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0})) <= 1e-12);

    testutil::Rng rng(27);
    for (int trial = 0; trial < 20; ++trial) {
        const DiscreteMeasure mu = rng.measure(2, 4);
        const DiscreteMeasure nu = rng.measure(2, 4);
        OTResult res = wasserstein(mu, nu, 2.0);
        CHECK(kantorovich_gap(res, mu, nu) <= 1e-9);

        if (mu.size() >= 2 && nu.size() >= 2) {
            // shift mass around a cycle: stays feasible, breaks slackness
            const double eps = 0.01 * std::min({mu.weight(0), mu.weight(1), nu.weight(0), nu.weight(1)});
            OTResult perturbed = res;
            perturbed.coupling.at(0, 0) += eps;
            perturbed.coupling.at(0, 1) -= eps;
            perturbed.coupling.at(1, 0) -= eps;
            perturbed.coupling.at(1, 1) += eps;
            bool feasible = true;
            for (double m : perturbed.coupling.mass)
                if (m < 0.0) feasible = false;
            if (feasible) CHECK(kantorovich_gap(perturbed, mu, nu) > 1e-9);
        }
    }
}

TEST_CASE("missing duals raise no-certificate") {
    OTResult res = wasserstein(DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0}), 2.0);
    res.has_duals = false;
    CHECK_THROWS_WITH_AS(kantorovich_gap(res, DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0})),
                         doctest::Contains("no certificate"), InputError);
}

TEST_CASE("degenerate instances: tied costs, duplicate atoms, dyadic weights") {
    SUBCASE("integer grid with uniform weights ties almost every pivot") {
        std::vector<Point> grid_atoms;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) grid_atoms.push_back({double(x), double(y)});
        const DiscreteMeasure mu(2, grid_atoms, std::vector<double>(4, 0.25));
        std::vector<Point> shifted = grid_atoms;
        for (auto& a : shifted) a[0] += 1.0;
        const DiscreteMeasure nu(2, shifted, std::vector<double>(4, 0.25));
        for (double p : {1.0, 2.0}) {
            const double exact = wasserstein(mu, nu, p).cost;
            CHECK(std::abs(exact - brute_force_wasserstein(mu, nu, p)) <= 1e-9);
        }
    }
    SUBCASE("mass split across duplicated atoms") {
        const DiscreteMeasure mu(1, {{0.0}, {0.0}, {1.0}}, {0.25, 0.25, 0.5});
        const DiscreteMeasure nu(1, {{1.0}, {0.0}}, {0.5, 0.5});
        const OTResult res = wasserstein(mu, nu, 2.0);
        CHECK(res.cost == doctest::Approx(0.0).epsilon(1e-12));
        validate_coupling(res.coupling, mu.weights(), nu.weights());
    }
    SUBCASE("dyadic weights with collinear atoms and p = 1") {
        // p = 1 on a line makes many optimal plans; cost must still be exact
        const DiscreteMeasure mu(1, {{0.0}, {1.0}, {2.0}, {3.0}}, {0.125, 0.375, 0.25, 0.25});
        const DiscreteMeasure nu(1, {{0.5}, {1.5}, {2.5}}, {0.5, 0.25, 0.25});
        const double exact = wasserstein(mu, nu, 1.0).cost;
        CHECK(std::abs(exact - brute_force_wasserstein(mu, nu, 1.0)) <= 1e-12);
    }
    SUBCASE("random clustered instances with exact ties") {
        testutil::Rng rng(29);
        for (int trial = 0; trial < 60; ++trial) {
            // atoms snapped to a half-integer lattice force repeated distances
            const int dim = rng.uniform_int(1, 2);
            const int m = rng.uniform_int(1, 5), n = rng.uniform_int(1, 5);
            std::vector<Point> xs, ys;
            std::vector<double> a(static_cast<std::size_t>(m), 1.0 / m), b(static_cast<std::size_t>(n), 1.0 / n);
            for (int i = 0; i < m; ++i) {
                Point v(static_cast<std::size_t>(dim));
                for (auto& c : v) c = 0.5 * rng.uniform_int(-3, 3);
                xs.push_back(std::move(v));
            }
            for (int j = 0; j < n; ++j) {
                Point v(static_cast<std::size_t>(dim));
                for (auto& c : v) c = 0.5 * rng.uniform_int(-3, 3);
                ys.push_back(std::move(v));
            }
            const DiscreteMeasure mu(dim, xs, a);
            const DiscreteMeasure nu(dim, ys, b);
            const double p = (trial % 2) ? 1.0 : 2.0;
            const double exact = wasserstein(mu, nu, p).cost;
            CHECK(std::abs(exact - brute_force_wasserstein(mu, nu, p)) <= 1e-9);
            CHECK(kantorovich_gap(wasserstein(mu, nu, p), mu, nu) <= 1e-9);
        }
    }
}

TEST_CASE("heavily degenerate lattice instance terminates and certifies") {
    // 16 atoms on a 4x4 unit lattice against its own translate: almost all
    // reduced costs tie, driving long degenerate pivot streaks
    std::vector<Point> xs, ys;
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y) {
            xs.push_back({double(x), double(y)});
            ys.push_back({double(x) + 1.0, double(y)});
        }
    const DiscreteMeasure mu(2, xs, std::vector<double>(16, 1.0 / 16));
    const DiscreteMeasure nu(2, ys, std::vector<double>(16, 1.0 / 16));
    for (double p : {1.0, 2.0}) {
        const OTResult res = wasserstein(mu, nu, p);
        CHECK(res.cost == doctest::Approx(1.0));  // shift every atom right by one
        CHECK(kantorovich_gap(res, mu, nu) <= 1e-9);
        validate_coupling(res.coupling, mu.weights(), nu.weights());
    }
}

TEST_CASE("larger supports stay exact against the permutation oracle") {
    // 8x8 uniform instances run through the permutation oracle (40320 cases)
    testutil::Rng rng(30);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Point> xs, ys;
        for (int i = 0; i < 8; ++i) {
            xs.push_back(rng.point(3));
            ys.push_back(rng.point(3));
        }
        const DiscreteMeasure mu(3, xs, std::vector<double>(8, 0.125));
        const DiscreteMeasure nu(3, ys, std::vector<double>(8, 0.125));
        const double exact = wasserstein(mu, nu, 2.0).cost;
        CHECK(std::abs(exact - brute_force_wasserstein(mu, nu, 2.0)) <= 1e-9);
    }
}

TEST_CASE("generic transport LP agrees with its brute-force enumeration") {
    testutil::Rng rng(28);
    for (int trial = 0; trial < 40; ++trial) {
        const int m = rng.uniform_int(1, 5);
        const int n = rng.uniform_int(1, 5);
        std::vector<double> a(m), b(n), cost(static_cast<std::size_t>(m) * n);
        double ta = 0.0, tb = 0.0;
        for (auto& x : a) { x = rng.uniform(0.05, 1.0); ta += x; }
        for (auto& x : b) { x = rng.uniform(0.05, 1.0); tb += x; }
        for (auto& x : a) x /= ta;
        for (auto& x : b) x /= tb;
        for (auto& x : cost) x = rng.uniform(0.0, 3.0);
        const TransportLPResult lp = solve_transport_lp(a, b, cost);
        CHECK(std::abs(lp.cost - brute_force_transport_lp(a, b, cost)) <= 1e-9);
    }
}
