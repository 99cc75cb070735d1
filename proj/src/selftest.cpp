#include "nestedot/selftest.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "nestedot/errors.hpp"
#include "nestedot/json_io.hpp"
#include "nestedot/verify.hpp"

namespace nestedot {

namespace {

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }
    int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g); }
};

DiscreteMeasure random_discrete(Rng& rng, int dim, int max_atoms, bool uniform_weights = false) {
    const int n = rng.uniform_int(1, max_atoms);
    std::vector<Point> atoms(static_cast<std::size_t>(n));
    std::vector<double> weights(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        Point x(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) x[static_cast<std::size_t>(c)] = rng.uniform(-2.0, 2.0);
        atoms[static_cast<std::size_t>(k)] = std::move(x);
        weights[static_cast<std::size_t>(k)] = uniform_weights ? 1.0 / n : rng.uniform(0.05, 1.0);
    }
    if (!uniform_weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        for (double& w : weights) w /= total;
    }
    return DiscreteMeasure(dim, std::move(atoms), std::move(weights));
}

RandomMeasure random_random_measure(Rng& rng, int dim, int max_outer, int max_inner) {
    const int m = rng.uniform_int(1, max_outer);
    std::vector<DiscreteMeasure> comps;
    std::vector<double> weights;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        comps.push_back(random_discrete(rng, dim, max_inner));
        weights.push_back(rng.uniform(0.05, 1.0));
        total += weights.back();
    }
    for (double& w : weights) w /= total;
    return RandomMeasure(std::move(comps), std::move(weights));
}

CylinderFunction random_cylinder(Rng& rng, int dim, int max_k) {
    const int k = rng.uniform_int(1, max_k);
    std::vector<TestFunction> phis;
    for (int i = 0; i < k; ++i) {
        Point c(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d) c[static_cast<std::size_t>(d)] = rng.uniform(-1.0, 1.0);
        phis.push_back(TestFunction::gaussian_bump(std::move(c), rng.uniform(0.6, 1.5)));
    }
    std::map<Polynomial::MultiIndex, double> coeffs;
    // a few random monomials of total degree <= 2, plus a linear part
    for (int i = 0; i < k; ++i) {
        Polynomial::MultiIndex mi(static_cast<std::size_t>(k), 0);
        mi[static_cast<std::size_t>(i)] = 1;
        coeffs[mi] = rng.uniform(-1.0, 1.0);
    }
    for (int tries = 0; tries < 2; ++tries) {
        Polynomial::MultiIndex mi(static_cast<std::size_t>(k), 0);
        mi[static_cast<std::size_t>(rng.uniform_int(0, k - 1))] += 1;
        mi[static_cast<std::size_t>(rng.uniform_int(0, k - 1))] += 1;
        coeffs[mi] = rng.uniform(-0.8, 0.8);
    }
    return CylinderFunction(std::move(phis), Polynomial(k, std::move(coeffs)));
}

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
    std::ostringstream os;
    os << std::setprecision(3) << x;
    return os.str();
}

// ---- criterion bodies ---------------------------------------------------

CriterionResult criterion_ot_oracle() {
    CriterionResult r{1, "ot-oracle-equivalence", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250801);
    double worst = 0.0;
    const double ps[3] = {1.0, 2.0, 3.0};
    for (int i = 0; i < 200; ++i) {
        const int dim = rng.uniform_int(1, 3);
        const double p = ps[i % 3];
        const bool uniform = (i % 4 == 0);
        DiscreteMeasure mu = random_discrete(rng, dim, 5, uniform);
        DiscreteMeasure nu = uniform ? random_discrete(rng, dim, static_cast<int>(mu.size()), true)
                                     : random_discrete(rng, dim, 5);
        if (uniform && nu.size() != mu.size()) {
            // permutation oracle wants equal sizes; regenerate exactly
            std::vector<Point> atoms(mu.size());
            for (auto& x : atoms) {
                x.assign(static_cast<std::size_t>(dim), 0.0);
                for (int c = 0; c < dim; ++c) x[static_cast<std::size_t>(c)] = rng.uniform(-2.0, 2.0);
            }
            nu = DiscreteMeasure(dim, std::move(atoms),
                                 std::vector<double>(mu.size(), 1.0 / static_cast<double>(mu.size())));
        }
        const double exact = wasserstein(mu, nu, p).cost;
        const double oracle = brute_force_wasserstein(mu, nu, p);
        worst = std::max(worst, std::abs(exact - oracle));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst <= 1e-9 && r.seconds < 10.0;
    r.detail = "200 instances, worst |cost - oracle| = " + fmt(worst);
    return r;
}

std::vector<std::pair<RandomMeasure, RandomMeasure>> nested_instances(int count) {
    Rng rng(20250802);
    std::vector<std::pair<RandomMeasure, RandomMeasure>> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int dim = rng.uniform_int(1, 3);
        out.emplace_back(random_random_measure(rng, dim, 3, 4), random_random_measure(rng, dim, 3, 4));
    }
    return out;
}

CriterionResult criterion_nested_oracle() {
    CriterionResult r{2, "nested-ot-oracle-equivalence", true, "", 0.0};
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& [M, N] : nested_instances(50)) {
        const NestedResult res = nested_wasserstein(M, N, 2.0);
        // exhaustive outer-polytope enumeration against the inner LP oracle
        const double oracle = brute_force_transport_lp(M.outer_weights(), N.outer_weights(),
                                                       res.coupling.inner_costs);
        worst = std::max(worst, std::abs(res.cost - oracle));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst <= 1e-9 && r.seconds < 30.0;
    r.detail = "50 instances, worst |cost - enumeration| = " + fmt(worst);
    return r;
}

CriterionResult criterion_random_coupling_identity() {
    CriterionResult r{3, "optimal-random-coupling-identity", true, "", 0.0};
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& [M, N] : nested_instances(50)) {
        const NestedResult res = nested_wasserstein(M, N, 2.0);
        const RandomCoupling P = optimal_random_coupling(M, N, res.coupling, 2.0);
        worst = std::max(worst, std::abs(res.cost - random_coupling_cost(P)));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst <= 1e-9;
    r.detail = "50 instances, worst identity defect = " + fmt(worst);
    return r;
}

CriterionResult criterion_metric_axioms() {
    CriterionResult r{4, "nested-metric-axioms", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250804);
    double worst_sym = 0.0, worst_tri = 0.0, worst_self = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int dim = rng.uniform_int(1, 2);
        const RandomMeasure M = random_random_measure(rng, dim, 2, 3);
        const RandomMeasure N = random_random_measure(rng, dim, 2, 3);
        const RandomMeasure R = random_random_measure(rng, dim, 2, 3);
        const double mn = nested_distance(M, N, 2.0);
        const double nm = nested_distance(N, M, 2.0);
        const double mr = nested_distance(M, R, 2.0);
        const double nr = nested_distance(N, R, 2.0);
        worst_sym = std::max(worst_sym, std::abs(mn - nm));
        worst_tri = std::max(worst_tri, mr - (mn + nr));
        worst_self = std::max(worst_self, nested_distance(M, M, 2.0));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst_sym <= 1e-9 && worst_tri <= 1e-9 && worst_self <= 1e-9;
    r.detail = "100 triples, sym " + fmt(worst_sym) + ", triangle " + fmt(worst_tri) + ", self " + fmt(worst_self);
    return r;
}

CriterionResult criterion_geodesic_constant_speed() {
    CriterionResult r{5, "geodesic-constant-speed", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250805);
    double worst = 0.0;
    const double ts[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (int i = 0; i < 20; ++i) {
        const int dim = rng.uniform_int(1, 2);
        const RandomMeasure M = random_random_measure(rng, dim, 3, 3);
        const RandomMeasure N = random_random_measure(rng, dim, 3, 3);
        const OuterGeodesic geo(M, N, 2.0);
        const double full = metric_pow(geo.cost(), 0.5);
        RandomMeasure samples[5] = {geo.sample(ts[0]), geo.sample(ts[1]), geo.sample(ts[2]),
                                    geo.sample(ts[3]), geo.sample(ts[4])};
        for (int a = 0; a < 5; ++a) {
            for (int b = a + 1; b < 5; ++b) {
                const double d = nested_distance(samples[a], samples[b], 2.0);
                worst = std::max(worst, std::abs(d - (ts[b] - ts[a]) * full) / std::max(1.0, full));
            }
        }
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst <= 1e-6;
    r.detail = "20 instances x 10 pairs, worst relative speed defect = " + fmt(worst);
    return r;
}

CriterionResult criterion_benamou_brenier() {
    CriterionResult r{6, "benamou-brenier-gap", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250806);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int dim = rng.uniform_int(1, 3);
        const RandomMeasure M = random_random_measure(rng, dim, 4, 4);
        const RandomMeasure N = random_random_measure(rng, dim, 4, 4);
        const BenamouBrenierReport report = benamou_brenier_check(M, N, 2.0, 8);
        worst = std::max(worst, std::abs(report.gap) / std::max(1.0, report.distance_p));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst <= 1e-8;
    r.detail = "50 instances, worst relative gap = " + fmt(worst);
    return r;
}

// finite-difference oracle for the Wasserstein gradient: nested central
// differences of F((1-eps) mu + eps delta_x) in eps, then in x
Point fd_wasserstein_gradient(const CylinderFunction& F, const Point& x, const DiscreteMeasure& mu) {
    const double eps = 1e-4;  // mixing step
    const double hx = 1e-5;   // spatial step
    const std::vector<double> L = F.lvalues(mu);
    const auto mixing_derivative = [&](const Point& y) {
        std::vector<double> lp(L.size()), lm(L.size());
        for (std::size_t i = 0; i < L.size(); ++i) {
            const double phi = F.phis()[i].value(y);
            lp[i] = (1.0 - eps) * L[i] + eps * phi;
            lm[i] = (1.0 + eps) * L[i] - eps * phi;
        }
        return (F.psi().value(lp) - F.psi().value(lm)) / (2.0 * eps);
    };
    Point g(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) {
        Point xp = x, xm = x;
        xp[c] += hx;
        xm[c] -= hx;
        g[c] = (mixing_derivative(xp) - mixing_derivative(xm)) / (2.0 * hx);
    }
    return g;
}

CriterionResult criterion_gradient_and_chain_rule() {
    CriterionResult r{7, "wasserstein-gradient-fd-and-chain-rule", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250807);
    double worst_fd = 0.0, worst_chain = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int dim = rng.uniform_int(1, 3);
        const CylinderFunction F = random_cylinder(rng, dim, 2);
        const DiscreteMeasure mu = random_discrete(rng, dim, 4);
        Point x(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) x[static_cast<std::size_t>(c)] = rng.uniform(-1.5, 1.5);
        const Point exact = F.wgrad(x, mu);
        const Point fd = fd_wasserstein_gradient(F, x, mu);
        worst_fd = std::max(worst_fd, norm2(exact - fd));

        Mat A(dim, dim);
        Point shift(static_cast<std::size_t>(dim));
        for (int a = 0; a < dim; ++a) {
            shift[static_cast<std::size_t>(a)] = rng.uniform(-0.5, 0.5);
            for (int b = 0; b < dim; ++b) A(a, b) = rng.uniform(-1.0, 1.0);
        }
        const auto vfield = [&](const Point& y) { return matvec(A, y) + shift; };
        worst_chain = std::max(worst_chain, chain_rule_check(F, mu, vfield));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst_fd <= 1e-5 && worst_chain <= 1e-10;
    r.detail = "100 triples, worst fd gap " + fmt(worst_fd) + ", worst chain-rule gap " + fmt(worst_chain);
    return r;
}

CriterionResult criterion_cerm_order() {
    CriterionResult r{8, "cerm-residual-order", true, "", 0.0};
    const auto start = Clock::now();
    std::vector<std::pair<double, ParticleConfiguration>> initial = {
        {0.5, {2, {{0.4, -0.3}, {-0.8, 0.6}, {1.1, 0.2}}}},
        {0.3, {2, {{-0.5, -0.9}, {0.7, 0.8}}}},
        {0.2, {2, {{1.4, -0.2}, {-0.3, 0.3}, {0.2, 1.0}, {-1.1, -0.6}}}},
    };
    Mat A(2, 2);
    A(0, 0) = -0.5; A(0, 1) = 0.2; A(1, 0) = -0.1; A(1, 1) = -0.3;
    const NonLocalField fields[2] = {NonLocalField::to_barycenter(0.8), NonLocalField::linear(A)};
    const CylinderFunction F(
        {TestFunction::gaussian_bump({0.2, -0.1}, 0.9), TestFunction::gaussian_bump({-0.5, 0.4}, 1.2)},
        Polynomial(2, {{{2, 0}, 1.0}, {{1, 1}, 0.5}, {{0, 1}, 0.7}}));
    double worst_order_low = 10.0, worst_order_high = 0.0, max_fine = 0.0;
    for (const auto& field : fields) {
        double maxima[3];
        const int steps[3] = {256, 512, 1024};
        for (int k = 0; k < 3; ++k) {
            const TimeGrid grid{0.0, 1.0, steps[k]};
            const TrajectoryEnsemble ens = evolve_ensemble(initial, field, grid, Scheme::rk4, 7);
            maxima[k] = cerm_residual(ens, field, F).max_abs;
        }
        for (int k = 0; k + 1 < 3; ++k) {
            const double order = std::log2(maxima[k] / maxima[k + 1]);
            worst_order_low = std::min(worst_order_low, order);
            worst_order_high = std::max(worst_order_high, order);
        }
        max_fine = std::max(max_fine, maxima[2]);
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst_order_low >= 1.8 && worst_order_high <= 2.2 && max_fine <= 1e-4;
    r.detail = "orders in [" + fmt(worst_order_low) + ", " + fmt(worst_order_high) +
               "], residual at 1024 steps = " + fmt(max_fine);
    return r;
}

CriterionResult criterion_rk4_order() {
    CriterionResult r{9, "rk4-convergence-order", true, "", 0.0};
    const auto start = Clock::now();
    Mat A(1, 1);
    A(0, 0) = -1.0;
    const NonLocalField decay = NonLocalField::linear(A);
    const ParticleConfiguration x0{1, {{1.0}}};
    const double exact = std::exp(-1.0);
    double errs[2];
    const int steps[2] = {32, 64};
    for (int k = 0; k < 2; ++k) {
        const ParticlePath path = integrate_particles(x0, decay, TimeGrid{0.0, 1.0, steps[k]}, Scheme::rk4);
        errs[k] = std::abs(path.states.back().points[0][0] - exact);
    }
    const double ratio = errs[0] / errs[1];
    r.seconds = elapsed_seconds(start);
    r.pass = ratio >= 12.0 && ratio <= 20.0;
    r.detail = "error ratio h vs h/2 = " + fmt(ratio);
    return r;
}

NonLocalField mixed_field(int which) {
    Mat A(2, 2);
    A(0, 0) = -0.4; A(0, 1) = 0.3; A(1, 0) = -0.2; A(1, 1) = -0.5;
    Mat I(2, 2);
    I(0, 0) = -1.0; I(1, 1) = -1.0;
    switch (which % 5) {
        case 0: return NonLocalField::to_barycenter(0.7);
        case 1: return NonLocalField::linear(A);
        case 2: return NonLocalField::sum({NonLocalField::linear(A), NonLocalField::to_barycenter(0.4)});
        case 3: return NonLocalField::convolution_gaussian_grad(1.0, 0.5);
        default: return NonLocalField::time_scaled({0.5, 0.4}, NonLocalField::linear(I));
    }
}

CriterionResult criterion_metric_speed() {
    CriterionResult r{10, "metric-speed-inequality", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250810);
    double worst = -1e9;
    for (int e = 0; e < 10; ++e) {
        const NonLocalField field = mixed_field(e);
        std::vector<std::pair<double, ParticleConfiguration>> initial;
        const int paths = rng.uniform_int(2, 3);
        double total = 0.0;
        for (int pi = 0; pi < paths; ++pi) {
            ParticleConfiguration config;
            config.dim = 2;
            const int N = rng.uniform_int(2, 4);
            for (int i = 0; i < N; ++i)
                config.points.push_back({rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5)});
            const double w = rng.uniform(0.2, 1.0);
            initial.emplace_back(w, std::move(config));
            total += w;
        }
        for (auto& [w, c] : initial) w /= total;
        const TimeGrid grid{0.0, 1.0, 128};
        const TrajectoryEnsemble ens = evolve_ensemble(initial, field, grid, Scheme::rk4, 11 + static_cast<std::uint64_t>(e));
        const double h = grid.h();
        for (int k = 1; k < grid.steps; ++k) {
            const RandomMeasure before = ensemble_to_random_measure(ens, k - 1);
            const RandomMeasure after = ensemble_to_random_measure(ens, k + 1);
            const double fd_speed = nested_distance(before, after, 2.0) / (2.0 * h);
            const double field_norm =
                lp_norm_against(field, ensemble_to_random_measure(ens, k), grid.node(k), 2.0);
            worst = std::max(worst, fd_speed - field_norm - 0.05 * h - 1e-9);
        }
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst <= 0.0;
    r.detail = "10 ensembles, worst slack excess = " + fmt(worst);
    return r;
}

CriterionResult criterion_gronwall() {
    CriterionResult r{11, "gronwall-contraction", true, "", 0.0};
    const auto start = Clock::now();
    Mat I2(2, 2);
    I2(0, 0) = -1.0; I2(1, 1) = -1.0;
    const NonLocalField field = NonLocalField::linear(I2);
    const DiscreteMeasure a(2, {{0.9, -0.4}, {-0.6, 0.8}, {0.3, 0.2}}, {0.5, 0.3, 0.2});
    const DiscreteMeasure b(2, {{-0.2, 1.1}, {0.7, -0.9}}, {0.6, 0.4});
    const TimeGrid grid{0.0, 1.0, 1024};
    double worst_rel = 0.0;
    bool ok = true;
    std::string detail;
    try {
        const GronwallReport report = gronwall_uniqueness_check(field, a, b, grid, 2.0, 1.0);
        for (std::size_t k = 0; k < report.distances.size(); ++k) {
            const double expected = std::exp(-(report.times[k])) * report.initial_distance;
            worst_rel = std::max(worst_rel, std::abs(report.distances[k] - expected) / expected);
        }
        // identical initials must coincide along the whole flow
        (void)gronwall_uniqueness_check(field, a, a, grid, 2.0, 1.0);
        detail = "worst relative defect vs e^{-t} = " + fmt(worst_rel);
        ok = worst_rel <= 1e-3;
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    r.seconds = elapsed_seconds(start);
    r.pass = ok;
    r.detail = detail;
    return r;
}

CriterionResult criterion_tangent_projection() {
    CriterionResult r{12, "tangent-minimal-norm", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250812);
    const int dim = 2;
    const RandomMeasure M = random_random_measure(rng, dim, 3, 5);
    std::vector<CylinderFunction> basis;
    for (int i = 0; i < 5; ++i) basis.push_back(random_cylinder(rng, dim, 2));
    const auto random_samples = [&](double lo, double hi) {
        FieldSamples s(M.size());
        for (std::size_t i = 0; i < M.size(); ++i) {
            s[i].resize(M.component(i).size());
            for (auto& v : s[i]) {
                v.assign(static_cast<std::size_t>(dim), 0.0);
                for (int c = 0; c < dim; ++c) v[static_cast<std::size_t>(c)] = rng.uniform(lo, hi);
            }
        }
        return s;
    };
    const FieldSamples b = random_samples(-1.0, 1.0);
    const ProjectionResult proj = tangent_projection(b, basis, M);

    // residual must be orthogonal to every basis gradient
    FieldSamples residual = b;
    for (std::size_t i = 0; i < residual.size(); ++i)
        for (std::size_t a = 0; a < residual[i].size(); ++a)
            residual[i][a] = residual[i][a] - proj.projected[i][a];
    double worst_orth = 0.0;
    for (const auto& F : basis)
        worst_orth = std::max(worst_orth, std::abs(lifted_inner(M, residual, gradient_samples(F, M))));

    // perturbations with identical pairings never undercut the norm
    const double proj_norm = lifted_norm(M, proj.projected);
    double worst_undercut = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        FieldSamples noise = random_samples(-1.0, 1.0);
        const ProjectionResult noise_proj = tangent_projection(noise, basis, M);
        FieldSamples candidate = proj.projected;
        for (std::size_t i = 0; i < candidate.size(); ++i)
            for (std::size_t a = 0; a < candidate[i].size(); ++a)
                candidate[i][a] =
                    candidate[i][a] + (noise[i][a] - noise_proj.projected[i][a]);
        worst_undercut = std::max(worst_undercut, proj_norm - lifted_norm(M, candidate));
    }
    r.seconds = elapsed_seconds(start);
    r.pass = worst_orth <= 1e-8 && worst_undercut <= 1e-8;
    r.detail = "orthogonality " + fmt(worst_orth) + ", worst norm undercut " + fmt(worst_undercut);
    return r;
}

CriterionResult criterion_barycenter_pushforward() {
    CriterionResult r{13, "barycenter-pushforward-lemma", true, "", 0.0};
    const auto start = Clock::now();
    Rng rng(20250813);
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
        const int dim = rng.uniform_int(1, 3);
        const int out_dim = rng.uniform_int(1, 3);
        const RandomMeasure M = random_random_measure(rng, dim, 3, 4);
        Mat A(out_dim, dim);
        Point shift(static_cast<std::size_t>(out_dim));
        for (int a = 0; a < out_dim; ++a) {
            shift[static_cast<std::size_t>(a)] = rng.uniform(-1.0, 1.0);
            for (int c = 0; c < dim; ++c) A(a, c) = rng.uniform(-1.0, 1.0);
        }
        const PointMap f = [&](const Point& x) { return matvec(A, x) + shift; };
        const DiscreteMeasure lhs = barycenter(pushforward(M, f, out_dim), true);
        const DiscreteMeasure rhs = map_atoms(barycenter(M), f, out_dim);
        ok = exactly_equal(lhs, rhs);
    }
    r.seconds = elapsed_seconds(start);
    r.pass = ok;
    r.detail = "100 random (M, affine) pairs, exact canonical equality";
    return r;
}

// ---- criterion 14: CLI determinism --------------------------------------

RandomMeasure fixture_measure(int which) {
    if (which == 0) {
        return RandomMeasure({DiscreteMeasure(2, {{0.0, 0.0}, {1.0, 0.5}}, {0.25, 0.75}),
                              DiscreteMeasure(2, {{-1.0, 2.0}}, {1.0})},
                             {0.4, 0.6});
    }
    return RandomMeasure({DiscreteMeasure(2, {{0.5, -0.5}, {2.0, 1.0}, {0.0, 1.5}}, {0.2, 0.5, 0.3})},
                         {1.0});
}

bool run_command(const std::string& cmd, std::string& out, int& exit_code) {
    out.clear();
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return false;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
    const int status = pclose(pipe);
    exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return true;
}

CriterionResult criterion_cli(const std::string& cli_path) {
    CriterionResult r{14, "cli-determinism-and-round-trip", true, "", 0.0};
    const auto start = Clock::now();
    // in-process round trip: dump -> parse -> dump must be byte-identical
    // and re-pass the type invariants
    bool ok = true;
    std::string detail;
    {
        const json j = to_json(fixture_measure(0));
        const std::string once = j.dump();
        const std::string twice = to_json(random_measure_from_json(json::parse(once))).dump();
        ok = once == twice;
        if (!ok) detail = "serialization round trip not byte-identical";
    }
    if (ok) {
        Mat A(2, 2);
        A(0, 0) = -1.0; A(1, 1) = -0.5;
        const NonLocalField field = NonLocalField::sum(
            {NonLocalField::linear(A),
             NonLocalField::time_scaled({1.0, -0.2}, NonLocalField::to_barycenter(0.3))});
        const std::string once = to_json(field).dump();
        const std::string twice = to_json(field_from_json(json::parse(once))).dump();
        ok = once == twice;
        if (!ok) detail = "field round trip not byte-identical";
    }
    if (ok && !cli_path.empty()) {
        namespace fs = std::filesystem;
        const fs::path dir = fs::temp_directory_path() / ("nested-ot-accept-" + std::to_string(::getpid()));
        fs::create_directories(dir);
        const fs::path a = dir / "a.json", b = dir / "b.json";
        std::ofstream(a) << to_json(fixture_measure(0)).dump();
        std::ofstream(b) << to_json(fixture_measure(1)).dump();
        const std::string cmd = "'" + cli_path + "' dist --a '" + a.string() + "' --b '" + b.string() + "' --p 2";
        std::string out1, out2;
        int code1 = -1, code2 = -1;
        ok = run_command(cmd, out1, code1) && run_command(cmd, out2, code2) && code1 == 0 && code2 == 0 &&
             out1 == out2 && !out1.empty();
        if (!ok) detail = "repeated dist invocations differ or failed";
        if (ok) {
            // selftest must exit 0 and its stdout payload must be stable
            // across runs (wall times go to stderr)
            std::string st_out1, st_out2;
            int st_code1 = -1, st_code2 = -1;
            const std::string st = "'" + cli_path + "' selftest 2>/dev/null";
            ok = run_command(st, st_out1, st_code1) && st_code1 == 0 &&
                 run_command(st, st_out2, st_code2) && st_code2 == 0 && st_out1 == st_out2 &&
                 !st_out1.empty();
            if (!ok) detail = "cli selftest not exit 0 or reruns differ";
        }
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    r.seconds = elapsed_seconds(start);
    r.pass = ok;
    r.detail = ok ? (cli_path.empty() ? "round trips byte-identical (in-process)"
                                      : "round trips + process reruns byte-identical, selftest exit 0")
                  : detail;
    return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    std::vector<CriterionResult> results;
    results.push_back(criterion_ot_oracle());
    results.push_back(criterion_nested_oracle());
    results.push_back(criterion_random_coupling_identity());
    results.push_back(criterion_metric_axioms());
    results.push_back(criterion_geodesic_constant_speed());
    results.push_back(criterion_benamou_brenier());
    results.push_back(criterion_gradient_and_chain_rule());
    results.push_back(criterion_cerm_order());
    results.push_back(criterion_rk4_order());
    results.push_back(criterion_metric_speed());
    results.push_back(criterion_gronwall());
    results.push_back(criterion_tangent_projection());
    results.push_back(criterion_barycenter_pushforward());
    results.push_back(criterion_cli(options.cli_path));
    return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

void print_table(const std::vector<CriterionResult>& results, std::ostream& out, std::ostream* timing) {
    for (const auto& r : results) {
        out << (r.pass ? "[PASS]" : "[FAIL]") << ' ' << std::setw(2) << std::setfill('0') << r.id
            << std::setfill(' ') << ' ' << r.name << ": " << r.detail << '\n';
    }
    if (timing) {
        for (const auto& r : results)
            *timing << "criterion " << r.id << ": " << fmt(r.seconds) << " s\n";
    }
}

}  // namespace nestedot
