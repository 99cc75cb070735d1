#include "nestedot/nested.hpp"

#include <cmath>

#include "nestedot/errors.hpp"
#include "nestedot/parallel.hpp"

namespace nestedot {

NestedResult nested_wasserstein(const RandomMeasure& M, const RandomMeasure& N, double p) {
    if (M.dim() != N.dim()) throw InputError("dimension mismatch");
    if (p < 1.0) throw InputError("invalid exponent");
    const int m = static_cast<int>(M.size());
    const int n = static_cast<int>(N.size());

    // inner cost matrix; entries are independent, so the parallel map is
    // schedule-free by construction
    std::vector<double> inner(static_cast<std::size_t>(m) * n, 0.0);
    parallel_for(m * n, [&](int k) {
        const int i = k / n, j = k % n;
        inner[static_cast<std::size_t>(k)] =
            wasserstein(M.component(static_cast<std::size_t>(i)), N.component(static_cast<std::size_t>(j)), p).cost;
    });

    // outer transport LP over the components with the inner-cost table
    TransportLPResult lp = solve_transport_lp(M.outer_weights(), N.outer_weights(), inner);
    NestedResult out;
    out.p = p;
    out.cost = lp.cost;
    out.coupling = OuterCoupling(m, n);
    out.coupling.inner_costs = std::move(inner);
    out.coupling.mass = std::move(lp.plan.mass);
    return out;
}

double nested_distance(const RandomMeasure& M, const RandomMeasure& N, double p) {
    return metric_pow(nested_wasserstein(M, N, p).cost, 1.0 / p);
}

RandomCoupling optimal_random_coupling(const RandomMeasure& M, const RandomMeasure& N,
                                       const OuterCoupling& Pi, double p) {
    if (Pi.rows != static_cast<int>(M.size()) || Pi.cols != static_cast<int>(N.size()))
        throw InputError("marginal mismatch: outer coupling shape");
    // feasibility of the outer plan against the outer weights
    {
        Coupling as_plan;
        as_plan.rows = Pi.rows;
        as_plan.cols = Pi.cols;
        as_plan.mass = Pi.mass;
        validate_coupling(as_plan, M.outer_weights(), N.outer_weights());
    }
    RandomCoupling P;
    P.p = p;
    P.source_components = M.components();
    P.target_components = N.components();
    for (int i = 0; i < Pi.rows; ++i) {
        for (int j = 0; j < Pi.cols; ++j) {
            const double w = Pi.mass_at(i, j);
            if (w <= 0.0) continue;  // sparse: no plan for zero outer mass
            RandomCoupling::Entry e;
            e.i = i;
            e.j = j;
            e.weight = w;
            e.plan = wasserstein(M.component(static_cast<std::size_t>(i)),
                                 N.component(static_cast<std::size_t>(j)), p)
                         .coupling;
            P.plans.push_back(std::move(e));
        }
    }
    return P;
}

double random_coupling_cost(const RandomCoupling& P) {
    double total = 0.0;
    for (const auto& e : P.plans) {
        const auto& mu = P.source_components[static_cast<std::size_t>(e.i)];
        const auto& nu = P.target_components[static_cast<std::size_t>(e.j)];
        double inner = 0.0;
        for (int i = 0; i < e.plan.rows; ++i)
            for (int j = 0; j < e.plan.cols; ++j) {
                const double f = e.plan.at(i, j);
                if (f > 0.0)
                    inner += f * metric_pow(dist2(mu.atom(static_cast<std::size_t>(i)),
                                                  nu.atom(static_cast<std::size_t>(j))), P.p);
            }
        total += e.weight * inner;
    }
    return total;
}

std::pair<RandomMeasure, RandomMeasure> random_coupling_marginals(const RandomCoupling& P) {
    if (P.plans.empty()) throw InputError("marginal mismatch: empty random coupling");
    std::vector<DiscreteMeasure> first, second;
    std::vector<double> weights;
    for (const auto& e : P.plans) {
        const auto& mu = P.source_components[static_cast<std::size_t>(e.i)];
        const auto& nu = P.target_components[static_cast<std::size_t>(e.j)];
        // feasibility of the inner plan is exactly the statement that its
        // pushed marginals are the stored pair measures
        validate_coupling(e.plan, mu.weights(), nu.weights());
        first.push_back(mu);
        second.push_back(nu);
        weights.push_back(e.weight);
    }
    RandomMeasure M0(std::move(first), weights);
    RandomMeasure M1(std::move(second), weights);
    return {canonicalized(M0), canonicalized(M1)};
}

}  // namespace nestedot
