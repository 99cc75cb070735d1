#pragma once

#include <utility>
#include <vector>

#include "nestedot/measures.hpp"
#include "nestedot/transport.hpp"

namespace nestedot {

/// Outer transport plan between two random measures, together with the
/// matrix of inner costs W_p^p(mu_i, nu_j) it was solved against.
struct OuterCoupling {
    int rows = 0;
    int cols = 0;
    std::vector<double> mass;         // row-major
    std::vector<double> inner_costs;  // row-major

    OuterCoupling() = default;
    OuterCoupling(int r, int c)
        : rows(r), cols(c), mass(static_cast<std::size_t>(r) * c, 0.0),
          inner_costs(static_cast<std::size_t>(r) * c, 0.0) {}

    double& mass_at(int i, int j) { return mass[static_cast<std::size_t>(i) * cols + j]; }
    double mass_at(int i, int j) const { return mass[static_cast<std::size_t>(i) * cols + j]; }
    double& cost_at(int i, int j) { return inner_costs[static_cast<std::size_t>(i) * cols + j]; }
    double cost_at(int i, int j) const { return inner_costs[static_cast<std::size_t>(i) * cols + j]; }
};

/// Law over inner transport plans with prescribed nested marginals: one
/// optimal inner coupling per outer pair carrying mass. Keeps the pair
/// measures so the plans can be pushed to their marginals.
struct RandomCoupling {
    struct Entry {
        int i = 0;  // component index in source
        int j = 0;  // component index in target
        double weight = 0.0;
        Coupling plan;
    };

    std::vector<DiscreteMeasure> source_components;
    std::vector<DiscreteMeasure> target_components;
    std::vector<Entry> plans;
    double p = 2.0;

    std::vector<double> outer_weights() const {
        std::vector<double> w;
        w.reserve(plans.size());
        for (const auto& e : plans) w.push_back(e.weight);
        return w;
    }
};

struct NestedResult {
    double cost = 0.0;  // value of the nested W_p^p
    OuterCoupling coupling;
    double p = 2.0;
};

/// Wasserstein-on-Wasserstein distance: inner costs W_p^p(mu_i, nu_j) from
/// the exact OT solver, then the outer transport LP over the components.
NestedResult nested_wasserstein(const RandomMeasure& M, const RandomMeasure& N, double p);

/// p-th root of the nested cost.
double nested_distance(const RandomMeasure& M, const RandomMeasure& N, double p);

/// Attaches one optimal inner coupling to every outer pair carrying mass,
/// realizing the selection of an optimal random coupling from an optimal
/// outer plan. Pairs with zero outer mass get no plan.
RandomCoupling optimal_random_coupling(const RandomMeasure& M, const RandomMeasure& N,
                                       const OuterCoupling& Pi, double p);

/// Nested transport cost of a random coupling: sum_e w_e * <plan_e, cost_e>.
double random_coupling_cost(const RandomCoupling& P);

/// Pushes every inner plan to its two marginals and aggregates identical
/// marginal measures; recovers (M, N) up to component consolidation.
std::pair<RandomMeasure, RandomMeasure> random_coupling_marginals(const RandomCoupling& P);

}  // namespace nestedot
