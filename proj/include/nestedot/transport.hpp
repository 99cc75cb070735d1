#pragma once

#include <vector>

#include "nestedot/measures.hpp"
#include "nestedot/types.hpp"

namespace nestedot {

/// Transport plan between two discrete measures. Row sums reproduce the
/// source weights and column sums the target weights within 1e-9.
struct Coupling {
    int rows = 0;
    int cols = 0;
    std::vector<double> mass;  // row-major, rows*cols

    Coupling() = default;
    Coupling(int r, int c) : rows(r), cols(c), mass(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int i, int j) { return mass[static_cast<std::size_t>(i) * cols + j]; }
    double at(int i, int j) const { return mass[static_cast<std::size_t>(i) * cols + j]; }

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;
};

/// Throws unless the plan's marginals match the given weights within tol.
void validate_coupling(const Coupling& plan, const std::vector<double>& source_weights,
                       const std::vector<double>& target_weights, double tol = 1e-9);

/// Result of an exact W_p solve. `cost` is W_p^p. Dual potentials are kept
/// when the solver produced them (zero-weight atoms carry no constraint and
/// their potentials are meaningless).
struct OTResult {
    double cost = 0.0;
    Coupling coupling;
    double p = 2.0;
    bool has_duals = false;
    std::vector<double> dual_u;  // per source atom
    std::vector<double> dual_v;  // per target atom
};

/// Exact solve of the transport LP min <plan, cost> over the polytope with
/// margins a, b (entries >= 0, equal totals; zero margins allowed). Dense
/// transportation simplex; duals u, v cover the positive margins.
struct TransportLPResult {
    Coupling plan;
    double cost = 0.0;
    std::vector<double> u, v;
};
TransportLPResult solve_transport_lp(const std::vector<double>& a, const std::vector<double>& b,
                                     const std::vector<double>& cost);

/// Exhaustive minimum over the basic feasible solutions of the same LP
/// (spanning-tree enumeration); requires margins of size <= 5 each.
double brute_force_transport_lp(const std::vector<double>& a, const std::vector<double>& b,
                                const std::vector<double>& cost);

/// Exact minimizer of sum_{ij} m_ij |x_i - y_j|^p over the transport
/// polytope, solved by a dense transportation simplex.
OTResult wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// W_p(mu, nu), the p-th root of the optimal cost.
double wasserstein_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Independent oracle for tests: permutation enumeration for equal-size
/// uniform measures (supports <= 8), exhaustive basic-feasible-solution
/// enumeration otherwise (supports <= 5x5). Returns the exact minimal cost
/// (the value of W_p^p).
double brute_force_wasserstein(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

/// Optimality certificate from the duals: the worst violation of dual
/// feasibility u_i + v_j <= c_ij over positive-weight atom pairs and of
/// complementary slackness |u_i + v_j - c_ij| on the support of the plan.
/// <= 1e-9 for solver output; strictly positive for perturbed plans.
double kantorovich_gap(const OTResult& result, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace nestedot
