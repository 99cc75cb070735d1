#pragma once

#include "nestedot/cylinder.hpp"
#include "nestedot/dynamics.hpp"
#include "nestedot/geodesics.hpp"

namespace nestedot {

/// Residuals of a duality identity at the interior grid nodes, plus an order
/// estimate from a grid refinement. Time derivatives are always central
/// differences at interior nodes, so the target order is 2. The order field
/// is meaningless when the residuals vanish identically (e.g. a zero field).
struct ResidualReport {
    std::vector<double> per_node;  // interior nodes 1 .. steps-1
    double max_abs = 0.0;
    double order = 0.0;
};

/// Residual of the continuity equation on random measures in duality with a
/// cylinder function: central difference of t -> int F dM_t against the
/// exact pairing sum of b with the Wasserstein gradient. Re-integrates the
/// node-0 states at doubled resolution (rk4) for the order estimate.
ResidualReport cerm_residual(const TrajectoryEnsemble& ens, const NonLocalField& b,
                             const CylinderFunction& F);

/// Residual of the inner non-local continuity equation along one path's
/// empirical curve, tested against a single test function.
ResidualReport ce_inner_residual(const ParticlePath& path, const NonLocalField& b,
                                 const TestFunction& phi);

/// Max over particles and interior nodes of |central-difference velocity -
/// b(t, x_i, empirical(state))|; O(h^2) for paths generated by b.
double sps_residual(const ParticlePath& path, const NonLocalField& b);

struct BenamouBrenierReport {
    double action = 0.0;          // time-integrated p-energy of the line transport
    double distance_p = 0.0;      // nested W_p^p of the endpoints
    double gap = 0.0;             // action - distance_p
    double sampled_action = 0.0;  // sum over the grid of dt * (fd speed)^p
};

/// Benamou-Brenier identity on the constructed minimizer: mass moves on
/// straight lines at constant speed along the optimal random coupling, so
/// the action equals the nested W_p^p. The sampled action re-measures the
/// same quantity through the geodesic path: finite-difference speeds over a
/// grid of time_steps intervals, each requiring a fresh nested solve.
BenamouBrenierReport benamou_brenier_check(const RandomMeasure& M0, const RandomMeasure& M1, double p,
                                           int time_steps);

struct GronwallReport {
    std::vector<double> times;
    std::vector<double> distances;  // W_p(mu_t^a, mu_t^b) per node
    std::vector<double> bounds;     // e^{L t} W_0 (1 + 10h) per node
    double initial_distance = 0.0;
};

/// Integrates the two weighted characteristic flows, computes W_p on every
/// node (fresh OT solve per node) and checks the Gronwall envelope
/// W(t) <= e^{L t} W(0) (1 + 10h); identical initial measures must stay
/// within 1e-9. Throws ToleranceError("Gronwall violation ...") on breach.
GronwallReport gronwall_uniqueness_check(const NonLocalField& b, const DiscreteMeasure& mu0_a,
                                         const DiscreteMeasure& mu0_b, const TimeGrid& grid, double p,
                                         double lipschitz_bound, Scheme scheme = Scheme::rk4);

/// Characteristic flow of one measure: atoms follow b under the frozen
/// weighted empirical measure. Building block of the Gronwall check.
std::vector<DiscreteMeasure> integrate_measure_flow(const NonLocalField& b, const DiscreteMeasure& mu0,
                                                    const TimeGrid& grid, Scheme scheme);

}  // namespace nestedot
