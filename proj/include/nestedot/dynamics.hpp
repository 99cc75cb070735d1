#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nestedot/fields.hpp"
#include "nestedot/measures.hpp"

namespace nestedot {

/// Uniform time grid on [t0, t1] with steps+1 nodes.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    int steps = 1;

    double h() const { return (t1 - t0) / static_cast<double>(steps); }
    int node_count() const { return steps + 1; }
    double node(int k) const { return t0 + h() * static_cast<double>(k); }

    void validate() const;
};

/// One N-particle trajectory: a state per grid node.
struct ParticlePath {
    TimeGrid grid;
    std::vector<ParticleConfiguration> states;
};

/// Weighted, seeded collection of particle paths on a shared grid — the
/// discrete stand-in for a law over random trajectories.
struct TrajectoryEnsemble {
    std::uint64_t seed = 0;
    TimeGrid grid;
    int dim = 0;
    std::vector<ParticlePath> paths;
    std::vector<double> path_weights;
};

enum class Scheme { euler, rk4 };

/// Advances all particles simultaneously under the mean-field coupling
/// v(t, x_i, x) = b(t, x_i, empirical(x)); rk4 re-evaluates the empirical
/// measure at every internal stage.
ParticlePath integrate_particles(const ParticleConfiguration& config0, const NonLocalField& b,
                                 const TimeGrid& grid, Scheme scheme);

/// Integrates each initial configuration independently; weights carried over.
TrajectoryEnsemble evolve_ensemble(const std::vector<std::pair<double, ParticleConfiguration>>& initial,
                                   const NonLocalField& b, const TimeGrid& grid, Scheme scheme,
                                   std::uint64_t seed = 0);

/// Empirical random measure at a grid node: one component per path.
RandomMeasure ensemble_to_random_measure(const TrajectoryEnsemble& ens, int node);

/// Discrete kinetic speed at an interior node via central differences:
/// ( sum_paths w sum_i (1/N) |(x_i(k+1) - x_i(k-1)) / 2h|^p )^{1/p}.
double ensemble_speed(const TrajectoryEnsemble& ens, int node, double p);

}  // namespace nestedot
