#include "nestedot/dynamics.hpp"

#include <cmath>
#include <string>

#include "nestedot/errors.hpp"

namespace nestedot {

void TimeGrid::validate() const {
    if (!(t0 < t1)) throw InputError("time grid needs t0 < t1");
    if (steps < 1) throw InputError("time grid needs at least one step");
}

namespace {

// velocity of every particle under the frozen configuration
std::vector<Point> field_on_configuration(const NonLocalField& b, double t,
                                          const ParticleConfiguration& config) {
    const DiscreteMeasure mu = empirical_map(config);
    std::vector<Point> v(config.points.size());
    for (std::size_t i = 0; i < config.points.size(); ++i) v[i] = b.eval(t, config.points[i], mu);
    return v;
}

ParticleConfiguration shifted(const ParticleConfiguration& x, double s, const std::vector<Point>& v) {
    ParticleConfiguration y = x;
    for (std::size_t i = 0; i < y.points.size(); ++i) axpy(s, v[i], y.points[i]);
    return y;
}

void check_finite(const ParticleConfiguration& x, double t) {
    for (const Point& pt : x.points)
        for (double c : pt)
            if (!std::isfinite(c)) throw InputError("integration blow-up at t=" + std::to_string(t));
}

}  // namespace

ParticlePath integrate_particles(const ParticleConfiguration& config0, const NonLocalField& b,
                                 const TimeGrid& grid, Scheme scheme) {
    grid.validate();
    if (config0.points.empty()) throw InputError("empty configuration");
    ParticlePath path;
    path.grid = grid;
    path.states.reserve(static_cast<std::size_t>(grid.node_count()));
    path.states.push_back(config0);
    const double h = grid.h();
    for (int k = 0; k < grid.steps; ++k) {
        const double t = grid.node(k);
        const ParticleConfiguration& x = path.states.back();
        ParticleConfiguration next = x;
        if (scheme == Scheme::euler) {
            const auto v = field_on_configuration(b, t, x);
            next = shifted(x, h, v);
        } else {
            const auto k1 = field_on_configuration(b, t, x);
            const auto k2 = field_on_configuration(b, t + 0.5 * h, shifted(x, 0.5 * h, k1));
            const auto k3 = field_on_configuration(b, t + 0.5 * h, shifted(x, 0.5 * h, k2));
            const auto k4 = field_on_configuration(b, t + h, shifted(x, h, k3));
            for (std::size_t i = 0; i < next.points.size(); ++i) {
                Point incr = k1[i];
                axpy(2.0, k2[i], incr);
                axpy(2.0, k3[i], incr);
                axpy(1.0, k4[i], incr);
                axpy(h / 6.0, incr, next.points[i]);
            }
        }
        check_finite(next, t + h);
        path.states.push_back(std::move(next));
    }
    return path;
}

TrajectoryEnsemble evolve_ensemble(const std::vector<std::pair<double, ParticleConfiguration>>& initial,
                                   const NonLocalField& b, const TimeGrid& grid, Scheme scheme,
                                   std::uint64_t seed) {
    grid.validate();
    if (initial.empty()) throw InputError("empty ensemble");
    TrajectoryEnsemble ens;
    ens.seed = seed;
    ens.grid = grid;
    ens.dim = initial.front().second.dim;
    double total = 0.0;
    for (const auto& [w, config] : initial) {
        if (w < 0.0) throw InputError("negative weight");
        if (config.dim != ens.dim) throw InputError("dimension mismatch");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError("weights do not sum to 1");
    const bool renormalize = std::abs(total - 1.0) > 1e-12;
    for (std::size_t pi = 0; pi < initial.size(); ++pi) {
        try {
            ens.paths.push_back(integrate_particles(initial[pi].second, b, grid, scheme));
        } catch (const InputError& e) {
            throw InputError("path " + std::to_string(pi) + ": " + e.what());
        }
        ens.path_weights.push_back(renormalize ? initial[pi].first / total : initial[pi].first);
    }
    return ens;
}

RandomMeasure ensemble_to_random_measure(const TrajectoryEnsemble& ens, int node) {
    if (node < 0 || node >= ens.grid.node_count()) throw InputError("node index out of range");
    std::vector<DiscreteMeasure> comps;
    comps.reserve(ens.paths.size());
    for (const auto& path : ens.paths) comps.push_back(empirical_map(path.states[static_cast<std::size_t>(node)]));
    return RandomMeasure(std::move(comps), ens.path_weights);
}

double ensemble_speed(const TrajectoryEnsemble& ens, int node, double p) {
    if (node <= 0 || node >= ens.grid.steps) throw InputError("interior node required");
    if (p < 1.0) throw InputError("invalid exponent");
    const double inv2h = 1.0 / (2.0 * ens.grid.h());
    double total = 0.0;
    for (std::size_t pi = 0; pi < ens.paths.size(); ++pi) {
        const auto& prev = ens.paths[pi].states[static_cast<std::size_t>(node - 1)];
        const auto& next = ens.paths[pi].states[static_cast<std::size_t>(node + 1)];
        const double invN = 1.0 / static_cast<double>(prev.points.size());
        double s = 0.0;
        for (std::size_t i = 0; i < prev.points.size(); ++i) {
            const Point v = inv2h * (next.points[i] - prev.points[i]);
            s += invN * metric_pow(norm2(v), p);
        }
        total += ens.path_weights[pi] * s;
    }
    return metric_pow(total, 1.0 / p);
}

}  // namespace nestedot
