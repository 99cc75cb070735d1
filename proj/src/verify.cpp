#include "nestedot/verify.hpp"

#include <cmath>
#include <string>

#include "nestedot/errors.hpp"

namespace nestedot {

namespace {

// integral of F against the ensemble's random measure at a node
double cylinder_integral(const TrajectoryEnsemble& ens, const CylinderFunction& F, int node) {
    double s = 0.0;
    for (std::size_t pi = 0; pi < ens.paths.size(); ++pi) {
        const DiscreteMeasure mu = empirical_map(ens.paths[pi].states[static_cast<std::size_t>(node)]);
        s += ens.path_weights[pi] * F.value(mu);
    }
    return s;
}

// exact pairing sum_i W_i sum_a w_a <b, grad_W F> at a node
double cerm_rhs(const TrajectoryEnsemble& ens, const NonLocalField& b, const CylinderFunction& F,
                int node) {
    const double t = ens.grid.node(node);
    double s = 0.0;
    for (std::size_t pi = 0; pi < ens.paths.size(); ++pi) {
        const DiscreteMeasure mu = empirical_map(ens.paths[pi].states[static_cast<std::size_t>(node)]);
        double inner = 0.0;
        for (std::size_t a = 0; a < mu.size(); ++a)
            inner += mu.weight(a) * dot(b.eval(t, mu.atom(a), mu), F.wgrad(mu.atom(a), mu));
        s += ens.path_weights[pi] * inner;
    }
    return s;
}

std::vector<double> cerm_residual_nodes(const TrajectoryEnsemble& ens, const NonLocalField& b,
                                        const CylinderFunction& F) {
    const double inv2h = 1.0 / (2.0 * ens.grid.h());
    std::vector<double> res;
    res.reserve(static_cast<std::size_t>(ens.grid.steps - 1));
    for (int k = 1; k < ens.grid.steps; ++k) {
        const double lhs = (cylinder_integral(ens, F, k + 1) - cylinder_integral(ens, F, k - 1)) * inv2h;
        res.push_back(lhs - cerm_rhs(ens, b, F, k));
    }
    return res;
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

TrajectoryEnsemble refine_ensemble(const TrajectoryEnsemble& ens, const NonLocalField& b) {
    std::vector<std::pair<double, ParticleConfiguration>> initial;
    for (std::size_t pi = 0; pi < ens.paths.size(); ++pi)
        initial.emplace_back(ens.path_weights[pi], ens.paths[pi].states.front());
    TimeGrid fine = ens.grid;
    fine.steps *= 2;
    return evolve_ensemble(initial, b, fine, Scheme::rk4, ens.seed);
}

}  // namespace

ResidualReport cerm_residual(const TrajectoryEnsemble& ens, const NonLocalField& b,
                             const CylinderFunction& F) {
    if (ens.grid.steps < 4) throw InputError("insufficient resolution");
    ResidualReport report;
    report.per_node = cerm_residual_nodes(ens, b, F);
    report.max_abs = max_abs(report.per_node);
    const TrajectoryEnsemble fine = refine_ensemble(ens, b);
    const double fine_max = max_abs(cerm_residual_nodes(fine, b, F));
    report.order = (report.max_abs > 0.0 && fine_max > 0.0) ? std::log2(report.max_abs / fine_max) : 0.0;
    return report;
}

namespace {

double phi_integral(const ParticlePath& path, const TestFunction& phi, int node) {
    const DiscreteMeasure mu = empirical_map(path.states[static_cast<std::size_t>(node)]);
    double s = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a) s += mu.weight(a) * phi.value(mu.atom(a));
    return s;
}

std::vector<double> ce_residual_nodes(const ParticlePath& path, const NonLocalField& b,
                                      const TestFunction& phi) {
    const double inv2h = 1.0 / (2.0 * path.grid.h());
    std::vector<double> res;
    res.reserve(static_cast<std::size_t>(path.grid.steps - 1));
    for (int k = 1; k < path.grid.steps; ++k) {
        const double lhs = (phi_integral(path, phi, k + 1) - phi_integral(path, phi, k - 1)) * inv2h;
        const DiscreteMeasure mu = empirical_map(path.states[static_cast<std::size_t>(k)]);
        const double t = path.grid.node(k);
        double rhs = 0.0;
        for (std::size_t a = 0; a < mu.size(); ++a)
            rhs += mu.weight(a) * dot(b.eval(t, mu.atom(a), mu), phi.gradient(mu.atom(a)));
        res.push_back(lhs - rhs);
    }
    return res;
}

}  // namespace

ResidualReport ce_inner_residual(const ParticlePath& path, const NonLocalField& b,
                                 const TestFunction& phi) {
    if (path.grid.steps < 4) throw InputError("insufficient resolution");
    ResidualReport report;
    report.per_node = ce_residual_nodes(path, b, phi);
    report.max_abs = max_abs(report.per_node);
    const ParticlePath fine = [&] {
        TimeGrid g = path.grid;
        g.steps *= 2;
        return integrate_particles(path.states.front(), b, g, Scheme::rk4);
    }();
    const double fine_max = max_abs(ce_residual_nodes(fine, b, phi));
    report.order = (report.max_abs > 0.0 && fine_max > 0.0) ? std::log2(report.max_abs / fine_max) : 0.0;
    return report;
}

double sps_residual(const ParticlePath& path, const NonLocalField& b) {
    if (path.grid.steps < 2) throw InputError("interior node required");
    const double inv2h = 1.0 / (2.0 * path.grid.h());
    double worst = 0.0;
    for (int k = 1; k < path.grid.steps; ++k) {
        const auto& prev = path.states[static_cast<std::size_t>(k - 1)];
        const auto& cur = path.states[static_cast<std::size_t>(k)];
        const auto& next = path.states[static_cast<std::size_t>(k + 1)];
        const DiscreteMeasure mu = empirical_map(cur);
        const double t = path.grid.node(k);
        for (std::size_t i = 0; i < cur.points.size(); ++i) {
            const Point v = inv2h * (next.points[i] - prev.points[i]);
            worst = std::max(worst, norm2(v - b.eval(t, cur.points[i], mu)));
        }
    }
    return worst;
}

BenamouBrenierReport benamou_brenier_check(const RandomMeasure& M0, const RandomMeasure& M1, double p,
                                           int time_steps) {
    if (p <= 1.0) throw InputError("invalid exponent: Benamou-Brenier needs p > 1");
    if (time_steps < 1) throw InputError("time grid needs at least one step");
    const NestedResult res = nested_wasserstein(M0, M1, p);
    const RandomCoupling P = optimal_random_coupling(M0, M1, res.coupling, p);

    // each mass element moves on a straight line at constant speed |x - y|,
    // so its time-integrated p-energy is exactly |x - y|^p
    const double action_exact = random_coupling_cost(P);

    // independent re-measurement through the geodesic path: the speed of the
    // sampled curve is recovered from fresh nested solves between nodes
    const double dt = 1.0 / static_cast<double>(time_steps);
    double action_sampled = 0.0;
    RandomMeasure prev = outer_geodesic_from_random_coupling(P, 0.0);
    for (int k = 1; k <= time_steps; ++k) {
        const RandomMeasure cur = outer_geodesic_from_random_coupling(P, dt * static_cast<double>(k));
        const double speed = nested_distance(prev, cur, p) / dt;
        action_sampled += dt * metric_pow(speed, p);
        prev = cur;
    }

    BenamouBrenierReport report;
    report.action = action_exact;
    report.distance_p = res.cost;
    report.gap = action_exact - res.cost;
    report.sampled_action = action_sampled;
    return report;
}

std::vector<DiscreteMeasure> integrate_measure_flow(const NonLocalField& b, const DiscreteMeasure& mu0,
                                                    const TimeGrid& grid, Scheme scheme) {
    grid.validate();
    // atoms flow as characteristics of the frozen weighted empirical measure
    const auto frozen = [&](const std::vector<Point>& atoms) {
        return DiscreteMeasure(mu0.dim(), atoms, mu0.weights());
    };
    const auto velocity = [&](double t, const std::vector<Point>& atoms) {
        const DiscreteMeasure mu = frozen(atoms);
        std::vector<Point> v(atoms.size());
        for (std::size_t a = 0; a < atoms.size(); ++a) v[a] = b.eval(t, atoms[a], mu);
        return v;
    };
    const auto shift = [](const std::vector<Point>& x, double s, const std::vector<Point>& v) {
        std::vector<Point> y = x;
        for (std::size_t a = 0; a < y.size(); ++a) axpy(s, v[a], y[a]);
        return y;
    };
    std::vector<DiscreteMeasure> out;
    out.reserve(static_cast<std::size_t>(grid.node_count()));
    std::vector<Point> atoms = mu0.atoms();
    out.push_back(frozen(atoms));
    const double h = grid.h();
    for (int k = 0; k < grid.steps; ++k) {
        const double t = grid.node(k);
        if (scheme == Scheme::euler) {
            atoms = shift(atoms, h, velocity(t, atoms));
        } else {
            const auto k1 = velocity(t, atoms);
            const auto k2 = velocity(t + 0.5 * h, shift(atoms, 0.5 * h, k1));
            const auto k3 = velocity(t + 0.5 * h, shift(atoms, 0.5 * h, k2));
            const auto k4 = velocity(t + h, shift(atoms, h, k3));
            for (std::size_t a = 0; a < atoms.size(); ++a) {
                Point incr = k1[a];
                axpy(2.0, k2[a], incr);
                axpy(2.0, k3[a], incr);
                axpy(1.0, k4[a], incr);
                axpy(h / 6.0, incr, atoms[a]);
            }
        }
        for (const Point& pt : atoms)
            for (double c : pt)
                if (!std::isfinite(c))
                    throw InputError("integration blow-up at t=" + std::to_string(t + h));
        out.push_back(frozen(atoms));
    }
    return out;
}

GronwallReport gronwall_uniqueness_check(const NonLocalField& b, const DiscreteMeasure& mu0_a,
                                         const DiscreteMeasure& mu0_b, const TimeGrid& grid, double p,
                                         double lipschitz_bound, Scheme scheme) {
    if (mu0_a.dim() != mu0_b.dim()) throw InputError("dimension mismatch");
    const auto flow_a = integrate_measure_flow(b, mu0_a, grid, scheme);
    const auto flow_b = integrate_measure_flow(b, mu0_b, grid, scheme);
    const bool identical_start = exactly_equal(mu0_a, mu0_b);

    GronwallReport report;
    report.initial_distance = wasserstein_distance(mu0_a, mu0_b, p);
    const double h = grid.h();
    const double slack = 1.0 + 10.0 * h;
    for (int k = 0; k < grid.node_count(); ++k) {
        const double t = grid.node(k) - grid.t0;
        // fresh OT solve per node, matching the time-t optimal plan
        const double w = wasserstein_distance(flow_a[static_cast<std::size_t>(k)],
                                              flow_b[static_cast<std::size_t>(k)], p);
        const double bound = std::exp(lipschitz_bound * t) * report.initial_distance * slack;
        report.times.push_back(grid.node(k));
        report.distances.push_back(w);
        report.bounds.push_back(bound);
        if (identical_start) {
            if (w > 1e-9)
                throw ToleranceError("Gronwall violation at node " + std::to_string(k) +
                                     ": identical initials separated");
        } else if (w > bound) {
            throw ToleranceError("Gronwall violation at node " + std::to_string(k));
        }
    }
    return report;
}

}  // namespace nestedot
