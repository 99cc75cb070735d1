#include "nestedot/geodesics.hpp"

#include "nestedot/errors.hpp"

namespace nestedot {

DiscreteMeasure inner_geodesic(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                               const Coupling& plan, double t) {
    if (t < 0.0 || t > 1.0) throw InputError("parameter out of range");
    if (p <= 1.0) throw InputError("invalid exponent: geodesics need p > 1");
    if (plan.rows != static_cast<int>(mu.size()) || plan.cols != static_cast<int>(nu.size()))
        throw InputError("marginal mismatch: coupling shape");
    std::vector<Point> atoms;
    std::vector<double> weights;
    for (int i = 0; i < plan.rows; ++i) {
        for (int j = 0; j < plan.cols; ++j) {
            const double w = plan.at(i, j);
            if (w <= 0.0) continue;
            Point z = (1.0 - t) * mu.atom(static_cast<std::size_t>(i));
            axpy(t, nu.atom(static_cast<std::size_t>(j)), z);
            atoms.push_back(std::move(z));
            weights.push_back(w);
        }
    }
    return DiscreteMeasure(mu.dim(), std::move(atoms), std::move(weights));
}

RandomMeasure outer_geodesic_from_random_coupling(const RandomCoupling& P, double t) {
    if (t < 0.0 || t > 1.0) throw InputError("parameter out of range");
    std::vector<DiscreteMeasure> comps;
    std::vector<double> weights;
    comps.reserve(P.plans.size());
    for (const auto& e : P.plans) {
        comps.push_back(inner_geodesic(P.source_components[static_cast<std::size_t>(e.i)],
                                       P.target_components[static_cast<std::size_t>(e.j)], P.p,
                                       e.plan, t));
        weights.push_back(e.weight);
    }
    return RandomMeasure(std::move(comps), std::move(weights));
}

RandomMeasure outer_geodesic_from_coupling(const RandomMeasure& M, const RandomMeasure& N,
                                           const OuterCoupling& Pi, double p, double t) {
    return outer_geodesic_from_random_coupling(optimal_random_coupling(M, N, Pi, p), t);
}

InnerGeodesic::InnerGeodesic(DiscreteMeasure mu, DiscreteMeasure nu, double p)
    : mu_(std::move(mu)), nu_(std::move(nu)), p_(p), cost_(0.0) {
    if (p_ <= 1.0) throw InputError("invalid exponent: geodesics need p > 1");
    OTResult res = wasserstein(mu_, nu_, p_);
    cost_ = res.cost;
    plan_ = std::move(res.coupling);
}

OuterGeodesic::OuterGeodesic(const RandomMeasure& M, const RandomMeasure& N, double p) : cost_(0.0) {
    const NestedResult res = nested_wasserstein(M, N, p);
    cost_ = res.cost;
    plan_ = optimal_random_coupling(M, N, res.coupling, p);
}

}  // namespace nestedot
