#pragma once

#include "nestedot/nested.hpp"

namespace nestedot {

/// Displacement interpolation of an optimal plan: one atom
/// (1-t)x_i + t y_j per nonzero plan entry, weight = mass[i][j]. No merging
/// at interior t; endpoint comparisons consolidate explicitly.
DiscreteMeasure inner_geodesic(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p,
                               const Coupling& plan, double t);

/// Outer geodesic from an optimal random coupling: every inner plan is
/// displaced, outer weights preserved. Constant-speed in the nested metric.
RandomMeasure outer_geodesic_from_random_coupling(const RandomCoupling& P, double t);

/// Outer geodesic from an optimal outer plan; each pair carries the optimal
/// inner plan, so this agrees canonically with the random-coupling route.
RandomMeasure outer_geodesic_from_coupling(const RandomMeasure& M, const RandomMeasure& N,
                                           const OuterCoupling& Pi, double p, double t);

/// Geodesic between two discrete measures; holds the endpoints and an
/// optimal plan and samples at any t in [0, 1].
class InnerGeodesic {
public:
    InnerGeodesic(DiscreteMeasure mu, DiscreteMeasure nu, double p);

    DiscreteMeasure sample(double t) const { return inner_geodesic(mu_, nu_, p_, plan_, t); }
    const Coupling& plan() const { return plan_; }
    double cost() const { return cost_; }  // W_p^p of the endpoints

private:
    DiscreteMeasure mu_;
    DiscreteMeasure nu_;
    double p_;
    Coupling plan_;
    double cost_;
};

/// Two-level geodesic curve between random measures; holds the optimal
/// random coupling and samples at any t in [0, 1].
class OuterGeodesic {
public:
    OuterGeodesic(const RandomMeasure& M, const RandomMeasure& N, double p);

    RandomMeasure sample(double t) const { return outer_geodesic_from_random_coupling(plan_, t); }
    const RandomCoupling& plan() const { return plan_; }
    double cost() const { return cost_; }  // nested W_p^p of the endpoints

private:
    RandomCoupling plan_;
    double cost_;
};

}  // namespace nestedot
