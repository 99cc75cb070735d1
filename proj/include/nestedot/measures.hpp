#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nestedot/types.hpp"

namespace nestedot {

/// Finitely supported probability measure on R^d: sum_a w_a * delta_{x_a}.
///
/// Atoms need not be distinct (mass may split across duplicates). The
/// constructor renormalizes weights when |sum(w) - 1| <= 1e-9 and rejects
/// otherwise; individual weights must be >= 0.
class DiscreteMeasure {
public:
    DiscreteMeasure(int dim, std::vector<Point> atoms, std::vector<double> weights);

    int dim() const { return dim_; }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Point>& atoms() const { return atoms_; }
    const std::vector<double>& weights() const { return weights_; }
    const Point& atom(std::size_t k) const { return atoms_[k]; }
    double weight(std::size_t k) const { return weights_[k]; }

    static DiscreteMeasure dirac(Point x);

private:
    int dim_;
    std::vector<Point> atoms_;
    std::vector<double> weights_;
};

/// Finitely supported probability measure whose atoms are DiscreteMeasures:
/// M = sum_i W_i * delta_{mu_i}. All components share the ambient dimension.
class RandomMeasure {
public:
    RandomMeasure(std::vector<DiscreteMeasure> components, std::vector<double> outer_weights);

    int dim() const { return dim_; }
    std::size_t size() const { return components_.size(); }
    const std::vector<DiscreteMeasure>& components() const { return components_; }
    const std::vector<double>& outer_weights() const { return outer_weights_; }
    const DiscreteMeasure& component(std::size_t i) const { return components_[i]; }
    double outer_weight(std::size_t i) const { return outer_weights_[i]; }

    static RandomMeasure dirac(DiscreteMeasure mu);

private:
    int dim_;
    std::vector<DiscreteMeasure> components_;
    std::vector<double> outer_weights_;
};

/// Ordered N-particle state (x_1, ..., x_N) in (R^d)^N.
struct ParticleConfiguration {
    int dim = 0;
    std::vector<Point> points;

    std::size_t particle_count() const { return points.size(); }
};

/// Uniform empirical measure of a configuration: (1/N) sum_i delta_{x_i}.
/// Duplicate points are retained as separate atoms.
DiscreteMeasure empirical_map(const ParticleConfiguration& config);

/// Mean measure of M: atom k of component i carries outer_w[i] * w[i][k].
/// With consolidate = true, exactly-equal atoms are merged.
DiscreteMeasure barycenter(const RandomMeasure& m, bool consolidate = false);

using PointMap = std::function<Point(const Point&)>;

/// Image of a single measure under a point map (atoms mapped, weights kept).
DiscreteMeasure map_atoms(const DiscreteMeasure& mu, const PointMap& f, int out_dim);

/// Two-level push-forward f_## of a random measure: every component's atoms
/// are mapped through f; weights are unchanged at both levels.
RandomMeasure pushforward(const RandomMeasure& m, const PointMap& f, int out_dim);

/// p-th moment about an anchor point: sum_k w_k * |x_k - anchor|^p, p >= 1.
double p_moment(const DiscreteMeasure& mu, double p, const Point& anchor);

/// Canonical form for comparisons: atoms sorted lexicographically, ties
/// broken by weight. Duplicates are kept.
DiscreteMeasure canonicalized(const DiscreteMeasure& mu);

/// Canonical form with exactly-equal atoms merged (bitwise coordinate
/// equality; no epsilon merging).
DiscreteMeasure consolidated(const DiscreteMeasure& mu);

/// Components consolidated and sorted; identical components merged by
/// summing outer weights.
RandomMeasure canonicalized(const RandomMeasure& m);

/// Equality of canonical forms: atoms exactly, weights within tol.
bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol = 1e-12);
bool approx_equal(const RandomMeasure& a, const RandomMeasure& b, double tol = 1e-12);

/// Exact multiset equality of (atom, weight) pairs after consolidation.
bool exactly_equal(const DiscreteMeasure& a, const DiscreteMeasure& b);

}  // namespace nestedot
