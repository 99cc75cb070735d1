#include "nestedot/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nestedot/errors.hpp"

namespace nestedot {

namespace {

constexpr double kNormalizeTol = 1e-9;

// Renormalization is idempotent: weights already summing to 1 within 1e-12
// are kept bit-for-bit, so canonical forms survive re-construction.
void check_weights(const std::vector<double>& w, std::vector<double>& out) {
    double total = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) throw InputError("negative weight");
        total += x;
    }
    if (std::abs(total - 1.0) > kNormalizeTol) throw InputError("weights do not sum to 1");
    out = w;
    if (std::abs(total - 1.0) > 1e-12) {
        for (double& x : out) x /= total;
    }
}

bool atom_less(const Point& a, const Point& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Sorted (atom, weight) pairs; ties broken by weight.
void sorted_pairs(const DiscreteMeasure& mu, std::vector<Point>& atoms, std::vector<double>& weights) {
    std::vector<std::size_t> idx(mu.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        if (mu.atom(i) != mu.atom(j)) return atom_less(mu.atom(i), mu.atom(j));
        return mu.weight(i) < mu.weight(j);
    });
    atoms.clear();
    weights.clear();
    atoms.reserve(idx.size());
    weights.reserve(idx.size());
    for (std::size_t k : idx) {
        atoms.push_back(mu.atom(k));
        weights.push_back(mu.weight(k));
    }
}

}  // namespace

DiscreteMeasure::DiscreteMeasure(int dim, std::vector<Point> atoms, std::vector<double> weights)
    : dim_(dim), atoms_(std::move(atoms)) {
    if (dim_ <= 0) throw InputError("dimension must be positive");
    if (atoms_.empty()) throw InputError("measure needs at least one atom");
    if (atoms_.size() != weights.size()) throw InputError("atoms/weights length mismatch");
    for (const Point& x : atoms_) {
        if (static_cast<int>(x.size()) != dim_) throw InputError("atom dimension mismatch");
    }
    check_weights(weights, weights_);
}

DiscreteMeasure DiscreteMeasure::dirac(Point x) {
    const int d = static_cast<int>(x.size());
    return DiscreteMeasure(d, {std::move(x)}, {1.0});
}

RandomMeasure::RandomMeasure(std::vector<DiscreteMeasure> components, std::vector<double> outer_weights)
    : components_(std::move(components)) {
    if (components_.empty()) throw InputError("random measure needs at least one component");
    if (components_.size() != outer_weights.size()) throw InputError("components/outer_weights length mismatch");
    dim_ = components_.front().dim();
    for (const auto& mu : components_) {
        if (mu.dim() != dim_) throw InputError("component dimension mismatch");
    }
    check_weights(outer_weights, outer_weights_);
}

RandomMeasure RandomMeasure::dirac(DiscreteMeasure mu) {
    std::vector<DiscreteMeasure> comps;
    comps.push_back(std::move(mu));
    return RandomMeasure(std::move(comps), {1.0});
}

DiscreteMeasure empirical_map(const ParticleConfiguration& config) {
    if (config.points.empty()) throw InputError("empty configuration");
    const double w = 1.0 / static_cast<double>(config.points.size());
    return DiscreteMeasure(config.dim, config.points,
                           std::vector<double>(config.points.size(), w));
}

DiscreteMeasure barycenter(const RandomMeasure& m, bool consolidate) {
    std::vector<Point> atoms;
    std::vector<double> weights;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto& mu = m.component(i);
        for (std::size_t k = 0; k < mu.size(); ++k) {
            atoms.push_back(mu.atom(k));
            weights.push_back(m.outer_weight(i) * mu.weight(k));
        }
    }
    DiscreteMeasure out(m.dim(), std::move(atoms), std::move(weights));
    return consolidate ? consolidated(out) : out;
}

DiscreteMeasure map_atoms(const DiscreteMeasure& mu, const PointMap& f, int out_dim) {
    std::vector<Point> atoms;
    atoms.reserve(mu.size());
    for (const Point& x : mu.atoms()) {
        Point y;
        try {
            y = f(x);
        } catch (const std::exception& e) {
            throw InputError(std::string("map evaluation failure: ") + e.what());
        }
        if (static_cast<int>(y.size()) != out_dim) throw InputError("map evaluation failure: wrong output dimension");
        atoms.push_back(std::move(y));
    }
    return DiscreteMeasure(out_dim, std::move(atoms), mu.weights());
}

RandomMeasure pushforward(const RandomMeasure& m, const PointMap& f, int out_dim) {
    std::vector<DiscreteMeasure> comps;
    comps.reserve(m.size());
    for (const auto& mu : m.components()) comps.push_back(map_atoms(mu, f, out_dim));
    return RandomMeasure(std::move(comps), m.outer_weights());
}

double p_moment(const DiscreteMeasure& mu, double p, const Point& anchor) {
    if (p < 1.0) throw InputError("invalid exponent");
    if (static_cast<int>(anchor.size()) != mu.dim()) throw InputError("dimension mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
        s += mu.weight(k) * metric_pow(dist2(mu.atom(k), anchor), p);
    }
    return s;
}

DiscreteMeasure canonicalized(const DiscreteMeasure& mu) {
    std::vector<Point> atoms;
    std::vector<double> weights;
    sorted_pairs(mu, atoms, weights);
    return DiscreteMeasure(mu.dim(), std::move(atoms), std::move(weights));
}

DiscreteMeasure consolidated(const DiscreteMeasure& mu) {
    std::vector<Point> atoms;
    std::vector<double> weights;
    sorted_pairs(mu, atoms, weights);
    std::vector<Point> out_atoms;
    std::vector<double> out_weights;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        if (!out_atoms.empty() && out_atoms.back() == atoms[k]) {
            out_weights.back() += weights[k];
        } else {
            out_atoms.push_back(atoms[k]);
            out_weights.push_back(weights[k]);
        }
    }
    return DiscreteMeasure(mu.dim(), std::move(out_atoms), std::move(out_weights));
}

namespace {

// Lexicographic order on consolidated components: atom list first, then weights.
bool component_less(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (a.atoms() != b.atoms()) {
        return std::lexicographical_compare(a.atoms().begin(), a.atoms().end(),
                                            b.atoms().begin(), b.atoms().end(), atom_less);
    }
    return a.weights() < b.weights();
}

bool component_identical(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.atoms() == b.atoms() && a.weights() == b.weights();
}

}  // namespace

RandomMeasure canonicalized(const RandomMeasure& m) {
    std::vector<DiscreteMeasure> comps;
    comps.reserve(m.size());
    for (const auto& mu : m.components()) comps.push_back(consolidated(mu));
    std::vector<std::size_t> idx(comps.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        if (!component_identical(comps[i], comps[j])) return component_less(comps[i], comps[j]);
        return m.outer_weight(i) < m.outer_weight(j);
    });
    std::vector<DiscreteMeasure> out_comps;
    std::vector<double> out_weights;
    for (std::size_t k : idx) {
        if (!out_comps.empty() && component_identical(out_comps.back(), comps[k])) {
            out_weights.back() += m.outer_weight(k);
        } else {
            out_comps.push_back(comps[k]);
            out_weights.push_back(m.outer_weight(k));
        }
    }
    return RandomMeasure(std::move(out_comps), std::move(out_weights));
}

bool approx_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double tol) {
    if (a.dim() != b.dim()) return false;
    const DiscreteMeasure ca = consolidated(a);
    const DiscreteMeasure cb = consolidated(b);
    if (ca.size() != cb.size()) return false;
    for (std::size_t k = 0; k < ca.size(); ++k) {
        if (ca.atom(k) != cb.atom(k)) return false;
        if (std::abs(ca.weight(k) - cb.weight(k)) > tol) return false;
    }
    return true;
}

bool approx_equal(const RandomMeasure& a, const RandomMeasure& b, double tol) {
    if (a.dim() != b.dim()) return false;
    const RandomMeasure ca = canonicalized(a);
    const RandomMeasure cb = canonicalized(b);
    if (ca.size() != cb.size()) return false;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        if (std::abs(ca.outer_weight(i) - cb.outer_weight(i)) > tol) return false;
        const auto& ma = ca.component(i);
        const auto& mb = cb.component(i);
        if (ma.size() != mb.size() || ma.atoms() != mb.atoms()) return false;
        for (std::size_t k = 0; k < ma.size(); ++k) {
            if (std::abs(ma.weight(k) - mb.weight(k)) > tol) return false;
        }
    }
    return true;
}

bool exactly_equal(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (a.dim() != b.dim()) return false;
    const DiscreteMeasure ca = consolidated(a);
    const DiscreteMeasure cb = consolidated(b);
    return ca.atoms() == cb.atoms() && ca.weights() == cb.weights();
}

}  // namespace nestedot
