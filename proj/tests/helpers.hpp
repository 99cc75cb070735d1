#pragma once

#include <random>

#include "nestedot/measures.hpp"

namespace testutil {

using nestedot::DiscreteMeasure;
using nestedot::Point;
using nestedot::RandomMeasure;

struct Rng {
    std::mt19937_64 g;
    explicit Rng(std::uint64_t seed) : g(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g); }
    int uniform_int(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g); }

    Point point(int dim, double lo = -2.0, double hi = 2.0) {
        Point x(static_cast<std::size_t>(dim));
        for (auto& c : x) c = uniform(lo, hi);
        return x;
    }

    DiscreteMeasure measure(int dim, int max_atoms, bool uniform_weights = false) {
        const int n = uniform_int(1, max_atoms);
        std::vector<Point> atoms;
        std::vector<double> weights;
        double total = 0.0;
        for (int k = 0; k < n; ++k) {
            atoms.push_back(point(dim));
            weights.push_back(uniform_weights ? 1.0 : uniform(0.05, 1.0));
            total += weights.back();
        }
        for (auto& w : weights) w /= total;
        return DiscreteMeasure(dim, std::move(atoms), std::move(weights));
    }

    RandomMeasure random_measure(int dim, int max_outer, int max_inner) {
        const int m = uniform_int(1, max_outer);
        std::vector<DiscreteMeasure> comps;
        std::vector<double> weights;
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            comps.push_back(measure(dim, max_inner));
            weights.push_back(uniform(0.05, 1.0));
            total += weights.back();
        }
        for (auto& w : weights) w /= total;
        return RandomMeasure(std::move(comps), std::move(weights));
    }
};

}  // namespace testutil
