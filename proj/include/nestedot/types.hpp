#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace nestedot {

/// A point in R^d.
using Point = std::vector<double>;

/// Dense row-major matrix, small sizes only.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Point operator+(const Point& x, const Point& y) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
}

inline Point operator-(const Point& x, const Point& y) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
    return z;
}

inline Point operator*(double s, const Point& x) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = s * x[i];
    return z;
}

inline void axpy(double s, const Point& x, Point& y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

inline double dot(const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(const Point& x) { return std::sqrt(dot(x, x)); }

inline double dist2(const Point& x, const Point& y) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Point matvec(const Mat& m, const Point& x) {
    Point y(static_cast<std::size_t>(m.rows), 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s;
    }
    return y;
}

/// d^p with the zero-distance guard: exp(p*log(d)) is ill-defined at d = 0.
inline double metric_pow(double d, double p) {
    if (d <= 0.0) return 0.0;
    return std::exp(p * std::log(d));
}

}  // namespace nestedot
