#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nestedot/measures.hpp"
#include "nestedot/transport.hpp"
#include "nestedot/types.hpp"

namespace nestedot {

/// Non-local velocity field b(t, x, mu): an immutable tree of composable
/// primitives, closed data so the CLI can parse and re-emit it. The custom
/// node is the library escape hatch and is excluded from JSON.
class NonLocalField {
public:
    enum class Kind { linear, to_barycenter, convolution, time_scaled, sum, custom };
    using Evaluator = std::function<Point(double, const Point&, const DiscreteMeasure&)>;

    /// b = A * x.
    static NonLocalField linear(Mat A);
    /// b = kappa * (mean(mu) - x).
    static NonLocalField to_barycenter(double kappa);
    /// b = sum_a w_a K(x - y_a) with K(z) = -scale * z * exp(-|z|^2/(2 sigma^2)).
    static NonLocalField convolution_gaussian_grad(double sigma, double scale);
    /// b = g(t) * inner, g a polynomial in t with the given coefficients.
    static NonLocalField time_scaled(std::vector<double> poly, NonLocalField inner);
    static NonLocalField sum(std::vector<NonLocalField> terms);
    static NonLocalField custom(Evaluator fn);
    static NonLocalField zero();

    Point eval(double t, const Point& x, const DiscreteMeasure& mu) const;

    Kind kind() const;
    const Mat& matrix() const;
    double kappa() const;
    double kernel_sigma() const;
    double kernel_scale() const;
    const std::vector<double>& time_poly() const;
    const NonLocalField& inner() const;
    const std::vector<NonLocalField>& terms() const;

private:
    struct Node;
    NonLocalField() = default;
    std::shared_ptr<const Node> node_;
};

/// L^p norm of the field against the lifted measure of M at time t:
/// ( sum_i W_i sum_a w_{ia} |b(t, x_{ia}, mu_i)|^p )^{1/p}.
double lp_norm_against(const NonLocalField& b, const RandomMeasure& M, double t, double p);

/// A sampled pair of measures with a W_p-optimal plan between them.
struct LipschitzInstance {
    DiscreteMeasure mu0;
    DiscreteMeasure mu1;
    Coupling plan;
    double wpp = 0.0;  // W_p^p(mu0, mu1) realized by the plan
};

/// Empirical constant max over instances of
/// (int |b(t,x0,mu0) - b(t,x1,mu1)|^p dpi) / W_p^p(mu0, mu1),
/// a lower bound on any valid L(t) for the field.
double lipschitz_certificate(const NonLocalField& b, const std::vector<LipschitzInstance>& instances,
                             double t, double p);

/// Max over distinct atom pairs of |b(t,x,mu) - b(t,y,mu)| / |x - y|.
double spatial_lipschitz_check(const NonLocalField& b, const DiscreteMeasure& mu, double t);

}  // namespace nestedot
