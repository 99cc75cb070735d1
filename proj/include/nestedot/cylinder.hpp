#pragma once

#include <functional>
#include <map>
#include <vector>

#include "nestedot/measures.hpp"
#include "nestedot/types.hpp"

namespace nestedot {

/// Bounded C^1 test function on R^d with a closed-form gradient.
/// Built-ins are Gaussian radial bumps and single-coordinate bumps; a custom
/// evaluator pair is the library escape hatch (not JSON-serializable).
class TestFunction {
public:
    enum class Kind { gaussian, coordinate, custom };

    static TestFunction gaussian_bump(Point center, double sigma);
    static TestFunction coordinate_bump(int axis, double center, double width);
    static TestFunction custom(std::function<double(const Point&)> value,
                               std::function<Point(const Point&)> gradient);

    double value(const Point& x) const;
    Point gradient(const Point& x) const;

    Kind kind() const { return kind_; }
    const Point& center() const { return center_; }
    double sigma() const { return sigma_; }
    int axis() const { return axis_; }
    double scalar_center() const { return scalar_center_; }

private:
    TestFunction() = default;
    Kind kind_ = Kind::custom;
    Point center_;                 // gaussian
    double sigma_ = 1.0;           // gaussian width / coordinate width
    int axis_ = 0;                 // coordinate
    double scalar_center_ = 0.0;   // coordinate
    std::function<double(const Point&)> value_;
    std::function<Point(const Point&)> gradient_;
};

/// Multivariate polynomial by a sparse coefficient table keyed by exponent
/// multi-indices. Exact derivatives; closed under products.
class Polynomial {
public:
    using MultiIndex = std::vector<int>;

    Polynomial(int arity, std::map<MultiIndex, double> coeffs);

    int arity() const { return arity_; }
    const std::map<MultiIndex, double>& coeffs() const { return coeffs_; }

    double value(const std::vector<double>& s) const;
    double partial(int i, const std::vector<double>& s) const;

    /// Identity in one variable: Psi(s) = s.
    static Polynomial identity1();
    /// Product in disjoint variable blocks: (P*Q)(s, t) = P(s) Q(t).
    static Polynomial tensor_product(const Polynomial& a, const Polynomial& b);

private:
    int arity_;
    std::map<MultiIndex, double> coeffs_;
};

/// Cylinder function F(mu) = Psi(L_phi1(mu), ..., L_phik(mu)) with
/// L_phi(mu) = integral of phi against mu.
class CylinderFunction {
public:
    CylinderFunction(std::vector<TestFunction> phis, Polynomial psi);

    std::size_t arity() const { return phis_.size(); }
    const std::vector<TestFunction>& phis() const { return phis_; }
    const Polynomial& psi() const { return psi_; }

    /// L_Phi(mu): the vector of test-function integrals.
    std::vector<double> lvalues(const DiscreteMeasure& mu) const;
    double value(const DiscreteMeasure& mu) const;

    /// Wasserstein gradient sum_i dPsi_i(L_Phi(mu)) * grad(phi_i)(x).
    Point wgrad(const Point& x, const DiscreteMeasure& mu) const;

    /// Product F*G as a cylinder function (test-function lists concatenated).
    static CylinderFunction product(const CylinderFunction& f, const CylinderFunction& g);

private:
    std::vector<TestFunction> phis_;
    Polynomial psi_;
};

/// Chain-rule discrepancy for the derivation induced by a vector field v:
/// |int <v, grad_W F> dmu  -  sum_i dPsi_i(L_Phi) * int <v, grad phi_i> dmu|.
/// Identically zero up to rounding.
double chain_rule_check(const CylinderFunction& F, const DiscreteMeasure& mu,
                        const std::function<Point(const Point&)>& vfield);

/// A vector field sampled on the support of the lifted measure of M:
/// samples[i][a] sits at atom a of component i.
using FieldSamples = std::vector<std::vector<Point>>;

FieldSamples gradient_samples(const CylinderFunction& F, const RandomMeasure& M);

/// Inner product in L^2 of the lifted measure:
/// sum_i W_i sum_a w_{ia} <A[i][a], B[i][a]>.
double lifted_inner(const RandomMeasure& M, const FieldSamples& a, const FieldSamples& b);
double lifted_norm(const RandomMeasure& M, const FieldSamples& a);

struct ProjectionResult {
    FieldSamples projected;
    std::vector<double> coefficients;
};

/// L^2 projection of b onto span{grad_W F_r} in the lifted inner product.
/// Rank-deficient normal equations fall back to the minimal-norm coefficient
/// solution (eigenvalue cutoff 1e-10).
ProjectionResult tangent_projection(const FieldSamples& b, const std::vector<CylinderFunction>& basis,
                                    const RandomMeasure& M);

}  // namespace nestedot
