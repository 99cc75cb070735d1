#include "nestedot/cylinder.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "nestedot/errors.hpp"

namespace nestedot {

TestFunction TestFunction::gaussian_bump(Point center, double sigma) {
    if (sigma <= 0.0) throw InputError("bump width must be positive");
    TestFunction f;
    f.kind_ = Kind::gaussian;
    f.center_ = std::move(center);
    f.sigma_ = sigma;
    return f;
}

TestFunction TestFunction::coordinate_bump(int axis, double center, double width) {
    if (width <= 0.0) throw InputError("bump width must be positive");
    if (axis < 0) throw InputError("axis must be nonnegative");
    TestFunction f;
    f.kind_ = Kind::coordinate;
    f.axis_ = axis;
    f.scalar_center_ = center;
    f.sigma_ = width;
    return f;
}

TestFunction TestFunction::custom(std::function<double(const Point&)> value,
                                  std::function<Point(const Point&)> gradient) {
    TestFunction f;
    f.kind_ = Kind::custom;
    f.value_ = std::move(value);
    f.gradient_ = std::move(gradient);
    return f;
}

double TestFunction::value(const Point& x) const {
    switch (kind_) {
        case Kind::gaussian: {
            if (x.size() != center_.size()) throw InputError("dimension mismatch");
            const double r = dist2(x, center_);
            return std::exp(-r * r / (2.0 * sigma_ * sigma_));
        }
        case Kind::coordinate: {
            if (axis_ >= static_cast<int>(x.size())) throw InputError("dimension mismatch");
            const double d = x[static_cast<std::size_t>(axis_)] - scalar_center_;
            return std::exp(-d * d / (2.0 * sigma_ * sigma_));
        }
        case Kind::custom:
            return value_(x);
    }
    throw InputError("unreachable");
}

Point TestFunction::gradient(const Point& x) const {
    switch (kind_) {
        case Kind::gaussian: {
            if (x.size() != center_.size()) throw InputError("dimension mismatch");
            const double phi = value(x);
            Point g(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                g[i] = -(x[i] - center_[i]) / (sigma_ * sigma_) * phi;
            return g;
        }
        case Kind::coordinate: {
            if (axis_ >= static_cast<int>(x.size())) throw InputError("dimension mismatch");
            const double phi = value(x);
            Point g(x.size(), 0.0);
            g[static_cast<std::size_t>(axis_)] =
                -(x[static_cast<std::size_t>(axis_)] - scalar_center_) / (sigma_ * sigma_) * phi;
            return g;
        }
        case Kind::custom:
            return gradient_(x);
    }
    throw InputError("unreachable");
}

Polynomial::Polynomial(int arity, std::map<MultiIndex, double> coeffs)
    : arity_(arity), coeffs_(std::move(coeffs)) {
    if (arity_ < 1) throw InputError("polynomial arity must be >= 1");
    for (const auto& [mi, c] : coeffs_) {
        if (static_cast<int>(mi.size()) != arity_) throw InputError("multi-index arity mismatch");
        for (int e : mi)
            if (e < 0) throw InputError("negative exponent");
        (void)c;
    }
}

double Polynomial::value(const std::vector<double>& s) const {
    if (static_cast<int>(s.size()) != arity_) throw InputError("polynomial arity mismatch");
    double total = 0.0;
    for (const auto& [mi, c] : coeffs_) {
        double term = c;
        for (int i = 0; i < arity_; ++i)
            for (int e = 0; e < mi[static_cast<std::size_t>(i)]; ++e) term *= s[static_cast<std::size_t>(i)];
        total += term;
    }
    return total;
}

double Polynomial::partial(int i, const std::vector<double>& s) const {
    if (static_cast<int>(s.size()) != arity_) throw InputError("polynomial arity mismatch");
    if (i < 0 || i >= arity_) throw InputError("partial index out of range");
    double total = 0.0;
    for (const auto& [mi, c] : coeffs_) {
        const int e = mi[static_cast<std::size_t>(i)];
        if (e == 0) continue;
        double term = c * static_cast<double>(e);
        for (int k = 0; k < arity_; ++k) {
            const int ek = (k == i) ? mi[static_cast<std::size_t>(k)] - 1 : mi[static_cast<std::size_t>(k)];
            for (int r = 0; r < ek; ++r) term *= s[static_cast<std::size_t>(k)];
        }
        total += term;
    }
    return total;
}

Polynomial Polynomial::identity1() { return Polynomial(1, {{{1}, 1.0}}); }

Polynomial Polynomial::tensor_product(const Polynomial& a, const Polynomial& b) {
    std::map<MultiIndex, double> coeffs;
    for (const auto& [ma, ca] : a.coeffs_) {
        for (const auto& [mb, cb] : b.coeffs_) {
            MultiIndex mi = ma;
            mi.insert(mi.end(), mb.begin(), mb.end());
            coeffs[mi] += ca * cb;
        }
    }
    return Polynomial(a.arity_ + b.arity_, std::move(coeffs));
}

CylinderFunction::CylinderFunction(std::vector<TestFunction> phis, Polynomial psi)
    : phis_(std::move(phis)), psi_(std::move(psi)) {
    if (phis_.empty()) throw InputError("cylinder function needs at least one test function");
    if (psi_.arity() != static_cast<int>(phis_.size()))
        throw InputError("outer function arity must match the test-function count");
}

std::vector<double> CylinderFunction::lvalues(const DiscreteMeasure& mu) const {
    std::vector<double> L(phis_.size(), 0.0);
    for (std::size_t i = 0; i < phis_.size(); ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a < mu.size(); ++a) s += mu.weight(a) * phis_[i].value(mu.atom(a));
        L[i] = s;
    }
    return L;
}

double CylinderFunction::value(const DiscreteMeasure& mu) const { return psi_.value(lvalues(mu)); }

Point CylinderFunction::wgrad(const Point& x, const DiscreteMeasure& mu) const {
    const std::vector<double> L = lvalues(mu);
    Point g(x.size(), 0.0);
    for (std::size_t i = 0; i < phis_.size(); ++i) {
        const double di = psi_.partial(static_cast<int>(i), L);
        if (di == 0.0) continue;
        axpy(di, phis_[i].gradient(x), g);
    }
    return g;
}

CylinderFunction CylinderFunction::product(const CylinderFunction& f, const CylinderFunction& g) {
    std::vector<TestFunction> phis = f.phis_;
    phis.insert(phis.end(), g.phis_.begin(), g.phis_.end());
    return CylinderFunction(std::move(phis), Polynomial::tensor_product(f.psi_, g.psi_));
}

double chain_rule_check(const CylinderFunction& F, const DiscreteMeasure& mu,
                        const std::function<Point(const Point&)>& vfield) {
    // lhs: pairing of the field with the assembled Wasserstein gradient
    double lhs = 0.0;
    for (std::size_t a = 0; a < mu.size(); ++a)
        lhs += mu.weight(a) * dot(vfield(mu.atom(a)), F.wgrad(mu.atom(a), mu));
    // rhs: chain rule through the linear functionals
    const std::vector<double> L = F.lvalues(mu);
    double rhs = 0.0;
    for (std::size_t i = 0; i < F.arity(); ++i) {
        double bi = 0.0;
        for (std::size_t a = 0; a < mu.size(); ++a)
            bi += mu.weight(a) * dot(vfield(mu.atom(a)), F.phis()[i].gradient(mu.atom(a)));
        rhs += F.psi().partial(static_cast<int>(i), L) * bi;
    }
    return std::abs(lhs - rhs);
}

FieldSamples gradient_samples(const CylinderFunction& F, const RandomMeasure& M) {
    FieldSamples out(M.size());
    for (std::size_t i = 0; i < M.size(); ++i) {
        const auto& mu = M.component(i);
        out[i].resize(mu.size());
        for (std::size_t a = 0; a < mu.size(); ++a) out[i][a] = F.wgrad(mu.atom(a), mu);
    }
    return out;
}

double lifted_inner(const RandomMeasure& M, const FieldSamples& a, const FieldSamples& b) {
    if (a.size() != M.size() || b.size() != M.size()) throw InputError("sample shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < M.size(); ++i) {
        const auto& mu = M.component(i);
        if (a[i].size() != mu.size() || b[i].size() != mu.size()) throw InputError("sample shape mismatch");
        double si = 0.0;
        for (std::size_t k = 0; k < mu.size(); ++k) si += mu.weight(k) * dot(a[i][k], b[i][k]);
        s += M.outer_weight(i) * si;
    }
    return s;
}

double lifted_norm(const RandomMeasure& M, const FieldSamples& a) {
    return std::sqrt(std::max(0.0, lifted_inner(M, a, a)));
}

ProjectionResult tangent_projection(const FieldSamples& b, const std::vector<CylinderFunction>& basis,
                                    const RandomMeasure& M) {
    if (basis.empty()) throw InputError("empty projection basis");
    const int k = static_cast<int>(basis.size());
    std::vector<FieldSamples> grads;
    grads.reserve(basis.size());
    for (const auto& F : basis) grads.push_back(gradient_samples(F, M));

    Eigen::MatrixXd gram(k, k);
    Eigen::VectorXd rhs(k);
    for (int r = 0; r < k; ++r) {
        rhs(r) = lifted_inner(M, b, grads[static_cast<std::size_t>(r)]);
        for (int s = 0; s <= r; ++s) {
            const double g = lifted_inner(M, grads[static_cast<std::size_t>(r)], grads[static_cast<std::size_t>(s)]);
            gram(r, s) = g;
            gram(s, r) = g;
        }
    }

    // minimal-norm solve of the normal equations via spectral pseudo-inverse
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd evals = eig.eigenvalues();
    const Eigen::MatrixXd evecs = eig.eigenvectors();
    const double cutoff = 1e-10;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
    for (int r = 0; r < k; ++r) {
        if (evals(r) <= cutoff) continue;
        const double proj = evecs.col(r).dot(rhs) / evals(r);
        c += proj * evecs.col(r);
    }

    ProjectionResult out;
    out.coefficients.assign(c.data(), c.data() + k);
    out.projected.resize(M.size());
    for (std::size_t i = 0; i < M.size(); ++i) {
        const auto& mu = M.component(i);
        out.projected[i].assign(mu.size(), Point(static_cast<std::size_t>(M.dim()), 0.0));
        for (std::size_t a = 0; a < mu.size(); ++a)
            for (int r = 0; r < k; ++r)
                axpy(out.coefficients[static_cast<std::size_t>(r)], grads[static_cast<std::size_t>(r)][i][a],
                     out.projected[i][a]);
    }
    return out;
}

}  // namespace nestedot
