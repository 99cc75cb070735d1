#include "nestedot/fields.hpp"

#include <cmath>

#include "nestedot/errors.hpp"

namespace nestedot {

struct NonLocalField::Node {
    Kind kind = Kind::sum;
    Mat A;
    double kappa = 0.0;
    double sigma = 1.0;
    double scale = 1.0;
    std::vector<double> poly;
    std::vector<NonLocalField> children;  // time_scaled: 1 child; sum: n children
    Evaluator custom;
};

NonLocalField NonLocalField::linear(Mat A) {
    if (A.rows != A.cols || A.rows <= 0) throw InputError("linear field needs a square matrix");
    auto n = std::make_shared<Node>();
    n->kind = Kind::linear;
    n->A = std::move(A);
    NonLocalField f;
    f.node_ = std::move(n);
    return f;
}

NonLocalField NonLocalField::to_barycenter(double kappa) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::to_barycenter;
    n->kappa = kappa;
    NonLocalField f;
    f.node_ = std::move(n);
    return f;
}

NonLocalField NonLocalField::convolution_gaussian_grad(double sigma, double scale) {
    if (sigma <= 0.0) throw InputError("kernel width must be positive");
    auto n = std::make_shared<Node>();
    n->kind = Kind::convolution;
    n->sigma = sigma;
    n->scale = scale;
    NonLocalField f;
    f.node_ = std::move(n);
    return f;
}

NonLocalField NonLocalField::time_scaled(std::vector<double> poly, NonLocalField inner) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::time_scaled;
    n->poly = std::move(poly);
    n->children.push_back(std::move(inner));
    NonLocalField f;
    f.node_ = std::move(n);
    return f;
}

NonLocalField NonLocalField::sum(std::vector<NonLocalField> terms) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::sum;
    n->children = std::move(terms);
    NonLocalField f;
    f.node_ = std::move(n);
    return f;
}

NonLocalField NonLocalField::custom(Evaluator fn) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::custom;
    n->custom = std::move(fn);
    NonLocalField f;
    f.node_ = std::move(n);
    return f;
}

NonLocalField NonLocalField::zero() { return sum({}); }

NonLocalField::Kind NonLocalField::kind() const { return node_->kind; }
const Mat& NonLocalField::matrix() const { return node_->A; }
double NonLocalField::kappa() const { return node_->kappa; }
double NonLocalField::kernel_sigma() const { return node_->sigma; }
double NonLocalField::kernel_scale() const { return node_->scale; }
const std::vector<double>& NonLocalField::time_poly() const { return node_->poly; }
const NonLocalField& NonLocalField::inner() const { return node_->children.front(); }
const std::vector<NonLocalField>& NonLocalField::terms() const { return node_->children; }

namespace {

double poly_eval(const std::vector<double>& c, double t) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k];
    return v;
}

Point measure_mean(const DiscreteMeasure& mu) {
    Point m(static_cast<std::size_t>(mu.dim()), 0.0);
    for (std::size_t a = 0; a < mu.size(); ++a) axpy(mu.weight(a), mu.atom(a), m);
    return m;
}

}  // namespace

Point NonLocalField::eval(double t, const Point& x, const DiscreteMeasure& mu) const {
    if (static_cast<int>(x.size()) != mu.dim()) throw InputError("dimension mismatch");
    const Node& n = *node_;
    switch (n.kind) {
        case Kind::linear: {
            if (n.A.rows != mu.dim()) throw InputError("dimension mismatch");
            return matvec(n.A, x);
        }
        case Kind::to_barycenter: {
            Point m = measure_mean(mu);
            Point out(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = n.kappa * (m[i] - x[i]);
            return out;
        }
        case Kind::convolution: {
            Point out(x.size(), 0.0);
            const double inv2s2 = 1.0 / (2.0 * n.sigma * n.sigma);
            for (std::size_t a = 0; a < mu.size(); ++a) {
                const Point z = x - mu.atom(a);
                const double g = std::exp(-dot(z, z) * inv2s2);
                axpy(-n.scale * g * mu.weight(a), z, out);
            }
            return out;
        }
        case Kind::time_scaled: {
            Point out = n.children.front().eval(t, x, mu);
            const double g = poly_eval(n.poly, t);
            for (double& c : out) c *= g;
            return out;
        }
        case Kind::sum: {
            Point out(x.size(), 0.0);
            for (const auto& child : n.children) {
                const Point v = child.eval(t, x, mu);
                for (std::size_t i = 0; i < x.size(); ++i) out[i] += v[i];
            }
            return out;
        }
        case Kind::custom:
            return n.custom(t, x, mu);
    }
    throw InputError("unreachable");
}

double lp_norm_against(const NonLocalField& b, const RandomMeasure& M, double t, double p) {
    if (p < 1.0) throw InputError("invalid exponent");
    double total = 0.0;
    for (std::size_t i = 0; i < M.size(); ++i) {
        const auto& mu = M.component(i);
        double inner = 0.0;
        for (std::size_t a = 0; a < mu.size(); ++a)
            inner += mu.weight(a) * metric_pow(norm2(b.eval(t, mu.atom(a), mu)), p);
        total += M.outer_weight(i) * inner;
    }
    return metric_pow(total, 1.0 / p);
}

double lipschitz_certificate(const NonLocalField& b, const std::vector<LipschitzInstance>& instances,
                             double t, double p) {
    if (p < 1.0) throw InputError("invalid exponent");
    double worst = 0.0;
    for (const auto& inst : instances) {
        double num = 0.0;
        for (int i = 0; i < inst.plan.rows; ++i) {
            for (int j = 0; j < inst.plan.cols; ++j) {
                const double w = inst.plan.at(i, j);
                if (w <= 0.0) continue;
                const Point d = b.eval(t, inst.mu0.atom(static_cast<std::size_t>(i)), inst.mu0) -
                                b.eval(t, inst.mu1.atom(static_cast<std::size_t>(j)), inst.mu1);
                num += w * metric_pow(norm2(d), p);
            }
        }
        if (inst.wpp <= 0.0) {
            if (num > 1e-12) throw InputError("Lipschitz violation at coincident measures");
            continue;
        }
        worst = std::max(worst, num / inst.wpp);
    }
    return worst;
}

double spatial_lipschitz_check(const NonLocalField& b, const DiscreteMeasure& mu, double t) {
    double worst = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (std::size_t j = i + 1; j < mu.size(); ++j) {
            const double d = dist2(mu.atom(i), mu.atom(j));
            if (d == 0.0) continue;
            any = true;
            const double num = norm2(b.eval(t, mu.atom(i), mu) - b.eval(t, mu.atom(j), mu));
            worst = std::max(worst, num / d);
        }
    }
    if (!any) throw InputError("insufficient support");
    return worst;
}

}  // namespace nestedot
