#include "dcprox/linop.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <utility>

namespace dcprox {

DenseVector::DenseVector(Shape s, std::vector<double> values)
    : shape(s), data(std::move(values)) {
    if (data.size() != shape.size())
        throw std::invalid_argument("DenseVector: data length does not match shape");
}

DenseVector zeros(Shape s) { return DenseVector(s); }

namespace {
void require_same_shape(const DenseVector& a, const DenseVector& b, const char* op) {
    if (!(a.shape == b.shape))
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}
}  // namespace

double inner(const DenseVector& a, const DenseVector& b) {
    require_same_shape(a, b, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const DenseVector& v) { return std::sqrt(inner(v, v)); }

double norm1(const DenseVector& v) {
    double s = 0.0;
    for (double x : v.data) s += std::abs(x);
    return s;
}

double norm_inf(const DenseVector& v) {
    double s = 0.0;
    for (double x : v.data) s = std::max(s, std::abs(x));
    return s;
}

double distance(const DenseVector& a, const DenseVector& b) {
    require_same_shape(a, b, "distance");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

bool all_finite(const DenseVector& v) {
    for (double x : v.data)
        if (!std::isfinite(x)) return false;
    return true;
}

void add_scaled(DenseVector& y, double alpha, const DenseVector& x) {
    require_same_shape(y, x, "add_scaled");
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

DenseVector scaled(const DenseVector& x, double alpha) {
    DenseVector r = x;
    for (double& v : r.data) v *= alpha;
    return r;
}

DenseVector add(const DenseVector& a, const DenseVector& b) {
    require_same_shape(a, b, "add");
    DenseVector r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

DenseVector sub(const DenseVector& a, const DenseVector& b) {
    require_same_shape(a, b, "sub");
    DenseVector r = a;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= b[i];
    return r;
}

DenseVector LinearMap::forward(const DenseVector& x) const {
    if (!(x.shape == domain_shape))
        throw std::invalid_argument("LinearMap::forward: shape mismatch");
    return forward_fn(x);
}

DenseVector LinearMap::adjoint(const DenseVector& y) const {
    if (!(y.shape == codomain_shape))
        throw std::invalid_argument("LinearMap::adjoint: shape mismatch");
    return adjoint_fn(y);
}

LinearMap identity_map(Shape s) {
    LinearMap m;
    m.domain_shape = s;
    m.codomain_shape = s;
    m.norm_bound = 1.0;
    m.forward_fn = [](const DenseVector& x) { return x; };
    m.adjoint_fn = [](const DenseVector& x) { return x; };
    return m;
}

LinearMap diagonal_map(DenseVector d) {
    LinearMap m;
    m.domain_shape = d.shape;
    m.codomain_shape = d.shape;
    m.norm_bound = norm_inf(d);
    auto apply = [diag = std::move(d)](const DenseVector& x) {
        DenseVector r = x;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] *= diag[i];
        return r;
    };
    m.forward_fn = apply;
    m.adjoint_fn = apply;
    return m;
}

DenseVector random_normal(Shape s, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    DenseVector v(s);
    for (double& x : v.data) x = dist(gen);
    return v;
}

double adjoint_test(const LinearMap& map, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("adjoint_test: trials must be >= 1");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        DenseVector x(map.domain_shape);
        DenseVector y(map.codomain_shape);
        for (double& v : x.data) v = dist(gen);
        for (double& v : y.data) v = dist(gen);
        const double nx = norm(x);
        const double ny = norm(y);
        if (nx == 0.0 || ny == 0.0) continue;
        const double defect =
            std::abs(inner(map.forward(x), y) - inner(x, map.adjoint(y))) / (nx * ny);
        worst = std::max(worst, defect);
    }
    return worst;
}

double power_norm(const LinearMap& map, std::size_t iters, std::uint64_t seed) {
    if (iters < 1) throw std::invalid_argument("power_norm: iters must be >= 1");
    if (map.domain_shape.size() == 0 || map.codomain_shape.size() == 0)
        throw std::invalid_argument("power_norm: zero-dimension map");

    DenseVector v = random_normal(map.domain_shape, seed);
    double nv = norm(v);
    if (nv == 0.0) return 0.0;
    for (double& x : v.data) x /= nv;

    // Rayleigh quotient of K*K along the power sequence; monotone
    // nondecreasing for a symmetric positive semidefinite operator.
    double estimate = 0.0;
    for (std::size_t it = 0; it < iters; ++it) {
        DenseVector w = map.adjoint(map.forward(v));
        const double rho = inner(v, w);
        estimate = std::sqrt(std::max(rho, 0.0));
        const double nw = norm(w);
        if (nw == 0.0) return 0.0;
        for (double& x : w.data) x /= nw;
        v = std::move(w);
    }
    return estimate;
}

}  // namespace dcprox
