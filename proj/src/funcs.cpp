#include "dcprox/funcs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace dcprox {

double SmoothConvexFunction::value_and_gradient(const DenseVector& x, DenseVector& grad) const {
    grad = gradient(x);
    return value(x);
}

namespace {

double sign(double v) { return (v > 0.0) - (v < 0.0); }

void require_scad_params(double lambda, double a) {
    if (!(lambda > 0.0)) throw std::invalid_argument("SCAD: lambda must be > 0");
    if (!(a > 1.0)) throw std::invalid_argument("SCAD: a must be > 1");
}

void require_zhang_param(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("Zhang: a must be > 0");
}

void require_two_planes(const DenseVector& y, const char* op) {
    if (y.shape.planes != 2)
        throw std::invalid_argument(std::string(op) + ": field must have planes == 2");
}

}  // namespace

// ---- SCAD --------------------------------------------------------------

double scad_scalar(double z, double lambda, double a) {
    const double t = std::abs(z);
    if (t <= lambda) return lambda * t;
    if (t <= a * lambda) return (-t * t + 2.0 * a * lambda * t - lambda * lambda) / (2.0 * (a - 1.0));
    return (a + 1.0) * lambda * lambda / 2.0;
}

double scad_h_scalar(double z, double lambda, double a) {
    const double t = std::abs(z);
    if (t <= lambda) return 0.0;
    if (t <= a * lambda) {
        const double d = t - lambda;
        return d * d / (2.0 * (a - 1.0));
    }
    return lambda * t - (a + 1.0) * lambda * lambda / 2.0;
}

double scad_h_derivative(double z, double lambda, double a) {
    const double t = std::abs(z);
    if (t <= lambda) return 0.0;
    if (t <= a * lambda) return sign(z) * (t - lambda) / (a - 1.0);
    return sign(z) * lambda;
}

double scad_conj_scalar(double y, double lambda, double a) {
    const double t = std::abs(y);
    if (t > lambda * (1.0 + 1e-12) + 1e-300) return kInf;
    return lambda * t + (a - 1.0) * y * y / 2.0;
}

double prox_scad_conj_scalar(double gamma, double z, double lambda, double a) {
    // Five branches; adjacent branches agree at the shared endpoints and the
    // output saturates at +-lambda.
    const double hi = (1.0 + gamma * a) * lambda;
    const double lo = gamma * lambda;
    const double denom = 1.0 + gamma * (a - 1.0);
    double r;
    if (z <= -hi)
        r = -lambda;
    else if (z <= -lo)
        r = (z + gamma * lambda) / denom;
    else if (z < lo)
        r = 0.0;
    else if (z < hi)
        r = (z - gamma * lambda) / denom;
    else
        r = lambda;
    return std::clamp(r, -lambda, lambda);
}

double scad_value(const DenseVector& z, double lambda, double a) {
    require_scad_params(lambda, a);
    double s = 0.0;
    for (double v : z.data) s += scad_scalar(v, lambda, a);
    return s;
}

double scad_h_value(const DenseVector& z, double lambda, double a) {
    require_scad_params(lambda, a);
    double s = 0.0;
    for (double v : z.data) s += scad_h_scalar(v, lambda, a);
    return s;
}

DenseVector prox_scad_conj(double gamma, const DenseVector& z, double lambda, double a) {
    require_scad_params(lambda, a);
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_scad_conj: gamma must be > 0");
    DenseVector r = z;
    for (double& v : r.data) v = prox_scad_conj_scalar(gamma, v, lambda, a);
    return r;
}

// ---- Zhang -------------------------------------------------------------

double zhang_scalar(double z, double a) {
    const double t = std::abs(z);
    return t < a ? t / a : 1.0;
}

double zhang_h_scalar(double z, double a) {
    const double t = std::abs(z);
    return t < a ? 0.0 : (t - a) / a;
}

double zhang_h_subgradient(double z, double a) {
    const double t = std::abs(z);
    return t > a ? sign(z) / a : 0.0;
}

double zhang_conj_scalar(double y, double a) {
    const double t = std::abs(y);
    const double bound = 1.0 / a;
    if (t > bound * (1.0 + 1e-12) + 1e-300) return kInf;
    return a * t;
}

double prox_zhang_conj_scalar(double gamma, double z, double a) {
    // Soft threshold by gamma*a, clamped to [-1/a, 1/a].
    const double bound = 1.0 / a;
    double r;
    if (z > gamma * a)
        r = z - gamma * a;
    else if (z < -gamma * a)
        r = z + gamma * a;
    else
        r = 0.0;
    return std::clamp(r, -bound, bound);
}

double zhang_value(const DenseVector& z, double a) {
    require_zhang_param(a);
    double s = 0.0;
    for (double v : z.data) s += zhang_scalar(v, a);
    return s;
}

double zhang_h_value(const DenseVector& z, double a) {
    require_zhang_param(a);
    double s = 0.0;
    for (double v : z.data) s += zhang_h_scalar(v, a);
    return s;
}

DenseVector prox_zhang_conj(double gamma, const DenseVector& z, double a) {
    require_zhang_param(a);
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_zhang_conj: gamma must be > 0");
    DenseVector r = z;
    for (double& v : r.data) v = prox_zhang_conj_scalar(gamma, v, a);
    return r;
}

// ---- Cross norm ----------------------------------------------------------

double cross_norm(const DenseVector& y) {
    require_two_planes(y, "cross_norm");
    const std::size_t np = y.shape.plane_size();
    double s = 0.0;
    for (std::size_t i = 0; i < np; ++i) s += std::hypot(y[i], y[np + i]);
    return s;
}

DenseVector prox_crossnorm_conj(double /*gamma*/, const DenseVector& y, double alpha) {
    require_two_planes(y, "prox_crossnorm_conj");
    if (!(alpha >= 0.0)) throw std::invalid_argument("prox_crossnorm_conj: alpha must be >= 0");
    const std::size_t np = y.shape.plane_size();
    DenseVector r = y;
    for (std::size_t i = 0; i < np; ++i) {
        const double d = std::hypot(r[i], r[np + i]);
        if (d > alpha) {
            const double f = alpha == 0.0 ? 0.0 : alpha / d;
            r[i] *= f;
            r[np + i] *= f;
        }
    }
    return r;
}

DenseVector crossnorm_subgradient(const DenseVector& y, double alpha) {
    require_two_planes(y, "crossnorm_subgradient");
    const std::size_t np = y.shape.plane_size();
    DenseVector r(y.shape);
    for (std::size_t i = 0; i < np; ++i) {
        const double d = std::hypot(y[i], y[np + i]);
        if (d > 0.0) {
            r[i] = alpha * y[i] / d;
            r[np + i] = alpha * y[np + i] / d;
        }
    }
    return r;
}

// ---- Brute-force oracle ----------------------------------------------------

double prox_brute_oracle(const std::function<double(double)>& f, double gamma,
                         double z, double grid_radius, double grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("prox_brute_oracle: grid_step must be > 0");
    const long half = static_cast<long>(std::llround(grid_radius / grid_step));
    double best_val = kInf;
    double best_t = 0.0;
    bool found = false;
    for (long i = -half; i <= half; ++i) {
        const double t = z + static_cast<double>(i) * grid_step;
        const double fv = f(t);
        if (!std::isfinite(fv)) continue;
        const double val = gamma * fv + 0.5 * (t - z) * (t - z);
        if (!found || val < best_val ||
            (val == best_val && std::abs(t) < std::abs(best_t))) {
            best_val = val;
            best_t = t;
            found = true;
        }
    }
    if (!found) throw std::runtime_error("prox_brute_oracle: no finite value on the grid");
    return best_t;
}

// ---- Anisotropic TV prox ---------------------------------------------------

TvProxResult prox_aniso_tv(double gamma, const DenseVector& b, const LinearMap& D,
                           double inner_tol, std::size_t max_inner,
                           const DenseVector* warm_dual) {
    if (!(gamma > 0.0)) throw std::invalid_argument("prox_aniso_tv: gamma must be > 0");
    if (!(inner_tol > 0.0)) throw std::invalid_argument("prox_aniso_tv: inner_tol must be > 0");
    if (!(b.shape == D.domain_shape))
        throw std::invalid_argument("prox_aniso_tv: b does not match the domain of D");

    const double lipschitz = gamma * D.norm_bound * D.norm_bound;
    const double tau = 1.0 / lipschitz;

    DenseVector p = (warm_dual != nullptr && warm_dual->shape == D.codomain_shape)
                        ? *warm_dual
                        : zeros(D.codomain_shape);
    for (double& v : p.data) v = std::clamp(v, -1.0, 1.0);

    TvProxResult res;
    bool hit_tol = false;
    std::size_t iters = 0;
    while (iters < max_inner) {
        ++iters;
        // gradient of the dual objective: D (gamma D* p - b)
        DenseVector r = D.adjoint(p);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = gamma * r[i] - b[i];
        DenseVector grad = D.forward(r);
        double change = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double next = std::clamp(p[i] - tau * grad[i], -1.0, 1.0);
            change = std::max(change, std::abs(next - p[i]));
            p[i] = next;
        }
        if (change < inner_tol) {
            hit_tol = true;
            break;
        }
    }

    DenseVector dstar = D.adjoint(p);
    DenseVector x = b;
    add_scaled(x, -gamma, dstar);
    DenseVector dx_field = D.forward(x);

    const double primal = distance(x, b) * distance(x, b) / (2.0 * gamma) + norm1(dx_field);
    const double dual_obj = gamma / 2.0 * inner(dstar, dstar) - inner(b, dstar);
    const double gap = primal + dual_obj;

    res.x = std::move(x);
    res.dual = std::move(p);
    res.gap = gap;
    res.iters = iters;
    res.converged = hit_tol || gap <= 1e2 * inner_tol;
    return res;
}

// ---- Concrete functions ----------------------------------------------------

ScaledSquaredNorm::ScaledSquaredNorm(double weight) : weight_(weight) {
    if (!(weight >= 0.0)) throw std::invalid_argument("ScaledSquaredNorm: weight must be >= 0");
}

double ScaledSquaredNorm::value(const DenseVector& x) const {
    return weight_ * inner(x, x);
}

DenseVector ScaledSquaredNorm::prox(double gamma, const DenseVector& x) {
    return scaled(x, 1.0 / (1.0 + 2.0 * gamma * weight_));
}

L1Norm::L1Norm(double weight) : weight_(weight) {
    if (!(weight >= 0.0)) throw std::invalid_argument("L1Norm: weight must be >= 0");
}

double L1Norm::value(const DenseVector& x) const { return weight_ * norm1(x); }

DenseVector L1Norm::prox(double gamma, const DenseVector& x) {
    const double t = gamma * weight_;
    DenseVector r = x;
    for (double& v : r.data) {
        if (v > t)
            v -= t;
        else if (v < -t)
            v += t;
        else
            v = 0.0;
    }
    return r;
}

BoxIndicator::BoxIndicator(double lo, double hi) : lo_(lo), hi_(hi) {
    if (!(lo <= hi)) throw std::invalid_argument("BoxIndicator: lo must be <= hi");
}

double BoxIndicator::value(const DenseVector& x) const {
    const double tol = 1e-12 * (1.0 + std::max(std::abs(lo_), std::abs(hi_)));
    for (double v : x.data)
        if (v < lo_ - tol || v > hi_ + tol) return kInf;
    return 0.0;
}

DenseVector BoxIndicator::prox(double, const DenseVector& x) {
    DenseVector r = x;
    for (double& v : r.data) v = std::clamp(v, lo_, hi_);
    return r;
}

ScadConjugate::ScadConjugate(double lambda, double a) : lambda_(lambda), a_(a) {
    require_scad_params(lambda, a);
}

double ScadConjugate::value(const DenseVector& y) const {
    double s = 0.0;
    for (double v : y.data) {
        const double c = scad_conj_scalar(v, lambda_, a_);
        if (!std::isfinite(c)) return kInf;
        s += c;
    }
    return s;
}

DenseVector ScadConjugate::prox(double gamma, const DenseVector& y) {
    return prox_scad_conj(gamma, y, lambda_, a_);
}

ZhangConjugate::ZhangConjugate(double a) : a_(a) { require_zhang_param(a); }

double ZhangConjugate::value(const DenseVector& y) const {
    double s = 0.0;
    for (double v : y.data) {
        const double c = zhang_conj_scalar(v, a_);
        if (!std::isfinite(c)) return kInf;
        s += c;
    }
    return s;
}

DenseVector ZhangConjugate::prox(double gamma, const DenseVector& y) {
    return prox_zhang_conj(gamma, y, a_);
}

CrossNormBall::CrossNormBall(double alpha) : alpha_(alpha) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("CrossNormBall: alpha must be >= 0");
}

double CrossNormBall::value(const DenseVector& y) const {
    require_two_planes(y, "CrossNormBall::value");
    const std::size_t np = y.shape.plane_size();
    const double tol = 1e-12 * (1.0 + alpha_);
    for (std::size_t i = 0; i < np; ++i)
        if (std::hypot(y[i], y[np + i]) > alpha_ + tol) return kInf;
    return 0.0;
}

DenseVector CrossNormBall::prox(double gamma, const DenseVector& y) {
    return prox_crossnorm_conj(gamma, y, alpha_);
}

AnisotropicTvNorm::AnisotropicTvNorm(double scale, LinearMap D, TvProxOptions opts)
    : scale_(scale), D_(std::move(D)), opts_(opts) {
    if (!(scale > 0.0)) throw std::invalid_argument("AnisotropicTvNorm: scale must be > 0");
}

double AnisotropicTvNorm::value(const DenseVector& x) const {
    return scale_ * norm1(D_.forward(x));
}

DenseVector AnisotropicTvNorm::prox(double gamma, const DenseVector& x) {
    const DenseVector* warm = (opts_.warm_start && has_warm_) ? &warm_dual_ : nullptr;
    TvProxResult res =
        prox_aniso_tv(gamma * scale_, x, D_, opts_.inner_tol, opts_.max_inner, warm);
    if (opts_.warm_start) {
        warm_dual_ = res.dual;
        has_warm_ = true;
    }
    stats_ = {res.iters, res.converged, res.gap};
    return std::move(res.x);
}

QuadraticDataTerm::QuadraticDataTerm(LinearMap L, DenseVector b, double mu)
    : L_(std::move(L)), b_(std::move(b)), mu_(mu) {
    if (!(mu > 0.0)) throw std::invalid_argument("QuadraticDataTerm: mu must be > 0");
    if (!(b_.shape == L_.codomain_shape))
        throw std::invalid_argument("QuadraticDataTerm: b does not match the codomain of L");
    const double nb = L_.norm_bound;
    beta_ = nb > 0.0 ? 1.0 / (mu_ * nb * nb) : kInf;
}

double QuadraticDataTerm::value(const DenseVector& x) const {
    DenseVector r = L_.forward(x);
    add_scaled(r, -1.0, b_);
    return mu_ / 2.0 * inner(r, r);
}

DenseVector QuadraticDataTerm::gradient(const DenseVector& x) const {
    DenseVector r = L_.forward(x);
    add_scaled(r, -1.0, b_);
    return scaled(L_.adjoint(r), mu_);
}

double QuadraticDataTerm::value_and_gradient(const DenseVector& x, DenseVector& grad) const {
    DenseVector r = L_.forward(x);
    add_scaled(r, -1.0, b_);
    grad = scaled(L_.adjoint(r), mu_);
    return mu_ / 2.0 * inner(r, r);
}

std::shared_ptr<SmoothConvexFunction> make_data_term(LinearMap L, DenseVector b, double mu) {
    return std::make_shared<QuadraticDataTerm>(std::move(L), std::move(b), mu);
}

}  // namespace dcprox
