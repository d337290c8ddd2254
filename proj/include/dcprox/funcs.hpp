#pragma once

#include <functional>
#include <limits>
#include <memory>

#include "dcprox/linop.hpp"

namespace dcprox {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Diagnostics of the most recent prox evaluation. Closed-form proxes report
// zero inner iterations; the TV prox reports its dual solve.
struct ProxStats {
    std::size_t inner_iters = 0;
    bool converged = true;
    double gap = 0.0;
};

// Proper convex lower-semicontinuous function with an evaluable proximal
// map. value() may return +inf outside the domain.
class ProximableFunction {
public:
    virtual ~ProximableFunction() = default;
    virtual double value(const DenseVector& x) const = 0;
    // Prox of gamma * f at x. Non-const so implementations may warm-start.
    virtual DenseVector prox(double gamma, const DenseVector& x) = 0;
    virtual ProxStats last_prox_stats() const { return {}; }
};

// Convex differentiable function whose gradient is (1/beta)-Lipschitz.
class SmoothConvexFunction {
public:
    virtual ~SmoothConvexFunction() = default;
    virtual double value(const DenseVector& x) const = 0;
    virtual DenseVector gradient(const DenseVector& x) const = 0;
    // Default: two separate evaluations. Overridden where work is shared.
    virtual double value_and_gradient(const DenseVector& x, DenseVector& grad) const;
    virtual double beta() const = 0;
};

// Penalty parameters for the three regularizers.
struct PenaltyParams {
    double lambda = 1.0;  // SCAD weight, > 0
    double a_scad = 3.7;  // SCAD shape, > 1
    double a_zhang = 1.0; // Zhang shape, > 0
    double alpha = 0.0;   // cross-norm weight, >= 0
};

// ---- SCAD --------------------------------------------------------------

double scad_scalar(double z, double lambda, double a);
double scad_h_scalar(double z, double lambda, double a);
// h is continuously differentiable; used to pick the initial dual point.
double scad_h_derivative(double z, double lambda, double a);
// Conjugate h*: finite piecewise quadratic on [-lambda, lambda], +inf outside.
double scad_conj_scalar(double y, double lambda, double a);
double prox_scad_conj_scalar(double gamma, double z, double lambda, double a);

double scad_value(const DenseVector& z, double lambda, double a);
double scad_h_value(const DenseVector& z, double lambda, double a);
DenseVector prox_scad_conj(double gamma, const DenseVector& z, double lambda, double a);

// ---- Zhang -------------------------------------------------------------

double zhang_scalar(double z, double a);
double zhang_h_scalar(double z, double a);
// Subgradient selection for h (0 at the kink where it is multivalued).
double zhang_h_subgradient(double z, double a);
double zhang_conj_scalar(double y, double a);
double prox_zhang_conj_scalar(double gamma, double z, double a);

double zhang_value(const DenseVector& z, double a);
double zhang_h_value(const DenseVector& z, double a);
DenseVector prox_zhang_conj(double gamma, const DenseVector& z, double a);

// ---- Cross norm (per-pixel Euclidean norm of a two-plane field) ---------

double cross_norm(const DenseVector& y);
// Prox of the conjugate of alpha*||.||_x: pixelwise projection onto the
// 2-ball of radius alpha. Independent of gamma.
DenseVector prox_crossnorm_conj(double gamma, const DenseVector& y, double alpha);
// An element of the subdifferential of alpha*||.||_x (0 where multivalued).
DenseVector crossnorm_subgradient(const DenseVector& y, double alpha);

// ---- Scalar brute-force prox oracle -------------------------------------

// argmin over the grid {z - grid_radius, ..., z + grid_radius} (spacing
// grid_step) of gamma*f(t) + (t - z)^2 / 2, ties broken toward smaller |t|.
double prox_brute_oracle(const std::function<double(double)>& f, double gamma,
                         double z, double grid_radius, double grid_step);

// ---- Anisotropic total variation prox ------------------------------------

struct TvProxOptions {
    double inner_tol = 1e-4;   // l-inf change between consecutive dual iterates
    std::size_t max_inner = 500;
    bool warm_start = true;    // reuse the dual variable across prox calls
};

struct TvProxResult {
    DenseVector x;
    DenseVector dual;
    double gap = 0.0;          // duality gap certificate at the returned pair
    std::size_t iters = 0;
    bool converged = true;
};

// Prox of gamma*||D .||_1 at b, solved through the Fenchel dual
//   min { gamma/2 ||D* p||^2 - <b, D* p> : ||p||_inf <= 1 }
// by forward-backward with step 1/(gamma ||D||^2); the primal point is
// recovered as x = b - gamma D* p.
TvProxResult prox_aniso_tv(double gamma, const DenseVector& b, const LinearMap& D,
                           double inner_tol = 1e-4, std::size_t max_inner = 500,
                           const DenseVector* warm_dual = nullptr);

// ---- Concrete functions --------------------------------------------------

class ZeroFunction final : public ProximableFunction {
public:
    double value(const DenseVector&) const override { return 0.0; }
    DenseVector prox(double, const DenseVector& x) override { return x; }
};

// weight * ||x||^2
class ScaledSquaredNorm final : public ProximableFunction {
public:
    explicit ScaledSquaredNorm(double weight);
    double value(const DenseVector& x) const override;
    DenseVector prox(double gamma, const DenseVector& x) override;

private:
    double weight_;
};

// weight * ||x||_1
class L1Norm final : public ProximableFunction {
public:
    explicit L1Norm(double weight);
    double value(const DenseVector& x) const override;
    DenseVector prox(double gamma, const DenseVector& x) override;

private:
    double weight_;
};

// Indicator of the box [lo, hi]^n; prox is the componentwise clamp.
class BoxIndicator final : public ProximableFunction {
public:
    BoxIndicator(double lo, double hi);
    double value(const DenseVector& x) const override;
    DenseVector prox(double, const DenseVector& x) override;

private:
    double lo_, hi_;
};

class ScadConjugate final : public ProximableFunction {
public:
    ScadConjugate(double lambda, double a);
    double value(const DenseVector& y) const override;
    DenseVector prox(double gamma, const DenseVector& y) override;

private:
    double lambda_, a_;
};

class ZhangConjugate final : public ProximableFunction {
public:
    explicit ZhangConjugate(double a);
    double value(const DenseVector& y) const override;
    DenseVector prox(double gamma, const DenseVector& y) override;

private:
    double a_;
};

// Indicator of the per-pixel 2-ball of radius alpha (the conjugate of
// alpha*||.||_x); prox is the pixelwise radial projection.
class CrossNormBall final : public ProximableFunction {
public:
    explicit CrossNormBall(double alpha);
    double value(const DenseVector& y) const override;
    DenseVector prox(double, const DenseVector& y) override;

private:
    double alpha_;
};

// scale * ||D x||_1 with the prox evaluated through the dual solver above.
class AnisotropicTvNorm final : public ProximableFunction {
public:
    AnisotropicTvNorm(double scale, LinearMap D, TvProxOptions opts = {});
    double value(const DenseVector& x) const override;
    DenseVector prox(double gamma, const DenseVector& x) override;
    ProxStats last_prox_stats() const override { return stats_; }

private:
    double scale_;
    LinearMap D_;
    TvProxOptions opts_;
    DenseVector warm_dual_;
    bool has_warm_ = false;
    ProxStats stats_;
};

class ZeroSmooth final : public SmoothConvexFunction {
public:
    double value(const DenseVector&) const override { return 0.0; }
    DenseVector gradient(const DenseVector& x) const override { return zeros(x.shape); }
    double beta() const override { return kInf; }
};

// (mu/2) ||L x - b||^2 with gradient mu L*(L x - b); beta = 1/(mu ||L||^2).
class QuadraticDataTerm final : public SmoothConvexFunction {
public:
    QuadraticDataTerm(LinearMap L, DenseVector b, double mu);
    double value(const DenseVector& x) const override;
    DenseVector gradient(const DenseVector& x) const override;
    double value_and_gradient(const DenseVector& x, DenseVector& grad) const override;
    double beta() const override { return beta_; }

private:
    LinearMap L_;
    DenseVector b_;
    double mu_;
    double beta_;
};

std::shared_ptr<SmoothConvexFunction> make_data_term(LinearMap L, DenseVector b, double mu);

}  // namespace dcprox
