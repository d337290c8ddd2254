#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dcprox/funcs.hpp"

namespace dcprox {

// The difference-of-convex model  min g(x) + phi(x) - h(Kx)  given through
// the pieces the iteration consumes: the prox of g, the gradient of phi and
// the prox of the conjugate h*. h itself is only needed to report the primal
// objective and may be absent.
struct DcProblem {
    std::shared_ptr<ProximableFunction> g;       // on H
    std::shared_ptr<SmoothConvexFunction> phi;   // on H
    std::shared_ptr<ProximableFunction> h_conj;  // on G; value() is h*, prox() is Prox_{mu h*}
    std::function<double(const DenseVector&)> h_value;  // optional
    LinearMap K;

    bool has_h_value() const { return static_cast<bool>(h_value); }
};

// Primal-dual merit function Phi(x, y) = g(x) + phi(x) + h*(y) - <y, Kx>.
// Returns +inf when y lies outside dom h* (or x outside dom g).
double pd_energy(const DcProblem& p, const DenseVector& x, const DenseVector& y);

// g(x) + phi(x) - h(Kx); NaN when no h evaluator is attached.
double primal_value(const DcProblem& p, const DenseVector& x);

// Step-size schedules with their certified inf/sup bounds. The bounds are
// exact for constant schedules and must be supplied for custom ones.
struct StepSizes {
    std::function<double(std::size_t)> gamma;
    std::function<double(std::size_t)> mu;
    double beta = kInf;
    double gamma_inf = 0.0, gamma_sup = 0.0;
    double mu_inf = 0.0, mu_sup = 0.0;

    static StepSizes constant(double gamma, double mu, double beta);
    // Enforces 0 < inf gamma <= sup gamma < 2 beta and 0 < inf mu <= sup mu
    // < +inf; with strict_kl additionally sup gamma < beta.
    void validate(bool strict_kl = false) const;
};

struct SolverState {
    std::size_t n = 0;
    DenseVector x, y;
    double phi_val = 0.0;   // Phi(x_n, y_n)
    double phi_mid = 0.0;   // Phi(x_n, y_{n-1}) of the step that produced this state
    double primal = 0.0;    // g + phi - h(Kx), NaN if unavailable
    double dx = 0.0, dy = 0.0;
    double x_star_norm = 0.0, y_star_norm = 0.0;
    double residual = 0.0;  // ||(x*_n, y*_n)||
    DenseVector grad;       // gradient of phi at x
    DenseVector Kx;
    std::size_t inner_iters = 0;
    bool inner_converged = true;
};

// Initial state at (x0, y0); throws std::invalid_argument when the energy is
// not finite there (y0 must lie in dom h*).
SolverState make_state(const DcProblem& p, DenseVector x0, DenseVector y0);

struct StepMonitor {
    bool check = true;      // verify the descent chain and per-step gap bounds
    double slack = 1e-10;   // scaled by (1 + |Phi|)
};

// Raised when a monitored step violates a descent certificate beyond slack.
class CertificateViolation : public std::runtime_error {
public:
    explicit CertificateViolation(const std::string& what) : std::runtime_error(what) {}
};

// One iteration:
//   x_{n+1} = Prox_{gamma g}(x_n + gamma K* y_n - gamma grad phi(x_n))
//   y_{n+1} = Prox_{mu h*}(y_n + mu K x_{n+1})
// refreshing energies, gap norms and the subgradient residual.
SolverState dc_step(const DcProblem& p, const SolverState& s, double gamma_n, double mu_n,
                    const StepMonitor& monitor = {});

// Norms of the constructed subgradient element of the limiting
// subdifferential of Phi at the current pair:
//   x*_n = (x_{n-1} - x_n)/gamma + grad phi(x_n) - grad phi(x_{n-1}) + K*(y_{n-1} - y_n)
//   y*_n = (y_{n-1} - y_n)/mu
std::pair<double, double> criticality_residual(const DcProblem& p, const SolverState& prev,
                                               const SolverState& cur, double gamma, double mu);

enum class RunStatus { converged, max_iters, fixed_point };

struct StoppingRule {
    double tol_residual = 1e-6;  // scaled by (1 + ||x0||)
    double tol_dxdy = 0.0;       // fixed-point detection on max(dx, dy)
    std::size_t max_iters = 50;
};

struct TrajectoryRecord {
    std::size_t n = 0;
    double phi = 0.0;
    double primal = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    double residual = 0.0;
    std::size_t inner_iters = 0;
    double wall_ms = 0.0;
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;
    RunStatus status = RunStatus::max_iters;
    double initial_phi = 0.0;
    double initial_primal = 0.0;
    StepSizes steps;
    double norm_K = 0.0;  // certified bound of K, for the diagnostics
    DenseVector final_x, final_y;
};

struct RunOptions {
    StepSizes steps;
    StoppingRule stopping;
    bool strict_kl = false;
    StepMonitor monitor;
    std::function<void(const SolverState&)> on_iterate;
};

Trajectory run(const DcProblem& p, const DenseVector& x0, const DenseVector& y0,
               const RunOptions& opts);

// ---- Diagnostics ----------------------------------------------------------

// sqrt((1/gamma_n - 1/(2 beta)) dx^2 + (1/mu_n) dy^2): the square root of the
// guaranteed per-step energy decrement.
double step_decrement(double dx, double dy, double gamma_n, double mu_n, double beta);
// Bound on ||(x*_n, y*_n)|| / decrement_{n-1}:
// sqrt(max{4 beta / (gamma (2 beta - gamma)), (1 + 2 ||K||^2 mu^2) / mu}),
// evaluated at the step sizes of the producing step. The overload taking a
// schedule returns the worst case over the schedule bounds.
double residual_decrement_ratio(double gamma_prev, double mu_prev, double beta, double norm_K);
double residual_decrement_ratio(const StepSizes& s, double norm_K);

struct SummabilityReport {
    double sum_dx2 = 0.0;
    double sum_dy2 = 0.0;
    double tail_slope = 0.0;   // log-log slope of delta_n over the tail
    bool slope_defined = false;
    double bound = 0.0;        // (Phi_0 - Phi_N) / min(1/gamma_sup - 1/(2 beta), 1/mu_sup)
    bool bound_holds = false;
};

// Requires at least 10 records.
SummabilityReport summability_report(const Trajectory& t);

enum class RateRegime { finite, linear, sublinear };

struct RateFitResult {
    RateRegime regime = RateRegime::finite;
    double q_or_exponent = 0.0;  // q of c q^n, or the power-law exponent
    double r2 = 0.0;
};

// Least-squares fit of log delta against n (linear regime) and against
// log n (sublinear regime); the better r^2 wins. A delta that reaches
// exactly zero classifies as finite.
RateFitResult fit_rate(const std::vector<double>& delta, const std::vector<double>& n_values,
                       std::size_t window);
RateFitResult rate_fit(const Trajectory& t, std::size_t window);

// CSV with header n,phi,primal,dx,dy,residual,inner_iters,wall_ms and 17
// significant digits. Timings are serialized as 0 unless include_timing is
// set, so repeated runs produce byte-identical files.
void write_trajectory_csv(const Trajectory& t, const std::filesystem::path& path,
                          bool include_timing = false);

}  // namespace dcprox
