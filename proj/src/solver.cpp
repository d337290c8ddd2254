#include "dcprox/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dcprox {

double pd_energy(const DcProblem& p, const DenseVector& x, const DenseVector& y) {
    const DenseVector Kx = p.K.forward(x);
    const double gv = p.g->value(x);
    const double pv = p.phi->value(x);
    const double hv = p.h_conj->value(y);
    if (!std::isfinite(gv) || !std::isfinite(hv)) return kInf;
    return gv + pv + hv - inner(y, Kx);
}

double primal_value(const DcProblem& p, const DenseVector& x) {
    if (!p.has_h_value()) return std::numeric_limits<double>::quiet_NaN();
    const DenseVector Kx = p.K.forward(x);
    return p.g->value(x) + p.phi->value(x) - p.h_value(Kx);
}

StepSizes StepSizes::constant(double gamma, double mu, double beta) {
    StepSizes s;
    s.gamma = [gamma](std::size_t) { return gamma; };
    s.mu = [mu](std::size_t) { return mu; };
    s.beta = beta;
    s.gamma_inf = s.gamma_sup = gamma;
    s.mu_inf = s.mu_sup = mu;
    return s;
}

void StepSizes::validate(bool strict_kl) const {
    if (!gamma || !mu) throw std::invalid_argument("StepSizes: schedules not set");
    if (!(beta > 0.0)) throw std::invalid_argument("StepSizes: beta must be > 0");
    if (!(gamma_inf > 0.0 && gamma_inf <= gamma_sup))
        throw std::invalid_argument("StepSizes: need 0 < inf gamma <= sup gamma");
    if (!(gamma_sup < 2.0 * beta))
        throw std::invalid_argument("StepSizes: need sup gamma < 2 beta");
    if (!(mu_inf > 0.0 && mu_inf <= mu_sup))
        throw std::invalid_argument("StepSizes: need 0 < inf mu <= sup mu");
    if (!std::isfinite(mu_sup))
        throw std::invalid_argument("StepSizes: need sup mu < +inf");
    if (strict_kl && !(gamma_sup < beta))
        throw std::invalid_argument("StepSizes: strict KL mode needs sup gamma < beta");
}

SolverState make_state(const DcProblem& p, DenseVector x0, DenseVector y0) {
    SolverState s;
    s.n = 0;
    s.Kx = p.K.forward(x0);
    s.grad = DenseVector(x0.shape);
    const double pv = p.phi->value_and_gradient(x0, s.grad);
    const double gv = p.g->value(x0);
    const double hv = p.h_conj->value(y0);
    const double phi_val = (!std::isfinite(gv) || !std::isfinite(hv))
                               ? kInf
                               : gv + pv + hv - inner(y0, s.Kx);
    if (!std::isfinite(phi_val))
        throw std::invalid_argument(
            "make_state: energy is not finite at the start (y0 must lie in dom h*)");
    s.phi_val = phi_val;
    s.phi_mid = phi_val;
    s.primal = p.has_h_value() ? gv + pv - p.h_value(s.Kx)
                               : std::numeric_limits<double>::quiet_NaN();
    s.x = std::move(x0);
    s.y = std::move(y0);
    return s;
}

SolverState dc_step(const DcProblem& p, const SolverState& s, double gamma_n, double mu_n,
                    const StepMonitor& monitor) {
    if (!(gamma_n > 0.0 && mu_n > 0.0))
        throw std::invalid_argument("dc_step: step sizes must be > 0");

    // x_{n+1} = Prox_{gamma g}(x_n + gamma K* y_n - gamma grad phi(x_n))
    DenseVector forward = s.x;
    add_scaled(forward, gamma_n, p.K.adjoint(s.y));
    add_scaled(forward, -gamma_n, s.grad);
    DenseVector x1 = p.g->prox(gamma_n, forward);
    const ProxStats gstats = p.g->last_prox_stats();

    // y_{n+1} = Prox_{mu h*}(y_n + mu K x_{n+1})
    DenseVector Kx1 = p.K.forward(x1);
    DenseVector w = s.y;
    add_scaled(w, mu_n, Kx1);
    DenseVector y1 = p.h_conj->prox(mu_n, w);

    SolverState t;
    t.n = s.n + 1;
    t.dx = distance(s.x, x1);
    t.dy = distance(s.y, y1);

    const double gx1 = p.g->value(x1);
    t.grad = DenseVector(x1.shape);
    const double px1 = p.phi->value_and_gradient(x1, t.grad);
    t.phi_mid = gx1 + px1 + p.h_conj->value(s.y) - inner(s.y, Kx1);
    t.phi_val = gx1 + px1 + p.h_conj->value(y1) - inner(y1, Kx1);
    t.primal = p.has_h_value() ? gx1 + px1 - p.h_value(Kx1)
                               : std::numeric_limits<double>::quiet_NaN();

    // Subgradient element of the limiting subdifferential of Phi at the new
    // pair; its norm is the criticality residual.
    DenseVector xs = sub(s.x, x1);
    for (double& v : xs.data) v /= gamma_n;
    add_scaled(xs, 1.0, t.grad);
    add_scaled(xs, -1.0, s.grad);
    add_scaled(xs, 1.0, p.K.adjoint(sub(s.y, y1)));
    t.x_star_norm = norm(xs);
    t.y_star_norm = t.dy / mu_n;
    t.residual = std::hypot(t.x_star_norm, t.y_star_norm);

    t.inner_iters = gstats.inner_iters;
    t.inner_converged = gstats.converged;
    t.x = std::move(x1);
    t.y = std::move(y1);
    t.Kx = std::move(Kx1);

    if (monitor.check && std::isfinite(s.phi_val)) {
        const double beta = p.phi->beta();
        if (gamma_n <= 2.0 * beta) {
            const double tol = monitor.slack * (1.0 + std::abs(s.phi_val));
            auto fail = [&](const char* what, double lhs, double rhs) {
                std::ostringstream os;
                os << "certificate violation at iteration " << t.n << ": " << what
                   << " (lhs=" << lhs << ", rhs=" << rhs << ", slack=" << tol << ")";
                throw CertificateViolation(os.str());
            };
            if (t.phi_mid > s.phi_val + tol)
                fail("Phi(x_{n+1}, y_n) <= Phi(x_n, y_n)", t.phi_mid, s.phi_val);
            if (t.phi_val > t.phi_mid + tol)
                fail("Phi(x_{n+1}, y_{n+1}) <= Phi(x_{n+1}, y_n)", t.phi_val, t.phi_mid);
            const double half_beta = 1.0 / (2.0 * beta);  // 0 when beta is +inf
            if (t.phi_mid - s.phi_val > (half_beta - 1.0 / gamma_n) * t.dx * t.dx + tol)
                fail("x-gap bound", t.phi_mid - s.phi_val,
                     (half_beta - 1.0 / gamma_n) * t.dx * t.dx);
            if (t.phi_val - t.phi_mid > -(1.0 / mu_n) * t.dy * t.dy + tol)
                fail("y-gap bound", t.phi_val - t.phi_mid, -(1.0 / mu_n) * t.dy * t.dy);
        }
    }
    return t;
}

std::pair<double, double> criticality_residual(const DcProblem& p, const SolverState& prev,
                                               const SolverState& cur, double gamma, double mu) {
    if (cur.n == 0)
        throw std::invalid_argument("criticality_residual: not available at n = 0");
    if (cur.n != prev.n + 1)
        throw std::invalid_argument("criticality_residual: states must be consecutive");
    DenseVector xs = sub(prev.x, cur.x);
    for (double& v : xs.data) v /= gamma;
    add_scaled(xs, 1.0, p.phi->gradient(cur.x));
    add_scaled(xs, -1.0, p.phi->gradient(prev.x));
    add_scaled(xs, 1.0, p.K.adjoint(sub(prev.y, cur.y)));
    const DenseVector ys = sub(prev.y, cur.y);
    return {norm(xs), norm(ys) / mu};
}

Trajectory run(const DcProblem& p, const DenseVector& x0, const DenseVector& y0,
               const RunOptions& opts) {
    opts.steps.validate(opts.strict_kl);
    SolverState s = make_state(p, x0, y0);

    Trajectory t;
    t.steps = opts.steps;
    t.norm_K = p.K.norm_bound;
    t.initial_phi = s.phi_val;
    t.initial_primal = s.primal;
    t.status = RunStatus::max_iters;

    const double residual_tol = opts.stopping.tol_residual * (1.0 + norm(x0));

    for (std::size_t it = 0; it < opts.stopping.max_iters; ++it) {
        const double gamma_n = opts.steps.gamma(s.n);
        const double mu_n = opts.steps.mu(s.n);
        const auto t0 = std::chrono::steady_clock::now();
        SolverState next = dc_step(p, s, gamma_n, mu_n, opts.monitor);
        const auto t1 = std::chrono::steady_clock::now();
        const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        t.records.push_back({next.n, next.phi_val, next.primal, next.dx, next.dy,
                             next.residual, next.inner_iters, ms});
        if (opts.on_iterate) opts.on_iterate(next);
        s = std::move(next);

        if (std::max(s.dx, s.dy) <= opts.stopping.tol_dxdy) {
            t.status = RunStatus::fixed_point;
            break;
        }
        if (s.residual < residual_tol) {
            t.status = RunStatus::converged;
            break;
        }
    }
    t.final_x = std::move(s.x);
    t.final_y = std::move(s.y);
    return t;
}

// ---- Diagnostics ----------------------------------------------------------

double step_decrement(double dx, double dy, double gamma_n, double mu_n, double beta) {
    const double cx = 1.0 / gamma_n - 1.0 / (2.0 * beta);
    const double v = std::max(cx, 0.0) * dx * dx + (1.0 / mu_n) * dy * dy;
    return std::sqrt(v);
}

double residual_decrement_ratio(double gamma_prev, double mu_prev, double beta, double norm_K) {
    const double term1 = std::isinf(beta)
                             ? 2.0 / gamma_prev
                             : 4.0 * beta / (gamma_prev * (2.0 * beta - gamma_prev));
    const double term2 = (1.0 + 2.0 * norm_K * norm_K * mu_prev * mu_prev) / mu_prev;
    return std::sqrt(std::max(term1, term2));
}

double residual_decrement_ratio(const StepSizes& s, double norm_K) {
    const double term1 = std::isinf(s.beta)
                             ? 2.0 / s.gamma_inf
                             : 4.0 * s.beta / (s.gamma_inf * (2.0 * s.beta - s.gamma_sup));
    const double term2 = (1.0 + 2.0 * norm_K * norm_K * s.mu_sup * s.mu_sup) / s.mu_inf;
    return std::sqrt(std::max(term1, term2));
}

namespace {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LineFit f;
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (syy == 0.0) {
        f.r2 = 1.0;
        return f;
    }
    double ss_res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += e * e;
    }
    f.r2 = 1.0 - ss_res / syy;
    return f;
}

std::vector<double> trajectory_deltas(const Trajectory& t) {
    std::vector<double> delta;
    delta.reserve(t.records.size());
    for (const auto& r : t.records) {
        const std::size_t k = r.n - 1;  // step index that produced this record
        delta.push_back(step_decrement(r.dx, r.dy, t.steps.gamma(k), t.steps.mu(k), t.steps.beta));
    }
    return delta;
}

}  // namespace

SummabilityReport summability_report(const Trajectory& t) {
    if (t.records.size() < 10)
        throw std::invalid_argument("summability_report: need at least 10 records");

    SummabilityReport rep;
    for (const auto& r : t.records) {
        rep.sum_dx2 += r.dx * r.dx;
        rep.sum_dy2 += r.dy * r.dy;
    }

    const double half_beta = 1.0 / (2.0 * t.steps.beta);
    const double eps = std::min(1.0 / t.steps.gamma_sup - half_beta, 1.0 / t.steps.mu_sup);
    if (eps > 0.0) {
        rep.bound = (t.initial_phi - t.records.back().phi) / eps;
        rep.bound_holds =
            rep.sum_dx2 + rep.sum_dy2 <= rep.bound * (1.0 + 1e-9) + 1e-12;
    }

    const std::vector<double> delta = trajectory_deltas(t);
    std::vector<double> xs, ys;
    for (std::size_t i = delta.size() / 2; i < delta.size(); ++i) {
        if (delta[i] > 0.0) {
            xs.push_back(std::log(static_cast<double>(t.records[i].n)));
            ys.push_back(std::log(delta[i]));
        }
    }
    if (xs.size() >= 2) {
        rep.tail_slope = least_squares(xs, ys).slope;
        rep.slope_defined = true;
    }
    return rep;
}

RateFitResult fit_rate(const std::vector<double>& delta, const std::vector<double>& n_values,
                       std::size_t window) {
    if (delta.size() != n_values.size())
        throw std::invalid_argument("fit_rate: sequence lengths differ");
    if (window < 2 || window > delta.size())
        throw std::invalid_argument("fit_rate: window must be in [2, length]");

    const std::size_t start = delta.size() - window;
    std::vector<double> ns, logn, logd;
    for (std::size_t i = start; i < delta.size(); ++i) {
        if (delta[i] == 0.0) return {RateRegime::finite, 0.0, 1.0};
        ns.push_back(n_values[i]);
        logn.push_back(std::log(n_values[i]));
        logd.push_back(std::log(delta[i]));
    }

    const LineFit lin = least_squares(ns, logd);
    const LineFit sub = least_squares(logn, logd);
    if (lin.r2 >= sub.r2) return {RateRegime::linear, std::exp(lin.slope), lin.r2};
    return {RateRegime::sublinear, sub.slope, sub.r2};
}

RateFitResult rate_fit(const Trajectory& t, std::size_t window) {
    const std::vector<double> delta = trajectory_deltas(t);
    std::vector<double> ns;
    ns.reserve(t.records.size());
    for (const auto& r : t.records) ns.push_back(static_cast<double>(r.n));
    return fit_rate(delta, ns, window);
}

void write_trajectory_csv(const Trajectory& t, const std::filesystem::path& path,
                          bool include_timing) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + path.string());
    out << "n,phi,primal,dx,dy,residual,inner_iters,wall_ms\n";
    char buf[512];
    for (const auto& r : t.records) {
        const double wall = include_timing ? r.wall_ms : 0.0;
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%.17g\n",
                      r.n, r.phi, r.primal, r.dx, r.dy, r.residual, r.inner_iters, wall);
        out << buf;
    }
    if (!out) throw std::runtime_error("write_trajectory_csv: write failed for " + path.string());
}

}  // namespace dcprox
