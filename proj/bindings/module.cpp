#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dcprox/harness.hpp"

namespace py = pybind11;
using namespace dcprox;

namespace {

// Images map to 2-D arrays (rows, cols); gradient fields to (2, rows, cols).
DenseVector from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() == 2) {
        DenseVector v({static_cast<std::size_t>(a.shape(0)),
                       static_cast<std::size_t>(a.shape(1)), 1});
        std::copy(a.data(), a.data() + v.size(), v.data.begin());
        return v;
    }
    if (a.ndim() == 3 && a.shape(0) == 2) {
        DenseVector v({static_cast<std::size_t>(a.shape(1)),
                       static_cast<std::size_t>(a.shape(2)), 2});
        std::copy(a.data(), a.data() + v.size(), v.data.begin());
        return v;
    }
    throw std::invalid_argument("expected a (rows, cols) or (2, rows, cols) array");
}

py::array_t<double> to_array(const DenseVector& v) {
    if (v.shape.planes == 1) {
        py::array_t<double> a({v.shape.rows, v.shape.cols});
        std::copy(v.data.begin(), v.data.end(), a.mutable_data());
        return a;
    }
    py::array_t<double> a({v.shape.planes, v.shape.rows, v.shape.cols});
    std::copy(v.data.begin(), v.data.end(), a.mutable_data());
    return a;
}

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

class PyOperator {
public:
    explicit PyOperator(LinearMap map) : map_(std::move(map)) {}

    py::array_t<double> forward(const Array& x) const { return to_array(map_.forward(from_array(x))); }
    py::array_t<double> adjoint(const Array& y) const { return to_array(map_.adjoint(from_array(y))); }
    double norm_bound() const { return map_.norm_bound; }
    double adjoint_defect(std::size_t trials, std::uint64_t seed) const {
        return adjoint_test(map_, trials, seed);
    }
    double power_norm_estimate(std::size_t iters, std::uint64_t seed) const {
        return power_norm(map_, iters, seed);
    }
    const LinearMap& map() const { return map_; }

private:
    LinearMap map_;
};

PenaltyKind kind_from_string(const std::string& name) { return penalty_from_name(name); }

py::dict solve_model(const Array& observed, const std::string& penalty, double mu, double param,
                     double scad_a, std::size_t iterations, double blur_std,
                     const std::string& boundary, double inner_tol, std::size_t max_inner,
                     bool warm_start, bool strict_kl, double tol_residual) {
    const DenseVector b = from_array(observed);
    const ImageShape shape{b.shape.rows, b.shape.cols};
    BlurSpec blur;
    blur.std_dev = blur_std;
    blur.boundary = boundary == "symmetric" ? Boundary::symmetric : Boundary::periodic;
    const LinearMap L = blur_std > 0.0 ? gaussian_blur(blur, shape)
                                       : identity_map({shape.rows, shape.cols, 1});

    ModelSpec ms;
    ms.penalty = kind_from_string(penalty);
    ms.mu = mu;
    ms.inner = {inner_tol, max_inner, warm_start};
    switch (ms.penalty) {
        case PenaltyKind::scad:
            ms.params.lambda = param;
            ms.params.a_scad = scad_a;
            break;
        case PenaltyKind::zhang:
            ms.params.a_zhang = param;
            break;
        case PenaltyKind::lzox:
            ms.params.alpha = param;
            break;
    }

    DcProblem problem = assemble_model(ms, b, L);
    const double step = 1.0 / (8.0 * mu);
    RunOptions opts;
    opts.steps = StepSizes::constant(step, step, 1.0 / (mu * L.norm_bound * L.norm_bound));
    opts.stopping.max_iters = iterations;
    opts.stopping.tol_residual = tol_residual;
    opts.strict_kl = strict_kl;

    const DenseVector y0 = initial_dual(ms, problem.K.forward(b));
    Trajectory traj;
    {
        py::gil_scoped_release release;
        traj = run(problem, b, y0, opts);
    }

    py::list phi, primal, dx, dy, residual, inner_iters;
    for (const auto& r : traj.records) {
        phi.append(r.phi);
        primal.append(r.primal);
        dx.append(r.dx);
        dy.append(r.dy);
        residual.append(r.residual);
        inner_iters.append(r.inner_iters);
    }
    py::dict out;
    out["x"] = to_array(traj.final_x);
    out["y"] = to_array(traj.final_y);
    out["phi"] = phi;
    out["primal"] = primal;
    out["dx"] = dx;
    out["dy"] = dy;
    out["residual"] = residual;
    out["inner_iters"] = inner_iters;
    out["initial_phi"] = traj.initial_phi;
    out["status"] = traj.status == RunStatus::converged
                        ? "converged"
                        : (traj.status == RunStatus::fixed_point ? "fixed_point" : "max_iters");
    return out;
}

}  // namespace

PYBIND11_MODULE(_dcprox, m) {
    m.doc() = "double-proximal difference-of-convex solver";

    py::class_<PyOperator>(m, "LinearOperator")
        .def("forward", &PyOperator::forward)
        .def("adjoint", &PyOperator::adjoint)
        .def_property_readonly("norm_bound", &PyOperator::norm_bound)
        .def("adjoint_defect", &PyOperator::adjoint_defect, py::arg("trials") = 25,
             py::arg("seed") = 0)
        .def("power_norm", &PyOperator::power_norm_estimate, py::arg("iters") = 100,
             py::arg("seed") = 0);

    m.def("discrete_gradient", [](std::size_t rows, std::size_t cols) {
        return PyOperator(discrete_gradient({rows, cols}));
    }, py::arg("rows"), py::arg("cols"));

    m.def("gaussian_blur", [](std::size_t rows, std::size_t cols, double std_dev,
                              const std::string& boundary) {
        BlurSpec spec;
        spec.std_dev = std_dev;
        spec.boundary = boundary == "symmetric" ? Boundary::symmetric : Boundary::periodic;
        return PyOperator(gaussian_blur(spec, {rows, cols}));
    }, py::arg("rows"), py::arg("cols"), py::arg("std_dev"), py::arg("boundary") = "periodic");

    m.def("scad_value", [](const Array& z, double lam, double a) {
        return scad_value(from_array(z), lam, a);
    }, py::arg("z"), py::arg("lambda"), py::arg("a"));
    m.def("scad_h_value", [](const Array& z, double lam, double a) {
        return scad_h_value(from_array(z), lam, a);
    }, py::arg("z"), py::arg("lambda"), py::arg("a"));
    m.def("zhang_value", [](const Array& z, double a) { return zhang_value(from_array(z), a); });
    m.def("zhang_h_value", [](const Array& z, double a) { return zhang_h_value(from_array(z), a); });
    m.def("cross_norm", [](const Array& y) { return cross_norm(from_array(y)); });

    m.def("prox_scad_conj", [](double gamma, const Array& z, double lam, double a) {
        return to_array(prox_scad_conj(gamma, from_array(z), lam, a));
    }, py::arg("gamma"), py::arg("z"), py::arg("lambda"), py::arg("a"));
    m.def("prox_scad_conj_scalar", &prox_scad_conj_scalar, py::arg("gamma"), py::arg("z"),
          py::arg("lambda"), py::arg("a"));
    m.def("prox_zhang_conj", [](double gamma, const Array& z, double a) {
        return to_array(prox_zhang_conj(gamma, from_array(z), a));
    }, py::arg("gamma"), py::arg("z"), py::arg("a"));
    m.def("prox_zhang_conj_scalar", &prox_zhang_conj_scalar, py::arg("gamma"), py::arg("z"),
          py::arg("a"));
    m.def("prox_crossnorm_conj", [](double gamma, const Array& y, double alpha) {
        return to_array(prox_crossnorm_conj(gamma, from_array(y), alpha));
    }, py::arg("gamma"), py::arg("y"), py::arg("alpha"));

    m.def("prox_aniso_tv", [](double gamma, const Array& b, double inner_tol,
                              std::size_t max_inner) {
        const DenseVector bb = from_array(b);
        const LinearMap D = discrete_gradient({bb.shape.rows, bb.shape.cols});
        const TvProxResult r = prox_aniso_tv(gamma, bb, D, inner_tol, max_inner);
        py::dict out;
        out["x"] = to_array(r.x);
        out["dual"] = to_array(r.dual);
        out["gap"] = r.gap;
        out["iters"] = r.iters;
        out["converged"] = r.converged;
        return out;
    }, py::arg("gamma"), py::arg("b"), py::arg("inner_tol") = 1e-4, py::arg("max_inner") = 500);

    m.def("isnr", [](const Array& original, const Array& observed, const Array& restored) {
        return isnr(from_array(original), from_array(observed), from_array(restored));
    }, py::arg("original"), py::arg("observed"), py::arg("restored"));

    m.def("degrade", [](const Array& original, double blur_std, double noise_std,
                        std::uint64_t seed, const std::string& boundary) {
        BlurSpec spec;
        spec.std_dev = blur_std;
        spec.boundary = boundary == "symmetric" ? Boundary::symmetric : Boundary::periodic;
        return to_array(degrade(from_array(original), spec, noise_std, seed));
    }, py::arg("original"), py::arg("blur_std"), py::arg("noise_std"), py::arg("seed") = 1,
       py::arg("boundary") = "periodic");

    m.def("synthetic_texture", [](std::size_t rows, std::size_t cols, std::uint64_t seed) {
        return to_array(synthetic_texture({rows, cols}, seed));
    }, py::arg("rows"), py::arg("cols"), py::arg("seed") = 1);

    m.def("solve", &solve_model, py::arg("observed"), py::arg("penalty"), py::arg("mu"),
          py::arg("param"), py::arg("scad_a") = 3.7, py::arg("iterations") = 50,
          py::arg("blur_std") = 2.0, py::arg("boundary") = "periodic",
          py::arg("inner_tol") = 1e-4, py::arg("max_inner") = 500, py::arg("warm_start") = true,
          py::arg("strict_kl") = false, py::arg("tol_residual") = 1e-6,
          "Assemble the restoration model for an observed image and run the solver with "
          "step sizes 1/(8 mu).");

    m.def("fit_rate", [](const std::vector<double>& delta, std::size_t window) {
        std::vector<double> ns(delta.size());
        for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = static_cast<double>(i + 1);
        const RateFitResult r = fit_rate(delta, ns, window);
        py::dict out;
        out["regime"] = r.regime == RateRegime::finite
                            ? "finite"
                            : (r.regime == RateRegime::linear ? "linear" : "sublinear");
        out["q_or_exponent"] = r.q_or_exponent;
        out["r2"] = r.r2;
        return out;
    }, py::arg("delta"), py::arg("window"));
}
