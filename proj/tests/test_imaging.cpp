#include <cmath>
#include <random>

#include "dcprox/imaging.hpp"
#include "doctest.h"

using namespace dcprox;

namespace {

DenseVector random_vec(Shape s, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    DenseVector v(s);
    for (auto& x : v.data) x = dist(gen);
    return v;
}

}  // namespace

TEST_CASE("discrete gradient of a constant image vanishes") {
    DenseVector c({5, 7, 1});
    for (auto& v : c.data) v = 0.42;
    CHECK(norm(discrete_gradient({5, 7}).forward(c)) == 0.0);
}

TEST_CASE("discrete gradient on the 2x2 hand example") {
    // image ((0,1),(0,1)): columns differ, rows do not
    DenseVector x({2, 2, 1}, {0.0, 1.0, 0.0, 1.0});
    const DenseVector y = discrete_gradient({2, 2}).forward(x);
    // vertical differences vanish
    CHECK(y.at(0, 0, 0) == 0.0);
    CHECK(y.at(0, 1, 0) == 0.0);
    CHECK(y.at(1, 0, 0) == 0.0);
    CHECK(y.at(1, 1, 0) == 0.0);
    // horizontal differences are 1 in the first column, 0 in the padded one
    CHECK(y.at(0, 0, 1) == 1.0);
    CHECK(y.at(1, 0, 1) == 1.0);
    CHECK(y.at(0, 1, 1) == 0.0);
    CHECK(y.at(1, 1, 1) == 0.0);
}

TEST_CASE("discrete gradient adjoint and norm certificates") {
    for (auto shape : {ImageShape{8, 8}, ImageShape{16, 12}, ImageShape{33, 47}}) {
        const LinearMap D = discrete_gradient(shape);
        CHECK(adjoint_test(D, 100, 7) <= 1e-12);
        CHECK(D.norm_bound == doctest::Approx(std::sqrt(8.0)));
    }
    const double est = power_norm(discrete_gradient({32, 32}), 400, 3);
    CHECK(est * est >= 7.5);
    CHECK(est * est <= 8.0);
    const double exact = std::sqrt(discrete_gradient_norm_squared({32, 32}));
    CHECK(est <= exact + 1e-9);
    CHECK(est >= exact - 5e-3);
}

TEST_CASE("gaussian blur preserves constants and is self-adjoint") {
    for (auto boundary : {Boundary::periodic, Boundary::symmetric}) {
        const BlurSpec spec{2.0, boundary};
        const LinearMap L = gaussian_blur(spec, {16, 16});
        DenseVector c({16, 16, 1});
        for (auto& v : c.data) v = 0.7;
        CHECK(distance(L.forward(c), c) <= 1e-12);
        CHECK(adjoint_test(L, 50, 11) <= 1e-12);
        CHECK(power_norm(L, 100, 13) <= 1.0 + 1e-9);
    }
}

TEST_CASE("gaussian blur impulse response is the sampled symmetric kernel") {
    const BlurSpec spec{1.0, Boundary::periodic, 3};
    const LinearMap L = gaussian_blur(spec, {9, 9});
    DenseVector delta({9, 9, 1});
    delta.at(4, 4) = 1.0;
    const DenseVector response = L.forward(delta);
    const std::vector<double> k = gaussian_kernel(1.0, 3);
    for (int di = -3; di <= 3; ++di) {
        for (int dj = -3; dj <= 3; ++dj) {
            const double expected = k[static_cast<std::size_t>(di + 3)] *
                                    k[static_cast<std::size_t>(dj + 3)];
            CHECK(response.at(static_cast<std::size_t>(4 + di), static_cast<std::size_t>(4 + dj)) ==
                  doctest::Approx(expected).epsilon(1e-12));
        }
    }
    CHECK(response.at(4, 3) == doctest::Approx(response.at(4, 5)));
    CHECK(response.at(3, 4) == doctest::Approx(response.at(5, 4)));
}

TEST_CASE("blur preserves the image mean under the periodic boundary") {
    const LinearMap L = gaussian_blur({2.5, Boundary::periodic}, {12, 12});
    const DenseVector x = random_vec({12, 12, 1}, 17);
    double mx = 0.0, my = 0.0;
    const DenseVector y = L.forward(x);
    for (double v : x.data) mx += v;
    for (double v : y.data) my += v;
    CHECK(std::abs(mx - my) / x.size() <= 1e-12);
}

TEST_CASE("assemble_model: LZOX with alpha = 0 keeps y at zero") {
    const DenseVector b = random_vec({8, 8, 1}, 23, 0.4);
    ModelSpec ms;
    ms.penalty = PenaltyKind::lzox;
    ms.params.alpha = 0.0;
    ms.mu = 10.0;
    const DcProblem p = assemble_model(ms, b, identity_map(b.shape));
    RunOptions opts;
    opts.steps = StepSizes::constant(1.0 / 80.0, 1.0 / 80.0, 1.0 / 10.0);
    opts.stopping.max_iters = 5;
    opts.stopping.tol_residual = -1.0;
    opts.stopping.tol_dxdy = -1.0;
    const Trajectory t = run(p, b, zeros({8, 8, 2}), opts);
    CHECK(norm(t.final_y) == 0.0);
}

TEST_CASE("assemble_model: SCAD decomposition matches the direct penalty") {
    const DenseVector b = random_vec({8, 8, 1}, 29, 0.4);
    ModelSpec ms;
    ms.penalty = PenaltyKind::scad;
    ms.params.lambda = 1.0;
    ms.params.a_scad = 3.7;
    ms.mu = 12.0;
    const LinearMap L = identity_map(b.shape);
    const DcProblem p = assemble_model(ms, b, L);
    const LinearMap D = discrete_gradient({8, 8});

    // primal objective at x = b equals (mu/2)||Lb - b||^2 + SCAD(Db)
    const double via_model = primal_value(p, b);
    const double direct = scad_value(D.forward(b), 1.0, 3.7);
    CHECK(via_model == doctest::Approx(direct).epsilon(1e-10));

    for (std::uint64_t t = 0; t < 5; ++t) {
        const DenseVector x = random_vec({8, 8, 1}, 31 + t, 0.8);
        const double decomposed = p.g->value(x) - p.h_value(p.K.forward(x));
        const double penalty = scad_value(D.forward(x), 1.0, 3.7);
        CHECK(decomposed == doctest::Approx(penalty).epsilon(1e-10));
    }
}

TEST_CASE("assemble_model: Zhang decomposition matches the direct penalty") {
    const DenseVector b = random_vec({8, 8, 1}, 37, 0.4);
    ModelSpec ms;
    ms.penalty = PenaltyKind::zhang;
    ms.params.a_zhang = 1.4;
    ms.mu = 12.0;
    const DcProblem p = assemble_model(ms, b, identity_map(b.shape));
    const LinearMap D = discrete_gradient({8, 8});
    for (std::uint64_t t = 0; t < 5; ++t) {
        const DenseVector x = random_vec({8, 8, 1}, 41 + t, 0.8);
        const double decomposed = p.g->value(x) - p.h_value(p.K.forward(x));
        CHECK(decomposed == doctest::Approx(zhang_value(D.forward(x), 1.4)).epsilon(1e-10));
    }
}

TEST_CASE("LZOX concave part never exceeds the convex part") {
    for (std::uint64_t t = 0; t < 10; ++t) {
        const DenseVector z = random_vec({6, 6, 2}, 47 + t, 3.0);
        for (double alpha : {0.0, 0.3, 1.0}) {
            CHECK(alpha * cross_norm(z) <= norm1(z) + 1e-12);
        }
    }
}

TEST_CASE("isnr formula and sentinels") {
    const DenseVector x = random_vec({4, 4, 1}, 53);
    const DenseVector b = random_vec({4, 4, 1}, 54);
    CHECK(isnr(x, b, b) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(isnr(x, b, x) == kInf);

    // ||x - b|| = 2 ||x - xk|| -> 10 log10 4
    DenseVector xk = x;
    DenseVector obs = x;
    xk[0] += 0.5;
    obs[0] += 1.0;
    CHECK(isnr(x, obs, xk) == doctest::Approx(10.0 * std::log10(4.0)).epsilon(1e-12));
}

TEST_CASE("degrade: quantization, determinism, noise statistics") {
    // noise-free, (numerically) identity blur: b is x rounded to 1/255 steps
    const DenseVector x0 = synthetic_texture({16, 16}, 2);
    const DenseVector b0 = degrade(x0, {1e-3, Boundary::periodic}, 0.0, 9);
    for (std::size_t i = 0; i < b0.size(); ++i)
        CHECK(b0[i] == doctest::Approx(std::round(x0[i] * 255.0) / 255.0).epsilon(1e-14));

    // all outputs are multiples of 1/255
    const DenseVector img = synthetic_texture({32, 32}, 4);
    const DenseVector b = degrade(img, {2.0, Boundary::periodic}, 50.0 / 255.0, 9);
    for (double v : b.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(std::abs(v * 255.0 - std::round(v * 255.0)) <= 1e-9);
    }

    // deterministic given the seed
    const DenseVector b2 = degrade(img, {2.0, Boundary::periodic}, 50.0 / 255.0, 9);
    CHECK(distance(b, b2) == 0.0);
    const DenseVector b3 = degrade(img, {2.0, Boundary::periodic}, 50.0 / 255.0, 10);
    CHECK(distance(b, b3) > 0.0);

    // sample standard deviation of b - Lx on a mid-gray image (no clamping)
    DenseVector gray({64, 64, 1});
    for (auto& v : gray.data) v = 0.5;
    const double sigma = 0.05;
    const DenseVector noisy = degrade(gray, {1.0, Boundary::periodic}, sigma, 11);
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        const double d = noisy[i] - 0.5;
        sum += d;
        sum2 += d * d;
    }
    const double nmean = sum / noisy.size();
    const double nstd = std::sqrt(sum2 / noisy.size() - nmean * nmean);
    CHECK(nstd == doctest::Approx(sigma).epsilon(0.05));
}

TEST_CASE("synthetic texture is deterministic, in range, nonconstant") {
    const DenseVector a = synthetic_texture({64, 64}, 12);
    const DenseVector b = synthetic_texture({64, 64}, 12);
    CHECK(distance(a, b) == 0.0);
    const DenseVector c = synthetic_texture({64, 64}, 13);
    CHECK(distance(a, c) > 0.0);
    double lo = 1.0, hi = 0.0;
    for (double v : a.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
    CHECK(hi - lo > 0.2);
}

TEST_CASE("PGM round trip") {
    const DenseVector img = synthetic_texture({24, 17}, 6);
    const auto path = std::filesystem::temp_directory_path() / "dcprox_test.pgm";
    write_pgm(path, img);
    const DenseVector back = read_pgm(path);
    CHECK(back.shape.rows == 24);
    CHECK(back.shape.cols == 17);
    // quantized to 1/255, so equal up to half a step
    CHECK(norm_inf(sub(back, img)) <= 0.5 / 255.0 + 1e-12);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(read_pgm("/nonexistent/file.pgm"), std::runtime_error);
}
