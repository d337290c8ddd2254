#include <cmath>
#include <random>

#include "dcprox/imaging.hpp"
#include "dcprox/linop.hpp"
#include "doctest.h"

using namespace dcprox;

TEST_CASE("inner product") {
    DenseVector a({1, 2, 1}, {1.0, 2.0});
    DenseVector b({1, 2, 1}, {3.0, 4.0});
    CHECK(inner(a, b) == doctest::Approx(11.0).epsilon(1e-15));

    DenseVector z({1, 2, 1});
    CHECK(inner(a, z) == 0.0);

    DenseVector c({1, 3, 1}, {1.0, 2.0, 3.0});
    CHECK_THROWS_AS(inner(a, c), std::invalid_argument);
}

TEST_CASE("inner matches a scalar-loop oracle on random 16-vectors") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        DenseVector a({1, 16, 1});
        DenseVector b({1, 16, 1});
        for (auto& v : a.data) v = dist(gen);
        for (auto& v : b.data) v = dist(gen);
        double expected = 0.0;
        for (std::size_t i = 0; i < 16; ++i) expected += a[i] * b[i];
        CHECK(std::abs(inner(a, b) - expected) <= 1e-14);
    }
}

TEST_CASE("adjoint_test certifies shipped maps and catches a broken adjoint") {
    CHECK(adjoint_test(identity_map({4, 4, 1}), 10, 1) <= 1e-15);
    CHECK(adjoint_test(discrete_gradient({8, 8}), 100, 2) <= 1e-12);

    // sign-flipped adjoint
    LinearMap broken = discrete_gradient({8, 8});
    auto adj = broken.adjoint_fn;
    broken.adjoint_fn = [adj](const DenseVector& y) { return scaled(adj(y), -1.0); };
    CHECK(adjoint_test(broken, 10, 3) > 0.1);
}

TEST_CASE("power_norm on known spectra") {
    DenseVector diag({1, 2, 1}, {3.0, 1.0});
    CHECK(power_norm(diagonal_map(diag), 100, 5) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(power_norm(identity_map({3, 3, 1}), 5, 7) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("power_norm of the discrete gradient approaches the eigenvalue oracle") {
    const LinearMap D = discrete_gradient({64, 64});
    const double est = power_norm(D, 300, 11);
    CHECK(est >= 2.7);
    CHECK(est <= std::sqrt(8.0) + 1e-9);
    CHECK(est <= D.norm_bound + 1e-9);
    // the top of the spectrum is clustered, so the estimate approaches the
    // eigenvalue oracle from below
    const double exact = std::sqrt(discrete_gradient_norm_squared({64, 64}));
    CHECK(est <= exact + 1e-9);
    CHECK(est >= exact - 5e-3);
}

TEST_CASE("power_norm estimates are nondecreasing in iters") {
    const LinearMap D = discrete_gradient({16, 16});
    double prev = 0.0;
    for (std::size_t iters = 1; iters <= 30; ++iters) {
        const double est = power_norm(D, iters, 13);
        CHECK(est >= prev - 1e-12);
        prev = est;
    }
}

TEST_CASE("power_norm rejects a zero-dimension map") {
    LinearMap empty;
    empty.domain_shape = {0, 0, 1};
    empty.codomain_shape = {0, 0, 1};
    CHECK_THROWS_AS(power_norm(empty, 10, 1), std::invalid_argument);
}

TEST_CASE("linearity of forward maps") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const LinearMap D = discrete_gradient({12, 9});
    for (int trial = 0; trial < 10; ++trial) {
        DenseVector x({12, 9, 1}), y({12, 9, 1});
        for (auto& v : x.data) v = dist(gen);
        for (auto& v : y.data) v = dist(gen);
        const double a = dist(gen), b = dist(gen);
        DenseVector lhs = D.forward(add(scaled(x, a), scaled(y, b)));
        DenseVector rhs = add(scaled(D.forward(x), a), scaled(D.forward(y), b));
        CHECK(distance(lhs, rhs) <= 1e-12 * (1.0 + norm(lhs)));
    }
}
