#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace dcprox {

// Shape of a flat sample array. Images live in H (planes == 1), discrete
// gradient fields in G (planes == 2). Storage is plane-major, row-major
// within each plane.
struct Shape {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t planes = 1;

    std::size_t size() const { return rows * cols * planes; }
    std::size_t plane_size() const { return rows * cols; }
    friend bool operator==(const Shape&, const Shape&) = default;
};

// Flat array of 64-bit reals with shape metadata.
struct DenseVector {
    Shape shape;
    std::vector<double> data;

    DenseVector() = default;
    explicit DenseVector(Shape s) : shape(s), data(s.size(), 0.0) {}
    DenseVector(Shape s, std::vector<double> values);

    std::size_t size() const { return data.size(); }
    double operator[](std::size_t i) const { return data[i]; }
    double& operator[](std::size_t i) { return data[i]; }

    std::size_t index(std::size_t r, std::size_t c, std::size_t p = 0) const {
        return p * shape.plane_size() + r * shape.cols + c;
    }
    double at(std::size_t r, std::size_t c, std::size_t p = 0) const {
        return data[index(r, c, p)];
    }
    double& at(std::size_t r, std::size_t c, std::size_t p = 0) {
        return data[index(r, c, p)];
    }
};

DenseVector zeros(Shape s);

double inner(const DenseVector& a, const DenseVector& b);
double norm(const DenseVector& v);
double norm1(const DenseVector& v);
double norm_inf(const DenseVector& v);
double distance(const DenseVector& a, const DenseVector& b);
bool all_finite(const DenseVector& v);

// y += alpha * x
void add_scaled(DenseVector& y, double alpha, const DenseVector& x);
DenseVector scaled(const DenseVector& x, double alpha);
DenseVector add(const DenseVector& a, const DenseVector& b);
DenseVector sub(const DenseVector& a, const DenseVector& b);

// Matrix-free linear operator: a forward/adjoint closure pair together with
// a certified upper bound on the operator norm. Implementations never
// materialize a matrix; composition bounds multiply.
struct LinearMap {
    Shape domain_shape;
    Shape codomain_shape;
    double norm_bound = 0.0;
    std::function<DenseVector(const DenseVector&)> forward_fn;
    std::function<DenseVector(const DenseVector&)> adjoint_fn;

    DenseVector forward(const DenseVector& x) const;
    DenseVector adjoint(const DenseVector& y) const;
};

LinearMap identity_map(Shape s);
// Entrywise scaling by d (self-adjoint); norm bound is max |d_i|.
LinearMap diagonal_map(DenseVector d);

// Deterministic standard-normal sample for the randomized certificates.
DenseVector random_normal(Shape s, std::uint64_t seed);

// max over trials of |<Kx, y> - <x, K*y>| / (||x|| ||y||).
double adjoint_test(const LinearMap& map, std::size_t trials, std::uint64_t seed);

// Power iteration on K*K. The returned estimate is nondecreasing in iters
// and never exceeds the true operator norm.
double power_norm(const LinearMap& map, std::size_t iters, std::uint64_t seed);

}  // namespace dcprox
