#pragma once

#include <cstdint>
#include <filesystem>

#include "dcprox/solver.hpp"

namespace dcprox {

// Grayscale image geometry; pixel values use the [0, 1] convention.
struct ImageShape {
    std::size_t rows = 0;
    std::size_t cols = 0;
};

// Forward-difference gradient D = (K1, K2): vertical differences in plane 0,
// horizontal in plane 1, zero-padded at the last row/column. The adjoint is
// the matching negative divergence; the certified norm bound is sqrt(8).
LinearMap discrete_gradient(ImageShape shape);

// Largest eigenvalue of D*D for an m x n grid (path-graph Laplacian sum);
// oracle for the power-iteration tests.
double discrete_gradient_norm_squared(ImageShape shape);

enum class Boundary { symmetric, periodic };

struct BlurSpec {
    double std_dev = 2.0;
    Boundary boundary = Boundary::periodic;
    std::size_t radius = 0;  // 0: defaults to ceil(4 * std_dev)
};

// Normalized 1-D Gaussian taps of length 2*radius + 1.
std::vector<double> gaussian_kernel(double std_dev, std::size_t radius);

// Separable Gaussian convolution. Self-adjoint under both boundary rules
// (the adjoint reuses the forward closure), preserves constants, norm
// bound 1.
LinearMap gaussian_blur(const BlurSpec& spec, ImageShape shape);

enum class PenaltyKind { scad, zhang, lzox };

struct ModelSpec {
    PenaltyKind penalty = PenaltyKind::lzox;
    PenaltyParams params;
    double mu = 20.0;  // data-term weight
    TvProxOptions inner;
};

// Assembles the restoration model  min (mu/2)||Lx - b||^2 + J(Dx)  as a
// DcProblem with K = D:
//   SCAD:  g = lambda ||D.||_1,  h* prox = prox_scad_conj
//   Zhang: g = (1/a) ||D.||_1,   h* prox = prox_zhang_conj
//   LZOX:  g = ||D.||_1,         h* prox = projection onto the alpha-ball
DcProblem assemble_model(const ModelSpec& spec, const DenseVector& b, const LinearMap& L);

// Initial dual point y0 in the subdifferential of h at Kx0 (componentwise or
// pixelwise selection, 0 where multivalued).
DenseVector initial_dual(const ModelSpec& spec, const DenseVector& Kx0);

// 10 log10(||x - b||^2 / ||x - x_k||^2); +inf when the restoration is exact.
double isnr(const DenseVector& original, const DenseVector& observed,
            const DenseVector& restored);

// b = round_255(clamp_[0,1](L x + noise)) with seeded Gaussian noise drawn in
// pixel order; deterministic given the seed.
DenseVector degrade(const DenseVector& original, const BlurSpec& spec, double noise_std,
                    std::uint64_t seed);

// Deterministic piecewise-constant test texture (seeded sum of thresholded
// sinusoids), values in [0, 1].
DenseVector synthetic_texture(ImageShape shape, std::uint64_t seed);

// 8-bit binary PGM (P5), values mapped linearly to [0, 1].
DenseVector read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const DenseVector& image);

}  // namespace dcprox
