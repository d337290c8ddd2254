#include "dcprox/imaging.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

namespace dcprox {

namespace {

void require_image_shape(ImageShape s) {
    if (s.rows < 2 || s.cols < 2)
        throw std::invalid_argument("image shape must be at least 2 x 2");
}

std::size_t fold_periodic(long i, long m) {
    long r = i % m;
    if (r < 0) r += m;
    return static_cast<std::size_t>(r);
}

std::size_t fold_symmetric(long i, long m) {
    while (i < 0 || i >= m) {
        if (i < 0) i = -1 - i;
        if (i >= m) i = 2 * m - 1 - i;
    }
    return static_cast<std::size_t>(i);
}

}  // namespace

LinearMap discrete_gradient(ImageShape shape) {
    require_image_shape(shape);
    const std::size_t m = shape.rows, n = shape.cols;

    LinearMap D;
    D.domain_shape = {m, n, 1};
    D.codomain_shape = {m, n, 2};
    D.norm_bound = std::sqrt(8.0);

    D.forward_fn = [m, n](const DenseVector& x) {
        DenseVector y({m, n, 2});
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                y.at(i, j, 0) = (i + 1 < m) ? x.at(i + 1, j) - x.at(i, j) : 0.0;
                y.at(i, j, 1) = (j + 1 < n) ? x.at(i, j + 1) - x.at(i, j) : 0.0;
            }
        }
        return y;
    };

    D.adjoint_fn = [m, n](const DenseVector& y) {
        DenseVector x({m, n, 1});
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double v = 0.0;
                if (i > 0) v += y.at(i - 1, j, 0);
                if (i + 1 < m) v -= y.at(i, j, 0);
                if (j > 0) v += y.at(i, j - 1, 1);
                if (j + 1 < n) v -= y.at(i, j, 1);
                x.at(i, j) = v;
            }
        }
        return x;
    };
    return D;
}

double discrete_gradient_norm_squared(ImageShape shape) {
    require_image_shape(shape);
    const double m = static_cast<double>(shape.rows);
    const double n = static_cast<double>(shape.cols);
    const double pi = std::numbers::pi;
    const double sm = std::sin((m - 1.0) * pi / (2.0 * m));
    const double sn = std::sin((n - 1.0) * pi / (2.0 * n));
    return 4.0 * sm * sm + 4.0 * sn * sn;
}

std::vector<double> gaussian_kernel(double std_dev, std::size_t radius) {
    if (!(std_dev > 0.0)) throw std::invalid_argument("gaussian_kernel: std_dev must be > 0");
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double d = static_cast<double>(i) - static_cast<double>(radius);
        k[i] = std::exp(-d * d / (2.0 * std_dev * std_dev));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

LinearMap gaussian_blur(const BlurSpec& spec, ImageShape shape) {
    require_image_shape(shape);
    const std::size_t radius =
        spec.radius > 0 ? spec.radius
                        : static_cast<std::size_t>(std::ceil(4.0 * spec.std_dev));
    const std::vector<double> kernel = gaussian_kernel(spec.std_dev, radius);
    const std::size_t m = shape.rows, n = shape.cols;
    const bool periodic = spec.boundary == Boundary::periodic;

    auto apply = [m, n, radius, kernel, periodic](const DenseVector& x) {
        const long r = static_cast<long>(radius);
        auto fold = periodic ? fold_periodic : fold_symmetric;
        // horizontal pass
        DenseVector tmp({m, n, 1});
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (long k = -r; k <= r; ++k) {
                    const std::size_t jj = fold(static_cast<long>(j) + k, static_cast<long>(n));
                    s += kernel[static_cast<std::size_t>(k + r)] * x.at(i, jj);
                }
                tmp.at(i, j) = s;
            }
        }
        // vertical pass
        DenseVector out({m, n, 1});
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (long k = -r; k <= r; ++k) {
                    const std::size_t ii = fold(static_cast<long>(i) + k, static_cast<long>(m));
                    s += kernel[static_cast<std::size_t>(k + r)] * tmp.at(ii, j);
                }
                out.at(i, j) = s;
            }
        }
        return out;
    };

    LinearMap L;
    L.domain_shape = {m, n, 1};
    L.codomain_shape = {m, n, 1};
    L.norm_bound = 1.0;
    L.forward_fn = apply;
    L.adjoint_fn = apply;  // symmetric kernel, symmetric extension: self-adjoint
    return L;
}

DcProblem assemble_model(const ModelSpec& spec, const DenseVector& b, const LinearMap& L) {
    if (b.shape.planes != 1)
        throw std::invalid_argument("assemble_model: b must be a single-plane image");
    if (!(b.shape == L.domain_shape) || !(b.shape == L.codomain_shape))
        throw std::invalid_argument("assemble_model: blur operator does not match b");
    if (!all_finite(b)) throw std::invalid_argument("assemble_model: b has non-finite entries");

    const ImageShape shape{b.shape.rows, b.shape.cols};
    LinearMap D = discrete_gradient(shape);

    DcProblem p;
    p.phi = make_data_term(L, b, spec.mu);
    p.K = D;

    const PenaltyParams& pp = spec.params;
    switch (spec.penalty) {
        case PenaltyKind::scad: {
            if (!(pp.lambda > 0.0) || !(pp.a_scad > 1.0))
                throw std::invalid_argument("assemble_model: SCAD needs lambda > 0, a > 1");
            p.g = std::make_shared<AnisotropicTvNorm>(pp.lambda, D, spec.inner);
            p.h_conj = std::make_shared<ScadConjugate>(pp.lambda, pp.a_scad);
            p.h_value = [lambda = pp.lambda, a = pp.a_scad](const DenseVector& y) {
                return scad_h_value(y, lambda, a);
            };
            break;
        }
        case PenaltyKind::zhang: {
            if (!(pp.a_zhang > 0.0))
                throw std::invalid_argument("assemble_model: Zhang needs a > 0");
            p.g = std::make_shared<AnisotropicTvNorm>(1.0 / pp.a_zhang, D, spec.inner);
            p.h_conj = std::make_shared<ZhangConjugate>(pp.a_zhang);
            p.h_value = [a = pp.a_zhang](const DenseVector& y) { return zhang_h_value(y, a); };
            break;
        }
        case PenaltyKind::lzox: {
            if (!(pp.alpha >= 0.0))
                throw std::invalid_argument("assemble_model: LZOX needs alpha >= 0");
            p.g = std::make_shared<AnisotropicTvNorm>(1.0, D, spec.inner);
            p.h_conj = std::make_shared<CrossNormBall>(pp.alpha);
            p.h_value = [alpha = pp.alpha](const DenseVector& y) {
                return alpha * cross_norm(y);
            };
            break;
        }
        default:
            throw std::invalid_argument("assemble_model: unknown penalty");
    }
    return p;
}

DenseVector initial_dual(const ModelSpec& spec, const DenseVector& Kx0) {
    const PenaltyParams& pp = spec.params;
    switch (spec.penalty) {
        case PenaltyKind::scad: {
            DenseVector y = Kx0;
            for (double& v : y.data) v = scad_h_derivative(v, pp.lambda, pp.a_scad);
            return y;
        }
        case PenaltyKind::zhang: {
            DenseVector y = Kx0;
            for (double& v : y.data) v = zhang_h_subgradient(v, pp.a_zhang);
            return y;
        }
        case PenaltyKind::lzox:
            return crossnorm_subgradient(Kx0, pp.alpha);
        default:
            throw std::invalid_argument("initial_dual: unknown penalty");
    }
}

double isnr(const DenseVector& original, const DenseVector& observed,
            const DenseVector& restored) {
    const double num = distance(original, observed);
    const double den = distance(original, restored);
    if (den == 0.0) return kInf;
    return 10.0 * std::log10((num * num) / (den * den));
}

DenseVector degrade(const DenseVector& original, const BlurSpec& spec, double noise_std,
                    std::uint64_t seed) {
    if (!(noise_std >= 0.0)) throw std::invalid_argument("degrade: noise_std must be >= 0");
    const ImageShape shape{original.shape.rows, original.shape.cols};
    const LinearMap L = gaussian_blur(spec, shape);
    DenseVector b = L.forward(original);
    if (noise_std > 0.0) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> dist(0.0, noise_std);
        for (double& v : b.data) v += dist(gen);
    }
    for (double& v : b.data) {
        v = std::clamp(v, 0.0, 1.0);
        v = std::round(v * 255.0) / 255.0;
    }
    return b;
}

DenseVector synthetic_texture(ImageShape shape, std::uint64_t seed) {
    require_image_shape(shape);
    std::mt19937_64 gen(seed);
    const int freqs[3] = {3, 5, 7};
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_int_distribution<int> orient(0, 1);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> level(-0.4, 0.4);

    // Axis-aligned thresholded sinusoids, majority-thresholded into a binary
    // block mosaic.
    constexpr std::size_t kWaves = 4;
    struct Wave {
        double f, phi, theta;
        bool horizontal;
    };
    std::vector<Wave> waves;
    for (std::size_t k = 0; k < kWaves; ++k) {
        waves.push_back({static_cast<double>(freqs[pick(gen)]), phase(gen), level(gen),
                         orient(gen) == 0});
    }

    const double m = static_cast<double>(shape.rows);
    const double n = static_cast<double>(shape.cols);
    DenseVector img({shape.rows, shape.cols, 1});
    for (std::size_t i = 0; i < shape.rows; ++i) {
        for (std::size_t j = 0; j < shape.cols; ++j) {
            double v = 0.0;
            for (const Wave& w : waves) {
                const double coord = w.horizontal ? static_cast<double>(i) / m
                                                  : static_cast<double>(j) / n;
                const double s = std::sin(2.0 * std::numbers::pi * w.f * coord + w.phi);
                if (s > w.theta) v += 1.0;
            }
            img.at(i, j) = v / kWaves > 0.5 ? 1.0 : 0.0;
        }
    }
    return img;
}

// ---- PGM I/O ---------------------------------------------------------------

namespace {

int next_pgm_token(std::istream& in) {
    // skips whitespace and '#' comments, returns the next integer
    while (true) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = -1;
    in >> value;
    return value;
}

}  // namespace

DenseVector read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_pgm: cannot open " + path.string());
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5')
        throw std::runtime_error("read_pgm: not a binary PGM (P5) file: " + path.string());
    const int w = next_pgm_token(in);
    const int h = next_pgm_token(in);
    const int maxval = next_pgm_token(in);
    if (w < 2 || h < 2 || maxval < 1 || maxval > 65535)
        throw std::runtime_error("read_pgm: malformed header in " + path.string());
    in.get();  // single whitespace after maxval

    const std::size_t rows = static_cast<std::size_t>(h);
    const std::size_t cols = static_cast<std::size_t>(w);
    DenseVector img({rows, cols, 1});
    const double scale = 1.0 / static_cast<double>(maxval);
    if (maxval < 256) {
        std::vector<unsigned char> buf(rows * cols);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!in) throw std::runtime_error("read_pgm: truncated data in " + path.string());
        for (std::size_t i = 0; i < buf.size(); ++i) img[i] = buf[i] * scale;
    } else {
        std::vector<unsigned char> buf(2 * rows * cols);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!in) throw std::runtime_error("read_pgm: truncated data in " + path.string());
        for (std::size_t i = 0; i < rows * cols; ++i)
            img[i] = (buf[2 * i] * 256.0 + buf[2 * i + 1]) * scale;
    }
    return img;
}

void write_pgm(const std::filesystem::path& path, const DenseVector& image) {
    if (image.shape.planes != 1)
        throw std::invalid_argument("write_pgm: image must have a single plane");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_pgm: cannot open " + path.string());
    out << "P5\n" << image.shape.cols << " " << image.shape.rows << "\n255\n";
    std::vector<unsigned char> buf(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        const double v = std::clamp(image[i], 0.0, 1.0);
        buf[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("write_pgm: write failed for " + path.string());
}

}  // namespace dcprox
