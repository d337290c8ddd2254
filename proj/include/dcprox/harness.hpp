#pragma once

#include <iosfwd>
#include <string>

#include "dcprox/imaging.hpp"

namespace dcprox {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Experiment description, read from a flat key=value file (see README).
struct ExperimentConfig {
    std::string image_source = "synthetic";  // "synthetic" or a PGM path
    std::size_t image_size = 64;             // synthetic image edge length
    std::uint64_t seed = 1;
    double blur_std = 2.0;
    Boundary blur_boundary = Boundary::periodic;
    double noise_std = 50.0 / 255.0;
    std::size_t iterations = 50;
    PenaltyKind penalty = PenaltyKind::lzox;
    std::vector<double> mu_grid;
    std::vector<double> param_grid;  // alpha (LZOX), a (Zhang), lambda (SCAD)
    double scad_a = 3.7;
    bool strict_kl = false;
    bool warm_start = true;
    double inner_tol = 1e-4;
    std::size_t max_inner = 500;
    double tol_residual = 1e-6;
    std::string output_dir = "dcprox_out";
    std::size_t threads = 0;  // 0: DCPROX_THREADS or hardware concurrency
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::filesystem::path& path);

std::string penalty_name(PenaltyKind kind);
PenaltyKind penalty_from_name(const std::string& name);
// {penalty}_{mu}_{param} with decimal points replaced by 'p'.
std::string cell_name(PenaltyKind kind, double mu, double param);

struct CellResult {
    std::string name;
    double mu = 0.0;
    double param = 0.0;
    bool ok = false;
    std::string status;  // "ok" or the failure reason
    double gamma = 0.0, mu_step = 0.0, beta = 0.0, norm_K = 0.0;
    double phi0 = 0.0;
    double isnr_final = 0.0;
    std::size_t iterations = 0;
    std::string trajectory_file;
    std::vector<double> isnr_curve;  // one entry per iteration
};

struct ResultTable {
    PenaltyKind penalty = PenaltyKind::lzox;
    std::filesystem::path output_dir;
    std::vector<CellResult> cells;

    bool all_ok() const;
    const CellResult* find(const std::string& name) const;
};

// Runs the full grid: degrade -> assemble_model -> run with
// gamma_n = mu_n = 1/(8 mu), x0 = b, y0 in the subdifferential of h at Kx0.
// Writes one trajectory CSV per cell, summary.csv, isnr_curves.csv and a
// config echo into output_dir. Deterministic given the config.
ResultTable run_experiment(const ExperimentConfig& cfg);

struct CurveEmission {
    std::vector<std::string> written;
    std::vector<std::string> missing;
};

// Per-cell files isnr_{cell}.csv with columns (iteration, isnr). Cells that
// are not present are reported in `missing`, the others are still emitted.
CurveEmission emit_isnr_curves(const ResultTable& table, const std::vector<std::string>& cells);
// Same, reading the aggregated isnr_curves.csv written by run_experiment.
CurveEmission emit_isnr_curves_from_dir(const std::filesystem::path& dir,
                                        const std::vector<std::string>& cells);

struct TrajectoryCheck {
    std::string file;
    bool pass = false;
    long first_bad_row = -1;  // 1-based data row of the first violation
    std::string message;
};

struct VerifyReport {
    std::vector<TrajectoryCheck> files;
    bool all_pass() const;
};

// Constants needed to re-check the residual and summability certificates of
// one trajectory; recovered from summary.csv when verifying a directory.
struct CellConstants {
    double gamma = 0.0, mu_step = 0.0, beta = 0.0, norm_K = 0.0, phi0 = 0.0;
    bool available = false;
};

// Re-checks descent monotonicity, the per-step decrement bound, the
// partial-sum bound and residual-bound consistency from the recorded
// columns.
TrajectoryCheck verify_trajectory_file(const std::filesystem::path& file,
                                       const CellConstants& constants);
VerifyReport verify_certificates(const std::vector<std::filesystem::path>& files);
// Verifies every trajectory referenced by <dir>/summary.csv (or every CSV in
// the directory when no summary is present; then only descent is checked).
VerifyReport verify_directory(const std::filesystem::path& dir);

}  // namespace dcprox
