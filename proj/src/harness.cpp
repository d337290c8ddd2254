#include "dcprox/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace dcprox {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: invalid number for '" + key + "': " + v);
    }
}

std::size_t parse_count(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long n = std::stoll(v, &pos);
        if (pos != v.size() || n < 0) throw std::invalid_argument(v);
        return static_cast<std::size_t>(n);
    } catch (const std::exception&) {
        throw ConfigError("config: invalid count for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: invalid boolean for '" + key + "': " + v);
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string format_compact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    std::string s(buf);
    for (char& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
    }
    return s;
}

std::string csv_safe(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n') c = ';';
    return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        out << contents;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::size_t resolve_threads(std::size_t configured, std::size_t cells) {
    std::size_t n = configured;
    if (n == 0) {
        if (const char* env = std::getenv("DCPROX_THREADS")) {
            char* end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end != env && v > 0) n = static_cast<std::size_t>(v);
        }
    }
    if (n == 0) n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(n, cells));
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    bool have_mu = false, have_param = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));

        if (key == "image") cfg.image_source = value;
        else if (key == "image_size") cfg.image_size = parse_count(key, value);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_count(key, value));
        else if (key == "blur_std") cfg.blur_std = parse_double(key, value);
        else if (key == "blur_boundary") {
            if (value == "periodic") cfg.blur_boundary = Boundary::periodic;
            else if (value == "symmetric") cfg.blur_boundary = Boundary::symmetric;
            else throw ConfigError("config: unknown blur_boundary: " + value);
        }
        else if (key == "noise_std") cfg.noise_std = parse_double(key, value);
        else if (key == "iterations") cfg.iterations = parse_count(key, value);
        else if (key == "penalty") cfg.penalty = penalty_from_name(value);
        else if (key == "mu") { cfg.mu_grid = parse_list(key, value); have_mu = true; }
        else if (key == "param") { cfg.param_grid = parse_list(key, value); have_param = true; }
        else if (key == "scad_a") cfg.scad_a = parse_double(key, value);
        else if (key == "strict_kl") cfg.strict_kl = parse_bool(key, value);
        else if (key == "warm_start") cfg.warm_start = parse_bool(key, value);
        else if (key == "inner_tol") cfg.inner_tol = parse_double(key, value);
        else if (key == "max_inner") cfg.max_inner = parse_count(key, value);
        else if (key == "tol_residual") cfg.tol_residual = parse_double(key, value);
        else if (key == "output_dir") cfg.output_dir = value;
        else if (key == "threads") cfg.threads = parse_count(key, value);
        else throw ConfigError("config: unknown key '" + key + "'");
    }
    if (!have_mu || cfg.mu_grid.empty())
        throw ConfigError("config: 'mu' list is required and must be nonempty");
    if (!have_param || cfg.param_grid.empty())
        throw ConfigError("config: 'param' list is required and must be nonempty");
    if (cfg.iterations < 1) throw ConfigError("config: iterations must be >= 1");
    return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    return parse_config(in);
}

std::string penalty_name(PenaltyKind kind) {
    switch (kind) {
        case PenaltyKind::scad: return "scad";
        case PenaltyKind::zhang: return "zhang";
        case PenaltyKind::lzox: return "lzox";
    }
    return "unknown";
}

PenaltyKind penalty_from_name(const std::string& name) {
    if (name == "scad") return PenaltyKind::scad;
    if (name == "zhang") return PenaltyKind::zhang;
    if (name == "lzox") return PenaltyKind::lzox;
    throw ConfigError("unknown penalty: " + name);
}

std::string cell_name(PenaltyKind kind, double mu, double param) {
    return penalty_name(kind) + "_" + format_compact(mu) + "_" + format_compact(param);
}

bool ResultTable::all_ok() const {
    for (const auto& c : cells)
        if (!c.ok) return false;
    return true;
}

const CellResult* ResultTable::find(const std::string& name) const {
    for (const auto& c : cells)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

DenseVector load_source_image(const ExperimentConfig& cfg) {
    if (cfg.image_source == "synthetic")
        return synthetic_texture({cfg.image_size, cfg.image_size}, cfg.seed);
    return read_pgm(cfg.image_source);
}

ModelSpec cell_model_spec(const ExperimentConfig& cfg, double mu, double param) {
    ModelSpec ms;
    ms.penalty = cfg.penalty;
    ms.mu = mu;
    ms.inner.inner_tol = cfg.inner_tol;
    ms.inner.max_inner = cfg.max_inner;
    ms.inner.warm_start = cfg.warm_start;
    switch (cfg.penalty) {
        case PenaltyKind::scad:
            ms.params.lambda = param;
            ms.params.a_scad = cfg.scad_a;
            break;
        case PenaltyKind::zhang:
            ms.params.a_zhang = param;
            break;
        case PenaltyKind::lzox:
            ms.params.alpha = param;
            break;
    }
    return ms;
}

void run_cell(const ExperimentConfig& cfg, const DenseVector& original, const DenseVector& b,
              const LinearMap& L, CellResult& cell) {
    const ModelSpec ms = cell_model_spec(cfg, cell.mu, cell.param);
    DcProblem problem = assemble_model(ms, b, L);

    const double step = 1.0 / (8.0 * cell.mu);
    const double beta = 1.0 / (cell.mu * L.norm_bound * L.norm_bound);
    StepSizes steps = StepSizes::constant(step, step, beta);
    steps.validate(cfg.strict_kl);

    cell.gamma = step;
    cell.mu_step = step;
    cell.beta = beta;
    cell.norm_K = problem.K.norm_bound;

    const DenseVector y0 = initial_dual(ms, problem.K.forward(b));

    RunOptions opts;
    opts.steps = steps;
    opts.stopping.tol_residual = cfg.tol_residual;
    opts.stopping.max_iters = cfg.iterations;
    opts.strict_kl = cfg.strict_kl;
    opts.on_iterate = [&](const SolverState& s) {
        cell.isnr_curve.push_back(isnr(original, b, s.x));
    };

    Trajectory traj = run(problem, b, y0, opts);
    cell.phi0 = traj.initial_phi;
    cell.iterations = traj.records.size();
    cell.isnr_final = cell.isnr_curve.empty() ? 0.0 : cell.isnr_curve.back();

    const std::filesystem::path file = cfg.output_dir / std::filesystem::path(cell.name + ".csv");
    const std::filesystem::path tmp = file.string() + ".tmp";
    write_trajectory_csv(traj, tmp);
    std::filesystem::rename(tmp, file);
    cell.trajectory_file = cell.name + ".csv";
    cell.ok = true;
    cell.status = "ok";
}

std::string render_summary(const ResultTable& table) {
    std::string out =
        "penalty,mu,param,gamma,mu_step,beta,norm_K,phi0,isnr_final,iterations,status,"
        "trajectory_file\n";
    char buf[512];
    for (const auto& c : table.cells) {
        std::snprintf(buf, sizeof(buf),
                      "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%zu,%s,%s\n",
                      penalty_name(table.penalty).c_str(), c.mu, c.param, c.gamma, c.mu_step,
                      c.beta, c.norm_K, c.phi0, c.isnr_final, c.iterations,
                      csv_safe(c.status).c_str(), c.trajectory_file.c_str());
        out += buf;
    }
    return out;
}

std::string render_curves(const ResultTable& table) {
    std::string out = "cell,iteration,isnr\n";
    char buf[256];
    for (const auto& c : table.cells) {
        for (std::size_t i = 0; i < c.isnr_curve.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%s,%zu,%.17g\n", c.name.c_str(), i + 1,
                          c.isnr_curve[i]);
            out += buf;
        }
    }
    return out;
}

std::string render_config_echo(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os << "image = " << cfg.image_source << "\n"
       << "image_size = " << cfg.image_size << "\n"
       << "seed = " << cfg.seed << "\n"
       << "blur_std = " << cfg.blur_std << "\n"
       << "blur_boundary = "
       << (cfg.blur_boundary == Boundary::periodic ? "periodic" : "symmetric") << "\n"
       << "noise_std = " << cfg.noise_std << "\n"
       << "iterations = " << cfg.iterations << "\n"
       << "penalty = " << penalty_name(cfg.penalty) << "\n";
    os << "mu = ";
    for (std::size_t i = 0; i < cfg.mu_grid.size(); ++i)
        os << (i ? ", " : "") << cfg.mu_grid[i];
    os << "\nparam = ";
    for (std::size_t i = 0; i < cfg.param_grid.size(); ++i)
        os << (i ? ", " : "") << cfg.param_grid[i];
    os << "\nscad_a = " << cfg.scad_a << "\n"
       << "strict_kl = " << (cfg.strict_kl ? "true" : "false") << "\n"
       << "warm_start = " << (cfg.warm_start ? "true" : "false") << "\n"
       << "inner_tol = " << cfg.inner_tol << "\n"
       << "max_inner = " << cfg.max_inner << "\n"
       << "tol_residual = " << cfg.tol_residual << "\n"
       << "output_dir = " << cfg.output_dir << "\n";
    return os.str();
}

std::string render_curve_file(const std::vector<double>& curve) {
    std::string out = "iteration,isnr\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, curve[i]);
        out += buf;
    }
    return out;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
    if (cfg.mu_grid.empty() || cfg.param_grid.empty())
        throw ConfigError("run_experiment: empty parameter grid");
    if (cfg.iterations < 1) throw ConfigError("run_experiment: iterations must be >= 1");

    const DenseVector original = load_source_image(cfg);
    const ImageShape shape{original.shape.rows, original.shape.cols};
    const BlurSpec blur{cfg.blur_std, cfg.blur_boundary};
    const LinearMap L = gaussian_blur(blur, shape);
    const DenseVector b = degrade(original, blur, cfg.noise_std, cfg.seed);

    std::filesystem::create_directories(cfg.output_dir);

    ResultTable table;
    table.penalty = cfg.penalty;
    table.output_dir = cfg.output_dir;
    for (double mu : cfg.mu_grid) {
        for (double param : cfg.param_grid) {
            CellResult c;
            c.mu = mu;
            c.param = param;
            c.name = cell_name(cfg.penalty, mu, param);
            table.cells.push_back(std::move(c));
        }
    }

    const std::size_t workers = resolve_threads(cfg.threads, table.cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= table.cells.size()) break;
            CellResult& cell = table.cells[i];
            try {
                run_cell(cfg, original, b, L, cell);
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.status = e.what();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    write_file_atomic(table.output_dir / "summary.csv", render_summary(table));
    write_file_atomic(table.output_dir / "isnr_curves.csv", render_curves(table));
    write_file_atomic(table.output_dir / "run_config.txt", render_config_echo(cfg));
    return table;
}

CurveEmission emit_isnr_curves(const ResultTable& table, const std::vector<std::string>& cells) {
    CurveEmission em;
    for (const std::string& name : cells) {
        const CellResult* c = table.find(name);
        if (c == nullptr || !c->ok) {
            em.missing.push_back(name);
            continue;
        }
        const std::string file = "isnr_" + name + ".csv";
        write_file_atomic(table.output_dir / file, render_curve_file(c->isnr_curve));
        em.written.push_back(file);
    }
    return em;
}

CurveEmission emit_isnr_curves_from_dir(const std::filesystem::path& dir,
                                        const std::vector<std::string>& cells) {
    std::ifstream in(dir / "isnr_curves.csv");
    if (!in)
        throw std::runtime_error("emit_isnr_curves_from_dir: missing " +
                                 (dir / "isnr_curves.csv").string());
    std::map<std::string, std::vector<double>> curves;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw std::runtime_error("emit_isnr_curves_from_dir: malformed isnr_curves.csv");
        curves[line.substr(0, c1)].push_back(std::stod(line.substr(c2 + 1)));
    }

    CurveEmission em;
    for (const std::string& name : cells) {
        auto it = curves.find(name);
        if (it == curves.end()) {
            em.missing.push_back(name);
            continue;
        }
        const std::string file = "isnr_" + name + ".csv";
        write_file_atomic(dir / file, render_curve_file(it->second));
        em.written.push_back(file);
    }
    return em;
}

bool VerifyReport::all_pass() const {
    for (const auto& f : files)
        if (!f.pass) return false;
    return true;
}

namespace {

struct ParsedTrajectory {
    std::vector<TrajectoryRecord> rows;
};

bool parse_trajectory_csv(const std::filesystem::path& file, ParsedTrajectory& out,
                          std::string& error) {
    std::ifstream in(file);
    if (!in) {
        error = "cannot open file";
        return false;
    }
    std::string line;
    if (!std::getline(in, line)) {
        error = "malformed CSV: empty file";
        return false;
    }
    if (trim(line) != "n,phi,primal,dx,dy,residual,inner_iters,wall_ms") {
        error = "malformed CSV: unexpected header";
        return false;
    }
    std::size_t rowno = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++rowno;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 8) {
            error = "malformed CSV: row " + std::to_string(rowno) + " has " +
                    std::to_string(fields.size()) + " fields";
            return false;
        }
        try {
            TrajectoryRecord r;
            r.n = static_cast<std::size_t>(std::stoull(fields[0]));
            r.phi = std::stod(fields[1]);
            r.primal = std::stod(fields[2]);
            r.dx = std::stod(fields[3]);
            r.dy = std::stod(fields[4]);
            r.residual = std::stod(fields[5]);
            r.inner_iters = static_cast<std::size_t>(std::stoull(fields[6]));
            r.wall_ms = std::stod(fields[7]);
            out.rows.push_back(r);
        } catch (const std::exception&) {
            error = "malformed CSV: row " + std::to_string(rowno) + " is not numeric";
            return false;
        }
    }
    if (out.rows.empty()) {
        error = "malformed CSV: no data rows";
        return false;
    }
    return true;
}

}  // namespace

TrajectoryCheck verify_trajectory_file(const std::filesystem::path& file,
                                       const CellConstants& constants) {
    TrajectoryCheck check;
    check.file = file.string();

    ParsedTrajectory parsed;
    std::string error;
    if (!parse_trajectory_csv(file, parsed, error)) {
        check.pass = false;
        check.message = error;
        return check;
    }
    const auto& rows = parsed.rows;

    auto slack = [](double ref) { return 1e-10 * (1.0 + std::abs(ref)); };

    // descent monotonicity from the recorded energies
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].phi > rows[i - 1].phi + slack(rows[i - 1].phi)) {
            check.pass = false;
            check.first_bad_row = static_cast<long>(i + 1);
            check.message = "descent violated: phi increases";
            return check;
        }
    }

    if (constants.available) {
        const double g = constants.gamma, mu = constants.mu_step, beta = constants.beta;
        const double half_beta = 1.0 / (2.0 * beta);
        const double eps = std::min(1.0 / g - half_beta, 1.0 / mu);
        double sum_sq = 0.0;

        for (std::size_t i = 0; i < rows.size(); ++i) {
            const double prev_phi = i == 0 ? constants.phi0 : rows[i - 1].phi;
            const double decr = (1.0 / g - half_beta) * rows[i].dx * rows[i].dx +
                                (1.0 / mu) * rows[i].dy * rows[i].dy;
            if (decr > prev_phi - rows[i].phi + slack(prev_phi)) {
                check.pass = false;
                check.first_bad_row = static_cast<long>(i + 1);
                check.message = "per-step decrement bound violated";
                return check;
            }
            const double res_bound = std::hypot(
                constants.norm_K * rows[i].dy + rows[i].dx / g, rows[i].dy / mu);
            if (rows[i].residual > res_bound * (1.0 + 1e-9) + 1e-12) {
                check.pass = false;
                check.first_bad_row = static_cast<long>(i + 1);
                check.message = "residual exceeds the subgradient bound";
                return check;
            }
            sum_sq += rows[i].dx * rows[i].dx + rows[i].dy * rows[i].dy;
        }
        if (eps > 0.0) {
            const double bound = (constants.phi0 - rows.back().phi) / eps;
            if (sum_sq > bound * (1.0 + 1e-9) + 1e-12) {
                check.pass = false;
                check.first_bad_row = static_cast<long>(rows.size());
                check.message = "partial-sum bound violated";
                return check;
            }
        }
    }

    check.pass = true;
    check.message = constants.available ? "ok" : "ok (descent only; no summary constants)";
    return check;
}

VerifyReport verify_certificates(const std::vector<std::filesystem::path>& files) {
    VerifyReport rep;
    for (const auto& f : files) rep.files.push_back(verify_trajectory_file(f, {}));
    return rep;
}

VerifyReport verify_directory(const std::filesystem::path& dir) {
    VerifyReport rep;
    const std::filesystem::path summary = dir / "summary.csv";
    if (std::filesystem::exists(summary)) {
        std::ifstream in(summary);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (trim(line).empty()) continue;
            std::stringstream ss(line);
            std::string field;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) fields.push_back(field);
            if (fields.size() != 12) {
                TrajectoryCheck check;
                check.file = summary.string();
                check.pass = false;
                check.message = "malformed summary row";
                rep.files.push_back(check);
                continue;
            }
            if (fields[10] != "ok") continue;  // skipped cells have no trajectory
            CellConstants c;
            c.gamma = std::stod(fields[3]);
            c.mu_step = std::stod(fields[4]);
            c.beta = std::stod(fields[5]);
            c.norm_K = std::stod(fields[6]);
            c.phi0 = std::stod(fields[7]);
            c.available = true;
            rep.files.push_back(verify_trajectory_file(dir / fields[11], c));
        }
        return rep;
    }
    // no summary: check every CSV except the harness by-products, descent only
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".csv") continue;
        if (name == "summary.csv" || name == "isnr_curves.csv" || name.rfind("isnr_", 0) == 0)
            continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return verify_certificates(files);
}

}  // namespace dcprox
