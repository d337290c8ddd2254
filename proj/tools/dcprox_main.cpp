#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dcprox/harness.hpp"

namespace {

std::vector<std::string> split_cells(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t b = 0, e = item.size();
        while (b < e && std::isspace(static_cast<unsigned char>(item[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(item[e - 1]))) --e;
        if (e > b) out.push_back(item.substr(b, e - b));
    }
    return out;
}

void print_table(const dcprox::ResultTable& table) {
    std::printf("%-10s %10s %10s %12s %6s  %s\n", "penalty", "mu", "param", "isnr", "iters",
                "status");
    for (const auto& c : table.cells) {
        std::printf("%-10s %10g %10g %12.5f %6zu  %s\n",
                    dcprox::penalty_name(table.penalty).c_str(), c.mu, c.param, c.isnr_final,
                    c.iterations, c.status.c_str());
    }
}

int cmd_run(const std::string& config_path) {
    dcprox::ExperimentConfig cfg;
    try {
        cfg = dcprox::parse_config_file(config_path);
    } catch (const dcprox::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        const dcprox::ResultTable table = dcprox::run_experiment(cfg);
        // emit every per-cell ISNR curve alongside the trajectories
        std::vector<std::string> all;
        for (const auto& c : table.cells)
            if (c.ok) all.push_back(c.name);
        dcprox::emit_isnr_curves(table, all);
        print_table(table);
        std::printf("output written to %s\n", table.output_dir.string().c_str());
        return table.all_ok() ? 0 : 1;
    } catch (const dcprox::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_verify(const std::string& dir) {
    try {
        const dcprox::VerifyReport rep = dcprox::verify_directory(dir);
        if (rep.files.empty()) {
            std::cerr << "error: no trajectory files found in " << dir << "\n";
            return 2;
        }
        for (const auto& f : rep.files) {
            if (f.pass) {
                std::printf("PASS %s (%s)\n", f.file.c_str(), f.message.c_str());
            } else if (f.first_bad_row >= 0) {
                std::printf("FAIL %s: %s at row %ld\n", f.file.c_str(), f.message.c_str(),
                            f.first_bad_row);
            } else {
                std::printf("FAIL %s: %s\n", f.file.c_str(), f.message.c_str());
            }
        }
        return rep.all_pass() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

int cmd_curves(const std::string& dir, const std::string& cells) {
    try {
        const auto requested = split_cells(cells);
        const dcprox::CurveEmission em = dcprox::emit_isnr_curves_from_dir(dir, requested);
        for (const auto& f : em.written) std::printf("wrote %s\n", f.c_str());
        if (!em.missing.empty()) {
            std::printf("missing cells:\n");
            for (const auto& m : em.missing) std::printf("  %s\n", m.c_str());
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"double-proximal difference-of-convex solver and experiment harness"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "run an experiment grid from a config file");
    run->add_option("--config", config_path, "key = value config file")->required();

    std::string verify_dir;
    CLI::App* verify =
        app.add_subcommand("verify", "re-check the certificates of emitted trajectories");
    verify->add_option("dir", verify_dir, "output directory of a previous run")->required();

    std::string curves_dir;
    std::string curves_cells;
    CLI::App* curves = app.add_subcommand("curves", "emit per-cell ISNR curve files");
    curves->add_option("--dir", curves_dir, "output directory of a previous run")->required();
    curves->add_option("--cells", curves_cells, "comma-separated cell names")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(verify_dir);
    if (curves->parsed()) return cmd_curves(curves_dir, curves_cells);
    return 2;
}
