#include "wzlab/cadlag.hpp"
#include "wzlab/drivers.hpp"
#include "wzlab/errors.hpp"
#include "wzlab/harness.hpp"
#include "wzlab/skorokhod.hpp"
#include "wzlab/smoothing.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace wzlab;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> workers;
};

ExperimentConfig load(const Globals& g) {
    if (g.config.empty()) throw ConfigError("--config is required for this subcommand");
    ExperimentConfig cfg = ExperimentConfig::from_file(g.config);
    if (g.seed) cfg.seed = *g.seed;
    if (g.out) cfg.out_dir = *g.out;
    if (g.workers) cfg.workers = *g.workers;
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

template <typename Writer>
void write_with(const fs::path& path, Writer writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
}

CadlagPath read_path(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open path file " + file);
    return read_path_csv(in);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wong-Zakai / Marcus SDE and Skorokhod M1 numerical lab"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "experiment config (JSON)");
    app.add_option("--seed", g.seed, "master seed (overrides config)");
    app.add_option("--out", g.out, "output directory (overrides config)");
    app.add_option("--workers", g.workers, "worker threads (overrides config)")->check(CLI::PositiveNumber);

    auto* simulate_cmd = app.add_subcommand("simulate", "simulate one driver realization to a path CSV");
    int sim_rep = 0;
    simulate_cmd->add_option("--rep", sim_rep, "replication index")->check(CLI::NonNegativeNumber);

    auto* smooth_cmd = app.add_subcommand("smooth", "smooth a path CSV with window eps");
    std::string smooth_in;
    double smooth_eps = 0.1;
    smooth_cmd->add_option("input", smooth_in, "path CSV")->required();
    smooth_cmd->add_option("--eps", smooth_eps, "window")->required();

    auto* converge_cmd = app.add_subcommand("converge", "coupled convergence study: convergence.csv, summary.json");
    auto* special_cmd = app.add_subcommand("special", "b = 0, f = 1 special case: special.csv, summary.json");
    auto* passage_cmd = app.add_subcommand("passage", "first-passage study: passage.csv, ks.csv, summary.json");

    auto* metric_cmd = app.add_subcommand("metric", "distance or oscillation between path CSV files");
    std::vector<std::string> metric_files;
    int resolution = 512;
    double delta = 0.1;
    metric_cmd->add_option("paths", metric_files, "one path (--wprime) or two paths")->required()->expected(1, 2);
    auto* m1_flag = metric_cmd->add_flag("--m1", "M1 distance");
    auto* j1_flag = metric_cmd->add_flag("--j1", "J1 distance");
    auto* wp_flag = metric_cmd->add_flag("--wprime", "oscillation functional w'");
    m1_flag->excludes(j1_flag)->excludes(wp_flag);
    j1_flag->excludes(wp_flag);
    metric_cmd->add_option("--resolution", resolution, "graph resolution m")->check(CLI::Range(8, 1 << 20));
    metric_cmd->add_option("--delta", delta, "w' window")->check(CLI::PositiveNumber);

    auto* selfcheck_cmd = app.add_subcommand("selfcheck", "run the invariant suite on deterministic drivers");
    std::string fault;
    selfcheck_cmd->add_option("--inject-fault", fault, "deliberate fault (plateau_width)")
        ->check(CLI::IsMember({"plateau_width"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate_cmd) {
            ExperimentConfig cfg = load(g);
            const auto d = simulate(cfg.driver,
                                    replication_stream(cfg.seed, static_cast<std::uint64_t>(sim_rep), StreamRole::driver));
            write_path_csv(std::cout, d.path);
        } else if (*smooth_cmd) {
            const CadlagPath base = read_path(smooth_in);
            write_path_csv(std::cout, smooth(base, smooth_eps).to_path());
        } else if (*converge_cmd) {
            ExperimentConfig cfg = load(g);
            const auto rows = run_convergence(cfg);
            write_with(cfg.out_dir / "convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, rows); });
            write_file(cfg.out_dir / "summary.json", summary_json(cfg, &rows, nullptr, nullptr));
        } else if (*special_cmd) {
            ExperimentConfig cfg = load(g);
            const auto report = run_special_case(cfg);
            write_with(cfg.out_dir / "special.csv", [&](std::ostream& o) { write_special_csv(o, report); });
            write_file(cfg.out_dir / "summary.json", summary_json(cfg, nullptr, nullptr, &report));
        } else if (*passage_cmd) {
            ExperimentConfig cfg = load(g);
            const auto report = run_passage(cfg);
            write_with(cfg.out_dir / "passage.csv", [&](std::ostream& o) { write_passage_csv(o, report.records); });
            write_with(cfg.out_dir / "ks.csv", [&](std::ostream& o) { write_ks_csv(o, report.ks); });
            write_file(cfg.out_dir / "summary.json", summary_json(cfg, nullptr, &report, nullptr));
        } else if (*metric_cmd) {
            const bool want_wprime = wp_flag->count() > 0;
            if (want_wprime != (metric_files.size() == 1)) {
                throw ConfigError("metric: --wprime takes one path, --m1/--j1 take two");
            }
            const CadlagPath x = read_path(metric_files[0]);
            std::cout << "value,lower,upper\n";
            if (want_wprime) {
                const double w = w_prime(x, delta);
                std::cout << fmt::format("{},{},{}\n", w, w, w);
            } else {
                const CadlagPath y = read_path(metric_files[1]);
                const MetricResult r = j1_flag->count() > 0 ? d_j1(x, y, resolution) : d_m1(x, y, resolution);
                std::cout << fmt::format("{},{},{}\n", r.value, r.lower, r.upper);
            }
        } else if (*selfcheck_cmd) {
            SelfcheckOptions opts;
            opts.corrupt_plateau_width = fault == "plateau_width";
            bool ok = true;
            for (const auto& c : selfcheck(opts)) {
                std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
                if (!c.passed && !c.detail.empty()) std::cout << " (" << c.detail << ")";
                std::cout << '\n';
                ok = ok && c.passed;
            }
            return ok ? 0 : 1;
        }
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
