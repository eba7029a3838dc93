#pragma once

#include "wzlab/drivers.hpp"
#include "wzlab/solvers.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wzlab {

struct ExperimentConfig {
    DriverSpec driver;
    CoefficientSet coefficients;
    double x0 = 0.0;
    std::vector<double> epsilons;  // strictly decreasing, positive
    int replications = 1;
    std::uint64_t seed = 0;
    int metric_m = 512;
    double passage_a = 0.5;
    double solver_step = 1e-3;
    int flow_substeps = 32;
    std::filesystem::path out_dir = ".";
    int workers = 1;

    /// Throws ConfigError.
    void validate() const;
    SolverConfig solver() const;

    /// Top-level keys: driver, coefficients, x0, epsilons, replications,
    /// horizon, dt, metric_m, passage_a; optional seed, out, workers,
    /// solver_step, flow_substeps. `horizon`/`dt` override the driver section.
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_file(const std::filesystem::path& path);
};

/// FNV-1a over the grid, values and jump registry of a path.
std::uint64_t realization_hash(const CadlagPath& path);

struct ConvergenceRecord {
    int rep = 0;
    double eps = 0.0;
    double d_m1 = 0.0;
    double d_m1_lo = 0.0;
    double d_m1_hi = 0.0;
    double z_gap = 0.0;            // sup over the γ-grid of |Z^ε − Z|
    double sandwich_margin = 0.0;  // min slack of both sandwiches; ≥ 0 when they hold
    double residual31 = 0.0;
    std::uint64_t realization_hash = 0;
    std::string error;  // nonempty when a solver diverged; numeric fields are then nan
};

struct PassageRecord {
    int rep = 0;
    std::optional<double> eps;  // none: the limit solution X
    std::optional<double> tau;
};

struct KsRecord {
    double eps = 0.0;
    double ks = 0.0;
    double band95 = 0.0;
};

struct SpecialRecord {
    int rep = 0;
    double eps = 0.0;
    double d_m1 = 0.0;
    double d_m1_lo = 0.0;
    double d_m1_hi = 0.0;
    double sup_gap = 0.0;  // sup over the grid of |L^ε − L|
};

struct SpecialSummary {
    int rep = 0;
    bool m1_nonincreasing = false;   // within metric slack
    bool sup_nonincreasing = false;
};

/// One row per (replication, ε); replications run on `cfg.workers` threads.
std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& cfg);

struct SpecialReport {
    std::vector<SpecialRecord> records;
    std::vector<SpecialSummary> summaries;
};

/// b ≡ 0, f ≡ 1, X₀ = 0 forced: the d_m1(L^ε, L) ladder per replication.
SpecialReport run_special_case(const ExperimentConfig& cfg);

struct PassageReport {
    std::vector<PassageRecord> records;
    std::vector<KsRecord> ks;
};

PassageReport run_passage(const ExperimentConfig& cfg);

/// sup |F − G| of the empirical laws, none values placed at +∞.
double ks_two_sample(std::vector<std::optional<double>> x, std::vector<std::optional<double>> y);
/// 95% critical value 1.358·sqrt((n + m)/(n m)).
double ks_band95(std::size_t n, std::size_t m);

double median(std::vector<double> values);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& rows);
void write_passage_csv(std::ostream& out, const std::vector<PassageRecord>& rows);
void write_ks_csv(std::ostream& out, const std::vector<KsRecord>& rows);
void write_special_csv(std::ostream& out, const SpecialReport& report);
/// JSON object with per-ε medians of every populated table.
std::string summary_json(const ExperimentConfig& cfg, const std::vector<ConvergenceRecord>* convergence,
                         const PassageReport* passage, const SpecialReport* special);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct SelfcheckOptions {
    bool corrupt_plateau_width = false;  // fault injection
};

/// Invariant suite on the deterministic test drivers.
std::vector<CheckResult> selfcheck(const SelfcheckOptions& options = {});

}  // namespace wzlab
