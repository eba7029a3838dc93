#include "wzlab/harness.hpp"

#include "wzlab/errors.hpp"
#include "wzlab/skorokhod.hpp"
#include "wzlab/smoothing.hpp"
#include "wzlab/timechange.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace wzlab {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Runs task(i) for i in [0, n) on `workers` threads; results come back in index order.
template <typename T, typename Task>
std::vector<T> run_ordered(int n, int workers, Task task) {
    std::vector<T> results(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                results[static_cast<std::size_t>(i)] = task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(workers, 1, std::max(1, n));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < threads; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return results;
}

double get_number(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(fmt::format("config: '{}' must be a number", key));
    return j.at(key).get<double>();
}

JumpLaw parse_jump_law(const json& j) {
    const std::string kind = j.value("kind", "normal");
    if (kind == "normal") return JumpLaw::normal(get_number(j, "mean", 0.0), get_number(j, "sd", 1.0));
    if (kind == "two_point") {
        return JumpLaw::two_point(get_number(j, "v1", 1.0), get_number(j, "p", 0.5), get_number(j, "v2", -1.0));
    }
    throw ConfigError("config: unknown jump law '" + kind + "'");
}

DriverSpec parse_driver(const json& j) {
    if (!j.is_object()) throw ConfigError("config: 'driver' must be an object");
    const std::string kind = j.value("kind", "");
    const double horizon = get_number(j, "horizon", 1.0);
    const double dt = get_number(j, "dt", 1e-3);
    const JumpLaw law = j.contains("jump_law") ? parse_jump_law(j.at("jump_law")) : JumpLaw::normal(0.0, 1.0);
    if (kind == "brownian") return DriverSpec::brownian(get_number(j, "sigma", 1.0), get_number(j, "mu", 0.0), horizon, dt);
    if (kind == "compound_poisson") return DriverSpec::compound_poisson(get_number(j, "lambda", 1.0), law, horizon, dt);
    if (kind == "jump_diffusion") {
        return DriverSpec::jump_diffusion(get_number(j, "sigma", 1.0), get_number(j, "mu", 0.0),
                                          get_number(j, "lambda", 1.0), law, horizon, dt);
    }
    if (kind == "single_jump") {
        return DriverSpec::single_jump(get_number(j, "time", 0.5), get_number(j, "size", 1.0), horizon, dt);
    }
    if (kind == "appendix_ramp") return DriverSpec::appendix_ramp(static_cast<int>(get_number(j, "n", 2)));
    if (kind == "constant") return DriverSpec::constant(get_number(j, "level", 0.0), horizon, dt);
    throw ConfigError("config: unknown driver kind '" + kind + "'");
}

CoefficientFamily parse_family(const json& j, const char* which) {
    if (!j.contains(which)) throw ConfigError(fmt::format("config: coefficients.{} missing", which));
    const json& f = j.at(which);
    const std::string family = f.value("family", "");
    std::vector<double> params;
    if (f.contains("params")) params = f.at("params").get<std::vector<double>>();
    return CoefficientFamily::from_config(family, params);
}

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{}", v);
}

std::string hex(std::uint64_t h) { return fmt::format("{:016x}", h); }

/// The driving realization of one replication.
struct Realization {
    std::shared_ptr<const CadlagPath> path;
    QuadraticVariationSplit qv;
    std::uint64_t hash;
};

Realization realize(const ExperimentConfig& cfg, int rep) {
    DriverPath d = simulate(cfg.driver, replication_stream(cfg.seed, static_cast<std::uint64_t>(rep), StreamRole::driver));
    auto path = std::make_shared<const CadlagPath>(std::move(d.path));
    QuadraticVariationSplit qv = quadratic_variation_split(*path, d.continuous_qv);
    return {path, std::move(qv), realization_hash(*path)};
}

/// min over the base grid of the slack in γ^ε(t) ≤ γ⁰(t) ≤ γ^ε(t + ε), and over
/// the γ-grid of the slack in ζ^ε(u) − ε ≤ ζ⁰(u) ≤ ζ^ε(u).
double sandwich_margin(const TimeChangeSystem& smoothed, const TimeChangeSystem& limit) {
    const double eps = smoothed.epsilon();
    const CadlagPath& g0 = limit.gamma0();
    const auto grid = g0.grid();
    const double horizon = g0.horizon();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double t = grid[k];
        const double g = g0.values()[k];
        margin = std::min(margin, g - smoothed.gamma(t));
        if (t + eps <= horizon) margin = std::min(margin, smoothed.gamma(t + eps) - g);
    }
    for (double u : smoothed.gamma_grid()) {
        const double ze = smoothed.zeta_smoothed(u);
        const double z0 = limit.zeta0(std::min(u, g0.values().back()));
        margin = std::min({margin, z0 - (ze - eps), ze - z0});
    }
    return margin;
}

std::vector<ConvergenceRecord> convergence_replication(const ExperimentConfig& cfg, int rep) {
    const Realization r = realize(cfg, rep);
    const SolverConfig solver = cfg.solver();
    const TimeChangeSystem limit = TimeChangeSystem::build(r.qv, r.path->jumps(), 0.0);

    std::vector<ConvergenceRecord> rows;
    std::optional<CadlagPath> x;
    std::string limit_error;
    try {
        x.emplace(solve_marcus(cfg.coefficients, *r.path, r.qv, solver));
    } catch (const DivergenceError& e) {
        limit_error = e.what();
    }

    for (double eps : cfg.epsilons) {
        ConvergenceRecord row;
        row.rep = rep;
        row.eps = eps;
        row.realization_hash = r.hash;
        const SmoothedPath l_eps = smooth(r.path, eps);
        const TimeChangeSystem sys = TimeChangeSystem::build(r.qv, r.path->jumps(), eps);
        double z_gap = 0.0;
        for (double u : sys.gamma_grid()) {
            z_gap = std::max(z_gap, std::abs(z_eps_at(l_eps, sys, u) - z_limit_at(*r.path, limit, u)));
        }
        row.z_gap = z_gap;
        row.sandwich_margin = sandwich_margin(sys, limit);
        try {
            if (!x) throw DivergenceError(limit_error, 0.0);
            const CadlagPath x_eps = solve_random_ode(cfg.coefficients, l_eps, solver);
            row.residual31 = y_eps_and_residual(x_eps, sys, l_eps, cfg.coefficients).residual;
            const MetricResult d = d_m1(x_eps, *x, cfg.metric_m);
            row.d_m1 = d.value;
            row.d_m1_lo = d.lower;
            row.d_m1_hi = d.upper;
        } catch (const DivergenceError& e) {
            row.d_m1 = row.d_m1_lo = row.d_m1_hi = row.residual31 = kNan;
            row.error = x ? e.what() : limit_error;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void ExperimentConfig::validate() const {
    driver.validate();
    if (epsilons.empty()) throw ConfigError("config: epsilons must not be empty");
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) throw ConfigError("config: epsilons must be positive");
        if (i > 0 && !(epsilons[i] < epsilons[i - 1])) throw ConfigError("config: epsilons must be strictly decreasing");
    }
    if (replications < 1) throw ConfigError("config: replications must be >= 1");
    if (!(passage_a > 0.0)) throw ConfigError("config: passage_a must be positive");
    if (metric_m < 8) throw ConfigError("config: metric_m must be >= 8");
    if (!(solver_step > 0.0)) throw ConfigError("config: solver_step must be positive");
    if (flow_substeps < 1) throw ConfigError("config: flow_substeps must be >= 1");
    if (workers < 1) throw ConfigError("config: workers must be >= 1");
}

SolverConfig ExperimentConfig::solver() const {
    SolverConfig s;
    s.x0 = x0;
    s.step = solver_step;
    s.flow_substeps = flow_substeps;
    return s;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    ExperimentConfig cfg;
    try {
        if (!j.contains("driver")) throw ConfigError("config: 'driver' missing");
        json driver = j.at("driver");
        if (j.contains("horizon")) driver["horizon"] = j.at("horizon");
        if (j.contains("dt")) driver["dt"] = j.at("dt");
        cfg.driver = parse_driver(driver);
        if (!j.contains("coefficients")) throw ConfigError("config: 'coefficients' missing");
        cfg.coefficients.drift = parse_family(j.at("coefficients"), "drift");
        cfg.coefficients.diffusion = parse_family(j.at("coefficients"), "diffusion");
        cfg.x0 = get_number(j, "x0", 0.0);
        if (!j.contains("epsilons")) throw ConfigError("config: 'epsilons' missing");
        cfg.epsilons = j.at("epsilons").get<std::vector<double>>();
        cfg.replications = j.value("replications", 1);
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.metric_m = j.value("metric_m", 512);
        cfg.passage_a = get_number(j, "passage_a", 0.5);
        cfg.solver_step = get_number(j, "solver_step", 1e-3);
        cfg.flow_substeps = j.value("flow_substeps", 32);
        cfg.out_dir = j.value("out", std::string("."));
        cfg.workers = j.value("workers", 1);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

std::uint64_t realization_hash(const CadlagPath& path) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](double v) {
        unsigned char bytes[sizeof(double)];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    };
    for (double t : path.grid()) feed(t);
    for (double v : path.values()) feed(v);
    for (const auto& j : path.jumps()) {
        feed(j.time);
        feed(j.size);
    }
    return h;
}

std::vector<ConvergenceRecord> run_convergence(const ExperimentConfig& cfg) {
    cfg.validate();
    auto per_rep = run_ordered<std::vector<ConvergenceRecord>>(
        cfg.replications, cfg.workers, [&](int rep) { return convergence_replication(cfg, rep); });
    std::vector<ConvergenceRecord> rows;
    for (auto& block : per_rep) std::move(block.begin(), block.end(), std::back_inserter(rows));
    return rows;
}

SpecialReport run_special_case(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Block {
        std::vector<SpecialRecord> records;
        SpecialSummary summary;
    };
    auto blocks = run_ordered<Block>(cfg.replications, cfg.workers, [&](int rep) {
        const Realization r = realize(cfg, rep);
        // b ≡ 0, f ≡ 1, X₀ = 0: X^ε = L^ε − L(0) and X = L − L(0); the shift cancels in both distances
        Block b;
        for (double eps : cfg.epsilons) {
            const SmoothedPath l_eps = smooth(r.path, eps);
            const CadlagPath smoothed = l_eps.to_path();
            const MetricResult d = d_m1(smoothed, *r.path, cfg.metric_m);
            double sup_gap = 0.0;
            const auto grid = l_eps.grid();
            const auto values = l_eps.grid_values();
            for (std::size_t k = 0; k < grid.size(); ++k) {
                sup_gap = std::max(sup_gap, std::abs(values[k] - r.path->evaluate(grid[k])));
                if (k > 0) sup_gap = std::max(sup_gap, std::abs(values[k] - r.path->left_limit(grid[k])));
            }
            b.records.push_back({rep, eps, d.value, d.lower, d.upper, sup_gap});
        }
        b.summary.rep = rep;
        b.summary.m1_nonincreasing = true;
        b.summary.sup_nonincreasing = true;
        for (std::size_t i = 1; i < b.records.size(); ++i) {
            const auto& prev = b.records[i - 1];
            const auto& next = b.records[i];
            if (next.d_m1_lo > prev.d_m1_hi) b.summary.m1_nonincreasing = false;
            if (next.sup_gap > prev.sup_gap) b.summary.sup_nonincreasing = false;
        }
        return b;
    });
    SpecialReport report;
    for (auto& b : blocks) {
        std::move(b.records.begin(), b.records.end(), std::back_inserter(report.records));
        report.summaries.push_back(b.summary);
    }
    return report;
}

PassageReport run_passage(const ExperimentConfig& cfg) {
    cfg.validate();
    const SolverConfig solver = cfg.solver();
    auto blocks = run_ordered<std::vector<PassageRecord>>(cfg.replications, cfg.workers, [&](int rep) {
        const Realization r = realize(cfg, rep);
        std::vector<PassageRecord> out;
        auto passage = [&](auto&& solve) -> std::optional<double> {
            try {
                return first_passage(solve(), cfg.passage_a);
            } catch (const DivergenceError&) {
                return 0.0;  // blow-up beyond the cap exceeds every level immediately
            }
        };
        out.push_back({rep, std::nullopt, passage([&] { return solve_marcus(cfg.coefficients, *r.path, r.qv, solver); })});
        for (double eps : cfg.epsilons) {
            const SmoothedPath l_eps = smooth(r.path, eps);
            out.push_back({rep, eps, passage([&] { return solve_random_ode(cfg.coefficients, l_eps, solver); })});
        }
        return out;
    });

    PassageReport report;
    for (auto& b : blocks) std::move(b.begin(), b.end(), std::back_inserter(report.records));
    std::vector<std::optional<double>> limit;
    for (const auto& rec : report.records) {
        if (!rec.eps) limit.push_back(rec.tau);
    }
    for (double eps : cfg.epsilons) {
        std::vector<std::optional<double>> sample;
        for (const auto& rec : report.records) {
            if (rec.eps && *rec.eps == eps) sample.push_back(rec.tau);
        }
        report.ks.push_back({eps, ks_two_sample(sample, limit), ks_band95(sample.size(), limit.size())});
    }
    return report;
}

double ks_two_sample(std::vector<std::optional<double>> x, std::vector<std::optional<double>> y) {
    if (x.empty() || y.empty()) throw DomainError("ks_two_sample: empty sample");
    const double inf = std::numeric_limits<double>::infinity();
    auto flatten = [&](const std::vector<std::optional<double>>& s) {
        std::vector<double> v;
        v.reserve(s.size());
        for (const auto& o : s) v.push_back(o.value_or(inf));
        std::sort(v.begin(), v.end());
        return v;
    };
    const std::vector<double> a = flatten(x);
    const std::vector<double> b = flatten(y);
    const double n = static_cast<double>(a.size());
    const double m = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double t = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == t) ++i;
        while (j < b.size() && b[j] == t) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
    }
    return d;
}

double ks_band95(std::size_t n, std::size_t m) {
    const double nn = static_cast<double>(n);
    const double mm = static_cast<double>(m);
    return 1.358 * std::sqrt((nn + mm) / (nn * mm));
}

double median(std::vector<double> values) {
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return std::isnan(v); }), values.end());
    if (values.empty()) return kNan;
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRecord>& rows) {
    out << "rep,eps,d_m1,d_m1_lo,d_m1_hi,z_gap,sandwich_margin,residual31,realization_hash\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.rep, number(r.eps), number(r.d_m1), number(r.d_m1_lo),
                           number(r.d_m1_hi), number(r.z_gap), number(r.sandwich_margin), number(r.residual31),
                           hex(r.realization_hash));
    }
}

void write_passage_csv(std::ostream& out, const std::vector<PassageRecord>& rows) {
    out << "rep,eps,tau\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{}\n", r.rep, r.eps ? number(*r.eps) : "limit", r.tau ? number(*r.tau) : "none");
    }
}

void write_ks_csv(std::ostream& out, const std::vector<KsRecord>& rows) {
    out << "eps,ks,band95\n";
    for (const auto& r : rows) out << fmt::format("{},{},{}\n", number(r.eps), number(r.ks), number(r.band95));
}

void write_special_csv(std::ostream& out, const SpecialReport& report) {
    out << "rep,eps,d_m1,d_m1_lo,d_m1_hi,sup_gap\n";
    for (const auto& r : report.records) {
        out << fmt::format("{},{},{},{},{},{}\n", r.rep, number(r.eps), number(r.d_m1), number(r.d_m1_lo),
                           number(r.d_m1_hi), number(r.sup_gap));
    }
}

std::string summary_json(const ExperimentConfig& cfg, const std::vector<ConvergenceRecord>* convergence,
                         const PassageReport* passage, const SpecialReport* special) {
    auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    json j;
    j["driver"] = cfg.driver.name();
    j["seed"] = cfg.seed;
    j["replications"] = cfg.replications;
    j["epsilons"] = cfg.epsilons;
    if (convergence) {
        json per_eps = json::array();
        for (double eps : cfg.epsilons) {
            std::vector<double> d, z, res;
            int diverged = 0;
            for (const auto& r : *convergence) {
                if (r.eps != eps) continue;
                d.push_back(r.d_m1);
                z.push_back(r.z_gap);
                res.push_back(r.residual31);
                if (!r.error.empty()) ++diverged;
            }
            per_eps.push_back({{"eps", eps},
                               {"median_d_m1", finite_or_null(median(d))},
                               {"median_z_gap", finite_or_null(median(z))},
                               {"median_residual31", finite_or_null(median(res))},
                               {"diverged", diverged}});
        }
        j["convergence"] = per_eps;
    }
    if (passage) {
        json per_eps = json::array();
        for (const auto& k : passage->ks) per_eps.push_back({{"eps", k.eps}, {"ks", k.ks}, {"band95", k.band95}});
        j["passage"] = {{"level", cfg.passage_a}, {"ks", per_eps}};
    }
    if (special) {
        json per_eps = json::array();
        for (double eps : cfg.epsilons) {
            std::vector<double> d, s;
            for (const auto& r : special->records) {
                if (r.eps != eps) continue;
                d.push_back(r.d_m1);
                s.push_back(r.sup_gap);
            }
            per_eps.push_back({{"eps", eps}, {"median_d_m1", finite_or_null(median(d))},
                               {"median_sup_gap", finite_or_null(median(s))}});
        }
        int m1 = 0, sup = 0;
        for (const auto& s : special->summaries) {
            m1 += s.m1_nonincreasing ? 1 : 0;
            sup += s.sup_nonincreasing ? 1 : 0;
        }
        j["special"] = {{"per_eps", per_eps}, {"m1_nonincreasing", m1}, {"sup_nonincreasing", sup}};
    }
    return j.dump(2) + "\n";
}

namespace {

CheckResult check(std::string name, bool ok, std::string detail = {}) {
    return {std::move(name), ok, std::move(detail)};
}

}  // namespace

std::vector<CheckResult> selfcheck(const SelfcheckOptions& options) {
    std::vector<CheckResult> out;
    constexpr double tol = 1e-12;

    // unit jump at 1 on [0, 3]
    const CadlagPath unit = simulate(DriverSpec::single_jump(1.0, 1.0, 3.0, 0.1), {}).path;
    const auto unit_qv = quadratic_variation_split(unit);
    const TimeChangeSystem unit0 = TimeChangeSystem::build(unit_qv, unit.jumps(), 0.0);
    {
        double worst = 0.0;
        for (std::size_t k = 0; k < unit.size(); ++k) {
            worst = std::max(worst, std::abs(unit0.zeta0(unit0.gamma0().values()[k]) - unit.grid()[k]));
        }
        out.push_back(check("unit-jump zeta0(gamma0(t)) = t exact", worst == 0.0, fmt::format("max error {}", worst)));
        out.push_back(check("unit-jump Z(1.5) = 0.5", std::abs(z_limit_at(unit, unit0, 1.5) - 0.5) <= tol,
                            fmt::format("Z(1.5) = {}", z_limit_at(unit, unit0, 1.5))));
    }

    const DriverPath jd = simulate(DriverSpec::jump_diffusion(1.0, 0.0, 2.0, JumpLaw::normal(0.0, 1.0), 1.0, 1e-3),
                                   replication_stream(42, 0, StreamRole::driver));
    struct Fixture {
        std::string name;
        CadlagPath path;
        std::optional<ContinuousQv> meta;
    };
    const std::vector<Fixture> fixtures{
        {"unit jump", unit, std::nullopt},
        {"jump of size 2", simulate(DriverSpec::single_jump(1.0, 2.0, 3.0, 0.1), {}).path, std::nullopt},
        {"jump-diffusion seed 42", jd.path, jd.continuous_qv},
    };

    for (const auto& fx : fixtures) {
        const auto qv = quadratic_variation_split(fx.path, fx.meta);
        const TimeChangeSystem lim = TimeChangeSystem::build(qv, fx.path.jumps(), 0.0);

        double width_err = 0.0;
        std::string width_detail;
        for (const auto& p : lim.plateaus()) {
            const double width = options.corrupt_plateau_width ? p.width * (1.0 + 1e-6) + 1e-9 : p.width;
            const double err = std::abs(width - p.jump_size * p.jump_size);
            if (err > width_err) {
                width_err = err;
                width_detail = fmt::format("tau = {}: width {} vs |dL|^2 {}", p.jump_time, width, p.jump_size * p.jump_size);
            }
        }
        const bool widths_ok = width_err <= tol;
        out.push_back(check(fx.name + (widths_ok ? ": plateau width = |ΔL|²" : ": plateau width ≠ |ΔL|²"), widths_ok,
                            width_detail));

        double inv_err = 0.0, comp_err = 0.0;
        for (std::size_t k = 0; k < fx.path.size(); ++k) {
            const double g = lim.gamma0().values()[k];
            inv_err = std::max(inv_err, std::abs(lim.zeta0(g) - fx.path.grid()[k]));
            comp_err = std::max(comp_err, std::abs(z_limit_at(fx.path, lim, g) - fx.path.values()[k]));
        }
        out.push_back(check(fx.name + ": zeta0∘gamma0 = id", inv_err <= tol, fmt::format("max error {}", inv_err)));
        out.push_back(check(fx.name + ": Z∘gamma0 = L", comp_err <= tol, fmt::format("max error {}", comp_err)));

        for (double eps : {0.1, 0.02}) {
            const TimeChangeSystem sys = TimeChangeSystem::build(qv, fx.path.jumps(), eps);
            const double margin = sandwich_margin(sys, lim);
            out.push_back(check(fmt::format("{}: sandwich eps={}", fx.name, eps), margin >= -tol,
                                fmt::format("min margin {}", margin)));
            const SmoothedPath v = v_eps(qv, eps);
            double id_err = 0.0;
            for (double t : sys.gamma_smoothed().grid()) {
                if (t >= eps) id_err = std::max(id_err, std::abs(sys.gamma(t) - v.evaluate(t) - t + eps / 2));
            }
            out.push_back(check(fmt::format("{}: gamma_eps = V_eps + t - eps/2 (eps={})", fx.name, eps),
                                id_err <= tol, fmt::format("max error {}", id_err)));
            const double wp = w_prime(v.to_path(), 0.1);
            out.push_back(check(fmt::format("{}: w'(V_eps, 0.1) = 0 (eps={})", fx.name, eps), wp == 0.0,
                                fmt::format("w' = {}", wp)));
        }
    }

    {
        const auto lin = CoefficientFamily::linear(1.0);
        const double zero = marcus_flow(CoefficientFamily::sin_scaled(1.0, 1.0), 0.0, 0.3, 32);
        out.push_back(check("marcus_flow(f, 0, u) = u", zero == 0.3, fmt::format("got {}", zero)));
        const double two = marcus_flow(lin, std::log(2.0), 1.0, 64);
        out.push_back(check("marcus_flow linear: u·e^c", std::abs(two - 2.0) <= 1e-10, fmt::format("got {}", two)));
        const double c = marcus_flow(CoefficientFamily::constant(1.5), 0.4, 1.0, 1);
        out.push_back(check("marcus_flow constant: u + a·c", c == 1.0 + 1.5 * 0.4, fmt::format("got {}", c)));
    }

    {
        const CadlagPath x({0.0, 0.5, 1.0}, {0.0, 1.0, 1.0}, {{0.5, 1.0}}, Interpolation::step);
        const CadlagPath y({0.0, 0.5, 1.0}, {0.0, 1.5, 1.5}, {{0.5, 1.5}}, Interpolation::step);
        const MetricResult self = d_m1(x, x);
        out.push_back(check("d_m1(x, x) = 0", self.value == 0.0 && self.lower == 0.0 && self.upper == 0.0,
                            fmt::format("value {} lower {} upper {}", self.value, self.lower, self.upper)));
        const MetricResult half = d_m1(x, y, 512);
        out.push_back(check("d_m1(1{t>=1/2}, 1.5·1{t>=1/2}) = 0.5", std::abs(half.value - 0.5) <= 0.02,
                            fmt::format("value {}", half.value)));
        double prev = std::numeric_limits<double>::infinity();
        bool separated = true;
        std::string detail;
        for (int n : {4, 8, 16, 32, 64}) {
            const auto [xn, step] = appendix_pair(n);
            const double m1 = d_m1(xn, step).value;
            const double j1_lower = d_j1(xn, step).lower;
            detail += fmt::format("n={}: m1 {} j1_lo {}; ", n, m1, j1_lower);
            separated = separated && m1 < prev && m1 <= 2.0 / n && j1_lower >= 0.4;
            prev = m1;
        }
        out.push_back(check("ramp/indicator separation", separated, detail));
    }

    {
        const CadlagPath spike({0.0, 0.1, 0.2, 0.3}, {0.0, 1.0, 0.0, 0.0}, {}, Interpolation::linear);
        const double ws = w_prime(spike, 0.25);
        out.push_back(check("w'(spike 0,1,0) = 1", ws == 1.0, fmt::format("w' = {}", ws)));
        const CadlagPath mono({0.0, 0.2, 0.5, 1.0}, {0.0, 0.3, 0.3, 2.0}, {}, Interpolation::linear);
        out.push_back(check("w'(monotone) = 0", w_prime(mono, 1.0) == 0.0));
    }
    return out;
}

}  // namespace wzlab
