// Acceptance criteria 1–10. One PASS/FAIL line per criterion; exit status is
// nonzero when any criterion fails.

#include "wzlab/cadlag.hpp"
#include "wzlab/drivers.hpp"
#include "wzlab/harness.hpp"
#include "wzlab/skorokhod.hpp"
#include "wzlab/smoothing.hpp"
#include "wzlab/solvers.hpp"
#include "wzlab/timechange.hpp"

#include "m1_oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

using namespace wzlab;

namespace {

constexpr double kExact = 1e-12;

struct Outcome {
    bool passed;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

DriverSpec suite_driver() { return DriverSpec::jump_diffusion(1.0, 0.0, 2.0, JumpLaw::normal(0.0, 1.0), 1.0, 1e-3); }

DriverPath suite_path(int rep) { return simulate(suite_driver(), replication_stream(20240601, rep, StreamRole::driver)); }

std::vector<double> union_grid(std::span<const double> a, std::span<const double> b) {
    std::vector<double> g(a.begin(), a.end());
    g.insert(g.end(), b.begin(), b.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) return false;
    }
    return true;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += fmt::format("{}{:.4g}", s.empty() ? "" : " ", x);
    return s;
}

// sup over the union of both γ-grids of |Z^ε − Z|
double z_gap(const CadlagPath& path, const QuadraticVariationSplit& qv, double eps) {
    const auto limit = TimeChangeSystem::build(qv, path.jumps(), 0.0);
    const auto sys = TimeChangeSystem::build(qv, path.jumps(), eps);
    const SmoothedPath l = smooth(path, eps);
    double gap = 0.0;
    for (double u : union_grid(sys.gamma_grid(), limit.gamma_grid())) {
        if (u > sys.gamma_horizon()) continue;
        gap = std::max(gap, std::abs(z_eps_at(l, sys, u) - z_limit_at(path, limit, u)));
    }
    return gap;
}

Outcome criterion_sandwich() {
    const Stopwatch clock;
    double worst = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 100; ++rep) {
        const DriverPath d = suite_path(rep);
        const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
        const auto limit = TimeChangeSystem::build(qv, d.path.jumps(), 0.0);
        const double horizon = d.path.horizon();
        for (double eps : {0.1, 0.02}) {
            const auto sys = TimeChangeSystem::build(qv, d.path.jumps(), eps);
            for (double t : d.path.grid()) {
                const double g0 = limit.gamma(t);
                worst = std::min(worst, g0 - sys.gamma(t));
                if (t + eps <= horizon) worst = std::min(worst, sys.gamma(t + eps) - g0);
            }
            for (double u : union_grid(sys.gamma_grid(), limit.gamma_grid())) {
                if (u > std::min(sys.gamma_horizon(), limit.gamma_horizon())) continue;
                const double ze = sys.zeta(u);
                const double z0 = limit.zeta(u);
                worst = std::min({worst, z0 - (ze - eps), ze - z0});
            }
        }
    }
    const double secs = clock.seconds();
    return {worst >= -kExact && secs < 60.0, fmt::format("min slack {:.3g} (tol 1e-12), {:.1f} s (< 60 s)", worst, secs)};
}

Outcome criterion_identities() {
    double zeta_err = 0.0, z_err = 0.0, plateau_err = 0.0, gamma_err = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const DriverPath d = suite_path(rep);
        const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
        const auto limit = TimeChangeSystem::build(qv, d.path.jumps(), 0.0);
        for (double t : d.path.grid()) {
            const double u = limit.gamma(t);
            zeta_err = std::max(zeta_err, std::abs(limit.zeta0(u) - t));
            z_err = std::max(z_err, std::abs(z_limit_at(d.path, limit, u) - d.path.evaluate(t)));
        }
        for (const auto& p : limit.plateaus()) {
            plateau_err = std::max(plateau_err, std::abs((p.end - p.start) - p.jump_size * p.jump_size));
        }
        for (double eps : {0.1, 0.02}) {
            const auto sys = TimeChangeSystem::build(qv, d.path.jumps(), eps);
            const SmoothedPath v = v_eps(qv, eps);
            for (double t : sys.gamma_smoothed().grid()) {
                if (t < eps) continue;
                gamma_err = std::max(gamma_err, std::abs(sys.gamma(t) - (v.evaluate(t) + t - eps / 2.0)));
            }
        }
    }
    const bool ok = zeta_err <= kExact && z_err <= kExact && plateau_err <= kExact && gamma_err <= kExact;
    return {ok, fmt::format("zeta0(gamma0) {:.2g}, Z(gamma0) - L {:.2g}, plateau width {:.2g}, gamma_eps {:.2g} (tol 1e-12)",
                            zeta_err, z_err, plateau_err, gamma_err)};
}

Outcome criterion_monotone_chain() {
    double chain = std::numeric_limits<double>::infinity();
    double wp = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const DriverPath d = suite_path(rep);
        const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
        const SmoothedPath coarse = v_eps(qv, 0.1);
        const SmoothedPath fine = v_eps(qv, 0.02);
        for (double t : union_grid(coarse.grid(), fine.grid())) {
            chain = std::min({chain, fine.evaluate(t) - coarse.evaluate(t), qv.discontinuous.evaluate(t) - fine.evaluate(t)});
        }
        for (const SmoothedPath* v : {&coarse, &fine}) {
            for (double delta : {0.01, 0.1}) wp = std::max(wp, w_prime(v->to_path(), delta));
        }
    }
    return {chain >= 0.0 && wp == 0.0, fmt::format("min chain slack {:.3g} (>= 0), max w' {:.3g} (== 0)", chain, wp)};
}

Outcome criterion_step1() {
    const std::vector<double> ladder{0.2, 0.1, 0.05, 0.025};
    const DriverPath unit = simulate(DriverSpec::single_jump(0.5, 1.0, 1.0, 1e-3), {});
    const auto unit_qv = quadratic_variation_split(unit.path, unit.continuous_qv);
    std::vector<double> gaps;
    bool bounded = true;
    for (double eps : ladder) {
        gaps.push_back(z_gap(unit.path, unit_qv, eps));
        bounded = bounded && gaps.back() <= 2.0 * eps;
    }
    int monotone = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const DriverPath d = suite_path(rep);
        const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
        double prev = std::numeric_limits<double>::infinity();
        bool ok = true;
        for (double eps : ladder) {
            const double g = z_gap(d.path, qv, eps);
            ok = ok && g <= prev;
            prev = g;
        }
        monotone += ok ? 1 : 0;
    }
    const bool ok = strictly_decreasing(gaps) && bounded && monotone >= 45;
    return {ok, fmt::format("unit jump gaps [{}] (strictly decreasing, <= 2 eps), simulated nonincreasing {}/50 (>= 45)",
                            join(gaps), monotone)};
}

Outcome criterion_solvers() {
    SolverConfig cfg;
    std::vector<std::string> notes;
    bool ok = true;

    const DriverPath d = suite_path(0);
    const SmoothedPath l = smooth(d.path, 0.05);
    cfg.x0 = 1.0;
    const CadlagPath decay =
        solve_random_ode({CoefficientFamily::linear(-1.0), CoefficientFamily::constant(0.0)}, l, cfg);
    double decay_err = 0.0;
    for (std::size_t k = 0; k < decay.size(); ++k) {
        decay_err = std::max(decay_err, std::abs(decay.values()[k] - std::exp(-decay.grid()[k])));
    }
    ok = ok && decay_err <= 1e-8;
    notes.push_back(fmt::format("decay {:.2g} (1e-8)", decay_err));

    cfg.x0 = 0.7;
    const CadlagPath growth =
        solve_random_ode({CoefficientFamily::constant(0.0), CoefficientFamily::linear(1.0)}, l, cfg);
    double growth_err = 0.0;
    for (std::size_t k = 0; k < growth.size(); ++k) {
        const double exact = 0.7 * std::exp(l.evaluate(growth.grid()[k]) - l.evaluate(0.0));
        growth_err = std::max(growth_err, std::abs(growth.values()[k] - exact));
    }
    ok = ok && growth_err <= 1e-6;
    notes.push_back(fmt::format("linear forcing {:.2g} (1e-6)", growth_err));

    const DriverPath cp =
        simulate(DriverSpec::compound_poisson(5.0, JumpLaw::normal(0.0, 0.5), 1.0, 1e-3), {7, 0});
    cfg.x0 = 0.3;
    const CadlagPath pure = solve_marcus({CoefficientFamily::constant(0.0), CoefficientFamily::linear(1.0)}, cp.path,
                                         quadratic_variation_split(cp.path), cfg);
    double product = 0.3, pure_err = 0.0;
    std::size_t next = 0;
    const auto jumps = cp.path.jumps();
    for (std::size_t k = 0; k < pure.size(); ++k) {
        while (next < jumps.size() && jumps[next].time <= pure.grid()[k]) product *= std::exp(jumps[next++].size);
        pure_err = std::max(pure_err, std::abs(pure.values()[k] - product));
    }
    ok = ok && pure_err <= 1e-8;
    notes.push_back(fmt::format("pure-jump Marcus {:.2g} (1e-8)", pure_err));

    const DriverPath bm = simulate(DriverSpec::brownian(1.0, 0.0, 1.0, 1e-2), {11, 0});
    const auto bm_qv = quadratic_variation_split(bm.path, bm.continuous_qv);
    std::vector<double> errs;
    for (double h : {1e-2, 5e-3, 2.5e-3}) {
        cfg.x0 = 1.0;
        cfg.step = h;
        const CadlagPath x = solve_marcus({CoefficientFamily::constant(0.0), CoefficientFamily::linear(1.0)}, bm.path,
                                          bm_qv, cfg);
        double e = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            e = std::max(e, std::abs(x.values()[k] - std::exp(bm.path.values()[k] - bm.path.values()[0])));
        }
        errs.push_back(e);
    }
    const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
    ok = ok && r1 >= 3.0 && r2 >= 3.0;
    notes.push_back(fmt::format("Stratonovich ratios {:.1f} {:.1f} (>= 3)", r1, r2));

    const auto qv = quadratic_variation_split(d.path, d.continuous_qv);
    const auto sys = TimeChangeSystem::build(qv, d.path.jumps(), 0.1);
    const SmoothedPath l1 = smooth(d.path, 0.1);
    const CoefficientSet cs{CoefficientFamily::tanh_scaled(0.5, 1.0), CoefficientFamily::sin_scaled(1.0, 1.0)};
    cfg = SolverConfig{};
    cfg.x0 = 0.1;
    const CadlagPath xe = solve_random_ode(cs, l1, cfg);
    const double res1 = y_eps_and_residual(xe, sys, l1, cs, 1).residual;
    const double res2 = y_eps_and_residual(xe, sys, l1, cs, 2).residual;
    const double halving = res1 / res2;
    ok = ok && halving >= 1.7 && halving <= 2.3;
    notes.push_back(fmt::format("residual ratio {:.2f} (2 +/- 0.3)", halving));

    std::string detail;
    for (const auto& n : notes) detail += (detail.empty() ? "" : ", ") + n;
    return {ok, detail};
}

ExperimentConfig acceptance_config() { return ExperimentConfig::from_file(WZLAB_ACCEPTANCE_CONFIG); }

Outcome criterion_special_case() {
    ExperimentConfig cfg = acceptance_config();
    cfg.replications = 50;
    const Stopwatch clock;
    const SpecialReport report = run_special_case(cfg);
    const double secs = clock.seconds();
    const auto ok_paths = std::count_if(report.summaries.begin(), report.summaries.end(),
                                        [](const SpecialSummary& s) { return s.m1_nonincreasing; });
    return {ok_paths >= 48 && secs < 300.0,
            fmt::format("nonincreasing {}/50 (>= 95%), {:.1f} s (< 300 s)", ok_paths, secs)};
}

std::vector<double> medians_by_eps(const ExperimentConfig& cfg, const std::vector<ConvergenceRecord>& rows) {
    std::vector<double> out;
    for (double eps : cfg.epsilons) {
        std::vector<double> v;
        for (const auto& r : rows) {
            if (r.eps == eps) v.push_back(r.d_m1);
        }
        out.push_back(median(v));
    }
    return out;
}

Outcome criterion_convergence() {
    const ExperimentConfig cfg = acceptance_config();
    const Stopwatch clock;
    const auto rows = run_convergence(cfg);
    const double secs = clock.seconds();
    const auto med = medians_by_eps(cfg, rows);
    return {strictly_decreasing(med) && secs < 900.0 && cfg.replications == 200,
            fmt::format("{} reps, medians [{}] (strictly decreasing), {:.1f} s (< 900 s)", cfg.replications, join(med),
                        secs)};
}

Outcome criterion_passage() {
    ExperimentConfig cfg = acceptance_config();
    cfg.replications = 2000;
    const PassageReport report = run_passage(cfg);
    const auto at = [&](double eps) {
        return *std::find_if(report.ks.begin(), report.ks.end(), [eps](const KsRecord& k) { return k.eps == eps; });
    };
    const KsRecord coarse = at(0.2), fine = at(0.02);
    return {fine.ks < coarse.ks, fmt::format("KS(0.02) {:.4f} < KS(0.2) {:.4f}, 95% band {:.4f}", fine.ks, coarse.ks,
                                            fine.band95)};
}

CadlagPath indicator(double level) {
    return CadlagPath({0.0, 0.5, 1.0}, {0.0, level, level}, {{0.5, level}}, Interpolation::step);
}

CadlagPath random_step(std::mt19937_64& rng, int jumps) {
    std::uniform_int_distribution<int> slot(1, 15);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<int> slots;
    while (static_cast<int>(slots.size()) < jumps) {
        const int s = slot(rng);
        if (std::find(slots.begin(), slots.end(), s) == slots.end()) slots.push_back(s);
    }
    std::sort(slots.begin(), slots.end());
    std::vector<double> grid{0.0}, values{g(rng)};
    std::vector<JumpRecord> js;
    for (int s : slots) {
        grid.push_back(s / 16.0);
        const double j = g(rng);
        values.push_back(values.back() + j);
        js.push_back({s / 16.0, j});
    }
    grid.push_back(1.0);
    values.push_back(values.back());
    return CadlagPath(grid, values, js, Interpolation::step);
}

Outcome criterion_metrics() {
    std::mt19937_64 rng(2024);
    std::vector<std::pair<CadlagPath, CadlagPath>> fixtures{{indicator(1.0), indicator(1.5)},
                                                            {indicator(1.0), CadlagPath::constant(0.0, 1.0)},
                                                            {indicator(-1.0), indicator(2.0)}};
    for (int i = 0; i < 20; ++i) {
        CadlagPath x = random_step(rng, 1 + i % 2);
        CadlagPath y = random_step(rng, 1 + (i / 2) % 2);
        fixtures.emplace_back(std::move(x), std::move(y));
    }
    double worst_rel = 0.0;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        const auto& [x, y] = fixtures[i];
        const double dp = d_m1(x, y, 256).value;
        const double bf = wzlab::testing::brute_force_m1(x, y, 100000, 100 + i);
        worst_rel = std::max(worst_rel, std::abs(dp - bf) / bf);
    }

    std::vector<double> sep;
    bool bounded = true;
    double j1_lower = std::numeric_limits<double>::infinity();
    for (int n : {4, 8, 16, 32, 64}) {
        const auto [xn, x] = appendix_pair(n);
        sep.push_back(d_m1(xn, x).value);
        bounded = bounded && sep.back() <= 2.0 / n;
        j1_lower = std::min(j1_lower, d_j1(xn, x).lower);
    }

    double self = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
        const CadlagPath p = suite_path(rep).path;
        const MetricResult r = d_m1(p, p);
        self = std::max({self, r.value, r.lower, r.upper});
    }
    for (const auto& [x, y] : fixtures) self = std::max(self, d_m1(x, x).value);

    const bool ok = worst_rel <= 0.05 && bounded && strictly_decreasing(sep) && j1_lower >= 0.4 && self == 0.0;
    return {ok, fmt::format("oracle rel err {:.3f} on {} fixtures (<= 0.05), ramp pair [{}] (<= 2/n, decreasing), "
                            "j1 lower {:.3f} (>= 0.4), self {:.2g} (== 0)",
                            worst_rel, fixtures.size(), join(sep), j1_lower, self)};
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_reproducibility() {
    std::vector<std::string> csv;
    for (const char* dir : {"repro_a", "repro_b"}) {
        const std::string cmd = fmt::format("\"{}\" --config \"{}\" --out {} converge > /dev/null", WZLAB_CLI_PATH,
                                            WZLAB_REPRO_CONFIG, dir);
        if (std::system(cmd.c_str()) != 0) return {false, fmt::format("command failed: {}", cmd)};
        csv.push_back(slurp(std::string(dir) + "/convergence.csv"));
    }
    const bool ok = !csv[0].empty() && csv[0] == csv[1];
    return {ok, fmt::format("convergence.csv {} bytes, identical: {}", csv[0].size(), csv[0] == csv[1])};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"sandwich inequalities", criterion_sandwich},
        {"exact identities", criterion_identities},
        {"V_eps monotone chain and w'", criterion_monotone_chain},
        {"uniform convergence of Z_eps", criterion_step1},
        {"solver oracles", criterion_solvers},
        {"smoothed driver M1 monotonicity", criterion_special_case},
        {"median d_m1 convergence", criterion_convergence},
        {"first-passage KS", criterion_passage},
        {"metric suite", criterion_metrics},
        {"reproducible converge CSV", criterion_reproducibility},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        failures += o.passed ? 0 : 1;
        fmt::print("{} {:2}. {}: {}\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
        std::fflush(stdout);
    }
    fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
