#include "wzlab/solvers.hpp"

#include "wzlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace wzlab {

namespace {

void check_state(double x, double t, double cap, const char* what) {
    if (!std::isfinite(x) || std::abs(x) > cap) throw DivergenceError(what, t);
}

std::size_t substeps_for(double span, double step) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / step - 1e-9)));
}

}  // namespace

CoefficientFamily CoefficientFamily::from_config(const std::string& family, const std::vector<double>& params) {
    auto need = [&](std::size_t n) {
        if (params.size() != n) {
            throw ConfigError(fmt::format("coefficient family '{}' expects {} parameter(s), got {}", family, n,
                                          params.size()));
        }
    };
    if (family == "constant") {
        need(1);
        return constant(params[0]);
    }
    if (family == "sin_scaled") {
        need(2);
        return sin_scaled(params[0], params[1]);
    }
    if (family == "tanh_scaled") {
        need(2);
        return tanh_scaled(params[0], params[1]);
    }
    if (family == "linear") {
        need(1);
        return linear(params[0]);
    }
    if (family == "quadratic") {
        need(1);
        return quadratic(params[0]);
    }
    throw ConfigError("unknown coefficient family '" + family + "'");
}

double CoefficientFamily::value(double x) const {
    switch (kind) {
        case Kind::constant: return a;
        case Kind::sin_scaled: return a * std::sin(k * x);
        case Kind::tanh_scaled: return a * std::tanh(k * x);
        case Kind::linear: return a * x;
        case Kind::quadratic: return a * x * x;
    }
    return 0.0;
}

double CoefficientFamily::derivative(double x) const {
    switch (kind) {
        case Kind::constant: return 0.0;
        case Kind::sin_scaled: return a * k * std::cos(k * x);
        case Kind::tanh_scaled: {
            const double th = std::tanh(k * x);
            return a * k * (1.0 - th * th);
        }
        case Kind::linear: return a;
        case Kind::quadratic: return 2.0 * a * x;
    }
    return 0.0;
}

bool CoefficientFamily::bounded_lipschitz() const {
    switch (kind) {
        case Kind::constant:
        case Kind::sin_scaled:
        case Kind::tanh_scaled: return true;
        case Kind::linear: return a == 0.0;
        case Kind::quadratic: return a == 0.0;
    }
    return false;
}

std::string CoefficientFamily::name() const {
    switch (kind) {
        case Kind::constant: return "constant";
        case Kind::sin_scaled: return "sin_scaled";
        case Kind::tanh_scaled: return "tanh_scaled";
        case Kind::linear: return "linear";
        case Kind::quadratic: return "quadratic";
    }
    return "unknown";
}

std::vector<double> CoefficientFamily::params() const {
    switch (kind) {
        case Kind::sin_scaled:
        case Kind::tanh_scaled: return {a, k};
        default: return {a};
    }
}

namespace {

// Affine forcing f(x)·L^ε′ on [a, a + span], a breakpoint interval of L^ε. Sampling
// at interior points keeps rounded breakpoints out of the one-sided limits.
struct AffineForcing {
    double start;
    double slope;
};

AffineForcing forcing_on(const SmoothedPath& l_eps, double a, double span) {
    const double q1 = l_eps.derivative(a + 0.25 * span);
    const double q3 = l_eps.derivative(a + 0.75 * span);
    const double slope = 2.0 * (q3 - q1) / span;
    return {q1 - 0.25 * span * slope, slope};
}

double advance(const CoefficientSet& coeffs, const AffineForcing& g, double a, double length, double x,
               double max_step, double cap) {
    if (length <= 0.0) return x;
    auto rhs = [&](double s, double y) {
        return coeffs.drift.value(y) + coeffs.diffusion.value(y) * (g.start + g.slope * s);
    };
    const std::size_t n = substeps_for(length, max_step);
    const double h = length / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = static_cast<double>(i) * h;
        const double k1 = rhs(s, x);
        const double k2 = rhs(s + 0.5 * h, x + 0.5 * h * k1);
        const double k3 = rhs(s + 0.5 * h, x + 0.5 * h * k2);
        const double k4 = rhs(s + h, x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        check_state(x, a + s + h, cap, "random ODE diverged");
    }
    return x;
}

double random_ode_step(double window) { return std::min(1e-3, window / 10.0); }

}  // namespace

CadlagPath solve_random_ode(const CoefficientSet& coeffs, const SmoothedPath& l_eps, const SolverConfig& cfg) {
    if (!(cfg.step > 0.0)) throw ConfigError("solve_random_ode: step must be positive");
    const double max_step = std::min(cfg.step, l_eps.window() / 10.0);
    const auto grid = l_eps.grid();

    std::vector<double> values(grid.size());
    double x = cfg.x0;
    values[0] = x;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double span = grid[k + 1] - grid[k];
        x = advance(coeffs, forcing_on(l_eps, grid[k], span), grid[k], span, x, max_step, cfg.divergence_cap);
        values[k + 1] = x;
    }
    return CadlagPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), {}, Interpolation::linear);
}

double random_ode_dense(const CadlagPath& x_eps, const SmoothedPath& l_eps, const CoefficientSet& coeffs, double t) {
    const auto grid = x_eps.grid();
    const auto lg = l_eps.grid();
    if (grid.size() != lg.size() || !std::equal(grid.begin(), grid.end(), lg.begin())) return x_eps.evaluate(t);
    if (t <= grid.front()) return x_eps.values()[0];
    if (t >= grid.back()) return x_eps.values().back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - grid.begin()) - 1;
    if (grid[k] == t) return x_eps.values()[k];
    const double span = grid[k + 1] - grid[k];
    return advance(coeffs, forcing_on(l_eps, grid[k], span), grid[k], t - grid[k], x_eps.values()[k],
                   random_ode_step(l_eps.window()), 1e300);
}

double marcus_flow(const CoefficientFamily& f, double jump, double u, int substeps) {
    if (substeps < 1) throw ConfigError("marcus_flow: substeps must be >= 1");
    if (jump == 0.0) return u;
    if (f.kind == CoefficientFamily::Kind::constant) return u + f.a * jump;
    auto integrate = [&](int n) {
        const double h = 1.0 / n;
        double y = u;
        for (int i = 0; i < n; ++i) {
            const double k1 = jump * f.value(y);
            const double k2 = jump * f.value(y + 0.5 * h * k1);
            const double k3 = jump * f.value(y + 0.5 * h * k2);
            const double k4 = jump * f.value(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            if (!std::isfinite(y) || std::abs(y) > 1e12) throw DivergenceError("Marcus flow diverged", (i + 1) * h);
        }
        return y;
    };
    // Richardson extrapolation of the K and 2K RK4 runs cancels the h⁴ term
    const double coarse = integrate(substeps);
    const double fine = integrate(2 * substeps);
    return fine + (fine - coarse) / 15.0;
}

CadlagPath solve_marcus(const CoefficientSet& coeffs, const CadlagPath& path, const QuadraticVariationSplit& qv,
                        const SolverConfig& cfg) {
    if (!(cfg.step > 0.0)) throw ConfigError("solve_marcus: step must be positive");
    if (qv.discontinuous.size() != path.size()) {
        throw ConfigError("solve_marcus: quadratic variation split does not belong to the driver path");
    }
    const auto& b = coeffs.drift;
    const auto& f = coeffs.diffusion;
    const auto grid = path.grid();
    const auto lv = path.values();
    const auto qc = qv.continuous.values();

    std::vector<double> values(grid.size());
    std::vector<JumpRecord> jumps;
    double x = cfg.x0;
    values[0] = x;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double span = grid[k] - grid[k - 1];
        const double dlc = path.left_value(k) - lv[k - 1];
        if (cfg.scheme == ContinuousScheme::euler_strat) {
            const double dqc = qc[k] - qc[k - 1];
            const double fx = f.value(x);
            x += b.value(x) * span + fx * dlc + 0.5 * fx * f.derivative(x) * dqc;
            check_state(x, grid[k], cfg.divergence_cap, "Marcus solver diverged");
        } else {
            const double rate = dlc / span;
            auto rhs = [&](double y) { return b.value(y) + f.value(y) * rate; };
            const std::size_t n = substeps_for(span, cfg.step);
            const double h = span / static_cast<double>(n);
            for (std::size_t i = 0; i < n; ++i) {
                const double k1 = rhs(x);
                const double k2 = rhs(x + 0.5 * h * k1);
                const double k3 = rhs(x + 0.5 * h * k2);
                const double k4 = rhs(x + h * k3);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                check_state(x, grid[k - 1] + (i + 1) * h, cfg.divergence_cap, "Marcus solver diverged");
            }
        }
        const double jump = path.jump_at(k);
        if (jump != 0.0) {
            const double before = x;
            x = marcus_flow(f, jump, before, cfg.flow_substeps);
            check_state(x, grid[k], cfg.divergence_cap, "Marcus solver diverged");
            if (x != before) jumps.push_back({grid[k], x - before});
        }
        values[k] = x;
    }
    return CadlagPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), std::move(jumps),
                      Interpolation::linear);
}

TimeChangedSolution y_eps_and_residual(const CadlagPath& x_eps, const TimeChangeSystem& sys,
                                       const SmoothedPath& l_eps, const CoefficientSet& coeffs, int refine) {
    if (sys.is_limit() || sys.epsilon() != l_eps.window()) {
        throw ConfigError("y_eps_and_residual: time-change system and smoothed driver use different eps");
    }
    if (x_eps.horizon() != l_eps.horizon() || sys.horizon() != l_eps.horizon()) {
        throw ConfigError("y_eps_and_residual: inputs come from different realizations");
    }
    const std::vector<double> grid = refine_grid(sys.gamma_grid(), refine);
    const std::size_t n = grid.size();
    std::vector<double> y(n), z(n), zeta(n);
    for (std::size_t j = 0; j < n; ++j) {
        zeta[j] = sys.zeta_smoothed(grid[j]);
        y[j] = random_ode_dense(x_eps, l_eps, coeffs, zeta[j]);
        z[j] = l_eps.evaluate(zeta[j]);
    }
    const double x0 = x_eps.values()[0];
    double integral = x0;
    double residual = std::abs(y[0] - integral);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        integral += coeffs.drift.value(y[j]) * (zeta[j + 1] - zeta[j]) + coeffs.diffusion.value(y[j]) * (z[j + 1] - z[j]);
        residual = std::max(residual, std::abs(y[j + 1] - integral));
    }
    return {CadlagPath(grid, std::move(y), {}, Interpolation::linear), residual};
}

}  // namespace wzlab
