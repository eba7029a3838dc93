#include "wzlab/timechange.hpp"

#include "wzlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace wzlab {

namespace {

constexpr int kPlateauSamples = 16;

CadlagPath make_gamma0(const QuadraticVariationSplit& qv) {
    const auto& disc = qv.discontinuous;
    const auto grid = disc.grid();
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = disc.values()[k] + grid[k];
    std::vector<JumpRecord> jumps(disc.jumps().begin(), disc.jumps().end());
    return CadlagPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), std::move(jumps),
                      Interpolation::linear);
}

}  // namespace

TimeChangeSystem TimeChangeSystem::build(const QuadraticVariationSplit& qv, std::span<const JumpRecord> jumps,
                                         double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw DomainError(fmt::format("timechange: eps = {} invalid", eps));
    TimeChangeSystem sys(eps, make_gamma0(qv));
    if (eps > 0.0) sys.gamma_eps_.emplace(std::make_shared<const CadlagPath>(qv.discontinuous), eps, true);

    const auto squared = qv.discontinuous.jumps();
    if (squared.size() != jumps.size()) {
        throw ConfigError("timechange: jump registry does not match the quadratic variation split");
    }
    sys.plateaus_.reserve(jumps.size());
    for (std::size_t i = 0; i < jumps.size(); ++i) {
        if (squared[i].time != jumps[i].time) {
            throw ConfigError("timechange: jump registry does not match the quadratic variation split");
        }
        const double tau = jumps[i].time;
        const double start = sys.gamma0_.left_limit(tau);
        const double end = sys.gamma0_.evaluate(tau);
        sys.plateaus_.push_back({tau, jumps[i].size, start, end, end - start});
    }

    const double upper = eps > 0.0 ? sys.gamma_eps_->grid_values().back() : sys.gamma0_.values().back();
    std::vector<double> g;
    g.reserve(sys.gamma0_.size() + sys.plateaus_.size() * (kPlateauSamples + 1) +
              (sys.gamma_eps_ ? sys.gamma_eps_->grid().size() : 0));
    for (double v : sys.gamma0_.values()) g.push_back(v);
    for (const auto& p : sys.plateaus_) {
        g.push_back(p.start);
        for (int j = 1; j <= kPlateauSamples; ++j) {
            g.push_back(p.start + p.width * static_cast<double>(j) / (kPlateauSamples + 1));
        }
    }
    if (sys.gamma_eps_) {
        for (double v : sys.gamma_eps_->grid_values()) g.push_back(v);
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    while (!g.empty() && g.back() > upper) g.pop_back();
    if (g.empty() || g.back() != upper) g.push_back(upper);
    sys.gamma_grid_ = std::move(g);
    return sys;
}

const SmoothedPath& TimeChangeSystem::gamma_smoothed() const {
    if (!gamma_eps_) throw ConfigError("timechange: the limit system has no smoothed clock");
    return *gamma_eps_;
}

double TimeChangeSystem::gamma(double t) const { return gamma_eps_ ? gamma_eps_->evaluate(t) : gamma0_.evaluate(t); }

double TimeChangeSystem::zeta0(double u) const {
    const auto grid = gamma0_.grid();
    const auto values = gamma0_.values();
    if (u <= values.front()) return 0.0;
    if (u >= values.back()) {
        if (u > values.back() * (1.0 + 1e-12) + 1e-12) {
            throw DomainError(fmt::format("zeta0: u = {} beyond gamma0(T) = {}", u, values.back()));
        }
        return grid.back();
    }
    // last k with γ⁰(t_k) ≤ u
    auto it = std::upper_bound(values.begin(), values.end(), u);
    const auto k = static_cast<std::size_t>(it - values.begin()) - 1;
    const double next_left = gamma0_.left_value(k + 1);
    if (u < next_left) {
        return grid[k] + (u - values[k]) * (grid[k + 1] - grid[k]) / (next_left - values[k]);
    }
    return grid[k + 1];  // on the plateau of the jump at t_{k+1}
}

double TimeChangeSystem::zeta_smoothed(double u) const {
    const auto& clock = gamma_smoothed();
    const auto grid = clock.grid();
    const auto values = clock.grid_values();
    if (u <= values.front()) return 0.0;
    if (u >= values.back()) {
        if (u > values.back() * (1.0 + 1e-12) + 1e-12) {
            throw DomainError(fmt::format("zeta: u = {} beyond gamma_eps(T) = {}", u, values.back()));
        }
        return grid.back();
    }
    auto it = std::upper_bound(values.begin(), values.end(), u);
    const auto k = static_cast<std::size_t>(it - values.begin()) - 1;
    const double a = grid[k];
    const double span = grid[k + 1] - a;
    const double ga = values[k];
    const double r = u - ga;
    if (r == 0.0) return a;
    // γ^ε is quadratic on each grid interval: matches γ(a), γ(b) and γ′(a+)
    const double slope = clock.derivative(a);
    const double curvature = 2.0 * (values[k + 1] - ga - slope * span) / (span * span);
    double d;
    const double disc = slope * slope + 2.0 * curvature * r;
    if (std::abs(curvature) * span < 1e-12 * std::max(1.0, slope) || disc < 0.0) {
        d = r * span / (values[k + 1] - ga);
    } else {
        d = 2.0 * r / (slope + std::sqrt(disc));
    }
    return a + std::clamp(d, 0.0, span);
}

const PlateauRecord* TimeChangeSystem::plateau_at(double u) const {
    auto it = std::upper_bound(plateaus_.begin(), plateaus_.end(), u,
                               [](double x, const PlateauRecord& p) { return x < p.start; });
    if (it == plateaus_.begin()) return nullptr;
    --it;
    return u <= it->end ? &*it : nullptr;
}

std::vector<double> refine_grid(std::span<const double> grid, int factor) {
    if (factor < 1) throw DomainError("refine_grid: factor must be >= 1");
    std::vector<double> out;
    if (grid.empty()) return out;
    out.reserve((grid.size() - 1) * static_cast<std::size_t>(factor) + 1);
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        out.push_back(grid[k]);
        for (int j = 1; j < factor; ++j) {
            // sub-ulp intervals would repeat a point
            const double s = grid[k] + (grid[k + 1] - grid[k]) * static_cast<double>(j) / factor;
            if (s > out.back() && s < grid[k + 1]) out.push_back(s);
        }
    }
    out.push_back(grid.back());
    return out;
}

double z_eps_at(const SmoothedPath& l_eps, const TimeChangeSystem& sys, double u) {
    return l_eps.evaluate(sys.zeta(u));
}

CadlagPath z_eps(const SmoothedPath& l_eps, const TimeChangeSystem& sys) {
    if (sys.is_limit() || l_eps.window() != sys.epsilon()) {
        throw ConfigError(fmt::format("z_eps: smoothed path window {} does not match system eps {}", l_eps.window(),
                                      sys.epsilon()));
    }
    const auto grid = sys.gamma_grid();
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = z_eps_at(l_eps, sys, grid[k]);
    return CadlagPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), {}, Interpolation::linear);
}

double z_limit_at(const CadlagPath& path, const TimeChangeSystem& sys, double u) {
    if (const auto* p = sys.plateau_at(u)) {
        const double before = path.left_limit(p->jump_time);
        const double after = path.evaluate(p->jump_time);
        return (u - p->start) / p->width * after + (p->end - u) / p->width * before;
    }
    return path.evaluate(sys.zeta0(u));
}

CadlagPath z_limit(const CadlagPath& path, const TimeChangeSystem& sys) {
    const auto grid = sys.gamma_grid();
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = z_limit_at(path, sys, grid[k]);
    return CadlagPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), {}, Interpolation::linear);
}

CadlagPath u_eps(const CadlagPath& z, const CadlagPath& path, const TimeChangeSystem& sys) {
    const auto grid = z.grid();
    std::vector<double> values(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) values[k] = z.values()[k] - path.evaluate(sys.zeta(grid[k]));
    return CadlagPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), {}, Interpolation::linear);
}

}  // namespace wzlab
