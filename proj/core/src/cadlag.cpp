#include "wzlab/cadlag.hpp"

#include "wzlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace wzlab {

namespace {

constexpr double kJumpTolerance = 1e-12;

}  // namespace

CadlagPath::CadlagPath(std::vector<double> grid, std::vector<double> values, std::vector<JumpRecord> jumps,
                       Interpolation interpolation)
    : grid_(std::move(grid)),
      values_(std::move(values)),
      jumps_(std::move(jumps)),
      interpolation_(interpolation) {
    if (grid_.size() < 2) throw ConfigError("CadlagPath: grid needs at least two points");
    if (values_.size() != grid_.size()) throw ConfigError("CadlagPath: grid and values differ in length");
    if (grid_.front() != 0.0) throw ConfigError("CadlagPath: grid must start at 0");
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        if (!(grid_[k] > grid_[k - 1])) {
            throw ConfigError(fmt::format("CadlagPath: grid not strictly increasing at index {}", k));
        }
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw ConfigError("CadlagPath: nonfinite value");
    }

    jump_at_.assign(grid_.size(), 0.0);
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
        const auto& j = jumps_[i];
        if (j.size == 0.0 || !std::isfinite(j.size)) throw ConfigError("CadlagPath: jump sizes must be nonzero");
        if (i > 0 && !(j.time > jumps_[i - 1].time)) {
            throw ConfigError("CadlagPath: jump times must be strictly increasing");
        }
        auto it = std::lower_bound(grid_.begin(), grid_.end(), j.time);
        if (it == grid_.end() || *it != j.time || it == grid_.begin()) {
            throw ConfigError(fmt::format("CadlagPath: jump time {} is not an interior grid point", j.time));
        }
        jump_at_[static_cast<std::size_t>(it - grid_.begin())] = j.size;
    }

    left_.resize(grid_.size());
    left_[0] = values_[0];
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        if (interpolation_ == Interpolation::step) {
            left_[k] = values_[k - 1];
            if (jump_at_[k] != 0.0) {
                const double realized = values_[k] - values_[k - 1];
                const double scale = std::max({1.0, std::abs(values_[k]), std::abs(values_[k - 1])});
                if (std::abs(realized - jump_at_[k]) > kJumpTolerance * scale) {
                    throw ConfigError(fmt::format("CadlagPath: jump at t = {} has size {} but values differ by {}",
                                                  grid_[k], jump_at_[k], realized));
                }
            }
        } else {
            left_[k] = values_[k] - jump_at_[k];
        }
    }

    cumulative_.resize(grid_.size());
    prefix_sup_.resize(grid_.size());
    cumulative_[0] = 0.0;
    prefix_sup_[0] = values_[0];
    for (std::size_t k = 1; k < grid_.size(); ++k) {
        const double dt = grid_[k] - grid_[k - 1];
        cumulative_[k] = cumulative_[k - 1] + 0.5 * (values_[k - 1] + left_[k]) * dt;
        prefix_sup_[k] = std::max({prefix_sup_[k - 1], left_[k], values_[k]});
    }
}

CadlagPath CadlagPath::constant(double value, double horizon) {
    if (!(horizon > 0.0)) throw ConfigError("CadlagPath::constant: horizon must be positive");
    return CadlagPath({0.0, horizon}, {value, value}, {}, Interpolation::step);
}

std::size_t CadlagPath::segment(double t) const {
    auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
    auto k = static_cast<std::size_t>(it - grid_.begin());
    if (k == 0) return 0;
    return std::min(k - 1, grid_.size() - 2);
}

double CadlagPath::evaluate(double t) const {
    if (!(t >= 0.0 && t <= horizon())) {
        throw DomainError(fmt::format("evaluate: t = {} outside [0, {}]", t, horizon()));
    }
    if (t == horizon()) return values_.back();
    const std::size_t k = segment(t);
    if (t == grid_[k]) return values_[k];
    const double w = (t - grid_[k]) / (grid_[k + 1] - grid_[k]);
    return values_[k] + (left_[k + 1] - values_[k]) * w;
}

double CadlagPath::left_limit(double t) const {
    if (!(t > 0.0 && t <= horizon())) {
        throw DomainError(fmt::format("left_limit: t = {} outside (0, {}]", t, horizon()));
    }
    auto it = std::lower_bound(grid_.begin(), grid_.end(), t);
    if (it != grid_.end() && *it == t) return left_[static_cast<std::size_t>(it - grid_.begin())];
    return evaluate(t);
}

double CadlagPath::primitive(double t) const {
    if (t <= 0.0) return values_[0] * t;
    if (t >= horizon()) {
        return cumulative_.back() + values_.back() * (t - horizon());
    }
    const std::size_t k = segment(t);
    const double d = t - grid_[k];
    const double span = grid_[k + 1] - grid_[k];
    return cumulative_[k] + values_[k] * d + (left_[k + 1] - values_[k]) * d * d / (2.0 * span);
}

double CadlagPath::running_sup(double t) const {
    if (!(t >= 0.0 && t <= horizon())) {
        throw DomainError(fmt::format("running_sup: t = {} outside [0, {}]", t, horizon()));
    }
    const std::size_t k = segment(t);
    if (t == horizon()) return prefix_sup_.back();
    return std::max(prefix_sup_[k], evaluate(t));
}

QuadraticVariationSplit quadratic_variation_split(const CadlagPath& path, std::optional<ContinuousQv> meta) {
    const auto grid = path.grid();
    const std::size_t n = grid.size();
    std::vector<double> disc(n), cont(n);
    std::vector<JumpRecord> squared;
    squared.reserve(path.jumps().size());
    double acc_d = 0.0;
    double acc_c = 0.0;
    disc[0] = 0.0;
    cont[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double jump = path.jump_at(k);
        if (jump != 0.0) {
            acc_d += jump * jump;
            squared.push_back({grid[k], jump * jump});
        }
        disc[k] = acc_d;
        if (meta) {
            cont[k] = meta->rate * grid[k];
        } else {
            const double inc = path.left_value(k) - path.values()[k - 1];
            acc_c += inc * inc;
            cont[k] = acc_c;
        }
    }
    std::vector<double> g(grid.begin(), grid.end());
    return QuadraticVariationSplit{CadlagPath(g, std::move(disc), std::move(squared), Interpolation::step),
                                   CadlagPath(g, std::move(cont), {}, Interpolation::linear)};
}

double running_sup(const CadlagPath& path, double t) { return path.running_sup(t); }

std::optional<double> first_passage(const CadlagPath& path, double level) {
    if (!(level > 0.0)) throw DomainError("first_passage: level must be positive");
    const auto grid = path.grid();
    const auto values = path.values();
    if (values[0] > level) return 0.0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
        const double start = values[k];
        const double end = path.left_value(k + 1);
        if (end > level) {
            if (start > level) return grid[k];
            // start ≤ level < end: linear crossing inside the segment
            const double w = (level - start) / (end - start);
            return grid[k] + w * (grid[k + 1] - grid[k]);
        }
        if (values[k + 1] > level) return grid[k + 1];
    }
    return std::nullopt;
}

void write_path_csv(std::ostream& out, const CadlagPath& path) {
    out << "# interpolation=" << (path.interpolation() == Interpolation::step ? "step" : "linear") << '\n';
    out << "time,value,is_jump,jump_size\n";
    const auto grid = path.grid();
    const auto values = path.values();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double j = path.jump_at(k);
        out << fmt::format("{},{},{},{}\n", grid[k], values[k], j != 0.0 ? 1 : 0, j);
    }
}

CadlagPath read_path_csv(std::istream& in) {
    std::string line;
    Interpolation interp = Interpolation::linear;
    bool header = false;
    std::vector<double> grid, values;
    std::vector<JumpRecord> jumps;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.front() == '#') {
            if (line.find("interpolation=step") != std::string::npos) interp = Interpolation::step;
            continue;
        }
        if (!header) {
            if (line.rfind("time,value,is_jump,jump_size", 0) != 0) {
                throw ConfigError("path CSV: missing header 'time,value,is_jump,jump_size'");
            }
            header = true;
            continue;
        }
        std::stringstream row(line);
        std::string cell[4];
        for (auto& c : cell) {
            if (!std::getline(row, c, ',')) throw ConfigError("path CSV: malformed row '" + line + "'");
        }
        const double t = std::stod(cell[0]);
        grid.push_back(t);
        values.push_back(std::stod(cell[1]));
        if (std::stoi(cell[2]) != 0) jumps.push_back({t, std::stod(cell[3])});
    }
    if (!header) throw ConfigError("path CSV: empty input");
    return CadlagPath(std::move(grid), std::move(values), std::move(jumps), interp);
}

}  // namespace wzlab
