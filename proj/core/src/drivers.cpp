#include "wzlab/drivers.hpp"

#include "wzlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace wzlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<double> uniform_grid(double horizon, double dt) {
    const auto n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    std::vector<double> grid;
    grid.reserve(n + 1);
    for (std::size_t k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) * dt);
    grid.push_back(horizon);
    return grid;
}

void insert_times(std::vector<double>& grid, const std::vector<double>& times) {
    grid.insert(grid.end(), times.begin(), times.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
}

double sample_jump(const JumpLaw& law, Engine& engine) {
    if (law.kind == JumpLaw::Kind::normal) {
        std::normal_distribution<double> normal(law.first, law.second);
        return normal(engine);
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    return unif(engine) < law.second ? law.first : law.third;
}

DriverPath simulate_jump_diffusion(const DriverSpec& spec, Engine& engine) {
    const double horizon = spec.horizon;

    std::vector<JumpRecord> jumps;
    if (spec.lambda > 0.0) {
        std::poisson_distribution<long> count_dist(spec.lambda * horizon);
        const long count = count_dist(engine);
        std::uniform_real_distribution<double> unif(0.0, horizon);
        std::vector<double> times(static_cast<std::size_t>(count));
        for (auto& t : times) t = horizon - unif(engine);  // (0, T]
        std::vector<double> sizes(times.size());
        for (auto& s : sizes) s = sample_jump(spec.jump_law, engine);
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (sizes[i] != 0.0) jumps.push_back({times[i], sizes[i]});
        }
        std::sort(jumps.begin(), jumps.end(), [](const auto& a, const auto& b) { return a.time < b.time; });
        // coincident arrivals merge into one jump
        std::vector<JumpRecord> merged;
        for (const auto& j : jumps) {
            if (!merged.empty() && merged.back().time == j.time) {
                merged.back().size += j.size;
                if (merged.back().size == 0.0) merged.pop_back();
            } else {
                merged.push_back(j);
            }
        }
        jumps = std::move(merged);
    }

    std::vector<double> grid = uniform_grid(horizon, spec.dt);
    std::vector<double> jump_times;
    for (const auto& j : jumps) jump_times.push_back(j.time);
    insert_times(grid, jump_times);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> values(grid.size());
    double brownian = 0.0;
    double jump_sum = 0.0;
    std::size_t next_jump = 0;
    values[0] = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double step = grid[k] - grid[k - 1];
        const double z = gauss(engine);
        if (spec.sigma > 0.0) brownian += spec.sigma * std::sqrt(step) * z;
        while (next_jump < jumps.size() && jumps[next_jump].time == grid[k]) {
            jump_sum += jumps[next_jump].size;
            ++next_jump;
        }
        values[k] = spec.mu * grid[k] + brownian + jump_sum;
    }

    return DriverPath{CadlagPath(std::move(grid), std::move(values), std::move(jumps), Interpolation::linear),
                      ContinuousQv{spec.sigma * spec.sigma}};
}

}  // namespace

double JumpLaw::mean() const {
    if (kind == Kind::normal) return first;
    return second * first + (1.0 - second) * third;
}

double JumpLaw::second_moment() const {
    if (kind == Kind::normal) return second * second + first * first;
    return second * first * first + (1.0 - second) * third * third;
}

DriverSpec DriverSpec::brownian(double sigma, double mu, double horizon, double dt) {
    DriverSpec s;
    s.kind = Kind::brownian;
    s.sigma = sigma;
    s.mu = mu;
    s.horizon = horizon;
    s.dt = dt;
    return s;
}

DriverSpec DriverSpec::compound_poisson(double lambda, JumpLaw law, double horizon, double dt) {
    DriverSpec s;
    s.kind = Kind::compound_poisson;
    s.lambda = lambda;
    s.jump_law = law;
    s.horizon = horizon;
    s.dt = dt;
    return s;
}

DriverSpec DriverSpec::jump_diffusion(double sigma, double mu, double lambda, JumpLaw law, double horizon,
                                      double dt) {
    DriverSpec s;
    s.kind = Kind::jump_diffusion;
    s.sigma = sigma;
    s.mu = mu;
    s.lambda = lambda;
    s.jump_law = law;
    s.horizon = horizon;
    s.dt = dt;
    return s;
}

DriverSpec DriverSpec::single_jump(double time, double size, double horizon, double dt) {
    DriverSpec s;
    s.kind = Kind::single_jump;
    s.jump_time = time;
    s.jump_size = size;
    s.horizon = horizon;
    s.dt = dt;
    return s;
}

DriverSpec DriverSpec::appendix_ramp(int n) {
    DriverSpec s;
    s.kind = Kind::appendix_ramp;
    s.ramp_n = n;
    s.horizon = 1.0;
    s.dt = 0.5;
    return s;
}

DriverSpec DriverSpec::constant(double level, double horizon, double dt) {
    DriverSpec s;
    s.kind = Kind::constant;
    s.level = level;
    s.horizon = horizon;
    s.dt = dt;
    return s;
}

void DriverSpec::validate() const {
    if (!(horizon > 0.0)) throw ConfigError("driver: horizon must be positive");
    if (!(dt > 0.0)) throw ConfigError("driver: dt must be positive");
    if (!(sigma >= 0.0)) throw ConfigError("driver: sigma must be nonnegative");
    if (!(lambda >= 0.0)) throw ConfigError("driver: lambda must be nonnegative");
    if (!std::isfinite(mu)) throw ConfigError("driver: mu must be finite");
    if (jump_law.kind == JumpLaw::Kind::normal && !(jump_law.second >= 0.0)) {
        throw ConfigError("driver: jump sd must be nonnegative");
    }
    if (jump_law.kind == JumpLaw::Kind::two_point && !(jump_law.second >= 0.0 && jump_law.second <= 1.0)) {
        throw ConfigError("driver: two-point probability must lie in [0, 1]");
    }
    switch (kind) {
        case Kind::single_jump:
            if (!(jump_time > 0.0 && jump_time <= horizon)) throw ConfigError("driver: jump time must lie in (0, T]");
            if (jump_size == 0.0) throw ConfigError("driver: jump size must be nonzero");
            break;
        case Kind::appendix_ramp:
            if (ramp_n < 2) throw ConfigError("driver: appendix_ramp needs n >= 2");
            if (horizon != 1.0) throw ConfigError("driver: appendix_ramp needs T = 1");
            break;
        default:
            break;
    }
}

std::string DriverSpec::name() const {
    switch (kind) {
        case Kind::brownian: return "brownian";
        case Kind::compound_poisson: return "compound_poisson";
        case Kind::jump_diffusion: return "jump_diffusion";
        case Kind::single_jump: return "single_jump";
        case Kind::appendix_ramp: return "appendix_ramp";
        case Kind::constant: return "constant";
    }
    return "unknown";
}

RandomSeed replication_stream(std::uint64_t master, std::uint64_t replication, StreamRole role) {
    return RandomSeed{master, replication * 16 + static_cast<std::uint64_t>(role)};
}

Engine make_engine(RandomSeed seed) {
    const std::uint64_t mixed = splitmix64(splitmix64(seed.master) ^ splitmix64(seed.stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32),
                      static_cast<std::uint32_t>(seed.stream), static_cast<std::uint32_t>(seed.stream >> 32)};
    return Engine(seq);
}

DriverPath simulate(const DriverSpec& spec, RandomSeed seed) {
    spec.validate();
    switch (spec.kind) {
        case DriverSpec::Kind::brownian:
        case DriverSpec::Kind::compound_poisson:
        case DriverSpec::Kind::jump_diffusion: {
            Engine engine = make_engine(seed);
            DriverSpec effective = spec;
            if (spec.kind == DriverSpec::Kind::brownian) effective.lambda = 0.0;
            if (spec.kind == DriverSpec::Kind::compound_poisson) {
                effective.sigma = 0.0;
                effective.mu = 0.0;
            }
            return simulate_jump_diffusion(effective, engine);
        }
        case DriverSpec::Kind::single_jump: {
            std::vector<double> grid = uniform_grid(spec.horizon, spec.dt);
            insert_times(grid, {spec.jump_time});
            std::vector<double> values(grid.size());
            for (std::size_t k = 0; k < grid.size(); ++k) values[k] = grid[k] >= spec.jump_time ? spec.jump_size : 0.0;
            return DriverPath{CadlagPath(std::move(grid), std::move(values), {{spec.jump_time, spec.jump_size}},
                                         Interpolation::step),
                              std::nullopt};
        }
        case DriverSpec::Kind::appendix_ramp:
            return DriverPath{appendix_pair(spec.ramp_n).first, std::nullopt};
        case DriverSpec::Kind::constant: {
            std::vector<double> grid = uniform_grid(spec.horizon, spec.dt);
            std::vector<double> values(grid.size(), spec.level);
            return DriverPath{CadlagPath(std::move(grid), std::move(values), {}, Interpolation::step), std::nullopt};
        }
    }
    throw ConfigError("driver: unknown kind");
}

std::pair<CadlagPath, CadlagPath> appendix_pair(int n) {
    if (n < 2) throw ConfigError(fmt::format("appendix_pair: n = {} must be >= 2", n));
    const double start = 0.5 - 1.0 / static_cast<double>(n);
    std::vector<double> grid, values;
    if (start > 0.0) {
        grid = {0.0, start, 0.5, 1.0};
        values = {0.0, 0.0, 1.0, 1.0};
    } else {
        grid = {0.0, 0.5, 1.0};
        values = {0.0, 1.0, 1.0};
    }
    CadlagPath ramp(std::move(grid), std::move(values), {}, Interpolation::linear);
    CadlagPath step({0.0, 0.5, 1.0}, {0.0, 1.0, 1.0}, {{0.5, 1.0}}, Interpolation::step);
    return {std::move(ramp), std::move(step)};
}

}  // namespace wzlab
