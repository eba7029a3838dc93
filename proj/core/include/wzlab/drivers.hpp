#pragma once

#include "wzlab/cadlag.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>

namespace wzlab {

struct JumpLaw {
    enum class Kind { normal, two_point };

    Kind kind = Kind::normal;
    double first = 0.0;   // normal: mean;  two_point: v1
    double second = 1.0;  // normal: sd;    two_point: P(v1)
    double third = 0.0;   // two_point: v2

    static JumpLaw normal(double mean, double sd) { return {Kind::normal, mean, sd, 0.0}; }
    static JumpLaw two_point(double v1, double p, double v2) { return {Kind::two_point, v1, p, v2}; }

    double mean() const;
    double second_moment() const;
};

struct DriverSpec {
    enum class Kind { brownian, compound_poisson, jump_diffusion, single_jump, appendix_ramp, constant };

    Kind kind = Kind::brownian;
    double sigma = 0.0;
    double mu = 0.0;
    double lambda = 0.0;
    JumpLaw jump_law{};
    double jump_time = 0.0;  // single_jump
    double jump_size = 0.0;  // single_jump
    int ramp_n = 2;          // appendix_ramp
    double level = 0.0;      // constant
    double horizon = 1.0;
    double dt = 1e-3;

    static DriverSpec brownian(double sigma, double mu, double horizon, double dt);
    static DriverSpec compound_poisson(double lambda, JumpLaw law, double horizon, double dt);
    static DriverSpec jump_diffusion(double sigma, double mu, double lambda, JumpLaw law, double horizon, double dt);
    static DriverSpec single_jump(double time, double size, double horizon, double dt);
    static DriverSpec appendix_ramp(int n);
    static DriverSpec constant(double level, double horizon, double dt);

    /// Throws ConfigError on invalid parameters.
    void validate() const;
    std::string name() const;
};

/// (master seed, stream index) determines a realization.
struct RandomSeed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

/// Roles of the per-replication streams.
enum class StreamRole : std::uint64_t { driver = 0, auxiliary = 1 };

/// Stream for a (replication, role) pair under one master seed.
RandomSeed replication_stream(std::uint64_t master, std::uint64_t replication, StreamRole role);

using Engine = std::mt19937_64;

/// Engine seeded by a SplitMix64 mix of (master, stream).
Engine make_engine(RandomSeed seed);

struct DriverPath {
    CadlagPath path;
    std::optional<ContinuousQv> continuous_qv;  // σ² when the driver has a Brownian part
};

/// One realization. Draw order on the stream: jump count, jump times, jump
/// sizes, then one Gaussian per grid interval.
DriverPath simulate(const DriverSpec& spec, RandomSeed seed);

/// The continuous ramp xⁿ (linear) and the indicator x = 1_{[1/2,1]} (step) on [0, 1].
std::pair<CadlagPath, CadlagPath> appendix_pair(int n);

}  // namespace wzlab
