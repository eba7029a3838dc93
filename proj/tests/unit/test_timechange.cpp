#include "wzlab/drivers.hpp"
#include "wzlab/errors.hpp"
#include "wzlab/smoothing.hpp"
#include "wzlab/timechange.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace wzlab;

namespace {

CadlagPath jump_path(double size, double horizon = 3.0) {
    return simulate(DriverSpec::single_jump(1.0, size, horizon, 0.1), {}).path;
}

struct Fixture {
    CadlagPath path;
    QuadraticVariationSplit qv;
};

Fixture make(const CadlagPath& p, std::optional<ContinuousQv> meta = std::nullopt) {
    return {p, quadratic_variation_split(p, meta)};
}

Fixture simulated(std::uint64_t stream) {
    const DriverPath d = simulate(DriverSpec::jump_diffusion(1.0, 0.0, 2.0, JumpLaw::normal(0.0, 1.0), 1.0, 1e-3),
                                  replication_stream(42, stream, StreamRole::driver));
    return make(d.path, d.continuous_qv);
}

/// inf{s > 0 : clock(s) > u} by bisection on a nondecreasing clock.
template <typename Clock>
double scan_inverse(Clock clock, double horizon, double u) {
    double lo = 0.0, hi = horizon;
    if (clock(hi) <= u) return horizon;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (clock(mid) > u) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return hi;
}

}  // namespace

TEST(TimeChangeBuild, ContinuousDriverHasIdentityClock) {
    const DriverPath d = simulate(DriverSpec::brownian(1.0, 0.0, 1.0, 0.01), {1, 0});
    const Fixture f = make(d.path, d.continuous_qv);
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    EXPECT_TRUE(sys.plateaus().empty());
    for (double t : f.path.grid()) {
        EXPECT_EQ(sys.gamma(t), t);
        EXPECT_EQ(sys.zeta0(t), t);
    }
}

TEST(TimeChangeBuild, UnitJumpInverseClock) {
    const Fixture f = make(jump_path(1.0));
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    for (double u = 0.0; u <= 4.0; u += 0.0625) {
        const double expect = u < 1.0 ? u : (u < 2.0 ? 1.0 : u - 1.0);
        EXPECT_NEAR(sys.zeta0(u), expect, 1e-15) << "u = " << u;
        const double scan = scan_inverse([&](double s) { return sys.gamma0().evaluate(s); }, 3.0, u);
        EXPECT_NEAR(sys.zeta0(u), scan, 1e-12) << "u = " << u;
    }
}

TEST(TimeChangeBuild, JumpOfSizeTwoPlateau) {
    const Fixture f = make(jump_path(2.0));
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    ASSERT_EQ(sys.plateaus().size(), 1u);
    const auto& p = sys.plateaus()[0];
    EXPECT_EQ(p.start, 1.0);
    EXPECT_EQ(p.end, 5.0);
    EXPECT_EQ(p.width, 4.0);
}

TEST(TimeChangeBuild, RejectsMismatchedRegistry) {
    const Fixture f = make(jump_path(1.0));
    const std::vector<JumpRecord> wrong{{0.5, 1.0}};
    EXPECT_THROW(TimeChangeSystem::build(f.qv, wrong, 0.1), ConfigError);
    EXPECT_THROW(TimeChangeSystem::build(f.qv, {}, 0.1), ConfigError);
    EXPECT_THROW(TimeChangeSystem::build(f.qv, f.path.jumps(), -0.1), DomainError);
}

TEST(TimeChangeBuild, GammaGridIncludesPlateauSamples) {
    const Fixture f = make(jump_path(1.0));
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    const auto g = sys.gamma_grid();
    int inside = 0;
    for (double u : g) inside += (u > 1.0 && u < 2.0) ? 1 : 0;
    EXPECT_EQ(inside, 16);
    EXPECT_EQ(sys.gamma_horizon(), 4.0);
}

TEST(TimeChangeInvariants, SmoothedInverseMatchesScan) {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Fixture f = simulated(s);
        for (double eps : {0.1, 0.02}) {
            const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), eps);
            const auto& clock = sys.gamma_smoothed();
            const auto g = sys.gamma_grid();
            for (std::size_t k = 0; k < g.size(); k += 13) {
                const double scan = scan_inverse([&](double t) { return clock.evaluate(t); }, 1.0, g[k]);
                EXPECT_NEAR(sys.zeta_smoothed(g[k]), scan, 1e-11);
            }
        }
    }
}

TEST(TimeChangeInvariants, SandwichesAndIdentities) {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Fixture f = simulated(s);
        const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
        for (std::size_t k = 0; k < f.path.size(); ++k) {
            const double t = f.path.grid()[k];
            const double g0 = lim.gamma0().values()[k];
            EXPECT_EQ(lim.zeta0(g0), t);
            EXPECT_NEAR(z_limit_at(f.path, lim, g0), f.path.values()[k], 1e-12);
        }
        for (const auto& p : lim.plateaus()) EXPECT_NEAR(p.width, p.jump_size * p.jump_size, 1e-12);
        for (double eps : {0.1, 0.02}) {
            const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), eps);
            for (std::size_t k = 0; k < f.path.size(); ++k) {
                const double t = f.path.grid()[k];
                const double g0 = lim.gamma0().values()[k];
                EXPECT_LE(sys.gamma(t), g0 + 1e-12);
                if (t + eps <= 1.0) {
                    EXPECT_LE(g0, sys.gamma(t + eps) + 1e-12);
                }
            }
            for (double u : sys.gamma_grid()) {
                const double ze = sys.zeta_smoothed(u);
                const double z0 = lim.zeta0(u);
                EXPECT_LE(ze - eps, z0 + 1e-12);
                EXPECT_LE(z0, ze + 1e-12);
            }
        }
    }
}

TEST(ZEps, ConstantDriver) {
    const Fixture f = make(CadlagPath::constant(1.7, 1.0));
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.1);
    const CadlagPath z = z_eps(smooth(f.path, 0.1), sys);
    for (double v : z.values()) EXPECT_EQ(v, 1.7);
}

TEST(ZEps, ContinuousDriverShiftsByHalfWindow) {
    const DriverPath d = simulate(DriverSpec::brownian(1.0, 0.0, 1.0, 0.01), {2, 0});
    const Fixture f = make(d.path, d.continuous_qv);
    const double eps = 0.1;
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), eps);
    const SmoothedPath l = smooth(f.path, eps);
    for (double u : sys.gamma_grid()) {
        // γ^ε(t) = t − ε/2 for t ≥ ε, so ζ^ε(u) = u + ε/2 for u ≥ ε/2
        if (u >= eps / 2) {
            EXPECT_NEAR(sys.zeta(u), u + eps / 2, 1e-12);
            EXPECT_NEAR(z_eps_at(l, sys, u), l.evaluate(std::min(1.0, u + eps / 2)), 1e-12);
        }
    }
}

TEST(ZEps, MismatchedWindowThrows) {
    const Fixture f = make(jump_path(1.0));
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.1);
    EXPECT_THROW(z_eps(smooth(f.path, 0.2), sys), ConfigError);
    const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    EXPECT_THROW(z_eps(smooth(f.path, 0.2), lim), ConfigError);
}

TEST(ZEps, UnitJumpUniformConvergence) {
    const Fixture f = make(jump_path(1.0));
    const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    double prev = 1e300;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), eps);
        const SmoothedPath l = smooth(f.path, eps);
        double gap = 0.0;
        for (double u : sys.gamma_grid()) gap = std::max(gap, std::abs(z_eps_at(l, sys, u) - z_limit_at(f.path, lim, u)));
        EXPECT_LE(gap, 2.0 * eps);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
}

TEST(ZEps, DerivativeFormulaOnPlateau) {
    const Fixture f = make(jump_path(1.5));
    const double eps = 0.2;
    const auto sys = TimeChangeSystem::build(f.qv, f.path.jumps(), eps);
    const SmoothedPath l = smooth(f.path, eps);
    const auto& p = sys.plateaus()[0];
    const double h = 1e-7;
    for (int j = 1; j < 16; ++j) {
        const double u = p.start + p.width * j / 16.0;
        const double fd = (z_eps_at(l, sys, u + h) - z_eps_at(l, sys, u - h)) / (2 * h);
        const double z = sys.zeta(u);
        const auto& d = f.qv.discontinuous;
        const double formula = (f.path.evaluate(z) - f.path.evaluate(std::max(0.0, z - eps))) /
                               (d.evaluate(z) - d.evaluate(std::max(0.0, z - eps)) + eps);
        EXPECT_NEAR(fd, formula, 1e-5);
    }
}

TEST(ZLimit, ContinuousDriverIsIdentityComposition) {
    const DriverPath d = simulate(DriverSpec::brownian(1.0, 0.0, 1.0, 0.01), {3, 0});
    const Fixture f = make(d.path, d.continuous_qv);
    const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    const CadlagPath z = z_limit(f.path, lim);
    for (std::size_t k = 0; k < z.size(); ++k) EXPECT_EQ(z.values()[k], f.path.evaluate(z.grid()[k]));
}

TEST(ZLimit, UnitJumpMidpointAndPlateauSlope) {
    const Fixture f = make(jump_path(1.0));
    const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    EXPECT_DOUBLE_EQ(z_limit_at(f.path, lim, 1.5), 0.5);
    for (double size : {2.0, -0.5, 3.0}) {
        const Fixture g = make(jump_path(size));
        const auto sys = TimeChangeSystem::build(g.qv, g.path.jumps(), 0.0);
        const auto& p = sys.plateaus()[0];
        for (int j = 0; j < 8; ++j) {
            const double a = p.start + p.width * j / 8.0;
            const double b = p.start + p.width * (j + 1) / 8.0;
            const double slope = (z_limit_at(g.path, sys, b) - z_limit_at(g.path, sys, a)) / (b - a);
            EXPECT_NEAR(slope, 1.0 / size, 1e-12);
        }
    }
}

TEST(UEps, ContinuousDriverVanishes) {
    const DriverPath d = simulate(DriverSpec::brownian(1.0, 0.0, 1.0, 0.01), {4, 0});
    const Fixture f = make(d.path, d.continuous_qv);
    const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    const CadlagPath u = u_eps(z_limit(f.path, lim), f.path, lim);
    for (double v : u.values()) EXPECT_EQ(v, 0.0);
}

TEST(UEps, UnitJumpLimitValues) {
    const Fixture f = make(jump_path(1.0));
    const auto lim = TimeChangeSystem::build(f.qv, f.path.jumps(), 0.0);
    const std::vector<double> grid{0.0, 1.0, 1.5, 2.0, 4.0};
    std::vector<double> values;
    for (double u : grid) values.push_back(z_limit_at(f.path, lim, u));
    const CadlagPath u = u_eps(CadlagPath(grid, values, {}, Interpolation::linear), f.path, lim);
    EXPECT_DOUBLE_EQ(u.evaluate(1.5), -0.5);
    EXPECT_EQ(u.evaluate(2.0), 0.0);
    // at η₋ the plateau weight is full: (η⁺ − η₋)/(η⁺ − η₋)·(L(τ−) − L(τ)) = −1
    EXPECT_EQ(u.evaluate(1.0), -1.0);
}

TEST(RefineGrid, InsertsEquallySpacedPoints) {
    const std::vector<double> g{0.0, 1.0, 3.0};
    const auto r = refine_grid(g, 2);
    ASSERT_EQ(r.size(), 5u);
    EXPECT_EQ(r[1], 0.5);
    EXPECT_EQ(r[3], 2.0);
    EXPECT_THROW(refine_grid(g, 0), DomainError);
}
