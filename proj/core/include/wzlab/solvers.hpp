#pragma once

#include "wzlab/cadlag.hpp"
#include "wzlab/smoothing.hpp"
#include "wzlab/timechange.hpp"

#include <string>
#include <vector>

namespace wzlab {

/// Scalar coefficient family with analytic value and derivative.
struct CoefficientFamily {
    enum class Kind {
        constant,     // x ↦ a
        sin_scaled,   // x ↦ a·sin(kx)
        tanh_scaled,  // x ↦ a·tanh(kx)
        linear,       // x ↦ a·x        (test-only, unbounded)
        quadratic,    // x ↦ a·x²       (test-only, unbounded)
    };

    Kind kind = Kind::constant;
    double a = 0.0;
    double k = 1.0;

    static CoefficientFamily constant(double c) { return {Kind::constant, c, 0.0}; }
    static CoefficientFamily sin_scaled(double a, double k) { return {Kind::sin_scaled, a, k}; }
    static CoefficientFamily tanh_scaled(double a, double k) { return {Kind::tanh_scaled, a, k}; }
    static CoefficientFamily linear(double a) { return {Kind::linear, a, 0.0}; }
    static CoefficientFamily quadratic(double a) { return {Kind::quadratic, a, 0.0}; }

    /// Config form: family = "sin_scaled", params = [a, k]. Throws ConfigError.
    static CoefficientFamily from_config(const std::string& family, const std::vector<double>& params);

    double value(double x) const;
    double derivative(double x) const;
    /// Bounded and Lipschitz with bounded, Lipschitz derivative.
    bool bounded_lipschitz() const;
    std::string name() const;
    std::vector<double> params() const;
};

struct CoefficientSet {
    CoefficientFamily drift;      // b
    CoefficientFamily diffusion;  // f

    bool theorem_compliant() const { return drift.bounded_lipschitz() && diffusion.bounded_lipschitz(); }
};

/// How solve_marcus integrates the continuous part between grid points.
enum class ContinuousScheme {
    /// RK4 on x′ = b(x) + f(x)·ΔL^c/Δt along the interpolated driver (Stratonovich solution along the polygon).
    rk4_stratonovich,
    /// One Euler step ΔX = bΔt + fΔL^c + ½ff′Δ[L]^c per grid interval.
    euler_strat,
};

struct SolverConfig {
    double x0 = 0.0;
    double step = 1e-3;      // h
    int flow_substeps = 32;  // K
    ContinuousScheme scheme = ContinuousScheme::rk4_stratonovich;
    double divergence_cap = 1e12;
};

/// X^ε: RK4 for x′ = b(x) + f(x)·(L(t) − L(t − ε))/ε with step ≤ min(h, ε/10),
/// stepping through every breakpoint of L^ε. Output on the grid of L^ε.
CadlagPath solve_random_ode(const CoefficientSet& coeffs, const SmoothedPath& l_eps, const SolverConfig& cfg);

/// Dense output of X^ε at t: RK4 from the preceding node of `x_eps` with the same
/// affine forcing. Falls back to linear interpolation when `x_eps` is not on the grid of L^ε.
double random_ode_dense(const CadlagPath& x_eps, const SmoothedPath& l_eps, const CoefficientSet& coeffs, double t);

/// Time-1 value of y′ = c·f(y), y(0) = u: RK4 with K and 2K substeps,
/// Richardson-extrapolated.
double marcus_flow(const CoefficientFamily& f, double jump, double u, int substeps);

/// Marcus canonical solution on the driver grid. Each registered jump maps
/// X(τ−) to marcus_flow(f, ΔL(τ), X(τ−), K).
CadlagPath solve_marcus(const CoefficientSet& coeffs, const CadlagPath& path, const QuadraticVariationSplit& qv,
                        const SolverConfig& cfg);

struct TimeChangedSolution {
    CadlagPath y_eps;
    double residual;
};

/// Y^ε = X^ε ∘ ζ^ε on the γ-grid (refined `refine`×) and the sup-grid residual of
/// Y^ε(u) = X₀ + ∫ b(Y^ε) dζ^ε + ∫ f(Y^ε) dZ^ε under left-point Riemann–Stieltjes sums.
TimeChangedSolution y_eps_and_residual(const CadlagPath& x_eps, const TimeChangeSystem& sys,
                                       const SmoothedPath& l_eps, const CoefficientSet& coeffs, int refine = 1);

}  // namespace wzlab
