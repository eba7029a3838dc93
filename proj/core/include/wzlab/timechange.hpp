#pragma once

#include "wzlab/cadlag.hpp"
#include "wzlab/smoothing.hpp"

#include <optional>
#include <span>
#include <vector>

namespace wzlab {

/// A jump of L seen in the new time scale: ζ⁰ is flat at τ on [start, end].
struct PlateauRecord {
    double jump_time;  // τᵢ
    double jump_size;  // ΔL(τᵢ)
    double start;      // η₋ = γ⁰(τᵢ−)
    double end;        // η⁺ = γ⁰(τᵢ)
    double width;      // end − start = ΔL(τᵢ)²
};

/// Clocks γ⁰(t) = [L]^d(t) + t and (for ε > 0) γ^ε, their generalized
/// inverses ζ(u) = inf{s > 0 : γ(s) > u}, and the plateau list.
class TimeChangeSystem {
public:
    /// ε = 0 builds the limit system; ε > 0 additionally carries γ^ε and ζ^ε.
    static TimeChangeSystem build(const QuadraticVariationSplit& qv, std::span<const JumpRecord> jumps, double eps);

    double epsilon() const { return eps_; }
    bool is_limit() const { return eps_ == 0.0; }
    double horizon() const { return gamma0_.horizon(); }

    const CadlagPath& gamma0() const { return gamma0_; }
    /// γ^ε; throws ConfigError on the limit system.
    const SmoothedPath& gamma_smoothed() const;

    /// γ^ε(t) for ε > 0, γ⁰(t) for the limit system.
    double gamma(double t) const;
    double zeta0(double u) const;
    double zeta_smoothed(double u) const;
    /// ζ^ε(u) for ε > 0, ζ⁰(u) for the limit system.
    double zeta(double u) const { return is_limit() ? zeta0(u) : zeta_smoothed(u); }

    std::span<const PlateauRecord> plateaus() const { return plateaus_; }
    /// Plateau with start ≤ u ≤ end, if any.
    const PlateauRecord* plateau_at(double u) const;

    /// γ-time grid: γ⁰ of the base grid, plateau endpoints with 16 interior
    /// samples each, and (ε > 0) γ^ε of the smoothed grid; all ≤ gamma_horizon().
    std::span<const double> gamma_grid() const { return gamma_grid_; }
    /// Largest γ-time on which ζ is defined: γ^ε(T) or γ⁰(T).
    double gamma_horizon() const { return gamma_grid_.back(); }

private:
    TimeChangeSystem(double eps, CadlagPath gamma0) : eps_(eps), gamma0_(std::move(gamma0)) {}

    double eps_;
    CadlagPath gamma0_;
    std::optional<SmoothedPath> gamma_eps_;
    std::vector<PlateauRecord> plateaus_;
    std::vector<double> gamma_grid_;
};

/// Inserts factor − 1 equally spaced points into every grid interval.
std::vector<double> refine_grid(std::span<const double> grid, int factor);

/// Z^ε = L^ε ∘ ζ^ε sampled on the system's γ-grid.
CadlagPath z_eps(const SmoothedPath& l_eps, const TimeChangeSystem& sys);
double z_eps_at(const SmoothedPath& l_eps, const TimeChangeSystem& sys, double u);

/// Limit process: L(ζ⁰(u)) off plateaus, linear from L(τ−) to L(τ) across each plateau.
CadlagPath z_limit(const CadlagPath& path, const TimeChangeSystem& sys);
double z_limit_at(const CadlagPath& path, const TimeChangeSystem& sys, double u);

/// U(u) = Z(u) − L(ζ(u)) on the grid of `z`, with ζ = ζ^ε or ζ⁰ per the system.
CadlagPath u_eps(const CadlagPath& z, const CadlagPath& path, const TimeChangeSystem& sys);

}  // namespace wzlab
