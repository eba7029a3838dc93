#pragma once

#include "wzlab/cadlag.hpp"

#include <memory>
#include <span>
#include <vector>

namespace wzlab {

/// The window average L^ε(t) = (1/ε) ∫_{t−ε}^t L(s) ds of a càdlàg base path,
/// with L(s) := L(0) for s < 0. Evaluation is closed form: a sum of clamped
/// ramps for step bases, a primitive difference for linear bases.
///
/// With `add_identity` the smoothed identity ι^ε (the average of s ↦ max(s, 0))
/// is added, which turns the average of [L]^d into the clock γ^ε.
class SmoothedPath {
public:
    SmoothedPath(std::shared_ptr<const CadlagPath> base, double window, bool add_identity = false);

    const CadlagPath& base() const { return *base_; }
    std::shared_ptr<const CadlagPath> base_ptr() const { return base_; }
    double window() const { return window_; }
    double horizon() const { return base_->horizon(); }
    bool has_identity() const { return identity_; }

    double evaluate(double t) const;
    /// Right derivative (L(t) − L(t − ε)) / ε (plus ι^ε′ when present).
    double derivative(double t) const;
    /// Left derivative (L(t−) − L((t − ε)−)) / ε (plus ι^ε′ when present).
    double derivative_left(double t) const;

    /// Base grid merged with the shifted grid {t_k + ε} ∩ [0, T]; every
    /// breakpoint of the smoothed path is a grid point.
    std::span<const double> grid() const { return grid_; }
    /// Cached evaluate() at grid points.
    std::span<const double> grid_values() const { return grid_values_; }

    /// Continuous path interpolating the grid values linearly.
    CadlagPath to_path() const;

private:
    double base_extended(double s) const;
    double base_extended_left(double s) const;
    double identity_part(double t) const;

    std::shared_ptr<const CadlagPath> base_;
    double window_;
    bool identity_;
    // step bases: value changes at grid points, summed as clamped ramps
    std::vector<double> change_times_;
    std::vector<double> change_sizes_;
    std::vector<double> grid_;
    std::vector<double> grid_values_;
};

/// L^ε. Throws DomainError for ε ≤ 0.
SmoothedPath smooth(const CadlagPath& path, double eps);
SmoothedPath smooth(std::shared_ptr<const CadlagPath> path, double eps);

/// (L(t) − L(t − ε)) / ε, the forcing of the random ODE.
double smoothed_derivative(const SmoothedPath& sp, double t);

/// V^ε, the window average of [L]^d. Nondecreasing in t.
SmoothedPath v_eps(const QuadraticVariationSplit& qv, double eps);

/// γ^ε, the window average of [L]^d(s) + s. Equals V^ε(t) + t − ε/2 for t ≥ ε.
SmoothedPath gamma_eps(const QuadraticVariationSplit& qv, double eps);

}  // namespace wzlab
