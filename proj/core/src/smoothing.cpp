#include "wzlab/smoothing.hpp"

#include "wzlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace wzlab {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

}  // namespace

SmoothedPath::SmoothedPath(std::shared_ptr<const CadlagPath> base, double window, bool add_identity)
    : base_(std::move(base)), window_(window), identity_(add_identity) {
    if (!base_) throw ConfigError("SmoothedPath: null base path");
    if (!(window_ > 0.0) || !std::isfinite(window_)) {
        throw DomainError(fmt::format("smooth: window eps = {} must be positive", window_));
    }
    const auto bgrid = base_->grid();
    const auto bvalues = base_->values();
    if (base_->interpolation() == Interpolation::step) {
        for (std::size_t k = 1; k < bgrid.size(); ++k) {
            const double d = bvalues[k] - bvalues[k - 1];
            if (d != 0.0) {
                change_times_.push_back(bgrid[k]);
                change_sizes_.push_back(d);
            }
        }
    }

    const double horizon = base_->horizon();
    std::vector<double> merged(bgrid.begin(), bgrid.end());
    for (double g : bgrid) {
        const double shifted = g + window_;
        if (shifted < horizon) merged.push_back(shifted);
    }
    std::sort(merged.begin(), merged.end());
    // drop shifted points that land within roundoff of an existing point
    const double tol = 1e-12 * horizon;
    grid_.reserve(merged.size());
    for (double t : merged) {
        if (grid_.empty() || t - grid_.back() > tol) {
            grid_.push_back(t);
        } else if (std::binary_search(bgrid.begin(), bgrid.end(), t)) {
            grid_.back() = t;
        }
    }
    grid_.back() = horizon;
    grid_values_.reserve(grid_.size());
    for (double t : grid_) grid_values_.push_back(evaluate(t));
}

double SmoothedPath::identity_part(double t) const {
    if (!identity_) return 0.0;
    if (t >= window_) return t - 0.5 * window_;
    if (t <= 0.0) return 0.0;
    return t * t / (2.0 * window_);
}

double SmoothedPath::evaluate(double t) const {
    if (!(t >= 0.0 && t <= horizon())) {
        throw DomainError(fmt::format("SmoothedPath::evaluate: t = {} outside [0, {}]", t, horizon()));
    }
    double value;
    if (base_->interpolation() == Interpolation::step) {
        // fixed summation order keeps the result monotone for monotone bases
        value = base_->values()[0];
        for (std::size_t i = 0; i < change_times_.size(); ++i) {
            value += change_sizes_[i] * clamp01((t - change_times_[i]) / window_);
        }
    } else {
        value = (base_->primitive(t) - base_->primitive(t - window_)) / window_;
    }
    return value + identity_part(t);
}

double SmoothedPath::base_extended(double s) const {
    if (s <= 0.0) return base_->values()[0];
    return base_->evaluate(std::min(s, horizon()));
}

double SmoothedPath::base_extended_left(double s) const {
    if (s <= 0.0) return base_->values()[0];
    return base_->left_limit(std::min(s, horizon()));
}

double SmoothedPath::derivative(double t) const {
    double d = (base_extended(t) - base_extended(t - window_)) / window_;
    if (identity_) d += std::min(std::max(t, 0.0) / window_, 1.0);
    return d;
}

double SmoothedPath::derivative_left(double t) const {
    if (t <= 0.0) return 0.0;
    double d = (base_extended_left(t) - base_extended_left(t - window_)) / window_;
    if (identity_) d += std::min(t / window_, 1.0);
    return d;
}

CadlagPath SmoothedPath::to_path() const { return CadlagPath(grid_, grid_values_, {}, Interpolation::linear); }

SmoothedPath smooth(const CadlagPath& path, double eps) {
    return SmoothedPath(std::make_shared<const CadlagPath>(path), eps);
}

SmoothedPath smooth(std::shared_ptr<const CadlagPath> path, double eps) { return SmoothedPath(std::move(path), eps); }

double smoothed_derivative(const SmoothedPath& sp, double t) { return sp.derivative(t); }

SmoothedPath v_eps(const QuadraticVariationSplit& qv, double eps) {
    return SmoothedPath(std::make_shared<const CadlagPath>(qv.discontinuous), eps);
}

SmoothedPath gamma_eps(const QuadraticVariationSplit& qv, double eps) {
    return SmoothedPath(std::make_shared<const CadlagPath>(qv.discontinuous), eps, true);
}

}  // namespace wzlab
