#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace wzlab {

enum class Interpolation { step, linear };

struct JumpRecord {
    double time;
    double size;  // x(τ) − x(τ−), never zero
};

/// Finitely represented càdlàg path on [0, T].
///
/// Between consecutive grid points t_k < t_{k+1} the path is linear from
/// x(t_k) to x(t_{k+1}−). Under `step` interpolation x(t_{k+1}−) = x(t_k);
/// under `linear` it equals x(t_{k+1}) minus the jump registered there.
/// Every registered jump time is a grid point.
class CadlagPath {
public:
    CadlagPath(std::vector<double> grid, std::vector<double> values, std::vector<JumpRecord> jumps,
               Interpolation interpolation);

    static CadlagPath constant(double value, double horizon);

    double horizon() const { return grid_.back(); }
    Interpolation interpolation() const { return interpolation_; }
    std::span<const double> grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    std::span<const JumpRecord> jumps() const { return jumps_; }
    std::size_t size() const { return grid_.size(); }

    /// x(t), right-continuous. Throws DomainError outside [0, T].
    double evaluate(double t) const;
    /// x(t−). Throws DomainError for t ≤ 0 or t > T.
    double left_limit(double t) const;

    /// x(t_k−) at grid index k; x(0−) := x(0).
    double left_value(std::size_t k) const { return left_[k]; }
    /// Registered jump size at grid index k, 0 when none.
    double jump_at(std::size_t k) const { return jump_at_[k]; }

    /// Index k with t_k ≤ t < t_{k+1}; the last segment also owns T.
    std::size_t segment(double t) const;

    /// ∫_0^t x(s) ds in closed form, with x(s) := x(0) for s < 0.
    double primitive(double t) const;

    /// max over s ≤ t of x(s) and x(s−).
    double running_sup(double t) const;

private:
    std::vector<double> grid_;
    std::vector<double> values_;
    std::vector<double> left_;
    std::vector<double> jump_at_;
    std::vector<JumpRecord> jumps_;
    std::vector<double> cumulative_;  // primitive at grid points
    std::vector<double> prefix_sup_;  // running sup at grid points (both one-sided values)
    Interpolation interpolation_;
};

/// Continuous-QV descriptor supplied by a driver: [L]^c(t) = rate · t.
struct ContinuousQv {
    double rate = 0.0;
};

struct QuadraticVariationSplit {
    CadlagPath discontinuous;  // [L]^d, step
    CadlagPath continuous;     // [L]^c, linear

    double total(double t) const { return discontinuous.evaluate(t) + continuous.evaluate(t); }
};

/// [L]^d from the jump registry (exact squared sums); [L]^c from `meta` when
/// given, otherwise from realized squared continuous grid increments.
QuadraticVariationSplit quadratic_variation_split(const CadlagPath& path,
                                                  std::optional<ContinuousQv> meta = std::nullopt);

/// sup_{s ∈ [0, t]} x(s), counting both one-sided values at grid points.
double running_sup(const CadlagPath& path, double t);

/// inf{t ≥ 0 : x(t) > a}; linear segments are refined to the exact crossing.
std::optional<double> first_passage(const CadlagPath& path, double level);

/// CSV with header `time,value,is_jump,jump_size`. A leading comment line
/// `# interpolation=step|linear` records the interpolation mode.
void write_path_csv(std::ostream& out, const CadlagPath& path);
CadlagPath read_path_csv(std::istream& in);

}  // namespace wzlab
