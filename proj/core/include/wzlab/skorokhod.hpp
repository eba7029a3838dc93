#pragma once

#include "wzlab/cadlag.hpp"

#include <span>
#include <vector>

namespace wzlab {

struct GraphPoint {
    double t;
    double z;
};

/// Completed graph Γ_x as a polyline: each jump contributes a vertical
/// segment from (τ, x(τ−)) to (τ, x(τ)). Collinear interior vertices are merged.
struct CompletedGraph {
    std::vector<GraphPoint> vertices;
};

CompletedGraph completed_graph(const CadlagPath& path);

/// Monotone sampling of a completed graph. Every vertex is a sample; segments
/// are subdivided by L1 arc length (|Δt| + |Δz|) so that the sample count is
/// at least `resolution`, with ≥ 8 samples per segment when that fits.
struct ParametricRepresentation {
    std::vector<GraphPoint> samples;
    int resolution = 0;
    double max_time_step = 0.0;   // largest |Δt| between consecutive samples
    double max_value_step = 0.0;  // largest |Δz| between consecutive samples
};

ParametricRepresentation parametric_representation(const CompletedGraph& graph, int resolution);

struct MetricResult {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    int resolution = 0;
};

/// M1 distance in sum form, inf { sup|r₁ − r₂| + sup|u₁ − u₂| }, by a
/// Pareto-frontier DP over monotone matchings of the sampled graphs.
/// `value` = `upper` is realized by a feasible pair of parametrizations;
/// `lower` subtracts the sampling radius of both graphs.
MetricResult d_m1(const CadlagPath& x, const CadlagPath& y, int resolution = 512);

/// J1 distance estimate. `upper` (= `value`) is attained by an explicit time
/// warp (identity or DP-derived); `lower` bounds inf_λ sup|x − y∘λ| from below.
MetricResult d_j1(const CadlagPath& x, const CadlagPath& y, int resolution = 512);

/// Oscillation functional w′(x, δ) over grid triples t₁ < t < t₂, t₂ − t₁ < δ.
double w_prime(const CadlagPath& path, double delta);

struct M1Diagnostic {
    std::vector<double> times;
    std::vector<std::vector<double>> pointwise_gaps;  // [member][time]
    std::vector<double> deltas;
    std::vector<std::vector<double>> w_prime;         // [member][delta]
    std::vector<double> limit_w_prime;                // [delta]
};

/// Pointwise gaps |Xₙ(t) − X(t)| on `times` and the w′(Xₙ, δ) profile over `deltas`.
M1Diagnostic m1_convergence_diagnostic(std::span<const CadlagPath> sequence, const CadlagPath& limit,
                                       std::span<const double> times, std::span<const double> deltas);

}  // namespace wzlab
