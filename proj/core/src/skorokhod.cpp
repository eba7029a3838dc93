#include "wzlab/skorokhod.hpp"

#include "wzlab/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace wzlab {

namespace {

constexpr int kMinSamplesPerSegment = 8;

void check_horizons(const CadlagPath& x, const CadlagPath& y, const char* what) {
    if (x.horizon() != y.horizon()) {
        throw DomainError(fmt::format("{}: horizons differ ({} vs {})", what, x.horizon(), y.horizon()));
    }
}

bool collinear_continuation(const GraphPoint& a, const GraphPoint& b, const GraphPoint& c) {
    const double ux = b.t - a.t, uz = b.z - a.z;
    const double vx = c.t - b.t, vz = c.z - b.z;
    const double cross = ux * vz - uz * vx;
    const double dot = ux * vx + uz * vz;
    const double scale = std::hypot(ux, uz) * std::hypot(vx, vz);
    return dot > 0.0 && std::abs(cross) <= 1e-14 * scale;
}

struct Entry {
    double a;  // running max time gap
    double b;  // running max value gap
};

/// Feasible coupling that walks both sample lists in time order.
double time_merge_cost(const std::vector<GraphPoint>& xs, const std::vector<GraphPoint>& ys) {
    std::size_t i = 0, j = 0;
    double a = 0.0, b = 0.0;
    auto visit = [&] {
        a = std::max(a, std::abs(xs[i].t - ys[j].t));
        b = std::max(b, std::abs(xs[i].z - ys[j].z));
    };
    visit();
    while (i + 1 < xs.size() || j + 1 < ys.size()) {
        if (i + 1 == xs.size()) {
            ++j;
        } else if (j + 1 == ys.size()) {
            ++i;
        } else if (xs[i + 1].t == ys[j + 1].t) {
            ++i;
            ++j;
        } else if (xs[i + 1].t < ys[j + 1].t) {
            ++i;
        } else {
            ++j;
        }
        visit();
    }
    return a + b;
}

std::vector<double> arc_fractions(const std::vector<GraphPoint>& s) {
    std::vector<double> frac(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        frac[i] = frac[i - 1] + std::abs(s[i].t - s[i - 1].t) + std::abs(s[i].z - s[i - 1].z);
    }
    const double total = frac.back();
    for (auto& f : frac) f = total > 0.0 ? f / total : 0.0;
    if (total == 0.0) {
        for (std::size_t i = 0; i < s.size(); ++i) frac[i] = static_cast<double>(i) / std::max<std::size_t>(1, s.size() - 1);
    }
    frac.back() = 1.0;
    return frac;
}

/// Feasible coupling that advances both lists by normalized arc length.
double arc_length_cost(const std::vector<GraphPoint>& xs, const std::vector<GraphPoint>& ys) {
    const auto fx = arc_fractions(xs);
    const auto fy = arc_fractions(ys);
    std::size_t i = 0, j = 0;
    double a = std::abs(xs[0].t - ys[0].t), b = std::abs(xs[0].z - ys[0].z);
    while (i + 1 < xs.size() || j + 1 < ys.size()) {
        if (i + 1 == xs.size()) {
            ++j;
        } else if (j + 1 == ys.size()) {
            ++i;
        } else if (fx[i + 1] == fy[j + 1]) {
            ++i;
            ++j;
        } else if (fx[i + 1] < fy[j + 1]) {
            ++i;
        } else {
            ++j;
        }
        a = std::max(a, std::abs(xs[i].t - ys[j].t));
        b = std::max(b, std::abs(xs[i].z - ys[j].z));
    }
    return a + b;
}

/// min over monotone couplings of (max time gap + max value gap), restricted
/// to couplings of total cost ≤ bound. Each cell keeps its Pareto frontier.
double pareto_frontier_dp(const std::vector<GraphPoint>& xs, const std::vector<GraphPoint>& ys, double bound) {
    const std::size_t p = xs.size();
    const std::size_t q = ys.size();
    const double cap = bound * (1.0 + 1e-12) + 1e-15;

    std::vector<double> yt(q);
    for (std::size_t j = 0; j < q; ++j) yt[j] = ys[j].t;

    struct Row {
        std::size_t lo = 0, hi = 0;  // band [lo, hi)
        std::vector<Entry> pool;
        std::vector<std::uint32_t> offset;  // hi − lo + 1 entries
        std::size_t count(std::size_t j) const { return offset[j - lo + 1] - offset[j - lo]; }
        const Entry* begin(std::size_t j) const { return pool.data() + offset[j - lo]; }
        bool has(std::size_t j) const { return j >= lo && j < hi; }
    };

    Row prev, cur;
    std::vector<Entry> scratch;
    scratch.reserve(64);

    auto absorb = [&](const Row& row, std::size_t j, double a, double b) {
        if (!row.has(j)) return;
        const Entry* e = row.begin(j);
        for (std::size_t n = row.count(j); n-- > 0; ++e) {
            const Entry m{std::max(e->a, a), std::max(e->b, b)};
            if (m.a + m.b <= cap) scratch.push_back(m);
        }
    };

    for (std::size_t i = 0; i < p; ++i) {
        const double ti = xs[i].t;
        cur.lo = static_cast<std::size_t>(std::lower_bound(yt.begin(), yt.end(), ti - cap) - yt.begin());
        cur.hi = static_cast<std::size_t>(std::upper_bound(yt.begin(), yt.end(), ti + cap) - yt.begin());
        cur.pool.clear();
        cur.offset.assign(cur.hi - cur.lo + 1, 0);
        for (std::size_t j = cur.lo; j < cur.hi; ++j) {
            const double a = std::abs(ti - ys[j].t);
            const double b = std::abs(xs[i].z - ys[j].z);
            scratch.clear();
            if (i == 0 && j == 0) {
                if (a + b <= cap) scratch.push_back({a, b});
            } else if (a + b <= cap) {
                if (i > 0) {
                    absorb(prev, j, a, b);
                    if (j > 0) absorb(prev, j - 1, a, b);
                }
                if (j > cur.lo) {
                    // current row, previous column: entries already in cur.pool
                    const std::size_t jj = j - 1;
                    const Entry* e = cur.pool.data() + cur.offset[jj - cur.lo];
                    const std::size_t n = cur.pool.size() - cur.offset[jj - cur.lo];
                    for (std::size_t k = 0; k < n; ++k) {
                        const Entry m{std::max(e[k].a, a), std::max(e[k].b, b)};
                        if (m.a + m.b <= cap) scratch.push_back(m);
                    }
                }
            }
            if (scratch.size() > 1) {
                std::sort(scratch.begin(), scratch.end(),
                          [](const Entry& l, const Entry& r) { return l.a < r.a || (l.a == r.a && l.b < r.b); });
                double best_b = std::numeric_limits<double>::infinity();
                for (const auto& e : scratch) {
                    if (e.b < best_b) {
                        cur.pool.push_back(e);
                        best_b = e.b;
                    }
                }
            } else if (scratch.size() == 1) {
                cur.pool.push_back(scratch.front());
            }
            cur.offset[j - cur.lo + 1] = static_cast<std::uint32_t>(cur.pool.size());
        }
        std::swap(prev, cur);
    }

    double best = std::numeric_limits<double>::infinity();
    if (prev.has(q - 1)) {
        const Entry* e = prev.begin(q - 1);
        for (std::size_t n = prev.count(q - 1); n-- > 0; ++e) best = std::min(best, e->a + e->b);
    }
    return best;
}

/// Time grid for J1 lattices: both path grids, a uniform grid, and
/// subdivisions that keep the within-cell oscillation of either path ≤ range/m.
std::vector<double> j1_grid(const CadlagPath& x, const CadlagPath& y, int resolution) {
    const double horizon = x.horizon();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const CadlagPath* p : {&x, &y}) {
        for (double v : p->values()) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (std::size_t k = 0; k < p->size(); ++k) {
            lo = std::min(lo, p->left_value(k));
            hi = std::max(hi, p->left_value(k));
        }
    }
    const double tol = (hi > lo ? hi - lo : 1.0) / resolution;
    std::vector<double> g;
    for (int k = 0; k <= resolution; ++k) g.push_back(horizon * k / resolution);
    for (const CadlagPath* p : {&x, &y}) {
        const auto grid = p->grid();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            g.push_back(grid[k]);
            if (k + 1 < grid.size()) {
                const double rise = std::abs(p->left_value(k + 1) - p->values()[k]);
                const auto pieces = static_cast<int>(std::ceil(rise / tol));
                for (int s = 1; s < pieces; ++s) g.push_back(grid[k] + (grid[k + 1] - grid[k]) * s / pieces);
            }
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    g.front() = 0.0;
    g.back() = horizon;
    return g;
}

/// Largest |x(t_{i+1}−) − x(t_i)| over lattice cells.
double cell_oscillation(const CadlagPath& x, const std::vector<double>& g) {
    double osc = 0.0;
    for (std::size_t i = 0; i + 1 < g.size(); ++i) {
        osc = std::max(osc, std::abs(x.left_limit(g[i + 1]) - x.evaluate(g[i])));
    }
    return osc;
}

struct Knot {
    double t;
    double s;
};

double warp(const std::vector<Knot>& knots, double t) {
    auto it = std::upper_bound(knots.begin(), knots.end(), t, [](double v, const Knot& k) { return v < k.t; });
    if (it == knots.begin()) return knots.front().s;
    if (it == knots.end()) return knots.back().s;
    const Knot& b = *it;
    const Knot& a = *(it - 1);
    return a.s + (t - a.t) * (b.s - a.s) / (b.t - a.t);
}

double inverse_warp(const std::vector<Knot>& knots, double s) {
    auto it = std::upper_bound(knots.begin(), knots.end(), s, [](double v, const Knot& k) { return v < k.s; });
    if (it == knots.begin()) return knots.front().t;
    if (it == knots.end()) return knots.back().t;
    const Knot& b = *it;
    const Knot& a = *(it - 1);
    return a.t + (s - a.s) * (b.t - a.t) / (b.s - a.s);
}

/// sup_t |x(t) − y(λ(t))| + sup |log slope λ| for a piecewise-linear warp.
double j1_warp_value(const CadlagPath& x, const CadlagPath& y, const std::vector<Knot>& knots) {
    const double horizon = x.horizon();
    std::vector<double> ts(x.grid().begin(), x.grid().end());
    for (double s : y.grid()) ts.push_back(std::clamp(inverse_warp(knots, s), 0.0, horizon));
    for (const auto& k : knots) ts.push_back(k.t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    double gap = 0.0;
    for (double t : ts) {
        const double s = std::clamp(warp(knots, t), 0.0, horizon);
        gap = std::max(gap, std::abs(x.evaluate(t) - y.evaluate(s)));
        if (t > 0.0 && s > 0.0) gap = std::max(gap, std::abs(x.left_limit(t) - y.left_limit(s)));
    }
    double penalty = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
        penalty = std::max(penalty, std::abs(std::log((knots[k + 1].s - knots[k].s) / (knots[k + 1].t - knots[k].t))));
    }
    return gap + penalty;
}

}  // namespace

CompletedGraph completed_graph(const CadlagPath& path) {
    const auto grid = path.grid();
    const auto values = path.values();
    std::vector<GraphPoint> raw;
    raw.reserve(2 * grid.size());
    raw.push_back({0.0, values[0]});
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double left = path.left_value(k);
        raw.push_back({grid[k], left});
        if (values[k] != left) raw.push_back({grid[k], values[k]});
    }
    CompletedGraph g;
    g.vertices.reserve(raw.size());
    for (const auto& v : raw) {
        if (!g.vertices.empty() && g.vertices.back().t == v.t && g.vertices.back().z == v.z) continue;
        while (g.vertices.size() >= 2 &&
               collinear_continuation(g.vertices[g.vertices.size() - 2], g.vertices.back(), v)) {
            g.vertices.pop_back();
        }
        g.vertices.push_back(v);
    }
    if (g.vertices.size() == 1) g.vertices.push_back(g.vertices.front());
    return g;
}

ParametricRepresentation parametric_representation(const CompletedGraph& graph, int resolution) {
    if (resolution < 8) throw DomainError(fmt::format("parametric representation: resolution {} < 8", resolution));
    const auto& v = graph.vertices;
    const std::size_t segments = v.size() - 1;
    double total = 0.0;
    for (std::size_t k = 0; k < segments; ++k) total += std::abs(v[k + 1].t - v[k].t) + std::abs(v[k + 1].z - v[k].z);

    ParametricRepresentation rep;
    rep.resolution = resolution;
    const int min_pieces =
        static_cast<double>(kMinSamplesPerSegment) * static_cast<double>(segments) <= resolution ? kMinSamplesPerSegment : 1;
    const double spacing = total > 0.0 ? total / resolution : 1.0;
    rep.samples.push_back(v.front());
    for (std::size_t k = 0; k < segments; ++k) {
        const double len = std::abs(v[k + 1].t - v[k].t) + std::abs(v[k + 1].z - v[k].z);
        if (len == 0.0) continue;
        const int pieces = std::max(min_pieces, static_cast<int>(std::ceil(len / spacing - 1e-9)));
        for (int s = 1; s <= pieces; ++s) {
            const double w = static_cast<double>(s) / pieces;
            GraphPoint pnt = s == pieces ? v[k + 1] : GraphPoint{v[k].t + w * (v[k + 1].t - v[k].t), v[k].z + w * (v[k + 1].z - v[k].z)};
            rep.samples.push_back(pnt);
        }
        rep.max_time_step = std::max(rep.max_time_step, std::abs(v[k + 1].t - v[k].t) / pieces);
        rep.max_value_step = std::max(rep.max_value_step, std::abs(v[k + 1].z - v[k].z) / pieces);
    }
    if (rep.samples.size() == 1) rep.samples.push_back(v.back());
    return rep;
}

MetricResult d_m1(const CadlagPath& x, const CadlagPath& y, int resolution) {
    check_horizons(x, y, "d_m1");
    const auto rx = parametric_representation(completed_graph(x), resolution);
    const auto ry = parametric_representation(completed_graph(y), resolution);
    const double bound = std::min(time_merge_cost(rx.samples, ry.samples), arc_length_cost(rx.samples, ry.samples));
    const double best = pareto_frontier_dp(rx.samples, ry.samples, bound);
    const double radius = rx.max_time_step + ry.max_time_step + rx.max_value_step + ry.max_value_step;
    MetricResult r;
    r.resolution = resolution;
    r.value = best;
    r.upper = best;
    r.lower = std::max(0.0, best - radius);
    return r;
}

MetricResult d_j1(const CadlagPath& x, const CadlagPath& y, int resolution) {
    check_horizons(x, y, "d_j1");
    if (resolution < 8) throw DomainError(fmt::format("d_j1: resolution {} < 8", resolution));
    const double horizon = x.horizon();
    const std::vector<double> g = j1_grid(x, y, resolution);
    const std::size_t n = g.size();
    std::vector<double> xv(n), yv(n);
    for (std::size_t i = 0; i < n; ++i) {
        xv[i] = x.evaluate(g[i]);
        yv[i] = y.evaluate(g[i]);
    }

    // bottleneck DP over lattice warps, ties broken by max |t − λ(t)|
    std::vector<std::uint8_t> pred(n * n, 0);
    std::vector<double> gp(n), dp(n), gc(n), dc(n);
    const double inf = std::numeric_limits<double>::infinity();
    auto better = [](double g1, double d1, double g2, double d2) { return g1 < g2 || (g1 == g2 && d1 < d2); };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double cost = std::abs(xv[i] - yv[j]);
            const double shift = std::abs(g[i] - g[j]);
            double bg = inf, bd = inf;
            std::uint8_t from = 0;
            if (i == 0 && j == 0) {
                bg = 0.0;
                bd = 0.0;
            }
            if (i > 0 && j > 0 && better(gp[j - 1], dp[j - 1], bg, bd)) {
                bg = gp[j - 1];
                bd = dp[j - 1];
                from = 3;
            }
            if (i > 0 && better(gp[j], dp[j], bg, bd)) {
                bg = gp[j];
                bd = dp[j];
                from = 1;
            }
            if (j > 0 && better(gc[j - 1], dc[j - 1], bg, bd)) {
                bg = gc[j - 1];
                bd = dc[j - 1];
                from = 2;
            }
            gc[j] = std::max(bg, cost);
            dc[j] = std::max(bd, shift);
            pred[i * n + j] = from;
        }
        std::swap(gp, gc);
        std::swap(dp, dc);
    }
    const double lattice_gap = gp[n - 1];
    const double lower = std::max(0.0, lattice_gap - std::max(cell_oscillation(x, g), cell_oscillation(y, g)));

    // explicit warps: the identity and the strictly increasing knots of the DP path
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = n - 1, j = n - 1;;) {
        cells.emplace_back(i, j);
        const auto from = pred[i * n + j];
        if (from == 0) break;
        if (from & 1) --i;
        if (from & 2) --j;
    }
    std::reverse(cells.begin(), cells.end());
    std::vector<Knot> knots{{0.0, 0.0}};
    for (const auto& [i, j] : cells) {
        const double t = g[i], s = g[j];
        if (t >= horizon || s >= horizon) continue;
        if (t > knots.back().t && s > knots.back().s) knots.push_back({t, s});
    }
    knots.push_back({horizon, horizon});
    const std::vector<Knot> identity{{0.0, 0.0}, {horizon, horizon}};

    // the DP staircase is steep between lattice neighbours; pinning only the jump
    // alignments keeps the log-slope penalty small
    auto is_jump = [](const CadlagPath& p, double t) {
        return std::any_of(p.jumps().begin(), p.jumps().end(), [t](const JumpRecord& jr) { return jr.time == t; });
    };
    std::vector<Knot> pinned{{0.0, 0.0}};
    for (const auto& [i, j] : cells) {
        const double t = g[i], s = g[j];
        if (t >= horizon || s >= horizon) continue;
        if (!is_jump(x, t) && !is_jump(y, s)) continue;
        if (t > pinned.back().t && s > pinned.back().s) pinned.push_back({t, s});
    }
    pinned.push_back({horizon, horizon});

    MetricResult r;
    r.resolution = resolution;
    r.value = std::min({j1_warp_value(x, y, identity), j1_warp_value(x, y, knots), j1_warp_value(x, y, pinned)});
    r.upper = r.value;
    r.lower = std::min(lower, r.value);
    return r;
}

double w_prime(const CadlagPath& path, double delta) {
    if (!(delta > 0.0)) throw DomainError("w_prime: delta must be positive");
    const auto t = path.grid();
    const auto x = path.values();
    const std::size_t n = t.size();
    double sup = 0.0;
    for (std::size_t i = 0; i + 2 < n; ++i) {
        double inner_max = -std::numeric_limits<double>::infinity();
        double inner_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = i + 2; k < n && t[k] - t[i] < delta; ++k) {
            inner_max = std::max(inner_max, x[k - 1]);
            inner_min = std::min(inner_min, x[k - 1]);
            const double hi = std::max(x[i], x[k]);
            const double lo = std::min(x[i], x[k]);
            sup = std::max({sup, inner_max - hi, lo - inner_min});
        }
    }
    return sup;
}

M1Diagnostic m1_convergence_diagnostic(std::span<const CadlagPath> sequence, const CadlagPath& limit,
                                       std::span<const double> times, std::span<const double> deltas) {
    M1Diagnostic report;
    report.times.assign(times.begin(), times.end());
    report.deltas.assign(deltas.begin(), deltas.end());
    for (double d : deltas) report.limit_w_prime.push_back(w_prime(limit, d));
    for (const auto& member : sequence) {
        check_horizons(member, limit, "m1_convergence_diagnostic");
        std::vector<double> gaps;
        for (double t : times) gaps.push_back(std::abs(member.evaluate(t) - limit.evaluate(t)));
        std::vector<double> wp;
        for (double d : deltas) wp.push_back(w_prime(member, d));
        report.pointwise_gaps.push_back(std::move(gaps));
        report.w_prime.push_back(std::move(wp));
    }
    return report;
}

}  // namespace wzlab
