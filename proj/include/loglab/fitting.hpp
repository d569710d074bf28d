#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "loglab/error.hpp"
#include "loglab/expansion.hpp"
#include "loglab/golden_section.hpp"
#include "loglab/grid.hpp"
#include "loglab/residuals.hpp"

namespace loglab {

struct Interval {
    double lo;
    double hi;
};

struct FitConfig {
    // Search interval for the log shift a3. When absent it is derived from
    // the data: (-x_min + 1e-6, -x_min + 10*max(1, span)], which keeps every
    // log argument positive across the whole search.
    std::optional<Interval> shift_search;
    int n_shift_probes = 64;
    double refine_tol = 1e-10;
    // Weight on squared boundary misfit in the residual fit; only the PDE
    // fit reads it.
    double bc_penalty_weight = 1000.0;
    // Pins a2 during the PDE fit (e.g. 0 to ask how well the equation can be
    // satisfied with no log term at all).
    std::optional<double> fix_a2;
};

struct FitReport {
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double rmse = 0.0;
    double max_abs_err = 0.0;
    int n_samples = 0;
    bool converged = false;
    // a2 ~ 0 makes the shift unidentifiable; when that happens a3 is pinned
    // to 0 by convention and this flag records it. Not a CSV column.
    bool shift_by_convention = false;
    // Set when a design column was identically zero and its coefficient was
    // pinned to 0 (e.g. the constant term of a pure-residual heat fit).
    bool a1_pinned = false;
};

struct Sample1D {
    double x;
    double f;
};

struct Sample2D {
    double x;
    double y;
    double f;
};

struct BoundarySample {
    double x;
    double t;
    double value;
};

namespace detail {

// One row of the profiled least-squares system: minimize over (p1, p2) the
// sum of (p1*phi1 + p2*phi2 - y)^2. Rows flagged in_report contribute to
// the reported rmse/max_abs_err; penalty rows do not.
struct LsRow {
    double phi1;
    double phi2;
    double y;
    bool in_report;
};

struct LsSolve {
    double p1;
    double p2;
    bool p1_pinned;
    bool p2_pinned;
};

// Normal equations in long double plus one iterative-refinement pass, which
// is what keeps the residual orthogonal to the design columns to ~1e-10
// relative even for poorly scaled shifts. A column with exactly zero mass is
// pinned to 0 rather than reported as degeneracy; degeneracy is reserved
// for collinearity among the live columns.
inline LsSolve solve_ls_2(const std::vector<LsRow>& rows) {
    long double s11 = 0, s12 = 0, s22 = 0, b1 = 0, b2 = 0;
    for (const auto& r : rows) {
        s11 += static_cast<long double>(r.phi1) * r.phi1;
        s12 += static_cast<long double>(r.phi1) * r.phi2;
        s22 += static_cast<long double>(r.phi2) * r.phi2;
        b1 += static_cast<long double>(r.phi1) * r.y;
        b2 += static_cast<long double>(r.phi2) * r.y;
    }
    const bool live1 = s11 > 1e-300L;
    const bool live2 = s22 > 1e-300L;
    if (!live1 && !live2) return {0.0, 0.0, true, true};
    if (live1 && !live2)
        return {static_cast<double>(b1 / s11), 0.0, false, true};
    if (!live1)
        return {0.0, static_cast<double>(b2 / s22), true, false};
    const long double det = s11 * s22 - s12 * s12;
    if (!(det > 1e-12L * s11 * s22))
        fail(ErrorCode::DegenerateDesign,
             "design columns are collinear; the linear subproblem is rank-deficient");
    long double p1 = (b1 * s22 - b2 * s12) / det;
    long double p2 = (b2 * s11 - b1 * s12) / det;
    const long double r1 = b1 - (s11 * p1 + s12 * p2);
    const long double r2 = b2 - (s12 * p1 + s22 * p2);
    p1 += (r1 * s22 - r2 * s12) / det;
    p2 += (r2 * s11 - r1 * s12) / det;
    return {static_cast<double>(p1), static_cast<double>(p2), false, false};
}

inline long double sse_of(const std::vector<LsRow>& rows, double p1, double p2) {
    long double acc = 0;
    for (const auto& r : rows) {
        const long double d = p1 * r.phi1 + p2 * r.phi2 - r.y;
        acc += d * d;
    }
    return acc;
}

struct ProfilePoint {
    double a3;
    LsSolve sol;
    long double sse;
};

// Strict improvement, then smaller |a3| on exact SSE ties. Flat objectives
// (a2 ~ 0 data) therefore land on the shift closest to zero.
inline bool profile_better(const ProfilePoint& a, const ProfilePoint& b) {
    if (a.sse < b.sse) return true;
    if (a.sse > b.sse) return false;
    return std::abs(a.a3) < std::abs(b.a3);
}

// Profiled search over the shift: uniform probes across the interval, then
// golden-section refinement inside the bracket around the best probe. The
// returned point is never worse than the best probe because candidates only
// replace it on strict improvement.
template <class Builder>
inline std::pair<ProfilePoint, bool> profile_shift(const Builder& build,
                                                   Interval iv, int n_probes,
                                                   double refine_tol) {
    if (n_probes < 2)
        fail(ErrorCode::InvalidConstants,
             "shift search needs at least 2 probes, got " + std::to_string(n_probes));
    if (!(iv.lo < iv.hi))
        fail(ErrorCode::InvalidConstants, "shift search interval needs lo < hi");
    auto eval_at = [&](double a3) {
        const auto rows = build(a3);
        const auto sol = solve_ls_2(rows);
        return ProfilePoint{a3, sol, sse_of(rows, sol.p1, sol.p2)};
    };
    ProfilePoint best = eval_at(iv.lo);
    int best_i = 0;
    for (int i = 1; i < n_probes; ++i) {
        const double a3 =
            iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / (n_probes - 1);
        auto p = eval_at(a3);
        if (profile_better(p, best)) {
            best = std::move(p);
            best_i = i;
        }
    }
    auto probe_at = [&](int i) {
        return iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / (n_probes - 1);
    };
    const double bl = probe_at(std::max(0, best_i - 1));
    const double bh = probe_at(std::min(n_probes - 1, best_i + 1));
    bool converged = true;
    if (bh > bl) {
        const auto g = golden_section_minimize(
            [&](double a3) { return static_cast<double>(eval_at(a3).sse); }, bl, bh,
            refine_tol, 200);
        converged = g.converged;
        auto cand = eval_at(g.x);
        if (profile_better(cand, best)) best = std::move(cand);
    }
    return {best, converged};
}

inline Interval default_shift_interval(double x_min, double x_max) {
    return {-x_min + 1e-6, -x_min + 10.0 * std::max(1.0, x_max - x_min)};
}

inline void require_shift_interval(const Interval& iv, double x_min) {
    if (!(iv.lo < iv.hi))
        fail(ErrorCode::InvalidConstants, "shift search interval needs lo < hi");
    if (!(x_min + iv.lo > 0.0))
        fail(ErrorCode::LogDomain,
             "shift search interval admits a3 = " + std::to_string(iv.lo) +
                 " with x_min + a3 <= 0 (x_min = " + std::to_string(x_min) + ")");
}

inline void fill_report_stats(FitReport& rep, const std::vector<double>& residuals) {
    rep.rmse = rms_of(residuals);
    double mx = 0.0;
    for (double r : residuals) mx = std::max(mx, std::abs(r));
    rep.max_abs_err = mx;
}

}  // namespace detail

// Least-squares fit of a1 + a2*x + a2*(x+a3)*ln(x+a3) to 1-D samples.
// Linear in (a1, a2) for fixed a3, so the shift is profiled out: 1-D probe
// scan plus golden-section refinement on the profiled SSE.
inline FitReport fit_function_1d(const std::vector<Sample1D>& samples,
                                 const FitConfig& cfg) {
    if (samples.size() < 3)
        fail(ErrorCode::DegenerateDesign,
             "1-D fit needs at least 3 samples, got " + std::to_string(samples.size()));
    double x_min = samples[0].x, x_max = samples[0].x, f_scale = 0.0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.x) || !std::isfinite(s.f))
            fail(ErrorCode::InvalidConstants, "samples must be finite");
        x_min = std::min(x_min, s.x);
        x_max = std::max(x_max, s.x);
        f_scale = std::max(f_scale, std::abs(s.f));
    }
    const Interval iv = cfg.shift_search ? *cfg.shift_search
                                         : detail::default_shift_interval(x_min, x_max);
    detail::require_shift_interval(iv, x_min);

    auto build = [&](double a3) {
        std::vector<detail::LsRow> rows;
        rows.reserve(samples.size());
        for (const auto& s : samples) {
            const double arg = s.x + a3;
            rows.push_back({1.0, s.x + arg * std::log(arg), s.f, true});
        }
        return rows;
    };
    const auto [best, converged] =
        detail::profile_shift(build, iv, cfg.n_shift_probes, cfg.refine_tol);

    FitReport rep;
    rep.n_samples = static_cast<int>(samples.size());
    rep.converged = converged;
    rep.a1 = best.sol.p1;
    rep.a2 = best.sol.p2;
    rep.a3 = best.a3;
    rep.a1_pinned = best.sol.p1_pinned;

    std::vector<double> residuals;
    residuals.reserve(samples.size());
    if (std::abs(rep.a2) <= 1e-9 * std::max(1.0, f_scale)) {
        // Shift unidentifiable without a log term; report the constant fit.
        long double acc = 0;
        for (const auto& s : samples) acc += s.f;
        rep.a1 = static_cast<double>(acc / static_cast<long double>(samples.size()));
        rep.a2 = 0.0;
        rep.a3 = 0.0;
        rep.shift_by_convention = true;
        for (const auto& s : samples) residuals.push_back(s.f - rep.a1);
    } else {
        for (const auto& s : samples) {
            const double arg = s.x + rep.a3;
            residuals.push_back(s.f - (rep.a1 + rep.a2 * s.x +
                                       rep.a2 * arg * std::log(arg)));
        }
    }
    detail::fill_report_stats(rep, residuals);
    return rep;
}

// Least-squares fit of a1 + a2*x + a3*y + a2*(x+a3)*ln(x+a3) to 2-D samples.
// The shared a3 moves the y-slope and the log shift together: for fixed a3
// the target f - a3*y is linear in (a1, a2), so the same profiling applies.
inline FitReport fit_function_2d(const std::vector<Sample2D>& samples,
                                 const FitConfig& cfg) {
    if (samples.size() < 4)
        fail(ErrorCode::DegenerateDesign,
             "2-D fit needs at least 4 samples, got " + std::to_string(samples.size()));
    double x_min = samples[0].x, x_max = samples[0].x, f_scale = 0.0;
    long double y_norm = 0.0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.f))
            fail(ErrorCode::InvalidConstants, "samples must be finite");
        x_min = std::min(x_min, s.x);
        x_max = std::max(x_max, s.x);
        f_scale = std::max(f_scale, std::abs(s.f));
        y_norm += static_cast<long double>(s.y) * s.y;
    }
    const Interval iv = cfg.shift_search ? *cfg.shift_search
                                         : detail::default_shift_interval(x_min, x_max);
    detail::require_shift_interval(iv, x_min);

    auto build = [&](double a3) {
        std::vector<detail::LsRow> rows;
        rows.reserve(samples.size());
        for (const auto& s : samples) {
            const double arg = s.x + a3;
            rows.push_back({1.0, s.x + arg * std::log(arg), s.f - a3 * s.y, true});
        }
        return rows;
    };
    const auto [best, converged] =
        detail::profile_shift(build, iv, cfg.n_shift_probes, cfg.refine_tol);

    FitReport rep;
    rep.n_samples = static_cast<int>(samples.size());
    rep.converged = converged;
    rep.a1 = best.sol.p1;
    rep.a2 = best.sol.p2;
    rep.a3 = best.a3;
    rep.a1_pinned = best.sol.p1_pinned;

    std::vector<double> residuals;
    residuals.reserve(samples.size());
    if (y_norm < 1e-300L && std::abs(rep.a2) <= 1e-9 * std::max(1.0, f_scale)) {
        // All samples at y = 0 with no log term: same convention as 1-D.
        long double acc = 0;
        for (const auto& s : samples) acc += s.f;
        rep.a1 = static_cast<double>(acc / static_cast<long double>(samples.size()));
        rep.a2 = 0.0;
        rep.a3 = 0.0;
        rep.shift_by_convention = true;
        for (const auto& s : samples) residuals.push_back(s.f - rep.a1);
    } else {
        for (const auto& s : samples) {
            const double arg = s.x + rep.a3;
            residuals.push_back(s.f - (rep.a1 + rep.a2 * s.x + rep.a3 * s.y +
                                       rep.a2 * arg * std::log(arg)));
        }
    }
    detail::fill_report_stats(rep, residuals);
    return rep;
}

// Fits the family directly against a PDE: minimizes the sum of squared
// analytic residuals over the space-time grid, plus bc_penalty_weight times
// the squared boundary-sample misfit. The reported rmse/max_abs_err cover
// the residual rows only; the penalty steers, it is not the figure of merit.
inline FitReport fit_pde_residual(const PdeEquation& eq, const Grid1D& grid,
                                  const Grid1D& t_grid,
                                  const std::vector<BoundarySample>& boundary,
                                  const FitConfig& cfg) {
    if (!(cfg.bc_penalty_weight >= 0.0))
        fail(ErrorCode::InvalidConstants, "bc_penalty_weight must be nonnegative");
    if (cfg.bc_penalty_weight > 0.0 && boundary.empty())
        fail(ErrorCode::InvalidConstants,
             "boundary samples required when bc_penalty_weight > 0");
    double x_all_min = grid.x_min;
    for (const auto& b : boundary) {
        if (!std::isfinite(b.x) || !std::isfinite(b.t) || !std::isfinite(b.value))
            fail(ErrorCode::InvalidConstants, "boundary samples must be finite");
        x_all_min = std::min(x_all_min, b.x);
    }
    const Interval iv = cfg.shift_search
                            ? *cfg.shift_search
                            : detail::default_shift_interval(x_all_min, grid.x_max);
    detail::require_shift_interval(iv, x_all_min);

    const bool fixed = cfg.fix_a2.has_value();
    const double a2f = fixed ? *cfg.fix_a2 : 0.0;
    const double sw = std::sqrt(cfg.bc_penalty_weight);
    auto build = [&](double a3) {
        std::vector<detail::LsRow> rows;
        rows.reserve(static_cast<std::size_t>(grid.n) * t_grid.n + boundary.size());
        for (int it = 0; it < t_grid.n; ++it) {
            const double t = t_grid.node(it);
            for (int ix = 0; ix < grid.n; ++ix) {
                const double x = grid.node(ix);
                const double arg = x + a3;
                detail::LsRow row{0.0, 0.0, 0.0, true};
                std::visit(
                    [&](const auto& p) {
                        using P = std::decay_t<decltype(p)>;
                        if constexpr (std::is_same_v<P, RCDParams>) {
                            const double lg = std::log(arg);
                            row.phi1 = -p.r;
                            row.phi2 = p.r * x * (2.0 + lg) +
                                       0.5 * p.sigma * p.sigma * x * x / arg -
                                       p.r * x - p.r * arg * lg;
                            row.y = p.r * a3 * t - a3;
                        } else {
                            row.phi1 = 0.0;
                            row.phi2 = -p.k / arg;
                            row.y = -a3;
                        }
                    },
                    eq);
                if (fixed) {
                    row.y -= row.phi2 * a2f;
                    row.phi2 = 0.0;
                }
                rows.push_back(row);
            }
        }
        for (const auto& b : boundary) {
            const double arg = b.x + a3;
            detail::LsRow row{1.0, b.x + arg * std::log(arg), b.value - a3 * b.t,
                              false};
            if (fixed) {
                row.y -= row.phi2 * a2f;
                row.phi2 = 0.0;
            }
            row.phi1 *= sw;
            row.phi2 *= sw;
            row.y *= sw;
            rows.push_back(row);
        }
        return rows;
    };
    const auto [best, converged] =
        detail::profile_shift(build, iv, cfg.n_shift_probes, cfg.refine_tol);

    FitReport rep;
    rep.n_samples = grid.n * t_grid.n;
    rep.converged = converged;
    rep.a1 = best.sol.p1;
    rep.a2 = fixed ? a2f : best.sol.p2;
    rep.a3 = best.a3;
    rep.a1_pinned = best.sol.p1_pinned;

    const auto rows = build(best.a3);
    std::vector<double> residuals;
    residuals.reserve(rows.size());
    for (const auto& r : rows)
        if (r.in_report)
            residuals.push_back(best.sol.p1 * r.phi1 + best.sol.p2 * r.phi2 - r.y);
    detail::fill_report_stats(rep, residuals);
    return rep;
}

}  // namespace loglab
