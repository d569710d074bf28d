#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "loglab/cn_solver.hpp"
#include "loglab/error.hpp"
#include "loglab/expansion.hpp"
#include "loglab/grid.hpp"

namespace loglab {

struct RCDParams {
    double r;
    double sigma;

    RCDParams(double r_, double sigma_) : r(r_), sigma(sigma_) {
        if (!std::isfinite(r))
            fail(ErrorCode::InvalidConstants, "r must be finite");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            fail(ErrorCode::InvalidConstants,
                 "sigma must be positive and finite, got " + std::to_string(sigma));
    }
};

struct HeatParams {
    double k;

    explicit HeatParams(double k_) : k(k_) {
        if (!(k > 0.0) || !std::isfinite(k))
            fail(ErrorCode::InvalidConstants,
                 "k must be positive and finite, got " + std::to_string(k));
    }
};

using PdeEquation = std::variant<RCDParams, HeatParams>;

// Operator values on arbitrary (v, vx, vxx, vt), for cross-checking the
// analytic residuals below against finite differences of eval.
inline double rcd_operator(const RCDParams& p, double x, double v, double vx,
                           double vxx, double vt) {
    return vt + p.r * x * vx + 0.5 * p.sigma * p.sigma * x * x * vxx - p.r * v;
}

inline double heat_operator(const HeatParams& p, double vxx, double vt) {
    return vt - p.k * vxx;
}

// Analytic residual of the tied 2-D family in V_t + r x V_x
// + (sigma^2/2) x^2 V_xx - r V. Substituting V_x = a2*(2 + ln(x+a3)),
// V_xx = a2/(x+a3), V_t = a3 collapses the operator to an explicit formula;
// it is zero only where the family genuinely solves the equation.
inline double rcd_residual(const TiedLogExpansion2D& e, const RCDParams& p,
                           double x, double t) {
    const double arg = detail::require_log_arg(x, e.a3, "rcd_residual");
    const double lg = std::log(arg);
    return e.a3 + p.r * x * e.a2 * (2.0 + lg) +
           0.5 * p.sigma * p.sigma * x * x * e.a2 / arg -
           p.r * (e.a1 + e.a2 * x + e.a3 * t + e.a2 * arg * lg);
}

// Analytic residual in V_t - k V_xx; t drops out entirely.
inline double heat_residual(const TiedLogExpansion2D& e, const HeatParams& p,
                            double x) {
    const double arg = detail::require_log_arg(x, e.a3, "heat_residual");
    return e.a3 - p.k * e.a2 / arg;
}

struct ResidualSample {
    double x;
    double t;
    double residual;
};

struct ResidualReport {
    int nx = 0;
    int nt = 0;
    double rms_residual = 0.0;
    double max_abs_residual = 0.0;
    std::optional<double> rms_error_vs_reference;
    std::vector<ResidualSample> samples;  // capped at kMaxSamples rows
};

inline constexpr int kMaxResidualSamples = 10000;

// Permutation-invariant rms: squares are sorted before accumulation, so any
// reordering of the inputs produces bit-identical output.
inline double rms_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    for (double& v : values) v = v * v;
    std::sort(values.begin(), values.end());
    long double acc = 0.0L;
    for (double v : values) acc += v;
    return static_cast<double>(std::sqrt(acc / static_cast<long double>(values.size())));
}

namespace detail {

inline void require_sweep_domain(const TiedLogExpansion2D& e, double x, int ix) {
    if (!(x + e.a3 > 0.0))
        fail(ErrorCode::LogDomain,
             "residual sweep node ix=" + std::to_string(ix) + " (x=" +
                 std::to_string(x) + ") violates x + a3 > 0 with a3=" +
                 std::to_string(e.a3));
}

}  // namespace detail

// Evaluates the analytic residual of e on the full space-time grid,
// t-major. If a reference solution is supplied, also accumulates the rms of
// eval(e) minus the (bilinearly interpolated) reference over the same nodes;
// a sweep node outside the reference extents is a grid-mismatch error.
inline ResidualReport residual_sweep(const TiedLogExpansion2D& e,
                                     const PdeEquation& eq, const Grid1D& grid,
                                     const Grid1D& t_grid,
                                     const CNSolution* reference = nullptr) {
    for (int i = 0; i < grid.n; ++i) detail::require_sweep_domain(e, grid.node(i), i);

    ResidualReport rep;
    rep.nx = grid.n;
    rep.nt = t_grid.n;
    std::vector<double> residuals;
    residuals.reserve(static_cast<std::size_t>(grid.n) * t_grid.n);
    std::vector<double> diffs;
    for (int it = 0; it < t_grid.n; ++it) {
        const double t = t_grid.node(it);
        for (int ix = 0; ix < grid.n; ++ix) {
            const double x = grid.node(ix);
            const double res = std::visit(
                [&](const auto& p) {
                    using P = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<P, RCDParams>)
                        return rcd_residual(e, p, x, t);
                    else
                        return heat_residual(e, p, x);
                },
                eq);
            residuals.push_back(res);
            rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(res));
            if (rep.samples.size() < static_cast<std::size_t>(kMaxResidualSamples))
                rep.samples.push_back({x, t, res});
            if (reference) diffs.push_back(eval(e, x, t) - reference->at(x, t));
        }
    }
    rep.rms_residual = rms_of(std::move(residuals));
    if (reference) rep.rms_error_vs_reference = rms_of(std::move(diffs));
    return rep;
}

// Pointwise gap between the analytic family and a stored reference solution
// on the reference's own nodes. The residual fields carry the gap statistics
// (the "residual" here is eval(e) - reference, not a PDE residual).
inline ResidualReport compare_to_reference(const TiedLogExpansion2D& e,
                                           const CNSolution& reference) {
    for (int i = 0; i < reference.grid.n; ++i)
        detail::require_sweep_domain(e, reference.grid.node(i), i);

    ResidualReport rep;
    rep.nx = reference.grid.n;
    rep.nt = reference.t_grid.n;
    std::vector<double> diffs;
    diffs.reserve(static_cast<std::size_t>(rep.nx) * rep.nt);
    for (int it = 0; it < rep.nt; ++it) {
        const double t = reference.t_grid.node(it);
        for (int ix = 0; ix < rep.nx; ++ix) {
            const double x = reference.grid.node(ix);
            const double d = eval(e, x, t) - reference.value(it, ix);
            diffs.push_back(d);
            rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(d));
            if (rep.samples.size() < static_cast<std::size_t>(kMaxResidualSamples))
                rep.samples.push_back({x, t, d});
        }
    }
    rep.rms_residual = rms_of(diffs);
    rep.rms_error_vs_reference = rep.rms_residual;
    return rep;
}

}  // namespace loglab
