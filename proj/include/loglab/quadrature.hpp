#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "loglab/error.hpp"
#include "loglab/expansion.hpp"

namespace loglab {

struct QuadratureSpec {
    double abs_tol;
    int max_depth;

    QuadratureSpec(double abs_tol_, int max_depth_)
        : abs_tol(abs_tol_), max_depth(max_depth_) {
        if (!(abs_tol > 0.0))
            fail(ErrorCode::InvalidConstants,
                 "quadrature abs_tol must be positive, got " + std::to_string(abs_tol));
        if (max_depth < 10)
            fail(ErrorCode::InvalidConstants,
                 "quadrature max_depth must be at least 10, got " + std::to_string(max_depth));
    }
};

namespace detail {

// Richardson-corrected adaptive Simpson. The (left+right-whole)/15 term is
// both the error estimate and the correction added on acceptance. Tolerance
// halves per split so the accepted leaf errors sum below the caller's budget.
template <class F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth,
                            int max_depth, bool& within_tol) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol) return left + right + err;
    if (depth >= max_depth) {
        within_tol = false;
        return left + right + err;
    }
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1,
                                max_depth, within_tol) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1,
                                max_depth, within_tol);
}

}  // namespace detail

// Integrates f over [a, b] (sign-aware when b < a) to absolute tolerance
// abs_tol. Throws the non-convergence code if any subinterval still misses
// its share of the tolerance at max_depth.
template <class F>
double integrate_adaptive_simpson(F&& f, double a, double b, double abs_tol,
                                  int max_depth) {
    if (!(abs_tol > 0.0))
        fail(ErrorCode::InvalidConstants, "abs_tol must be positive");
    if (a == b) return 0.0;
    double sign = 1.0;
    if (b < a) {
        std::swap(a, b);
        sign = -1.0;
    }
    const double m = 0.5 * (a + b);
    const double fa = f(a);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    bool within_tol = true;
    const double value = detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole,
                                                      abs_tol, 0, max_depth, within_tol);
    if (!within_tol)
        fail(ErrorCode::NonConvergence,
             "adaptive Simpson exhausted depth " + std::to_string(max_depth) +
                 " on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    return sign * value;
}

namespace detail {

// Innermost denominator of the remainder integrand over the whole region:
// w runs from c to x, u between c and w, so w - u + alpha bottoms out at
// alpha - max(0, c - x).
inline void require_remainder_regular(const DerivationConstants& d, double x) {
    const double min_denom = d.alpha - std::max(0.0, d.c - x);
    if (min_denom <= 1e-12)
        fail(ErrorCode::Singularity,
             "remainder integrand denominator reaches " + std::to_string(min_denom) +
                 " on the integration region (c=" + std::to_string(d.c) +
                 ", alpha=" + std::to_string(d.alpha) + ", x=" + std::to_string(x) + ")");
}

inline double guarded_denom(double denom) {
    if (denom < 1e-12)
        fail(ErrorCode::Singularity,
             "remainder integrand denominator " + std::to_string(denom) +
                 " within 1e-12 of zero");
    return denom;
}

}  // namespace detail

// Running-upper-limit reading of the iterated remainder integral:
//   R(x) = integral_c^x [ integral_c^w f'(c) / (w - u + alpha) du ] dw,
// i.e. the inner upper limit tracks the outer variable. Analytically
//   R(x) = f'(c) * [ (x-c+alpha)*ln(x-c+alpha) - (x-c)*(1+ln alpha) - alpha*ln(alpha) ].
// The outer integral gets half the budget; the inner tolerance is scaled by
// the outer interval length so inner errors cannot accumulate past the rest.
inline double double_quadrature_remainder(const DerivationConstants& d, double x,
                                          const QuadratureSpec& q) {
    detail::require_remainder_regular(d, x);
    if (x == d.c) return 0.0;
    if (d.fprime_c == 0.0) return 0.0;
    const double inner_tol =
        q.abs_tol / (2.0 * std::max(1.0, std::abs(x - d.c)));
    auto inner = [&](double w) {
        auto g = [&](double u) {
            return d.fprime_c / detail::guarded_denom(w - u + d.alpha);
        };
        return integrate_adaptive_simpson(g, d.c, w, inner_tol, q.max_depth);
    };
    return integrate_adaptive_simpson(inner, d.c, x, 0.5 * q.abs_tol, q.max_depth);
}

// Frozen-outer-x reading of the same ambiguous expression: the inner upper
// limit is pinned to the final x, making the inner integral a constant that
// the outer integral then stretches over [c, x]. Analytically
//   F(x) = f'(c) * (x - c) * ln((x - c + alpha)/alpha).
// Computed by honest nested quadrature anyway so it exercises the same path.
inline double double_quadrature_remainder_frozen(const DerivationConstants& d,
                                                 double x, const QuadratureSpec& q) {
    detail::require_remainder_regular(d, x);
    if (x == d.c) return 0.0;
    if (d.fprime_c == 0.0) return 0.0;
    const double inner_tol =
        q.abs_tol / (2.0 * std::max(1.0, std::abs(x - d.c)));
    auto g = [&](double u) {
        return d.fprime_c / detail::guarded_denom(x - u + d.alpha);
    };
    const double inner_value =
        integrate_adaptive_simpson(g, d.c, x, inner_tol, q.max_depth);
    auto constant_inner = [&](double) { return inner_value; };
    return integrate_adaptive_simpson(constant_inner, d.c, x, 0.5 * q.abs_tol,
                                      q.max_depth);
}

}  // namespace loglab
