#pragma once

#include <cmath>
#include <string>

#include "loglab/error.hpp"

namespace loglab {

namespace detail {

inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v))
        fail(ErrorCode::InvalidConstants,
             std::string(name) + " must be finite, got " + std::to_string(v));
}

// The log domain guard is strict: arg must be > 0, no epsilon slack.
inline double require_log_arg(double x, double shift, const char* where) {
    const double arg = x + shift;
    if (!(arg > 0.0))
        fail(ErrorCode::LogDomain,
             std::string(where) + ": log argument " + std::to_string(x) +
                 " + " + std::to_string(shift) + " = " + std::to_string(arg) +
                 " is not positive");
    return arg;
}

}  // namespace detail

// f(x) = a1 + a2*x + a2*(x + a3)*ln(x + a3).
// a2 multiplies both the linear and the log term; a3 is the log shift.
struct TiedLogExpansion1D {
    double a1;
    double a2;
    double a3;

    TiedLogExpansion1D(double a1_, double a2_, double a3_)
        : a1(a1_), a2(a2_), a3(a3_) {
        detail::require_finite(a1, "a1");
        detail::require_finite(a2, "a2");
        detail::require_finite(a3, "a3");
    }
};

// f(x, t) = a1 + a2*x + a3*t + a2*(x + a3)*ln(x + a3).
// The same a3 is both the coefficient of the second variable and the log
// shift; that tying is the point of the family, not an accident.
struct TiedLogExpansion2D {
    double a1;
    double a2;
    double a3;

    TiedLogExpansion2D(double a1_, double a2_, double a3_)
        : a1(a1_), a2(a2_), a3(a3_) {
        detail::require_finite(a1, "a1");
        detail::require_finite(a2, "a2");
        detail::require_finite(a3, "a3");
    }
};

// Untied four-constant form g(x) = b0 + b1*x + bL*(x + s)*ln(x + s).
// Setting b1 = bL = a2, s = a3 recovers the tied family.
struct GeneralLogAnsatz {
    double b0;
    double b1;
    double bL;
    double s;

    GeneralLogAnsatz(double b0_, double b1_, double bL_, double s_)
        : b0(b0_), b1(b1_), bL(bL_), s(s_) {
        detail::require_finite(b0, "b0");
        detail::require_finite(b1, "b1");
        detail::require_finite(bL, "bL");
        detail::require_finite(s, "s");
    }
};

// Constants of a first-order expansion of f around c with log shift alpha:
// f(c), f'(c), and the requirement c != 0 (the expansion divides by nothing,
// but the construction it comes from is stated for nonzero c and we keep
// that restriction visible rather than silently extending it).
struct DerivationConstants {
    double c;
    double alpha;
    double f_c;
    double fprime_c;

    DerivationConstants(double c_, double alpha_, double f_c_, double fprime_c_)
        : c(c_), alpha(alpha_), f_c(f_c_), fprime_c(fprime_c_) {
        detail::require_finite(c, "c");
        detail::require_finite(alpha, "alpha");
        detail::require_finite(f_c, "f_c");
        detail::require_finite(fprime_c, "fprime_c");
        if (!(alpha > 0.0))
            fail(ErrorCode::InvalidConstants,
                 "alpha must be positive, got " + std::to_string(alpha));
        if (c == 0.0) fail(ErrorCode::CZero, "expansion point c must be nonzero");
    }
};

inline double eval(const TiedLogExpansion1D& e, double x) {
    const double arg = detail::require_log_arg(x, e.a3, "eval");
    return e.a1 + e.a2 * x + e.a2 * arg * std::log(arg);
}

inline double eval(const TiedLogExpansion2D& e, double x, double t) {
    const double arg = detail::require_log_arg(x, e.a3, "eval");
    return e.a1 + e.a2 * x + e.a3 * t + e.a2 * arg * std::log(arg);
}

inline double eval(const GeneralLogAnsatz& g, double x) {
    const double arg = detail::require_log_arg(x, g.s, "eval");
    return g.b0 + g.b1 * x + g.bL * arg * std::log(arg);
}

// d/dx of the tied family: a2*(2 + ln(x + a3)). Identical formula in 1-D and
// 2-D because the extra 2-D term a3*t has no x dependence.
inline double d_dx(const TiedLogExpansion1D& e, double x) {
    const double arg = detail::require_log_arg(x, e.a3, "d_dx");
    return e.a2 * (2.0 + std::log(arg));
}

inline double d_dx(const TiedLogExpansion2D& e, double x) {
    const double arg = detail::require_log_arg(x, e.a3, "d_dx");
    return e.a2 * (2.0 + std::log(arg));
}

// d/dt of the 2-D family is the constant a3.
inline double d_dt(const TiedLogExpansion2D& e) { return e.a3; }

inline double d2_dx2(const TiedLogExpansion1D& e, double x) {
    const double arg = detail::require_log_arg(x, e.a3, "d2_dx2");
    return e.a2 / arg;
}

inline double d2_dx2(const TiedLogExpansion2D& e, double x) {
    const double arg = detail::require_log_arg(x, e.a3, "d2_dx2");
    return e.a2 / arg;
}

// Closed-form first-order remainder built from the same constants:
//   R1(x) = f'(c) * [ alpha*ln(alpha) + x - ((x - c + alpha)*ln(x - c + alpha) + c) ].
// At x = c the bracket cancels term by term, so R1(c) is exactly 0 in
// floating point, not merely small.
inline double remainder_closed_form(const DerivationConstants& d, double x) {
    const double shifted = x - d.c + d.alpha;
    if (!(shifted > 0.0))
        fail(ErrorCode::LogDomain,
             "remainder_closed_form: x - c + alpha = " + std::to_string(shifted) +
                 " is not positive");
    const double bracket =
        d.alpha * std::log(d.alpha) + x - (shifted * std::log(shifted) + d.c);
    return d.fprime_c * bracket;
}

// The untied ansatz the expansion construction actually produces before any
// tying is assumed:
//   s  = alpha - c
//   bL = -f'(c)
//   b1 = 2*f'(c)
//   b0 = f(c) + f'(c)*(alpha*ln(alpha) - 2*c)
// Note b1 != bL unless f'(c) = 0, so the tied family is not forced by the
// construction; is_tied below measures that gap instead of hiding it.
inline GeneralLogAnsatz expansion_from_derivation(const DerivationConstants& d) {
    const double s = d.alpha - d.c;
    const double bL = -d.fprime_c;
    const double b1 = 2.0 * d.fprime_c;
    const double b0 = d.f_c + d.fprime_c * (d.alpha * std::log(d.alpha) - 2.0 * d.c);
    return GeneralLogAnsatz(b0, b1, bL, s);
}

// Embed the tied family into the untied form (b1 = bL = a2, s = a3).
inline GeneralLogAnsatz to_general(const TiedLogExpansion1D& e) {
    return GeneralLogAnsatz(e.a1, e.a2, e.a2, e.a3);
}

// True when |b1 - bL| <= tol. For the ansatz produced by
// expansion_from_derivation the gap is exactly 3*|f'(c)|.
inline bool is_tied(const GeneralLogAnsatz& g, double tol) {
    if (!(tol >= 0.0))
        fail(ErrorCode::InvalidConstants,
             "is_tied tolerance must be nonnegative, got " + std::to_string(tol));
    return std::abs(g.b1 - g.bL) <= tol;
}

}  // namespace loglab
