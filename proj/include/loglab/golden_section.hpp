#pragma once

#include <cmath>
#include <utility>

#include "loglab/error.hpp"

namespace loglab {

struct GoldenResult {
    double x;
    double value;
    int evals;
    bool converged;
};

// Golden-section minimization on [a, b]. Returns the best point actually
// evaluated, so the result can never be worse than any interior probe the
// search touched. Ties in the comparison shrink from the left, which keeps
// runs bit-reproducible.
template <class F>
GoldenResult golden_section_minimize(F&& f, double a, double b, double x_tol,
                                     int max_iter = 200) {
    if (!(x_tol > 0.0))
        fail(ErrorCode::InvalidConstants, "golden section x_tol must be positive");
    if (b < a) std::swap(a, b);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    int evals = 2;
    double best_x = fc <= fd ? c : d;
    double best_f = fc <= fd ? fc : fd;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        if (b - a <= x_tol) {
            converged = true;
            break;
        }
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
        ++evals;
        if (fc < best_f) {
            best_f = fc;
            best_x = c;
        }
        if (fd < best_f) {
            best_f = fd;
            best_x = d;
        }
    }
    return {best_x, best_f, evals, converged};
}

}  // namespace loglab
