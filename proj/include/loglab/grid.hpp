#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "loglab/error.hpp"

namespace loglab {

// Uniform 1-D grid with n nodes on [x_min, x_max]. Both endpoints are nodes
// and node(n-1) returns x_max exactly, not x_min + (n-1)*step.
struct Grid1D {
    double x_min;
    double x_max;
    int n;

    Grid1D(double x_min_, double x_max_, int n_)
        : x_min(x_min_), x_max(x_max_), n(n_) {
        if (!std::isfinite(x_min) || !std::isfinite(x_max))
            fail(ErrorCode::InvalidConstants, "grid bounds must be finite");
        if (!(x_min < x_max))
            fail(ErrorCode::InvalidConstants,
                 "grid needs x_min < x_max, got [" + std::to_string(x_min) +
                     ", " + std::to_string(x_max) + "]");
        if (n < 2)
            fail(ErrorCode::InvalidConstants,
                 "grid needs at least 2 nodes, got " + std::to_string(n));
    }

    double step() const { return (x_max - x_min) / (n - 1); }

    double node(int i) const {
        return i == n - 1 ? x_max : x_min + i * step();
    }

    std::vector<double> nodes() const {
        std::vector<double> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = node(i);
        return out;
    }
};

}  // namespace loglab
