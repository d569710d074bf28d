#pragma once

#include <cmath>
#include <string>

#include "loglab/error.hpp"
#include "loglab/grid.hpp"

namespace loglab {

// Classical CRRA benchmark rule: pi*(x) = (mu - r) * x / (gamma * sigma^2).
// gamma = 1 is the log-utility investor.
inline double merton_policy(double mu, double r, double sigma, double gamma,
                            double x) {
    if (!(sigma > 0.0))
        fail(ErrorCode::ParamDomain, "sigma must be positive, got " + std::to_string(sigma));
    if (!(gamma > 0.0))
        fail(ErrorCode::ParamDomain, "gamma must be positive, got " + std::to_string(gamma));
    if (!(x > 0.0))
        fail(ErrorCode::ParamDomain, "wealth must be positive, got " + std::to_string(x));
    return (mu - r) * x / (gamma * sigma * sigma);
}

// Exhaustive scan of the pointwise Hamiltonian
//   h(pi) = pi*(mu - r)*vx + 0.5*pi^2*sigma^2*vxx
// over a fixed grid of candidate allocations. Refuses to "maximize" a convex
// objective: vxx must be strictly negative. Ties keep the first (leftmost)
// maximizer, so results are reproducible.
inline double brute_force_hjb_max(double vx, double vxx, double mu, double r,
                                  double sigma, const Grid1D& pi_grid) {
    if (!(sigma > 0.0))
        fail(ErrorCode::ParamDomain, "sigma must be positive, got " + std::to_string(sigma));
    if (!(vxx < 0.0))
        fail(ErrorCode::Concavity,
             "brute-force max needs vxx < 0, got " + std::to_string(vxx));
    const double excess = mu - r;
    double best_pi = pi_grid.node(0);
    double best_h = best_pi * excess * vx + 0.5 * best_pi * best_pi * sigma * sigma * vxx;
    for (int i = 1; i < pi_grid.n; ++i) {
        const double pi = pi_grid.node(i);
        const double h = pi * excess * vx + 0.5 * pi * pi * sigma * sigma * vxx;
        if (h > best_h) {
            best_h = h;
            best_pi = pi;
        }
    }
    return best_pi;
}

}  // namespace loglab
