#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "loglab/error.hpp"
#include "loglab/grid.hpp"

namespace loglab {

// Dense time-major storage of a Crank-Nicolson march: values[it*nx + ix]
// holds V(x_ix, t_it) for every time node, not just the final slice, so
// space-time sweeps can interrogate the whole solution.
struct CNSolution {
    Grid1D grid;
    Grid1D t_grid;
    std::vector<double> values;
    std::pair<int, int> scheme_order{2, 2};  // (space, time)

    double value(int it, int ix) const {
        return values[static_cast<std::size_t>(it) * grid.n +
                      static_cast<std::size_t>(ix)];
    }

    // Bilinear interpolation inside the stored extents. A point outside
    // (beyond a relative slack of 1e-12 for endpoint roundoff) is a
    // grid-mismatch error, never an extrapolation.
    double at(double x, double t) const {
        const double sx = 1e-12 * (grid.x_max - grid.x_min);
        const double st = 1e-12 * (t_grid.x_max - t_grid.x_min);
        if (x < grid.x_min - sx || x > grid.x_max + sx)
            fail(ErrorCode::GridMismatch,
                 "x = " + std::to_string(x) + " outside stored extent [" +
                     std::to_string(grid.x_min) + ", " + std::to_string(grid.x_max) + "]");
        if (t < t_grid.x_min - st || t > t_grid.x_max + st)
            fail(ErrorCode::GridMismatch,
                 "t = " + std::to_string(t) + " outside stored extent [" +
                     std::to_string(t_grid.x_min) + ", " + std::to_string(t_grid.x_max) + "]");
        auto locate = [](const Grid1D& g, double v) {
            int i = static_cast<int>((v - g.x_min) / g.step());
            if (i < 0) i = 0;
            if (i > g.n - 2) i = g.n - 2;
            double w = (v - g.node(i)) / g.step();
            if (w < 0.0) w = 0.0;
            if (w > 1.0) w = 1.0;
            return std::pair<int, double>(i, w);
        };
        const auto [ix, wx] = locate(grid, x);
        const auto [it, wt] = locate(t_grid, t);
        const double v00 = value(it, ix);
        const double v01 = value(it, ix + 1);
        const double v10 = value(it + 1, ix);
        const double v11 = value(it + 1, ix + 1);
        return (1.0 - wt) * ((1.0 - wx) * v00 + wx * v01) +
               wt * ((1.0 - wx) * v10 + wx * v11);
    }
};

namespace detail {

// Thomas algorithm; overwrites its scratch copies, O(n).
inline std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& upper,
                                             const std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n, 0.0), d(n, 0.0), x(n, 0.0);
    double den = diag[0];
    if (std::abs(den) < 1e-300)
        fail(ErrorCode::Instability, "tridiagonal solve hit a zero pivot at row 0");
    c[0] = upper[0] / den;
    d[0] = rhs[0] / den;
    for (std::size_t i = 1; i < n; ++i) {
        den = diag[i] - lower[i] * c[i - 1];
        if (std::abs(den) < 1e-300)
            fail(ErrorCode::Instability,
                 "tridiagonal solve hit a zero pivot at row " + std::to_string(i));
        c[i] = upper[i] / den;
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / den;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

inline void check_finite_slice(const std::vector<double>& v, double t) {
    for (double vi : v)
        if (!std::isfinite(vi))
            fail(ErrorCode::Instability,
                 "non-finite value in time march at t = " + std::to_string(t));
}

}  // namespace detail

// Crank-Nicolson for V_t = k * V_xx, marched forward from initial data at
// t_grid.x_min with Dirichlet values at both ends. Second order in space
// and time; quadratic-in-x, linear-in-t solutions are reproduced exactly up
// to roundoff because both the stencil and the trapezoidal time average are
// exact for them.
inline CNSolution cn_solve_heat(double k, const std::function<double(double)>& initial,
                                const std::function<double(double)>& left_bc,
                                const std::function<double(double)>& right_bc,
                                const Grid1D& grid, const Grid1D& t_grid) {
    if (!(k > 0.0))
        fail(ErrorCode::ParamDomain, "diffusivity k must be positive, got " + std::to_string(k));
    const int nx = grid.n;
    const int nt = t_grid.n;
    const double dx = grid.step();
    const double dt = t_grid.step();
    const double lam = k * dt / (dx * dx);

    CNSolution sol{grid, t_grid, std::vector<double>(static_cast<std::size_t>(nx) * nt, 0.0)};
    std::vector<double> cur(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) cur[static_cast<std::size_t>(i)] = initial(grid.node(i));
    std::copy(cur.begin(), cur.end(), sol.values.begin());

    std::vector<double> lower(static_cast<std::size_t>(nx), 0.0);
    std::vector<double> diag(static_cast<std::size_t>(nx), 1.0);
    std::vector<double> upper(static_cast<std::size_t>(nx), 0.0);
    for (int i = 1; i + 1 < nx; ++i) {
        lower[static_cast<std::size_t>(i)] = -0.5 * lam;
        diag[static_cast<std::size_t>(i)] = 1.0 + lam;
        upper[static_cast<std::size_t>(i)] = -0.5 * lam;
    }

    std::vector<double> rhs(static_cast<std::size_t>(nx));
    for (int m = 0; m + 1 < nt; ++m) {
        const double t_next = t_grid.node(m + 1);
        rhs[0] = left_bc(t_next);
        rhs[static_cast<std::size_t>(nx - 1)] = right_bc(t_next);
        for (int i = 1; i + 1 < nx; ++i)
            rhs[static_cast<std::size_t>(i)] =
                (1.0 - lam) * cur[static_cast<std::size_t>(i)] +
                0.5 * lam * (cur[static_cast<std::size_t>(i - 1)] +
                             cur[static_cast<std::size_t>(i + 1)]);
        cur = detail::solve_tridiagonal(lower, diag, upper, rhs);
        detail::check_finite_slice(cur, t_next);
        std::copy(cur.begin(), cur.end(),
                  sol.values.begin() + static_cast<std::size_t>(m + 1) * nx);
    }
    return sol;
}

// Crank-Nicolson for V_t + r*x*V_x + (sigma^2/2)*x^2*V_xx - r*V = 0 on
// x > 0, marched backward from terminal data at t_grid.x_max. The edge rows
// keep the PDE itself, with a one-sided first-order V_x and the diffusion
// term dropped (V_xx treated as 0 at the boundary). That keeps the system
// tridiagonal and is exact whenever the solution is linear in x near the
// edges, which covers both manufactured checks used by the benchmarks.
inline CNSolution cn_solve_rcd(double r, double sigma,
                               const std::function<double(double)>& terminal,
                               const Grid1D& grid, const Grid1D& t_grid) {
    if (!(sigma > 0.0))
        fail(ErrorCode::ParamDomain, "sigma must be positive, got " + std::to_string(sigma));
    if (!(grid.x_min > 0.0))
        fail(ErrorCode::ParamDomain,
             "spatial grid must satisfy x_min > 0, got " + std::to_string(grid.x_min));
    const int nx = grid.n;
    const int nt = t_grid.n;
    const double dx = grid.step();
    const double dt = t_grid.step();

    // Rows of the generator L: sub/diag/super such that (L V)_i =
    // sub_i V_{i-1} + d_i V_i + sup_i V_{i+1}.
    std::vector<double> Lsub(static_cast<std::size_t>(nx), 0.0);
    std::vector<double> Ldiag(static_cast<std::size_t>(nx), 0.0);
    std::vector<double> Lsup(static_cast<std::size_t>(nx), 0.0);
    for (int i = 1; i + 1 < nx; ++i) {
        const double x = grid.node(i);
        const double conv = r * x / (2.0 * dx);
        const double diff = 0.5 * sigma * sigma * x * x / (dx * dx);
        Lsub[static_cast<std::size_t>(i)] = diff - conv;
        Ldiag[static_cast<std::size_t>(i)] = -2.0 * diff - r;
        Lsup[static_cast<std::size_t>(i)] = diff + conv;
    }
    {
        const double x0 = grid.node(0);
        Ldiag[0] = -r * x0 / dx - r;
        Lsup[0] = r * x0 / dx;
        const double xn = grid.node(nx - 1);
        Lsub[static_cast<std::size_t>(nx - 1)] = -r * xn / dx;
        Ldiag[static_cast<std::size_t>(nx - 1)] = r * xn / dx - r;
    }

    // (I - dt/2 L) V^m = (I + dt/2 L) V^{m+1}.
    std::vector<double> Alow(static_cast<std::size_t>(nx)), Adiag(static_cast<std::size_t>(nx)),
        Aup(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) {
        const auto si = static_cast<std::size_t>(i);
        Alow[si] = -0.5 * dt * Lsub[si];
        Adiag[si] = 1.0 - 0.5 * dt * Ldiag[si];
        Aup[si] = -0.5 * dt * Lsup[si];
    }

    CNSolution sol{grid, t_grid, std::vector<double>(static_cast<std::size_t>(nx) * nt, 0.0)};
    std::vector<double> cur(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) cur[static_cast<std::size_t>(i)] = terminal(grid.node(i));
    std::copy(cur.begin(), cur.end(),
              sol.values.begin() + static_cast<std::size_t>(nt - 1) * nx);

    std::vector<double> rhs(static_cast<std::size_t>(nx));
    for (int m = nt - 2; m >= 0; --m) {
        for (int i = 0; i < nx; ++i) {
            const auto si = static_cast<std::size_t>(i);
            double lv = Ldiag[si] * cur[si];
            if (i > 0) lv += Lsub[si] * cur[si - 1];
            if (i + 1 < nx) lv += Lsup[si] * cur[si + 1];
            rhs[si] = cur[si] + 0.5 * dt * lv;
        }
        cur = detail::solve_tridiagonal(Alow, Adiag, Aup, rhs);
        detail::check_finite_slice(cur, t_grid.node(m));
        std::copy(cur.begin(), cur.end(),
                  sol.values.begin() + static_cast<std::size_t>(m) * nx);
    }
    return sol;
}

}  // namespace loglab
