#include <gtest/gtest.h>

#include <cmath>

#include "loglab/cn_solver.hpp"
#include "loglab/error.hpp"
#include "loglab/experiments.hpp"
#include "loglab/grid.hpp"

using namespace loglab;

TEST(Grid1D, NodesAndStep) {
  Grid1D g(0.5, 5.0, 10);
  EXPECT_DOUBLE_EQ(g.node(0), 0.5);
  EXPECT_DOUBLE_EQ(g.node(9), 5.0);  // endpoint exact, not x_min + 9*step
  EXPECT_DOUBLE_EQ(g.step(), 0.5);
  const auto nodes = g.nodes();
  ASSERT_EQ(nodes.size(), 10u);
  for (std::size_t i = 1; i < nodes.size(); ++i)
    EXPECT_LT(nodes[i - 1], nodes[i]);
}

TEST(Grid1D, Validation) {
  EXPECT_THROW(Grid1D(1.0, 1.0, 5), Error);
  EXPECT_THROW(Grid1D(2.0, 1.0, 5), Error);
  EXPECT_THROW(Grid1D(0.0, 1.0, 1), Error);
  EXPECT_THROW(Grid1D(std::nan(""), 1.0, 5), Error);
}

TEST(HeatSolver, ConstantStaysConstant) {
  auto one = [](double) { return 1.0; };
  const auto sol = cn_solve_heat(1.0, one, one, one, Grid1D(0.0, 1.0, 21),
                                 Grid1D(0.0, 0.5, 21));
  for (int it = 0; it < sol.t_grid.n; ++it)
    for (int ix = 0; ix < sol.grid.n; ++ix)
      EXPECT_NEAR(sol.value(it, ix), 1.0, 1e-13);
}

TEST(HeatSolver, ManufacturedQuadraticExact) {
  // x^2 + 2kt has V_t = 2k and V_xx = 2; both the stencil and the
  // trapezoidal time average are exact for it, so only roundoff remains.
  const double k = 0.7;
  auto exact = [&](double x, double t) { return x * x + 2.0 * k * t; };
  Grid1D gx(0.0, 1.0, 101), gt(0.0, 0.5, 101);
  const auto sol = cn_solve_heat(
      k, [&](double x) { return exact(x, 0.0); },
      [&](double t) { return exact(0.0, t); },
      [&](double t) { return exact(1.0, t); }, gx, gt);
  double worst = 0.0;
  for (int it = 0; it < gt.n; ++it)
    for (int ix = 0; ix < gx.n; ++ix)
      worst = std::max(worst,
                       std::abs(sol.value(it, ix) - exact(gx.node(ix), gt.node(it))));
  EXPECT_LE(worst, 1e-10);
}

TEST(HeatSolver, GaussianSelfConvergenceOrderNearTwo) {
  const double k = 1.0, t0 = 0.05;
  auto kernel = [&](double x, double t) {
    const double s = 4.0 * k * (t + t0);
    return std::exp(-(x - 0.5) * (x - 0.5) / s) / std::sqrt(M_PI * s);
  };
  auto solve = [&](int nx) {
    Grid1D gx(0.0, 1.0, nx), gt(0.0, 0.1, nx);
    const auto sol = cn_solve_heat(
        k, [&](double x) { return kernel(x, 0.0); },
        [&](double t) { return kernel(0.0, t); },
        [&](double t) { return kernel(1.0, t); }, gx, gt);
    std::vector<double> slice(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) slice[static_cast<std::size_t>(i)] = sol.value(gt.n - 1, i);
    return slice;
  };
  const auto st = detail::self_convergence(21, 4, solve);
  EXPECT_GE(st.observed_order, 1.5);
  EXPECT_LE(st.observed_order, 2.5);
}

TEST(HeatSolver, RejectsBadDiffusivityAndBlowups) {
  auto one = [](double) { return 1.0; };
  try {
    cn_solve_heat(0.0, one, one, one, Grid1D(0.0, 1.0, 11), Grid1D(0.0, 0.5, 11));
    FAIL() << "k <= 0 must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ParamDomain);
  }
  auto poison = [](double) { return std::nan(""); };
  try {
    cn_solve_heat(1.0, poison, one, one, Grid1D(0.0, 1.0, 11),
                  Grid1D(0.0, 0.5, 11));
    FAIL() << "non-finite march data must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::Instability);
  }
}

TEST(RcdSolver, LinearTerminalReproducedExactly) {
  // V = x kills V_t and V_xx and balances r x V_x against r V; it also makes
  // the one-sided edge rows exact, so the march preserves it to roundoff.
  const auto sol = cn_solve_rcd(0.05, 0.2, [](double x) { return x; },
                                Grid1D(0.5, 5.0, 101), Grid1D(0.0, 1.0, 101));
  double worst = 0.0;
  for (int it = 0; it < sol.t_grid.n; ++it)
    for (int ix = 0; ix < sol.grid.n; ++ix)
      worst = std::max(worst, std::abs(sol.value(it, ix) - sol.grid.node(ix)));
  EXPECT_LE(worst, 1e-10);
}

TEST(RcdSolver, ConstantDiscountTerminal) {
  // Terminal e^{rT}, exact solution e^{rt}: x-derivatives vanish and the
  // march reduces to the scalar CN discount recursion.
  const double r = 0.05, T = 1.0;
  const auto sol = cn_solve_rcd(r, 0.2, [&](double) { return std::exp(r * T); },
                                Grid1D(0.5, 5.0, 101), Grid1D(0.0, T, 101));
  double worst = 0.0;
  for (int it = 0; it < sol.t_grid.n; ++it) {
    const double want = std::exp(r * sol.t_grid.node(it));
    for (int ix = 0; ix < sol.grid.n; ++ix)
      worst = std::max(worst, std::abs(sol.value(it, ix) - want));
  }
  EXPECT_LE(worst, 1e-8);
}

TEST(RcdSolver, SmoothedPayoffSelfConvergenceOrderNearTwo) {
  const double r = 0.05, sigma = 0.2, K = 2.0, eps = 0.25;
  auto payoff = [&](double x) {
    const double d = x - K;
    return 0.5 * (d + std::sqrt(d * d + eps * eps));
  };
  auto solve = [&](int nx) {
    Grid1D gx(0.5, 8.0, nx), gt(0.0, 1.0, nx);
    const auto sol = cn_solve_rcd(r, sigma, payoff, gx, gt);
    std::vector<double> slice(static_cast<std::size_t>(nx));
    for (int i = 0; i < nx; ++i) slice[static_cast<std::size_t>(i)] = sol.value(0, i);
    return slice;
  };
  const auto st = detail::self_convergence(26, 4, solve);
  EXPECT_GE(st.observed_order, 1.5);
  EXPECT_LE(st.observed_order, 2.5);
}

TEST(RcdSolver, ParameterValidation) {
  auto idf = [](double x) { return x; };
  EXPECT_THROW(cn_solve_rcd(0.05, 0.0, idf, Grid1D(0.5, 5.0, 11),
                            Grid1D(0.0, 1.0, 11)),
               Error);
  try {
    cn_solve_rcd(0.05, 0.2, idf, Grid1D(0.0, 5.0, 11), Grid1D(0.0, 1.0, 11));
    FAIL() << "x_min <= 0 must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::ParamDomain);
  }
}

TEST(CNSolution, BilinearInterpolation) {
  // Linear-in-x data interpolates exactly anywhere inside the extents.
  const auto sol = cn_solve_rcd(0.05, 0.2, [](double x) { return x; },
                                Grid1D(0.5, 5.0, 41), Grid1D(0.0, 1.0, 41));
  for (double x : {0.5, 0.731, 2.1, 4.99, 5.0})
    for (double t : {0.0, 0.37, 1.0})
      EXPECT_NEAR(sol.at(x, t), x, 1e-10);
  try {
    sol.at(5.2, 0.5);
    FAIL() << "points beyond the stored extent must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::GridMismatch);
  }
  EXPECT_THROW(sol.at(2.0, -0.2), Error);
}

TEST(CNSolution, SchemeOrderAdvertised) {
  const auto sol = cn_solve_heat(1.0, [](double) { return 1.0; },
                                 [](double) { return 1.0; },
                                 [](double) { return 1.0; },
                                 Grid1D(0.0, 1.0, 11), Grid1D(0.0, 0.5, 11));
  EXPECT_EQ(sol.scheme_order.first, 2);
  EXPECT_EQ(sol.scheme_order.second, 2);
}

TEST(SelfConvergence, Validation) {
  auto dummy = [](int nx) { return std::vector<double>(static_cast<std::size_t>(nx), 0.0); };
  EXPECT_THROW(detail::self_convergence(21, 2, dummy), Error);
  EXPECT_THROW(detail::self_convergence(4, 3, dummy), Error);
}

TEST(Tridiagonal, SolvesAndDetectsZeroPivot) {
  // [2 1; 1 2] x = [3; 3] has x = [1; 1].
  const auto x = detail::solve_tridiagonal({0.0, 1.0}, {2.0, 2.0}, {1.0, 0.0},
                                           {3.0, 3.0});
  ASSERT_EQ(x.size(), 2u);
  EXPECT_NEAR(x[0], 1.0, 1e-14);
  EXPECT_NEAR(x[1], 1.0, 1e-14);
  try {
    detail::solve_tridiagonal({0.0}, {0.0}, {0.0}, {1.0});
    FAIL() << "zero pivot must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::Instability);
  }
}
