#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "loglab/expansion.hpp"
#include "loglab/error.hpp"

using namespace loglab;

namespace {

// Fixed-seed engines keep every run of the suite on the same draws.
std::mt19937_64 engine(20240817ull);

double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(engine);
}

}  // namespace

TEST(EvalTied1D, HandValues) {
  EXPECT_DOUBLE_EQ(eval(TiedLogExpansion1D{1.0, 2.0, 0.0}, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(eval(TiedLogExpansion1D{5.0, 0.0, 1.0}, 7.0), 5.0);
  EXPECT_DOUBLE_EQ(eval(TiedLogExpansion1D{0.0, 1.0, 1.0}, 0.0), 0.0);
  // a1 + a2 x + a2 (x+a3) ln(x+a3) at (1,1,1), x=1: 2 + 2 ln 2.
  EXPECT_NEAR(eval(TiedLogExpansion1D{1.0, 1.0, 1.0}, 1.0),
              3.3862943611198906, 1e-15);
}

TEST(EvalTied1D, RejectsLogDomain) {
  TiedLogExpansion1D e{0.0, 1.0, 0.0};
  try {
    eval(e, 0.0);
    FAIL() << "x + a3 == 0 must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::LogDomain);
  }
  EXPECT_THROW(eval(e, -1.0), Error);
}

TEST(EvalTied1D, RejectsNonFiniteFields) {
  EXPECT_THROW(eval(TiedLogExpansion1D{std::nan(""), 1.0, 0.0}, 1.0), Error);
  EXPECT_THROW(
      eval(TiedLogExpansion1D{0.0, std::numeric_limits<double>::infinity(), 0.0},
           1.0),
      Error);
}

TEST(EvalTied2D, HandValues) {
  EXPECT_DOUBLE_EQ(eval(TiedLogExpansion2D{0.0, 0.0, 2.0}, 1.0, 3.0), 6.0);
  EXPECT_DOUBLE_EQ(eval(TiedLogExpansion2D{1.0, 1.0, 0.0}, 1.0, 9.0), 2.0);
  EXPECT_DOUBLE_EQ(eval(TiedLogExpansion2D{0.0, 1.0, 1.0}, 0.0, 1.0), 1.0);
  // (1,1,1) at x=1, y=1 adds a3*y = 1 on top of the 1-D value.
  EXPECT_NEAR(eval(TiedLogExpansion2D{1.0, 1.0, 1.0}, 1.0, 1.0),
              4.386294361119891, 1e-15);
}

TEST(EvalTied2D, SharesShiftAndYCoefficient) {
  // a3 doubles as y-coefficient and log shift; no hidden fourth parameter.
  TiedLogExpansion2D e{0.3, -0.7, 1.5};
  TiedLogExpansion1D base{e.a1, e.a2, e.a3};
  for (double x : {0.1, 1.0, 2.5}) {
    for (double y : {-2.0, 0.0, 3.0}) {
      EXPECT_DOUBLE_EQ(eval(e, x, y), eval(base, x) + e.a3 * y);
    }
  }
}

TEST(Derivatives, HandValues) {
  EXPECT_DOUBLE_EQ(d_dx(TiedLogExpansion1D{0.0, 1.0, 0.0}, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(d_dx(TiedLogExpansion1D{0.0, 0.0, 5.0}, 1.0), 0.0);
  EXPECT_NEAR(d_dx(TiedLogExpansion1D{0.0, 1.0, 0.0}, std::exp(-2.0)), 0.0,
              1e-15);
  EXPECT_NEAR(d_dx(TiedLogExpansion1D{0.0, 1.0, 1.0}, 1.0),
              2.6931471805599454, 1e-15);

  EXPECT_DOUBLE_EQ(d_dt(TiedLogExpansion2D{0.0, 0.0, 4.0}), 4.0);
  EXPECT_DOUBLE_EQ(d_dt(TiedLogExpansion2D{0.0, 0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(d_dt(TiedLogExpansion2D{0.0, 0.0, -1.5}), -1.5);

  EXPECT_DOUBLE_EQ(d2_dx2(TiedLogExpansion1D{0.0, 2.0, 1.0}, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(d2_dx2(TiedLogExpansion1D{0.0, 0.0, 1.0}, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(d2_dx2(TiedLogExpansion1D{0.0, 1.0, 0.0}, 4.0), 0.25);
}

TEST(Derivatives, MatchCentralDifferencesOfEval) {
  // 100 random parameter draws, 50 probe points each, relative error <= 1e-6.
  const double h = 1e-5;
  for (int draw = 0; draw < 100; ++draw) {
    TiedLogExpansion2D e{uniform(-3.0, 3.0), uniform(-2.0, 2.0),
                         uniform(0.5, 4.0)};
    double lo = std::max(0.5 - e.a3, 0.0) + 0.5;
    for (int j = 0; j < 50; ++j) {
      double x = uniform(lo, 5.0);
      double t = uniform(0.0, 1.0);

      double fd_x = (eval(e, x + h, t) - eval(e, x - h, t)) / (2.0 * h);
      double an_x = d_dx(e, x);
      EXPECT_NEAR(an_x, fd_x, 1e-6 * std::max(1.0, std::abs(fd_x)));

      double fd_t = (eval(e, x, t + h) - eval(e, x, t - h)) / (2.0 * h);
      EXPECT_NEAR(d_dt(e), fd_t, 1e-6 * std::max(1.0, std::abs(fd_t)));
    }
  }
}

TEST(Derivatives, SecondDerivativeChainConsistency) {
  // d2_dx2 against a central difference of d_dx (chain consistency).
  const double h = 1e-5;
  for (int draw = 0; draw < 100; ++draw) {
    TiedLogExpansion1D e{uniform(-3.0, 3.0), uniform(-2.0, 2.0),
                         uniform(0.5, 4.0)};
    double lo = std::max(0.5 - e.a3, 0.0) + 0.5;
    for (int j = 0; j < 50; ++j) {
      double x = uniform(lo, 5.0);
      double fd = (d_dx(e, x + h) - d_dx(e, x - h)) / (2.0 * h);
      double an = d2_dx2(e, x);
      EXPECT_NEAR(an, fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST(DerivationConstants, Validation) {
  EXPECT_NO_THROW((DerivationConstants{1.0, 1.0, 0.0, 1.0}));
  try {
    DerivationConstants d{0.0, 1.0, 0.0, 1.0};
    (void)d;
    FAIL() << "c == 0 must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::CZero);
  }
  try {
    DerivationConstants d{1.0, 0.0, 0.0, 1.0};
    (void)d;
    FAIL() << "alpha <= 0 must be rejected";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::InvalidConstants);
  }
  EXPECT_THROW((DerivationConstants{1.0, -2.0, 0.0, 1.0}), Error);
  EXPECT_THROW((DerivationConstants{1.0, std::nan(""), 0.0, 1.0}), Error);
}

TEST(RemainderClosedForm, HandValues) {
  EXPECT_DOUBLE_EQ(
      remainder_closed_form(DerivationConstants{1.0, 1.0, 0.0, 0.0}, 3.0), 0.0);
  EXPECT_DOUBLE_EQ(
      remainder_closed_form(DerivationConstants{1.0, 1.0, 0.0, 1.0}, 1.0), 0.0);
  EXPECT_NEAR(
      remainder_closed_form(DerivationConstants{1.0, 1.0, 0.0, 1.0}, 2.0),
      1.0 - 2.0 * std::log(2.0), 1e-15);
}

TEST(RemainderClosedForm, RejectsShiftedLogDomain) {
  DerivationConstants d{1.0, 0.5, 0.0, 1.0};
  // x - c + alpha <= 0 at x <= 0.5.
  EXPECT_THROW(remainder_closed_form(d, 0.5), Error);
  EXPECT_NO_THROW(remainder_closed_form(d, 0.5000001));
}

TEST(RemainderClosedForm, VanishesAtExpansionPoint) {
  // 1000 random valid constant sets; R1(c) collapses to an exact cancellation.
  for (int i = 0; i < 1000; ++i) {
    double c = uniform(-5.0, 5.0);
    if (c == 0.0) c = 1.0;
    DerivationConstants d{c, uniform(0.1, 10.0), uniform(-3.0, 3.0),
                          uniform(-10.0, 10.0)};
    EXPECT_LE(std::abs(remainder_closed_form(d, d.c)), 1e-12);
  }
}

TEST(ExpansionFromDerivation, DegenerateExamples) {
  auto zero = expansion_from_derivation(DerivationConstants{1.0, 1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(zero.b1, 0.0);
  EXPECT_DOUBLE_EQ(zero.bL, 0.0);
  for (double x : {1.0, 1.5, 2.0, 3.0}) EXPECT_DOUBLE_EQ(eval(zero, x), 0.0);

  auto konst = expansion_from_derivation(DerivationConstants{1.0, 1.0, 3.0, 0.0});
  for (double x : {1.0, 1.5, 2.0, 3.0}) EXPECT_DOUBLE_EQ(eval(konst, x), 3.0);
}

TEST(ExpansionFromDerivation, MatchesFirstOrderPlusRemainder) {
  // The constructed ansatz must reproduce f(c) + f'(c)(x-c) + R1(x) pointwise.
  DerivationConstants unit{1.0, 1.0, 0.0, 1.0};
  auto g = expansion_from_derivation(unit);
  for (double x : {1.0, 1.5, 2.0}) {
    double direct = unit.fprime_c * (x - unit.c) + remainder_closed_form(unit, x);
    EXPECT_NEAR(eval(g, x), direct, 1e-12);
  }

  for (int i = 0; i < 1000; ++i) {
    double c = uniform(-4.0, 4.0);
    if (c == 0.0) c = 0.5;
    DerivationConstants d{c, uniform(0.2, 5.0), uniform(-3.0, 3.0),
                          uniform(-5.0, 5.0)};
    auto gg = expansion_from_derivation(d);
    // Keep x - c + alpha comfortably positive.
    double x = d.c - 0.9 * d.alpha + uniform(0.0, 4.0);
    double direct =
        d.f_c + d.fprime_c * (x - d.c) + remainder_closed_form(d, x);
    EXPECT_NEAR(eval(gg, x), direct,
                1e-12 * std::max(1.0, std::abs(direct)));
  }
}

TEST(ExpansionFromDerivation, CoefficientStructure) {
  // Symbolic expansion of the substituted remainder: the log coefficient is
  // -f'(c) while the linear coefficient is +2 f'(c), so the gap is 3|f'(c)|.
  DerivationConstants d{2.0, 0.7, 1.3, -1.8};
  auto g = expansion_from_derivation(d);
  EXPECT_NEAR(g.bL, -d.fprime_c, 1e-15);
  EXPECT_NEAR(g.b1, 2.0 * d.fprime_c, 1e-15);
  EXPECT_NEAR(g.s, d.alpha - d.c, 1e-15);
  EXPECT_NEAR(std::abs(g.b1 - g.bL), 3.0 * std::abs(d.fprime_c), 1e-12);
  EXPECT_FALSE(is_tied(g, 1e-12));
}

TEST(ExpansionFromDerivation, TieGapAuditIsDeterministicAndFinite) {
  for (int i = 0; i < 200; ++i) {
    double c = uniform(-4.0, 4.0);
    if (c == 0.0) c = 0.5;
    DerivationConstants d{c, uniform(0.2, 5.0), uniform(-3.0, 3.0),
                          uniform(0.1, 5.0)};
    auto g1 = expansion_from_derivation(d);
    auto g2 = expansion_from_derivation(d);
    double gap1 = std::abs(g1.b1 - g1.bL);
    double gap2 = std::abs(g2.b1 - g2.bL);
    EXPECT_TRUE(std::isfinite(gap1));
    EXPECT_EQ(gap1, gap2);
  }
}

TEST(GeneralLogAnsatz, EmbeddingRoundTrip) {
  TiedLogExpansion1D e{0.4, -1.3, 2.2};
  GeneralLogAnsatz g = to_general(e);
  EXPECT_DOUBLE_EQ(g.b0, e.a1);
  EXPECT_DOUBLE_EQ(g.b1, e.a2);
  EXPECT_DOUBLE_EQ(g.bL, e.a2);
  EXPECT_DOUBLE_EQ(g.s, e.a3);
  EXPECT_TRUE(is_tied(g, 0.0));
  for (int i = 0; i < 100; ++i) {
    double x = uniform(-2.1, 5.0);
    EXPECT_NEAR(eval(g, x), eval(e, x), 1e-15 * std::max(1.0, std::abs(eval(e, x))));
  }
}

TEST(IsTied, HandValues) {
  EXPECT_TRUE(is_tied(GeneralLogAnsatz{0.0, 2.0, 2.0, 1.0}, 1e-12));
  EXPECT_FALSE(is_tied(GeneralLogAnsatz{0.0, 2.0, -1.0, 1.0}, 1e-12));
  EXPECT_THROW(is_tied(GeneralLogAnsatz{0.0, 2.0, 2.0, 1.0}, -1.0), Error);
}
