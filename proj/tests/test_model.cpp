#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "gfchain/model.hpp"
#include "gfchain/quadrature.hpp"

namespace gfchain {
namespace {

const ModelSpec kLinear = ModelSpec::builtin(Builtin::example1);

TEST(Grid, MeshAndPoints) {
  const Grid g(2.0, 4);
  EXPECT_DOUBLE_EQ(g.h(), 0.5);
  EXPECT_EQ(g.chain_units(), 3u);
  EXPECT_NEAR(g.h() * static_cast<double>(g.n_x()), g.a(), 1e-15);
  EXPECT_DOUBLE_EQ(g.unit_left(3), 1.0);
  EXPECT_DOUBLE_EQ(g.unit_right(3), 1.5);
}

TEST(Grid, RejectsOddOrTinyCellCounts) {
  EXPECT_THROW(Grid(1.0, 3), ConfigError);
  EXPECT_THROW(Grid(1.0, 0), ConfigError);
  EXPECT_THROW(Grid(-1.0, 4), ConfigError);
  EXPECT_THROW(Grid::with_mesh(1.0, 0.3), ConfigError);
}

TEST(Grid, WarnsOnCoarseParameters) {
  EXPECT_TRUE(Grid(10.0, 100).warnings().empty());
  EXPECT_EQ(Grid(4.0, 2).warnings().size(), 2u);  // h = 2 > 1 and a <= 3h
  EXPECT_EQ(Grid(0.5, 2).warnings().size(), 1u);   // a <= 3h only
}

TEST(Grid, UnitsAreRightClosed) {
  const Grid g(10.0, 100);
  for (std::size_t j = 1; j <= 100; ++j) EXPECT_EQ(g.unit_of(g.point(j)), j) << j;
  EXPECT_EQ(g.unit_of(0.3), 3u);
  EXPECT_EQ(g.unit_of(0.30000000000000004), 3u);
  EXPECT_EQ(g.unit_of(0.3000001), 4u);
  EXPECT_THROW(g.unit_of(0.0), DomainError);
}

TEST(PrefixIntegral, LinearRateHandSums) {
  const auto p = prefix_integral(kLinear, Grid(2.0, 4));
  const std::vector<double> expected{0.0, 0.25, 0.75, 1.5, 2.5};
  ASSERT_EQ(p.size(), expected.size());
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], expected[k], 1e-15);
}

TEST(PrefixIntegral, ZeroTable) {
  const Grid g(2.0, 4);
  const auto zero = ModelSpec::tabulated({0.5, 1.0, 1.5, 2.0}, {0, 0, 0, 0});
  for (double v : prefix_integral(zero, g)) EXPECT_EQ(v, 0.0);
}

TEST(PrefixIntegral, SingularRateNeverEvaluatedAtZero) {
  const auto p = prefix_integral(ModelSpec::builtin(Builtin::example4), Grid(2.0, 4));
  // S(0.5)=3, S(1)=2, S(1.5)=5/3, S(2)=3/2, each weighted by h = 0.5
  const std::vector<double> expected{0.0, 1.5, 2.5, 2.5 + 5.0 / 6.0, 2.5 + 5.0 / 6.0 + 0.75};
  ASSERT_EQ(p.size(), expected.size());
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_NEAR(p[k], expected[k], 1e-12);
}

TEST(PrefixIntegral, NonFiniteRateNamesGridPoint) {
  const auto bad = ModelSpec::from_function("bad", [](double x) {
    return x > 1.2 ? std::numeric_limits<double>::infinity() : 1.0;
  });
  try {
    prefix_integral(bad, Grid(2.0, 4));
    FAIL() << "expected EvaluationError";
  } catch (const EvaluationError& e) {
    EXPECT_NE(std::string(e.what()).find("x_3=1.5"), std::string::npos) << e.what();
  }
}

TEST(TabulatedModel, OnlyAnswersAtItsAbscissae) {
  const auto t = ModelSpec::tabulated({1.0, 0.5}, {2.0, 3.0});
  EXPECT_DOUBLE_EQ(t.rate(0.5), 3.0);
  EXPECT_DOUBLE_EQ(t.rate(1.0), 2.0);
  EXPECT_THROW(t.rate(0.75), EvaluationError);
  EXPECT_THROW(prefix_integral(t, Grid(2.0, 4)), EvaluationError);
}

TEST(Lyapunov, ClosedFormForLinearRate) {
  EXPECT_DOUBLE_EQ(lyapunov_v(kLinear, 0.0, 1e-3), 1.0);
  EXPECT_NEAR(lyapunov_v(kLinear, 1.0, 1e-3), std::exp(0.5), 1e-12);
  EXPECT_NEAR(lyapunov_v(kLinear, 2.0, 1e-3), std::exp(2.0), 1e-11);
  EXPECT_NEAR(lyapunov_v(kLinear, 2.0, 1e-3), 7.38906, 1e-5);
}

TEST(Lyapunov, RefusedForSingularRate) {
  EXPECT_THROW(lyapunov_v(ModelSpec::builtin(Builtin::example4), 1.0, 1e-3), EvaluationError);
  EXPECT_THROW(continuous_pv(ModelSpec::builtin(Builtin::example4), 1.0, 1e-3), EvaluationError);
}

TEST(TailProbability, Basics) {
  EXPECT_DOUBLE_EQ(tail_probability(kLinear, 1.0, 0.5, 1e-3), 1.0);
  EXPECT_NEAR(tail_probability(kLinear, 1.0, 1.0, 1e-3), std::exp(-1.5), 1e-12);
  EXPECT_NEAR(tail_probability(kLinear, 1.0, 1.0, 1e-3), 0.22313, 1e-5);
  EXPECT_LE(tail_probability(kLinear, 1.0, 4.0, 1e-3), 1e-6);
  EXPECT_THROW(tail_probability(kLinear, 1.0, 0.49, 1e-3), DomainError);
}

TEST(TailProbability, MatchesClosedFormAndIsMonotone) {
  for (double x : {0.3, 1.0, 2.5}) {
    double prev = 1.0;
    for (double y = 0.5 * x; y < 0.5 * x + 3.0; y += 0.05) {
      const double t = tail_probability(kLinear, x, y, 1e-2);
      EXPECT_NEAR(t, std::exp(-(4 * y * y - x * x) / 2), 1e-8);
      EXPECT_LE(t, prev + 1e-15);
      prev = t;
    }
  }
}

TEST(Density, Values) {
  EXPECT_EQ(density_p(kLinear, 1.0, 0.25, 1e-3), 0.0);
  EXPECT_NEAR(density_p(kLinear, 1.0, 1.0, 1e-3), 4 * std::exp(-1.5), 1e-12);
  EXPECT_NEAR(density_p(kLinear, 1.0, 1.0, 1e-3), 0.89252, 1e-5);
  for (double y : {0.5, 0.8, 1.7, 2.2}) {
    EXPECT_NEAR(density_p(kLinear, 1.0, y, 1e-2), 4 * y * std::exp(-(4 * y * y - 1) / 2), 1e-8);
  }
}

TEST(Density, Normalizes) {
  detail::RateAntiderivative linear_s(kLinear, 1e-3);
  const double mass = quadrature::to_infinity(
      [&](double y) { return 2.0 * kLinear.rate(2.0 * y) * std::exp(-(linear_s(2.0 * y) - linear_s(1.0))); }, 0.5, 0.25);
  EXPECT_NEAR(mass, 1.0, 1e-6);
  const auto jump = ModelSpec::builtin(Builtin::example3);
  detail::RateAntiderivative big_s(jump, 1e-4);
  const double from_x = big_s(0.7);
  const double mass3 = quadrature::to_infinity(
      [&](double y) { return 2.0 * jump.rate(2.0 * y) * std::exp(-(big_s(2.0 * y) - from_x)); }, 0.35, 0.25);
  EXPECT_NEAR(density_p(jump, 0.7, 1.3, 1e-4), 2.0 * jump.rate(2.6) * std::exp(-(big_s(2.6) - from_x)), 1e-6);
  EXPECT_NEAR(mass3, 1.0, 1e-4);
}

// Central differences of the tail against the density, for a nonlinear S.
TEST(Density, IsNegativeDerivativeOfTail) {
  const auto lipschitz = ModelSpec::builtin(Builtin::example2);
  const double step = 1e-4;
  const double dy = 1e-3;
  for (double x : {0.4, 1.5}) {
    for (double y = 0.5 * x + 0.01; y < 0.5 * x + 1.5; y += 0.1) {
      const double fd = -(tail_probability(lipschitz, x, y + dy, step) - tail_probability(lipschitz, x, y - dy, step)) /
                        (2 * dy);
      const double p = density_p(lipschitz, x, y, step);
      if (std::abs(2 * y - 1.0) < 2 * dy) continue;  // kink of max(x, x^2)/x at 1
      EXPECT_LE(std::abs(fd - p), 1e-4 * p) << "x=" << x << " y=" << y;
    }
  }
}

TEST(ContinuousPV, LinearRateClosedForm) {
  // PV(x) = V(x) (4/3) exp(-1.5 (x/2)^2) for S(x) = x.
  for (double x : {1.0, 2.0, 4.0}) {
    const double pv = continuous_pv(kLinear, x, 1e-3);
    const double exact = std::exp(0.5 * x * x) * 4.0 / 3.0 * std::exp(-1.5 * 0.25 * x * x);
    EXPECT_NEAR(pv / exact, 1.0, 1e-8) << x;
  }
  EXPECT_LE(continuous_pv(kLinear, 4.0, 1e-3), 1.05 * 4.0 / 3.0 * lyapunov_v(kLinear, 4.0, 1e-3) * std::exp(-6.0));
}

TEST(ContinuousPV, HalfStepSelfConsistency) {
  const auto jump = ModelSpec::builtin(Builtin::example3);
  const double coarse = continuous_pv(jump, 1.0, 2e-3);
  const double fine = continuous_pv(jump, 1.0, 1e-3);
  EXPECT_NEAR(coarse, fine, 1e-4 * fine);
  EXPECT_NEAR(continuous_pv(kLinear, 1.0, 2e-3), continuous_pv(kLinear, 1.0, 1e-3), 1e-4);
}

TEST(ContinuousPV, ConstantRateIsFinite) {
  const auto flat = ModelSpec::from_function("const", [](double) { return 2.0; });
  const double pv = continuous_pv(flat, 3.0, 1e-2);
  EXPECT_TRUE(std::isfinite(pv));
  EXPECT_GT(pv, 0.0);
  // S = c: V(y) = e^{cy}, p(x,y) = 2c e^{-c(2y-x)}, so PV(x) = 2 e^{cx/2}.
  EXPECT_NEAR(pv, 2.0 * std::exp(3.0), 1e-8 * pv);
}

TEST(GrowthParams, ConstantsForQuadraticFragmentation) {
  const GrowthParams g{1, 1, 2, 0};
  EXPECT_NEAR(g.c1(), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(g.c2(), 1.5, 1e-15);
}

TEST(GrowthParams, CheckedOnLattice) {
  EXPECT_NO_THROW(kLinear.with_growth({1, 1, 2, 0}));
  EXPECT_THROW(kLinear.with_growth({1.5, 2, 2, 0}), ConfigError);
  // S = max(1, x) grows like x only above 1
  const auto lip = ModelSpec::builtin(Builtin::example2);
  EXPECT_THROW(lip.with_growth({1, 1, 2, 0}), ConfigError);
  EXPECT_NO_THROW(lip.with_growth({1, 1, 2, 1}));
}

TEST(Quadrature, MidpointCheckedEstimate) {
  const auto est = quadrature::midpoint_checked([](double t) { return t * t; }, 0.0, 1.0, 0.1);
  EXPECT_NEAR(est.value, 1.0 / 3.0, 1e-3);
  EXPECT_NEAR(std::abs(est.value - 1.0 / 3.0), est.error, 1e-6);
}

}  // namespace
}  // namespace gfchain
