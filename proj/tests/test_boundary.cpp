#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "sqz/boundary.hpp"

using namespace sqz;

TEST(BoundaryNumeric, BracketedByFigureCurves) {
  const double b = boundary_numeric(0.7);
  EXPECT_GT(b, 0.79);
  EXPECT_LT(b, 1.09);
  EXPECT_NEAR(b, 0.902, 5e-4);
}

TEST(BoundaryNumeric, BelowPhysicalLimit) {
  for (double n : {0.01, 0.1, 0.7, 1.0, 5.0, 10.0, 50.0}) {
    const double b = boundary_numeric(n);
    EXPECT_LE(b, std::sqrt(n * (n + 1.0))) << n;
    EXPECT_GT(b, 0.0) << n;
  }
}

TEST(BoundaryNumeric, BracketingOracle) {
  for (double n : {0.1, 0.7, 2.0, 10.0}) {
    const double b = boundary_numeric(n);
    EXPECT_GT(steady_negativity({n, b + 0.01}), 0.0) << n;
    EXPECT_EQ(steady_negativity({n, std::max(0.0, b - 0.01)}), 0.0) << n;
  }
}

TEST(BoundaryNumeric, ZeroOccupation) {
  EXPECT_EQ(boundary_numeric(0.0), 0.0);
  // the n -> 0 limit is continuous
  EXPECT_LT(boundary_numeric(1e-8), 1e-6);
}

TEST(BoundaryNumeric, RejectsNegative) { EXPECT_THROW(boundary_numeric(-0.1), NegativeParam); }

TEST(BoundaryNumeric, MonotoneInN) {
  double prev = 0.0;
  for (double n = 0.0; n <= 3.0; n += 0.1) {
    const double b = boundary_numeric(n);
    EXPECT_GE(b, prev - 1e-9) << n;
    prev = b;
  }
}

TEST(BoundaryNumeric, WindowShrinks) {
  std::vector<double> widths;
  for (double n : {1.0, 5.0, 10.0, 50.0}) widths.push_back(std::sqrt(n * (n + 1.0)) - boundary_numeric(n));
  for (std::size_t i = 1; i < widths.size(); ++i) EXPECT_LT(widths[i], widths[i - 1]);
}

TEST(SteadyNegativity, NonDecreasingInM) {
  for (double n : {0.05, 0.3, 0.7, 1.5, 4.0, 20.0}) {
    const double m_max = std::sqrt(n * (n + 1.0));
    double prev = 0.0;
    for (int j = 0; j <= 60; ++j) {
      const double e = steady_negativity({n, m_max * j / 60.0});
      EXPECT_GE(e, prev - 1e-12) << n << " " << j;
      prev = e;
    }
  }
}

TEST(ClosedForm, SquaredAlphaMatchesNumeric) {
  for (double n : {0.0, 0.01, 0.1, 0.7, 1.0, 5.0, 10.0, 50.0, 100.0})
    EXPECT_NEAR(boundary_closed_form(n), boundary_numeric(n), 1e-9) << n;
}

TEST(ClosedForm, LiteralReadings) {
  EXPECT_NEAR(boundary_closed_form(0.7, BoundaryReading::kVarianceOverFour), 0.9207, 1e-4);
  EXPECT_NEAR(boundary_closed_form(0.7, BoundaryReading::kInverseVariance), 0.9742, 1e-4);
  // Neither reading vanishes at n = 0, where the exact boundary does.
  EXPECT_GT(boundary_closed_form(0.0, BoundaryReading::kVarianceOverFour), 0.2);
  EXPECT_GT(boundary_closed_form(0.0, BoundaryReading::kInverseVariance), 0.2);
}

TEST(ClosedForm, ApproachesPhysicalLimit) {
  const double n = 1e4;
  const double limit = std::sqrt(n * (n + 1.0));
  EXPECT_LT(boundary_closed_form(n), limit);
  EXPECT_LT((limit - boundary_closed_form(n)) / limit, 1e-6);
}

TEST(ClosedForm, Names) {
  EXPECT_EQ(to_string(BoundaryReading::kSquaredAlpha), "squared_alpha");
  EXPECT_EQ(to_string(BoundaryReading::kVarianceOverFour), "variance_over_four");
  EXPECT_EQ(to_string(BoundaryReading::kInverseVariance), "inverse_variance");
}

TEST(SpontaneousEmission, ReducesToBareBoundary) {
  EXPECT_EQ(boundary_with_spontaneous_emission(0.7, {1.0, 10.0, 0.0}), boundary_numeric(0.7));
  EXPECT_NEAR(boundary_with_spontaneous_emission(0.7, {1.0, 10.0, 1e-9}), boundary_numeric(0.7), 1e-6);
}

TEST(SpontaneousEmission, MapsThroughEffectiveOccupation) {
  for (double n : {0.1, 0.7, 2.0})
    for (double gamma : {0.01, 0.2, 5.0}) {
      const SystemRates rates{1.0, 10.0, gamma};
      const double s = effective_bath({n, 0.0}, rates).n_eff / n;
      EXPECT_NEAR(boundary_with_spontaneous_emission(n, rates), boundary_numeric(s * n) / s, 1e-12);
    }
}

TEST(SpontaneousEmission, HighCooperativityRaisesThreshold) {
  for (double n : {0.7, 2.0, 10.0}) {
    double prev = boundary_numeric(n);
    for (double gamma : {0.001, 0.01, 0.05}) {
      const double b = boundary_with_spontaneous_emission(n, {1.0, 10.0, gamma});
      EXPECT_GT(b, prev) << n << " " << gamma;
      prev = b;
    }
  }
}

TEST(SpontaneousEmission, NotMonotoneInGamma) {
  // B(x) ~ x for small x, so strong emission pulls the threshold towards M = N.
  EXPECT_LT(boundary_with_spontaneous_emission(0.1, {1.0, 10.0, 0.05}), boundary_numeric(0.1));
  EXPECT_LT(boundary_with_spontaneous_emission(0.7, {1.0, 10.0, 1.0}), boundary_numeric(0.7));
  EXPECT_NEAR(boundary_with_spontaneous_emission(0.7, {1.0, 10.0, 1e4}), 0.7, 1e-3);
}

TEST(SpontaneousEmission, ConsistentWithEffectiveSteadyState) {
  const SystemRates rates{1.0, 10.0, 0.05};
  const double b = boundary_with_spontaneous_emission(2.0, rates);
  ASSERT_LT(b, std::sqrt(6.0));
  const auto entangled = [&](double m) {
    return steady_negativity(effective_bath({2.0, m}, rates).bath()) > 1e-12;
  };
  EXPECT_TRUE(entangled(b + 1e-3));
  EXPECT_FALSE(entangled(b - 1e-3));
}
