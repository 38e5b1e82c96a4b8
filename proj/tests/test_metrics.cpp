#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sqz/metrics.hpp"
#include "sqz/qubit_dynamics.hpp"

using namespace sqz;

namespace {

Matrix4c bell() {
  Matrix4c rho = Matrix4c::Zero();
  rho(kEE, kEE) = rho(kGG, kGG) = rho(kEE, kGG) = rho(kGG, kEE) = 0.5;
  return rho;
}

Eigen::Matrix2cd random_qubit_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd w;
  w << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
  Eigen::Matrix2cd r = w * w.adjoint();
  return r / r.trace();
}

Eigen::Matrix2cd random_unitary(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Matrix2cd w;
  w << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
  return Eigen::HouseholderQR<Eigen::Matrix2cd>(w).householderQ();
}

}  // namespace

TEST(PartialTranspose, ProductGroundIsInvariant) {
  const Matrix4c g = embed_density(BlochVector::ground()).rho;
  EXPECT_EQ(partial_transpose(g), g);
}

TEST(PartialTranspose, BellSpectrum) {
  const auto ev = partial_transpose_spectrum(bell()).eigenvalues;
  EXPECT_NEAR(ev(0), -0.5, 1e-14);
  for (int k = 1; k < 4; ++k) EXPECT_NEAR(ev(k), 0.5, 1e-14);
}

TEST(PartialTranspose, IndexRule) {
  std::mt19937_64 rng(1);
  const Matrix4c rho = oracle::random_density(rng);
  const Matrix4c pt = partial_transpose(rho);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int h = 0; h < 2; ++h)
        for (int k = 0; k < 2; ++k) EXPECT_EQ(pt(2 * i + j, 2 * h + k), rho(2 * i + k, 2 * h + j));
}

TEST(PartialTranspose, InvolutionIsExact) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix4c rho = oracle::random_density(rng);
    EXPECT_EQ(partial_transpose(partial_transpose(rho)), rho);
  }
}

TEST(PartialTranspose, PreservesTraceAndHermiticity) {
  std::mt19937_64 rng(3);
  const Matrix4c pt = partial_transpose(oracle::random_density(rng));
  EXPECT_NEAR(std::abs(pt.trace() - cplx(1.0)), 0.0, 1e-14);
  EXPECT_LT((pt - pt.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(PartialTranspose, XStateClosedForm) {
  // diag (a, b, c, g), ee-gg coherence d: PT spectrum {a, g, (b+c)/2 +- sqrt((b-c)^2/4 + d^2)}.
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const BlochVector v = oracle::random_x_state(rng);
    const double a = v.p_ee, b = v.p_eg, c = v.p_ge, g = v.p_gg(), d = v.coh;
    const double root = std::sqrt((b - c) * (b - c) / 4.0 + d * d);
    std::array<double, 4> expect{a, g, (b + c) / 2.0 + root, (b + c) / 2.0 - root};
    std::sort(expect.begin(), expect.end());
    const auto ev = partial_transpose_spectrum(embed_density(v).rho).eigenvalues;
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(ev(k), expect[k], 1e-12);
    const double closed = std::max(0.0, -2.0 * ((b + c) / 2.0 - root));
    EXPECT_NEAR(negativity(embed_density(v)), closed > 1e-12 ? closed : 0.0, 1e-10);
  }
}

TEST(Negativity, Examples) {
  EXPECT_NEAR(negativity(bell()), 1.0, 1e-10);
  EXPECT_EQ(negativity(embed_density(BlochVector::ground())), 0.0);
}

TEST(Negativity, ZeroOnProductStates) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix4c rho = oracle::kron(random_qubit_state(rng), random_qubit_state(rng));
    EXPECT_EQ(negativity(rho), 0.0);
  }
}

TEST(Negativity, LocalUnitaryInvariance) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix4c rho = oracle::random_density(rng);
    const Matrix4c u = oracle::kron(random_unitary(rng), random_unitary(rng));
    EXPECT_NEAR(negativity(u * rho * u.adjoint()), negativity(rho), 1e-9);
  }
}

TEST(Negativity, NonnegativeAndClampsRoundoff) {
  Matrix4c rho = embed_density(BlochVector{0.25, 0.25, 0.25, 0.25 + 1e-14}).rho;
  EXPECT_EQ(negativity(rho), 0.0);
}

TEST(LinearEntropy, PureAndMaximallyMixed) {
  EXPECT_LT(linear_entropy(bell()), 1e-12);
  EXPECT_LT(linear_entropy(embed_density(BlochVector::excited())), 1e-12);
  EXPECT_NEAR(linear_entropy(Matrix4c(Matrix4c::Identity() / 4.0)), 1.0, 1e-12);
}

TEST(LinearEntropy, GlobalUnitaryInvariance) {
  std::mt19937_64 rng(7);
  const Matrix4c rho = oracle::random_density(rng);
  std::normal_distribution<double> g;
  Matrix4c w;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) w(i, j) = cplx(g(rng), g(rng));
  const Matrix4c u = Eigen::HouseholderQR<Matrix4c>(w).householderQ();
  EXPECT_NEAR(linear_entropy(u * rho * u.adjoint()), linear_entropy(rho), 1e-12);
}

TEST(TraceDistance, Basics) {
  const Matrix4c g = embed_density(BlochVector::ground()).rho;
  const Matrix4c e = embed_density(BlochVector::excited()).rho;
  EXPECT_NEAR(trace_distance(g, e), 1.0, 1e-14);
  EXPECT_EQ(trace_distance(g, g), 0.0);
  EXPECT_NEAR(trace_distance(bell(), Matrix4c(Matrix4c::Identity() / 4.0)), 0.75, 1e-12);
}
