#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sqz/metrics.hpp"
#include "sqz/qubit_dynamics.hpp"

using namespace sqz;

namespace {

void expect_bloch_near(const BlochVector& a, const BlochVector& b, double tol) {
  EXPECT_NEAR(a.p_ee, b.p_ee, tol);
  EXPECT_NEAR(a.p_eg, b.p_eg, tol);
  EXPECT_NEAR(a.p_ge, b.p_ge, tol);
  EXPECT_NEAR(a.coh, b.coh, tol);
}

BlochVector oracle_rhs(const BlochVector& v, const BathParams& bath) {
  const oracle::M4 d = oracle::lindblad(embed_density(v).rho, bath.n, bath.m);
  return {d(kEE, kEE).real(), d(kEG, kEG).real(), d(kGE, kGE).real(), d(kEE, kGG).real()};
}

}  // namespace

TEST(BlochRhs, VacuumGroundIsStationary) {
  expect_bloch_near(bloch_rhs(BlochVector::ground(), {0.0, 0.0}), {}, 0.0);
}

TEST(BlochRhs, FromGround) {
  const BathParams bath{0.7, 0.79};
  expect_bloch_near(bloch_rhs(BlochVector::ground(), bath), {0.0, 0.7, 0.7, 0.79}, 1e-15);
}

TEST(BlochRhs, FromDoublyExcited) {
  // The coherence derivative comes out as +M: the population terms drive
  // coh through M (1 - 2 p_ge - 2 p_eg), which equals M at |ee>.
  const BathParams bath{0.7, 0.79};
  expect_bloch_near(bloch_rhs(BlochVector::excited(), bath), {-3.4, 1.7, 1.7, 0.79}, 1e-15);
}

TEST(BlochRhs, MatchesFullLindbladOnXStates) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const BathParams bath = oracle::random_bath(rng, 3.0);
    const BlochVector v = oracle::random_x_state(rng);
    expect_bloch_near(bloch_rhs(v, bath), oracle_rhs(v, bath), 1e-13);
  }
}

TEST(BlochRhs, DecoupledElementsStayZero) {
  std::mt19937_64 rng(22);
  const BathParams bath{0.9, 1.0};
  const BlochVector v = oracle::random_x_state(rng);
  const oracle::M4 d = oracle::lindblad(embed_density(v).rho, bath.n, bath.m);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const bool tracked = i == j || (i == kEE && j == kGG) || (i == kGG && j == kEE);
      if (!tracked) EXPECT_EQ(std::abs(d(i, j)), 0.0) << i << j;
    }
}

TEST(BlochRhs, TracePreserving) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const BlochVector v = oracle::random_x_state(rng);
    const BathParams bath = oracle::random_bath(rng);
    const BlochVector d = bloch_rhs(v, bath);
    const oracle::M4 full = oracle::lindblad(embed_density(v).rho, bath.n, bath.m);
    EXPECT_NEAR(std::abs(full.trace()), 0.0, 1e-14);
    // p_gg is implied; its rate must match the oracle's gg element.
    EXPECT_NEAR(-(d.p_ee + d.p_eg + d.p_ge), full(kGG, kGG).real(), 1e-13);
  }
}

TEST(Evolve, MatchesDirectDensityMatrixIntegration) {
  const BathParams bath{0.7, 1.0};
  const std::vector<double> grid = uniform_grid(4.0, 8);
  for (InitialState init : {InitialState::kGG, InitialState::kEE, InitialState::kEG}) {
    const Trajectory tr = evolve(init, bath, grid);
    const auto f = [&](double, const Eigen::Matrix4cd& r) -> Eigen::Matrix4cd {
      return oracle::lindblad(r, bath.n, bath.m);
    };
    const auto ref = integrate<Eigen::Matrix4cd>(f, embed_density(initial_bloch(init)).rho, grid);
    for (std::size_t k = 0; k < grid.size(); ++k)
      EXPECT_LT((tr.states[k].rho - ref[k]).cwiseAbs().maxCoeff(), 1e-8) << k;
  }
}

TEST(Evolve, FiniteDifferenceAgreesWithRhs) {
  const BathParams bath{0.3, 0.5};
  const double h = 1e-4;
  const std::vector<double> grid{0.0, h};
  const BlochVector v0{0.2, 0.3, 0.1, 0.05};
  const Trajectory tr = evolve(v0, bath, grid);
  const BlochVector d = bloch_rhs(v0, bath);
  EXPECT_NEAR((tr.bloch[1].p_ee - v0.p_ee) / h, d.p_ee, 1e-3);
  EXPECT_NEAR((tr.bloch[1].coh - v0.coh) / h, d.coh, 1e-3);
}

TEST(Evolve, SteadyStateIsFixedPoint) {
  const BathParams bath{0.7, 0.95};
  const BlochVector ss = steady_state(bath);
  const Trajectory tr = evolve(ss, bath, uniform_grid(10.0, 20));
  for (const auto& v : tr.bloch) expect_bloch_near(v, ss, 1e-8);
}

TEST(Evolve, PureSteadyStateApproached) {
  const BathParams bath = BathParams::minimum_uncertainty(0.7);
  const Trajectory tr = evolve(InitialState::kGG, bath, uniform_grid(60.0, 60));
  EXPECT_LT(linear_entropy(tr.states.back()), 1e-6);
}

TEST(Evolve, TransientEntanglementBelowBoundary) {
  const Trajectory tr = evolve(InitialState::kGG, {0.7, 0.79}, uniform_grid(10.0, 200));
  double peak = 0.0;
  for (const auto& s : tr.states) peak = std::max(peak, negativity(s));
  EXPECT_GT(peak, 0.0);
  const Trajectory late = evolve(InitialState::kGG, {0.7, 0.79}, uniform_grid(60.0, 6));
  EXPECT_EQ(negativity(late.states.back()), 0.0);
}

TEST(Evolve, FixedStepModeAgrees) {
  EvolveOptions fixed;
  fixed.integrator.mode = StepMode::kFixed;
  const std::vector<double> grid = uniform_grid(3.0, 6);
  const Trajectory a = evolve(InitialState::kEE, {0.5, 0.6}, grid, fixed);
  const Trajectory b = evolve(InitialState::kEE, {0.5, 0.6}, grid);
  for (std::size_t k = 0; k < grid.size(); ++k) expect_bloch_near(a.bloch[k], b.bloch[k], 1e-10);
}

TEST(Evolve, RejectsBadInput) {
  const std::vector<double> shifted{0.5, 1.0};
  EXPECT_THROW(evolve(InitialState::kGG, {0.5, 0.1}, shifted), ConfigError);
  EXPECT_THROW(evolve(InitialState::kGG, {0.5, 0.9}, uniform_grid(1.0, 2)), Unphysical);
  EXPECT_THROW(evolve(BlochVector{0.5, 0.0, 0.0, 0.6}, {0.5, 0.1}, uniform_grid(1.0, 2)),
               PositivityViolation);
}

TEST(SteadyState, VacuumIsGround) {
  expect_bloch_near(steady_state({0.0, 0.0}), BlochVector::ground(), 0.0);
}

TEST(SteadyState, ResidualVanishes) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const BathParams bath = oracle::random_bath(rng, 10.0);
    const Eigen::Vector4d r = bloch_rhs(steady_state(bath).to_vector(), bath);
    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-12) << bath.n << " " << bath.m;
  }
}

TEST(SteadyState, PureAtMinimumUncertainty) {
  for (double n : {0.7, 0.9}) {
    const TwoQubitState s = reconstruct_density(steady_state(BathParams::minimum_uncertainty(n)));
    EXPECT_LT(linear_entropy(s), 1e-6);
    EXPECT_TRUE(s.is_valid());
  }
}

TEST(SteadyState, ThermalBathGivesProductState) {
  // M = 0: each atom independently thermal with p_e = N / (2N+1).
  const double n = 0.4;
  const BlochVector ss = steady_state({n, 0.0});
  const double pe = n / (2.0 * n + 1.0);
  EXPECT_NEAR(ss.p_ee, pe * pe, 1e-14);
  EXPECT_NEAR(ss.p_eg, pe * (1.0 - pe), 1e-14);
  EXPECT_NEAR(ss.coh, 0.0, 1e-15);
}

TEST(Reconstruct, Examples) {
  const TwoQubitState g = reconstruct_density(BlochVector::ground());
  EXPECT_EQ(g.rho(kGG, kGG), cplx(1.0));
  EXPECT_EQ(g.rho.cwiseAbs().sum(), 1.0);
  const TwoQubitState e = reconstruct_density(BlochVector::excited());
  EXPECT_EQ(e.rho(kEE, kEE), cplx(1.0));
  EXPECT_EQ(e.rho.cwiseAbs().sum(), 1.0);
}

TEST(Reconstruct, RejectsNonPositive) {
  EXPECT_THROW(reconstruct_density({0.3, 0.0, 0.0, 0.6}), PositivityViolation);
  EXPECT_NO_THROW(embed_density({0.3, 0.0, 0.0, 0.6}));
}

TEST(ExtractBloch, RoundTripAndRejection) {
  const BlochVector v{0.1, 0.2, 0.3, 0.15};
  expect_bloch_near(extract_bloch(embed_density(v)), v, 1e-15);
  TwoQubitState s = embed_density(v);
  s.rho(kEG, kGE) = s.rho(kGE, kEG) = 0.05;
  EXPECT_THROW(extract_bloch(s), UnsupportedInitialState);
  TwoQubitState c = embed_density(v);
  c.rho(kEE, kGG) = cplx(0.1, 0.05);
  EXPECT_THROW(extract_bloch(c), UnsupportedInitialState);
}

TEST(InitialStates, ParseAndPrint) {
  for (auto s : {InitialState::kGG, InitialState::kEE, InitialState::kEG, InitialState::kGE})
    EXPECT_EQ(parse_initial_state(to_string(s)), s);
  EXPECT_THROW(parse_initial_state("bell"), ConfigError);
  expect_bloch_near(initial_bloch(InitialState::kGE), {0.0, 0.0, 1.0, 0.0}, 0.0);
}

TEST(UniformGrid, EndpointsAndValidation) {
  const auto g = uniform_grid(5.0, 4);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_EQ(g.back(), 5.0);
  EXPECT_THROW(uniform_grid(0.0, 3), ConfigError);
  EXPECT_THROW(uniform_grid(1.0, 0), ConfigError);
}
