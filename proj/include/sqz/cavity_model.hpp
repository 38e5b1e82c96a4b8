// Unreduced model: two atoms, each Jaynes-Cummings coupled to its own cavity
// mode, with both modes damped into a broadband two-mode squeezed bath.
//
//   d rho/dt = -i [H_a1 + H_b2, rho] + L_cav rho (+ L_spont rho)
//
//   H_a1  = Omega (sigma1^+ a + a^H sigma1^-), likewise H_b2 with mode b
//   L_cav = sum_{x=a,b} 2kappa(N+1) D[x] + 2kappa N D[x^H]
//           + 2kappa M (a rho b + b rho a - a b rho - rho a b) + h.c.
//   L_spont = Gamma sum_i D[sigma_i^-]
//
// with D[J] rho = J rho J^H - {J^H J, rho}/2. Both modes are truncated at
// n_max photons. The state space is qubit1 (x) qubit2 (x) Fock_a (x) Fock_b,
// qubit order {e, g} so the atomic block order matches {ee, eg, ge, gg}.
//
// The generator is applied as a map with sparse left/right operator
// products; the D^2 x D^2 superoperator is never formed.

#ifndef SQZ_CAVITY_MODEL_HPP
#define SQZ_CAVITY_MODEL_HPP

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "sqz/core.hpp"
#include "sqz/ode.hpp"
#include "sqz/qubit_dynamics.hpp"

namespace sqz {

using SparseOp = Eigen::SparseMatrix<cplx>;
using DenseOp = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

struct TruncationOverflow : Error {
  TruncationOverflow(const std::string& what, double leakage_) : Error(what), leakage(leakage_) {}
  double leakage;
};

/// Population expected above the truncation for a squeezed bath:
/// tanh^(2 n_max + 2) r = (N / (N+1))^(n_max + 1).
struct TruncationBudget {
  int n_max = 4;
  double leakage_estimate = 0.0;

  static TruncationBudget for_bath(int n_max, const BathParams& bath) {
    if (n_max < 2) throw ConfigError("n_max must be at least 2");
    const double lambda2 = bath.n / (bath.n + 1.0);
    return {n_max, std::pow(lambda2, n_max + 1)};
  }
};

inline constexpr double kMaxTruncationLeakage = 1e-3;

struct FullTrajectory {
  std::vector<double> times;
  std::vector<DenseOp> states;
  double max_top_level_population = 0.0;
  double max_truncation_leakage = 0.0;
};

struct FullEvolveOptions {
  IntegratorOptions integrator{StepMode::kAdaptive, 1e-8, 1e-8};
  bool check_truncation = true;
};

class CavityModel {
 public:
  explicit CavityModel(int n_max) : n_max_(n_max), fock_(n_max + 1), dim_(4 * fock_ * fock_) {
    if (n_max < 2) throw ConfigError("n_max must be at least 2");
    build_operators();
  }

  [[nodiscard]] int n_max() const { return n_max_; }
  [[nodiscard]] int fock_dim() const { return fock_; }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }

  /// Basis index; qubit levels are 0 = e, 1 = g.
  [[nodiscard]] Eigen::Index index(int q1, int q2, int na, int nb) const {
    return ((q1 * 2 + q2) * fock_ + na) * fock_ + nb;
  }

  [[nodiscard]] const SparseOp& sigma_minus(int atom) const { return atom == 1 ? s1m_ : s2m_; }
  [[nodiscard]] const SparseOp& mode_a() const { return a_; }
  [[nodiscard]] const SparseOp& mode_b() const { return b_; }
  [[nodiscard]] const SparseOp& excitation_number() const { return n_exc_; }

  [[nodiscard]] SparseOp hamiltonian(double omega) const {
    SparseOp h = omega * (SparseOp(s1m_.adjoint()) * a_ + SparseOp(a_.adjoint()) * s1m_ +
                          SparseOp(s2m_.adjoint()) * b_ + SparseOp(b_.adjoint()) * s2m_);
    h.makeCompressed();
    return h;
  }

  [[nodiscard]] DenseOp hamiltonian_dense(const SystemRates& rates) const {
    return DenseOp(hamiltonian(rates.rabi_omega));
  }

  /// Cavity damping into the squeezed bath, acting on the full state.
  [[nodiscard]] DenseOp cavity_liouvillian(const DenseOp& rho, const BathParams& bath,
                                           double kappa) const {
    Generator g = make_generator(0.0, bath, kappa, 0.0);
    return g.apply(rho);
  }

  /// Gamma sum_i (sigma_i^- rho sigma_i^+ - {sigma_i^+ sigma_i^-, rho}/2).
  [[nodiscard]] DenseOp spontaneous_emission_terms(const DenseOp& rho, double gamma_atomic) const {
    Generator g = make_generator(0.0, {0.0, 0.0}, 0.0, gamma_atomic);
    return g.apply(rho);
  }

  /// Full right-hand side -i[H, rho] + L_cav rho + L_spont rho.
  [[nodiscard]] DenseOp generator(const DenseOp& rho, const SystemRates& rates,
                                  const BathParams& bath) const {
    return make_generator(rates.rabi_omega, bath, rates.cavity_kappa, rates.atomic_gamma)
        .apply(rho);
  }

  /// rho_atoms (x) |00><00|.
  [[nodiscard]] DenseOp with_cavity_vacuum(const Matrix4c& rho_atoms) const {
    DenseOp rho = DenseOp::Zero(dim_, dim_);
    const Eigen::Index block = static_cast<Eigen::Index>(fock_) * fock_;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) rho(i * block, j * block) = rho_atoms(i, j);
    return rho;
  }

  /// Partial trace over both cavity modes.
  [[nodiscard]] Matrix4c reduce_to_atoms(const DenseOp& rho) const {
    const Eigen::Index block = static_cast<Eigen::Index>(fock_) * fock_;
    Matrix4c out = Matrix4c::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (Eigen::Index k = 0; k < block; ++k) out(i, j) += rho(i * block + k, j * block + k);
    return out;
  }

  /// Photon-number distribution of one mode (0 for a, 1 for b).
  [[nodiscard]] Eigen::VectorXd photon_distribution(const DenseOp& rho, int mode) const {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(fock_);
    for (int q = 0; q < 4; ++q)
      for (int na = 0; na < fock_; ++na)
        for (int nb = 0; nb < fock_; ++nb) {
          const Eigen::Index i = index(q / 2, q % 2, na, nb);
          p(mode == 0 ? na : nb) += rho(i, i).real();
        }
    return p;
  }

  /// Largest population sitting in the top Fock level of either mode.
  [[nodiscard]] double top_level_population(const DenseOp& rho) const {
    return std::max(photon_distribution(rho, 0)(n_max_), photon_distribution(rho, 1)(n_max_));
  }

  /// Population that would sit above the truncation, extrapolating the photon
  /// distribution geometrically from its top two levels: p_top^2 / p_{top-1}.
  /// For a (truncated) squeezed thermal mode this is tanh^2 r * p_top.
  [[nodiscard]] double truncation_leakage(const DenseOp& rho) const {
    double worst = 0.0;
    for (int mode = 0; mode < 2; ++mode) {
      const Eigen::VectorXd p = photon_distribution(rho, mode);
      const double top = std::max(p(n_max_), 0.0);
      const double below = p(n_max_ - 1);
      const double ratio = below > top ? top / below : 1.0;
      worst = std::max(worst, top * ratio);
    }
    return worst;
  }

  /// Expectation Tr(op rho).
  [[nodiscard]] static cplx expectation(const SparseOp& op, const DenseOp& rho) {
    return (op * rho).trace();
  }

  /// (sqrt((N+1)/(2N+1)) |gg> + sqrt(N/(2N+1)) |ee>) (x) |00>.
  [[nodiscard]] StateVector trap_state(const BathParams& bath) const {
    StateVector psi = StateVector::Zero(dim_);
    const double denom = 2.0 * bath.n + 1.0;
    psi(index(1, 1, 0, 0)) = std::sqrt((bath.n + 1.0) / denom);
    psi(index(0, 0, 0, 0)) = std::sqrt(bath.n / denom);
    return psi;
  }

  /// S(r) = exp(r (a^H b^H - a b)) projected onto the truncated space. The exponential
  /// is taken on a padded Fock space; exponentiating the generator truncated at n_max
  /// itself leaves errors of order tanh^n_max r on the low levels.
  [[nodiscard]] DenseOp squeeze_operator(double r) const {
    const CavityModel big(padded_n_max());
    return project_from(big, big.unpadded_squeeze(r));
  }

  /// rho -> S(r) rho S(r)^H.
  [[nodiscard]] DenseOp squeeze_transform(const DenseOp& rho, double r) const {
    const DenseOp s = squeeze_operator(r);
    return s * rho * s.adjoint();
  }

  /// H~ = S(r) H S(r)^H, formed on the padded space and projected.
  [[nodiscard]] DenseOp transformed_hamiltonian(const SystemRates& rates, double r) const {
    const CavityModel big(padded_n_max());
    const DenseOp s = big.unpadded_squeeze(r);
    return project_from(big, s * big.hamiltonian_dense(rates) * s.adjoint());
  }

  /// exp of the squeezing generator truncated at this model's n_max, without padding.
  [[nodiscard]] DenseOp unpadded_squeeze(double r) const {
    const Eigen::Index fd = static_cast<Eigen::Index>(fock_) * fock_;
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(fd, fd);
    for (int na = 0; na + 1 < fock_; ++na)
      for (int nb = 0; nb + 1 < fock_; ++nb) {
        // a^H b^H |na, nb> = sqrt((na+1)(nb+1)) |na+1, nb+1>
        const double amp = std::sqrt((na + 1.0) * (nb + 1.0));
        gen((na + 1) * fock_ + nb + 1, na * fock_ + nb) += r * amp;
        gen(na * fock_ + nb, (na + 1) * fock_ + nb + 1) -= r * amp;
      }
    const Eigen::MatrixXd field = gen.exp();
    DenseOp s = DenseOp::Zero(dim_, dim_);
    for (int q = 0; q < 4; ++q) s.block(q * fd, q * fd, fd, fd) = field.cast<cplx>();
    return s;
  }

  /// max |S^H S - 1| on the low-excitation subspace (at most n_max / 2 photons per mode).
  [[nodiscard]] double unitarity_defect(double r) const {
    const DenseOp s = squeeze_operator(r);
    const DenseOp u = s.adjoint() * s - DenseOp::Identity(dim_, dim_);
    double worst = 0.0;
    for (int q = 0; q < 4; ++q)
      for (int na = 0; na <= n_max_ / 2; ++na)
        for (int nb = 0; nb <= n_max_ / 2; ++nb) {
          const Eigen::Index i = index(q / 2, q % 2, na, nb);
          worst = std::max(worst, u.col(i).cwiseAbs().maxCoeff());
        }
    return worst;
  }

  /// sum_i <Psi| C_i rho C_i^H |Psi> with C_1 = sqrt(kappa) a, C_2 = sqrt(kappa) b.
  /// rho is taken in the squeezed frame, where the trap state is dark.
  [[nodiscard]] double trap_population_rate(const DenseOp& rho, const BathParams& bath,
                                            double kappa) const {
    const StateVector psi = trap_state(bath);
    double rate = 0.0;
    for (const SparseOp* c : {&a_, &b_}) {
      const StateVector w = SparseOp(c->adjoint()) * psi;  // C^H |Psi> / sqrt(kappa)
      rate += kappa * (w.adjoint() * rho * w)(0, 0).real();
    }
    return rate;
  }

  /// Integrates the full master equation over t_grid (physical time, starting at 0).
  [[nodiscard]] FullTrajectory evolve_full(const DenseOp& rho0, const SystemRates& rates,
                                       const BathParams& bath, std::span<const double> t_grid,
                                       const FullEvolveOptions& opt = {}) const {
    validate_bath(bath);
    if (!(rates.rabi_omega >= 0.0) || !(rates.cavity_kappa > 0.0) || !(rates.atomic_gamma >= 0.0)) {
      throw NegativeParam("full model needs Omega >= 0, kappa > 0, Gamma >= 0");
    }
    if (rho0.rows() != dim_ || rho0.cols() != dim_) throw ConfigError("state dimension mismatch");
    const TruncationBudget budget = TruncationBudget::for_bath(n_max_, bath);
    if (opt.check_truncation && budget.leakage_estimate > kMaxTruncationLeakage) {
      throw TruncationOverflow("Fock truncation n_max=" + std::to_string(n_max_) +
                                   " too small for this bath; estimated leakage " +
                                   std::to_string(budget.leakage_estimate),
                               budget.leakage_estimate);
    }
    const Generator gen =
        make_generator(rates.rabi_omega, bath, rates.cavity_kappa, rates.atomic_gamma);
    const auto rhs = [&gen](double, const DenseOp& rho) -> DenseOp { return gen.apply(rho); };

    FullTrajectory tr;
    tr.times.assign(t_grid.begin(), t_grid.end());
    tr.states = integrate<DenseOp>(rhs, rho0, t_grid, opt.integrator);
    for (const auto& rho : tr.states) {
      tr.max_top_level_population = std::max(tr.max_top_level_population, top_level_population(rho));
      tr.max_truncation_leakage = std::max(tr.max_truncation_leakage, truncation_leakage(rho));
    }
    if (opt.check_truncation && tr.max_truncation_leakage > kMaxTruncationLeakage) {
      throw TruncationOverflow("population leaking past Fock level " + std::to_string(n_max_) +
                                   " reached " + std::to_string(tr.max_truncation_leakage),
                               tr.max_truncation_leakage);
    }
    return tr;
  }

 private:
  [[nodiscard]] int padded_n_max() const { return 2 * n_max_ + 4; }

  // Restriction of an operator on a larger truncation to this one.
  [[nodiscard]] DenseOp project_from(const CavityModel& big, const DenseOp& op) const {
    std::vector<Eigen::Index> map;  // map[index(q1, q2, na, nb)] = big.index(q1, q2, na, nb)
    map.reserve(static_cast<std::size_t>(dim_));
    for (int q1 = 0; q1 < 2; ++q1)
      for (int q2 = 0; q2 < 2; ++q2)
        for (int na = 0; na < fock_; ++na)
          for (int nb = 0; nb < fock_; ++nb) map.push_back(big.index(q1, q2, na, nb));
    DenseOp out(dim_, dim_);
    for (Eigen::Index j = 0; j < dim_; ++j)
      for (Eigen::Index i = 0; i < dim_; ++i) out(i, j) = op(map[i], map[j]);
    return out;
  }

  struct Term {
    double weight;
    const SparseOp* left;
    const SparseOp* right;
  };

  // -i K rho + i rho K^H + sum_k w_k L_k rho R_k, with K = H - (i/2) Q.
  // Every term is either Hermiticity-preserving on its own or comes paired
  // with its adjoint, so only one member of each pair is evaluated (with
  // doubled weight) and the result is symmetrized.
  struct Generator {
    SparseOp k_eff;
    std::vector<Term> jumps;  // weights already include the pairing factor

    [[nodiscard]] DenseOp apply(const DenseOp& rho) const {
      DenseOp out(rho.rows(), rho.cols());
      DenseOp tmp(rho.rows(), rho.cols());
      out.noalias() = k_eff * rho;
      out *= cplx(0.0, -2.0);
      for (const Term& t : jumps) {
        if (t.weight == 0.0) continue;
        tmp.noalias() = rho * *t.right;
        out.noalias() += t.weight * (*t.left * tmp);
      }
      return 0.5 * (out + out.adjoint());
    }
  };

  [[nodiscard]] Generator make_generator(double omega, const BathParams& bath, double kappa,
                                         double gamma_atomic) const {
    const double g_down = 2.0 * kappa * (bath.n + 1.0);
    const double g_up = 2.0 * kappa * bath.n;
    const double g_cross = 2.0 * kappa * bath.m;

    SparseOp q = g_down * (ada_ + bdb_) + g_up * (aad_ + bbd_) +
                 (2.0 * g_cross) * (ab_ + ab_adj_) + gamma_atomic * (s1ps1m_ + s2ps2m_);
    Generator g;
    g.k_eff = hamiltonian(omega) - cplx(0.0, 0.5) * q;
    g.k_eff.makeCompressed();
    // a rho b and b rho a stand in for their adjoints b^H rho a^H, a^H rho b^H.
    g.jumps = {
        {g_down, &a_, &a_adj_},         {g_down, &b_, &b_adj_},
        {g_up, &a_adj_, &a_},           {g_up, &b_adj_, &b_},
        {2.0 * g_cross, &a_, &b_},      {2.0 * g_cross, &b_, &a_},
        {gamma_atomic, &s1m_, &s1p_},   {gamma_atomic, &s2m_, &s2p_},
    };
    return g;
  }

  void build_operators() {
    using Triplet = Eigen::Triplet<cplx>;
    std::vector<Triplet> t_s1, t_s2, t_a, t_b, t_n;
    for (int q1 = 0; q1 < 2; ++q1)
      for (int q2 = 0; q2 < 2; ++q2)
        for (int na = 0; na < fock_; ++na)
          for (int nb = 0; nb < fock_; ++nb) {
            const Eigen::Index i = index(q1, q2, na, nb);
            // sigma^- = |g><e|: level 0 (e) -> 1 (g)
            if (q1 == 0) t_s1.emplace_back(index(1, q2, na, nb), i, 1.0);
            if (q2 == 0) t_s2.emplace_back(index(q1, 1, na, nb), i, 1.0);
            if (na > 0) t_a.emplace_back(index(q1, q2, na - 1, nb), i, std::sqrt(double(na)));
            if (nb > 0) t_b.emplace_back(index(q1, q2, na, nb - 1), i, std::sqrt(double(nb)));
            const double exc = (q1 == 0) + (q2 == 0) + na + nb;
            t_n.emplace_back(i, i, exc);
          }
    const auto make = [this](const std::vector<Triplet>& t) {
      SparseOp m(dim_, dim_);
      m.setFromTriplets(t.begin(), t.end());
      m.makeCompressed();
      return m;
    };
    s1m_ = make(t_s1);
    s2m_ = make(t_s2);
    a_ = make(t_a);
    b_ = make(t_b);
    n_exc_ = make(t_n);
    s1p_ = s1m_.adjoint();
    s2p_ = s2m_.adjoint();
    a_adj_ = a_.adjoint();
    b_adj_ = b_.adjoint();
    ada_ = a_adj_ * a_;
    bdb_ = b_adj_ * b_;
    aad_ = a_ * a_adj_;
    bbd_ = b_ * b_adj_;
    ab_ = a_ * b_;
    ab_adj_ = ab_.adjoint();
    s1ps1m_ = s1p_ * s1m_;
    s2ps2m_ = s2p_ * s2m_;
  }

  int n_max_;
  int fock_;
  Eigen::Index dim_;
  SparseOp s1m_, s2m_, s1p_, s2p_, a_, b_, a_adj_, b_adj_, n_exc_;
  SparseOp ada_, bdb_, aad_, bbd_, ab_, ab_adj_, s1ps1m_, s2ps2m_;
};

}  // namespace sqz

#endif  // SQZ_CAVITY_MODEL_HPP
