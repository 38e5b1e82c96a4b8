// Reduced two-qubit dynamics in a broadband two-mode squeezed bath.
//
// After the cavities are eliminated, the atoms obey a squeezed-vacuum master
// equation with decay rate gamma and bath parameters (N, M). Starting from an
// X-shaped state, only four real variables move:
//
//   p_ee = <ee|rho|ee>, p_eg = <eg|rho|eg>, p_ge = <ge|rho|ge>, coh = <ee|rho|gg>
//
// and p_gg = 1 - p_ee - p_eg - p_ge. All single-excitation coherences decouple
// and stay zero. Time is measured in tau = gamma t.

#ifndef SQZ_QUBIT_DYNAMICS_HPP
#define SQZ_QUBIT_DYNAMICS_HPP

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sqz/core.hpp"
#include "sqz/jacobi.hpp"
#include "sqz/ode.hpp"

namespace sqz {

// Ordered two-qubit basis {|ee>, |eg>, |ge>, |gg>}; qubit 1 is the left factor.
enum BasisIndex : int { kEE = 0, kEG = 1, kGE = 2, kGG = 3 };

using Matrix4c = HermitianMatrix<4>;

struct PositivityViolation : NumericalError {
  using NumericalError::NumericalError;
};

struct UnsupportedInitialState : Error {
  using Error::Error;
};

struct SingularSystem : NumericalError {
  using NumericalError::NumericalError;
};

struct BlochVector {
  double p_ee = 0.0;
  double p_eg = 0.0;
  double p_ge = 0.0;
  double coh = 0.0;

  [[nodiscard]] double p_gg() const { return 1.0 - p_ee - p_eg - p_ge; }

  [[nodiscard]] Eigen::Vector4d to_vector() const { return {p_ee, p_eg, p_ge, coh}; }
  static BlochVector from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }

  static BlochVector ground() { return {0.0, 0.0, 0.0, 0.0}; }
  static BlochVector excited() { return {1.0, 0.0, 0.0, 0.0}; }
};

struct TwoQubitState {
  Matrix4c rho = Matrix4c::Zero();

  struct Defects {
    double hermiticity = 0.0;    // max |rho - rho^H|
    double trace_error = 0.0;    // |Tr rho - 1|
    double min_eigenvalue = 0.0;
  };

  [[nodiscard]] Defects defects() const {
    Defects d;
    d.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    d.trace_error = std::abs(rho.trace() - cplx(1.0, 0.0));
    d.min_eigenvalue = hermitian_eigenvalues<4>(rho)(0);
    return d;
  }

  [[nodiscard]] bool is_valid(double herm_tol = 1e-12, double trace_tol = 1e-10,
                              double psd_tol = 1e-10) const {
    const Defects d = defects();
    return d.hermiticity <= herm_tol && d.trace_error <= trace_tol &&
           d.min_eigenvalue >= -psd_tol;
  }
};

struct Trajectory {
  std::vector<double> times;  // tau = gamma t
  std::vector<BlochVector> bloch;
  std::vector<TwoQubitState> states;
};

enum class InitialState { kGG, kEE, kEG, kGE };

inline BlochVector initial_bloch(InitialState s) {
  switch (s) {
    case InitialState::kGG: return {0.0, 0.0, 0.0, 0.0};
    case InitialState::kEE: return {1.0, 0.0, 0.0, 0.0};
    case InitialState::kEG: return {0.0, 1.0, 0.0, 0.0};
    case InitialState::kGE: return {0.0, 0.0, 1.0, 0.0};
  }
  return {};
}

inline InitialState parse_initial_state(std::string_view name) {
  if (name == "gg") return InitialState::kGG;
  if (name == "ee") return InitialState::kEE;
  if (name == "eg") return InitialState::kEG;
  if (name == "ge") return InitialState::kGE;
  throw ConfigError("unknown initial state '" + std::string(name) + "' (expected gg, ee, eg, ge)");
}

inline std::string_view to_string(InitialState s) {
  switch (s) {
    case InitialState::kGG: return "gg";
    case InitialState::kEE: return "ee";
    case InitialState::kEG: return "eg";
    case InitialState::kGE: return "ge";
  }
  return "?";
}

/// d/dtau of the Bloch variables. Uses n^l_k = kN + l.
inline Eigen::Vector4d bloch_rhs(const Eigen::Vector4d& v, const BathParams& bath) {
  const double n = bath.n;
  const double m = bath.m;
  const double ee = v(0), eg = v(1), ge = v(2), c = v(3);
  return {-2.0 * (n + 1.0) * ee + n * (eg + ge) + 2.0 * m * c,
          n * (1.0 - ge) + ee - (3.0 * n + 1.0) * eg - 2.0 * m * c,
          n * (1.0 - eg) + ee - (3.0 * n + 1.0) * ge - 2.0 * m * c,
          -((2.0 * n + 1.0) * c - m * (1.0 - 2.0 * ge - 2.0 * eg))};
}

inline BlochVector bloch_rhs(const BlochVector& v, const BathParams& bath) {
  return BlochVector::from_vector(bloch_rhs(v.to_vector(), bath));
}

/// Embeds the Bloch variables in the 4x4 density matrix without any checks.
inline TwoQubitState embed_density(const BlochVector& v) {
  TwoQubitState s;
  s.rho(kEE, kEE) = v.p_ee;
  s.rho(kEG, kEG) = v.p_eg;
  s.rho(kGE, kGE) = v.p_ge;
  s.rho(kGG, kGG) = v.p_gg();
  s.rho(kEE, kGG) = v.coh;
  s.rho(kGG, kEE) = v.coh;
  return s;
}

inline TwoQubitState reconstruct_density(const BlochVector& v) {
  TwoQubitState s = embed_density(v);
  const double min_eig = hermitian_eigenvalues<4>(s.rho)(0);
  if (min_eig < -1e-8) {
    throw PositivityViolation("reconstructed density matrix has eigenvalue " +
                              std::to_string(min_eig));
  }
  return s;
}

/// Inverse of embed_density. Rejects states whose decoupled elements are nonzero.
inline BlochVector extract_bloch(const TwoQubitState& s, double tol = 1e-12) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const bool tracked = i == j || (i == kEE && j == kGG) || (i == kGG && j == kEE);
      if (!tracked && std::abs(s.rho(i, j)) > tol) {
        throw UnsupportedInitialState(
            "state has nonzero single-excitation coherences; only X states with a real "
            "ee-gg coherence are supported");
      }
    }
  }
  if (std::abs(s.rho(kEE, kGG).imag()) > tol) {
    throw UnsupportedInitialState("ee-gg coherence must be real");
  }
  return {s.rho(kEE, kEE).real(), s.rho(kEG, kEG).real(), s.rho(kGE, kGE).real(),
          s.rho(kEE, kGG).real()};
}

namespace detail {

// Gaussian elimination with partial pivoting on a small dense system.
template <int Dim>
Eigen::Matrix<double, Dim, 1> solve_pivoted(Eigen::Matrix<double, Dim, Dim> a,
                                            Eigen::Matrix<double, Dim, 1> b) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  for (int col = 0; col < Dim; ++col) {
    int pivot = col;
    for (int r = col + 1; r < Dim; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) < 1e-14 * scale) throw SingularSystem("steady-state system is singular");
    if (pivot != col) {
      a.row(col).swap(a.row(pivot));
      std::swap(b(col), b(pivot));
    }
    for (int r = col + 1; r < Dim; ++r) {
      const double factor = a(r, col) / a(col, col);
      a.row(r) -= factor * a.row(col);
      b(r) -= factor * b(col);
    }
  }
  Eigen::Matrix<double, Dim, 1> x;
  for (int r = Dim - 1; r >= 0; --r) {
    double acc = b(r);
    for (int c = r + 1; c < Dim; ++c) acc -= a(r, c) * x(c);
    x(r) = acc / a(r, r);
  }
  return x;
}

}  // namespace detail

/// Exact fixed point of bloch_rhs. The two single-excitation populations are
/// equal at stationarity, which leaves three unknowns (p_ee, p, coh).
inline BlochVector steady_state(const BathParams& bath) {
  validate_bath(bath);
  const double n = bath.n;
  const double m = bath.m;
  if (n == 0.0 && m == 0.0) return BlochVector::ground();
  Eigen::Matrix3d a;
  a << -2.0 * (n + 1.0), 2.0 * n, 2.0 * m,
       1.0, -(4.0 * n + 1.0), -2.0 * m,
       0.0, -4.0 * m, -(2.0 * n + 1.0);
  const Eigen::Vector3d b(0.0, -n, -m);
  const Eigen::Vector3d x = detail::solve_pivoted<3>(a, b);
  return {x(0), x(1), x(1), x(2)};
}

struct EvolveOptions {
  IntegratorOptions integrator{};
  bool check_positivity = true;
};

/// Integrates the Bloch system over tau_grid (tau_grid[0] must be 0).
inline Trajectory evolve(const BlochVector& v0, const BathParams& bath,
                         std::span<const double> tau_grid, const EvolveOptions& opt = {}) {
  validate_bath(bath);
  if (tau_grid.empty() || tau_grid.front() != 0.0) {
    throw ConfigError("tau grid must start at 0");
  }
  if (opt.check_positivity) reconstruct_density(v0);

  const auto rhs = [&bath](double, const Eigen::Vector4d& v) -> Eigen::Vector4d {
    return bloch_rhs(v, bath);
  };
  const auto ys = integrate<Eigen::Vector4d>(rhs, v0.to_vector(), tau_grid, opt.integrator);

  Trajectory tr;
  tr.times.assign(tau_grid.begin(), tau_grid.end());
  tr.bloch.reserve(ys.size());
  tr.states.reserve(ys.size());
  for (const auto& y : ys) {
    const BlochVector v = BlochVector::from_vector(y);
    tr.bloch.push_back(v);
    tr.states.push_back(opt.check_positivity ? reconstruct_density(v) : embed_density(v));
  }
  return tr;
}

inline Trajectory evolve(InitialState init, const BathParams& bath,
                         std::span<const double> tau_grid, const EvolveOptions& opt = {}) {
  return evolve(initial_bloch(init), bath, tau_grid, opt);
}

/// Uniform grid 0, dt, ..., t_end (t_end included).
inline std::vector<double> uniform_grid(double t_end, std::size_t intervals) {
  if (!(t_end > 0.0) || intervals == 0) throw ConfigError("grid needs t_end > 0 and intervals > 0");
  std::vector<double> g(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    g[i] = t_end * static_cast<double>(i) / static_cast<double>(intervals);
  return g;
}

}  // namespace sqz

#endif  // SQZ_QUBIT_DYNAMICS_HPP
