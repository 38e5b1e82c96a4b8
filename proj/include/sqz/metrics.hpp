// Entanglement and mixedness of two-qubit states.

#ifndef SQZ_METRICS_HPP
#define SQZ_METRICS_HPP

#include <algorithm>
#include <cmath>

#include "sqz/jacobi.hpp"
#include "sqz/qubit_dynamics.hpp"

namespace sqz {

/// Eigenvalues above this (negative) threshold count as zero for negativity.
inline constexpr double kNegativityClamp = 1e-12;

/// Transpose on qubit 2: (rho^T2)[(i,j),(h,k)] = rho[(i,k),(h,j)], index = 2*i + j.
inline Matrix4c partial_transpose(const Matrix4c& rho) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int h = 0; h < 2; ++h)
        for (int k = 0; k < 2; ++k) out(2 * i + j, 2 * h + k) = rho(2 * i + k, 2 * h + j);
  return out;
}

inline Matrix4c partial_transpose(const TwoQubitState& s) { return partial_transpose(s.rho); }

inline SpectralResult<4> partial_transpose_spectrum(const Matrix4c& rho) {
  return jacobi_eigen<4>(partial_transpose(rho));
}

/// -2 times the sum of negative eigenvalues of rho^T2. For two qubits at most
/// one eigenvalue is negative, so this is -2 lambda_min when entangled.
inline double negativity(const Matrix4c& rho) {
  const auto ev = hermitian_eigenvalues<4>(partial_transpose(rho));
  double neg = 0.0;
  for (int k = 0; k < 4; ++k)
    if (ev(k) < -kNegativityClamp) neg -= ev(k);
  return 2.0 * neg;
}

inline double negativity(const TwoQubitState& s) { return negativity(s.rho); }

/// (4/3)(1 - Tr rho^2), 0 for pure and 1 for maximally mixed states.
inline double linear_entropy(const Matrix4c& rho) {
  // Tr rho^2 = sum |rho_ij|^2 for Hermitian rho.
  const double purity = rho.cwiseAbs2().sum();
  const double s = (4.0 / 3.0) * (1.0 - purity);
  return std::clamp(s, 0.0, 1.0);
}

inline double linear_entropy(const TwoQubitState& s) { return linear_entropy(s.rho); }

/// Half the trace norm of the difference.
inline double trace_distance(const Matrix4c& a, const Matrix4c& b) {
  const auto ev = hermitian_eigenvalues<4>(a - b);
  return 0.5 * ev.cwiseAbs().sum();
}

}  // namespace sqz

#endif  // SQZ_METRICS_HPP
