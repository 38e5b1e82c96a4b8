// Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//
// Used for the 4x4 partially transposed density matrices and the 6x6
// dissipator matrix. Each rotation first removes the phase of the pivot
// element, then applies a real Givens rotation that zeroes it.

#ifndef SQZ_JACOBI_HPP
#define SQZ_JACOBI_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Dense>

#include "sqz/core.hpp"

namespace sqz {

using cplx = std::complex<double>;

template <int Dim>
using HermitianMatrix = Eigen::Matrix<cplx, Dim, Dim>;

template <int Dim>
struct SpectralResult {
  Eigen::Matrix<double, Dim, 1> eigenvalues;  // ascending
  HermitianMatrix<Dim> eigenvectors;          // column k belongs to eigenvalues[k]
  double residual = 0.0;                      // max |A v - lambda v|
  int sweeps = 0;
};

namespace detail {

template <int Dim>
double off_diagonal_norm(const HermitianMatrix<Dim>& a) {
  double s = 0.0;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace detail

template <int Dim>
SpectralResult<Dim> jacobi_eigen(const HermitianMatrix<Dim>& input, double tol = 1e-12,
                                 int max_sweeps = 64) {
  static_assert(Dim > 0, "fixed-size matrices only");
  // Work on the exactly Hermitian part so roundoff asymmetry cannot stall convergence.
  HermitianMatrix<Dim> a = 0.5 * (input + input.adjoint());
  HermitianMatrix<Dim> v = HermitianMatrix<Dim>::Identity();
  const double scale = std::max(1.0, a.norm());

  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    if (detail::off_diagonal_norm(a) <= tol * scale) break;
    for (int p = 0; p < Dim - 1; ++p) {
      for (int q = p + 1; q < Dim; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag == 0.0) continue;
        const cplx phase = a(p, q) / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = 0.5 * std::atan2(2.0 * mag, app - aqq);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        // J = diag(1, e^{-i phi}) * [[c, -s], [s, c]] restricted to (p, q).
        const cplx jpp = c;
        const cplx jpq = -s;
        const cplx jqp = std::conj(phase) * s;
        const cplx jqq = std::conj(phase) * c;

        for (int k = 0; k < Dim; ++k) {  // a <- a J
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * jpp + akq * jqp;
          a(k, q) = akp * jpq + akq * jqq;
        }
        for (int k = 0; k < Dim; ++k) {  // a <- J^H a
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
          a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (int k = 0; k < Dim; ++k) {  // v <- v J
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * jpp + vkq * jqp;
          v(k, q) = vkp * jpq + vkq * jqq;
        }
      }
    }
  }
  if (detail::off_diagonal_norm(a) > tol * scale) {
    throw NumericalError("Jacobi eigensolver did not converge");
  }

  std::array<int, Dim> order{};
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  SpectralResult<Dim> out;
  out.sweeps = sweep;
  for (int k = 0; k < Dim; ++k) {
    out.eigenvalues(k) = a(order[k], order[k]).real();
    out.eigenvectors.col(k) = v.col(order[k]);
  }
  const HermitianMatrix<Dim> h = 0.5 * (input + input.adjoint());
  for (int k = 0; k < Dim; ++k) {
    const auto r = h * out.eigenvectors.col(k) - out.eigenvalues(k) * out.eigenvectors.col(k);
    out.residual = std::max(out.residual, r.cwiseAbs().maxCoeff());
  }
  return out;
}

template <int Dim>
Eigen::Matrix<double, Dim, 1> hermitian_eigenvalues(const HermitianMatrix<Dim>& a) {
  return jacobi_eigen<Dim>(a).eigenvalues;
}

}  // namespace sqz

#endif  // SQZ_JACOBI_HPP
