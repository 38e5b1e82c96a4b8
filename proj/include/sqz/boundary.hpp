// Steady-state entanglement boundary M = B(N).
//
// For fixed N the stationary negativity is zero for M <= B(N) and positive up
// to the physical limit sqrt(N(N+1)). The numeric route bisects on the exact
// stationary state and is the reference; the closed forms are checked against it.

#ifndef SQZ_BOUNDARY_HPP
#define SQZ_BOUNDARY_HPP

#include <cmath>
#include <string_view>

#include "sqz/core.hpp"
#include "sqz/metrics.hpp"
#include "sqz/qubit_dynamics.hpp"

namespace sqz {

struct NoTransition : Error {
  using Error::Error;
};

/// In-phase quadrature variance of the bath, (Delta x)^2 = N + 1/2.
inline double quadrature_variance(double n) { return n + 0.5; }

// Ways to read the closed-form boundary -alpha + sqrt(alpha + N(N+1)).
//
// kSquaredAlpha: -alpha + sqrt(alpha^2 + N(N+1)) with alpha = 1/(4 (Delta x)^2).
//   This is the stationary condition |coh| = p_eg solved for M, and agrees
//   with the bisection reference to rounding.
// kVarianceOverFour: -alpha + sqrt(alpha + N(N+1)), alpha = (Delta x)^2 / 4.
// kInverseVariance:  -alpha + sqrt(alpha + N(N+1)), alpha = 1 / (4 (Delta x)^2).
enum class BoundaryReading { kSquaredAlpha, kVarianceOverFour, kInverseVariance };

inline std::string_view to_string(BoundaryReading r) {
  switch (r) {
    case BoundaryReading::kSquaredAlpha: return "squared_alpha";
    case BoundaryReading::kVarianceOverFour: return "variance_over_four";
    case BoundaryReading::kInverseVariance: return "inverse_variance";
  }
  return "?";
}

inline double boundary_closed_form(double n,
                                   BoundaryReading reading = BoundaryReading::kSquaredAlpha) {
  if (!(n >= 0.0)) throw NegativeParam("boundary requires n >= 0");
  const double var = quadrature_variance(n);
  const double nn = n * (n + 1.0);
  switch (reading) {
    case BoundaryReading::kSquaredAlpha: {
      const double alpha = 1.0 / (4.0 * var);
      // Rationalized form of -alpha + sqrt(alpha^2 + nn); no cancellation as n -> 0.
      return nn / (alpha + std::sqrt(alpha * alpha + nn));
    }
    case BoundaryReading::kVarianceOverFour: {
      const double alpha = var / 4.0;
      return -alpha + std::sqrt(alpha + nn);
    }
    case BoundaryReading::kInverseVariance: {
      const double alpha = 1.0 / (4.0 * var);
      return -alpha + std::sqrt(alpha + nn);
    }
  }
  return 0.0;
}

inline double steady_negativity(const BathParams& bath) {
  return negativity(embed_density(steady_state(bath)));
}

struct BisectionOptions {
  double m_tol = 1e-10;
  double entangled_threshold = 1e-12;  // negativity above this counts as entangled
  int max_iterations = 200;
};

/// Smallest M in [0, sqrt(n(n+1))] beyond which the stationary state is entangled.
inline double boundary_numeric(double n, const BisectionOptions& opt = {}) {
  if (!(n >= 0.0)) throw NegativeParam("boundary requires n >= 0");
  const double m_max = std::sqrt(n * (n + 1.0));
  if (n == 0.0) return 0.0;  // degenerate interval [0, 0]
  const auto entangled = [&](double m) {
    return steady_negativity({n, m}) > opt.entangled_threshold;
  };
  if (!entangled(m_max)) {
    throw NoTransition("stationary state is separable up to the physical limit at n = " +
                       std::to_string(n));
  }
  double lo = 0.0;
  double hi = m_max;
  for (int it = 0; it < opt.max_iterations && hi - lo > opt.m_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    (entangled(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Boundary on the bare M when spontaneous emission is present: the stationary
/// state is entangled iff M' > B(N'), i.e. M > B(N') (1 + C) / C. May exceed
/// sqrt(N(N+1)), in which case no physical bath entangles the atoms.
inline double boundary_with_spontaneous_emission(double n, const SystemRates& rates,
                                                 const BisectionOptions& opt = {}) {
  validate_rates(rates);
  const EffectiveBath eff = effective_bath({n, 0.0}, rates);
  if (rates.atomic_gamma == 0.0) return boundary_numeric(n, opt);
  const double f = eff.cooperativity / (1.0 + eff.cooperativity);
  return boundary_numeric(eff.n_eff, opt) / f;
}

}  // namespace sqz

#endif  // SQZ_BOUNDARY_HPP
