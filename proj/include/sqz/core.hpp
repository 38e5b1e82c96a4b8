// Shared parameter types for the squeezed-bath two-qubit model.
//
// The bath is described by the phase-insensitive occupation N and the
// phase-sensitive correlation M of a broadband two-mode squeezed field.
// M is real throughout (real squeezing parameter r).

#ifndef SQZ_CORE_HPP
#define SQZ_CORE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sqz {

// Error hierarchy. Everything the library throws derives from sqz::Error so
// front ends can map categories onto exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct NegativeParam : Error {
  using Error::Error;
};

// Carries the excess m^2 - n(n+1) so callers can report how far off they are.
struct Unphysical : Error {
  Unphysical(const std::string& what, double excess_)
      : Error(what), excess(excess_) {}
  double excess;
};

struct NumericalError : Error {
  using Error::Error;
};

/// Tolerance on m^2 <= n(n+1), admits boundary values computed in floating point.
inline constexpr double kPhysicalityTol = 1e-12;

struct BathParams {
  double n = 0.0;  // phase-insensitive occupation N
  double m = 0.0;  // phase-sensitive correlation M

  /// Largest admissible M for this N: the minimum-uncertainty value sqrt(N(N+1)).
  [[nodiscard]] double m_max() const { return std::sqrt(n * (n + 1.0)); }

  /// Minimum-uncertainty bath with squeezing r: N = sinh^2 r, M = sinh r cosh r.
  static BathParams from_squeezing(double r) {
    const double s = std::sinh(r);
    return {s * s, s * std::cosh(r)};
  }

  /// Pure two-mode squeezed bath at occupation n.
  static BathParams minimum_uncertainty(double n) { return {n, std::sqrt(n * (n + 1.0))}; }

  /// Squeezing parameter r of a minimum-uncertainty bath with occupation n.
  [[nodiscard]] double squeezing_r() const { return std::asinh(std::sqrt(n)); }

  friend bool operator==(const BathParams&, const BathParams&) = default;
};

struct AsymmetricBathParams {
  double n_a = 0.0;
  double n_b = 0.0;
  double m = 0.0;
};

struct SystemRates {
  double rabi_omega = 1.0;    // atom-cavity coupling
  double cavity_kappa = 1.0;  // cavity decay
  double atomic_gamma = 0.0;  // spontaneous emission

  /// Cavity-mediated atomic decay rate 2 Omega^2 / kappa.
  [[nodiscard]] double gamma_cavity() const {
    return 2.0 * rabi_omega * rabi_omega / cavity_kappa;
  }

  /// kappa / max(Omega, Gamma); the adiabatic reduction needs this >> 1.
  [[nodiscard]] double bad_cavity_ratio() const {
    const double slow = std::max(rabi_omega, atomic_gamma);
    return slow > 0.0 ? cavity_kappa / slow : std::numeric_limits<double>::infinity();
  }
};

struct EffectiveBath {
  double gamma_eff = 0.0;
  double n_eff = 0.0;
  double m_eff = 0.0;
  double cooperativity = std::numeric_limits<double>::infinity();

  [[nodiscard]] BathParams bath() const { return {n_eff, m_eff}; }
};

inline BathParams validate_bath(const BathParams& p) {
  if (!(p.n >= 0.0) || !(p.m >= 0.0)) {
    std::ostringstream os;
    os << "bath parameters must be nonnegative (n=" << p.n << ", m=" << p.m << ")";
    throw NegativeParam(os.str());
  }
  const double excess = p.m * p.m - p.n * (p.n + 1.0);
  if (excess > kPhysicalityTol) {
    std::ostringstream os;
    os << "unphysical bath: m^2 - n(n+1) = " << excess << " > 0 (n=" << p.n
       << ", m=" << p.m << ")";
    throw Unphysical(os.str(), excess);
  }
  return p;
}

inline AsymmetricBathParams validate_bath(const AsymmetricBathParams& p) {
  if (!(p.n_a >= 0.0) || !(p.n_b >= 0.0) || !(p.m >= 0.0)) {
    throw NegativeParam("asymmetric bath parameters must be nonnegative");
  }
  const double bound =
      std::sqrt(p.n_a * (p.n_a + 1.0)) * std::sqrt(p.n_b * (p.n_b + 1.0));
  const double excess = p.m * p.m - bound;
  if (excess > kPhysicalityTol) {
    throw Unphysical("unphysical asymmetric bath: m^2 exceeds sqrt(Na(Na+1) Nb(Nb+1))",
                     excess);
  }
  return p;
}

inline SystemRates validate_rates(const SystemRates& r) {
  if (!(r.rabi_omega > 0.0) || !(r.cavity_kappa > 0.0) || !(r.atomic_gamma >= 0.0)) {
    throw NegativeParam("rates require Omega > 0, kappa > 0, Gamma >= 0");
  }
  return r;
}

// How the effective decay rate is formed once spontaneous emission is added.
//
// kCombined: gamma' = 2 Omega^2/kappa + Gamma. This is the unique choice for
// which gamma' N' = gamma N and gamma'(N'+1) = gamma(N+1) + Gamma, i.e. the
// substituted master equation equals the cavity-mediated one plus the
// spontaneous-emission dissipator.
// kLiteral: gamma' = Omega^2 (2 + Gamma) / kappa, the expression as usually
// quoted. Only rescales the time axis; N' and M' are identical.
enum class GammaEffReading { kCombined, kLiteral };

inline EffectiveBath effective_bath(const BathParams& bath, const SystemRates& rates,
                                    GammaEffReading reading = GammaEffReading::kCombined) {
  validate_bath(bath);
  validate_rates(rates);
  const double gamma = rates.gamma_cavity();
  if (rates.atomic_gamma == 0.0) {
    return {gamma, bath.n, bath.m, std::numeric_limits<double>::infinity()};
  }
  const double coop = gamma / rates.atomic_gamma;  // 2 Omega^2 / (Gamma kappa)
  const double f = coop / (1.0 + coop);
  const double omega2 = rates.rabi_omega * rates.rabi_omega;
  const double gamma_eff = reading == GammaEffReading::kCombined
                               ? gamma + rates.atomic_gamma
                               : omega2 * (2.0 + rates.atomic_gamma) / rates.cavity_kappa;
  return {gamma_eff, f * bath.n, f * bath.m, coop};
}

}  // namespace sqz

#endif  // SQZ_CORE_HPP
