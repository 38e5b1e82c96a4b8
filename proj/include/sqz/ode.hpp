// Explicit Runge-Kutta integrators over Eigen dense states.
//
// Two modes are offered: an adaptive Dormand-Prince 5(4) pair with a mixed
// absolute/relative max-norm error test, and a classical fixed-step RK4 whose
// output depends only on the grid and step size (bit-reproducible runs).

#ifndef SQZ_ODE_HPP
#define SQZ_ODE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sqz/core.hpp"

namespace sqz {

struct StepFailure : NumericalError {
  using NumericalError::NumericalError;
};

enum class StepMode { kAdaptive, kFixed };

struct IntegratorOptions {
  StepMode mode = StepMode::kAdaptive;
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  double fixed_step = 1e-3;  // RK4 step, used in kFixed mode
  double initial_step = 0.0; // 0 selects a step from the first derivative
  double min_step = 1e-14;
  std::size_t max_steps = 50'000'000;
};

struct IntegratorStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace detail {

template <class State>
double error_ratio(const State& err, const State& y0, const State& y1, double atol,
                   double rtol) {
  const auto scale =
      (atol + rtol * y0.array().abs().max(y1.array().abs())).eval();
  return (err.array().abs() / scale).maxCoeff();
}

template <class State>
void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("time grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw ConfigError("time grid must be strictly increasing");
  }
}

}  // namespace detail

/// Integrates y' = f(t, y) and returns y at every grid point (grid[0] is the start).
template <class State, class Rhs>
std::vector<State> integrate(Rhs&& f, const State& y0, std::span<const double> grid,
                             const IntegratorOptions& opt = {},
                             IntegratorStats* stats = nullptr) {
  detail::check_grid<State>(grid);
  IntegratorStats local;
  IntegratorStats& st = stats ? *stats : local;

  std::vector<State> out;
  out.reserve(grid.size());
  out.push_back(y0);
  State y = y0;

  if (opt.mode == StepMode::kFixed) {
    if (!(opt.fixed_step > 0.0)) throw ConfigError("fixed step must be positive");
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double span = grid[i] - grid[i - 1];
      const auto steps = static_cast<std::size_t>(std::ceil(span / opt.fixed_step - 1e-12));
      const double h = span / static_cast<double>(std::max<std::size_t>(steps, 1));
      for (std::size_t k = 0; k < std::max<std::size_t>(steps, 1); ++k) {
        const double t = grid[i - 1] + static_cast<double>(k) * h;
        const State k1 = f(t, y);
        const State k2 = f(t + 0.5 * h, (y + (0.5 * h) * k1).eval());
        const State k3 = f(t + 0.5 * h, (y + (0.5 * h) * k2).eval());
        const State k4 = f(t + h, (y + h * k3).eval());
        y = (y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).eval();
        st.rhs_evaluations += 4;
        ++st.accepted;
      }
      out.push_back(y);
    }
    return out;
  }

  // Dormand-Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = grid.front();
  State k1 = f(t, y);
  ++st.rhs_evaluations;

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    const double d0 = y.array().abs().maxCoeff();
    const double d1 = k1.array().abs().maxCoeff();
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, grid.back() - grid.front());
  }

  std::size_t steps = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double t_end = grid[i];
    while (t < t_end) {
      if (++steps > opt.max_steps) throw StepFailure("step budget exhausted");
      bool last = false;
      const double h_wanted = h;
      if (t + h >= t_end || t_end - (t + h) < 1e-12 * std::abs(t_end)) {
        h = t_end - t;
        last = true;
      }
      const State k2 = f(t + c2 * h, (y + h * (a21 * k1)).eval());
      const State k3 = f(t + c3 * h, (y + h * (a31 * k1 + a32 * k2)).eval());
      const State k4 = f(t + c4 * h, (y + h * (a41 * k1 + a42 * k2 + a43 * k3)).eval());
      const State k5 =
          f(t + c5 * h, (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)).eval());
      const State k6 = f(
          t + h, (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)).eval());
      const State y_new =
          (y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6)).eval();
      const State k7 = f(t + h, y_new);
      st.rhs_evaluations += 6;
      const State err =
          (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).eval();
      const double ratio = detail::error_ratio(err, y, y_new, opt.abs_tol, opt.rel_tol);

      if (ratio <= 1.0) {
        t = last ? t_end : t + h;
        y = y_new;
        k1 = k7;  // first-same-as-last
        ++st.accepted;
        const double grow = ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h = last ? std::max(h, h_wanted) : h * std::clamp(grow, 0.2, 5.0);
      } else {
        ++st.rejected;
        const double shrink = std::isfinite(ratio) ? 0.9 * std::pow(ratio, -0.25) : 0.1;
        h *= std::clamp(shrink, 0.1, 0.9);
        if (h < opt.min_step) throw StepFailure("step size underflow; tolerance cannot be met");
      }
    }
    out.push_back(y);
  }
  return out;
}

}  // namespace sqz

#endif  // SQZ_ODE_HPP
