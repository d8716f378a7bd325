// Adaptive Simpson quadrature with Richardson correction. Small, header-only,
// tolerant of mildly singular endpoints (integrable power singularities) via
// depth-bounded bisection toward the offending end.

#pragma once

#include <cmath>
#include <cstdlib>

namespace specbound {

namespace detail {

inline double simpson_step(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_step(a, fa, m, fm, flm);
  const double right = simpson_step(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Integrates f over [a, b] to roughly rel_tol relative accuracy. abs_floor
// guards the tolerance when the integral is near zero.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol = 1e-10,
                        double abs_floor = 0.0, int max_depth = 48) {
  if (a == b) return 0.0;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = detail::simpson_step(a, fa, b, fb, fm);

  double mag = std::abs(whole);
  // Crude scale probe so a vanishing first estimate does not collapse the
  // tolerance to zero.
  for (int i = 1; i < 8; ++i) {
    const double x = a + (b - a) * i / 8.0;
    mag = std::max(mag, std::abs(f(x)) * (b - a));
  }
  const double tol = std::max(rel_tol * mag, abs_floor);
  return sign * detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole,
                                             tol > 0.0 ? tol : 1e-300, max_depth);
}

}  // namespace specbound
