#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gfchain::quadrature {

/// Composite midpoint rule on [lo, hi] with panel width at most `step`.
template <class F>
double midpoint(F&& f, double lo, double hi, double step) {
  if (hi <= lo) return 0.0;
  const auto panels = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  const double w = (hi - lo) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    sum += f(lo + (static_cast<double>(p) + 0.5) * w);
  }
  return sum * w;
}

struct Estimate {
  double value;
  double error;
};

/// Midpoint rule at `step` and `step/2`; the finer value is returned and the
/// Richardson difference (M_{h/2} - M_h)/3 serves as the error estimate.
template <class F>
Estimate midpoint_checked(F&& f, double lo, double hi, double step) {
  const double coarse = midpoint(f, lo, hi, step);
  const double fine = midpoint(f, lo, hi, 0.5 * step);
  return {fine, std::abs(fine - coarse) / 3.0};
}

/// Adaptive Gauss-Kronrod (7/15) on a finite interval.
template <class F>
double adaptive(F&& f, double lo, double hi, double rel_tol = 1e-10, unsigned max_depth = 10) {
  if (hi <= lo) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  return GK::integrate(std::function<double(double)>(f), lo, hi, max_depth, rel_tol);
}

/// Integral of a nonnegative, eventually decaying f over [lo, inf).
///
/// Panels of width `panel` are integrated adaptively until one contributes
/// less than `cutoff` times the running total.
template <class F>
double to_infinity(F&& f, double lo, double panel, double cutoff = 1e-14,
                   std::size_t max_panels = 100000) {
  double total = 0.0;
  double left = lo;
  for (std::size_t p = 0; p < max_panels; ++p) {
    const double part = adaptive(f, left, left + panel);
    total += part;
    left += panel;
    if (part <= cutoff * total) break;
  }
  return total;
}

}  // namespace gfchain::quadrature
