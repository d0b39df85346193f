#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace homsim {

struct Maximum {
  double x;
  double value;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi].
template <class F>
Maximum golden_maximize(F&& f, double lo, double hi, double tol = 1e-10, int max_iter = 300) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? Maximum{x1, f1} : Maximum{x2, f2};
}

// Coarse scan over samples, then golden refinement between the neighbours of
// the best sample.
template <class F>
Maximum scan_and_refine(F&& f, const std::vector<double>& xs, double tol = 1e-10) {
  std::size_t best = 0;
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    vals[i] = f(xs[i]);
    if (vals[i] > vals[best]) best = i;
  }
  const double lo = xs[best == 0 ? 0 : best - 1];
  const double hi = xs[best + 1 < xs.size() ? best + 1 : best];
  if (!(hi > lo)) return {xs[best], vals[best]};
  auto m = golden_maximize(f, lo, hi, tol);
  return m.value >= vals[best] ? m : Maximum{xs[best], vals[best]};
}

}  // namespace homsim
