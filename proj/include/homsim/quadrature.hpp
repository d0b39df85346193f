#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <queue>
#include <sstream>
#include <type_traits>
#include <vector>

#include "homsim/errors.hpp"

// Adaptive Gauss-Kronrod (7/15) quadrature with global subdivision.
// Summation order depends only on interval positions, so results are
// reproducible bit for bit for identical inputs.
namespace homsim::quad {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-15;
  int max_intervals = 20000;
};

template <class T>
struct Result {
  T value{};
  double error = 0.0;
  int intervals = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

enum class Kind { Finite, UpperTail, LowerTail };

struct Segment {
  double lo, hi;
  Kind kind;
  double anchor;
};

template <class T>
double magnitude(const T& v) {
  return std::abs(v);
}

template <class F, class T>
T mapped(F& f, const Segment& s, double t) {
  switch (s.kind) {
    case Kind::Finite:
      return f(t);
    case Kind::UpperTail: {
      const double u = (1.0 - t) / t;
      return f(s.anchor + u) * (1.0 / (t * t));
    }
    case Kind::LowerTail: {
      const double u = (1.0 - t) / t;
      return f(s.anchor - u) * (1.0 / (t * t));
    }
  }
  return T{};
}

template <class T>
struct Piece {
  Segment seg;
  T value;
  double error;
};

template <class F, class T>
Piece<T> gk15(F& f, const Segment& s) {
  const double c = 0.5 * (s.lo + s.hi);
  const double h = 0.5 * (s.hi - s.lo);
  const T fc = mapped<F, T>(f, s, c);
  T k = fc * kronrod_w[7];
  T g = fc * gauss_w[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kronrod_x[j];
    const T sum = mapped<F, T>(f, s, c - dx) + mapped<F, T>(f, s, c + dx);
    k += sum * kronrod_w[j];
    if (j % 2 == 1) g += sum * gauss_w[j / 2];
  }
  k *= h;
  g *= h;
  return {s, k, magnitude(k - g)};
}

template <class T>
struct ByError {
  bool operator()(const Piece<T>& a, const Piece<T>& b) const {
    if (a.error != b.error) return a.error < b.error;
    return a.seg.lo > b.seg.lo;
  }
};

template <class F>
auto run(F&& f, std::vector<Segment> segs, const Options& opt) {
  using T = std::decay_t<decltype(f(0.0))>;
  std::priority_queue<Piece<T>, std::vector<Piece<T>>, ByError<T>> heap;
  for (const auto& s : segs) {
    if (s.hi > s.lo) heap.push(gk15<F, T>(f, s));
  }
  auto totals = [&heap]() {
    auto copy = heap;
    std::vector<Piece<T>> all;
    all.reserve(copy.size());
    while (!copy.empty()) {
      all.push_back(copy.top());
      copy.pop();
    }
    std::sort(all.begin(), all.end(), [](const Piece<T>& a, const Piece<T>& b) {
      if (a.seg.kind != b.seg.kind) return a.seg.kind < b.seg.kind;
      if (a.seg.anchor != b.seg.anchor) return a.seg.anchor < b.seg.anchor;
      return a.seg.lo < b.seg.lo;
    });
    T v{};
    double e = 0.0;
    for (const auto& p : all) {
      v += p.value;
      e += p.error;
    }
    return std::pair<T, double>{v, e};
  };

  auto [value, err] = totals();
  // Running sums decide convergence; the reported value is re-summed in
  // positional order.
  while (!heap.empty()) {
    if (err <= std::max(opt.abs_tol, opt.rel_tol * magnitude(value))) break;
    if (static_cast<int>(heap.size()) >= opt.max_intervals) {
      std::ostringstream os;
      os << "quadrature did not converge: residual " << err << " after " << heap.size()
         << " intervals";
      throw NumericError(os.str(), err);
    }
    Piece<T> worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.seg.lo + worst.seg.hi);
    if (!(mid > worst.seg.lo && mid < worst.seg.hi)) {
      throw NumericError("quadrature interval underflow", err);
    }
    Segment left{worst.seg.lo, mid, worst.seg.kind, worst.seg.anchor};
    Segment right{mid, worst.seg.hi, worst.seg.kind, worst.seg.anchor};
    auto pl = gk15<F, T>(f, left);
    auto pr = gk15<F, T>(f, right);
    value += pl.value + pr.value - worst.value;
    err += pl.error + pr.error - worst.error;
    heap.push(pl);
    heap.push(pr);
  }
  auto [v, e] = totals();
  return Result<T>{v, e, static_cast<int>(heap.size())};
}

inline std::vector<double> sorted_unique(std::vector<double> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace detail

// Integral of f over [a, b] with optional interior breakpoints.
template <class F>
auto integrate(F&& f, double a, double b, std::vector<double> breaks = {},
               const Options& opt = {}) {
  if (!(b >= a)) throw ConfigError("integration bounds reversed");
  breaks.push_back(a);
  breaks.push_back(b);
  auto pts = detail::sorted_unique(std::move(breaks));
  std::vector<detail::Segment> segs;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] < a || pts[i + 1] > b) continue;
    segs.push_back({pts[i], pts[i + 1], detail::Kind::Finite, 0.0});
  }
  return detail::run(f, std::move(segs), opt);
}

// Integral of f over the real line. Breakpoints split the finite core; the
// two tails beyond the outermost breakpoints use x = p + (1 - t)/t.
template <class F>
auto integrate_real_line(F&& f, std::vector<double> breaks, const Options& opt = {}) {
  if (breaks.empty()) breaks.push_back(0.0);
  auto pts = detail::sorted_unique(std::move(breaks));
  std::vector<detail::Segment> segs;
  segs.push_back({0.0, 1.0, detail::Kind::LowerTail, pts.front()});
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    segs.push_back({pts[i], pts[i + 1], detail::Kind::Finite, 0.0});
  }
  segs.push_back({0.0, 1.0, detail::Kind::UpperTail, pts.back()});
  return detail::run(f, std::move(segs), opt);
}

// Integral over [a, inf).
template <class F>
auto integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
  std::vector<detail::Segment> segs{{0.0, 1.0, detail::Kind::UpperTail, a}};
  return detail::run(f, std::move(segs), opt);
}

}  // namespace homsim::quad
