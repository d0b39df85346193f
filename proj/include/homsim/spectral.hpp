#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/quadrature.hpp"

namespace homsim {

using cplx = std::complex<double>;

enum class Shape { Gaussian, Sinc, Lorentzian, Sech };

inline const char* shape_name(Shape s) {
  switch (s) {
    case Shape::Gaussian: return "gaussian";
    case Shape::Sinc: return "sinc";
    case Shape::Lorentzian: return "lorentzian";
    case Shape::Sech: return "sech";
  }
  return "?";
}

inline Shape parse_shape(const std::string& s) {
  if (s == "gaussian" || s == "gauss") return Shape::Gaussian;
  if (s == "sinc") return Shape::Sinc;
  if (s == "lorentzian" || s == "lorentz") return Shape::Lorentzian;
  if (s == "sech") return Shape::Sech;
  throw ConfigError("unknown spectral shape '" + s + "'");
}

inline constexpr Shape all_shapes[] = {Shape::Gaussian, Shape::Sinc, Shape::Lorentzian,
                                       Shape::Sech};

// Normalized single-photon spectral amplitude.
//   width: sigma (Gaussian, sech), duration T in ps (sinc), FWHM gamma (Lorentzian)
//   center in rad/ps, delay in ps.
// Gaussian  exp(-x^2 / (4 sigma^2))        |phi|^2 has standard deviation sigma
// Sinc      sin(T x / 2) / (x / 2)         rectangular time aperture of length T
// Lorentz   1 / (x^2 + (gamma/2)^2)
// Sech      sech(x / sigma)
struct SpectralProfile {
  Shape shape = Shape::Gaussian;
  double center = 1.0;
  double width = 1.0;
  double delay = 0.0;
  double broadening = 1.0;

  void validate() const {
    detail::require(std::isfinite(center) && center > 0.0, "spectral center must be > 0");
    detail::require(std::isfinite(width) && width > 0.0, "spectral width must be > 0");
    detail::require(std::isfinite(broadening) && broadening > 0.0,
                    "broadening must be > 0");
    detail::require(std::isfinite(delay), "delay must be finite");
  }

  // Shape parameter after broadening. Sinc durations shrink so the spectrum widens.
  double effective_width() const {
    return shape == Shape::Sinc ? width / broadening : width * broadening;
  }

  SpectralProfile with_delay(double tau) const {
    auto p = *this;
    p.delay = tau;
    return p;
  }
  SpectralProfile with_width(double w) const {
    auto p = *this;
    p.width = w;
    return p;
  }
  SpectralProfile with_center(double w0) const {
    auto p = *this;
    p.center = w0;
    return p;
  }
  SpectralProfile broadened(double xi) const {
    auto p = *this;
    p.broadening *= xi;
    return p;
  }
};

inline SpectralProfile gaussian_profile(double center, double sigma, double delay = 0.0) {
  return {Shape::Gaussian, center, sigma, delay, 1.0};
}
inline SpectralProfile sinc_profile(double center, double duration, double delay = 0.0) {
  return {Shape::Sinc, center, duration, delay, 1.0};
}
inline SpectralProfile lorentzian_profile(double center, double gamma, double delay = 0.0) {
  return {Shape::Lorentzian, center, gamma, delay, 1.0};
}
inline SpectralProfile sech_profile(double center, double sigma, double delay = 0.0) {
  return {Shape::Sech, center, sigma, delay, 1.0};
}

struct OverlapResult {
  cplx value;
  double magnitude = 0.0;
  double theta = 0.0;
};

namespace spectral_detail {

inline constexpr double pi = std::numbers::pi;

inline double sech(double x) {
  const double a = std::abs(x);
  if (a > 700.0) return 0.0;
  return 1.0 / std::cosh(a);
}

// sin(u)/u with a series near zero.
inline double sinc_u(double u) {
  if (std::abs(u) < 1e-4) return 1.0 - u * u / 6.0;
  return std::sin(u) / u;
}

// Root of sin(u)/u = 1/sqrt(2).
inline double sinc_half_power_u() {
  static const double u = [] {
    double lo = 1.0, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (sinc_u(mid) * sinc_u(mid) > 0.5) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return u;
}

// Characteristic frequency scale used for breakpoints and windows.
inline double frequency_scale(const SpectralProfile& p) {
  const double w = p.effective_width();
  switch (p.shape) {
    case Shape::Gaussian: return w;
    case Shape::Sinc: return 2.0 * pi / w;
    case Shape::Lorentzian: return 0.5 * w;
    case Shape::Sech: return w;
  }
  return w;
}

inline double time_scale(const SpectralProfile& p) {
  const double w = p.effective_width();
  switch (p.shape) {
    case Shape::Gaussian: return 1.0 / w;
    case Shape::Sinc: return 0.5 * w;
    case Shape::Lorentzian: return 2.0 / w;
    case Shape::Sech: return 2.0 / (pi * w);
  }
  return 1.0;
}

}  // namespace spectral_detail

// Real envelope at offset x = omega - center, without the delay phase.
inline double envelope(const SpectralProfile& p, double x) {
  using namespace spectral_detail;
  const double w = p.effective_width();
  switch (p.shape) {
    case Shape::Gaussian:
      return std::pow(w * std::sqrt(2.0 * pi), -0.5) * std::exp(-x * x / (4.0 * w * w));
    case Shape::Sinc:
      return std::sqrt(w / (2.0 * pi)) * sinc_u(0.5 * w * x);
    case Shape::Lorentzian: {
      const double h = 0.5 * w;
      return std::sqrt(2.0 * h * h * h / pi) / (x * x + h * h);
    }
    case Shape::Sech:
      return std::sqrt(0.5 / w) * sech(x / w);
  }
  return 0.0;
}

inline cplx amplitude(const SpectralProfile& p, double omega) {
  const double e = envelope(p, omega - p.center);
  if (p.delay == 0.0) return {e, 0.0};
  return std::polar(e, omega * p.delay);
}

// Unitary Fourier transform of the envelope, psi(t) = exp(-i w0 (t - tau)) F(t - tau).
inline double time_envelope(const SpectralProfile& p, double s) {
  using namespace spectral_detail;
  const double w = p.effective_width();
  switch (p.shape) {
    case Shape::Gaussian:
      return w * std::sqrt(2.0) * std::pow(w * std::sqrt(2.0 * pi), -0.5) *
             std::exp(-w * w * s * s);
    case Shape::Sinc:
      return std::abs(s) < 0.5 * w ? 1.0 / std::sqrt(w) : 0.0;
    case Shape::Lorentzian: {
      const double h = 0.5 * w;
      return std::sqrt(h) * std::exp(-h * std::abs(s));
    }
    case Shape::Sech:
      return 0.5 * std::sqrt(pi * w) * sech(0.5 * pi * w * s);
  }
  return 0.0;
}

inline OverlapResult make_overlap(cplx v) {
  OverlapResult r;
  r.value = v;
  r.magnitude = std::abs(v);
  if (r.magnitude > 1.0 + 1e-9) {
    throw NumericError("overlap magnitude exceeds 1", r.magnitude - 1.0);
  }
  r.magnitude = std::min(r.magnitude, 1.0);
  r.theta = std::acos(r.magnitude);
  return r;
}

// Closed-form overlap of two Gaussian profiles including delays and detuning.
inline cplx gaussian_profile_overlap(const SpectralProfile& a, const SpectralProfile& b) {
  using spectral_detail::pi;
  const double sa = a.effective_width(), sb = b.effective_width();
  const double d = b.center - a.center;
  const double tau = b.delay - a.delay;
  const double A = 1.0 / (4.0 * sa * sa) + 1.0 / (4.0 * sb * sb);
  const cplx B(d / (2.0 * sb * sb), tau);
  const double C = -d * d / (4.0 * sb * sb);
  const double norm = 1.0 / std::sqrt(2.0 * pi * sa * sb);
  const cplx expo = B * B / (4.0 * A) + C;
  // Phase exp(i a tau) from shifting omega = a.center + x, plus the delay of a.
  const cplx phase = std::polar(1.0, a.center * tau);
  return norm * std::sqrt(pi / A) * std::exp(expo) * phase;
}

// <phi_a|phi_b> by time-domain quadrature (Parseval). Each envelope's transform
// is either compactly supported or exponentially decaying.
inline OverlapResult overlap(const SpectralProfile& a, const SpectralProfile& b,
                             const quad::Options& opt = {}) {
  a.validate();
  b.validate();
  if (a.shape == Shape::Gaussian && b.shape == Shape::Gaussian) {
    return make_overlap(gaussian_profile_overlap(a, b));
  }
  using spectral_detail::time_scale;
  const double dw = a.center - b.center;
  const cplx phase0 = std::polar(1.0, -a.center * a.delay + b.center * b.delay);
  auto f = [&](double t) -> cplx {
    const double v = time_envelope(a, t - a.delay) * time_envelope(b, t - b.delay);
    if (v == 0.0) return {0.0, 0.0};
    return dw == 0.0 ? cplx(v, 0.0) : std::polar(v, dw * t);
  };
  std::vector<double> breaks{a.delay, b.delay};
  for (const auto* p : {&a, &b}) {
    const double ts = time_scale(*p);
    for (double k : {1.0, 3.0, 8.0}) {
      breaks.push_back(p->delay - k * ts);
      breaks.push_back(p->delay + k * ts);
    }
  }
  cplx v;
  if (a.shape == Shape::Sinc || b.shape == Shape::Sinc) {
    double lo = -INFINITY, hi = INFINITY;
    for (const auto* p : {&a, &b}) {
      if (p->shape != Shape::Sinc) continue;
      const double half = 0.5 * p->effective_width();
      lo = std::max(lo, p->delay - half);
      hi = std::min(hi, p->delay + half);
    }
    if (!(hi > lo)) return make_overlap({0.0, 0.0});
    std::vector<double> inner;
    for (double x : breaks) {
      if (x > lo && x < hi) inner.push_back(x);
    }
    v = quad::integrate(f, lo, hi, inner, opt).value;
  } else {
    v = quad::integrate_real_line(f, breaks, opt).value;
  }
  return make_overlap(phase0 * v);
}

// Direct frequency-domain quadrature over a finite window; used as a cross-check.
inline OverlapResult overlap_frequency_domain(const SpectralProfile& a,
                                              const SpectralProfile& b,
                                              double window_widths = 40.0,
                                              const quad::Options& opt = {}) {
  using spectral_detail::frequency_scale;
  const double lo = std::min(a.center - window_widths * frequency_scale(a),
                             b.center - window_widths * frequency_scale(b));
  const double hi = std::max(a.center + window_widths * frequency_scale(a),
                             b.center + window_widths * frequency_scale(b));
  std::vector<double> breaks;
  for (const auto* p : {&a, &b}) {
    const double fs = frequency_scale(*p);
    const int n = static_cast<int>(std::ceil(window_widths));
    for (int k = -n; k <= n; ++k) breaks.push_back(p->center + k * fs);
  }
  auto f = [&](double w) { return std::conj(amplitude(a, w)) * amplitude(b, w); };
  return make_overlap(quad::integrate(f, lo, hi, breaks, opt).value);
}

// Overlap of two Gaussian amplitudes exp(-x^2/(2 s^2)) with amplitude widths s.
inline double gaussian_overlap_closed_form(double sigma_b, double sigma_c, double w0_b,
                                           double w0_c) {
  detail::require(sigma_b > 0.0 && sigma_c > 0.0, "Gaussian widths must be > 0");
  const double s2 = sigma_b * sigma_b + sigma_c * sigma_c;
  const double d = w0_b - w0_c;
  return std::sqrt(2.0 * sigma_b * sigma_c / s2) * std::exp(-d * d / (2.0 * s2));
}

// Integral of |phi|^2 over the real line. Sinc and Lorentzian tails beyond the
// window are added analytically.
inline double normalization(const SpectralProfile& p, const quad::Options& opt = {}) {
  using spectral_detail::pi;
  p.validate();
  const double w = p.effective_width();
  auto f = [&](double x) {
    const double e = envelope(p, x);
    return e * e;
  };
  switch (p.shape) {
    case Shape::Gaussian:
    case Shape::Sech: {
      std::vector<double> b;
      for (int k = -8; k <= 8; ++k) b.push_back(k * w);
      return quad::integrate_real_line(f, b, opt).value;
    }
    case Shape::Lorentzian: {
      const double h = 0.5 * w;
      const double X = 200.0 * h;
      std::vector<double> b;
      for (int k = -20; k <= 20; ++k) b.push_back(k * h);
      const double core = quad::integrate(f, -X, X, b, opt).value;
      // 2 * int_X^inf (2h^3/pi) / (x^2+h^2)^2 dx
      const double th = std::atan(h / X);
      const double tail = 2.0 * (2.0 * h * h * h / pi) / (2.0 * h * h * h) *
                          (th - 0.5 * std::sin(2.0 * th));
      return core + tail;
    }
    case Shape::Sinc: {
      // |phi|^2 = (2 / (pi T)) sin^2(u) / (4 u^2 / T^2) dx with u = T x / 2, i.e.
      // (1/pi) sin^2(u)/u^2 du. Window of 400 lobes, tails by asymptotic series.
      const int lobes = 200;
      const double U = lobes * pi;
      std::vector<double> b;
      for (int k = -lobes; k <= lobes; ++k) b.push_back(k * pi);
      auto g = [](double u) {
        const double s = spectral_detail::sinc_u(u);
        return s * s / pi;
      };
      const double core = quad::integrate(g, -U, U, b, opt).value;
      // int_U^inf sin^2(u)/u^2 du at U = k pi: 1/(2U) - 1/(4U^3) + 3/(4U^5) ...
      const double tail = 2.0 / pi *
                          (1.0 / (2.0 * U) - 1.0 / (4.0 * U * U * U) +
                           3.0 / (4.0 * std::pow(U, 5)));
      return core + tail;
    }
  }
  return 0.0;
}

// FWHM of |phi|^2 in rad/ps. Lorentzian returns its defining parameter gamma.
inline double fwhm(const SpectralProfile& p) {
  p.validate();
  const double w = p.effective_width();
  switch (p.shape) {
    case Shape::Gaussian:
      return 2.0 * w * std::sqrt(2.0 * std::numbers::ln2);
    case Shape::Lorentzian:
      return w;
    case Shape::Sinc:
    case Shape::Sech: {
      const double peak = envelope(p, 0.0);
      const double target = 0.5 * peak * peak;
      auto below = [&](double x) {
        const double e = envelope(p, x);
        return e * e < target;
      };
      double lo = 0.0;
      double hi = p.shape == Shape::Sinc ? 2.0 * std::numbers::pi / w : w;
      int grow = 0;
      while (!below(hi)) {
        hi *= 2.0;
        if (++grow > 60) throw NumericError("fwhm: failed to bracket half maximum");
      }
      if (p.shape == Shape::Sinc) hi *= 0.999999;
      if (!below(hi)) throw NumericError("fwhm: failed to bracket half maximum");
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (below(mid)) hi = mid; else lo = mid;
      }
      return lo + hi;
    }
  }
  return 0.0;
}

// Shape parameter (before broadening) giving the requested FWHM.
inline double width_for_fwhm(Shape s, double fwhm_rad_ps) {
  detail::require(fwhm_rad_ps > 0.0, "FWHM must be > 0");
  switch (s) {
    case Shape::Gaussian:
      return fwhm_rad_ps / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    case Shape::Lorentzian:
      return fwhm_rad_ps;
    case Shape::Sinc:
      return 4.0 * spectral_detail::sinc_half_power_u() / fwhm_rad_ps;
    case Shape::Sech:
      return fwhm_rad_ps / (2.0 * std::acosh(std::sqrt(2.0)));
  }
  return 0.0;
}

inline SpectralProfile profile_from_fwhm(Shape s, double center, double fwhm_rad_ps,
                                         double delay = 0.0) {
  return {s, center, width_for_fwhm(s, fwhm_rad_ps), delay, 1.0};
}

}  // namespace homsim
