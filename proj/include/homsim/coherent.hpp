#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/fock.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"

namespace homsim {

namespace bessel_detail {

inline constexpr double series_limit = 30.0;

// sum_{k>=1} (x/2)^(2k) / (k!)^2
inline double i0_series_minus_one(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 0.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

// e^{-x} I0(x) from the large-argument expansion.
inline double i0e_asymptotic(double x) {
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double next = term * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    if (next >= term) break;
    term = next;
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace bessel_detail

// Modified Bessel function of the first kind, order zero.
inline double bessel_i0(double x) {
  x = std::abs(x);
  if (x < bessel_detail::series_limit) return 1.0 + bessel_detail::i0_series_minus_one(x);
  return std::exp(x) * bessel_detail::i0e_asymptotic(x);
}

// e^{-x} I0(x), finite for all x.
inline double bessel_i0_scaled(double x) {
  x = std::abs(x);
  if (x < bessel_detail::series_limit) return std::exp(-x) * bessel_i0(x);
  return bessel_detail::i0e_asymptotic(x);
}

inline double poisson_pmf(double mu, int k) {
  if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(k * std::log(mu) - mu - std::lgamma(k + 1.0));
}

struct CoherentPair {
  double mu_a = 1.0;
  double mu_b = 1.0;
  PolarizationVector pol_a = pol::H();
  PolarizationVector pol_b = pol::H();
  SpectralProfile spec_a;
  SpectralProfile spec_b;

  void validate() const {
    detail::require(mu_a >= 0.0 && mu_b >= 0.0 && std::isfinite(mu_a) && std::isfinite(mu_b),
                    "mean photon numbers must be >= 0");
    pol_a.validate();
    pol_b.validate();
    spec_a.validate();
    spec_b.validate();
  }
};

// Poisson average of the Fock coincidence formula in closed form. With
//   G(x, y) = exp(muA (x - 1) + muB (y - 1)),  S(x, y) = G(x, y) I0(2 c sqrt(muA muB x y)),
// the four Bessel arguments carry the products muA R (1 - eta'_A), muB T (1 - eta'_B),
// muA T (1 - eta_A), muB R (1 - eta_B) and their lossless counterparts.
inline double total_coincidence(double mu_a, double mu_b, const BeamSplitter& bs, double c,
                                const Efficiencies& e) {
  detail::require(mu_a >= 0.0 && mu_b >= 0.0, "mean photon numbers must be >= 0");
  const double qaA = 1.0 - e.a_from_A, qaB = 1.0 - e.a_from_B;
  const double qbA = 1.0 - e.b_from_A, qbB = 1.0 - e.b_from_B;
  auto G = [&](double x, double y) { return std::exp(mu_a * (x - 1.0) + mu_b * (y - 1.0)); };
  auto S = [&](double x, double y) {
    const double z = 2.0 * c * std::sqrt(mu_a * mu_b * x * y);
    return std::exp(mu_a * (x - 1.0) + mu_b * (y - 1.0) + z) * bessel_i0_scaled(z);
  };
  const double both = 1.0 - G(qaA, qaB) - G(qbA, qbB) + G(qaA * qbA, qaB * qbB);
  const double side_a = S(bs.T, bs.R) - S(bs.T * qaA, bs.R * qaB);
  const double side_b = S(bs.R, bs.T) - S(bs.R * qbA, bs.T * qbB);
  return both - side_a - side_b;
}

inline int poisson_cutoff(double mu, double tail_mass) {
  if (mu == 0.0) return 0;
  double cdf = 0.0;
  int k = 0;
  for (; k < 100000; ++k) {
    cdf += poisson_pmf(mu, k);
    if (cdf >= 1.0 - tail_mass && k >= mu) break;
  }
  return k;
}

// Direct truncated double sum over photon numbers.
inline double total_coincidence_series(double mu_a, double mu_b, const BeamSplitter& bs,
                                       double c, const Efficiencies& e,
                                       double tail_mass = 1e-12) {
  detail::require(mu_a >= 0.0 && mu_b >= 0.0, "mean photon numbers must be >= 0");
  const int ma = poisson_cutoff(mu_a, tail_mass);
  const int nb = poisson_cutoff(mu_b, tail_mass);
  double sum = 0.0;
  for (int m = 0; m <= ma; ++m) {
    const double pm = poisson_pmf(mu_a, m);
    double row = 0.0;
    for (int n = 0; n <= nb; ++n) {
      row += poisson_pmf(mu_b, n) * coincidence_raw(m, n, bs, c, e);
    }
    sum += pm * row;
  }
  return sum;
}

inline double total_coincidence(const CoherentPair& pair, const Apparatus& app) {
  pair.validate();
  app.validate();
  const double c = cos_phi(pair.pol_a, pair.pol_b) * overlap(pair.spec_a, pair.spec_b).magnitude;
  return total_coincidence(pair.mu_a, pair.mu_b, app.bs, c,
                           Efficiencies::of(app, pair.pol_a, pair.pol_b));
}

inline double coherent_pair_visibility(double mu_a, double mu_b, const BeamSplitter& bs,
                                       double c, const Efficiencies& e) {
  const double p0 = total_coincidence(mu_a, mu_b, bs, c, e);
  const double pinf = total_coincidence(mu_a, mu_b, bs, 0.0, e);
  if (std::abs(pinf) < 1e-300) throw NumericError("visibility undefined: P(inf) = 0");
  return (pinf - p0) / pinf;
}

inline double visibility(const CoherentPair& pair, const Apparatus& app) {
  pair.validate();
  app.validate();
  const double c = cos_phi(pair.pol_a, pair.pol_b) * overlap(pair.spec_a, pair.spec_b).magnitude;
  return coherent_pair_visibility(pair.mu_a, pair.mu_b, app.bs, c,
                                  Efficiencies::of(app, pair.pol_a, pair.pol_b));
}

// Equal-intensity, 50/50, ideal-detector visibility (I0(mu cos Phi) - 1) / (2 sinh^2(mu/2)).
// mu = 0 returns the limit cos^2(Phi) / 2.
inline double coherent_visibility(double mu, double phi) {
  detail::require(mu >= 0.0 && std::isfinite(mu), "mean photon number must be >= 0");
  const double cp = std::cos(phi);
  if (mu == 0.0) return 0.5 * cp * cp;
  const double x = std::abs(mu * cp);
  if (mu < 1.0) {
    const double s = std::sinh(0.5 * mu);
    return bessel_detail::i0_series_minus_one(x) / (2.0 * s * s);
  }
  const double em = std::exp(-mu);
  const double num = bessel_i0_scaled(x) * std::exp(x - mu) - em;
  const double d = -std::expm1(-mu);
  return 2.0 * num / (d * d);
}

struct RatioMap {
  std::vector<double> mu_ratio;  // muA / muB
  std::vector<double> tr_ratio;  // T / R
  std::vector<std::vector<double>> visibility;  // [mu_ratio index][tr_ratio index]
  std::size_t argmax_mu = 0;
  std::size_t argmax_tr = 0;
};

// muA = mu sqrt(r), muB = mu / sqrt(r) keeps the geometric mean fixed; T = rho / (1 + rho).
inline RatioMap visibility_ratio_map(double mu, const std::vector<double>& mu_ratios,
                                     const std::vector<double>& tr_ratios,
                                     const PolarizationVector& pa, const PolarizationVector& pb,
                                     const Detector& det_a, const Detector& det_b,
                                     double spectral_overlap = 1.0, unsigned threads = 1) {
  detail::require(mu > 0.0, "mean photon number must be > 0");
  for (double r : mu_ratios) detail::require(r > 0.0, "ratios must be > 0");
  for (double r : tr_ratios) detail::require(r > 0.0, "ratios must be > 0");
  RatioMap out;
  out.mu_ratio = mu_ratios;
  out.tr_ratio = tr_ratios;
  const double c = cos_phi(pa, pb) * spectral_overlap;
  Apparatus app{BeamSplitter{}, det_a, det_b};
  const auto eff = Efficiencies::of(app, pa, pb);
  const std::size_t nr = mu_ratios.size(), nt = tr_ratios.size();
  auto flat = parallel_map(
      nr * nt,
      [&](std::size_t k) {
        const double r = mu_ratios[k / nt], rho = tr_ratios[k % nt];
        const double T = rho / (1.0 + rho);
        const BeamSplitter bs{T, 1.0 / (1.0 + rho)};
        return coherent_pair_visibility(mu * std::sqrt(r), mu / std::sqrt(r), bs, c, eff);
      },
      threads);
  out.visibility.assign(nr, std::vector<double>(nt));
  double best = -INFINITY;
  for (std::size_t i = 0; i < nr; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double v = flat[i * nt + j];
      out.visibility[i][j] = v;
      if (v > best) {
        best = v;
        out.argmax_mu = i;
        out.argmax_tr = j;
      }
    }
  }
  return out;
}

}  // namespace homsim
