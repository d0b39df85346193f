#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"

namespace homsim {

struct BeamSplitter {
  double T = 0.5;
  double R = 0.5;

  static BeamSplitter from_transmissivity(double t) { return {t, 1.0 - t}; }
  void validate() const {
    detail::require(T >= 0.0 && T <= 1.0 && R >= 0.0 && R <= 1.0,
                    "beam splitter T and R must lie in [0,1]");
    detail::require(std::abs(T + R - 1.0) <= 1e-12, "beam splitter requires T + R = 1");
  }
  BeamSplitter swapped() const { return {R, T}; }
};

struct Apparatus {
  BeamSplitter bs;
  Detector det_a = Detector::ideal();  // output port a
  Detector det_b = Detector::ideal();  // output port b

  static Apparatus ideal(double T = 0.5) {
    return {BeamSplitter::from_transmissivity(T), Detector::ideal(), Detector::ideal()};
  }
  void validate() const {
    bs.validate();
    det_a.validate();
    det_b.validate();
  }
};

struct FockPair {
  int m = 1;
  int n = 1;
  PolarizationVector pol_a = pol::H();
  PolarizationVector pol_b = pol::H();
  SpectralProfile spec_a;
  SpectralProfile spec_b;

  void validate() const {
    detail::require(m >= 0 && n >= 0, "photon numbers must be >= 0");
    pol_a.validate();
    pol_b.validate();
    spec_a.validate();
    spec_b.validate();
  }
};

// Per-detector efficiencies seen by the photons of each input arm.
struct Efficiencies {
  double a_from_A = 1.0, a_from_B = 1.0;  // detector at port a
  double b_from_A = 1.0, b_from_B = 1.0;  // detector at port b

  static Efficiencies ideal() { return {}; }
  static Efficiencies of(const Apparatus& app, const PolarizationVector& pa,
                         const PolarizationVector& pb) {
    return {effective_efficiency(app.det_a, pa), effective_efficiency(app.det_a, pb),
            effective_efficiency(app.det_b, pa), effective_efficiency(app.det_b, pb)};
  }
};

// Binomial coefficient; exact integer arithmetic up to n = 62, log-gamma beyond.
inline double binomial(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0.0;
  if (k > n - k) k = n - k;
  if (n <= 62) {
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    return static_cast<double>(static_cast<std::uint64_t>(r));
  }
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(n - k + 1.0)));
}

// Sum_j C(m,j) C(n,j) c^(2j).
inline double bunching_factor(int m, int n, double c) {
  detail::require(m >= 0 && n >= 0, "photon numbers must be >= 0");
  const double c2 = c * c;
  double sum = 0.0, pw = 1.0;
  const int top = std::min(m, n);
  for (int j = 0; j <= top; ++j) {
    sum += binomial(m, j) * binomial(n, j) * pw;
    pw *= c2;
  }
  return sum;
}

// Probability that every photon leaves through port a (first) or port b (second).
inline std::pair<double, double> p_all_one_side(int m, int n, const BeamSplitter& bs,
                                                double c) {
  const double P = bunching_factor(m, n, c);
  return {std::pow(bs.T, m) * std::pow(bs.R, n) * P, std::pow(bs.T, n) * std::pow(bs.R, m) * P};
}

// Unchecked coincidence formula
//   P = Da Db - (T^m R^n Da + T^n R^m Db) * Bunch(m, n, c).
inline double coincidence_raw(int m, int n, const BeamSplitter& bs, double c,
                              const Efficiencies& e) {
  const double Da = 1.0 - std::pow(1.0 - e.a_from_A, m) * std::pow(1.0 - e.a_from_B, n);
  const double Db = 1.0 - std::pow(1.0 - e.b_from_A, m) * std::pow(1.0 - e.b_from_B, n);
  const double P = bunching_factor(m, n, c);
  return Da * Db -
         (std::pow(bs.T, m) * std::pow(bs.R, n) * Da + std::pow(bs.T, n) * std::pow(bs.R, m) * Db) * P;
}

inline void check_probability(double p, const char* what) {
  if (p < -1e-9 || p > 1.0 + 1e-9) {
    throw InvalidRegime(std::string(what) + " outside [0,1]: " + std::to_string(p),
                        p < 0.0 ? -p : p - 1.0);
  }
}

inline double coincidence(int m, int n, const BeamSplitter& bs, double c,
                          const Efficiencies& e) {
  detail::require(m + n >= 1, "coincidence requires m + n >= 1");
  const double p = coincidence_raw(m, n, bs, c, e);
  check_probability(p, "coincidence probability");
  return p;
}

// Total mode overlap c = cos(Phi) cos(Theta) of the two input wavepackets.
inline double mode_overlap(const FockPair& pair) {
  return cos_phi(pair.pol_a, pair.pol_b) * overlap(pair.spec_a, pair.spec_b).magnitude;
}

inline std::pair<double, double> p_all_one_side(const FockPair& pair, const BeamSplitter& bs) {
  return p_all_one_side(pair.m, pair.n, bs, mode_overlap(pair));
}

inline double coincidence(const FockPair& pair, const Apparatus& app) {
  pair.validate();
  app.validate();
  return coincidence(pair.m, pair.n, app.bs, mode_overlap(pair),
                     Efficiencies::of(app, pair.pol_a, pair.pol_b));
}

// (P(inf) - P(0)) / P(inf) with the distinguishable baseline at c = 0.
inline double visibility(int m, int n, const BeamSplitter& bs, double c, const Efficiencies& e) {
  const double p0 = coincidence(m, n, bs, c, e);
  const double pinf = coincidence(m, n, bs, 0.0, e);
  if (std::abs(pinf) < 1e-300) throw NumericError("visibility undefined: P(inf) = 0");
  return (pinf - p0) / pinf;
}

inline double visibility(const FockPair& pair, const Apparatus& app) {
  pair.validate();
  app.validate();
  return visibility(pair.m, pair.n, app.bs, mode_overlap(pair),
                    Efficiencies::of(app, pair.pol_a, pair.pol_b));
}

struct DipPoint {
  double tau;
  double p_co;
};

// Coincidence versus the delay of arm B relative to arm A.
inline std::vector<DipPoint> dip_curve(const FockPair& pair, const std::vector<double>& taus,
                                       const Apparatus& app, unsigned threads = 1) {
  pair.validate();
  app.validate();
  const auto eff = Efficiencies::of(app, pair.pol_a, pair.pol_b);
  const double cphi = cos_phi(pair.pol_a, pair.pol_b);
  return parallel_map(
      taus.size(),
      [&](std::size_t i) {
        const auto sb = pair.spec_b.with_delay(pair.spec_a.delay + taus[i]);
        const double c = cphi * overlap(pair.spec_a, sb).magnitude;
        return DipPoint{taus[i], coincidence(pair.m, pair.n, app.bs, c, eff)};
      },
      threads);
}

// Visibility for polarization mismatch Phi and perfect spectral overlap.
inline std::vector<double> visibility_vs_polarization(int m, int n,
                                                      const std::vector<double>& phis,
                                                      const Apparatus& app = Apparatus::ideal()) {
  std::vector<double> out;
  out.reserve(phis.size());
  for (double phi : phis) {
    const auto pb = rotate(pol::H(), phi);
    out.push_back(visibility(m, n, app.bs, std::abs(std::cos(phi)),
                             Efficiencies::of(app, pol::H(), pb)));
  }
  return out;
}

}  // namespace homsim
