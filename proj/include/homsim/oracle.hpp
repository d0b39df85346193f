#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>

#include "homsim/errors.hpp"
#include "homsim/fock.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"

// Brute-force reference for the coincidence formula: the two input wavepackets
// are written in a 2 (polarization) x 2 (spectral) orthonormal mode basis, the
// beam splitter is applied to the creation operators, and the Fock expansion of
// the output is enumerated term by term.
namespace homsim::oracle {

// Components of wavepacket B along the Gram-Schmidt basis built from A.
struct ModeDecomposition {
  cplx pol_parallel{1.0, 0.0};
  double pol_perp = 0.0;
  cplx spec_parallel{1.0, 0.0};
  double spec_perp = 0.0;
  PolarizationVector pol_e1 = pol::H();  // polarization of A
  PolarizationVector pol_e2 = pol::V();  // orthogonal direction carrying B's remainder

  static ModeDecomposition from_overlaps(cplx pol_par, cplx spec_par,
                                         const PolarizationVector& pa = pol::H()) {
    ModeDecomposition d;
    d.pol_parallel = pol_par;
    d.pol_perp = std::sqrt(std::max(0.0, 1.0 - std::norm(pol_par)));
    d.spec_parallel = spec_par;
    d.spec_perp = std::sqrt(std::max(0.0, 1.0 - std::norm(spec_par)));
    d.pol_e1 = pa;
    d.pol_e2 = orthogonal(pa);
    return d;
  }

  static ModeDecomposition of(const FockPair& pair) {
    ModeDecomposition d =
        from_overlaps(inner(pair.pol_a, pair.pol_b), overlap(pair.spec_a, pair.spec_b).value,
                      pair.pol_a);
    if (d.pol_perp > 1e-12) {
      d.pol_e2 = {(pair.pol_b.h - d.pol_parallel * pair.pol_a.h) / d.pol_perp,
                  (pair.pol_b.v - d.pol_parallel * pair.pol_a.v) / d.pol_perp};
    }
    return d;
  }
};

// Occupations: indices 0..3 at port a, 4..7 at port b; within a port the mode
// index is 2 * polarization + spectral (0 = parallel to A, 1 = perpendicular).
using Config = std::array<int, 8>;
using OutputDistribution = std::map<Config, double>;

namespace detail_ {

using Amplitudes = std::map<Config, cplx>;

inline Amplitudes apply_creation(const Amplitudes& in, const std::array<cplx, 8>& op) {
  Amplitudes out;
  for (const auto& [cfg, amp] : in) {
    for (int k = 0; k < 8; ++k) {
      if (op[k] == cplx(0.0, 0.0)) continue;
      Config next = cfg;
      next[k] += 1;
      out[next] += amp * op[k] * std::sqrt(static_cast<double>(next[k]));
    }
  }
  return out;
}

}  // namespace detail_

inline OutputDistribution expand(int m, int n, const BeamSplitter& bs,
                                 const ModeDecomposition& d) {
  detail::require(m >= 0 && n >= 0, "photon numbers must be >= 0");
  detail::require(m + n <= 12, "oracle limited to m + n <= 12");
  bs.validate();
  const double t = std::sqrt(bs.T), r = std::sqrt(bs.R);
  // Input A occupies mode 0 only.
  std::array<cplx, 8> opA{};
  opA[0] = t;
  opA[4] = r;
  // Input B: coefficient beta_q on input mode q, mapped b -> r a - t b.
  const std::array<cplx, 2> pc{d.pol_parallel, d.pol_perp};
  const std::array<cplx, 2> sc{d.spec_parallel, d.spec_perp};
  std::array<cplx, 8> opB{};
  for (int p = 0; p < 2; ++p) {
    for (int s = 0; s < 2; ++s) {
      const cplx beta = pc[p] * sc[s];
      opB[2 * p + s] = r * beta;
      opB[4 + 2 * p + s] = -t * beta;
    }
  }
  detail_::Amplitudes state{{Config{}, cplx(1.0, 0.0)}};
  for (int i = 0; i < m; ++i) state = detail_::apply_creation(state, opA);
  for (int i = 0; i < n; ++i) state = detail_::apply_creation(state, opB);
  const double norm = 1.0 / std::sqrt(std::tgamma(m + 1.0) * std::tgamma(n + 1.0));
  OutputDistribution dist;
  for (const auto& [cfg, amp] : state) {
    const double p = std::norm(amp * norm);
    if (p > 0.0) dist[cfg] = p;
  }
  return dist;
}

inline OutputDistribution expand(const FockPair& pair, const BeamSplitter& bs) {
  pair.validate();
  return expand(pair.m, pair.n, bs, ModeDecomposition::of(pair));
}

inline double total_probability(const OutputDistribution& dist) {
  double s = 0.0;
  for (const auto& [cfg, p] : dist) s += p;
  return s;
}

// Threshold-detector coincidence: each photon clicks with the efficiency of
// its polarization mode, independently.
inline double coincidence_from_distribution(const OutputDistribution& dist, const Detector& det_a,
                                            const Detector& det_b,
                                            const PolarizationVector& e1,
                                            const PolarizationVector& e2) {
  const std::array<double, 2> qa{1.0 - effective_efficiency(det_a, e1),
                                 1.0 - effective_efficiency(det_a, e2)};
  const std::array<double, 2> qb{1.0 - effective_efficiency(det_b, e1),
                                 1.0 - effective_efficiency(det_b, e2)};
  double total = 0.0;
  for (const auto& [cfg, p] : dist) {
    double miss_a = 1.0, miss_b = 1.0;
    for (int q = 0; q < 4; ++q) {
      miss_a *= std::pow(qa[q / 2], cfg[q]);
      miss_b *= std::pow(qb[q / 2], cfg[4 + q]);
    }
    total += p * (1.0 - miss_a) * (1.0 - miss_b);
  }
  return total;
}

inline double coincidence(const FockPair& pair, const Apparatus& app) {
  const auto d = ModeDecomposition::of(pair);
  return coincidence_from_distribution(expand(pair.m, pair.n, app.bs, d), app.det_a, app.det_b,
                                       d.pol_e1, d.pol_e2);
}

// Ideal-detector coincidence for a real total overlap c, split as cos Phi = c, cos Theta = 1.
inline double coincidence_ideal(int m, int n, const BeamSplitter& bs, double c) {
  const auto d = ModeDecomposition::from_overlaps(c, 1.0);
  return coincidence_from_distribution(expand(m, n, bs, d), Detector::ideal(), Detector::ideal(),
                                       d.pol_e1, d.pol_e2);
}

}  // namespace homsim::oracle
