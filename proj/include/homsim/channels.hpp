#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/fock.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"

namespace homsim {

// Applied as broadening after depolarization after amplitude damping.
struct ChannelSpec {
  double gamma = 0.0;
  double p_depol = 0.0;
  double xi = 1.0;

  static ChannelSpec identity() { return {}; }
  void validate() const {
    detail::require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0,1]");
    detail::require(p_depol >= 0.0 && p_depol <= 1.0, "p_depol must lie in [0,1]");
    detail::require(xi > 0.0 && std::isfinite(xi), "xi must be > 0");
  }
};

// Pure single-arm source: n photons sharing one polarization and spectrum.
struct SourceSpec {
  int n = 1;
  PolarizationVector pol = pol::H();
  SpectralProfile spec;
};

struct NumberWeight {
  int k;
  double p;
};

struct MixedSource {
  std::vector<NumberWeight> number_dist;
  PolarizationDensity pol;
  SpectralProfile spec;

  static MixedSource from_pure(const SourceSpec& s) {
    return {{{s.n, 1.0}}, PolarizationDensity::pure(s.pol), s.spec};
  }
  void validate() const {
    double total = 0.0;
    for (const auto& w : number_dist) {
      detail::require(w.k >= 0, "photon numbers must be >= 0");
      detail::require(w.p >= 0.0, "number probabilities must be >= 0");
      total += w.p;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "number distribution must sum to 1");
    pol.validate();
    spec.validate();
  }
};

// Binomial(n, 1 - gamma) survivors, listed from k = n down to k = 0.
inline std::vector<NumberWeight> damp_number(int n, double gamma) {
  detail::require(n >= 0, "photon number must be >= 0");
  detail::require(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0,1]");
  std::vector<NumberWeight> out;
  out.reserve(n + 1);
  for (int k = n; k >= 0; --k) {
    out.push_back({k, binomial(n, k) * std::pow(1.0 - gamma, k) * std::pow(gamma, n - k)});
  }
  return out;
}

inline std::vector<NumberWeight> damp_number(const std::vector<NumberWeight>& in, double gamma) {
  int top = 0;
  for (const auto& w : in) top = std::max(top, w.k);
  std::vector<double> acc(top + 1, 0.0);
  for (const auto& w : in) {
    for (const auto& d : damp_number(w.k, gamma)) acc[d.k] += w.p * d.p;
  }
  std::vector<NumberWeight> out;
  for (int k = top; k >= 0; --k) out.push_back({k, acc[k]});
  return out;
}

inline MixedSource apply_channel(const MixedSource& src, const ChannelSpec& ch) {
  ch.validate();
  return {damp_number(src.number_dist, ch.gamma), depolarize(src.pol, ch.p_depol),
          src.spec.broadened(ch.xi)};
}

inline MixedSource apply_channel(const SourceSpec& src, const ChannelSpec& ch) {
  return apply_channel(MixedSource::from_pure(src), ch);
}

// Coincidence of two mixed sources as the weighted sum over photon-number and
// polarization eigen-branches of the unchecked Fock formula. Vacuum-vacuum
// contributes zero. spectral_overlap < 0 means compute it from the profiles.
inline double mixed_coincidence(const MixedSource& a, const MixedSource& b, const Apparatus& app,
                                double spectral_overlap = -1.0) {
  a.validate();
  b.validate();
  app.validate();
  const double cs =
      spectral_overlap >= 0.0 ? spectral_overlap : overlap(a.spec, b.spec).magnitude;
  const auto ba = eigendecompose(a.pol);
  const auto bb = eigendecompose(b.pol);
  double total = 0.0;
  for (const auto& pa : ba) {
    if (pa.weight == 0.0) continue;
    for (const auto& pb : bb) {
      if (pb.weight == 0.0) continue;
      const double c = cos_phi(pa.state, pb.state) * cs;
      const auto eff = Efficiencies::of(app, pa.state, pb.state);
      double branch = 0.0;
      for (const auto& na : a.number_dist) {
        for (const auto& nb : b.number_dist) {
          if (na.k + nb.k == 0 || na.p == 0.0 || nb.p == 0.0) continue;
          branch += na.p * nb.p * coincidence_raw(na.k, nb.k, app.bs, c, eff);
        }
      }
      total += pa.weight * pb.weight * branch;
    }
  }
  return total;
}

// Visibility with the distinguishable baseline (zero spectral overlap).
inline double mixed_visibility(const MixedSource& a, const MixedSource& b, const Apparatus& app) {
  const double cs = overlap(a.spec, b.spec).magnitude;
  const double p0 = mixed_coincidence(a, b, app, cs);
  const double pinf = mixed_coincidence(a, b, app, 0.0);
  if (std::abs(pinf) < 1e-300) throw NumericError("visibility undefined: P(inf) = 0");
  return (pinf - p0) / pinf;
}

struct ChannelGrid {
  std::vector<double> x, y;
  std::vector<std::vector<double>> visibility;  // [x index][y index]
};

// Visibility over a 2-D grid; make_channels maps (x, y) to the two arm channels.
inline ChannelGrid channel_visibility_contour(
    const SourceSpec& src_a, const SourceSpec& src_b, const Apparatus& app,
    const std::vector<double>& xs, const std::vector<double>& ys,
    const std::function<std::pair<ChannelSpec, ChannelSpec>(double, double)>& make_channels,
    unsigned threads = 1) {
  ChannelGrid g{xs, ys, {}};
  const std::size_t ny = ys.size();
  auto flat = parallel_map(
      xs.size() * ny,
      [&](std::size_t k) {
        const auto [ca, cb] = make_channels(xs[k / ny], ys[k % ny]);
        return mixed_visibility(apply_channel(src_a, ca), apply_channel(src_b, cb), app);
      },
      threads);
  g.visibility.assign(xs.size(), std::vector<double>(ny));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ny; ++j) g.visibility[i][j] = flat[i * ny + j];
  }
  return g;
}

}  // namespace homsim
