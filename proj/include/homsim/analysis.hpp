#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "homsim/fock.hpp"
#include "homsim/optimize.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"
#include "homsim/units.hpp"

namespace homsim {

struct MatchResult {
  double overlap = 0.0;      // best |<phi_A|phi_B>|
  double width_b = 0.0;      // optimal shape parameter of B
  double fwhm_ratio = 0.0;   // FWHM_A / FWHM_B at the optimum
};

// Photon A fixed; B's width parameter is tuned (same center, no delay) to
// maximize the spectral overlap.
inline MatchResult best_spectral_match(const SpectralProfile& a, Shape shape_b,
                                       double search_decades = 1.0) {
  a.validate();
  const double w0 = width_for_fwhm(shape_b, fwhm(a));
  const SpectralProfile b0{shape_b, a.center, w0, a.delay, 1.0};
  auto f = [&](double lw) { return overlap(a, b0.with_width(std::exp(lw))).magnitude; };
  const double l0 = std::log(w0), span = search_decades * std::log(10.0);
  const auto m = scan_and_refine(f, linspace(l0 - span, l0 + span, 41), 1e-9);
  MatchResult r;
  r.overlap = m.value;
  r.width_b = std::exp(m.x);
  r.fwhm_ratio = fwhm(a) / fwhm(b0.with_width(r.width_b));
  return r;
}

struct TableEntry {
  double visibility;
  double fwhm_ratio;
};

// Rows: shape of photon A (fixed at the given FWHM); columns: shape of photon B.
struct ShapeTable {
  std::array<std::array<TableEntry, 4>, 4> m11{};
  std::array<std::array<TableEntry, 4>, 4> m22{};
};

inline ShapeTable max_visibility_tables(double center, double fwhm_rad_ps, unsigned threads = 1) {
  ShapeTable t;
  const auto results = parallel_map(
      16,
      [&](std::size_t k) {
        const auto a = profile_from_fwhm(all_shapes[k / 4], center, fwhm_rad_ps);
        return best_spectral_match(a, all_shapes[k % 4]);
      },
      threads);
  const auto bs = BeamSplitter{};
  const auto eff = Efficiencies::ideal();
  for (std::size_t k = 0; k < 16; ++k) {
    const auto& r = results[k];
    t.m11[k / 4][k % 4] = {visibility(1, 1, bs, r.overlap, eff), r.fwhm_ratio};
    t.m22[k / 4][k % 4] = {visibility(2, 2, bs, r.overlap, eff), r.fwhm_ratio};
  }
  return t;
}

struct SpectralContour {
  std::vector<double> x, y;                     // as supplied
  std::vector<std::vector<double>> visibility;  // [x index][y index]
};

// Visibility as B's center (x) and FWHM (y) vary, photon A fixed.
inline SpectralContour spectral_visibility_contour(const SpectralProfile& a, Shape shape_b,
                                                   const std::vector<double>& centers,
                                                   const std::vector<double>& fwhms, int m, int n,
                                                   const Apparatus& app = Apparatus::ideal(),
                                                   unsigned threads = 1) {
  SpectralContour out{centers, fwhms, {}};
  const auto eff = Efficiencies::of(app, pol::H(), pol::H());
  const std::size_t ny = fwhms.size();
  auto flat = parallel_map(
      centers.size() * ny,
      [&](std::size_t k) {
        const auto b = profile_from_fwhm(shape_b, centers[k / ny], fwhms[k % ny], a.delay);
        const double c = overlap(a, b).magnitude;
        return visibility(m, n, app.bs, c, eff);
      },
      threads);
  out.visibility.assign(centers.size(), std::vector<double>(ny));
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = 0; j < ny; ++j) out.visibility[i][j] = flat[i * ny + j];
  return out;
}

}  // namespace homsim
