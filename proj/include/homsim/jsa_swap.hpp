#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "homsim/errors.hpp"
#include "homsim/optimize.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"

namespace homsim {

struct PumpSpec {
  double center = 2.0;  // rad/ps
  double sigma = 1.0;   // rad/ps
};

struct PhaseMatchSpec {
  double sigma = 1.0;
  double slope_s = 1.0;
  double slope_i = -0.5;
};

struct GridSpec {
  int n = 256;
  double span = 6.0;  // half-width in marginal amplitude standard deviations
};

// PEF x PMF model; signal and idler centers default to half the pump frequency.
struct GaussianJsaModel {
  PumpSpec pump;
  PhaseMatchSpec pmf;
  double center_s = 1.0;
  double center_i = 1.0;

  // Quadratic form: amplitude = exp(-v^T M v / 2), v = offsets from the centers.
  Eigen::Matrix2d form() const {
    Eigen::Vector2d u(1.0, 1.0), w(pmf.slope_s, pmf.slope_i);
    return u * u.transpose() / (pump.sigma * pump.sigma) +
           w * w.transpose() / (pmf.sigma * pmf.sigma);
  }
  double detuning() const { return center_s + center_i - pump.center; }
  cplx operator()(double ws, double wi) const {
    const double x = ws - center_s, y = wi - center_i;
    const double s = x + y + detuning();
    const double dk = pmf.slope_s * x + pmf.slope_i * y;
    return {std::exp(-0.5 * (s * s / (pump.sigma * pump.sigma) + dk * dk / (pmf.sigma * pmf.sigma))),
            0.0};
  }
  // Integral of |f|^2 over the plane.
  double analytic_norm() const { return std::numbers::pi / std::sqrt(form().determinant()); }
  // Marginal amplitude standard deviations.
  std::array<double, 2> marginal_std() const {
    const Eigen::Matrix2d inv = form().inverse();
    return {std::sqrt(inv(0, 0)), std::sqrt(inv(1, 1))};
  }
  void validate() const {
    detail::require(pump.sigma > 0.0 && pmf.sigma > 0.0, "JSA bandwidths must be > 0");
    detail::require(std::abs(pmf.slope_s - pmf.slope_i) > 1e-12,
                    "phase-matching slopes must differ (degenerate JSA)");
  }
};

struct JointSpectralAmplitude {
  enum class Form { Separable, Gridded };
  Form form = Form::Separable;
  SpectralProfile signal, idler;      // Separable
  std::vector<double> axis_s, axis_i;  // Gridded
  Eigen::MatrixXcd values;             // rows: signal, cols: idler
  std::optional<GaussianJsaModel> model;

  static JointSpectralAmplitude separable(const SpectralProfile& s, const SpectralProfile& i) {
    JointSpectralAmplitude j;
    j.form = Form::Separable;
    j.signal = s;
    j.idler = i;
    return j;
  }
};

namespace jsa_detail {

inline std::vector<double> trapezoid_weights(const std::vector<double>& ax) {
  const std::size_t n = ax.size();
  std::vector<double> w(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double h = 0.5 * (ax[k + 1] - ax[k]);
    w[k] += h;
    w[k + 1] += h;
  }
  return w;
}

inline double weighted_norm(const Eigen::MatrixXcd& f, const std::vector<double>& wx,
                            const std::vector<double>& wy) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < f.cols(); ++j) row += wy[j] * std::norm(f(i, j));
    s += wx[i] * row;
  }
  return s;
}

struct Range {
  double lo, hi;
};

inline Range profile_range(const SpectralProfile& p, double span) {
  const double w = p.effective_width();
  double half = 0.0;
  switch (p.shape) {
    case Shape::Gaussian: half = span * std::sqrt(2.0) * w; break;
    case Shape::Sech: half = span * 3.0 * w; break;
    case Shape::Lorentzian: half = span * 20.0 * w; break;
    case Shape::Sinc: half = span * 20.0 * spectral_detail::frequency_scale(p); break;
  }
  return {p.center - half, p.center + half};
}

inline void check_residual(double got, double expected, const char* what) {
  const double res = std::abs(got - expected) / expected;
  if (res > 1e-6) {
    throw NumericError(std::string(what) + ": grid too coarse or too narrow, normalization residual " +
                           std::to_string(res),
                       res);
  }
}

}  // namespace jsa_detail

inline JointSpectralAmplitude build_gaussian_jsa(const PumpSpec& pump, const PhaseMatchSpec& pmf,
                                                 const GridSpec& grid = {},
                                                 std::optional<double> center_s = {},
                                                 std::optional<double> center_i = {}) {
  detail::require(grid.n >= 3, "grid needs at least 3 points");
  detail::require(grid.span > 0.0, "grid span must be > 0");
  GaussianJsaModel model{pump, pmf, center_s.value_or(0.5 * pump.center),
                         center_i.value_or(0.5 * pump.center)};
  model.validate();
  const auto sd = model.marginal_std();
  JointSpectralAmplitude j;
  j.form = JointSpectralAmplitude::Form::Gridded;
  j.axis_s = linspace(model.center_s - grid.span * sd[0], model.center_s + grid.span * sd[0], grid.n);
  j.axis_i = linspace(model.center_i - grid.span * sd[1], model.center_i + grid.span * sd[1], grid.n);
  j.values.resize(grid.n, grid.n);
  for (int a = 0; a < grid.n; ++a) {
    for (int b = 0; b < grid.n; ++b) j.values(a, b) = model(j.axis_s[a], j.axis_i[b]);
  }
  const auto ws = jsa_detail::trapezoid_weights(j.axis_s);
  const auto wi = jsa_detail::trapezoid_weights(j.axis_i);
  const double norm = jsa_detail::weighted_norm(j.values, ws, wi);
  jsa_detail::check_residual(norm, model.analytic_norm(), "JSA");
  j.values /= std::sqrt(norm);
  j.model = model;
  return j;
}

inline double jsa_norm(const JointSpectralAmplitude& j) {
  if (j.form == JointSpectralAmplitude::Form::Separable) {
    return normalization(j.signal) * normalization(j.idler);
  }
  return jsa_detail::weighted_norm(j.values, jsa_detail::trapezoid_weights(j.axis_s),
                                   jsa_detail::trapezoid_weights(j.axis_i));
}

// Squared Schmidt coefficients of a gridded JSA, descending, summing to 1.
inline std::vector<double> schmidt_spectrum(const JointSpectralAmplitude& j) {
  detail::require(j.form == JointSpectralAmplitude::Form::Gridded, "Schmidt spectrum needs a grid");
  const auto ws = jsa_detail::trapezoid_weights(j.axis_s);
  const auto wi = jsa_detail::trapezoid_weights(j.axis_i);
  Eigen::MatrixXcd m = j.values;
  for (Eigen::Index a = 0; a < m.rows(); ++a) m.row(a) *= std::sqrt(ws[a]);
  for (Eigen::Index b = 0; b < m.cols(); ++b) m.col(b) *= std::sqrt(wi[b]);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  double total = s.squaredNorm();
  std::vector<double> out(s.size());
  for (Eigen::Index k = 0; k < s.size(); ++k) out[k] = s(k) * s(k) / total;
  return out;
}

inline double schmidt_number(const JointSpectralAmplitude& j) {
  double p = 0.0;
  for (double l : schmidt_spectrum(j)) p += l * l;
  return 1.0 / p;
}

struct SwapScenario {
  JointSpectralAmplitude jsa_ab;
  JointSpectralAmplitude jsa_cd;
  double phi = 0.0;
};

// Probabilities and fidelities for the four heralding patterns
//   M0 = (b H, c V), M1 = (b V, c H), M2 = (b H, b V), M3 = (c H, c V)
// from the polarization algebra and the spectral Gram element K.
struct SwapOutcomes {
  std::array<double, 4> probability{};
  std::array<double, 4> fidelity{};
};

namespace jsa_detail {

using Pol2 = std::array<std::array<cplx, 2>, 2>;  // [pA][pD]

struct DetMode {
  int port;  // 0 = b, 1 = c
  int pol;   // 0 = H, 1 = V
};

inline constexpr std::array<std::array<DetMode, 2>, 4> patterns = {{
    {{{0, 0}, {1, 1}}},
    {{{0, 1}, {1, 0}}},
    {{{0, 0}, {0, 1}}},
    {{{1, 0}, {1, 1}}},
}};

inline double singlet(int p, int q) {
  if (p == 0 && q == 1) return std::numbers::sqrt2 / 2.0;
  if (p == 1 && q == 0) return -std::numbers::sqrt2 / 2.0;
  return 0.0;
}

// Beam splitter amplitudes: B -> (b + c)/sqrt2, C -> (b - c)/sqrt2.
inline double bs_b(int) { return std::numbers::sqrt2 / 2.0; }
inline double bs_c(int port) { return std::numbers::sqrt2 / 2.0 * (port == 0 ? 1.0 : -1.0); }

// Amplitude branches u1 (B detected in d1, C in d2) and u2 (swapped) after
// rotating photon C by phi.
inline std::array<Pol2, 2> branches(double phi, const std::array<DetMode, 2>& d) {
  const double c = std::cos(phi), s = std::sin(phi);
  const double rot[2][2] = {{c, -s}, {s, c}};
  auto cd = [&](int y, int pD) {
    return rot[y][0] * singlet(0, pD) + rot[y][1] * singlet(1, pD);
  };
  std::array<Pol2, 2> u{};
  for (int pA = 0; pA < 2; ++pA) {
    for (int pD = 0; pD < 2; ++pD) {
      cplx u1 = 0.0, u2 = 0.0;
      for (int x = 0; x < 2; ++x) {
        for (int y = 0; y < 2; ++y) {
          const double amp = singlet(pA, x) * cd(y, pD);
          if (amp == 0.0) continue;
          if (d[0].pol == x && d[1].pol == y) u1 += amp * bs_b(d[0].port) * bs_c(d[1].port);
          if (d[1].pol == x && d[0].pol == y) u2 += amp * bs_b(d[1].port) * bs_c(d[0].port);
        }
      }
      u[0][pA][pD] = u1;
      u[1][pA][pD] = u2;
    }
  }
  return u;
}

inline cplx dot(const Pol2& a, const Pol2& b) {
  cplx s = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += std::conj(a[i][j]) * b[i][j];
  return s;
}

}  // namespace jsa_detail

inline SwapOutcomes swap_core(double phi, double K) {
  using namespace jsa_detail;
  SwapOutcomes out;
  for (int k = 0; k < 4; ++k) {
    const auto u = branches(phi, patterns[k]);
    const auto ideal = branches(0.0, patterns[k]);
    Pol2 target{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) target[i][j] = ideal[0][i][j] + ideal[1][i][j];
    const double tn = std::sqrt(std::real(dot(target, target)));
    for (auto& row : target)
      for (auto& x : row) x /= tn;
    const double p = std::real(dot(u[0], u[0])) + std::real(dot(u[1], u[1])) +
                     2.0 * std::real(dot(u[0], u[1])) * K;
    const cplx t1 = dot(target, u[0]), t2 = dot(target, u[1]);
    const double num = std::norm(t1) + std::norm(t2) + 2.0 * std::real(t1 * std::conj(t2)) * K;
    out.probability[k] = p;
    out.fidelity[k] = p > 0.0 ? num / p : 0.0;
  }
  return out;
}

namespace jsa_detail {

inline Range signal_range(const JointSpectralAmplitude& j, double span) {
  if (j.form == JointSpectralAmplitude::Form::Separable) return profile_range(j.signal, span);
  if (j.model) {
    const double sd = j.model->marginal_std()[0];
    return {j.model->center_s - span * sd, j.model->center_s + span * sd};
  }
  return {j.axis_s.front(), j.axis_s.back()};
}

inline Range idler_range(const JointSpectralAmplitude& j, double span) {
  if (j.form == JointSpectralAmplitude::Form::Separable) return profile_range(j.idler, span);
  if (j.model) {
    const double sd = j.model->marginal_std()[1];
    return {j.model->center_i - span * sd, j.model->center_i + span * sd};
  }
  return {j.axis_i.front(), j.axis_i.back()};
}

// Samples j on the given axes and normalizes with trapezoid weights.
inline Eigen::MatrixXcd sample(const JointSpectralAmplitude& j, const std::vector<double>& ax,
                               const std::vector<double>& ay) {
  Eigen::MatrixXcd m(ax.size(), ay.size());
  const auto wx = trapezoid_weights(ax), wy = trapezoid_weights(ay);
  if (j.form == JointSpectralAmplitude::Form::Separable) {
    std::vector<cplx> fs(ax.size()), fi(ay.size());
    for (std::size_t a = 0; a < ax.size(); ++a) fs[a] = amplitude(j.signal, ax[a]);
    for (std::size_t b = 0; b < ay.size(); ++b) fi[b] = amplitude(j.idler, ay[b]);
    double ns = 0.0, ni = 0.0;
    for (std::size_t a = 0; a < ax.size(); ++a) ns += wx[a] * std::norm(fs[a]);
    for (std::size_t b = 0; b < ay.size(); ++b) ni += wy[b] * std::norm(fi[b]);
    check_residual(ns, 1.0, "separable JSA signal");
    check_residual(ni, 1.0, "separable JSA idler");
    for (std::size_t a = 0; a < ax.size(); ++a)
      for (std::size_t b = 0; b < ay.size(); ++b) m(a, b) = fs[a] * fi[b];
  } else if (j.model) {
    for (std::size_t a = 0; a < ax.size(); ++a)
      for (std::size_t b = 0; b < ay.size(); ++b) m(a, b) = (*j.model)(ax[a], ay[b]);
    check_residual(weighted_norm(m, wx, wy), j.model->analytic_norm(), "JSA");
  } else {
    detail::require(ax == j.axis_s && ay == j.axis_i,
                    "tabulated JSAs must share the frequency grid of their partner");
    m = j.values;
  }
  m /= std::sqrt(weighted_norm(m, wx, wy));
  return m;
}

}  // namespace jsa_detail

// K = integral over (wA, wD) of |integral dw f_AB(wA, w) conj(f_CD(w, wD))|^2.
inline double spectral_gram(const JointSpectralAmplitude& ab, const JointSpectralAmplitude& cd,
                            const GridSpec& grid = {}) {
  using namespace jsa_detail;
  detail::require(grid.n >= 3, "grid needs at least 3 points");
  auto axis = [&](const JointSpectralAmplitude& j, bool signal) {
    if (j.form == JointSpectralAmplitude::Form::Gridded && !j.model) {
      return signal ? j.axis_s : j.axis_i;
    }
    const auto r = signal ? signal_range(j, grid.span) : idler_range(j, grid.span);
    return linspace(r.lo, r.hi, grid.n);
  };
  const auto axA = axis(ab, true);
  const auto axD = axis(cd, false);
  std::vector<double> axC;
  const bool raw_ab = ab.form == JointSpectralAmplitude::Form::Gridded && !ab.model;
  const bool raw_cd = cd.form == JointSpectralAmplitude::Form::Gridded && !cd.model;
  if (raw_ab) {
    axC = ab.axis_i;
  } else if (raw_cd) {
    axC = cd.axis_s;
  } else {
    const auto r1 = idler_range(ab, grid.span), r2 = signal_range(cd, grid.span);
    axC = linspace(std::min(r1.lo, r2.lo), std::max(r1.hi, r2.hi), grid.n);
  }
  const Eigen::MatrixXcd P = sample(ab, axA, axC);
  const Eigen::MatrixXcd Q = sample(cd, axC, axD);
  const auto wa = trapezoid_weights(axA), wc = trapezoid_weights(axC), wd = trapezoid_weights(axD);
  Eigen::MatrixXcd Qw = Q;
  for (Eigen::Index r = 0; r < Qw.rows(); ++r) Qw.row(r) *= wc[r];
  const Eigen::MatrixXcd G = P * Qw.conjugate();
  return weighted_norm(G, wa, wd);
}

inline std::array<double, 4> bsm_outcome_probability(const SwapScenario& s,
                                                     const GridSpec& grid = {}) {
  return swap_core(s.phi, spectral_gram(s.jsa_ab, s.jsa_cd, grid)).probability;
}

// Fidelity of the state heralded by M0 with |Psi->.
inline double swap_fidelity(const SwapScenario& s, const GridSpec& grid = {}) {
  return swap_core(s.phi, spectral_gram(s.jsa_ab, s.jsa_cd, grid)).fidelity[0];
}

inline double swap_fidelity_separable(double phi, double theta_bc) {
  const double c = std::cos(phi), t = std::cos(theta_bc);
  return 0.5 * c * c * (1.0 + t * t);
}

struct BandwidthCurve {
  double detuning;
  std::vector<double> fidelity;  // over the sigma_b grid
  double best_sigma_b;
  double best_fidelity;
};

// Separable Gaussian B/C photons with amplitude widths sigma_b and sigma_c.
inline std::vector<BandwidthCurve> detuned_bandwidth_sweep(const std::vector<double>& detunings,
                                                           const std::vector<double>& sigma_b,
                                                           double sigma_c, double phi = 0.0) {
  detail::require(!sigma_b.empty(), "sigma_b grid is empty");
  std::vector<BandwidthCurve> out;
  for (double d : detunings) {
    auto F = [&](double sb) {
      const double ov = gaussian_overlap_closed_form(sb, sigma_c, d, 0.0);
      return swap_fidelity_separable(phi, std::acos(std::min(1.0, ov)));
    };
    BandwidthCurve c{d, {}, 0.0, 0.0};
    for (double sb : sigma_b) c.fidelity.push_back(F(sb));
    std::vector<double> logs;
    for (double sb : sigma_b) logs.push_back(std::log(sb));
    const auto m = scan_and_refine([&](double ls) { return F(std::exp(ls)); }, logs, 1e-12);
    c.best_sigma_b = std::exp(m.x);
    c.best_fidelity = m.value;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace homsim
