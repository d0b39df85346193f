#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <string>

#include "homsim/errors.hpp"
#include "homsim/jsa_swap.hpp"
#include "homsim/polarization.hpp"
#include "homsim/spectral.hpp"

namespace homsim {

// ---------------------------------------------------------------- MDI-QKD

enum class Bb84State { H, V, D, A };

inline const char* state_name(Bb84State s) {
  switch (s) {
    case Bb84State::H: return "H";
    case Bb84State::V: return "V";
    case Bb84State::D: return "D";
    case Bb84State::A: return "A";
  }
  return "?";
}

inline Bb84State parse_bb84(const std::string& s) {
  if (s == "H") return Bb84State::H;
  if (s == "V") return Bb84State::V;
  if (s == "D") return Bb84State::D;
  if (s == "A") return Bb84State::A;
  throw ConfigError("unknown BB84 state '" + s + "'");
}

inline PolarizationVector bb84_vector(Bb84State s) { return pol::from_name(state_name(s)); }

inline bool is_diagonal(Bb84State s) { return s == Bb84State::D || s == Bb84State::A; }

struct MdiScenario {
  Bb84State state_a = Bb84State::D;
  Bb84State state_b = Bb84State::A;
  double phi = 0.0;    // polarization mismatch
  double theta = 0.0;  // spectral mismatch

  void validate() const {
    const double half_pi = 0.5 * std::numbers::pi + 1e-12;
    detail::require(phi >= -1e-12 && phi <= half_pi, "phi must lie in [0, pi/2]");
    detail::require(theta >= -1e-12 && theta <= half_pi, "theta must lie in [0, pi/2]");
  }
};

// Outcome order: M12, M34, M23, M14.
struct MdiTable {
  std::array<double, 4> p{};
  double m12() const { return p[0]; }
  double m34() const { return p[1]; }
  double m23() const { return p[2]; }
  double m14() const { return p[3]; }
};

inline constexpr std::array<const char*, 4> mdi_outcome_names = {"M12", "M34", "M23", "M14"};

// Two single photons through a 50:50 beam splitter (a -> (a+b)/sqrt2,
// b -> (a-b)/sqrt2) and polarization-resolved detection. Each outcome is the
// expectation of the corresponding two-mode projector; the exchange term
// carries |<phi_A|phi_B>|^2 = cos^2 Theta.
inline MdiTable mdi_projector_probabilities(const PolarizationVector& pa,
                                            const PolarizationVector& pb, double cos_theta) {
  // The 1/sqrt2 splitter factors are pulled out as an overall 1/4.
  auto gA = [&](int, int p) { return p == 0 ? pa.h : pa.v; };
  auto gB = [&](int port, int p) { return (port == 0 ? 1.0 : -1.0) * (p == 0 ? pb.h : pb.v); };
  struct Mode { int port, pol; };
  // Port 0 = a, 1 = b; polarization 0 = H, 1 = V.
  const std::array<std::array<Mode, 2>, 4> proj = {{
      {{{1, 0}, {1, 1}}},  // M12: b_H b_V
      {{{0, 0}, {0, 1}}},  // M34: a_H a_V
      {{{0, 0}, {1, 1}}},  // M23: a_H b_V
      {{{1, 0}, {0, 1}}},  // M14: b_H a_V
  }};
  const double k = cos_theta * cos_theta;
  MdiTable t;
  for (int i = 0; i < 4; ++i) {
    const auto [d1, d2] = proj[i];
    const cplx x = gA(d1.port, d1.pol) * gB(d2.port, d2.pol);
    const cplx y = gA(d2.port, d2.pol) * gB(d1.port, d1.pol);
    t.p[i] = 0.25 * (std::norm(x) + std::norm(y) + 2.0 * std::real(x * std::conj(y)) * k);
  }
  return t;
}

// Physical rotation model: Bob's polarization rotated by phi.
inline MdiTable mdi_rotation_model(const MdiScenario& s) {
  s.validate();
  return mdi_projector_probabilities(bb84_vector(s.state_a),
                                     rotate(bb84_vector(s.state_b), s.phi), std::cos(s.theta));
}

// (1/8) cos^2 Phi (1 + cos^2 Theta), per conclusive outcome.
inline double mdi_conclusive_probability(double phi, double theta) {
  const double c = std::cos(phi), t = std::cos(theta);
  return 0.125 * c * c * (1.0 + t * t);
}

// Outcome probability of an ideal diagonal-basis pair times the heralded-state
// fidelity from the swap projector algebra with K = cos^2 Theta.
inline double mdi_conclusive_probability_oracle(double phi, double theta) {
  const double ideal =
      mdi_projector_probabilities(bb84_vector(Bb84State::D), bb84_vector(Bb84State::A), 1.0).m23();
  const double t = std::cos(theta);
  return ideal * swap_core(phi, t * t).fidelity[0];
}

// Rectilinear and mixed-basis rows follow the rotation model (rectilinear rows
// are mismatch independent). Diagonal rows: the interfering pair of outcomes
// carries the conclusive probability, the other pair the remainder of 1/4.
inline MdiTable mdi_outcome_table(const MdiScenario& s) {
  s.validate();
  if (!(is_diagonal(s.state_a) && is_diagonal(s.state_b))) return mdi_rotation_model(s);
  const double x = mdi_conclusive_probability(s.phi, s.theta);
  const double y = 0.25 - x;
  MdiTable t;
  if (s.state_a != s.state_b) {
    t.p = {y, y, x, x};
  } else {
    t.p = {x, x, y, y};
  }
  return t;
}

inline double spectral_error(double theta) {
  const double s = std::sin(theta);
  return 0.5 * s * s;
}

struct ErrorBudget {
  double e_b = 0.0;  // background
  double e_a = 0.0;  // beam splitter asymmetry
  double e_p = 0.0;  // polarization
  double e_t = 0.0;  // modal/temporal
  double e_f = 0.0;  // spectral

  void validate() const {
    for (double e : {e_b, e_a, e_p, e_t, e_f}) {
      detail::require(e >= 0.0 && e <= 1.0, "error contributions must lie in [0,1]");
    }
  }
};

struct TotalError {
  double e_x;
  bool useless;  // e_x > 1/2
};

inline TotalError total_error(const ErrorBudget& b) {
  b.validate();
  const double e = b.e_b + b.e_a + b.e_p + b.e_t + b.e_f;
  return {e, e > 0.5};
}

inline double binary_entropy(double x) {
  detail::require(x >= 0.0 && x <= 1.0, "binary entropy argument must lie in [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

struct KeyRateInputs {
  double p_z11 = 1.0;
  double y_z11 = 1.0;
  double e_z11 = 0.0;
  double q_z = 1.0;
  double e_z = 0.0;
  double f_e = 1.16;

  void validate() const {
    for (double v : {p_z11, y_z11, e_z11, q_z, e_z}) {
      detail::require(v >= 0.0 && v <= 1.0, "key-rate inputs must lie in [0,1]");
    }
    detail::require(f_e >= 1.0, "f_e must be >= 1");
  }
};

inline double key_rate_bound(const KeyRateInputs& in) {
  in.validate();
  return in.p_z11 * in.y_z11 * (1.0 - binary_entropy(in.e_z11)) -
         in.q_z * in.f_e * binary_entropy(in.e_z);
}

// ---------------------------------------------------------------- sensing

inline double noon_signal(int n, double theta, double phase) {
  detail::require(n >= 1, "N must be >= 1");
  return -n * std::cos(theta) * std::sin(phase);
}

// Phase uncertainty scale 1 / (N cos Theta).
inline double noon_sensitivity(int n, double theta) {
  detail::require(n >= 1, "N must be >= 1");
  const double c = std::cos(theta);
  if (std::abs(c) < 1e-12) throw NumericError("sensitivity undefined for orthogonal spectra");
  return 1.0 / (n * c);
}

// Operator-level evaluation of <B^dag B - A^dag A> cos(phase) + i <A^dag B - B^dag A> sin(phase)
// for the state (A^dag B^dag)^(N-1) (A^dag + i B^dag)|0>, where A^dag creates phi_A in arm A and
// B^dag creates phi_B = cos Theta phi_A + sin Theta phi_perp in arm B.
inline double noon_signal_operator(int n, double theta, double phase) {
  detail::require(n >= 1 && n <= 12, "operator evaluation limited to 1 <= N <= 12");
  // Modes: 0 = (A, phi_A), 1 = (A, perp), 2 = (B, phi_A), 3 = (B, perp).
  using Cfg = std::array<int, 4>;
  using State = std::map<Cfg, cplx>;
  auto create = [](const State& in, const std::array<cplx, 4>& op) {
    State out;
    for (const auto& [cfg, amp] : in) {
      for (int k = 0; k < 4; ++k) {
        if (op[k] == cplx(0.0)) continue;
        Cfg nx = cfg;
        nx[k] += 1;
        out[nx] += amp * op[k] * std::sqrt(static_cast<double>(nx[k]));
      }
    }
    return out;
  };
  const std::array<cplx, 4> Adag{1.0, 0.0, 0.0, 0.0};
  const std::array<cplx, 4> Bdag{0.0, 0.0, std::cos(theta), std::sin(theta)};
  State psi{{Cfg{}, 1.0}};
  State first = create(psi, Adag);
  State second = create(psi, Bdag);
  for (auto& [k, v] : second) v *= cplx(0.0, 1.0);
  for (const auto& [k, v] : second) first[k] += v;
  psi = first;
  for (int i = 0; i < n - 1; ++i) psi = create(create(psi, Adag), Bdag);
  double norm = 0.0;
  for (const auto& [k, v] : psi) norm += std::norm(v);
  // <psi| x^dag_i y_j |psi> for mode pairs.
  auto hop = [&](int to, int from) {
    cplx s = 0.0;
    for (const auto& [cfg, amp] : psi) {
      if (cfg[from] == 0) continue;
      Cfg nx = cfg;
      const double f = std::sqrt(static_cast<double>(nx[from]));
      nx[from] -= 1;
      nx[to] += 1;
      const double g = std::sqrt(static_cast<double>(nx[to]));
      auto it = psi.find(nx);
      if (it != psi.end()) s += std::conj(it->second) * amp * f * g;
    }
    return s / norm;
  };
  auto number = [&](int k) {
    double s = 0.0;
    for (const auto& [cfg, amp] : psi) s += cfg[k] * std::norm(amp);
    return s / norm;
  };
  const double dn = number(2) + number(3) - number(0) - number(1);
  const cplx ab = hop(0, 2) + hop(1, 3);  // A^dag B summed over spectral modes
  const cplx ba = hop(2, 0) + hop(3, 1);
  return dn * std::cos(phase) + std::real(cplx(0.0, 1.0) * (ab - ba)) * std::sin(phase);
}

// ---------------------------------------------------------------- classifier

// Coincidence kernel p0 = (1 - cos^2 Theta cos^2 Theta_perp) / 2.
inline double classifier_coincidence(double theta, double theta_perp) {
  const double c = std::cos(theta), cp = std::cos(theta_perp);
  return 0.5 * (1.0 - c * c * cp * cp);
}

// Floor reached with perfect transverse matching.
inline double classifier_floor(double theta) {
  const double s = std::sin(theta);
  return 0.5 * s * s;
}

struct TransverseGaussian {
  double sigma_x = 1.0, sigma_y = 1.0;  // amplitude widths
  double x0 = 0.0, y0 = 0.0;
};

// Transverse mismatch angle of two separable 2-D Gaussian modes.
inline double transverse_theta(const TransverseGaussian& a, const TransverseGaussian& b) {
  const double ov = gaussian_overlap_closed_form(a.sigma_x, b.sigma_x, a.x0, b.x0) *
                    gaussian_overlap_closed_form(a.sigma_y, b.sigma_y, a.y0, b.y0);
  return std::acos(std::min(1.0, ov));
}

inline double sigmoid(double f, double bias = 0.0) { return 1.0 / (1.0 + std::exp(-(f + bias))); }

inline double binary_cross_entropy(double label, double p) {
  detail::require(p > 0.0 && p < 1.0, "probability must lie in (0,1)");
  return -(label * std::log(p) + (1.0 - label) * std::log(1.0 - p));
}

// ---------------------------------------------------------------- fusion

inline double fusion_fidelity(double theta) {
  const double c = std::cos(theta);
  return 0.5 * (1.0 + c * c);
}

}  // namespace homsim
