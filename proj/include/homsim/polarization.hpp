#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "homsim/errors.hpp"

namespace homsim {

using cplx = std::complex<double>;

struct PolarizationVector {
  cplx h{1.0, 0.0};
  cplx v{0.0, 0.0};

  double norm2() const { return std::norm(h) + std::norm(v); }
  void validate() const {
    detail::require(std::abs(norm2() - 1.0) <= 1e-12,
                    "polarization vector must be normalized");
  }
};

namespace pol {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;

inline PolarizationVector H() { return {{1.0, 0.0}, {0.0, 0.0}}; }
inline PolarizationVector V() { return {{0.0, 0.0}, {1.0, 0.0}}; }
inline PolarizationVector D() { return {{inv_sqrt2, 0.0}, {inv_sqrt2, 0.0}}; }
inline PolarizationVector A() { return {{inv_sqrt2, 0.0}, {-inv_sqrt2, 0.0}}; }

// Linear polarization at angle theta from H.
inline PolarizationVector linear(double theta) {
  return {{std::cos(theta), 0.0}, {std::sin(theta), 0.0}};
}

inline PolarizationVector normalized(cplx h, cplx v) {
  const double n = std::sqrt(std::norm(h) + std::norm(v));
  detail::require(n > 0.0, "polarization vector must be nonzero");
  return {h / n, v / n};
}

inline PolarizationVector from_name(const std::string& s) {
  if (s == "H") return H();
  if (s == "V") return V();
  if (s == "D") return D();
  if (s == "A") return A();
  throw ConfigError("unknown polarization name '" + s + "'");
}

}  // namespace pol

inline cplx inner(const PolarizationVector& a, const PolarizationVector& b) {
  return std::conj(a.h) * b.h + std::conj(a.v) * b.v;
}

inline double cos_phi(const PolarizationVector& a, const PolarizationVector& b) {
  return std::min(1.0, std::abs(inner(a, b)));
}

// Rotation [[c, -s], [s, c]] acting on (h, v).
inline PolarizationVector rotate(const PolarizationVector& p, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return {c * p.h - s * p.v, s * p.h + c * p.v};
}

// Unit vector orthogonal to p, phase fixed so the first nonzero entry is real positive.
inline PolarizationVector orthogonal(const PolarizationVector& p) {
  PolarizationVector q{-std::conj(p.v), std::conj(p.h)};
  const cplx lead = std::abs(q.h) > 1e-15 ? q.h : q.v;
  const cplx ph = lead / std::abs(lead);
  return {q.h / ph, q.v / ph};
}

struct Detector {
  double eta_h = 1.0;
  double eta_v = 1.0;

  void validate() const {
    detail::require(eta_h >= 0.0 && eta_h <= 1.0, "detector eta_h must lie in [0,1]");
    detail::require(eta_v >= 0.0 && eta_v <= 1.0, "detector eta_v must lie in [0,1]");
  }
  static Detector ideal() { return {1.0, 1.0}; }
  static Detector uniform(double eta) { return {eta, eta}; }
};

inline double effective_efficiency(const Detector& d, const PolarizationVector& p) {
  return std::norm(p.h) * d.eta_h + std::norm(p.v) * d.eta_v;
}

// At least one click from m photons polarized pA and n photons polarized pB.
inline double click_probability(const Detector& d, const PolarizationVector& pA,
                                const PolarizationVector& pB, int m, int n) {
  detail::require(m >= 0 && n >= 0, "photon numbers must be >= 0");
  const double qa = 1.0 - effective_efficiency(d, pA);
  const double qb = 1.0 - effective_efficiency(d, pB);
  return 1.0 - std::pow(qa, m) * std::pow(qb, n);
}

using Matrix2c = Eigen::Matrix2cd;

struct PolarizationDensity {
  Matrix2c rho = Matrix2c::Identity() * 0.5;

  static PolarizationDensity pure(const PolarizationVector& p) {
    Eigen::Vector2cd v(p.h, p.v);
    return {v * v.adjoint()};
  }
  static PolarizationDensity maximally_mixed() { return {}; }

  void validate() const {
    detail::require((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12,
                    "density matrix must be Hermitian");
    detail::require(std::abs(rho.trace() - cplx(1.0, 0.0)) <= 1e-12,
                    "density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<Matrix2c> es(rho);
    detail::require(es.eigenvalues().minCoeff() >= -1e-12,
                    "density matrix must be positive semidefinite");
  }

  // Bloch vector (x, y, z) with rho = (I + r.sigma)/2.
  std::array<double, 3> bloch() const {
    return {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(),
            (rho(0, 0) - rho(1, 1)).real()};
  }
};

namespace pauli {
inline Matrix2c X() { Matrix2c m; m << 0, 1, 1, 0; return m; }
inline Matrix2c Y() { Matrix2c m; m << 0, cplx(0, -1), cplx(0, 1), 0; return m; }
inline Matrix2c Z() { Matrix2c m; m << 1, 0, 0, -1; return m; }
}  // namespace pauli

inline PolarizationDensity depolarize(const PolarizationDensity& in, double p) {
  detail::require(p >= 0.0 && p <= 1.0, "depolarizing probability must lie in [0,1]");
  const auto X = pauli::X(), Y = pauli::Y(), Z = pauli::Z();
  const Matrix2c& r = in.rho;
  Matrix2c out = (1.0 - p) * r + (p / 3.0) * (X * r * X + Y * r * Y + Z * r * Z);
  return {out};
}

struct PolarizationBranch {
  double weight;
  PolarizationVector state;
};

// Spectral decomposition of a 2x2 density matrix, larger weight first.
// Degenerate spectra return the H/V basis.
inline std::array<PolarizationBranch, 2> eigendecompose(const PolarizationDensity& d) {
  const Matrix2c& r = d.rho;
  const double a = r(0, 0).real(), c = r(1, 1).real();
  const cplx b = r(0, 1);
  const double mean = 0.5 * (a + c);
  const double half = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
  const double l1 = mean + half, l2 = mean - half;
  if (half <= 1e-14) {
    return {PolarizationBranch{std::max(a, 0.0), pol::H()},
            PolarizationBranch{std::max(c, 0.0), pol::V()}};
  }
  // Eigenvector for l1: (b, l1 - a) or (l1 - c, conj b), whichever is better conditioned.
  cplx h, v;
  if (std::abs(l1 - c) >= std::abs(l1 - a)) {
    h = l1 - c;
    v = std::conj(b);
  } else {
    h = b;
    v = l1 - a;
  }
  PolarizationVector e1 = pol::normalized(h, v);
  const cplx lead = std::abs(e1.h) > 1e-15 ? e1.h : e1.v;
  const cplx ph = lead / std::abs(lead);
  e1 = {e1.h / ph, e1.v / ph};
  return {PolarizationBranch{std::max(l1, 0.0), e1},
          PolarizationBranch{std::max(l2, 0.0), orthogonal(e1)}};
}

}  // namespace homsim
