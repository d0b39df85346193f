#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "homsim/fock.hpp"
#include "homsim/oracle.hpp"
#include "homsim/sweep.hpp"

using namespace homsim;

namespace {

const BeamSplitter half{0.5, 0.5};
const Efficiencies ideal = Efficiencies::ideal();

FockPair matched_gaussians(int m, int n) {
  FockPair p;
  p.m = m;
  p.n = n;
  p.spec_a = gaussian_profile(1215.0, 0.5);
  p.spec_b = p.spec_a;
  return p;
}

}  // namespace

TEST(Fock, BinomialExactAndLogDomain) {
  EXPECT_EQ(binomial(5, 2), 10.0);
  EXPECT_EQ(binomial(62, 31), 465428353255261088.0);
  EXPECT_EQ(binomial(4, 7), 0.0);
  EXPECT_NEAR(binomial(70, 3) / 54740.0, 1.0, 1e-12);
}

TEST(Fock, BunchingFactor) {
  for (double c : {0.0, 0.3, 0.8, 1.0}) {
    EXPECT_DOUBLE_EQ(bunching_factor(1, 1, c), 1 + c * c);
    EXPECT_DOUBLE_EQ(bunching_factor(2, 2, c), 1 + 4 * c * c + std::pow(c, 4));
    EXPECT_DOUBLE_EQ(bunching_factor(3, 2, c), bunching_factor(2, 3, c));
    EXPECT_GE(bunching_factor(4, 3, c), 1.0);
  }
  EXPECT_DOUBLE_EQ(bunching_factor(2, 2, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(bunching_factor(2, 1, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(bunching_factor(5, 3, 0.0), 1.0);
}

TEST(Fock, AllOneSide) {
  auto [a, b] = p_all_one_side(1, 1, half, 1.0);
  EXPECT_DOUBLE_EQ(a, 0.5);
  EXPECT_DOUBLE_EQ(b, 0.5);
  std::tie(a, b) = p_all_one_side(2, 1, half, 1.0);
  EXPECT_DOUBLE_EQ(a, 0.375);
  EXPECT_DOUBLE_EQ(b, 0.375);
  std::tie(a, b) = p_all_one_side(1, 1, half, 0.0);
  EXPECT_DOUBLE_EQ(a, 0.25);
  EXPECT_DOUBLE_EQ(b, 0.25);
}

TEST(Fock, CoincidenceExamples) {
  EXPECT_NEAR(coincidence(1, 1, half, 1.0, ideal), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(coincidence(1, 1, half, 0.0, ideal), 0.5);
  EXPECT_DOUBLE_EQ(coincidence(2, 1, half, 1.0, ideal), 0.25);
  EXPECT_NEAR(coincidence(1, 1, half, 0.7, ideal), 0.255, 1e-15);
}

TEST(Fock, CoincidenceFromPair) {
  auto p = matched_gaussians(1, 1);
  EXPECT_NEAR(coincidence(p, Apparatus::ideal()), 0.0, 1e-12);
  p.pol_b = pol::V();
  EXPECT_DOUBLE_EQ(coincidence(p, Apparatus::ideal()), 0.5);
}

TEST(Fock, InvalidRegimeAndConfigErrors) {
  EXPECT_THROW(coincidence(0, 0, half, 1.0, ideal), ConfigError);
  // A lossy detector b makes the unchecked formula negative for one photon.
  const Efficiencies lossy{1.0, 1.0, 0.2, 0.2};
  EXPECT_LT(coincidence_raw(1, 0, half, 0.0, lossy), -1e-9);
  EXPECT_THROW(coincidence(1, 0, half, 0.0, lossy), InvalidRegime);
  EXPECT_THROW((BeamSplitter{0.5, 0.6}.validate()), ConfigError);
}

TEST(Fock, Symmetries) {
  const Detector da{0.7, 0.9}, db{0.85, 0.6};
  const auto pa = pol::linear(0.2), pb = pol::linear(0.9);
  const BeamSplitter bs{0.35, 0.65};
  const double c = 0.6 * cos_phi(pa, pb);
  for (int m = 1; m <= 3; ++m) {
    for (int n = 0; n <= 3; ++n) {
      const Apparatus app{bs, da, db};
      const double p = coincidence_raw(m, n, bs, c, Efficiencies::of(app, pa, pb));
      // Arms exchanged with the detectors exchanged, same splitter.
      const Apparatus sw{bs, db, da};
      EXPECT_NEAR(p, coincidence_raw(n, m, bs, c, Efficiencies::of(sw, pb, pa)), 1e-14);
      // Arms exchanged with T <-> R, same detectors.
      EXPECT_NEAR(p, coincidence_raw(n, m, bs.swapped(), c, Efficiencies::of(app, pb, pa)), 1e-14);
    }
  }
}

TEST(Fock, MonotoneInOverlap) {
  for (int m = 1; m <= 4; ++m) {
    double prev = INFINITY;
    for (double c = 0.0; c <= 1.0 + 1e-12; c += 0.02) {
      const double p = coincidence(m, m, half, std::min(c, 1.0), ideal);
      EXPECT_LE(p, prev + 1e-15);
      prev = p;
    }
  }
}

TEST(Fock, DipCurveEndpoints) {
  const auto taus = linspace(-20.0, 20.0, 81);
  const auto dip = dip_curve(matched_gaussians(1, 1), taus, Apparatus::ideal());
  EXPECT_NEAR(dip[40].p_co, 0.0, 1e-12);
  EXPECT_NEAR(dip.front().p_co, 0.5, 1e-9);
  EXPECT_NEAR(dip.back().p_co, 0.5, 1e-9);
  for (std::size_t i = 0; i < dip.size(); ++i) {
    EXPECT_NEAR(dip[i].p_co, dip[dip.size() - 1 - i].p_co, 1e-12);
    EXPECT_GE(dip[i].p_co, dip[40].p_co);
  }
}

TEST(Fock, DipCurveOrthogonalPolarizationFlat) {
  auto p = matched_gaussians(1, 1);
  p.pol_b = pol::V();
  for (const auto& d : dip_curve(p, linspace(-3, 3, 13), Apparatus::ideal())) {
    EXPECT_DOUBLE_EQ(d.p_co, 0.5);
  }
}

TEST(Fock, DipCurveTwoTwo) {
  const auto dip = dip_curve(matched_gaussians(2, 2), {0.0, 40.0}, Apparatus::ideal());
  EXPECT_NEAR(dip[0].p_co, 0.25, 1e-12);
  EXPECT_NEAR(dip[1].p_co, 0.875, 1e-12);
}

TEST(Fock, DipCurveThreadInvariant) {
  auto p = matched_gaussians(2, 1);
  p.spec_b = sech_profile(1215.0, 0.4);
  const auto taus = linspace(-5, 5, 31);
  const auto one = dip_curve(p, taus, Apparatus::ideal(), 1);
  const auto four = dip_curve(p, taus, Apparatus::ideal(), 4);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].p_co, four[i].p_co);
}

TEST(Fock, Visibility) {
  EXPECT_NEAR(visibility(matched_gaussians(1, 1), Apparatus::ideal()), 1.0, 1e-12);
  EXPECT_NEAR(visibility(matched_gaussians(2, 2), Apparatus::ideal()), 5.0 / 7.0, 1e-12);
  EXPECT_THROW(visibility(1, 1, half, 1.0, {0.0, 0.0, 0.0, 0.0}), NumericError);
}

TEST(Fock, VisibilityFromLargeDelayMatchesAnalyticBaseline) {
  auto p = matched_gaussians(1, 1);
  p.spec_b = sech_profile(1215.0, 0.45);
  const double sigma = 1.0 / 0.5;  // time-domain width scale of the wider pulse
  const auto dip = dip_curve(p, {0.0, 40.0 * sigma}, Apparatus::ideal());
  const double v_num = (dip[1].p_co - dip[0].p_co) / dip[1].p_co;
  EXPECT_NEAR(v_num, visibility(p, Apparatus::ideal()), 1e-6);
}

TEST(Fock, VisibilityVsPolarization) {
  const auto phis = linspace(0.0, std::numbers::pi / 2, 31);
  const auto v11 = visibility_vs_polarization(1, 1, phis);
  EXPECT_NEAR(v11.front(), 1.0, 1e-15);
  EXPECT_NEAR(v11.back(), 0.0, 1e-15);
  EXPECT_NEAR(visibility_vs_polarization(2, 2, {0.0})[0], 5.0 / 7.0, 1e-15);
  for (int m = 1; m <= 3; ++m) {
    const auto v = visibility_vs_polarization(m, m, phis);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LT(v[i], v[i - 1]);
  }
}

TEST(Fock, NegativeVisibilityIsReported) {
  // Unequal photon numbers with lossy detectors can raise P(0) above P(inf).
  const Efficiencies e{0.3, 0.9, 0.9, 0.3};
  const double v = visibility(3, 1, BeamSplitter{0.8, 0.2}, 1.0, e);
  EXPECT_TRUE(std::isfinite(v));
}

TEST(Fock, OracleEquivalenceIdealDetectors) {
  for (int m = 0; m <= 4; ++m) {
    for (int n = 0; n <= 4; ++n) {
      if (m + n == 0) continue;
      for (double T : {0.3, 0.5, 0.7}) {
        for (double c : {0.0, 0.3, 0.7, 1.0}) {
          const BeamSplitter bs = BeamSplitter::from_transmissivity(T);
          EXPECT_NEAR(coincidence_raw(m, n, bs, c, ideal), oracle::coincidence_ideal(m, n, bs, c),
                      1e-12)
              << m << " " << n << " " << T << " " << c;
        }
      }
    }
  }
}
