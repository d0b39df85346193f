#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "homsim/channels.hpp"
#include "homsim/sweep.hpp"

using namespace homsim;

namespace {

SourceSpec fock_source(int n, const PolarizationVector& p = pol::H()) {
  return {n, p, gaussian_profile(1215.0, 0.5)};
}

double weight_of(const std::vector<NumberWeight>& d, int k) {
  for (const auto& w : d) {
    if (w.k == k) return w.p;
  }
  return 0.0;
}

const BeamSplitter half{0.5, 0.5};

}  // namespace

TEST(Channels, DampNumberBinomial) {
  const auto d0 = damp_number(3, 0.0);
  EXPECT_EQ(weight_of(d0, 3), 1.0);
  const auto d1 = damp_number(3, 1.0);
  EXPECT_EQ(weight_of(d1, 0), 1.0);
  const auto d = damp_number(4, 0.5);
  const double expect[] = {1, 4, 6, 4, 1};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(d[i].k, 4 - i);
    EXPECT_EQ(d[i].p, expect[i] / 16.0);
  }
  for (int n = 0; n <= 8; ++n) {
    for (double g : {0.1, 0.37, 0.9}) {
      double s = 0.0;
      for (const auto& w : damp_number(n, g)) {
        EXPECT_DOUBLE_EQ(w.p, binomial(n, w.k) * std::pow(1 - g, w.k) * std::pow(g, n - w.k));
        s += w.p;
      }
      EXPECT_NEAR(s, 1.0, 1e-14);
    }
  }
}

TEST(Channels, DampingComposes) {
  // Two losses compose to 1 - (1-g1)(1-g2).
  const auto twice = damp_number(damp_number(5, 0.2), 0.3);
  const auto once = damp_number(5, 1 - 0.8 * 0.7);
  for (int k = 0; k <= 5; ++k) EXPECT_NEAR(weight_of(twice, k), weight_of(once, k), 1e-15);
}

TEST(Channels, ApplyChannelExamples) {
  const auto src = fock_source(2, pol::D());
  const auto id = apply_channel(src, ChannelSpec::identity());
  ASSERT_EQ(id.number_dist.size(), 3u);
  EXPECT_EQ(weight_of(id.number_dist, 2), 1.0);
  EXPECT_NEAR((id.pol.rho - PolarizationDensity::pure(pol::D()).rho).norm(), 0.0, 1e-15);
  EXPECT_EQ(id.spec.effective_width(), src.spec.width);

  EXPECT_EQ(weight_of(apply_channel(src, {1.0, 0.0, 1.0}).number_dist, 0), 1.0);
  const auto br = apply_channel(src, {0.0, 0.0, 2.0});
  EXPECT_DOUBLE_EQ(br.spec.effective_width(), 2 * src.spec.width);
  EXPECT_THROW(apply_channel(src, {1.2, 0.0, 1.0}), ConfigError);
}

TEST(Channels, TracePreservation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto out = apply_channel(fock_source(1 + i % 4, pol::linear(u(rng) * 3)),
                                   {u(rng), u(rng), 0.5 + u(rng)});
    out.validate();
  }
}

TEST(Channels, DepolarizeFixedPoint) {
  const auto out = apply_channel(fock_source(1, pol::normalized({0.3, 0.1}, {0.2, 0.9})), {0.0, 0.75, 1.0});
  EXPECT_NEAR((out.pol.rho - Matrix2c::Identity() * 0.5).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(Channels, PureInputsReproduceFock) {
  const Apparatus app{BeamSplitter{0.4, 0.6}, {0.9, 0.7}, {0.8, 0.95}};
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      FockPair fp;
      fp.m = m;
      fp.n = n;
      fp.pol_a = pol::linear(0.2);
      fp.pol_b = pol::linear(0.5);
      fp.spec_a = gaussian_profile(1215.0, 0.5);
      fp.spec_b = gaussian_profile(1215.1, 0.6);
      const auto a = MixedSource::from_pure({m, fp.pol_a, fp.spec_a});
      const auto b = MixedSource::from_pure({n, fp.pol_b, fp.spec_b});
      EXPECT_NEAR(mixed_coincidence(a, b, app), coincidence(fp, app), 1e-14);
    }
  }
}

TEST(Channels, MaximallyMixedArmIsBranchAverage) {
  const auto a = apply_channel(fock_source(1, pol::D()), {0.0, 0.75, 1.0});
  const auto b = MixedSource::from_pure(fock_source(1, pol::D()));
  const auto app = Apparatus::ideal();
  // Branches H and V against D.
  const double expect = 0.5 * coincidence(1, 1, half, cos_phi(pol::H(), pol::D()), {}) +
                        0.5 * coincidence(1, 1, half, cos_phi(pol::V(), pol::D()), {});
  EXPECT_NEAR(mixed_coincidence(a, b, app), expect, 1e-14);
}

TEST(Channels, DampedBranchEnumeration) {
  const auto a = apply_channel(fock_source(1), {0.3, 0.0, 1.0});
  const auto b = apply_channel(fock_source(1), {0.3, 0.0, 1.0});
  const Efficiencies e;
  const double expect = 0.49 * coincidence(1, 1, half, 1.0, e) +
                        0.21 * (coincidence(1, 0, half, 1.0, e) + coincidence(0, 1, half, 1.0, e));
  EXPECT_NEAR(mixed_coincidence(a, b, Apparatus::ideal()), expect, 1e-14);
}

TEST(Channels, Linearity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Apparatus app{BeamSplitter{0.45, 0.55}, {0.9, 0.8}, {0.85, 0.9}};
  for (int i = 0; i < 30; ++i) {
    const auto s1 = apply_channel(fock_source(2, pol::linear(u(rng))), {u(rng), u(rng), 1.0});
    auto s2 = apply_channel(fock_source(3, pol::linear(u(rng))), {u(rng), u(rng), 1.0});
    s2.spec = s1.spec;  // mixtures share one spectral profile
    const auto b = apply_channel(fock_source(1, pol::linear(u(rng))), {u(rng), u(rng), 1.0});
    const double w = u(rng);
    MixedSource mix;
    mix.spec = s1.spec;
    std::vector<double> acc(4, 0.0);
    // Number and polarization degrees of freedom are product states, so mix within
    // one of them at a time.
    for (const auto& x : s1.number_dist) acc[x.k] += w * x.p;
    for (const auto& x : s2.number_dist) acc[x.k] += (1 - w) * x.p;
    for (int k = 3; k >= 0; --k) mix.number_dist.push_back({k, acc[k]});
    mix.pol = s1.pol;
    auto s2p = s2;
    s2p.pol = s1.pol;
    const double lhs = mixed_coincidence(mix, b, app);
    const double rhs = w * mixed_coincidence(s1, b, app) + (1 - w) * mixed_coincidence(s2p, b, app);
    EXPECT_NEAR(lhs, rhs, 1e-12);

    // Affine in the polarization density only for polarization-independent detection.
    const Apparatus flat{BeamSplitter{0.45, 0.55}, Detector::uniform(0.8), Detector::uniform(0.9)};
    MixedSource pmix = s1;
    pmix.pol.rho = w * s1.pol.rho + (1 - w) * s2.pol.rho;
    auto s2n = s2;
    s2n.number_dist = s1.number_dist;
    EXPECT_NEAR(mixed_coincidence(pmix, b, flat),
                w * mixed_coincidence(s1, b, flat) + (1 - w) * mixed_coincidence(s2n, b, flat), 1e-12);
  }
}

TEST(Channels, EqualDampingKeepsSinglePhotonVisibility) {
  auto sa = fock_source(1);
  auto sb = fock_source(1, pol::linear(0.4));
  sb.spec = sech_profile(1215.0, 0.45);
  const auto app = Apparatus::ideal();
  const double v0 = mixed_visibility(MixedSource::from_pure(sa), MixedSource::from_pure(sb), app);
  for (double g = 0.0; g < 0.99; g += 0.05) {
    const ChannelSpec ch{g, 0.0, 1.0};
    EXPECT_NEAR(mixed_visibility(apply_channel(sa, ch), apply_channel(sb, ch), app), v0, 1e-9) << g;
  }
}

TEST(Channels, ContourCornerAndFixedPoint) {
  const auto sa = fock_source(2), sb = fock_source(1, pol::linear(0.3));
  const auto app = Apparatus::ideal();
  const auto xs = linspace(0.0, 0.75, 4);
  const auto g = channel_visibility_contour(sa, sb, app, xs, xs, [](double x, double y) {
    return std::pair{ChannelSpec{0.0, x, 1.0}, ChannelSpec{0.0, y, 1.0}};
  });
  FockPair fp;
  fp.m = 2;
  fp.n = 1;
  fp.pol_b = pol::linear(0.3);
  fp.spec_a = fp.spec_b = sa.spec;
  EXPECT_NEAR(g.visibility[0][0], visibility(fp, app), 1e-12);
  MixedSource ma = MixedSource::from_pure(sa), mb = MixedSource::from_pure(sb);
  ma.pol = mb.pol = PolarizationDensity::maximally_mixed();
  EXPECT_NEAR(g.visibility[3][3], mixed_visibility(ma, mb, app), 1e-12);
}

TEST(Channels, LossCanImproveMismatchedVisibility) {
  const auto sa = fock_source(2), sb = fock_source(1);
  const auto gs = linspace(0.0, 0.95, 20);
  const auto g = channel_visibility_contour(sa, sb, Apparatus::ideal(), gs, gs, [](double x, double y) {
    return std::pair{ChannelSpec{x, 0.0, 1.0}, ChannelSpec{y, 0.0, 1.0}};
  });
  const double base = g.visibility[0][0];
  bool improved = false;
  for (std::size_t i = 1; i < gs.size(); ++i) improved = improved || g.visibility[i][0] > base + 1e-6;
  EXPECT_TRUE(improved);
}

TEST(Channels, ContourThreadInvariant) {
  const auto sa = fock_source(2), sb = fock_source(2, pol::linear(0.2));
  const auto gs = linspace(0.0, 0.9, 7);
  auto make = [](double x, double y) {
    return std::pair{ChannelSpec{x, 0.1, 1.2}, ChannelSpec{y, 0.0, 1.0}};
  };
  const auto a = channel_visibility_contour(sa, sb, Apparatus::ideal(), gs, gs, make, 1);
  const auto b = channel_visibility_contour(sa, sb, Apparatus::ideal(), gs, gs, make, 3);
  EXPECT_EQ(a.visibility, b.visibility);
}
