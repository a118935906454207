#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace gdual;
using gdual::testing::dist;

namespace {

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

// B_N(x) = 1/(N-1)! sum_k (-1)^k C(N,k) (x-k)_+^{N-1}
double truncated_power_bspline(int n, double x) {
  if (x < 0.0 || x >= n) return 0.0;
  double acc = 0.0, binom = 1.0, fact = 1.0;
  for (int i = 2; i < n; ++i) fact *= i;
  for (int k = 0; k <= n; ++k) {
    if (x >= k) acc += (k % 2 ? -1.0 : 1.0) * binom * std::pow(x - k, n - 1);
    binom = binom * (n - k) / (k + 1);
  }
  return acc / fact;
}

// S f for f = delta_j, by brute force over all lattice points, as a check
// on the materialized matrix.
LinearMap brute_frame_operator(const SampledWindow &g, const GaborLattice &lat) {
  const LatticeShape sh = lattice_shape(lat, g.grid);
  const Eigen::Index l = g.grid.total();
  const double s = g.grid.samples_per_unit;
  LinearMap out = LinearMap::Zero(l, l);
  for (Eigen::Index n = 0; n < sh.time_shifts; ++n) {
    for (Eigen::Index m = 0; m < sh.modulations; ++m) {
      Vector v(l);
      for (Eigen::Index j = 0; j < l; ++j) {
        const double phase = 2 * M_PI * to_double(lat.b) * m * (j / s);
        v(j) = std::polar(1.0, phase) * g.at(j - n * sh.shift) / std::sqrt(s);
      }
      out += v * v.adjoint();
    }
  }
  return out;
}

SampledWindow zero_window(const GridSpec &grid) {
  return SampledWindow(grid, Vector::Zero(grid.total()));
}

}  // namespace

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("1/10"), R(1, 10));
  EXPECT_EQ(parse_rational("3"), R(3));
  EXPECT_EQ(parse_rational("2/4"), R(1, 2));
  EXPECT_EQ(format_rational(R(3, 4)), "3/4");
  EXPECT_EQ(format_rational(R(2)), "2");
  EXPECT_THROW(parse_rational("1/0"), Error);
  EXPECT_THROW(parse_rational("x/2"), Error);
  EXPECT_THROW(parse_rational("1.5"), Error);
  EXPECT_THROW(parse_rational(""), Error);
}

TEST(Lattice, Shape) {
  const LatticeShape sh = lattice_shape({R(1), R(1, 10)}, GridSpec(10, 20));
  EXPECT_EQ(sh.shift, 10);
  EXPECT_EQ(sh.time_shifts, 20);
  EXPECT_EQ(sh.modulations, 100);
  EXPECT_EQ(sh.janssen_shifts, 2);
}

TEST(Lattice, Mismatch) {
  try {
    lattice_shape({R(1), R(1, 10)}, GridSpec(16, 32));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::LatticeMismatch);
    EXPECT_NE(std::string(e.what()).find("b*P=16/5"), std::string::npos);
  }
  EXPECT_THROW(lattice_shape({R(1, 3), R(1)}, GridSpec(4, 4)), Error);
  EXPECT_THROW(lattice_shape({R(0), R(1)}, GridSpec(4, 4)), Error);
}

TEST(SampleBspline, Indicator) {
  const SampledWindow b1 = sample_bspline(1, GridSpec(4, 3));
  for (Eigen::Index j = 0; j < 12; ++j) EXPECT_EQ(b1.values(j), Complex(j < 4 ? 1.0 : 0.0));
}

TEST(SampleBspline, HatPeak) {
  const SampledWindow b2 = sample_bspline(2, GridSpec(10, 4));
  EXPECT_EQ(b2.values(10).real(), 1.0);
  EXPECT_EQ(b2.values(0).real(), 0.0);
  EXPECT_EQ(b2.values(5).real(), 0.5);
}

TEST(SampleBspline, PartitionOfUnity) {
  for (int n = 2; n <= 8; ++n) {
    const GridSpec grid(8, 10);
    const SampledWindow b = sample_bspline(n, grid);
    for (Eigen::Index j = 0; j < grid.total(); ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < grid.period; ++k) acc += b.at(j - k * 8).real();
      EXPECT_NEAR(acc, 1.0, 1e-13) << "N=" << n << " j=" << j;
    }
  }
}

TEST(SampleBspline, MatchesTruncatedPowerOracle) {
  for (int n = 1; n <= 8; ++n) {
    const GridSpec grid(7, 9);
    const SampledWindow b = sample_bspline(n, grid);
    for (Eigen::Index j = 0; j < grid.total(); ++j) {
      EXPECT_NEAR(b.values(j).real(), truncated_power_bspline(n, grid.point(j)), 1e-12)
          << "N=" << n << " j=" << j;
    }
  }
}

TEST(BsplineValue, MatchesTruncatedPowerOffGrid) {
  for (int n = 1; n <= 8; ++n) {
    for (double x = -0.5; x < n + 0.5; x += 0.137) {
      EXPECT_NEAR(bspline_value(n, x), truncated_power_bspline(n, x), 1e-12);
    }
  }
}

TEST(SampleBspline, SupportOverflow) {
  try {
    sample_bspline(3, GridSpec(4, 2));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::SupportOverflow);
  }
}

TEST(SampleChar, Examples) {
  const SampledWindow one = sample_char(R(1), GridSpec(4, 3));
  EXPECT_EQ(one.values.real().sum(), 4.0);
  EXPECT_EQ(one.values(3).real(), 1.0);
  EXPECT_EQ(one.values(4).real(), 0.0);
  EXPECT_EQ(sample_char(R(1, 2), GridSpec(4, 3)).values.real().sum(), 2.0);
  EXPECT_EQ(sample_char(R(3), GridSpec(4, 3)).values.real().sum(), 12.0);
}

TEST(SampleChar, OffGrid) {
  try {
    sample_char(R(1, 3), GridSpec(4, 3));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::OffGrid);
  }
  EXPECT_THROW(sample_char(R(4), GridSpec(4, 3)), Error);
}

TEST(GaborFrame, SpikeOnFullLattice) {
  const GridSpec grid(4, 3);
  Vector v = Vector::Zero(12);
  v(0) = 1.0;
  const SampledWindow spike(grid, v);
  const Frame g = gabor_frame(spike, {R(1, 4), R(4, 3)});
  EXPECT_EQ(g.count(), 12 * 3);
  // each delta_n appears P times with unimodular phases, scaled by 1/sqrt(s)
  EXPECT_LE(dist(frame_operator(g), (3.0 / 4.0) * identity(12)), 1e-13);
}

TEST(GaborFrame, IndicatorIsOrthonormal) {
  const Frame g = gabor_frame(sample_char(R(1), GridSpec(6, 3)), {R(1), R(1)});
  EXPECT_EQ(g.count(), 18);
  EXPECT_LE(dist(g.synthesis().adjoint() * g.synthesis(), identity(18)), 1e-13);
  const FrameBounds b = frame_bounds(g);
  EXPECT_NEAR(b.lower, 1.0, 1e-13);
  EXPECT_NEAR(b.upper, 1.0, 1e-13);
}

TEST(GaborFrame, ColumnOrderAndEntries) {
  const GridSpec grid(4, 4);
  const SampledWindow g = sample_bspline(2, grid);
  const GaborLattice lat{R(1), R(1, 2)};
  const Frame f = gabor_frame(g, lat);
  const Eigen::Index nm = 8;
  for (Eigen::Index n = 0; n < 4; ++n) {
    for (Eigen::Index m = 0; m < nm; ++m) {
      for (Eigen::Index j = 0; j < 16; ++j) {
        const Complex expect = std::polar(1.0, 2 * M_PI * 0.5 * m * (j / 4.0)) *
                               g.at(j - 4 * n) / 2.0;
        EXPECT_LE(std::abs(f.synthesis()(j, n * nm + m) - expect), 1e-14);
      }
    }
  }
}

TEST(GaborFrame, MatchesBruteForceFrameOperator) {
  const SampledWindow g = sample_bspline(3, GridSpec(4, 6));
  const GaborLattice lat{R(1, 2), R(1, 2)};
  const LinearMap s = frame_operator(gabor_frame(g, lat));
  EXPECT_LE(dist(s, brute_frame_operator(g, lat)), 1e-12);
}

TEST(GaborFrame, UndersampledHasNoLowerBound) {
  // ab > 1 cannot give a frame
  const GridSpec grid(4, 8);
  EXPECT_EQ(frame_bounds(gabor_frame(sample_char(R(1), grid), {R(2), R(1)})).lower, 0.0);
  EXPECT_EQ(frame_bounds(gabor_frame(sample_bspline(2, grid), {R(1), R(2)})).lower, 0.0);
  EXPECT_EQ(frame_bounds(gabor_frame(sample_bspline(3, grid), {R(2), R(1)})).lower, 0.0);
}

TEST(GaborFrame, LatticeMismatch) {
  try {
    gabor_frame(sample_char(R(1), GridSpec(4, 3)), {R(1), R(1, 5)});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::LatticeMismatch);
  }
}

TEST(WalnutWeight, Examples) {
  const GridSpec grid(4, 4);
  const SampledWindow chi = sample_char(R(1), grid);
  EXPECT_LE((walnut_weight(chi, R(1)).values.array() - 1.0).abs().maxCoeff(), 1e-15);
  EXPECT_LE((walnut_weight(chi, R(1, 2)).values.array() - 2.0).abs().maxCoeff(), 1e-15);

  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow w = walnut_weight(b2, R(1));
  for (Eigen::Index j = 0; j < grid.total(); ++j) {
    const double x = std::fmod(grid.point(j), 1.0);
    const double hat0 = truncated_power_bspline(2, x);
    const double hat1 = truncated_power_bspline(2, x + 1);
    EXPECT_NEAR(w.values(j).real(), hat0 * hat0 + hat1 * hat1, 1e-14);
    EXPECT_EQ(w.values(j).imag(), 0.0);
  }
}

TEST(WalnutWeight, OffGrid) {
  EXPECT_THROW(walnut_weight(sample_char(R(1), GridSpec(4, 4)), R(1, 3)), Error);
}

TEST(PainlessCheck, IndicatorHalfShift) {
  const GridSpec grid(8, 4);
  const PainlessReport r = painless_check(sample_char(R(1), grid), {R(1, 2), R(1)}, 1);
  EXPECT_TRUE(r.diagonal);
  EXPECT_EQ(r.matched, "G/b");
  EXPECT_LE(r.deviation_g_over_b, 1e-12);
  // b/G = 1/2 would be off by 3/4 of the diagonal scale
  EXPECT_NEAR(r.deviation_b_over_g, 0.75, 1e-12);
  EXPECT_NEAR(r.bounds.lower, 2.0, 1e-12);
  EXPECT_NEAR(r.bounds.upper, 2.0, 1e-12);
}

TEST(PainlessCheck, HatWindow) {
  const GridSpec grid(3, 6);
  const SampledWindow b2 = sample_bspline(2, grid);
  const GaborLattice lat{R(1), R(1, 3)};
  const PainlessReport r = painless_check(b2, lat, 2);
  EXPECT_TRUE(r.diagonal);
  EXPECT_EQ(r.matched, "G/b");
  const LinearMap s = brute_frame_operator(b2, lat);
  const RealVector g = walnut_weight(b2, R(1)).values.real();
  for (Eigen::Index j = 0; j < grid.total(); ++j) {
    EXPECT_NEAR(s(j, j).real(), 3.0 * g(j), 1e-12);
  }
}

TEST(PainlessCheck, HypothesisViolations) {
  const GridSpec grid(4, 6);
  try {
    painless_check(sample_bspline(2, grid), {R(1), R(1)}, 2);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
    EXPECT_NE(std::string(e.what()).find("b <= 1/N"), std::string::npos);
  }
  try {
    painless_check(sample_bspline(3, GridSpec(4, 8)), {R(1), R(1, 4)}, 2);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
    EXPECT_NE(std::string(e.what()).find("supp"), std::string::npos);
  }
  try {
    painless_check(sample_char(R(1, 2), grid), {R(1), R(1)}, 1);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
    EXPECT_NE(std::string(e.what()).find("G is not bounded"), std::string::npos);
  }
}

TEST(PainlessCheck, DiagonalWheneverHypothesesHold) {
  const GridSpec grid(4, 12);
  for (int n = 1; n <= 4; ++n) {
    for (const Rational &a : {R(1, 2), R(1)}) {
      const SampledWindow g = sample_bspline(n, grid);
      const PainlessReport r = painless_check(g, {a, R(1, n)}, n);
      EXPECT_TRUE(r.diagonal) << "N=" << n;
      EXPECT_LE(r.off_diagonal_mass, 1e-10);
      EXPECT_EQ(r.matched, "G/b");
    }
  }
}

TEST(Janssen, IndicatorOrthonormalBasis) {
  const SampledWindow chi = sample_char(R(1), GridSpec(5, 4));
  EXPECT_LE(janssen_residual(chi, chi, {R(1), R(1)}), 1e-12);
}

TEST(Janssen, ZeroWindow) {
  const GridSpec grid(10, 20);
  const GaborLattice lat{R(1), R(1, 10)};
  EXPECT_NEAR(janssen_residual(sample_bspline(2, grid), zero_window(grid), lat), 0.1, 1e-15);
}

TEST(Janssen, TableHasOneRowPerShift) {
  const GridSpec grid(10, 20);
  const GaborLattice lat{R(1), R(1, 10)};
  const SampledWindow g = sample_bspline(2, grid);
  const std::vector<double> t = janssen_table(g, ck_dual1(g, 2, R(1, 10)), lat);
  EXPECT_EQ(t.size(), 2u);
}

TEST(Janssen, AgreesWithMaterializedRate) {
  const GridSpec grid(6, 12);
  struct Case {
    SampledWindow g, h;
    GaborLattice lat;
  };
  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow b3 = sample_bspline(3, grid);
  const std::vector<Case> cases = {
      {b2, ck_dual1(b2, 2, R(1, 3)), {R(1), R(1, 3)}},
      {b3, ck_dual1(b3, 3, R(1, 6)), {R(1), R(1, 6)}},
      {b2, b2, {R(1), R(1, 3)}},
      {b2, ck_dual1(b2, 2, R(1, 3)), {R(1, 2), R(1, 3)}},
      {sample_char(R(1, 2), grid), sample_char(R(1, 2), grid), {R(1, 2), R(1)}},
      {sample_char(R(1, 2), grid), sample_char(R(1, 2), grid), {R(1, 3), R(1)}},
  };
  for (const Case &c : cases) {
    const double residual = janssen_residual(c.g, c.h, c.lat);
    const double rate = approximation_rate(gabor_frame(c.g, c.lat), gabor_frame(c.h, c.lat));
    EXPECT_EQ(residual <= 1e-10, rate <= 1e-10) << residual << " vs " << rate;
  }
}

TEST(CkDual1, HatWindowExact) {
  const GridSpec grid(10, 20);
  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow d = ck_dual1(b2, 2, R(1, 10));
  for (Eigen::Index j = 0; j < grid.total(); ++j) {
    EXPECT_EQ(d.values(j), 0.1 * b2.at(j) + 0.2 * b2.at(j + 10)) << j;
  }
  EXPECT_LE(janssen_residual(b2, d, {R(1), R(1, 10)}), 1e-10);
}

TEST(CkDual1, IndicatorDegenerates) {
  const GridSpec grid(4, 3);
  const SampledWindow b1 = sample_bspline(1, grid);
  const SampledWindow d = ck_dual1(b1, 1, R(1));
  EXPECT_EQ(d.values, b1.values);
}

TEST(CkDual1, CubicWindow) {
  const GridSpec grid(5, 10);
  const SampledWindow b3 = sample_bspline(3, grid);
  const SampledWindow d = ck_dual1(b3, 3, R(1, 5));
  EXPECT_LE(janssen_residual(b3, d, {R(1), R(1, 5)}), 1e-10);
}

TEST(CkDual1, Hypotheses) {
  const GridSpec grid(6, 8);
  const SampledWindow b2 = sample_bspline(2, grid);
  // b too large
  EXPECT_THROW(ck_dual1(b2, 2, R(1, 2)), Error);
  // no partition of unity
  const SampledWindow half(grid, 0.5 * b2.values);
  try {
    ck_dual1(half, 2, R(1, 3));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::HypothesisViolated);
    EXPECT_NE(std::string(e.what()).find("partition of unity"), std::string::npos);
  }
  // support too long for N
  EXPECT_THROW(ck_dual1(sample_bspline(3, grid), 2, R(1, 3)), Error);
  // complex window
  const SampledWindow twisted(grid, Complex(0, 1) * b2.values);
  EXPECT_THROW(ck_dual1(twisted, 2, R(1, 3)), Error);
}

TEST(CkDual2, SymmetricCoefficients) {
  const GridSpec grid(6, 12);
  const SampledWindow b3 = sample_bspline(3, grid);
  const double b = 1.0 / 6.0;
  const SampledWindow d = ck_dual2(b3, 3, R(1, 6), {b, b, b, b, b});
  EXPECT_LE(janssen_residual(b3, d, {R(1), R(1, 6)}), 1e-10);
}

TEST(CkDual2, ReproducesFirstFormula) {
  const GridSpec grid(10, 20);
  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow d2 = ck_dual2(b2, 2, R(1, 10), {0.0, 0.1, 0.2});
  const SampledWindow d1 = ck_dual1(b2, 2, R(1, 10));
  EXPECT_LE((d2.values - d1.values).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(CkDual2, AsymmetricValidChoice) {
  const GridSpec grid(6, 12);
  const SampledWindow b3 = sample_bspline(3, grid);
  const double b = 1.0 / 6.0;
  const SampledWindow d = ck_dual2(b3, 3, R(1, 6), {-b, 0.5 * b, b, 1.5 * b, 3 * b});
  EXPECT_LE(janssen_residual(b3, d, {R(1), R(1, 6)}), 1e-10);
}

TEST(CkDual2, BadCoefficients) {
  const GridSpec grid(10, 20);
  const SampledWindow b2 = sample_bspline(2, grid);
  try {
    ck_dual2(b2, 2, R(1, 10), {0.1, 0.2, 0.1});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadCoefficients);
    EXPECT_NE(std::string(e.what()).find("a_0"), std::string::npos);
  }
  try {
    ck_dual2(b2, 2, R(1, 10), {0.0, 0.1, 0.1});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadCoefficients);
    EXPECT_NE(std::string(e.what()).find("a_1+a_-1"), std::string::npos);
  }
  EXPECT_THROW(ck_dual2(b2, 2, R(1, 10), {0.1}), Error);
}

TEST(Commutation, Examples) {
  const GridSpec grid(4, 6);
  const GaborLattice lat{R(1), R(1, 2)};
  EXPECT_EQ(commutation_check(identity(24), lat, grid), 0.0);

  const LinearMap s = frame_operator(gabor_frame(sample_bspline(2, grid), lat));
  EXPECT_LE(commutation_check(s, lat, grid), 1e-10 * operator_norm(s));
  EXPECT_LE(commutation_check(s * s - 3.0 * s + identity(24), lat, grid), 1e-10 * operator_norm(s * s));

  std::mt19937_64 rng(50);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector diag(24);
  for (Eigen::Index j = 0; j < 24; ++j) diag(j) = u(rng);
  EXPECT_GT(commutation_check(LinearMap(diag.asDiagonal()), lat, grid), 0.1);
}

TEST(Commutation, FrameOperatorsCommuteWithLattice) {
  const GridSpec grid(6, 6);
  for (const GaborLattice &lat : {GaborLattice{R(1), R(1, 3)}, GaborLattice{R(1, 2), R(1, 2)},
                                  GaborLattice{R(1, 3), R(1)}}) {
    for (int n = 1; n <= 4; ++n) {
      const LinearMap s = frame_operator(gabor_frame(sample_bspline(n, grid), lat));
      EXPECT_LE(commutation_check(s, lat, grid), 1e-10 * operator_norm(s));
    }
  }
}

TEST(ScaledGaborOperator, TightGivesIdentity) {
  const ScaledGaborOperator a = scaled_gabor_operator(sample_char(R(1), GridSpec(6, 3)), {R(1), R(1)});
  EXPECT_LE(dist(a.a, identity(18)), 1e-13);
  EXPECT_LE(a.gap, 1e-13);
}

TEST(ScaledGaborOperator, IndicatorHalfShift) {
  const ScaledGaborOperator a = scaled_gabor_operator(sample_char(R(1), GridSpec(4, 4)), {R(1, 2), R(1)});
  EXPECT_NEAR(a.bounds.upper, 2.0, 1e-13);
  EXPECT_LE(dist(a.a, identity(16)), 1e-13);
}

TEST(ScaledGaborOperator, HatWalnutSpectrum) {
  const GridSpec grid(10, 20);
  const GaborLattice lat{R(1), R(1, 10)};
  const SampledWindow b2 = sample_bspline(2, grid);
  const ScaledGaborOperator a = scaled_gabor_operator(b2, lat);
  const RealVector g = walnut_weight(b2, R(1)).values.real();
  const double m_upper = g.maxCoeff() / 0.1;
  EXPECT_NEAR(a.bounds.upper, m_upper, 1e-10);
  LinearMap expected = LinearMap::Zero(200, 200);
  for (Eigen::Index j = 0; j < 200; ++j) expected(j, j) = g(j) / (0.1 * m_upper);
  EXPECT_LE(dist(a.a, expected), 1e-12);
  EXPECT_NEAR(a.gap, 1.0 - g.minCoeff() / g.maxCoeff(), 1e-12);
  EXPECT_LT(a.gap, 1.0);
  EXPECT_LE(commutation_check(a.a, lat, grid), 1e-9);
}

TEST(ScaledGaborOperator, NotAFrame) {
  try {
    scaled_gabor_operator(sample_char(R(1, 2), GridSpec(4, 4)), {R(1), R(1)});
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotAFrame);
  }
}

TEST(ApproxDualWindow, IdentityGivesExactDual) {
  const GridSpec grid(6, 12);
  const GaborLattice lat{R(1), R(1, 3)};
  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow gd = ck_dual1(b2, 2, R(1, 3));
  const SampledWindow gad = approx_dual_window(b2, gd, identity(grid.total()), lat);
  EXPECT_LE(approximation_rate(gabor_frame(b2, lat), gabor_frame(gad, lat)), 1e-10);
}

TEST(ApproxDualWindow, ScaledOperatorOfAnotherLattice) {
  const GridSpec grid(4, 12);
  const GaborLattice lat{R(1), R(1, 4)};
  const SampledWindow chi = sample_char(R(1), grid);
  const ScaledGaborOperator a = scaled_gabor_operator(sample_bspline(3, grid), lat);
  // chi/4 is the canonical dual window here, S = 4 Id
  const SampledWindow gd = ck_dual1(chi, 1, R(1, 4));
  const SampledWindow gad = approx_dual_window(chi, gd, a.a, lat);
  const LinearMap mixed = mixed_operator(gabor_frame(chi, lat), gabor_frame(gad, lat));
  EXPECT_LE(dist(mixed, a.a), 1e-9);
  EXPECT_NEAR(operator_norm(identity(grid.total()) - mixed), a.gap, 1e-9);
}

TEST(ApproxDualWindow, BsplinePattern) {
  const GridSpec grid(6, 12);
  const GaborLattice lat{R(1), R(1, 3)};
  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow gd = ck_dual1(b2, 2, R(1, 3));
  const ScaledGaborOperator a = scaled_gabor_operator(sample_bspline(3, grid), lat);
  const SampledWindow gad = approx_dual_window(b2, gd, a.a, lat);

  // independent evaluation of A* S^{-1} g - g + S g^d with a dense inverse
  const LinearMap s = brute_frame_operator(b2, lat);
  const Vector expect = a.a.adjoint() * s.inverse() * b2.values - b2.values + s * gd.values;
  EXPECT_LE((gad.values - expect).norm(), 1e-10 * expect.norm());
  const LinearMap mixed = mixed_operator(gabor_frame(b2, lat), gabor_frame(gad, lat));
  EXPECT_LE(dist(mixed, a.a), 1e-9);
}

TEST(ApproxDualWindow, Errors) {
  const GridSpec grid(6, 12);
  const GaborLattice lat{R(1), R(1, 3)};
  const SampledWindow b2 = sample_bspline(2, grid);
  const SampledWindow gd = ck_dual1(b2, 2, R(1, 3));
  const Eigen::Index l = grid.total();
  try {
    approx_dual_window(b2, b2, identity(l), lat);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotDualPair);
  }
  LinearMap diag = identity(l);
  diag(0, 0) = 0.5;
  try {
    approx_dual_window(b2, gd, diag, lat);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
  }
  try {
    approx_dual_window(b2, gd, 2.5 * identity(l), lat);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ContractViolation);
    EXPECT_NEAR(*e.measured(), 1.5, 1e-14);
  }
}

TEST(CharDual, Examples) {
  const GridSpec grid(8, 6);
  EXPECT_TRUE(char_dual_check(R(1, 2), R(1, 2), R(1, 2), grid));
  EXPECT_TRUE(char_dual_check(R(1, 2), R(3, 4), R(1, 2), grid));
  EXPECT_FALSE(char_dual_check(R(1, 2), R(3, 4), R(3, 4), grid));
  EXPECT_GT(char_dual_residual(R(1, 2), R(3, 4), R(3, 4), grid), 0.1);
}

TEST(CharDual, OffGrid) {
  try {
    char_dual_check(R(1, 3), R(1, 2), R(1, 2), GridSpec(8, 6));
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::OffGrid);
  }
}
