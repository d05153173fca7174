#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace fx;

namespace {

MatrixPoly scalar_poly(std::vector<double> c) {
  std::vector<Mat> cs;
  for (double v : c) cs.push_back(Mat::Constant(1, 1, v));
  return MatrixPoly(std::move(cs));
}

Mat diag3(double a, double b, double c) { return Vec((Vec(3) << a, b, c).finished()).asDiagonal(); }

void expect_coeffs_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], tol) << "coefficient " << i;
}

}  // namespace

// ---------------------------------------------------------------------------
// det_poly / is_regular

TEST(DetPoly, DiagonalShift) {
  // z (z - 0.7)^2 = z^3 - 1.4 z^2 + 0.49 z
  expect_coeffs_near(det_poly(MatrixPoly::shift_minus(diag3(0.7, 0.7, 0))), {0, 0.49, -1.4, 1}, 1e-12);
}

TEST(DetPoly, ScalarIsItself) { expect_coeffs_near(det_poly(scalar_poly({0.5, -1, 2})), {0.5, -1, 2}, 1e-12); }

TEST(DetPoly, NkMatchesCofactorOracle) {
  const MatrixPoly P = nk().char_poly();
  auto got = det_poly(P);
  auto want = cofactor_det(P);
  while (!want.empty() && std::abs(want.back()) < 1e-14) want.pop_back();
  double scale = 0;
  for (double v : want) scale = std::max(scale, std::abs(v));
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8 * scale);
}

TEST(DetPoly, RandomMatchesCofactorOracle) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = rng.integer(1, 4);
    const int d = rng.integer(1, 3);
    std::vector<Mat> c;
    for (int k = 0; k <= d; ++k) c.push_back(rng.matrix(n, n));
    MatrixPoly P(std::move(c));
    auto got = det_poly(P);
    auto want = cofactor_det(P);
    double scale = 0;
    for (double v : want) scale = std::max(scale, std::abs(v));
    want.resize(got.size(), 0.0);
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8 * scale) << "trial " << trial;
  }
}

TEST(IsRegular, Cases) {
  Rng rng(3);
  EXPECT_TRUE(is_regular(MatrixPoly::shift_minus(rng.matrix(4, 4))));
  EXPECT_FALSE(is_regular(MatrixPoly(3, 3)));
  EXPECT_TRUE(is_regular(nk().char_poly()));
  // [[z, z^2], [1, z]] has determinant z^2 - z^2 = 0
  MatrixPoly sing(std::vector<Mat>{mat(2, 2, {0, 0, 1, 0}), mat(2, 2, {1, 0, 0, 1}), mat(2, 2, {0, 1, 0, 0})});
  EXPECT_FALSE(is_regular(sing));
  EXPECT_TRUE(det_poly(sing).empty());
}

// ---------------------------------------------------------------------------
// polyeig

TEST(PolyEig, DiagonalShift) {
  auto e = polyeig(MatrixPoly::shift_minus(diag3(0.7, 0.7, 0)));
  EXPECT_EQ(e.infiniteCount, 0);
  ASSERT_EQ(e.finite.size(), 3u);
  EXPECT_NEAR(std::abs(e.finite[0] - 0.7), 0, 1e-10);
  EXPECT_NEAR(std::abs(e.finite[1] - 0.7), 0, 1e-10);
  EXPECT_NEAR(std::abs(e.finite[2]), 0, 1e-10);
}

TEST(PolyEig, QuadraticIdentity) {
  MatrixPoly P(std::vector<Mat>{Mat::Zero(2, 2), -Mat::Identity(2, 2), Mat::Identity(2, 2)});
  auto e = polyeig(P);
  EXPECT_EQ(e.infiniteCount, 0);
  ASSERT_EQ(e.finite.size(), 4u);
  EXPECT_EQ(std::count_if(e.finite.begin(), e.finite.end(), [](cplx z) { return std::abs(z - 1.0) < 1e-10; }), 2);
  EXPECT_EQ(std::count_if(e.finite.begin(), e.finite.end(), [](cplx z) { return std::abs(z) < 1e-10; }), 2);
}

TEST(PolyEig, NkUnstablePair) {
  const MatrixPoly P = nk().char_poly();
  auto e = polyeig(P);
  EXPECT_TRUE(contains(e.finite, 1.4461829, 1e-6));
  EXPECT_TRUE(contains(e.finite, 1.0446352, 1e-6));
  EXPECT_EQ(static_cast<int>(e.finite.size()) + e.infiniteCount, 6);
  EXPECT_EQ(e.finite.size() + 1, det_poly(P).size());
}

TEST(PolyEig, CountsAndResidualsOnRandom) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const auto n = rng.integer(1, 4);
    const int d = rng.integer(1, 3);
    std::vector<Mat> c;
    for (int k = 0; k <= d; ++k) c.push_back(rng.matrix(n, n));
    if (trial % 3 == 0) c.back().row(0).setZero();  // singular leading coefficient
    MatrixPoly P(std::move(c));
    auto e = polyeig(P);
    EXPECT_EQ(static_cast<Eigen::Index>(e.finite.size()) + e.infiniteCount, n * P.trim().degree());
    EXPECT_EQ(e.finite.size() + 1, det_poly(P).size());
    const double cn = P.max_abs();
    for (auto z : e.finite) {
      Eigen::JacobiSVD<CMat> svd(P(z));
      EXPECT_LE(svd.singularValues()(n - 1), 1e-6 * cn * std::max(1.0, std::pow(std::abs(z), d))) << z;
    }
  }
}

// ---------------------------------------------------------------------------
// left_nullvector

TEST(LeftNullvector, Diagonal) {
  CRow c = left_nullvector(mat(2, 2, {0, 0, 0, 1}).cast<cplx>());
  EXPECT_NEAR(std::abs(c(0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(c(1)), 0.0, 1e-12);
}

TEST(LeftNullvector, FullRankThrows) {
  try {
    left_nullvector(CMat::Identity(3, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FullRank);
  }
}

TEST(LeftNullvector, RandomRankDeficient) {
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = rng.integer(2, 6);
    Vec s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = rng.uni(0.5, 3.0);
    s(n - 1) = 0.0;
    const Mat M = rng.with_singular_values(s);
    CRow c = left_nullvector(M.cast<cplx>());
    EXPECT_NEAR(c.norm(), 1.0, 1e-12);
    EXPECT_LE((c * M.cast<cplx>()).norm(), 1e-10 * M.norm());
  }
}

TEST(LeftNullvector, NkFirstUnstableEigenvalue) {
  // The displayed vectors annihilate P(lambda) from the right (see README);
  // the computed left vector annihilates from the left.
  const ModelCM M = nk();
  const CMat P = M.char_poly()(1.4461829);
  CRow c = left_nullvector(P, ToleranceConfig{.nullvec = 1e-5});
  EXPECT_LE((c * P).norm(), 1e-5);
  Eigen::JacobiSVD<CMat> svd(P, Eigen::ComputeFullV);
  CVec right = svd.matrixV().col(2);
  right /= right(1) / std::abs(right(1));
  const Vec shown = (Vec(3) << -0.5818587, 0.6738827, -0.4553268).finished();
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(right(i)), std::abs(shown(i)), 1e-5);
}

// ---------------------------------------------------------------------------
// Properness

TEST(Properness, Examples) {
  const Mat R = diag3(0.7, 0.7, 0);
  // [I - R z^{-1}]^{-1} = (zI - R)^{-1} z
  RationalMatrix geo(MatrixPoly::shift_minus(R), MatrixPoly::monomial(Mat::Identity(3, 3), 1));
  EXPECT_EQ(classify_properness(geo), Properness::Proper);
  RationalMatrix nil(MatrixPoly(std::vector<Mat>{-Mat::Identity(2, 2), mat(2, 2, {0, 1, 0, 0})}), MatrixPoly::identity(2));
  EXPECT_EQ(classify_properness(nil), Properness::Improper);
  RationalMatrix nkInv(nk().char_poly(), MatrixPoly::identity(3));
  EXPECT_EQ(classify_properness(nkInv), Properness::StrictlyProper);
}

TEST(Properness, InvariantUnderCommonScaling) {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto Rm = random_proper(rng, 2, 2, 1, 1);
    if (trial % 2) Rm.num = Rm.num.shifted(1);  // improper variant
    const auto base = classify_properness(Rm);
    for (double s : {1e-3, -7.0, 250.0}) {
      RationalMatrix scaled(s * Rm.leftDen, s * Rm.num, s * Rm.rightDen);
      EXPECT_EQ(classify_properness(scaled), base);
    }
  }
}

// ---------------------------------------------------------------------------
// expand_impulse

TEST(ExpandImpulse, GeometricSeries) {
  const Mat R = diag3(0.7, 0.7, 0);
  RationalMatrix geo(MatrixPoly::shift_minus(R), MatrixPoly::monomial(Mat::Identity(3, 3), 1));
  auto h = expand_impulse(geo, 12);
  auto want = powers(R, 12);
  EXPECT_LE(seq_diff(h, want, 12), 1e-12);
}

TEST(ExpandImpulse, ScalarPole) {
  auto h = expand_impulse(RationalMatrix(scalar_poly({-0.5, 1}), scalar_poly({1})), 5);
  const double want[] = {0, 1, 0.5, 0.25, 0.125, 0.0625};
  for (int t = 0; t <= 5; ++t) EXPECT_NEAR(h[static_cast<std::size_t>(t)](0, 0), want[t], 1e-13);
}

TEST(ExpandImpulse, ImproperThrows) {
  RationalMatrix nil(MatrixPoly(std::vector<Mat>{-Mat::Identity(2, 2), mat(2, 2, {0, 1, 0, 0})}), MatrixPoly::identity(2));
  try {
    expand_impulse(nil, 4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ImproperInput);
  }
}

TEST(ExpandImpulse, LongDivisionOracle) {
  Rng rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = rng.integer(1, 3);
    auto Rm = random_proper(rng, 2, 2, d, 0);
    const int T = 30;
    auto got = expand_impulse(Rm, T);
    auto want = long_division_impulse(Rm.leftDen, Rm.num, T);
    for (int t = 0; t <= T; ++t) {
      const double s = 1.0 + want[static_cast<std::size_t>(t)].cwiseAbs().maxCoeff();
      EXPECT_LE((got[static_cast<std::size_t>(t)] - want[static_cast<std::size_t>(t)]).cwiseAbs().maxCoeff(), 1e-9 * s)
          << "trial " << trial << " t " << t;
    }
  }
}

TEST(ExpandImpulse, ConvolutionRule) {
  Rng rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    auto Rm = random_proper(rng, 3, 2, 2, 0);
    Rm.num = Rm.num.trim();
    const int T = 25;
    const int dn = Rm.num.degree();
    // D^{-1} N = sum_k (D^{-1} z^k) N_k
    auto inv = expand_impulse(RationalMatrix(Rm.leftDen, MatrixPoly::identity(3)), T + dn);
    auto got = expand_impulse(Rm, T);
    for (int t = 0; t <= T; ++t) {
      Mat want = Mat::Zero(3, 2);
      for (int k = 0; k <= dn; ++k) want += inv.at(t + k) * Rm.num[k];
      EXPECT_LE((got[static_cast<std::size_t>(t)] - want).cwiseAbs().maxCoeff(), 1e-9 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
  }
}

TEST(ExpandImpulse, LeftShiftRule) {
  Rng rng(37);
  auto Rm = random_proper(rng, 2, 2, 2, 1);
  const int T = 400;
  auto y = expand_impulse(Rm, T);
  for (cplx z : {cplx(3.0, 1.0), cplx(-2.5, 2.0), cplx(0.0, 4.0)}) {
    if (std::abs(z) <= 1.5 * std::max(1.0, max_modulus(denominator_poles(Rm)))) continue;
    CMat shifted = CMat::Zero(2, 2);
    cplx zk = 1.0;
    for (int t = 0; t < T; ++t) {
      shifted += y[static_cast<std::size_t>(t + 1)].cast<cplx>() * zk;
      zk /= z;
    }
    CMat rule = z * (Rm(z) - y[0].cast<cplx>());
    EXPECT_LE((shifted - rule).norm(), 1e-8 * (1.0 + rule.norm()));
  }
}

// ---------------------------------------------------------------------------
// State space

TEST(StateSpaceBasics, ImpulseExamples) {
  StateSpace S0{Mat(0, 0), Mat(0, 2), Mat(2, 0), mat(2, 2, {1, 2, 3, 4})};
  auto h0 = ss_impulse(S0, 3);
  EXPECT_EQ(h0[0], S0.D);
  EXPECT_TRUE(h0[1].isZero() && h0[3].isZero());
  StateSpace S1{mat(1, 1, {0.5}), mat(1, 1, {1}), mat(1, 1, {1}), mat(1, 1, {0})};
  auto h1 = ss_impulse(S1, 3);
  const double want[] = {0, 1, 0.5, 0.25};
  for (int t = 0; t <= 3; ++t) EXPECT_DOUBLE_EQ(h1[static_cast<std::size_t>(t)](0, 0), want[t]);
}

TEST(StateSpaceBasics, SimulateZeroAndImpulse) {
  Rng rng(41);
  StateSpace S{rng.stable(3), rng.matrix(3, 2), rng.matrix(2, 3), rng.matrix(2, 2)};
  std::vector<Vec> zero(6, Vec::Zero(2));
  for (const auto& y : ss_simulate(S, zero, Vec::Zero(3))) EXPECT_TRUE(y.isZero());
  auto h = ss_impulse(S, 5);
  std::vector<Vec> imp(6, Vec::Zero(2));
  imp[0](1) = 1.0;
  auto ys = ss_simulate(S, imp, Vec::Zero(3));
  for (int t = 0; t <= 5; ++t) EXPECT_LE((ys[static_cast<std::size_t>(t)] - h[static_cast<std::size_t>(t)].col(1)).norm(), 1e-14);
  // Superposition
  auto u1 = random_shocks(rng, 2, 8), u2 = random_shocks(rng, 2, 8);
  std::vector<Vec> sum;
  for (std::size_t t = 0; t < u1.size(); ++t) sum.push_back(u1[t] + 2.0 * u2[t]);
  Vec x1 = rng.matrix(3, 1), x2 = rng.matrix(3, 1);
  auto y1 = ss_simulate(S, u1, x1), y2 = ss_simulate(S, u2, x2), ys2 = ss_simulate(S, sum, x1 + 2.0 * x2);
  for (std::size_t t = 0; t < y1.size(); ++t) EXPECT_LE((ys2[t] - y1[t] - 2.0 * y2[t]).norm(), 1e-12);
  EXPECT_THROW(ss_simulate(S, zero, Vec::Zero(2)), Error);
}

TEST(Realization, ScalarPole) {
  auto S = minimal_realization(RationalMatrix(scalar_poly({-0.5, 1}), scalar_poly({1})));
  ASSERT_EQ(S.order(), 1);
  EXPECT_NEAR(S.A(0, 0), 0.5, 1e-10);
  EXPECT_NEAR(S.D(0, 0), 0.0, 1e-12);
}

TEST(Realization, RoundTripAndMinimality) {
  Rng rng(43);
  for (int trial = 0; trial < 25; ++trial) {
    const auto n = rng.integer(1, 4), m = rng.integer(1, 4);
    const int d1 = rng.integer(1, 3), d2 = rng.integer(0, 1);
    auto Rm = random_proper(rng, n, m, d1, d2);
    auto S = minimal_realization(Rm);
    const int T = 30;
    auto a = ss_impulse(S, T), b = expand_impulse(Rm, T);
    EXPECT_LE(seq_diff(a, b, T), 1e-7 * (1.0 + seq_scale(b, T))) << "trial " << trial;
    // re-realizing the Markov parameters of a minimal system keeps the order
    const int k = static_cast<int>(S.order()) + 2;
    const double gamma = std::max(1.0, spectral_radius(S.A));
    auto S2 = ho_kalman(ss_impulse(S, 2 * k + 2), k, gamma);
    EXPECT_EQ(S2.order(), S.order()) << "trial " << trial;
  }
}

TEST(Realization, CancellationLowersOrder) {
  // (z - 0.3) / ((z - 0.3)(z - 0.8)) has McMillan degree 1
  RationalMatrix Rm(scalar_poly({0.24, -1.1, 1}), scalar_poly({-0.3, 1}));
  auto S = minimal_realization(Rm);
  ASSERT_EQ(S.order(), 1);
  EXPECT_NEAR(S.A(0, 0), 0.8, 1e-8);
}

TEST(Realization, HintTooSmall) {
  RationalMatrix Rm(scalar_poly({0.24, -1.1, 1}), scalar_poly({1}));
  try {
    minimal_realization(Rm, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::HintTooSmall);
  }
}
