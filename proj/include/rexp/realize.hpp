#pragma once

// State-space realizations: impulse expansion of matrix fractions, Ho-Kalman
// minimal realization, and plain simulation.

#include "rexp/polyalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rexp {

template <typename Scalar>
struct BasicStateSpace {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M A, B, C, D;

  Eigen::Index order() const { return A.rows(); }
  Eigen::Index inputs() const { return D.cols(); }
  Eigen::Index outputs() const { return D.rows(); }
};

using StateSpace = BasicStateSpace<double>;
using ComplexStateSpace = BasicStateSpace<cplx>;

/// Real parts of the Markov parameters D, CB, CAB, ... up to T.
template <typename Scalar>
ImpulseSeq markov(const BasicStateSpace<Scalar>& S, int T) {
  using M = typename BasicStateSpace<Scalar>::M;
  std::vector<Mat> out;
  out.push_back(S.D.real());
  M AkB = S.B;
  for (int t = 1; t <= T; ++t) {
    if (S.order() == 0) out.push_back(Mat::Zero(S.outputs(), S.inputs()));
    else {
      out.push_back((S.C * AkB).real());
      AkB = (S.A * AkB).eval();
    }
  }
  return ImpulseSeq(std::move(out));
}

inline ImpulseSeq ss_impulse(const StateSpace& S, int T) { return markov(S, T); }

inline std::vector<Vec> ss_simulate(const StateSpace& S, const std::vector<Vec>& inputs, const Vec& x0) {
  if (inputs.empty()) throw Error(ErrorKind::DimensionMismatch, "no inputs to simulate");
  if (x0.size() != S.order()) throw Error(ErrorKind::DimensionMismatch, "initial state has wrong length");
  std::vector<Vec> ys;
  Vec x = x0;
  for (const auto& u : inputs) {
    if (u.size() != S.inputs()) throw Error(ErrorKind::DimensionMismatch, "input has wrong length");
    ys.push_back(S.C * x + S.D * u);
    x = (S.A * x + S.B * u).eval();
  }
  return ys;
}

inline double spectral_radius(const Mat& A) {
  if (A.rows() == 0) return 0.0;
  return Eigen::EigenSolver<Mat>(A, false).eigenvalues().cwiseAbs().maxCoeff();
}

namespace detail {

// Swaps adjacent diagonal entries k, k+1 of an upper triangular Schur factor.
inline void schur_swap(CMat& T, CMat& Q, Eigen::Index k) {
  cplx a = T(k, k), b = T(k, k + 1), c = T(k + 1, k + 1);
  cplx x1 = b, x2 = c - a;
  double nx = std::sqrt(std::norm(x1) + std::norm(x2));
  if (nx == 0.0) return;
  x1 /= nx;
  x2 /= nx;
  Eigen::Matrix2cd G;
  G << x1, -std::conj(x2), x2, std::conj(x1);
  T.middleCols(k, 2) = (T.middleCols(k, 2) * G).eval();
  T.middleRows(k, 2) = (G.adjoint() * T.middleRows(k, 2)).eval();
  Q.middleCols(k, 2) = (Q.middleCols(k, 2) * G).eval();
  T(k + 1, k) = 0.0;
}

/// Realization of D1^{-1} N D2^{-1} read off the first-companion pencil of
/// S(z) = [[D2, 0], [-N, D1]]. Contains every finite pole, so it is generally
/// not minimal; the feedthrough comes from the infinite part of the pencil.
inline ComplexStateSpace pencil_realization(const RationalMatrix& Rm, const ToleranceConfig& tol) {
  const auto n = Rm.rows(), m = Rm.cols();
  const MatrixPoly S = block2x2(Rm.rightDen, MatrixPoly(m, n), -Rm.num, Rm.leftDen).trim();
  const auto q = n + m;
  ComplexStateSpace out;

  if (S.degree() == 0) {
    Mat inv = S[0].fullPivLu().solve(Mat::Identity(q, q));
    out.A.resize(0, 0);
    out.B.resize(0, m);
    out.C.resize(n, 0);
    out.D = inv.block(m, 0, n, m).cast<cplx>();
    return out;
  }

  int r = 0;
  std::vector<cplx> poles;
  for (const auto* D : {&Rm.leftDen, &Rm.rightDen}) {
    auto sd = detail::det_scaled(*D, tol);
    if (sd.degree < 0) throw Error(ErrorKind::NotRegular, "denominator determinant vanishes");
    r += sd.degree;
    if (sd.degree > 0) {
      auto e = polyeig(*D, tol);
      poles.insert(poles.end(), e.finite.begin(), e.finite.end());
    }
  }
  const double sigma = max_modulus(poles);

  Mat E, F;
  companion(S, E, F);
  const auto N = E.rows();
  const auto s = N - r;
  CMat Hsel = CMat::Zero(n, N);
  for (Eigen::Index i = 0; i < n; ++i) Hsel(i, m + i) = 1.0;
  CMat Gsel = CMat::Zero(N, m);
  for (Eigen::Index i = 0; i < m; ++i) Gsel((S.degree() - 1) * q + i, i) = 1.0;

  const cplx z0 = std::polar(2.0 * (1.0 + sigma), 0.7);
  Eigen::PartialPivLU<CMat> lu(z0 * E.cast<cplx>() - F.cast<cplx>());
  const CMat K = lu.solve(E.cast<cplx>());
  const CMat MG = lu.solve(Gsel);

  Eigen::ComplexSchur<CMat> cs(K);
  CMat T = cs.matrixT();
  CMat Q = cs.matrixU();
  // Finite poles map to the r largest |kappa|; move them to the top.
  for (Eigen::Index p = 0; p < r; ++p) {
    Eigen::Index best = p;
    for (Eigen::Index j = p + 1; j < N; ++j)
      if (std::abs(T(j, j)) > std::abs(T(best, best))) best = j;
    for (Eigen::Index k = best - 1; k >= p; --k) schur_swap(T, Q, k);
  }

  const CMat T11 = T.topLeftCorner(r, r);
  const CMat T12 = T.topRightCorner(r, s);
  const CMat T22 = T.bottomRightCorner(s, s);
  CMat X = CMat::Zero(r, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    CVec rhs = -T12.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs += X.col(i) * T22(i, j);
    CMat shifted = T11 - T22(j, j) * CMat::Identity(r, r);
    X.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  const CMat Q1 = Q.leftCols(r), Q2 = Q.rightCols(s);
  const CMat T1 = Q1.adjoint() - X * Q2.adjoint();
  const CMat T2 = Q2.adjoint();
  const CMat S2 = Q1 * X + Q2;
  const CMat T11inv = T11.triangularView<Eigen::Upper>().solve(CMat::Identity(r, r));

  out.A = z0 * CMat::Identity(r, r) - T11inv;
  out.B = T11inv * T1 * MG;
  out.C = Hsel * Q1;
  out.D = (Hsel * S2 * T2 * MG).real().cast<cplx>();
  return out;
}

/// Removes modes with |lambda| >= 1 whose input row or output column is at
/// roundoff level. A must be upper triangular: the last state then evolves on
/// its own and the first one feeds only the output, so either deletion is exact.
/// Left in place, such modes turn roundoff into growing garbage.
inline void drop_dead_modes(ComplexStateSpace& S, double tol) {
  const double bs = S.B.norm(), cs = S.C.norm();
  for (bool changed = true; changed;) {
    changed = false;
    const auto r = S.A.rows();
    for (Eigen::Index i = 0; i < r && !changed; ++i) {
      if (std::abs(S.A(i, i)) < 1.0) continue;
      CMat A = S.A, Q = CMat::Identity(r, r);
      for (Eigen::Index k = i; k + 1 < r; ++k) schur_swap(A, Q, k);
      CMat B = Q.adjoint() * S.B;
      if (B.row(r - 1).norm() <= tol * bs) {
        S.A = A.topLeftCorner(r - 1, r - 1);
        S.B = B.topRows(r - 1);
        S.C = (S.C * Q).leftCols(r - 1);
        changed = true;
        break;
      }
      A = S.A;
      Q.setIdentity();
      for (Eigen::Index k = i - 1; k >= 0; --k) schur_swap(A, Q, k);
      CMat C = S.C * Q;
      if (C.col(0).norm() <= tol * cs) {
        S.A = A.bottomRightCorner(r - 1, r - 1);
        S.B = (Q.adjoint() * S.B).bottomRows(r - 1);
        S.C = C.rightCols(r - 1);
        changed = true;
      }
    }
  }
}

}  // namespace detail

/// Inverse z-transform coefficients 0..T of a proper matrix fraction.
inline ImpulseSeq expand_impulse(const RationalMatrix& Rm, int T, const ToleranceConfig& tol = default_tolerances()) {
  if (classify_properness(Rm, tol) == Properness::Improper)
    throw Error(ErrorKind::ImproperInput, "cannot expand an improper rational matrix");
  auto S = detail::pencil_realization(Rm, tol);
  detail::drop_dead_modes(S, tol.deadMode);
  return markov(S, T);
}

/// Ho-Kalman realization of h_0..h_{2k+2}; Markov parameters are rescaled by
/// gamma^t so that growing sequences stay well conditioned.
inline StateSpace ho_kalman(const ImpulseSeq& h, int k, double gamma = 1.0, double rankTol = 1e-7) {
  const auto n = h.rows(), m = h.cols();
  if (static_cast<int>(h.size()) < 2 * k + 3)
    throw Error(ErrorKind::DimensionMismatch, "need Markov parameters up to 2k+2");
  Mat H((k + 1) * n, (k + 1) * m), Hs((k + 1) * n, (k + 1) * m);
  for (int i = 0; i <= k; ++i)
    for (int j = 0; j <= k; ++j) {
      H.block(i * n, j * m, n, m) = h[static_cast<std::size_t>(i + j + 1)] / std::pow(gamma, i + j + 1);
      Hs.block(i * n, j * m, n, m) = h[static_cast<std::size_t>(i + j + 2)] / std::pow(gamma, i + j + 2);
    }
  Eigen::JacobiSVD<Mat> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  Eigen::Index ord = 0;
  if (sv.size() && sv(0) > 0)
    while (ord < sv.size() && sv(ord) > rankTol * sv(0)) ++ord;
  if (ord == std::min(H.rows(), H.cols()) && ord > 0)
    throw Error(ErrorKind::HintTooSmall, "Hankel matrix has full rank; raise the order hint");

  StateSpace S;
  S.D = h[0];
  if (ord == 0) {
    S.A.resize(0, 0);
    S.B.resize(0, m);
    S.C.resize(n, 0);
    return S;
  }
  Vec root = sv.head(ord).cwiseSqrt();
  Vec iroot = root.cwiseInverse();
  Mat U = svd.matrixU().leftCols(ord), V = svd.matrixV().leftCols(ord);
  Mat Ap = iroot.asDiagonal() * (U.transpose() * Hs * V) * iroot.asDiagonal();
  Mat O = U * root.asDiagonal();
  Mat Ctl = root.asDiagonal() * V.transpose();
  S.A = gamma * Ap;
  S.B = gamma * Ctl.leftCols(m);
  S.C = O.topRows(n);
  return S;
}

/// n * deg D1 + m * deg D2, an upper bound on the McMillan degree.
inline int default_order_hint(const RationalMatrix& Rm) {
  return static_cast<int>(Rm.rows()) * Rm.leftDen.trim().degree() +
         static_cast<int>(Rm.cols()) * Rm.rightDen.trim().degree();
}

inline StateSpace minimal_realization(const RationalMatrix& Rm, int hint = -1,
                                      const ToleranceConfig& tol = default_tolerances()) {
  const int need = default_order_hint(Rm);
  if (hint < 0) hint = need;
  if (hint < need) throw Error(ErrorKind::HintTooSmall, "hint below n*deg(D1) + m*deg(D2)");
  if (classify_properness(Rm, tol) == Properness::Improper)
    throw Error(ErrorKind::ImproperInput, "cannot realize an improper rational matrix");
  const double gamma = std::max(1.0, max_modulus(denominator_poles(Rm, tol)));
  auto h = markov(detail::pencil_realization(Rm, tol), 2 * hint + 2);
  return ho_kalman(h, hint, gamma, tol.hankelRank);
}

}  // namespace rexp
