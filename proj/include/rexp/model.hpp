#pragma once

// Model records, structural builders and admissibility checks.

#include "rexp/polyalg.hpp"

#include <cstdint>
#include <map>
#include <utility>

namespace rexp {

/// x_t = A x_{t-1} + Ahat xhat_{1,t} + B u_t,  u_t = R u_{t-1} + w_t.
struct ModelCM {
  Mat A, Ahat, B, R;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }

  /// z^2 Ahat - z I + A
  MatrixPoly char_poly() const { return MatrixPoly(std::vector<Mat>{A, -Mat::Identity(n(), n()), Ahat}); }
};

struct InitCond {
  Vec x_prev, xhat_prev, u_prev;

  static InitCond zero(Eigen::Index n, Eigen::Index m) {
    return InitCond{Vec::Zero(n), Vec::Zero(n), Vec::Zero(m)};
  }
};

struct ShockSpec {
  Mat covariance;
  std::uint64_t seed = 0;
};

/// sum_{i,j} A_ij xhat_{i,t-j} = B u_t with xhat_{0,t} = x_t and A_00 = I.
struct GeneralModel {
  int h = 1;
  int l = 1;
  std::map<std::pair<int, int>, Mat> coeffs;
  Mat B, R;

  Eigen::Index n() const { return B.rows(); }
  Eigen::Index m() const { return B.cols(); }

  Mat coeff(int i, int j) const {
    auto it = coeffs.find({i, j});
    return it == coeffs.end() ? Mat::Zero(n(), n()) : it->second;
  }

  /// D[z] = sum z^{i+l-j} A_ij
  MatrixPoly denominator() const {
    std::vector<Mat> cs(static_cast<std::size_t>(h + l) + 1, Mat::Zero(n(), n()));
    for (const auto& [ij, a] : coeffs) cs[static_cast<std::size_t>(ij.first + l - ij.second)] += a;
    return MatrixPoly(std::move(cs)).trim();
  }
};

struct NKParams {
  double tau = 0.5;
  double beta = 0.99;
  double kappa = 0.5;
  double psi1 = 1.1;
  double psi2 = 0.25;
  double rho_r = 0.5;
  double rho_g = 0.7;
  double rho_z = 0.7;
  bool signFix = false;
};

/// Structural values recovered by inverting the 7-digit reference NK matrices.
/// They are a derived fixture, not numbers printed with the model.
inline NKParams nk_calibration() { return NKParams{}; }

// ---------------------------------------------------------------------------
// Checks

inline Eigen::Index numeric_rank(const Mat& M, double rel, double ref = -1.0) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  const Vec& s = svd.singularValues();
  double top = ref >= 0 ? ref : (s.size() ? s(0) : 0.0);
  if (top == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > rel * top) ++r;
  return r;
}

/// Orthonormal basis of the column span of M.
inline Mat image_basis(const Mat& M, double rel) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU);
  const Vec& s = svd.singularValues();
  Eigen::Index r = 0;
  if (s.size() && s(0) > 0)
    while (r < s.size() && s(r) > rel * s(0)) ++r;
  return svd.matrixU().leftCols(r);
}

/// Residual of projecting each column of V onto Im M, relative to 1 + |column|.
inline double image_residual(const Mat& M, const Mat& V, double rel) {
  Mat U = image_basis(M, rel);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    Vec v = V.col(j);
    Vec r = v - U * (U.transpose() * v);
    worst = std::max(worst, r.norm() / (1.0 + v.norm()));
  }
  return worst;
}

inline bool check_regular(const ModelCM& M, const ToleranceConfig& tol = default_tolerances()) {
  return is_regular(M.char_poly(), tol);
}

/// Shape and invariant checks; throws on the first violation.
inline void validate(const ModelCM& M, const ToleranceConfig& tol = default_tolerances()) {
  const auto n = M.A.rows();
  if (M.A.cols() != n || M.Ahat.rows() != n || M.Ahat.cols() != n || M.B.rows() != n || M.R.rows() != M.B.cols() ||
      M.R.cols() != M.B.cols())
    throw Error(ErrorKind::DimensionMismatch, "model matrices do not conform");
  if (M.Ahat.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorKind::InvariantError, "Ahat must be nonzero");
  if (!check_regular(M, tol)) throw Error(ErrorKind::NotRegular, "z^2 Ahat - z I + A is singular");
}

/// rank(Ahat) = rank(Ahat^2), cross-checked by sampling [z^2 Ahat - zI + A]^{-1}.
inline bool check_well_posed(const ModelCM& M, const ToleranceConfig& tol = default_tolerances()) {
  if (!check_regular(M, tol)) throw Error(ErrorKind::NotRegular, "model is not regular");
  Eigen::JacobiSVD<Mat> svd(M.Ahat);
  const double top = svd.singularValues()(0);
  const auto r1 = numeric_rank(M.Ahat, tol.rank, top);
  const auto r2 = numeric_rank(M.Ahat * M.Ahat, tol.rank, top * top);
  const bool byRank = r1 == r2;
  RationalMatrix inv(M.char_poly(), MatrixPoly::identity(M.n()));
  const bool bySampling = classify_properness(inv, tol) == Properness::StrictlyProper;
  if (byRank != bySampling)
    throw Error(ErrorKind::AmbiguousWellPosedness, "rank test and sampling test disagree");
  return byRank;
}

inline bool check_weak_consistency(const ModelCM& M, const InitCond& ic, const ToleranceConfig& tol = default_tolerances()) {
  Vec v = ic.xhat_prev - M.A * ic.x_prev - M.B * (M.R * ic.u_prev);
  Mat U = image_basis(M.Ahat, tol.rank);
  Vec r = v - U * (U.transpose() * v);
  return r.norm() <= tol.weakConsistency * (1.0 + v.norm());
}

// ---------------------------------------------------------------------------
// Builders

/// Structural form G0 x_t = G1 x_{t-1} + Ge xhat_{1,t} + Gu u_t of the NK model
/// with x = (y, pi, r) and u = (g, z, eps_r).
struct NKStructure {
  Mat G0, G1, Ge, Gu;
};

inline NKStructure nk_structure(const NKParams& p) {
  const double tau = p.signFix ? -p.tau : p.tau;
  const double kappa = p.signFix ? -p.kappa : p.kappa;
  const double w = 1.0 - p.rho_r;
  NKStructure s{Mat(3, 3), Mat::Zero(3, 3), Mat(3, 3), Mat(3, 3)};
  s.G0 << 1, 0, tau, -kappa, 1, 0, -w * p.psi2, -w * p.psi1, 1;
  s.G1(2, 2) = p.rho_r;
  s.Ge << 1, tau, 0, 0, p.beta, 0, 0, 0, 0;
  s.Gu << 1, 0, 0, 0, -kappa, 0, 0, -w * p.psi2, 1;
  return s;
}

inline ModelCM build_nk(const NKParams& p) {
  const NKStructure s = nk_structure(p);
  Eigen::FullPivLU<Mat> lu(s.G0);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12)
    throw Error(ErrorKind::SingularStructure, "structural matrix of y, pi, r is singular");
  ModelCM M;
  M.A = lu.solve(s.G1);
  M.Ahat = lu.solve(s.Ge);
  M.B = lu.solve(s.Gu);
  M.R = Mat::Zero(3, 3);
  M.R(0, 0) = p.rho_g;
  M.R(1, 1) = p.rho_z;
  return M;
}

/// Taylor's price equation p_t = -(phat_{1,t-1} - phat_{2,t-1} + u_t) / delta1.
inline GeneralModel build_taylor(double delta1) {
  if (delta1 == 0.0) throw Error(ErrorKind::ZeroDelta, "delta1 must be nonzero");
  GeneralModel g;
  g.h = 2;
  g.l = 1;
  const double k = 1.0 / delta1;
  g.coeffs[{0, 0}] = Mat::Identity(1, 1);
  g.coeffs[{1, 1}] = Mat::Constant(1, 1, k);
  g.coeffs[{2, 1}] = Mat::Constant(1, 1, -k);
  g.B = Mat::Constant(1, 1, -k);
  g.R = Mat::Zero(1, 1);
  return g;
}

/// The model as a general model with h = l = 1.
inline GeneralModel embed(const ModelCM& M) {
  GeneralModel g;
  g.h = 1;
  g.l = 1;
  g.coeffs[{0, 0}] = Mat::Identity(M.n(), M.n());
  g.coeffs[{0, 1}] = -M.A;
  g.coeffs[{1, 0}] = -M.Ahat;
  g.B = M.B;
  g.R = M.R;
  return g;
}

inline void validate(const GeneralModel& g, const ToleranceConfig& tol = default_tolerances()) {
  const auto n = g.n();
  if (g.h < 1 || g.l < 0) throw Error(ErrorKind::InvariantError, "need h >= 1 and l >= 0");
  if (g.R.rows() != g.m() || g.R.cols() != g.m()) throw Error(ErrorKind::DimensionMismatch, "R must be m x m");
  for (const auto& [ij, a] : g.coeffs) {
    if (ij.first < 0 || ij.first > g.h || ij.second < 0 || ij.second > g.l)
      throw Error(ErrorKind::InvariantError, "coefficient index outside 0..h, 0..l");
    if (a.rows() != n || a.cols() != n) throw Error(ErrorKind::DimensionMismatch, "coefficient must be n x n");
  }
  if (g.coeff(0, 0) != Mat::Identity(n, n)) throw Error(ErrorKind::InvariantError, "A_00 must equal I");
  if (!is_regular(g.denominator(), tol)) throw Error(ErrorKind::NotRegular, "D[z] is singular");
}

}  // namespace rexp
