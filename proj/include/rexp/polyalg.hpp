#pragma once

// Matrix polynomials, matrix fractions and the numeric tests built on them.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rexp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using CRow = Eigen::RowVectorXcd;
using cplx = std::complex<double>;

enum class ErrorKind {
  NotRegular,
  FullRank,
  SamplePoleCollision,
  ImproperInput,
  HintTooSmall,
  DimensionMismatch,
  SingularStructure,
  ZeroDelta,
  AmbiguousWellPosedness,
  NotInImage,
  NoSolution,
  InconsistentInitialConditions,
  NotWellPosed,
  NotWeaklyConsistent,
  CovarianceNotPSD,
  EigenvalueOnR,
  DefectiveUnstable,
  SingularAhat,
  InvariantError,
  ParseError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::NotRegular: return "NotRegular";
    case ErrorKind::FullRank: return "FullRank";
    case ErrorKind::SamplePoleCollision: return "SamplePoleCollision";
    case ErrorKind::ImproperInput: return "ImproperInput";
    case ErrorKind::HintTooSmall: return "HintTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SingularStructure: return "SingularStructure";
    case ErrorKind::ZeroDelta: return "ZeroDelta";
    case ErrorKind::AmbiguousWellPosedness: return "AmbiguousWellPosedness";
    case ErrorKind::NotInImage: return "NotInImage";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::InconsistentInitialConditions: return "InconsistentInitialConditions";
    case ErrorKind::NotWellPosed: return "NotWellPosed";
    case ErrorKind::NotWeaklyConsistent: return "NotWeaklyConsistent";
    case ErrorKind::CovarianceNotPSD: return "CovarianceNotPSD";
    case ErrorKind::EigenvalueOnR: return "EigenvalueOnR";
    case ErrorKind::DefectiveUnstable: return "DefectiveUnstable";
    case ErrorKind::SingularAhat: return "SingularAhat";
    case ErrorKind::InvariantError: return "InvariantError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Every numeric threshold used by the library, in one place.
struct ToleranceConfig {
  double detFloor = 1e-11;       // det_poly snapping, relative to the Hadamard bound on the samples
  double rank = 1e-10;           // SVD rank decisions (images, projections)
  double nullvec = 1e-8;         // left_nullvector rank-deficiency test
  double hankelRank = 1e-7;      // Ho-Kalman order detection
  double growth = 0.5;           // properness: exponent at or above this is Improper
  double vanish = 1e-7;          // properness: entries below this times scale are zero
  double poleClearance = 1e-6;   // properness: minimum sample distance to a pole
  double unitCircle = 1e-8;      // |z| > 1 + unitCircle is unstable
  double boundary = 1e-6;        // |z| within this of 1 is a boundary case
  double existence = 1e-7;       // cancellation-system residual
  double consistency = 1e-8;     // zero-input term 0 vs xhat_prev
  double weakConsistency = 1e-9; // image residual for initial conditions
  double deadMode = 1e-11;       // expand_impulse: non-decaying modes driven or seen below this are dropped
};

inline const ToleranceConfig& default_tolerances() {
  static const ToleranceConfig t{};
  return t;
}

// ---------------------------------------------------------------------------
// MatrixPoly

/// Sum of z^k * coeffs[k], real n x m coefficients in ascending order.
class MatrixPoly {
 public:
  MatrixPoly() = default;
  MatrixPoly(Eigen::Index rows, Eigen::Index cols) : rows_(rows), cols_(cols) {
    coeffs_.push_back(Mat::Zero(rows, cols));
  }
  explicit MatrixPoly(std::vector<Mat> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw Error(ErrorKind::DimensionMismatch, "MatrixPoly needs at least one coefficient");
    rows_ = coeffs_[0].rows();
    cols_ = coeffs_[0].cols();
    for (const auto& c : coeffs_)
      if (c.rows() != rows_ || c.cols() != cols_)
        throw Error(ErrorKind::DimensionMismatch, "MatrixPoly coefficients differ in shape");
  }

  static MatrixPoly constant(const Mat& c) { return MatrixPoly(std::vector<Mat>{c}); }
  static MatrixPoly identity(Eigen::Index n) { return constant(Mat::Identity(n, n)); }
  /// z*I - M
  static MatrixPoly shift_minus(const Mat& M) {
    return MatrixPoly(std::vector<Mat>{-M, Mat::Identity(M.rows(), M.cols())});
  }
  /// c * z^k
  static MatrixPoly monomial(const Mat& c, int k) {
    std::vector<Mat> cs(static_cast<std::size_t>(k) + 1, Mat::Zero(c.rows(), c.cols()));
    cs.back() = c;
    return MatrixPoly(std::move(cs));
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<Mat>& coeffs() const { return coeffs_; }
  const Mat& operator[](int k) const { return coeffs_[static_cast<std::size_t>(k)]; }
  Mat coeff(int k) const {
    if (k < 0 || k > degree()) return Mat::Zero(rows_, cols_);
    return coeffs_[static_cast<std::size_t>(k)];
  }
  bool square() const { return rows_ == cols_; }

  CMat operator()(cplx z) const {
    // Horner
    CMat acc = coeffs_.back().cast<cplx>();
    for (int k = degree() - 1; k >= 0; --k) acc = (acc * z + coeffs_[static_cast<std::size_t>(k)].cast<cplx>()).eval();
    return acc;
  }

  /// Drops trailing coefficients whose largest entry is at most tol.
  MatrixPoly trim(double tol = 0.0) const {
    std::vector<Mat> cs = coeffs_;
    while (cs.size() > 1 && (cs.back().size() == 0 || cs.back().cwiseAbs().maxCoeff() <= tol)) cs.pop_back();
    return MatrixPoly(std::move(cs));
  }

  double max_abs() const {
    double m = 0;
    for (const auto& c : coeffs_)
      if (c.size()) m = std::max(m, c.cwiseAbs().maxCoeff());
    return m;
  }

  MatrixPoly transpose() const {
    std::vector<Mat> cs;
    for (const auto& c : coeffs_) cs.push_back(c.transpose());
    return MatrixPoly(std::move(cs));
  }

  MatrixPoly block_rows(Eigen::Index r0, Eigen::Index nr) const {
    std::vector<Mat> cs;
    for (const auto& c : coeffs_) cs.push_back(c.middleRows(r0, nr));
    return MatrixPoly(std::move(cs));
  }

  friend MatrixPoly operator+(const MatrixPoly& a, const MatrixPoly& b) {
    check_same(a, b);
    int d = std::max(a.degree(), b.degree());
    std::vector<Mat> cs;
    for (int k = 0; k <= d; ++k) cs.push_back(a.coeff(k) + b.coeff(k));
    return MatrixPoly(std::move(cs));
  }
  friend MatrixPoly operator-(const MatrixPoly& a) {
    std::vector<Mat> cs;
    for (const auto& c : a.coeffs_) cs.push_back(-c);
    return MatrixPoly(std::move(cs));
  }
  friend MatrixPoly operator-(const MatrixPoly& a, const MatrixPoly& b) { return a + (-b); }
  friend MatrixPoly operator*(const MatrixPoly& a, const MatrixPoly& b) {
    if (a.cols() != b.rows()) throw Error(ErrorKind::DimensionMismatch, "MatrixPoly product shapes");
    std::vector<Mat> cs(static_cast<std::size_t>(a.degree() + b.degree()) + 1, Mat::Zero(a.rows(), b.cols()));
    for (int i = 0; i <= a.degree(); ++i)
      for (int j = 0; j <= b.degree(); ++j) cs[static_cast<std::size_t>(i + j)] += a[i] * b[j];
    return MatrixPoly(std::move(cs));
  }
  friend MatrixPoly operator*(const Mat& m, const MatrixPoly& p) { return constant(m) * p; }
  friend MatrixPoly operator*(const MatrixPoly& p, const Mat& m) { return p * constant(m); }
  friend MatrixPoly operator*(double s, const MatrixPoly& p) {
    std::vector<Mat> cs;
    for (const auto& c : p.coeffs_) cs.push_back(s * c);
    return MatrixPoly(std::move(cs));
  }

  /// Multiplies by z^k.
  MatrixPoly shifted(int k) const {
    std::vector<Mat> cs(static_cast<std::size_t>(k), Mat::Zero(rows_, cols_));
    cs.insert(cs.end(), coeffs_.begin(), coeffs_.end());
    return MatrixPoly(std::move(cs));
  }

 private:
  static void check_same(const MatrixPoly& a, const MatrixPoly& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw Error(ErrorKind::DimensionMismatch, "MatrixPoly sum shapes");
  }

  std::vector<Mat> coeffs_;
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
};

/// Stacks square-compatible blocks [[a, b], [c, d]].
inline MatrixPoly block2x2(const MatrixPoly& a, const MatrixPoly& b, const MatrixPoly& c, const MatrixPoly& d) {
  int deg = std::max({a.degree(), b.degree(), c.degree(), d.degree()});
  std::vector<Mat> cs;
  for (int k = 0; k <= deg; ++k) {
    Mat m(a.rows() + c.rows(), a.cols() + b.cols());
    m << a.coeff(k), b.coeff(k), c.coeff(k), d.coeff(k);
    cs.push_back(m);
  }
  return MatrixPoly(std::move(cs));
}

inline MatrixPoly vstack(const MatrixPoly& top, const MatrixPoly& bottom) {
  int deg = std::max(top.degree(), bottom.degree());
  std::vector<Mat> cs;
  for (int k = 0; k <= deg; ++k) {
    Mat m(top.rows() + bottom.rows(), top.cols());
    m << top.coeff(k), bottom.coeff(k);
    cs.push_back(m);
  }
  return MatrixPoly(std::move(cs));
}

// ---------------------------------------------------------------------------
// RationalMatrix: leftDen^{-1} * num * rightDen^{-1}

struct RationalMatrix {
  MatrixPoly leftDen;
  MatrixPoly num;
  MatrixPoly rightDen;

  RationalMatrix() = default;
  RationalMatrix(MatrixPoly d1, MatrixPoly n) : RationalMatrix(d1, n, MatrixPoly::identity(n.cols())) {}
  RationalMatrix(MatrixPoly d1, MatrixPoly n, MatrixPoly d2)
      : leftDen(std::move(d1)), num(std::move(n)), rightDen(std::move(d2)) {
    if (!leftDen.square() || !rightDen.square() || leftDen.rows() != num.rows() || rightDen.rows() != num.cols())
      throw Error(ErrorKind::DimensionMismatch, "RationalMatrix factors do not compose");
  }

  Eigen::Index rows() const { return num.rows(); }
  Eigen::Index cols() const { return num.cols(); }

  CMat operator()(cplx z) const {
    CMat left = Eigen::PartialPivLU<CMat>(leftDen(z)).solve(num(z));
    if (rightDen.degree() == 0 && rightDen[0].isIdentity(0.0)) return left;
    // X * D2 = left  <=>  D2^T X^T = left^T
    CMat d2t = rightDen(z).transpose();
    return Eigen::PartialPivLU<CMat>(d2t).solve(left.transpose()).transpose();
  }
};

// ---------------------------------------------------------------------------
// Impulse sequences and eigen sets

struct ImpulseSeq {
  std::vector<Mat> terms;

  ImpulseSeq() = default;
  explicit ImpulseSeq(std::vector<Mat> t) : terms(std::move(t)) {}

  std::size_t size() const { return terms.size(); }
  int horizon() const { return static_cast<int>(terms.size()) - 1; }
  Eigen::Index rows() const { return terms.empty() ? 0 : terms[0].rows(); }
  Eigen::Index cols() const { return terms.empty() ? 0 : terms[0].cols(); }
  const Mat& operator[](std::size_t t) const { return terms[t]; }
  Mat& operator[](std::size_t t) { return terms[t]; }
  /// Zero outside the stored range.
  Mat at(int t) const {
    if (t < 0 || t > horizon()) return Mat::Zero(rows(), cols());
    return terms[static_cast<std::size_t>(t)];
  }
};

/// Discrete convolution (a * b)_t = sum_k a_k b_{t-k}, truncated to the shorter horizon.
inline ImpulseSeq convolve(const ImpulseSeq& a, const ImpulseSeq& b) {
  int T = std::min(a.horizon(), b.horizon());
  std::vector<Mat> out;
  for (int t = 0; t <= T; ++t) {
    Mat s = Mat::Zero(a.rows(), b.cols());
    for (int k = 0; k <= t; ++k) s += a.at(k) * b.at(t - k);
    out.push_back(s);
  }
  return ImpulseSeq(std::move(out));
}

inline ImpulseSeq powers(const Mat& R, int T) {
  std::vector<Mat> out;
  Mat p = Mat::Identity(R.rows(), R.cols());
  for (int t = 0; t <= T; ++t) {
    out.push_back(p);
    p = (R * p).eval();
  }
  return ImpulseSeq(std::move(out));
}

struct EigenSet {
  std::vector<cplx> finite;  // descending modulus
  int infiniteCount = 0;
  std::vector<CRow> leftVectors;
};

// ---------------------------------------------------------------------------
// Determinant polynomial

namespace detail {

/// Radius at which the polynomial's coefficient blocks are balanced.
inline double balancing_radius(const MatrixPoly& P) {
  int d = P.degree();
  double lead = P[d].norm();
  double rho = 1.0;
  if (lead == 0.0 || d == 0) return rho;
  double best = 0.0;
  for (int k = 0; k < d; ++k) {
    double nk = P[k].norm();
    if (nk > 0) best = std::max(best, std::pow(nk / lead, 1.0 / (d - k)));
  }
  if (best > 0) rho = best;
  return std::clamp(rho, 1e-8, 1e12);
}

inline cplx lu_det(const CMat& M) {
  if (M.rows() == 0) return 1.0;
  return Eigen::PartialPivLU<CMat>(M).determinant();
}

struct ScaledDet {
  std::vector<double> scaled;  // coefficients of det P(rho*s) in s
  double rho = 1.0;
  int degree = -1;             // -1 for the zero polynomial
};

inline ScaledDet det_scaled(const MatrixPoly& P0, const ToleranceConfig& tol) {
  if (!P0.square()) throw Error(ErrorKind::DimensionMismatch, "det_poly needs a square polynomial");
  MatrixPoly P = P0.trim();
  ScaledDet out;
  const auto n = P.rows();
  if (n == 0) {
    out.scaled = {1.0};
    out.degree = 0;
    return out;
  }
  out.rho = balancing_radius(P);
  const int N = static_cast<int>(n) * P.degree() + 1;
  std::vector<cplx> vals(static_cast<std::size_t>(N));
  // Product of row norms bounds |det| at every sample; roundoff in the
  // samples is proportional to it, so cancellation to zero is judged against it.
  double big = 0.0;
  for (int k = 0; k < N; ++k) {
    cplx s = std::polar(1.0, 2.0 * std::numbers::pi * k / N);
    const CMat Pk = P(out.rho * s);
    vals[static_cast<std::size_t>(k)] = lu_det(Pk);
    big = std::max(big, Pk.rowwise().norm().prod());
  }
  out.scaled.assign(static_cast<std::size_t>(N), 0.0);
  for (int j = 0; j < N; ++j) {
    cplx acc = 0.0;
    for (int k = 0; k < N; ++k) acc += vals[static_cast<std::size_t>(k)] * std::polar(1.0, -2.0 * std::numbers::pi * double(k) * j / N);
    out.scaled[static_cast<std::size_t>(j)] = acc.real() / N;
  }
  for (auto& c : out.scaled)
    if (std::abs(c) <= tol.detFloor * big) c = 0.0;
  for (int j = N - 1; j >= 0; --j)
    if (out.scaled[static_cast<std::size_t>(j)] != 0.0) {
      out.degree = j;
      break;
    }
  return out;
}

}  // namespace detail

/// Coefficients of det P(z), ascending, trailing zeros removed; empty for the zero polynomial.
inline std::vector<double> det_poly(const MatrixPoly& P, const ToleranceConfig& tol = default_tolerances()) {
  auto sd = detail::det_scaled(P, tol);
  std::vector<double> c;
  for (int j = 0; j <= sd.degree; ++j) c.push_back(sd.scaled[static_cast<std::size_t>(j)] / std::pow(sd.rho, j));
  return c;
}

inline bool is_regular(const MatrixPoly& P, const ToleranceConfig& tol = default_tolerances()) {
  return detail::det_scaled(P, tol).degree >= 0;
}

// ---------------------------------------------------------------------------
// Eigenvalues

namespace detail {

/// First companion pencil z*E - F of a square polynomial of degree d >= 1.
inline void companion(const MatrixPoly& P, Mat& E, Mat& F) {
  const auto n = P.rows();
  const int d = P.degree();
  const auto N = n * d;
  E = Mat::Identity(N, N);
  F = Mat::Zero(N, N);
  E.bottomRightCorner(n, n) = P[d];
  for (int k = 0; k + 1 < d; ++k) F.block(k * n, (k + 1) * n, n, n).setIdentity();
  for (int k = 0; k < d; ++k) F.block((d - 1) * n, k * n, n, n) = -P[k];
}

}  // namespace detail

inline EigenSet polyeig(const MatrixPoly& P0, const ToleranceConfig& tol = default_tolerances()) {
  MatrixPoly P = P0.trim();
  auto sd = detail::det_scaled(P, tol);
  if (sd.degree < 0) throw Error(ErrorKind::NotRegular, "determinant vanishes identically");
  EigenSet out;
  const int d = P.degree();
  const int total = static_cast<int>(P.rows()) * d;
  out.infiniteCount = total - sd.degree;
  if (sd.degree == 0) return out;

  // Work in s = z / rho with unit-sized coefficients.
  std::vector<Mat> cs;
  double mx = 0;
  for (int k = 0; k <= d; ++k) {
    cs.push_back(P[k] * std::pow(sd.rho, k));
    mx = std::max(mx, cs.back().cwiseAbs().maxCoeff());
  }
  for (auto& c : cs) c /= mx;
  Mat E, F;
  detail::companion(MatrixPoly(cs), E, F);
  Eigen::GeneralizedEigenSolver<Mat> ges(F, E, false);
  const CVec alpha = ges.alphas();
  const Vec beta = ges.betas();

  std::vector<int> idx(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) idx[static_cast<std::size_t>(i)] = i;
  auto finiteness = [&](int i) {
    double a = std::abs(alpha(i)), b = std::abs(beta(i));
    return b / std::hypot(a, b);
  };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return finiteness(a) > finiteness(b); });
  for (int k = 0; k < sd.degree; ++k) {
    int i = idx[static_cast<std::size_t>(k)];
    out.finite.push_back(sd.rho * alpha(i) / beta(i));
  }
  std::sort(out.finite.begin(), out.finite.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  return out;
}

/// Unit-norm c with c*M ~ 0, first nonzero entry made positive real.
/// The smallest singular value is compared with `scale` when given, else with the largest.
inline CRow left_nullvector(const CMat& M, const ToleranceConfig& tol = default_tolerances(), double scale = -1.0) {
  Eigen::JacobiSVD<CMat> svd(M, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const auto k = s.size() - 1;
  if (s(k) > tol.nullvec * (scale >= 0 ? scale : s(0))) throw Error(ErrorKind::FullRank, "matrix is numerically nonsingular");
  CRow c = svd.matrixU().col(M.rows() - 1).adjoint();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (std::abs(c(i)) > 1e-12) {
      c *= std::conj(c(i)) / std::abs(c(i));
      c(i) = std::abs(c(i));
      break;
    }
  }
  return c / c.norm();
}

// ---------------------------------------------------------------------------
// Properness

enum class Properness { Improper, Proper, StrictlyProper };

inline const char* to_string(Properness p) {
  switch (p) {
    case Properness::Improper: return "Improper";
    case Properness::Proper: return "Proper";
    case Properness::StrictlyProper: return "StrictlyProper";
  }
  return "?";
}

struct ProperReport {
  Properness cls = Properness::Proper;
  double maxExponent = 0.0;  // largest fitted growth exponent over non-negligible entries
};

/// Samples a rational function on two large circles and fits growth exponents entrywise.
/// `sigma` is the largest pole modulus, `poles` the finite poles to keep clear of.
inline ProperReport classify_sampled(const std::function<CMat(cplx)>& eval, double sigma, const std::vector<cplx>& poles,
                                     const ToleranceConfig& tol = default_tolerances()) {
  const double r1 = 1e3 * (1.0 + sigma), r2 = 10.0 * r1;
  constexpr int kAngles = 8;
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const double phase = 0.3 + 0.17 * attempt;
    std::vector<cplx> pts;
    bool clash = false;
    for (double r : {r1, r2})
      for (int k = 0; k < kAngles; ++k) {
        cplx z = std::polar(r, phase + 2.0 * std::numbers::pi * k / kAngles);
        for (auto p : poles)
          if (std::abs(z - p) < tol.poleClearance) clash = true;
        pts.push_back(z);
      }
    if (clash) continue;

    Mat m1, m2;
    for (int k = 0; k < 2 * kAngles; ++k) {
      Mat a = eval(pts[static_cast<std::size_t>(k)]).cwiseAbs();
      Mat& tgt = k < kAngles ? m1 : m2;
      if (tgt.size() == 0) tgt = a;
      else tgt = tgt.cwiseMax(a);
    }
    ProperReport rep;
    rep.cls = Properness::StrictlyProper;
    if (m1.size() == 0) return rep;
    const double scale = std::max(m1.maxCoeff(), m2.maxCoeff());
    rep.maxExponent = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < m1.rows(); ++i)
      for (Eigen::Index j = 0; j < m1.cols(); ++j) {
        double a = m1(i, j), b = m2(i, j);
        if (std::max(a, b) <= tol.vanish * scale) continue;
        double e = std::log10(std::max(b, 1e-300) / std::max(a, 1e-300));
        rep.maxExponent = std::max(rep.maxExponent, e);
        if (e >= tol.growth) rep.cls = Properness::Improper;
        else if (e > -tol.growth && rep.cls != Properness::Improper) rep.cls = Properness::Proper;
      }
    return rep;
  }
  throw Error(ErrorKind::SamplePoleCollision, "sample points keep landing on poles");
}

inline double max_modulus(const std::vector<cplx>& v) {
  double m = 0;
  for (auto x : v) m = std::max(m, std::abs(x));
  return m;
}

/// Finite poles of both denominators.
inline std::vector<cplx> denominator_poles(const RationalMatrix& Rm, const ToleranceConfig& tol = default_tolerances()) {
  std::vector<cplx> poles;
  for (const auto* D : {&Rm.leftDen, &Rm.rightDen}) {
    auto t = D->trim();
    if (t.degree() == 0) {
      if (!is_regular(t, tol)) throw Error(ErrorKind::NotRegular, "singular constant denominator");
      continue;
    }
    auto e = polyeig(t, tol);
    poles.insert(poles.end(), e.finite.begin(), e.finite.end());
  }
  return poles;
}

inline ProperReport properness_report(const RationalMatrix& Rm, const ToleranceConfig& tol = default_tolerances()) {
  auto poles = denominator_poles(Rm, tol);
  return classify_sampled([&](cplx z) { return Rm(z); }, max_modulus(poles), poles, tol);
}

inline Properness classify_properness(const RationalMatrix& Rm, const ToleranceConfig& tol = default_tolerances()) {
  return properness_report(Rm, tol).cls;
}

}  // namespace rexp
