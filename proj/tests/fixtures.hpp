#pragma once

// Shared fixtures and independent oracles for the test suites.

#include "rexp/model_file.hpp"
#include "rexp/selection.hpp"

#include <random>

namespace fx {

using namespace rexp;

inline Mat mat(Eigen::Index r, Eigen::Index c, std::initializer_list<double> v) {
  Mat M(r, c);
  auto it = v.begin();
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = *it++;
  return M;
}

/// The reference NK matrices at psi1 = 1.10 (third row of B uses the
/// structurally consistent sign, see README).
inline ModelCM nk() {
  ModelCM M;
  M.A = mat(3, 3, {0, 0, -0.2083333, 0, 0, -0.1041667, 0, 0, 0.4166667});
  M.Ahat = mat(3, 3, {0.8333333, 0.1897917, 0, 0.4166667, 1.0848958, 0, 0.3333333, 0.6204167, 0});
  M.B = mat(3, 3, {0.8333333, 0.1666667, -0.4166667, 0.4166667, -0.4166667, -0.2083333, 0.3333333, -0.3333333, 0.8333333});
  M.R = mat(3, 3, {0.7, 0, 0, 0, 0.7, 0, 0, 0, 0});
  return M;
}

inline const Mat kStableAF0 = mat(3, 3, {0.8665942, 0.3233551, -0.2015408, 1.4349934, -0.1388313, -0.2536809, 0.8975706,
                                         -0.0359379, -0.1647171});
inline const Mat kStableG0Top = mat(2, 3, {1.6999275, 0.4900217, -0.6182074, 1.85166, -0.5554980, -0.4620143});
inline const Mat kStableF0Top = mat(2, 3, {0.8094723, 0.4571583, -0.2066718, 1.0118144, -0.3035443, -0.1544551});
inline const Mat kMinusBpar = mat(3, 3, {-0.833, -0.155, 0.322, -0.417, 0.469, -0.209, -0.333, 0.239, -0.075});
inline const Mat kLsqFeedthrough = mat(3, 3, {0, 0.0118, -0.095, 0, 0.0522, -0.417, 0, -0.0948, 0.759});

/// Three-decimal state-space display of the least-squares G[z].
inline StateSpace lsq_display() {
  StateSpace S;
  S.A = mat(3, 3, {1.574, -0.937, 0.835, -0.094, 0.978, -0.287, -0.271, -0.109, 0.273});
  S.B = mat(3, 3, {-0.290, -1.161, 0.373, 1.011, 0, -0.310, 0, 0, 0.676});
  S.C = mat(3, 3, {0.275, -0.911, 0.128, -0.444, -0.127, -0.366, -0.169, -0.172, 0.358});
  S.D = kLsqFeedthrough;
  return S;
}

// ---------------------------------------------------------------------------
// Random instances

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uni(double a = -1, double b = 1) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
  Mat matrix(Eigen::Index r, Eigen::Index c, double s = 1.0) {
    Mat M(r, c);
    for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = s * uni();
    return M;
  }
  Mat orthogonal(Eigen::Index n) {
    Eigen::HouseholderQR<Mat> qr(matrix(n, n));
    return qr.householderQ() * Mat::Identity(n, n);
  }
  /// Random matrix with exactly the given singular values.
  Mat with_singular_values(const Vec& s) { return orthogonal(s.size()) * s.asDiagonal() * orthogonal(s.size()).transpose(); }
  Mat stable(Eigen::Index m, double radius = 0.8) {
    Mat Q = orthogonal(m);
    Vec d(m);
    for (Eigen::Index i = 0; i < m; ++i) d(i) = uni(-radius, radius);
    return Q * d.asDiagonal() * Q.transpose();
  }
};

/// Random model with rank(Ahat) = rank(Ahat^2) and a well-conditioned Ahat.
inline ModelCM random_well_posed(Rng& rng, Eigen::Index n, Eigen::Index m) {
  for (;;) {
    const int r = rng.integer(1, static_cast<int>(n));
    Mat S = rng.orthogonal(n) * (Mat::Identity(n, n) + rng.matrix(n, n, 0.2));
    Vec d = Vec::Zero(n);
    for (int i = 0; i < r; ++i) d(i) = (rng.uni() < 0 ? -1 : 1) * rng.uni(0.6, 1.4);
    ModelCM M;
    M.Ahat = S * d.asDiagonal() * S.inverse();
    M.A = rng.matrix(n, n, 0.5);
    M.B = rng.matrix(n, m);
    M.R = rng.stable(m);
    try {
      if (check_well_posed(M)) return M;
    } catch (const Error&) {
    }
  }
}

/// Random proper rational matrix D1^{-1} N D2^{-1}: monic-leading denominators,
/// numerator degree at most deg D1 + deg D2.
inline RationalMatrix random_proper(Rng& rng, Eigen::Index n, Eigen::Index m, int d1, int d2) {
  auto monic = [&](Eigen::Index k, int d) {
    std::vector<Mat> c;
    for (int i = 0; i < d; ++i) c.push_back(rng.matrix(k, k, 0.4));
    c.push_back(Mat::Identity(k, k));
    return MatrixPoly(std::move(c));
  };
  MatrixPoly D1 = monic(n, d1), D2 = monic(m, d2);
  std::vector<Mat> nc;
  for (int i = 0; i <= d1 + d2; ++i) nc.push_back(rng.matrix(n, m));
  return RationalMatrix(D1, MatrixPoly(std::move(nc)), D2);
}

// ---------------------------------------------------------------------------
// Oracles

/// Determinant polynomial by cofactor expansion with exact polynomial products.
inline std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> c(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline std::vector<double> poly_add(std::vector<double> a, const std::vector<double>& b, double s = 1.0) {
  if (a.size() < b.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
  return a;
}

inline std::vector<double> entry(const MatrixPoly& P, Eigen::Index r, Eigen::Index c) {
  std::vector<double> e;
  for (int k = 0; k <= P.degree(); ++k) e.push_back(P[k](r, c));
  return e;
}

inline std::vector<double> cofactor_det(const MatrixPoly& P, std::vector<Eigen::Index> rows, std::vector<Eigen::Index> cols) {
  if (rows.size() == 1) return entry(P, rows[0], cols[0]);
  std::vector<double> acc;
  std::vector<Eigen::Index> rest(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    std::vector<Eigen::Index> sub = cols;
    sub.erase(sub.begin() + static_cast<std::ptrdiff_t>(j));
    acc = poly_add(acc, poly_mul(entry(P, rows[0], cols[j]), cofactor_det(P, rest, sub)), j % 2 ? -1.0 : 1.0);
  }
  return acc;
}

inline std::vector<double> cofactor_det(const MatrixPoly& P) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < P.rows(); ++i) idx.push_back(i);
  return cofactor_det(P, idx, idx);
}

/// Adjugate of a polynomial matrix via signed cofactor determinants.
inline std::vector<std::vector<std::vector<double>>> adjugate(const MatrixPoly& P) {
  const auto n = P.rows();
  std::vector<std::vector<std::vector<double>>> adj(static_cast<std::size_t>(n), std::vector<std::vector<double>>(static_cast<std::size_t>(n)));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (n == 1) {
        adj[0][0] = {1.0};
        continue;
      }
      std::vector<Eigen::Index> rows, cols;
      for (Eigen::Index k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      auto c = cofactor_det(P, rows, cols);
      if ((i + j) % 2) for (auto& v : c) v = -v;
      adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = c;
    }
  return adj;
}

/// Laurent coefficients of p(z)/q(z) at infinity, h_0..h_T (requires deg p <= deg q).
inline std::vector<double> long_division(std::vector<double> p, const std::vector<double>& q, int T) {
  const int dq = static_cast<int>(q.size()) - 1;
  p.resize(q.size(), 0.0);
  // Work in w = 1/z: p(z)/q(z) = P(w)/Q(w) with reversed coefficient lists.
  std::vector<double> P(p.rbegin(), p.rend()), Q(q.rbegin(), q.rend());
  std::vector<double> h;
  for (int t = 0; t <= T; ++t) {
    double acc = t < static_cast<int>(P.size()) ? P[static_cast<std::size_t>(t)] : 0.0;
    for (int k = 1; k <= std::min(t, dq); ++k) acc -= Q[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(t - k)];
    h.push_back(acc / Q[0]);
  }
  return h;
}

/// Impulse response of D^{-1} N via adj(D) N / det(D) entrywise.
inline ImpulseSeq long_division_impulse(const MatrixPoly& D, const MatrixPoly& N, int T) {
  const auto det = cofactor_det(D);
  const auto adj = adjugate(D);
  const auto n = D.rows(), m = N.cols();
  std::vector<Mat> out(static_cast<std::size_t>(T) + 1, Mat::Zero(n, m));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      std::vector<double> num;
      for (Eigen::Index k = 0; k < n; ++k) num = poly_add(num, poly_mul(adj[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)], entry(N, k, j)));
      while (num.size() > det.size()) {
        if (std::abs(num.back()) > 1e-12) throw std::runtime_error("oracle input not proper");
        num.pop_back();
      }
      auto h = long_division(num, det, T);
      for (int t = 0; t <= T; ++t) out[static_cast<std::size_t>(t)](i, j) = h[static_cast<std::size_t>(t)];
    }
  return ImpulseSeq(std::move(out));
}

inline double seq_diff(const ImpulseSeq& a, const ImpulseSeq& b, int T) {
  double worst = 0.0;
  for (int t = 0; t <= T; ++t) worst = std::max(worst, (a[static_cast<std::size_t>(t)] - b[static_cast<std::size_t>(t)]).cwiseAbs().maxCoeff());
  return worst;
}

inline double seq_scale(const ImpulseSeq& a, int T) {
  double s = 0.0;
  for (int t = 0; t <= T; ++t) s = std::max(s, a[static_cast<std::size_t>(t)].cwiseAbs().maxCoeff());
  return s;
}

inline std::vector<Vec> random_shocks(Rng& rng, Eigen::Index m, int T) {
  std::vector<Vec> w;
  for (int t = 0; t <= T; ++t) w.push_back(rng.matrix(m, 1));
  return w;
}

inline bool contains(const std::vector<cplx>& zs, cplx z, double tol) {
  return std::any_of(zs.begin(), zs.end(), [&](cplx v) { return std::abs(v - z) <= tol; });
}

}  // namespace fx
