#pragma once

// Choosing Ahat F0: stability by pole-zero cancellation, least-square forecast
// errors, and the forecast-gain eigenvalue analysis.

#include "rexp/solver.hpp"

#include <optional>

namespace rexp {

enum class Determinacy { Determinate, Indeterminate, NoStableSolution, Boundary };

inline const char* to_string(Determinacy d) {
  switch (d) {
    case Determinacy::Determinate: return "Determinate";
    case Determinacy::Indeterminate: return "Indeterminate";
    case Determinacy::NoStableSolution: return "NoStableSolution";
    case Determinacy::Boundary: return "Boundary";
  }
  return "?";
}

struct DeterminacyReport {
  Determinacy classification = Determinacy::Indeterminate;
  std::optional<Mat> AF0;
  std::vector<cplx> unstableEigs;
  std::vector<CRow> leftVecs;
  double residual = 0.0;
  Eigen::Index constraintRank = 0;
  Eigen::Index realizedOrder = -1;   // set on Determinate
  double realizedRadius = 0.0;       // spectral radius of the realized G[z]
};

inline bool is_unstable(cplx z, const ToleranceConfig& tol) { return std::abs(z) > 1.0 + tol.unitCircle; }

/// Dimension of the numerical null space of M (singular values below rel * largest).
inline Eigen::Index null_dim(const CMat& M, double rel) {
  Eigen::JacobiSVD<CMat> svd(M);
  const Vec& s = svd.singularValues();
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= rel * s(0)) ++k;
  return k;
}

inline DeterminacyReport select_stability(const ModelCM& M, const ToleranceConfig& tol = default_tolerances()) {
  if (!check_regular(M, tol)) throw Error(ErrorKind::NotRegular, "model is not regular");
  const auto n = M.n(), m = M.m();
  const MatrixPoly P = M.char_poly();
  const auto eig = polyeig(P, tol);
  DeterminacyReport rep;

  for (auto z : eig.finite)
    if (is_unstable(z, tol)) rep.unstableEigs.push_back(z);
  for (auto z : eig.finite)
    if (std::abs(std::abs(z) - 1.0) <= tol.boundary) {
      rep.classification = Determinacy::Boundary;
      return rep;
    }

  Eigen::ComplexEigenSolver<CMat> resolveR(M.R.cast<cplx>(), false);
  // c Ahat X = c B (lambda I - R)^{-1} - c Ahat B, one per left null vector
  struct Constraint {
    CRow lhs, rhs;
    bool complexPair;
  };
  std::vector<Constraint> cons;
  const auto& U = rep.unstableEigs;
  std::vector<bool> used(U.size(), false);
  for (std::size_t i = 0; i < U.size(); ++i) {
    if (used[i]) continue;
    const cplx lam = U[i];
    std::size_t mult = 0;
    for (std::size_t j = i; j < U.size(); ++j)
      if (!used[j] && std::abs(U[j] - lam) <= 1e-6 * (1.0 + std::abs(lam))) {
        used[j] = true;
        ++mult;
      }
    for (Eigen::Index k = 0; k < resolveR.eigenvalues().size(); ++k)
      if (std::abs(resolveR.eigenvalues()(k) - lam) <= 1e-8 * (1.0 + std::abs(lam)))
        throw Error(ErrorKind::EigenvalueOnR, "unstable eigenvalue coincides with an eigenvalue of R");
    const CMat Pl = P(lam);
    if (mult > 1 && null_dim(Pl, 1e-6) < static_cast<Eigen::Index>(mult))
      throw Error(ErrorKind::DefectiveUnstable, "repeated unstable eigenvalue without a full eigenspace");
    // Conjugates give the same real constraints.
    if (lam.imag() < 0 && std::any_of(U.begin(), U.end(), [&](cplx o) {
          return o.imag() > 0 && std::abs(o - std::conj(lam)) <= 1e-6 * (1.0 + std::abs(lam));
        }))
      continue;
    Eigen::JacobiSVD<CMat> svd(Pl, Eigen::ComputeFullU);
    double pscale = 0.0;
    for (int k = 0; k <= P.degree(); ++k) pscale += P[k].norm() * std::pow(std::abs(lam), k);
    const CMat resolvent = (lam * CMat::Identity(m, m) - M.R.cast<cplx>()).inverse();
    for (std::size_t k = 0; k < mult; ++k) {
      CRow c = mult == 1 ? left_nullvector(Pl, tol, pscale) : CRow(svd.matrixU().col(n - 1 - static_cast<Eigen::Index>(k)).adjoint());
      rep.leftVecs.push_back(c);
      cons.push_back({c * M.Ahat.cast<cplx>(),
                      c * M.B.cast<cplx>() * resolvent - c * M.Ahat.cast<cplx>() * M.B.cast<cplx>(),
                      std::abs(lam.imag()) > 1e-12 * std::abs(lam)});
    }
  }

  // Real system K Y = H with X = Ub Y, Ub an orthonormal basis of Im Ahat.
  const Mat Ub = image_basis(M.Ahat, tol.rank);
  const auto r = Ub.cols();
  std::vector<Eigen::RowVectorXd> Krows, Hrows;
  for (const auto& c : cons) {
    const CRow k = c.lhs * Ub.cast<cplx>();
    Krows.push_back(k.real());
    Hrows.push_back(c.rhs.real());
    if (c.complexPair) {
      Krows.push_back(k.imag());
      Hrows.push_back(c.rhs.imag());
    }
  }
  Mat K(static_cast<Eigen::Index>(Krows.size()), r), H(static_cast<Eigen::Index>(Hrows.size()), m);
  for (std::size_t i = 0; i < Krows.size(); ++i) {
    K.row(static_cast<Eigen::Index>(i)) = Krows[i];
    H.row(static_cast<Eigen::Index>(i)) = Hrows[i];
  }

  if (K.rows() == 0) {
    rep.classification = Determinacy::Indeterminate;
    return rep;
  }
  Eigen::JacobiSVD<Mat> ksvd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ksvd.setThreshold(1e-10);
  const Mat Y = ksvd.solve(H);
  rep.constraintRank = ksvd.rank();
  const double scale = 1.0 + H.norm() + K.norm();
  rep.residual = (K * Y - H).norm();
  if (rep.residual > tol.existence * scale) {
    rep.classification = Determinacy::NoStableSolution;
    return rep;
  }
  if (rep.constraintRank < r) {
    rep.classification = Determinacy::Indeterminate;
    return rep;
  }
  rep.AF0 = Ub * Y;
  rep.classification = Determinacy::Determinate;
  auto [Fz, Gz] = kernel_fractions(M, *rep.AF0);
  const StateSpace S = minimal_realization(Gz, -1, tol);
  rep.realizedOrder = S.order();
  rep.realizedRadius = spectral_radius(S.A);
  if (rep.realizedRadius >= 1.0) {
    rep.classification = Determinacy::NoStableSolution;
    rep.AF0.reset();
  }
  return rep;
}

/// Ahat F0 = -B_par, the projection of -B onto Im Ahat.
inline Mat select_least_squares(const ModelCM& M, const ToleranceConfig& tol = default_tolerances()) {
  const Mat U = image_basis(M.Ahat, tol.rank);
  return -U * (U.transpose() * M.B);
}

// ---------------------------------------------------------------------------
// Gain sweep

struct GainSweepResult {
  std::vector<double> epsilons;
  std::vector<std::vector<cplx>> loci;  // loci[k][j]: j-th tracked eigenvalue at epsilons[k]
  std::vector<int> infiniteCounts;
  std::vector<bool> regular;
};

inline MatrixPoly gain_poly(const ModelCM& M, double eps) {
  const auto n = M.n();
  if (eps == 0.0) return MatrixPoly(std::vector<Mat>{M.A, -Mat::Identity(n, n)});
  return MatrixPoly(std::vector<Mat>{M.A, -Mat::Identity(n, n), eps * M.Ahat});
}

/// Reorders `next` to follow `prev` by greedy nearest-neighbour pairing;
/// unmatched eigenvalues are appended.
inline std::vector<cplx> match_loci(const std::vector<cplx>& prev, std::vector<cplx> next) {
  std::vector<cplx> out;
  std::vector<bool> taken(next.size(), false);
  for (auto p : prev) {
    std::size_t best = next.size();
    for (std::size_t j = 0; j < next.size(); ++j)
      if (!taken[j] && (best == next.size() || std::abs(next[j] - p) < std::abs(next[best] - p))) best = j;
    if (best == next.size()) break;
    taken[best] = true;
    out.push_back(next[best]);
  }
  for (std::size_t j = 0; j < next.size(); ++j)
    if (!taken[j]) out.push_back(next[j]);
  return out;
}

inline GainSweepResult gain_sweep(const ModelCM& M, const std::vector<double>& grid, unsigned threads = 1,
                                  const ToleranceConfig& tol = default_tolerances()) {
  const std::size_t K = grid.size();
  GainSweepResult res;
  res.epsilons = grid;
  res.loci.assign(K, {});
  res.infiniteCounts.assign(K, 0);
  std::vector<char> ok(K, 0);
  auto work = [&](std::size_t k0) {
    for (std::size_t k = k0; k < K; k += std::max(1u, threads)) {
      try {
        auto e = polyeig(gain_poly(M, grid[k]), tol);
        res.loci[k] = e.finite;
        res.infiniteCounts[k] = e.infiniteCount;
        ok[k] = 1;
      } catch (const Error&) {
        ok[k] = 0;
      }
    }
  };
  if (threads <= 1) work(0);
  else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  res.regular.assign(ok.begin(), ok.end());
  for (std::size_t k = 1; k < K; ++k)
    if (res.regular[k] && res.regular[k - 1]) res.loci[k] = match_loci(res.loci[k - 1], res.loci[k]);
  return res;
}

/// Modulus bound for every eigenvalue of z^2 Ahat - zI + A when Ahat is invertible.
inline double eig_bound_large_gain(const ModelCM& M) {
  Eigen::JacobiSVD<Mat> svd(M.Ahat);
  const Vec& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-12 * s(0)) throw Error(ErrorKind::SingularAhat, "Ahat is singular");
  const double mu = s(s.size() - 1);  // 1 / |Ahat^{-1}|
  const double a = Eigen::JacobiSVD<Mat>(M.A).singularValues()(0);
  return (1.0 + std::sqrt(1.0 + 4.0 * mu * a)) / (2.0 * mu);
}

}  // namespace rexp
