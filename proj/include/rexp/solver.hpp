#pragma once

// Model-consistent solutions: zero-state and zero-input responses, the total
// solution, the feedback predictor, Monte Carlo paths and the general solver.

#include "rexp/model.hpp"
#include "rexp/realize.hpp"

#include <random>
#include <thread>

namespace rexp {

struct Solution {
  Mat AF0;
  RationalMatrix Fz, Gz;
  ImpulseSeq Ft, Gt;       // u-driven kernels, t = 0..T
  std::vector<Vec> xbar;   // t = 0..T+1
  Mat errorCoeff;          // Ahat F0 + B = G_0
};

struct ZeroState {
  RationalMatrix Fz, Gz;
  ImpulseSeq Ft, Gt;
};

struct ZeroInput {
  RationalMatrix Xbarz;  // rows 0..n-1 are Xbar[z]; the trailing m rows carry the input
  std::vector<Vec> xbar;
  bool consistent = false;
};

/// F[z] and G[z] for a given Ahat F0, as left fractions over z^2 Ahat - zI + A.
inline std::pair<RationalMatrix, RationalMatrix> kernel_fractions(const ModelCM& M, const Mat& AF0) {
  const Mat E = AF0 + M.B;
  const Mat& A = M.A;
  const Mat& Ah = M.Ahat;
  const Mat& R = M.R;
  // (zI - A) E (zI - R) - z^2 B
  MatrixPoly fnum(std::vector<Mat>{A * E * R, -(A * E + E * R), AF0});
  // z^2 Ahat E - z (Ahat E R + B)
  MatrixPoly gnum(std::vector<Mat>{Mat::Zero(M.n(), M.m()), -(Ah * E * R + M.B), Ah * E});
  return {RationalMatrix(M.char_poly(), fnum), RationalMatrix(M.char_poly(), gnum)};
}

inline ZeroState zero_state(const ModelCM& M, const Mat& AF0, int T, const ToleranceConfig& tol = default_tolerances()) {
  if (AF0.rows() != M.n() || AF0.cols() != M.m()) throw Error(ErrorKind::DimensionMismatch, "AF0 must be n x m");
  if (!check_regular(M, tol)) throw Error(ErrorKind::NotRegular, "model is not regular");
  if (image_residual(M.Ahat, AF0, tol.rank) > tol.weakConsistency)
    throw Error(ErrorKind::NotInImage, "AF0 has columns outside Im Ahat");
  auto [Fz, Gz] = kernel_fractions(M, AF0);
  auto rep = properness_report(Fz, tol);
  if (rep.cls == Properness::Improper)
    throw Error(ErrorKind::NoSolution, "F[z] is improper (growth exponent " + std::to_string(rep.maxExponent) + ")");
  // F_t = G_{t+1} + [t = 0] G_0 R. Taking F from the same expansion keeps
  // roundoff in cancelled unstable modes identical in both kernels.
  const ImpulseSeq g = expand_impulse(Gz, T + 1, tol);
  std::vector<Mat> ft, gt(g.terms.begin(), g.terms.end() - 1);
  for (int t = 0; t <= T; ++t) ft.push_back(g[static_cast<std::size_t>(t + 1)]);
  ft[0] += g[0] * M.R;
  return ZeroState{Fz, Gz, ImpulseSeq(std::move(ft)), ImpulseSeq(std::move(gt))};
}

inline ZeroInput zero_input(const ModelCM& M, const InitCond& ic, int T, const ToleranceConfig& tol = default_tolerances()) {
  const auto n = M.n(), m = M.m();
  if (ic.x_prev.size() != n || ic.xhat_prev.size() != n || ic.u_prev.size() != m)
    throw Error(ErrorKind::DimensionMismatch, "initial conditions do not match the model");
  // [[D, zB], [0, zI - R]] [Xbar; U] = [z^2 Ahat xhat - z A x_prev; z R u_prev]
  MatrixPoly L = block2x2(M.char_poly(), MatrixPoly::monomial(M.B, 1), MatrixPoly(m, n), MatrixPoly::shift_minus(M.R));
  Mat c1(n + m, 1), c2(n + m, 1);
  c1 << -M.A * ic.x_prev, M.R * ic.u_prev;
  c2 << M.Ahat * ic.xhat_prev, Vec::Zero(m);
  MatrixPoly num(std::vector<Mat>{Mat::Zero(n + m, 1), c1, c2});
  ZeroInput out;
  out.Xbarz = RationalMatrix(L, num);
  if (classify_properness(out.Xbarz, tol) == Properness::Improper) return out;
  auto seq = expand_impulse(out.Xbarz, T + 1, tol);
  for (const auto& s : seq.terms) out.xbar.push_back(s.topRows(n).col(0));
  out.consistent = (out.xbar[0] - ic.xhat_prev).norm() <= tol.consistency * (1.0 + ic.xhat_prev.norm());
  return out;
}

inline Solution solve_total(const ModelCM& M, const Mat& AF0, const InitCond& ic, int T,
                            const ToleranceConfig& tol = default_tolerances()) {
  auto zi = zero_input(M, ic, T, tol);
  if (!zi.consistent) throw Error(ErrorKind::InconsistentInitialConditions, "no perfect-foresight path from these initial conditions");
  auto zs = zero_state(M, AF0, T, tol);
  Solution s;
  s.AF0 = AF0;
  s.Fz = zs.Fz;
  s.Gz = zs.Gz;
  s.Ft = zs.Ft;
  s.Gt = zs.Gt;
  s.xbar = zi.xbar;
  s.errorCoeff = s.Gt[0];
  return s;
}

/// w-driven kernels: convolution with R^t.
inline ImpulseSeq w_kernel(const ImpulseSeq& k, const Mat& R) { return convolve(k, powers(R, k.horizon())); }

struct Path {
  std::vector<Vec> x, xhat, u;  // t = 0..T
};

/// x_t and xhat_{1,t} for shocks w_0..w_T under a computed solution.
inline Path solution_path(const ModelCM& M, const Solution& s, const InitCond& ic, const std::vector<Vec>& w) {
  const int T = static_cast<int>(w.size()) - 1;
  if (T > s.Gt.horizon() || T + 1 > static_cast<int>(s.xbar.size()) - 1)
    throw Error(ErrorKind::DimensionMismatch, "solution horizon shorter than the shock sequence");
  Path p;
  std::vector<Vec> ut;  // u_t - R^{t+1} u_prev
  Vec u = ic.u_prev, uf = Vec::Zero(M.m());
  for (int t = 0; t <= T; ++t) {
    u = M.R * u + w[static_cast<std::size_t>(t)];
    uf = M.R * uf + w[static_cast<std::size_t>(t)];
    p.u.push_back(u);
    ut.push_back(uf);
  }
  for (int t = 0; t <= T; ++t) {
    Vec x = s.xbar[static_cast<std::size_t>(t)], xh = s.xbar[static_cast<std::size_t>(t + 1)];
    for (int tau = 0; tau <= t; ++tau) {
      x += s.Gt[static_cast<std::size_t>(t - tau)] * ut[static_cast<std::size_t>(tau)];
      xh += s.Ft[static_cast<std::size_t>(t - tau)] * ut[static_cast<std::size_t>(tau)];
    }
    p.x.push_back(x);
    p.xhat.push_back(xh);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Feedback predictor

struct Predictor {
  ImpulseSeq Phi, Psi;
  Mat Ag;
  Mat AF0;
};

inline Mat pinv(const Mat& M, double rel) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& s = svd.singularValues();
  Vec inv = Vec::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(0) > 0 && s(i) > rel * s(0)) inv(i) = 1.0 / s(i);
  return svd.matrixV().leftCols(s.size()) * inv.asDiagonal() * svd.matrixU().leftCols(s.size()).transpose();
}

inline Predictor feedback_predictor(const ModelCM& M, const Mat& AF0, const InitCond& ic, int T,
                                    const ToleranceConfig& tol = default_tolerances()) {
  if (!check_well_posed(M, tol)) throw Error(ErrorKind::NotWellPosed, "[z^2 Ahat - zI + A]^{-1} is not strictly proper");
  if (!check_weak_consistency(M, ic, tol)) throw Error(ErrorKind::NotWeaklyConsistent, "initial conditions outside Im Ahat");
  const auto n = M.n();
  Predictor p;
  p.AF0 = AF0;
  p.Ag = pinv(M.Ahat, tol.rank);
  MatrixPoly den(std::vector<Mat>{Mat::Identity(n, n), -M.Ahat});
  p.Phi = expand_impulse(RationalMatrix(den, MatrixPoly::identity(n)), T, tol);
  p.Psi = expand_impulse(RationalMatrix(den, MatrixPoly::monomial(M.Ahat * p.Ag, 1)), T, tol);
  return p;
}

/// Runs the model with forecasts produced by the predictor law.
inline Path closed_loop(const ModelCM& M, const Predictor& P, const InitCond& ic, const std::vector<Vec>& w) {
  const int T = static_cast<int>(w.size()) - 1;
  if (T > P.Phi.horizon()) throw Error(ErrorKind::DimensionMismatch, "predictor horizon too short");
  const Mat BR = M.B * M.R;
  const Vec v = ic.xhat_prev - M.A * ic.x_prev - BR * ic.u_prev;
  Path p;
  std::vector<Vec> drive;  // A x_t + B R u_t
  Vec xprev = ic.x_prev, u = ic.u_prev;
  for (int t = 0; t <= T; ++t) {
    u = M.R * u + w[static_cast<std::size_t>(t)];
    Vec partial = -P.Psi[static_cast<std::size_t>(t)] * v;
    for (int tau = 0; tau < t; ++tau) partial += P.Phi[static_cast<std::size_t>(t - tau)] * drive[static_cast<std::size_t>(tau)];
    for (int tau = 0; tau <= t; ++tau)
      partial -= P.Psi[static_cast<std::size_t>(t - tau)] * (P.AF0 * w[static_cast<std::size_t>(tau)]);
    // Ahat Phi_0 = 0, so the current-state term does not feed back into x_t.
    Vec x = M.A * xprev + M.Ahat * partial + M.B * u;
    drive.push_back(M.A * x + BR * u);
    p.x.push_back(x);
    p.xhat.push_back(partial + P.Phi[0] * drive.back());
    p.u.push_back(u);
    xprev = x;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Monte Carlo

struct PathStats {
  std::vector<Vec> meanError;   // mean of x_{t+1} - xhat_{1,t}, t = 0..T-1
  Vec sigmaError;               // per-component std of (AF0 + B) w
  double cltBound = 0.0;        // 4 sigma / sqrt(N), largest component
  double maxIdentityResidual = 0.0;  // relative to 1 + |x| on each path
  std::vector<Path> paths;      // kept only on request
};

/// Lower-triangular-like factor L with L L^T = cov.
inline Mat covariance_factor(const Mat& cov) {
  if (cov.rows() != cov.cols()) throw Error(ErrorKind::CovarianceNotPSD, "covariance must be square");
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + cov.cwiseAbs().maxCoeff()))
    throw Error(ErrorKind::CovarianceNotPSD, "covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  if (es.eigenvalues().size() && es.eigenvalues().minCoeff() < -1e-12)
    throw Error(ErrorKind::CovarianceNotPSD, "covariance has a negative eigenvalue");
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::vector<Vec> draw_shocks(const Mat& L, std::uint64_t seed, std::uint64_t path, int T) {
  std::mt19937_64 gen(splitmix64(seed ^ splitmix64(path)));
  std::normal_distribution<double> nd;
  std::vector<Vec> w;
  for (int t = 0; t <= T; ++t) {
    Vec z(L.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = nd(gen);
    w.push_back(L * z);
  }
  return w;
}

inline PathStats simulate_paths(const ModelCM& M, const Solution& s, const ShockSpec& shocks, const InitCond& ic, int N,
                                int T, unsigned threads = 1, bool keepPaths = false) {
  const Mat L = covariance_factor(shocks.covariance);
  const Mat& E = s.errorCoeff;
  const auto n = M.n();
  threads = std::max(1u, threads);
  // errors[i][t] = x_{t+1} - xhat_{1,t} on path i; summed in path order afterwards
  std::vector<std::vector<Vec>> errors(static_cast<std::size_t>(N));
  std::vector<double> worst(static_cast<std::size_t>(N), 0.0);
  std::vector<Path> kept(keepPaths ? static_cast<std::size_t>(N) : 0);
  auto work = [&](unsigned k) {
    for (int i = static_cast<int>(k); i < N; i += static_cast<int>(threads)) {
      const auto idx = static_cast<std::size_t>(i);
      auto w = draw_shocks(L, shocks.seed, static_cast<std::uint64_t>(i), T);
      Path p = solution_path(M, s, ic, w);
      double scale = 1.0;
      for (const auto& x : p.x) scale = std::max(scale, 1.0 + x.norm());
      for (int t = 0; t < T; ++t) {
        Vec e = p.x[static_cast<std::size_t>(t + 1)] - p.xhat[static_cast<std::size_t>(t)];
        worst[idx] = std::max(worst[idx], (e - E * w[static_cast<std::size_t>(t + 1)]).norm() / scale);
        errors[idx].push_back(std::move(e));
      }
      if (keepPaths) kept[idx] = std::move(p);
    }
  };
  if (threads == 1) work(0);
  else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& th : pool) th.join();
  }
  PathStats st;
  st.meanError.assign(static_cast<std::size_t>(T), Vec::Zero(n));
  for (int i = 0; i < N; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    for (int t = 0; t < T; ++t) st.meanError[static_cast<std::size_t>(t)] += errors[idx][static_cast<std::size_t>(t)];
    st.maxIdentityResidual = std::max(st.maxIdentityResidual, worst[idx]);
  }
  for (auto& m : st.meanError) m /= static_cast<double>(N);
  st.sigmaError = (E * shocks.covariance * E.transpose()).diagonal().cwiseMax(0.0).cwiseSqrt();
  st.cltBound = 4.0 * (st.sigmaError.size() ? st.sigmaError.maxCoeff() : 0.0) / std::sqrt(static_cast<double>(N));
  st.paths = std::move(kept);
  return st;
}

// ---------------------------------------------------------------------------
// General (multi-lead, multi-lag) solver

struct GeneralFreeParams {
  std::vector<Mat> F0;  // Ftilde_{i,0} for i = 1..h-1
  Mat AhF0h;            // A_h0 Ftilde_{h,0}
};

struct GeneralSolution {
  GeneralFreeParams freeParams;
  RationalMatrix Gz;
  ImpulseSeq Gt;                      // Gtilde_t, t = 0..T
  std::vector<ImpulseSeq> Fit;        // Fit[i-1] = Ftilde_{i,t}, i = 1..h
  bool wellPosed = false;             // existence guaranteed for every choice of free parameters
};

inline GeneralSolution solve_general(const GeneralModel& g, const GeneralFreeParams& fp, int T,
                                     const ToleranceConfig& tol = default_tolerances()) {
  const auto n = g.n(), m = g.m();
  const int h = g.h, l = g.l;
  if (static_cast<int>(fp.F0.size()) != h - 1) throw Error(ErrorKind::DimensionMismatch, "need h-1 free initial forecasts");
  const MatrixPoly D = g.denominator();
  if (!is_regular(D, tol)) throw Error(ErrorKind::NotRegular, "D[z] is singular");

  std::vector<Mat> G0(static_cast<std::size_t>(h));
  Mat g0 = g.B - fp.AhF0h;
  for (int i = 1; i < h; ++i) {
    g0 -= g.coeff(i, 0) * fp.F0[static_cast<std::size_t>(i - 1)];
    G0[static_cast<std::size_t>(i)] = fp.F0[static_cast<std::size_t>(i - 1)];
  }
  G0[0] = g0;

  // P(z) = sum_{i,j} sum_{k<i} A_ij z^{i+l-j-k} Gtilde_k
  MatrixPoly P(n, m);
  for (const auto& [ij, a] : g.coeffs)
    for (int k = 0; k < ij.first; ++k)
      P = P + MatrixPoly::monomial(a * G0[static_cast<std::size_t>(k)], ij.first + l - ij.second - k);
  const MatrixPoly zR = MatrixPoly::shift_minus(g.R);
  const MatrixPoly Nt = P * zR + MatrixPoly::monomial(g.B, l + 1);

  GeneralSolution sol;
  sol.freeParams = fp;
  sol.Gz = RationalMatrix(D, Nt, zR);
  for (int i = 1; i <= h; ++i) {
    MatrixPoly num = Nt.shifted(i);
    for (int k = 0; k < i; ++k) num = num - (D * G0[static_cast<std::size_t>(k)] * zR).shifted(i - k);
    RationalMatrix Fi(D, num, zR);
    if (i == h) {
      auto rep = properness_report(Fi, tol);
      if (rep.cls == Properness::Improper)
        throw Error(ErrorKind::NoSolution, "Ftilde_h[z] is improper (growth exponent " + std::to_string(rep.maxExponent) + ")");
    }
    sol.Fit.push_back(expand_impulse(Fi, T, tol));
  }
  sol.Gt = expand_impulse(sol.Gz, T, tol);
  RationalMatrix shortcut(D, MatrixPoly::monomial(Mat::Identity(n, n), h + l - 1));
  sol.wellPosed = classify_properness(shortcut, tol) != Properness::Improper;
  return sol;
}

}  // namespace rexp
