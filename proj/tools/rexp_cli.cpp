// rexp: command-line front end for the rational-expectations toolkit.

#include "rexp/model_file.hpp"
#include "rexp/selection.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace rexp;
namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::ParseError:
    case ErrorKind::DimensionMismatch: return 2;
    case ErrorKind::NotRegular:
    case ErrorKind::NotWellPosed:
    case ErrorKind::NotWeaklyConsistent:
    case ErrorKind::InvariantError:
    case ErrorKind::SingularStructure:
    case ErrorKind::ZeroDelta:
    case ErrorKind::SingularAhat: return 3;
    case ErrorKind::NoSolution:
    case ErrorKind::InconsistentInitialConditions:
    case ErrorKind::NotInImage: return 4;
    default: return 5;
  }
}

std::string num(double v, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string num(cplx z) {
  if (z.imag() == 0.0) return num(z.real());
  return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::abs(z.imag())) + "i";
}

void print_matrix(const std::string& name, const Mat& M) {
  std::cout << name << " =\n";
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    std::cout << " ";
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      char buf[32];
      std::snprintf(buf, sizeof buf, " %14.9g", M(r, c));
      std::cout << buf;
    }
    std::cout << "\n";
  }
}

void print_report(const DeterminacyReport& rep) {
  std::cout << "classification: " << to_string(rep.classification) << "\n";
  std::cout << "unstable eigenvalues:";
  for (auto z : rep.unstableEigs) std::cout << " " << num(z);
  std::cout << "\nconstraint rank: " << rep.constraintRank << "\nresidual: " << num(rep.residual, 3) << "\n";
  if (rep.AF0) {
    print_matrix("AF0", *rep.AF0);
    std::cout << "realized order: " << rep.realizedOrder << "\nspectral radius: " << num(rep.realizedRadius) << "\n";
  }
}

const ModelCM& require_cm(const ModelFile& mf, const char* cmd) {
  if (!mf.cm) throw Error(ErrorKind::InvariantError, std::string(cmd) + " needs a [matrices] model");
  return *mf.cm;
}

Mat resolve_af0(const ModelCM& M, const std::string& choice) {
  if (choice == "lsq") return select_least_squares(M);
  if (choice == "stable") {
    auto rep = select_stability(M);
    if (rep.classification != Determinacy::Determinate) {
      print_report(rep);
      throw Error(ErrorKind::NoSolution, "stability selection is not Determinate");
    }
    return *rep.AF0;
  }
  std::ifstream f(choice, std::ios::binary);
  if (!f) throw Error(ErrorKind::ParseError, choice + ": cannot open AF0 file");
  std::string text, line;
  int lineNo = 0, start = 0;
  while (std::getline(f, line)) {
    ++lineNo;
    line = line.substr(0, line.find('#'));
    if (auto eq = line.find('='); eq != std::string::npos) line = line.substr(eq + 1);
    if (detail::trim_ws(line).empty()) continue;
    if (!start) start = lineNo;
    text += line + " ; ";
  }
  if (text.empty()) throw Error(ErrorKind::ParseError, choice + ": empty AF0 file");
  Mat X = detail::parse_matrix(text, choice, start, 1);
  if (X.rows() != M.n() || X.cols() != M.m()) throw Error(ErrorKind::DimensionMismatch, choice + ": AF0 must be n x m");
  return X;
}

void ensure_dir(const std::string& d) {
  if (!d.empty()) fs::create_directories(d);
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

MatrixPoly char_matrix(const ModelFile& mf) { return mf.cm ? mf.cm->char_poly() : mf.general->denominator(); }

void validate_file(const ModelFile& mf) {
  if (mf.cm) validate(*mf.cm);
  else validate(*mf.general);
}

int cmd_check(const ModelFile& mf) {
  const MatrixPoly P = char_matrix(mf);
  const bool regular = is_regular(P);
  std::cout << "regular: " << (regular ? "yes" : "no") << "\n";
  if (!regular) return 3;
  if (mf.cm) {
    std::cout << "well-posed: " << (check_well_posed(*mf.cm) ? "yes" : "no") << "\n";
    if (mf.init) std::cout << "weakly consistent: " << (check_weak_consistency(*mf.cm, *mf.init) ? "yes" : "no") << "\n";
  } else {
    RationalMatrix shortcut(P, MatrixPoly::monomial(Mat::Identity(P.rows(), P.rows()), mf.general->h + mf.general->l - 1));
    std::cout << "well-posed: " << (classify_properness(shortcut) != Properness::Improper ? "yes" : "no") << "\n";
  }
  auto e = polyeig(P);
  std::cout << "finite eigenvalues:";
  for (auto z : e.finite) std::cout << " " << num(z);
  std::cout << "\ninfinite eigenvalues: " << e.infiniteCount << "\n";
  return 0;
}

int cmd_eig(const ModelFile& mf, const std::string& out) {
  const MatrixPoly P = char_matrix(mf);
  if (!is_regular(P)) throw Error(ErrorKind::NotRegular, "characteristic matrix is singular");
  auto e = polyeig(P);
  std::sort(e.finite.begin(), e.finite.end(), [](cplx a, cplx b) { return std::abs(a) > std::abs(b); });
  std::string csv = "k,re,im,modulus\n";
  std::cout << "   k  real            imag            modulus         stable\n";
  for (std::size_t k = 0; k < e.finite.size(); ++k) {
    const cplx z = e.finite[k];
    char buf[128];
    std::snprintf(buf, sizeof buf, "%4zu  %-14.9g  %-14.9g  %-14.9g  %s\n", k, z.real(), z.imag(), std::abs(z),
                  is_unstable(z, default_tolerances()) ? "no" : "yes");
    std::cout << buf;
    csv += std::to_string(k) + "," + csv_num(z.real()) + "," + csv_num(z.imag()) + "," + csv_num(std::abs(z)) + "\n";
  }
  std::cout << "infinite eigenvalues: " << e.infiniteCount << "\n";
  if (!out.empty()) {
    ensure_dir(out);
    write_text(join(out, "eigenvalues.csv"), csv);
  }
  return 0;
}

/// Reads F_i and AhF keys from a free-parameter file for a general model.
GeneralFreeParams read_free(const GeneralModel& g, const std::string& path) {
  GeneralFreeParams fp;
  for (int i = 1; i < g.h; ++i) fp.F0.push_back(Mat::Zero(g.n(), g.m()));
  fp.AhF0h = Mat::Zero(g.n(), g.m());
  if (path.empty()) return fp;
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ParseError, path + ": cannot open free-parameter file");
  std::string line;
  int lineNo = 0;
  while (std::getline(f, line)) {
    ++lineNo;
    line = line.substr(0, line.find('#'));
    if (detail::trim_ws(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) detail::parse_fail(path, lineNo, 1, "expected key = value");
    const std::string key = detail::trim_ws(line.substr(0, eq));
    Mat v = detail::parse_matrix(line.substr(eq + 1), path, lineNo, static_cast<int>(eq) + 2);
    if (v.rows() != g.n() || v.cols() != g.m()) throw Error(ErrorKind::DimensionMismatch, path + ": " + key + " must be n x m");
    int i = 0;
    if (key == "AhF") fp.AhF0h = v;
    else if (std::sscanf(key.c_str(), "F_%d", &i) == 1 && i >= 1 && i < g.h) fp.F0[static_cast<std::size_t>(i - 1)] = v;
    else detail::parse_fail(path, lineNo, 1, "unknown key '" + key + "'");
  }
  return fp;
}

int cmd_solve(const ModelFile& mf, const std::string& af0, const std::string& freeFile, int T, const std::string& out) {
  validate_file(mf);
  ensure_dir(out);
  if (mf.general) {
    auto sol = solve_general(*mf.general, read_free(*mf.general, freeFile), T);
    std::cout << "well-posed: " << (sol.wellPosed ? "yes" : "no") << "\n";
    print_matrix("G0", sol.Gt[0]);
    if (!out.empty()) {
      write_text(join(out, "G.csv"), csv_sequence("G", sol.Gt));
      for (std::size_t i = 0; i < sol.Fit.size(); ++i)
        write_text(join(out, "F" + std::to_string(i + 1) + ".csv"), csv_sequence("F", sol.Fit[i]));
    }
    return 0;
  }
  const ModelCM& M = *mf.cm;
  const Mat AF0 = resolve_af0(M, af0);
  const InitCond ic = mf.init ? *mf.init : InitCond::zero(M.n(), M.m());
  Solution s = solve_total(M, AF0, ic, T);
  print_matrix("AF0", AF0);
  print_matrix("errorCoeff", s.errorCoeff);
  if (!out.empty()) {
    write_text(join(out, "G.csv"), csv_sequence("G", s.Gt));
    write_text(join(out, "F.csv"), csv_sequence("F", s.Ft));
    std::vector<Vec> xb(s.xbar.begin(), s.xbar.begin() + T + 1);
    write_text(join(out, "xbar.csv"), csv_vectors({{"xbar", &xb}}));
  }
  return 0;
}

int cmd_select(const ModelFile& mf, const std::string& criterion) {
  const ModelCM& M = require_cm(mf, "select");
  validate(M);
  if (criterion == "lsq") {
    const Mat AF0 = select_least_squares(M);
    print_matrix("AF0", AF0);
    print_matrix("errorCoeff", AF0 + M.B);
    return 0;
  }
  auto rep = select_stability(M);
  print_report(rep);
  return 0;
}

int cmd_sweep(const ModelFile& mf, double from, double to, int steps, bool linear, unsigned threads, const std::string& out) {
  const ModelCM& M = require_cm(mf, "sweep-gain");
  validate(M);
  if (steps < 1) throw Error(ErrorKind::ParseError, "--steps must be at least 1");
  const bool logGrid = !linear && from > 0 && to > 0;
  std::vector<double> grid;
  for (int k = 0; k <= steps; ++k) {
    const double s = static_cast<double>(k) / steps;
    grid.push_back(logGrid ? from * std::pow(to / from, s) : from + (to - from) * s);
  }
  auto res = gain_sweep(M, grid, threads);
  std::size_t width = 0;
  for (const auto& l : res.loci) width = std::max(width, l.size());
  std::string csv = "t,eps";
  for (std::size_t j = 0; j < width; ++j) csv += ",re[" + std::to_string(j) + "],im[" + std::to_string(j) + "]";
  csv += ",infinite\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    csv += std::to_string(k) + "," + csv_num(grid[k]);
    for (std::size_t j = 0; j < width; ++j) {
      if (j < res.loci[k].size()) csv += "," + csv_num(res.loci[k][j].real()) + "," + csv_num(res.loci[k][j].imag());
      else csv += ",,";
    }
    csv += "," + (res.regular[k] ? std::to_string(res.infiniteCounts[k]) : std::string("nan")) + "\n";
  }
  for (std::size_t k : {std::size_t{0}, grid.size() - 1}) {
    std::cout << "eps = " << num(grid[k]) << ":";
    for (auto z : res.loci[k]) std::cout << " " << num(z);
    std::cout << "\n";
  }
  if (!out.empty()) {
    ensure_dir(out);
    write_text(join(out, "loci.csv"), csv);
  } else {
    std::cout << csv;
  }
  return 0;
}

void print_ss(const std::string& name, const StateSpace& S) {
  std::cout << name << ": order " << S.order() << "\n";
  if (S.order()) {
    Eigen::EigenSolver<Mat> es(S.A, false);
    std::cout << "  poles:";
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) std::cout << " " << num(es.eigenvalues()(i));
    std::cout << "\n";
    print_matrix("  A", S.A);
    print_matrix("  B", S.B);
    print_matrix("  C", S.C);
  }
  print_matrix("  D", S.D);
}

int cmd_realize(const ModelFile& mf, const std::string& af0) {
  const ModelCM& M = require_cm(mf, "realize");
  validate(M);
  const Mat AF0 = resolve_af0(M, af0);
  auto [Fz, Gz] = kernel_fractions(M, AF0);
  if (classify_properness(Fz) == Properness::Improper) throw Error(ErrorKind::NoSolution, "F[z] is improper");
  print_ss("F", minimal_realization(Fz));
  print_ss("G", minimal_realization(Gz));
  return 0;
}

int cmd_simulate(const ModelFile& mf, const std::string& af0, int N, int T, unsigned threads, const std::string& out) {
  const ModelCM& M = require_cm(mf, "simulate");
  validate(M);
  const Mat AF0 = resolve_af0(M, af0);
  const InitCond ic = mf.init ? *mf.init : InitCond::zero(M.n(), M.m());
  ShockSpec shocks = mf.shocks ? *mf.shocks : ShockSpec{Mat::Identity(M.m(), M.m()), 0};
  Solution s = solve_total(M, AF0, ic, T);
  auto st = simulate_paths(M, s, shocks, ic, N, T, threads, true);
  double worstMean = 0.0;
  for (const auto& e : st.meanError) worstMean = std::max(worstMean, e.cwiseAbs().maxCoeff());
  std::cout << "paths: " << N << "\nhorizon: " << T << "\n";
  std::cout << "max identity residual: " << num(st.maxIdentityResidual, 3) << "\n";
  std::cout << "max |mean error|: " << num(worstMean, 6) << "\n4 sigma / sqrt(N): " << num(st.cltBound, 6) << "\n";
  if (!out.empty()) {
    ensure_dir(out);
    write_text(join(out, "mean_error.csv"), csv_vectors({{"e", &st.meanError}}));
    const Path& p = st.paths.front();
    write_text(join(out, "path0.csv"), csv_vectors({{"x", &p.x}, {"xhat", &p.xhat}, {"u", &p.u}}));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-consistent forecasting for linear rational-expectations models"};
  app.require_subcommand(1);
  std::string file, af0 = "lsq", out, criterion = "stable", freeFile;
  int T = 50, steps = 60, N = 1000;
  double from = 1e-6, to = 1.0;
  unsigned threads = 1;
  bool linear = false;

  auto addFile = [&](CLI::App* c) { c->add_option("model", file, "model file")->required(); };
  auto* check = app.add_subcommand("check", "regularity, well-posedness and eigenvalues");
  addFile(check);
  auto* eig = app.add_subcommand("eig", "eigenvalue table of the characteristic matrix");
  addFile(eig);
  eig->add_option("--out", out, "directory for eigenvalues.csv");
  auto* solve = app.add_subcommand("solve", "impulse responses for a chosen Ahat F0");
  addFile(solve);
  solve->add_option("--af0", af0, "lsq | stable | path to a matrix file");
  solve->add_option("--free", freeFile, "free parameters F_i and AhF for a [general] model");
  solve->add_option("--horizon", T, "last t")->check(CLI::NonNegativeNumber);
  solve->add_option("--out", out, "output directory");
  auto* select = app.add_subcommand("select", "apply a selection criterion");
  addFile(select);
  select->add_option("--criterion", criterion)->check(CLI::IsMember({"stable", "lsq"}));
  auto* sweep = app.add_subcommand("sweep-gain", "eigenvalue loci of z^2 eps Ahat - zI + A");
  addFile(sweep);
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--steps", steps);
  sweep->add_flag("--linear", linear, "linear instead of logarithmic grid");
  sweep->add_option("--threads", threads);
  sweep->add_option("--out", out, "directory for loci.csv");
  auto* realize = app.add_subcommand("realize", "minimal realizations of F[z] and G[z]");
  addFile(realize);
  realize->add_option("--af0", af0, "lsq | stable | path to a matrix file");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo paths and forecast-error statistics");
  addFile(simulate);
  simulate->add_option("--af0", af0, "lsq | stable | path to a matrix file");
  simulate->add_option("--paths", N)->check(CLI::PositiveNumber);
  simulate->add_option("--horizon", T)->check(CLI::PositiveNumber);
  simulate->add_option("--threads", threads);
  simulate->add_option("--out", out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const ModelFile mf = parse_model(file);
    if (check->parsed()) return cmd_check(mf);
    if (eig->parsed()) return cmd_eig(mf, out);
    if (solve->parsed()) return cmd_solve(mf, af0, freeFile, T, out);
    if (select->parsed()) return cmd_select(mf, criterion);
    if (sweep->parsed()) return cmd_sweep(mf, from, to, steps, linear, threads, out);
    if (realize->parsed()) return cmd_realize(mf, af0);
    if (simulate->parsed()) return cmd_simulate(mf, af0, N, T, threads, out);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
