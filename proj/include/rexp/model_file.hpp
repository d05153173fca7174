#pragma once

// Text model files: [matrices] | [general], optional [init] and [shocks].
//
//   [matrices]
//   A    = 0 0 -0.2083333 ; 0 0 -0.1041667 ; 0 0 0.4166667
//   Ahat = ...
//
// Matrix rows are separated by ';', entries by whitespace. '#' starts a comment.

#include "rexp/model.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace rexp {

struct ModelFile {
  std::optional<ModelCM> cm;
  std::optional<GeneralModel> general;
  std::optional<InitCond> init;
  std::optional<ShockSpec> shocks;
  std::string source;
};

namespace detail {

inline std::string trim_ws(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void parse_fail(const std::string& src, int line, int col, const std::string& msg) {
  throw Error(ErrorKind::ParseError, src + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

struct Entry {
  std::string value;
  int line = 0;
  int col = 0;  // 1-based column where the value starts
};

/// Parses "a b c ; d e f" into a matrix; `col0` is the value's column for diagnostics.
inline Mat parse_matrix(const std::string& text, const std::string& src, int line, int col0) {
  std::vector<std::vector<double>> rows(1);
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == ';') {
      rows.emplace_back();
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ' && text[j] != '\t' && text[j] != ';' && text[j] != '\r') ++j;
    double v = 0;
    const char* first = text.data() + i;
    const char* last = text.data() + j;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
      parse_fail(src, line, col0 + static_cast<int>(i), "bad number '" + text.substr(i, j - i) + "'");
    rows.back().push_back(v);
    i = j;
  }
  if (rows.size() > 1 && rows.back().empty()) rows.pop_back();
  const auto cols = rows[0].size();
  if (cols == 0) parse_fail(src, line, col0, "empty matrix");
  for (const auto& r : rows)
    if (r.size() != cols) parse_fail(src, line, col0, "ragged matrix rows");
  Mat M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return M;
}

inline std::string fmt_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace detail

inline std::string format_matrix(const Mat& M) {
  std::string s;
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    if (r) s += " ; ";
    for (Eigen::Index c = 0; c < M.cols(); ++c) {
      if (c) s += ' ';
      s += detail::fmt_double(M(r, c));
    }
  }
  return s;
}

inline ModelFile parse_model_text(const std::string& text, const std::string& src = "<input>") {
  using detail::Entry;
  std::map<std::string, std::map<std::string, Entry>> sections;
  std::map<std::string, int> sectionLine;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  int lineNo = 0;
  while (std::getline(in, raw)) {
    ++lineNo;
    auto hash = raw.find('#');
    std::string line = raw.substr(0, hash);
    std::string t = detail::trim_ws(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') detail::parse_fail(src, lineNo, 1, "unterminated section header");
      current = detail::trim_ws(t.substr(1, t.size() - 2));
      if (sections.count(current)) detail::parse_fail(src, lineNo, 1, "duplicate section [" + current + "]");
      sections[current];
      sectionLine[current] = lineNo;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) detail::parse_fail(src, lineNo, 1, "expected key = value");
    if (current.empty()) detail::parse_fail(src, lineNo, 1, "key outside any section");
    std::string key = detail::trim_ws(line.substr(0, eq));
    std::string valueRaw = line.substr(eq + 1);
    auto lead = valueRaw.find_first_not_of(" \t");
    int col = static_cast<int>(eq) + 2 + static_cast<int>(lead == std::string::npos ? 0 : lead);
    if (sections[current].count(key)) detail::parse_fail(src, lineNo, 1, "duplicate key '" + key + "'");
    sections[current][key] = Entry{detail::trim_ws(valueRaw), lineNo, col};
  }

  for (const auto& [name, _] : sections)
    if (name != "matrices" && name != "general" && name != "init" && name != "shocks")
      detail::parse_fail(src, sectionLine[name], 1, "unknown section [" + name + "]");
  const bool hasM = sections.count("matrices"), hasG = sections.count("general");
  if (hasM == hasG) detail::parse_fail(src, 1, 1, "exactly one of [matrices] or [general] is required");

  auto getMat = [&](const std::string& sec, const std::string& key) {
    const Entry& e = sections[sec].at(key);
    return detail::parse_matrix(e.value, src, e.line, e.col);
  };
  auto requireKeys = [&](const std::string& sec, std::vector<std::string> keys) {
    std::string missing;
    for (const auto& k : keys)
      if (!sections[sec].count(k)) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty()) detail::parse_fail(src, sectionLine[sec], 1, "[" + sec + "] missing keys: " + missing);
  };
  auto dimFail = [&](const std::string& msg) { throw Error(ErrorKind::DimensionMismatch, src + ": " + msg); };

  ModelFile mf;
  mf.source = src;
  Eigen::Index n = 0, m = 0;
  if (hasM) {
    requireKeys("matrices", {"A", "Ahat", "B", "R"});
    for (const auto& [k, e] : sections["matrices"])
      if (k != "A" && k != "Ahat" && k != "B" && k != "R") detail::parse_fail(src, e.line, 1, "unknown key '" + k + "'");
    ModelCM M{getMat("matrices", "A"), getMat("matrices", "Ahat"), getMat("matrices", "B"), getMat("matrices", "R")};
    n = M.A.rows();
    m = M.B.cols();
    if (M.A.cols() != n || M.Ahat.rows() != n || M.Ahat.cols() != n || M.B.rows() != n || M.R.rows() != m || M.R.cols() != m)
      dimFail("A, Ahat must be n x n, B n x m, R m x m");
    if (M.Ahat.cwiseAbs().maxCoeff() == 0.0) throw Error(ErrorKind::InvariantError, src + ": Ahat must be nonzero");
    mf.cm = M;
  } else {
    requireKeys("general", {"h", "l", "B", "R"});
    GeneralModel g;
    auto intKey = [&](const std::string& k) {
      const Entry& e = sections["general"].at(k);
      int v = 0;
      auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
      if (ec != std::errc() || p != e.value.data() + e.value.size()) detail::parse_fail(src, e.line, e.col, "expected an integer");
      return v;
    };
    g.h = intKey("h");
    g.l = intKey("l");
    g.B = getMat("general", "B");
    g.R = getMat("general", "R");
    n = g.B.rows();
    m = g.B.cols();
    if (g.R.rows() != m || g.R.cols() != m) dimFail("R must be m x m");
    for (const auto& [k, e] : sections["general"]) {
      if (k == "h" || k == "l" || k == "B" || k == "R") continue;
      int i = -1, j = -1;
      if (std::sscanf(k.c_str(), "A_%d_%d", &i, &j) != 2) detail::parse_fail(src, e.line, 1, "unknown key '" + k + "'");
      if (i < 0 || i > g.h || j < 0 || j > g.l) detail::parse_fail(src, e.line, 1, "coefficient " + k + " outside 0..h, 0..l");
      Mat a = detail::parse_matrix(e.value, src, e.line, e.col);
      if (a.rows() != n || a.cols() != n) dimFail(k + " must be n x n");
      g.coeffs[{i, j}] = a;
    }
    if (!g.coeffs.count({0, 0})) g.coeffs[{0, 0}] = Mat::Identity(n, n);
    if (g.coeff(0, 0) != Mat::Identity(n, n)) throw Error(ErrorKind::InvariantError, src + ": A_0_0 must be the identity");
    mf.general = g;
  }

  if (sections.count("init")) {
    InitCond ic = InitCond::zero(n, m);
    for (const auto& [k, e] : sections["init"]) {
      Vec* target = k == "x_prev" ? &ic.x_prev : k == "xhat_prev" ? &ic.xhat_prev : k == "u_prev" ? &ic.u_prev : nullptr;
      if (!target) detail::parse_fail(src, e.line, 1, "unknown key '" + k + "'");
      Mat v = detail::parse_matrix(e.value, src, e.line, e.col);
      if (v.rows() != 1 && v.cols() != 1) dimFail(k + " must be a vector");
      Vec vv = Eigen::Map<Vec>(v.data(), v.size());
      if (vv.size() != target->size()) dimFail(k + " has the wrong length");
      *target = vv;
    }
    mf.init = ic;
  }
  if (sections.count("shocks")) {
    ShockSpec sh;
    sh.covariance = Mat::Identity(m, m);
    for (const auto& [k, e] : sections["shocks"]) {
      if (k == "seed") {
        auto [p, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), sh.seed);
        if (ec != std::errc() || p != e.value.data() + e.value.size()) detail::parse_fail(src, e.line, e.col, "seed must be a non-negative integer");
      } else if (k == "cov") {
        Mat c = detail::parse_matrix(e.value, src, e.line, e.col);
        if (c.rows() == 1 && c.cols() == m && m != 1) sh.covariance = c.row(0).transpose().asDiagonal();
        else if (c.rows() == m && c.cols() == m) sh.covariance = c;
        else dimFail("cov must be a diagonal list of length m or an m x m matrix");
      } else {
        detail::parse_fail(src, e.line, 1, "unknown key '" + k + "'");
      }
    }
    mf.shocks = sh;
  }
  return mf;
}

inline ModelFile parse_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ParseError, path + ": cannot open file");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model_text(ss.str(), path);
}

/// Serializes with shortest round-trip float formatting.
inline std::string emit_model(const ModelFile& mf) {
  std::string s;
  if (mf.cm) {
    s += "[matrices]\n";
    s += "A = " + format_matrix(mf.cm->A) + "\n";
    s += "Ahat = " + format_matrix(mf.cm->Ahat) + "\n";
    s += "B = " + format_matrix(mf.cm->B) + "\n";
    s += "R = " + format_matrix(mf.cm->R) + "\n";
  }
  if (mf.general) {
    const auto& g = *mf.general;
    s += "[general]\nh = " + std::to_string(g.h) + "\nl = " + std::to_string(g.l) + "\n";
    s += "B = " + format_matrix(g.B) + "\n";
    s += "R = " + format_matrix(g.R) + "\n";
    for (const auto& [ij, a] : g.coeffs)
      s += "A_" + std::to_string(ij.first) + "_" + std::to_string(ij.second) + " = " + format_matrix(a) + "\n";
  }
  if (mf.init) {
    s += "[init]\n";
    s += "x_prev = " + format_matrix(mf.init->x_prev.transpose()) + "\n";
    s += "xhat_prev = " + format_matrix(mf.init->xhat_prev.transpose()) + "\n";
    s += "u_prev = " + format_matrix(mf.init->u_prev.transpose()) + "\n";
  }
  if (mf.shocks) {
    s += "[shocks]\nseed = " + std::to_string(mf.shocks->seed) + "\n";
    s += "cov = " + format_matrix(mf.shocks->covariance) + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// One row per t: "t, M[0][0], M[0][1], ..." with the given name prefix.
inline std::string csv_sequence(const std::string& name, const ImpulseSeq& seq) {
  std::string s = "t";
  for (Eigen::Index r = 0; r < seq.rows(); ++r)
    for (Eigen::Index c = 0; c < seq.cols(); ++c) s += "," + name + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
  s += "\n";
  for (std::size_t t = 0; t < seq.size(); ++t) {
    s += std::to_string(t);
    for (Eigen::Index r = 0; r < seq.rows(); ++r)
      for (Eigen::Index c = 0; c < seq.cols(); ++c) s += "," + csv_num(seq[t](r, c));
    s += "\n";
  }
  return s;
}

inline std::string csv_vectors(const std::vector<std::pair<std::string, const std::vector<Vec>*>>& cols) {
  std::string s = "t";
  std::size_t T = cols.empty() ? 0 : cols[0].second->size();
  for (const auto& [name, v] : cols) {
    T = std::min(T, v->size());
    for (Eigen::Index i = 0; i < (v->empty() ? 0 : (*v)[0].size()); ++i) s += "," + name + "[" + std::to_string(i) + "]";
  }
  s += "\n";
  for (std::size_t t = 0; t < T; ++t) {
    s += std::to_string(t);
    for (const auto& [name, v] : cols)
      for (Eigen::Index i = 0; i < (*v)[t].size(); ++i) s += "," + csv_num((*v)[t](i));
    s += "\n";
  }
  return s;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::ParseError, path + ": cannot write file");
  f << text;
}

}  // namespace rexp
