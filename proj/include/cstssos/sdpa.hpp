#ifndef CSTSSOS_SDPA_HPP
#define CSTSSOS_SDPA_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cstssos/sdp.hpp"

namespace cstssos {

/// A problem in SDPA sparse form:
///   minimize c^T x + c0  subject to  sum_i F_i x_i - F_0 >= 0.
/// Negative block sizes denote diagonal (LP) blocks.
struct SDPAProblem {
  int m = 0;
  std::vector<int> block_sizes;
  std::vector<double> c;
  double c0 = 0.0;  // carried in a leading comment; not part of the standard format
  std::vector<std::tuple<int, int, int, int, double>> entries;  // matno, blkno, i, j (1-based, i <= j), value

  friend bool operator==(const SDPAProblem&, const SDPAProblem&) = default;
};

/// Values reported by an external SDPA-family solver.
struct SDPAResult {
  std::optional<double> primal_objective;
  std::optional<double> dual_objective;
  std::string phase;
  std::vector<double> x;
};

class SDPAParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Shortest decimal that parses back to the same double.
inline std::string shortest(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, p);
}

inline double parse_double(const std::string& s, int line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw SDPAParseError("line " + std::to_string(line) + ": bad number \"" + s + "\"");
  return v;
}

inline std::vector<std::string> sdpa_tokens(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')' || ch == '\t' || ch == '\r') ch = ' ';
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string t; is >> t;) out.push_back(t);
  return out;
}

}  // namespace detail

/// Converts the reduced problem: F_i = A_i and F_0 = -constant.
inline SDPAProblem to_sdpa(const ReducedSDP& red) {
  SDPAProblem p;
  p.m = red.m;
  p.c = red.c;
  p.c0 = red.c0;
  for (std::size_t b = 0; b < red.blocks.size(); ++b) {
    const auto& blk = red.blocks[b];
    const int bn = static_cast<int>(b) + 1;
    p.block_sizes.push_back(blk.size);
    for (int i = 0; i < blk.size; ++i)
      for (int j = i; j < blk.size; ++j) {
        const double v = blk.constant(i, j);
        if (v != 0.0) p.entries.emplace_back(0, bn, i + 1, j + 1, -v);
      }
    for (const auto& a : blk.coefficients)
      for (const auto& [r, c, v] : a.entries) p.entries.emplace_back(a.var + 1, bn, r + 1, c + 1, v);
  }
  std::sort(p.entries.begin(), p.entries.end());
  return p;
}

/// Equalities are eliminated first, so the file is plain SDPA.
inline SDPAProblem to_sdpa(const SDPProblem& sdp) { return to_sdpa(reduce(sdp)); }

inline void write_sdpa(const SDPAProblem& p, std::ostream& os) {
  if (p.c0 != 0.0) os << "\"objective constant " << detail::shortest(p.c0) << "\n";
  os << p.m << "\n" << p.block_sizes.size() << "\n";
  for (std::size_t b = 0; b < p.block_sizes.size(); ++b) os << (b ? " " : "") << p.block_sizes[b];
  os << "\n";
  for (std::size_t i = 0; i < p.c.size(); ++i) os << (i ? " " : "") << detail::shortest(p.c[i]);
  os << "\n";
  for (const auto& [mat, blk, i, j, v] : p.entries)
    os << mat << " " << blk << " " << i << " " << j << " " << detail::shortest(v) << "\n";
}

inline std::string export_sdpa(const SDPProblem& sdp) {
  std::ostringstream os;
  write_sdpa(to_sdpa(sdp), os);
  return os.str();
}

inline void export_sdpa(const SDPProblem& sdp, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  write_sdpa(to_sdpa(sdp), f);
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

/// Reads SDPA sparse format. Entries are canonicalised (i <= j, sorted) and
/// repeated positions are summed.
inline SDPAProblem parse_sdpa(const std::string& text) {
  SDPAProblem p;
  std::istringstream is(text);
  std::string line;
  int lineno = 0, stage = 0;
  std::size_t nblocks = 0;
  std::vector<std::string> pending;
  const std::string constant_tag = "\"objective constant ";
  while (std::getline(is, line)) {
    ++lineno;
    if (line.rfind(constant_tag, 0) == 0) {
      p.c0 = detail::parse_double(detail::sdpa_tokens(line.substr(constant_tag.size())).at(0), lineno);
      continue;
    }
    if (!line.empty() && (line[0] == '"' || line[0] == '*')) continue;
    auto tok = detail::sdpa_tokens(line);
    if (tok.empty()) continue;
    auto to_int = [&](const std::string& s) {
      const double v = detail::parse_double(s, lineno);
      if (v != std::floor(v)) throw SDPAParseError("line " + std::to_string(lineno) + ": expected an integer");
      return static_cast<int>(v);
    };
    switch (stage) {
      case 0:
        p.m = to_int(tok[0]);
        if (p.m < 0) throw SDPAParseError("negative variable count");
        ++stage;
        break;
      case 1: {
        const int nb = to_int(tok[0]);
        if (nb < 0) throw SDPAParseError("negative block count");
        nblocks = static_cast<std::size_t>(nb);
        ++stage;
        break;
      }
      case 2:
        for (const auto& t : tok)
          if (p.block_sizes.size() < nblocks) p.block_sizes.push_back(to_int(t));
        if (p.block_sizes.size() == nblocks) ++stage;
        break;
      case 3:
        for (const auto& t : tok)
          if (p.c.size() < static_cast<std::size_t>(p.m)) p.c.push_back(detail::parse_double(t, lineno));
        if (p.c.size() == static_cast<std::size_t>(p.m)) ++stage;
        break;
      default: {
        if (tok.size() < 5) throw SDPAParseError("line " + std::to_string(lineno) + ": entry needs 5 fields");
        int mat = to_int(tok[0]), blk = to_int(tok[1]), i = to_int(tok[2]), j = to_int(tok[3]);
        const double v = detail::parse_double(tok[4], lineno);
        if (mat < 0 || mat > p.m) throw SDPAParseError("line " + std::to_string(lineno) + ": matrix index out of range");
        if (blk < 1 || static_cast<std::size_t>(blk) > nblocks)
          throw SDPAParseError("line " + std::to_string(lineno) + ": block index out of range");
        const int sz = std::abs(p.block_sizes[static_cast<std::size_t>(blk - 1)]);
        if (i < 1 || j < 1 || i > sz || j > sz)
          throw SDPAParseError("line " + std::to_string(lineno) + ": entry outside its block");
        if (p.block_sizes[static_cast<std::size_t>(blk - 1)] < 0 && i != j)
          throw SDPAParseError("line " + std::to_string(lineno) + ": off-diagonal entry in a diagonal block");
        if (i > j) std::swap(i, j);
        p.entries.emplace_back(mat, blk, i, j, v);
      }
    }
  }
  if (stage < 4 && !(stage == 3 && p.m == 0)) throw SDPAParseError("truncated SDPA header");
  std::sort(p.entries.begin(), p.entries.end());
  std::vector<std::tuple<int, int, int, int, double>> merged;
  for (const auto& e : p.entries) {
    if (!merged.empty()) {
      auto& last = merged.back();
      if (std::get<0>(last) == std::get<0>(e) && std::get<1>(last) == std::get<1>(e) &&
          std::get<2>(last) == std::get<2>(e) && std::get<3>(last) == std::get<3>(e)) {
        std::get<4>(last) += std::get<4>(e);
        continue;
      }
    }
    merged.push_back(e);
  }
  p.entries = std::move(merged);
  return p;
}

/// Rebuilds a problem the internal solver can run; moments are not recoverable
/// from the file, so T and t stay empty.
inline ReducedSDP to_reduced(const SDPAProblem& p) {
  ReducedSDP red;
  red.m = p.m;
  red.c = p.c;
  red.c0 = p.c0;
  for (int s : p.block_sizes) {
    ReducedBlock b;
    b.size = std::abs(s);
    b.constant = Eigen::MatrixXd::Zero(b.size, b.size);
    red.blocks.push_back(std::move(b));
  }
  for (const auto& [mat, blk, i, j, v] : p.entries) {
    auto& b = red.blocks[static_cast<std::size_t>(blk - 1)];
    if (mat == 0) {
      b.constant(i - 1, j - 1) -= v;
      if (i != j) b.constant(j - 1, i - 1) -= v;
      continue;
    }
    if (b.coefficients.empty() || b.coefficients.back().var != mat - 1) b.coefficients.push_back({mat - 1, {}});
    b.coefficients.back().entries.emplace_back(i - 1, j - 1, v);
  }
  return red;
}

/// Reads objValPrimal, objValDual, phase.value and xVec from SDPA output.
inline SDPAResult parse_sdpa_result(const std::string& text) {
  SDPAResult r;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  bool want_x = false;
  auto value_after_eq = [](const std::string& l) {
    const auto pos = l.find('=');
    return pos == std::string::npos ? std::string() : l.substr(pos + 1);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (want_x) {
      for (const auto& t : detail::sdpa_tokens(line)) r.x.push_back(detail::parse_double(t, lineno));
      if (line.find('}') != std::string::npos || !r.x.empty()) want_x = false;
      continue;
    }
    auto key_is = [&](const char* k) { return line.find(k) != std::string::npos && line.find('=') != std::string::npos; };
    if (key_is("objValPrimal")) {
      r.primal_objective = detail::parse_double(detail::sdpa_tokens(value_after_eq(line)).at(0), lineno);
    } else if (key_is("objValDual")) {
      r.dual_objective = detail::parse_double(detail::sdpa_tokens(value_after_eq(line)).at(0), lineno);
    } else if (key_is("phase.value")) {
      auto t = detail::sdpa_tokens(value_after_eq(line));
      if (!t.empty()) r.phase = t[0];
    } else if (key_is("xVec")) {
      const auto rest = value_after_eq(line);
      for (const auto& t : detail::sdpa_tokens(rest)) r.x.push_back(detail::parse_double(t, lineno));
      want_x = r.x.empty();
    }
  }
  if (!r.primal_objective) throw SDPAParseError("no objValPrimal in solver output");
  return r;
}

}  // namespace cstssos

#endif  // CSTSSOS_SDPA_HPP
