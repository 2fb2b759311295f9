#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mclear/model.hpp"

namespace mclear {

// Writes a ModelInstance in CPLEX LP text format so assembled models can be
// cross-checked with independent solvers. Variables and rows are emitted in
// sorted-name order.
inline void write_lp_format(const ModelInstance& m, std::ostream& os) {
  std::vector<int> vorder(m.vars().size()), corder(m.cons().size());
  std::iota(vorder.begin(), vorder.end(), 0);
  std::iota(corder.begin(), corder.end(), 0);
  std::sort(vorder.begin(), vorder.end(),
            [&](int a, int b) { return m.var(a).name < m.var(b).name; });
  std::sort(corder.begin(), corder.end(),
            [&](int a, int b) { return m.con(a).name < m.con(b).name; });

  auto ident = [&](const std::string& s) {
    std::string t = s;
    for (char& c : t)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
            c == '.'))
        c = '_';
    return t;
  };
  auto num = [](double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
  };

  os << "\\ " << m.name << "\n";
  os << "Minimize\n obj:";
  bool any = false;
  for (int j : vorder)
    if (m.obj_lin()[j] != 0.0) {
      os << (m.obj_lin()[j] >= 0 ? " + " : " - ") << num(std::abs(m.obj_lin()[j]))
         << " " << ident(m.var(j).name);
      any = true;
    }
  bool any_quad = false;
  for (int j : vorder)
    if (m.obj_quad()[j] != 0.0) any_quad = true;
  if (any_quad) {
    os << " + [";
    for (int j : vorder)
      if (m.obj_quad()[j] != 0.0)
        os << " + " << num(2.0 * m.obj_quad()[j]) << " " << ident(m.var(j).name)
           << " ^ 2";
    os << " ] / 2";
    any = true;
  }
  if (!any) os << " 0 " << ident(m.var(vorder.empty() ? 0 : vorder[0]).name);
  os << "\nSubject To\n";
  for (int i : corder) {
    const Constraint& c = m.con(i);
    os << " " << ident(c.name) << ":";
    if (c.terms.empty()) os << " 0 " << ident(m.vars().empty() ? "x" : m.var(0).name);
    for (const auto& t : c.terms)
      os << (t.coef >= 0 ? " + " : " - ") << num(std::abs(t.coef)) << " "
         << ident(m.var(t.var).name);
    os << (c.sense == Sense::LE ? " <= " : c.sense == Sense::GE ? " >= " : " = ")
       << num(c.rhs) << "\n";
  }
  os << "Bounds\n";
  for (int j : vorder) {
    const Variable& v = m.var(j);
    if (v.lo <= -kInf && v.hi >= kInf) {
      os << " " << ident(v.name) << " free\n";
    } else {
      os << " ";
      if (v.lo > -kInf) os << num(v.lo) << " <= ";
      else os << "-inf <= ";
      os << ident(v.name);
      if (v.hi < kInf) os << " <= " << num(v.hi);
      os << "\n";
    }
  }
  bool have_bin = false;
  for (int j : vorder)
    if (m.var(j).kind == VarKind::Binary) {
      if (!have_bin) os << "Binaries\n";
      have_bin = true;
      os << " " << ident(m.var(j).name) << "\n";
    }
  os << "End\n";
}

inline void dump_lp_file(const ModelInstance& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw io_error("cannot write model dump: " + path);
  write_lp_format(m, f);
}

// Independent line-oriented reader used to cross-check emitted files: it
// knows nothing about ModelInstance internals and just counts what the text
// declares.
struct LpFileCounts {
  long rows = 0;
  long binaries = 0;
  long bounded_or_free_vars = 0;
};

inline LpFileCounts read_lp_counts(std::istream& is) {
  LpFileCounts out;
  std::string line, section;
  while (std::getline(is, line)) {
    if (!line.empty() && line[0] == '\\') continue;
    std::string trimmed;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) trimmed += c;
    if (trimmed.empty()) continue;
    std::string lower;
    for (char c : trimmed) lower += static_cast<char>(std::tolower(c));
    if (lower == "minimize" || lower == "maximize" || lower == "subjectto" ||
        lower == "bounds" || lower == "binaries" || lower == "generals" ||
        lower == "end") {
      section = lower;
      continue;
    }
    if (section == "subjectto" && line.find(':') != std::string::npos) out.rows++;
    else if (section == "binaries") out.binaries++;
    else if (section == "bounds") out.bounded_or_free_vars++;
  }
  return out;
}

inline LpFileCounts read_lp_counts_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw io_error("cannot read model dump: " + path);
  return read_lp_counts(f);
}

}  // namespace mclear
