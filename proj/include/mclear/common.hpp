#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace mclear {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Project-wide numeric tolerances. Dollar-valued results are reported to 0.1,
// so 1e-6 leaves ample headroom.
inline constexpr double kFeasTol = 1e-6;
inline constexpr double kIntTol = 1e-6;

enum class ErrorKind {
  Usage,
  Io,
  Parse,
  Validation,
  Assembly,
  Solver,
  Budget,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error io_error(const std::string& m) { return Error(ErrorKind::Io, m); }
inline Error parse_error(const std::string& m) { return Error(ErrorKind::Parse, m); }
inline Error validation_error(const std::string& m) { return Error(ErrorKind::Validation, m); }
inline Error assembly_error(const std::string& m) { return Error(ErrorKind::Assembly, m); }
inline Error solver_error(const std::string& m) { return Error(ErrorKind::Solver, m); }

// Fixed-precision formatting helper used by the report writers; keeps CSV
// output byte-stable across runs.
inline std::string fmt_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0" || s == "-0.0" || s == "-0.00" || s == "-0.000" || s == "-0.0000")
    s.erase(0, 1);
  return s;
}

// FNV-1a; used to tag reports with the scenario they came from.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mclear
