#pragma once

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "layerfit/convergence.hpp"
#include "layerfit/mesh.hpp"
#include "layerfit/newton.hpp"

namespace layerfit {

namespace detail {

inline std::string printf_string(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const std::string str(s);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || errno == ERANGE) return std::nullopt;
  return v;
}

inline std::optional<int> parse_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const std::string str(s);
  char* end = nullptr;
  errno = 0;
  const long v = std::strtol(str.c_str(), &end, 10);
  if (end != str.c_str() + str.size() || errno == ERANGE || v < -100000 || v > 100000) return std::nullopt;
  return static_cast<int>(v);
}

}  // namespace detail

/// Accepts "2^-10", "2^3" or any decimal such as "0.001" / "1e-3".
/// Returns nullopt for malformed or nonpositive input.
inline std::optional<double> parse_epsilon(std::string_view text) {
  if (text.starts_with("2^")) {
    const auto exp = detail::parse_int(text.substr(2));
    if (!exp) return std::nullopt;
    const double v = std::ldexp(1.0, *exp);
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
    return v;
  }
  const auto v = detail::parse_double(text);
  if (!v || !(*v > 0.0) || !std::isfinite(*v)) return std::nullopt;
  return v;
}

/// "2^-k" for exact powers of two, otherwise %g.
inline std::string format_epsilon(double eps) {
  int exp = 0;
  if (std::frexp(eps, &exp) == 0.5) return "2^" + std::to_string(exp - 1);
  return detail::printf_string("%g", eps);
}

/// Parses "6..11" (or a single "6") into an inclusive range.
inline std::optional<std::pair<int, int>> parse_k_range(std::string_view text) {
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    const auto k = detail::parse_int(text);
    if (!k) return std::nullopt;
    return std::pair{*k, *k};
  }
  const auto lo = detail::parse_int(text.substr(0, dots));
  const auto hi = detail::parse_int(text.substr(dots + 2));
  if (!lo || !hi) return std::nullopt;
  return std::pair{*lo, *hi};
}

inline std::string format_error(double e) { return detail::printf_string("%.4e", e); }
inline std::string format_ord(const std::optional<double>& o) {
  return o ? detail::printf_string("%.2f", *o) : std::string("-");
}

// CSV ------------------------------------------------------------------------

inline void write_mesh_csv(std::ostream& out, const ShishkinMesh& mesh) {
  out << "index,x,h\n";
  const auto x = mesh.points();
  const auto h = mesh.steps();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << i << ',' << detail::printf_string("%.17g", x[i]) << ',';
    if (i > 0) out << detail::printf_string("%.17g", h[i - 1]);
    out << '\n';
  }
}

inline void write_solution_csv(std::ostream& out, const DiscreteSolution& sol, const Problem& problem) {
  const bool with_exact = problem.has_exact();
  out << (with_exact ? "x,y_numeric,y_exact\n" : "x,y_numeric\n");
  const auto x = sol.mesh.points();
  const auto xc = sol.mesh.complements();
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << detail::printf_string("%.17g", x[i]) << ',' << detail::printf_string("%.17g", sol.values[i]);
    if (with_exact) {
      out << ',' << detail::printf_string("%.17g", problem.exact(x[i], xc[i], sol.mesh.epsilon()));
    }
    out << '\n';
  }
}

inline void write_report_csv_header(std::ostream& out) { out << "problem,scheme,epsilon,N,E_N,Ord\n"; }

inline void write_report_csv_rows(std::ostream& out, const ConvergenceReport& report) {
  for (const auto& row : report.rows) {
    out << report.problem_name << ',' << scheme_name(report.scheme) << ',' << format_epsilon(report.epsilon) << ','
        << row.n << ',' << format_error(row.e_n) << ',' << format_ord(row.ord) << '\n';
  }
}

inline void write_report_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  write_report_csv_header(out);
  for (const auto& r : reports) write_report_csv_rows(out, r);
}

// Markdown -------------------------------------------------------------------

/// Groups reports three per block, one (E_N, Ord) column pair per eps, with
/// a closing row naming the eps of each pair.
inline void write_report_markdown(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  constexpr std::size_t kPerBlock = 3;
  for (std::size_t start = 0; start < reports.size(); start += kPerBlock) {
    const std::size_t stop = std::min(reports.size(), start + kPerBlock);
    std::set<int> ns;
    for (std::size_t r = start; r < stop; ++r)
      for (const auto& row : reports[r].rows) ns.insert(row.n);

    if (start > 0) out << '\n';
    out << "| N |";
    for (std::size_t r = start; r < stop; ++r) out << " E_N | Ord |";
    out << "\n|---|";
    for (std::size_t r = start; r < stop; ++r) out << "---|---|";
    out << '\n';
    for (int n : ns) {
      int k = 0;
      while ((1 << k) < n) ++k;
      out << "| " << ((1 << k) == n ? "2^" + std::to_string(k) : std::to_string(n)) << " |";
      for (std::size_t r = start; r < stop; ++r) {
        const ReportRow* found = nullptr;
        for (const auto& row : reports[r].rows)
          if (row.n == n) found = &row;
        if (found) {
          out << ' ' << format_error(found->e_n) << " | " << format_ord(found->ord) << " |";
        } else {
          out << "  |  |";
        }
      }
      out << '\n';
    }
    out << "| eps |";
    for (std::size_t r = start; r < stop; ++r) out << ' ' << format_epsilon(reports[r].epsilon) << " |  |";
    out << '\n';
  }
}

}  // namespace layerfit
