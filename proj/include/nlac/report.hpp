#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlac/numerics.hpp"

namespace nlac {

inline constexpr int kReportSchemaVersion = 1;

struct SweepRow {
  double epsilon = 0.0;
  double value = 0.0;                   // the measured quantity
  std::map<std::string, double> extra;  // further per-member columns
};

struct Criterion {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

/// Outcome of one ε-sweep: rows sorted by ε descending, a log-log fit when at
/// least three finite rows exist, and pass/fail per criterion.
struct ExperimentReport {
  std::string study;
  std::string quantity;  // column name of SweepRow::value
  std::string abscissa;  // what the fit regresses against
  std::string config_hash;
  std::vector<SweepRow> sweep;
  std::optional<LineFit> fit;
  std::vector<Criterion> criteria;
  std::map<std::string, double> constants;
  std::vector<std::string> notes;

  bool passed() const;
  /// Adds a criterion that passes when lo <= value <= hi.
  void check(const std::string& name, double value, double lo, double hi);
  void sort_sweep();

  nlohmann::json to_json() const;
  /// One row per sweep member: epsilon, quantity, then the extra columns in
  /// key order (the union over all rows; missing cells are left empty).
  void write_csv(std::ostream& out) const;
};

/// Least-squares line through (log x, log y); empty with fewer than three points.
std::optional<LineFit> fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// First 16 hex digits of the SHA-256 of the compact JSON dump (keys sorted).
std::string config_hash(const nlohmann::json& canonical);

}  // namespace nlac
