#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unitfree/chart.hpp"

namespace unitfree {

/// Worst residual of one identity (or one triple, one constraint pair...) over a sample set.
struct ResidualEntry {
  std::string label;
  double worst = 0.0;
  /// Signed value of the checked quantity at the witness, when that is meaningful.
  double witness_value = 0.0;
  std::optional<Point> witness;
  bool pass = true;
};

/// Outcome of a sample-based verification.
struct CheckReport {
  std::string name;
  double tol = 0.0;
  bool pass = true;
  double worst = 0.0;
  std::optional<Point> witness;
  std::string witness_label;
  double witness_value = 0.0;
  std::size_t points = 0;
  std::optional<std::uint64_t> seed;
  std::vector<ResidualEntry> entries;
  /// Additional named figures, e.g. "min_abs_det".
  std::map<std::string, double> figures;

  /// Folds an entry into the summary (max residual, witness, pass flag).
  void add(ResidualEntry entry);
};

/// Running max of |residual| over points, remembering where it occurred.
class WorstTracker {
 public:
  void update(double residual, double signed_value, const Point& at);

  double worst() const noexcept { return worst_; }
  double signed_value() const noexcept { return value_; }
  const std::optional<Point>& witness() const noexcept { return witness_; }

  ResidualEntry entry(std::string label, double tol) const;

 private:
  double worst_ = 0.0;
  double value_ = 0.0;
  std::optional<Point> witness_;
};

}  // namespace unitfree
