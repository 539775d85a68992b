#include "unitfree/report.hpp"

#include <cmath>

namespace unitfree {

void CheckReport::add(ResidualEntry entry) {
  if (!entry.pass) pass = false;
  bool take = entries.empty() || std::isnan(entry.worst) || (!std::isnan(worst) && entry.worst > worst);
  if (take) {
    worst = entry.worst;
    witness = entry.witness;
    witness_label = entry.label;
    witness_value = entry.witness_value;
  }
  entries.push_back(std::move(entry));
}

void WorstTracker::update(double residual, double signed_value, const Point& at) {
  // NaN residuals always win so that they surface as failures.
  if (!witness_ || residual > worst_ || std::isnan(residual)) {
    if (witness_ && std::isnan(worst_)) return;
    worst_ = residual;
    value_ = signed_value;
    witness_ = at;
  }
}

ResidualEntry WorstTracker::entry(std::string label, double tol) const {
  ResidualEntry e;
  e.label = std::move(label);
  e.worst = worst_;
  e.witness_value = value_;
  e.witness = witness_;
  e.pass = !std::isnan(worst_) && worst_ <= tol;
  return e;
}

}  // namespace unitfree
