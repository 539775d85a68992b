#include "unitfree/chart.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>

#include "unitfree/error.hpp"

namespace unitfree {

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  auto head = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(head) || head == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

bool is_reserved(const std::string& s) {
  return s == "sin" || s == "cos" || s == "exp" || s == "ln" || s == "sqrt";
}

}  // namespace

Chart::Chart(std::string name, std::vector<std::string> coords) {
  if (coords.empty()) throw ConfigError("chart '" + name + "' must have at least one coordinate");
  std::set<std::string> seen;
  for (const auto& c : coords) {
    if (!is_identifier(c)) throw ConfigError("invalid coordinate name '" + c + "'");
    if (is_reserved(c)) throw ConfigError("coordinate name '" + c + "' is a reserved function name");
    if (!seen.insert(c).second) throw ConfigError("duplicate coordinate name '" + c + "'");
  }
  data_ = std::make_shared<const Data>(Data{std::move(name), std::move(coords)});
}

std::optional<std::size_t> Chart::index_of(std::string_view coord) const noexcept {
  const auto& cs = data_->coords;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (cs[i] == coord) return i;
  }
  return std::nullopt;
}

Point::Point(Chart chart, std::vector<double> values) : chart_(std::move(chart)), values_(std::move(values)) {
  if (values_.size() != chart_.dim()) {
    throw ChartMismatch("point has " + std::to_string(values_.size()) + " values but chart '" + chart_.name() +
                        "' has dimension " + std::to_string(chart_.dim()));
  }
}

Point::Point(Chart chart, const std::map<std::string, double>& values) : chart_(std::move(chart)) {
  if (values.size() != chart_.dim()) throw ChartMismatch("point does not match the coordinates of '" + chart_.name() + "'");
  values_.reserve(chart_.dim());
  for (const auto& c : chart_.coords()) {
    auto it = values.find(c);
    if (it == values.end()) throw ChartMismatch("point is missing coordinate '" + c + "'");
    values_.push_back(it->second);
  }
}

double Point::operator[](std::string_view coord) const {
  auto i = chart_.index_of(coord);
  if (!i) throw ChartMismatch("coordinate '" + std::string(coord) + "' not in chart '" + chart_.name() + "'");
  return values_[*i];
}

std::string to_string(const Point& p) {
  std::string out = "(";
  char buf[32];
  for (std::size_t i = 0; i < p.chart().dim(); ++i) {
    if (i) out += ", ";
    std::snprintf(buf, sizeof buf, "%.17g", p[i]);
    out += p.chart().coord(i) + "=" + buf;
  }
  return out + ")";
}

}  // namespace unitfree
