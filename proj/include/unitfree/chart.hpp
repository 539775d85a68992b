#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace unitfree {

/// Named coordinate system of finite dimension. Cheap to copy; immutable.
class Chart {
 public:
  Chart(std::string name, std::vector<std::string> coords);

  const std::string& name() const noexcept { return data_->name; }
  const std::vector<std::string>& coords() const noexcept { return data_->coords; }
  std::size_t dim() const noexcept { return data_->coords.size(); }
  const std::string& coord(std::size_t i) const { return data_->coords.at(i); }

  std::optional<std::size_t> index_of(std::string_view coord) const noexcept;
  bool contains(std::string_view coord) const noexcept { return index_of(coord).has_value(); }

  friend bool operator==(const Chart& a, const Chart& b) noexcept {
    return a.data_ == b.data_ || (a.name() == b.name() && a.coords() == b.coords());
  }

 private:
  struct Data {
    std::string name;
    std::vector<std::string> coords;
  };
  std::shared_ptr<const Data> data_;
};

/// A point of a chart: one value per coordinate, in chart order.
class Point {
 public:
  Point(Chart chart, std::vector<double> values);
  /// Builds from a name -> value mapping which must cover exactly the chart's coordinates.
  Point(Chart chart, const std::map<std::string, double>& values);

  const Chart& chart() const noexcept { return chart_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_.at(i); }
  double operator[](std::string_view coord) const;

 private:
  Chart chart_;
  std::vector<double> values_;
};

std::string to_string(const Point& p);

}  // namespace unitfree
