#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "unitfree/chart.hpp"
#include "unitfree/expr.hpp"
#include "unitfree/jacobi.hpp"
#include "unitfree/sampling.hpp"

namespace unitfree {

/// A Lichnerowicz structure plus named observables, read from JSON:
///
///   {
///     "chart": {"name": "contact3", "coords": ["q", "p", "z"]},
///     "pi": {"0,1": "-1", "1,2": "p"},
///     "r": ["0", "0", "-1"],
///     "unit_conversions": ["1 + q^2"],
///     "hamiltonians": {"oscillator": "(q^2 + p^2)/2"},
///     "constraints": {"z0": ["z"]},
///     "sample": {"seed": 0, "count": 100, "box": {"q": [-1, 1]}}
///   }
///
/// Only "chart", "pi" and "r" are required. pi keys are "i,j" with i < j.
struct SystemDescription {
  std::string source;
  LichnerowiczStructure structure;
  std::vector<Expr> unit_conversions;
  std::map<std::string, Expr> hamiltonians;
  std::map<std::string, std::vector<Expr>> constraints;
  SampleSpec sample;

  const Chart& chart() const noexcept { return structure.chart(); }
};

/// Throws ConfigError on malformed JSON or fields, SyntaxError / UnknownFunction
/// / ChartMismatch on bad expressions.
SystemDescription parse_system(const std::string& json_text, const std::string& source = "<string>");
SystemDescription load_system(const std::filesystem::path& path);

/// JSON array of points, each an array of values in chart order or an object
/// coordinate -> value.
std::vector<Point> parse_points(const std::string& json_text, const Chart& chart);
std::vector<Point> load_points(const std::filesystem::path& path, const Chart& chart);

}  // namespace unitfree
