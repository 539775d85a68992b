#include "unitfree/system.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "unitfree/error.hpp"

namespace unitfree {

using json = nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& source) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(source + ": missing field '" + key + "'");
  return *it;
}

std::string as_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + " must be a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

Expr expr_on(const json& j, const Chart& chart, const std::string& what) {
  Expr e = parse(as_string(j, what));
  require_chart(e, chart);
  return e;
}

std::size_t parse_index(std::string_view s, const std::string& key) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || s.empty()) throw ConfigError("bad pi key '" + key + "'");
  return v;
}

SystemDescription parse_system_doc(const std::string& json_text, const std::string& source) {
  json doc = parse_json(json_text, source);
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");

  const json& jc = field(doc, "chart", source);
  if (!jc.is_object()) throw ConfigError(source + ": chart must be an object");
  std::vector<std::string> coords;
  const json& jcoords = field(jc, "coords", source);
  if (!jcoords.is_array()) throw ConfigError(source + ": chart.coords must be an array");
  for (const auto& c : jcoords) coords.push_back(as_string(c, "coordinate name"));
  std::string name = jc.contains("name") ? as_string(jc["name"], "chart.name") : "M";
  Chart chart(name, coords);
  const std::size_t n = chart.dim();

  BivectorField pi(chart);
  const json& jpi = field(doc, "pi", source);
  if (!jpi.is_object()) throw ConfigError(source + ": pi must be an object of \"i,j\" keys");
  for (const auto& [key, value] : jpi.items()) {
    auto comma = key.find(',');
    if (comma == std::string::npos) throw ConfigError(source + ": bad pi key '" + key + "'");
    std::size_t i = parse_index(std::string_view(key).substr(0, comma), key);
    std::size_t j = parse_index(std::string_view(key).substr(comma + 1), key);
    if (i >= n || j >= n) throw ConfigError(source + ": pi index out of range in '" + key + "'");
    if (i >= j) throw ConfigError(source + ": pi keys must have i < j, got '" + key + "'");
    pi = pi.with(i, j, expr_on(value, chart, "pi[" + key + "]"));
  }

  const json& jr = field(doc, "r", source);
  if (!jr.is_array() || jr.size() != n)
    throw ConfigError(source + ": r must be an array of " + std::to_string(n) + " expressions");
  std::vector<Expr> r;
  for (const auto& e : jr) r.push_back(expr_on(e, chart, "r component"));

  SystemDescription sys{source, LichnerowiczStructure(pi, VectorField(chart, r)), {}, {}, {}, {}};

  if (doc.contains("unit_conversions")) {
    for (const auto& e : doc["unit_conversions"]) sys.unit_conversions.push_back(expr_on(e, chart, "unit conversion"));
  }
  if (doc.contains("hamiltonians")) {
    if (!doc["hamiltonians"].is_object()) throw ConfigError(source + ": hamiltonians must be an object");
    for (const auto& [k, v] : doc["hamiltonians"].items()) sys.hamiltonians.emplace(k, expr_on(v, chart, "hamiltonian " + k));
  }
  if (doc.contains("constraints")) {
    if (!doc["constraints"].is_object()) throw ConfigError(source + ": constraints must be an object");
    for (const auto& [k, v] : doc["constraints"].items()) {
      if (!v.is_array() || v.empty()) throw ConfigError(source + ": constraint set '" + k + "' must be a nonempty array");
      std::vector<Expr> list;
      for (const auto& e : v) list.push_back(expr_on(e, chart, "constraint " + k));
      sys.constraints.emplace(k, std::move(list));
    }
  }
  if (doc.contains("sample")) {
    const json& js = doc["sample"];
    if (js.contains("seed")) sys.sample.seed = js["seed"].get<std::uint64_t>();
    if (js.contains("count")) sys.sample.count = js["count"].get<std::size_t>();
    if (js.contains("box")) {
      for (const auto& [k, v] : js["box"].items()) {
        if (!chart.contains(k)) throw ConfigError(source + ": sample box names unknown coordinate '" + k + "'");
        if (!v.is_array() || v.size() != 2) throw ConfigError(source + ": box for '" + k + "' must be [low, high]");
        double lo = as_number(v[0], "box bound"), hi = as_number(v[1], "box bound");
        if (!(lo < hi)) throw ConfigError(source + ": empty box for '" + k + "'");
        sys.sample.box[k] = {lo, hi};
      }
    }
  }
  return sys;
}

}  // namespace

SystemDescription parse_system(const std::string& json_text, const std::string& source) {
  try {
    return parse_system_doc(json_text, source);
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

SystemDescription load_system(const std::filesystem::path& path) {
  return parse_system(read_file(path), path.string());
}

std::vector<Point> parse_points(const std::string& json_text, const Chart& chart) {
  json doc = parse_json(json_text, "points");
  if (!doc.is_array()) throw ConfigError("points file must hold a JSON array");
  std::vector<Point> pts;
  for (const auto& jp : doc) {
    if (jp.is_array()) {
      if (jp.size() != chart.dim())
        throw ConfigError("point has " + std::to_string(jp.size()) + " values, chart has " + std::to_string(chart.dim()));
      std::vector<double> v;
      for (const auto& x : jp) v.push_back(as_number(x, "coordinate value"));
      pts.emplace_back(chart, std::move(v));
    } else if (jp.is_object()) {
      std::map<std::string, double> m;
      for (const auto& [k, x] : jp.items()) m[k] = as_number(x, "coordinate value");
      pts.emplace_back(chart, m);
    } else {
      throw ConfigError("each point must be an array or an object");
    }
  }
  if (pts.empty()) throw ConfigError("points file is empty");
  return pts;
}

std::vector<Point> load_points(const std::filesystem::path& path, const Chart& chart) {
  return parse_points(read_file(path), chart);
}

}  // namespace unitfree
