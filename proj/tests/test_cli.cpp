#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "unitfree/error.hpp"
#include "unitfree/system.hpp"

using namespace unitfree;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kData = UNITFREE_DATA_DIR;

std::string sys(const char* name) { return (kData / "systems" / name).string(); }
std::string pts(const char* name) { return (kData / "points" / name).string(); }

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "unitfree_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

fs::path write_file(const std::string& name, const std::string& text) {
  auto p = scratch(name);
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> read_csv(const std::string& text, std::string& header) {
  std::istringstream in(text);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<double> row;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* kContact = R"({"chart": {"name": "c", "coords": ["q", "p", "z"]}, "pi": {"0,1": "-1", "1,2": "p"},
  "r": ["0", "0", "-1"], "hamiltonians": {"blowup": "z^2"}})";

}  // namespace

TEST_CASE("system descriptions load") {
  auto s = load_system(sys("contact3.json"));
  CHECK(s.chart().coords() == std::vector<std::string>{"q", "p", "z"});
  CHECK(simplify(s.structure.pi().at(0, 1)) == Expr(-1.0));
  CHECK(simplify(s.structure.pi().at(2, 1)) == simplify(parse("-p")));
  CHECK(simplify(s.structure.r()[2]) == Expr(-1.0));
  CHECK(s.hamiltonians.at("damped") == parse("(q^2 + p^2)/2 + 0.5*z"));
  CHECK(s.constraints.at("qp").size() == 2);
  CHECK(s.unit_conversions.size() == 2);

  auto w = parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {}, "r": ["0", "x"],
                            "sample": {"seed": 4, "count": 7, "box": {"x": [0, 1]}}})");
  CHECK(w.sample.seed == 4);
  CHECK(w.sample.count == 7);
  CHECK(w.sample.box.at("x") == std::pair{0.0, 1.0});

  CHECK_THROWS_AS(parse_system("{"), ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x"]}, "r": ["0"]})"), ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {"1,0": "1"}, "r": ["0", "0"]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {"0,2": "1"}, "r": ["0", "0"]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {"a,b": "1"}, "r": ["0", "0"]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {}, "r": ["0"]})"), ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {"0,1": "(x"}, "r": ["0", "0"]})"),
                  SyntaxError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "y"]}, "pi": {"0,1": "w"}, "r": ["0", "0"]})"),
                  ChartMismatch);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x", "x"]}, "pi": {}, "r": ["0", "0"]})"), ConfigError);
  CHECK_THROWS_AS(parse_system(R"({"chart": {"coords": ["x"]}, "pi": {}, "r": ["0"], "sample": {"seed": "a"}})"),
                  ConfigError);

  Chart c("c", {"q", "p", "z"});
  auto p = parse_points(R"([[1, 2, 3], {"z": 0, "q": 1, "p": 2}])", c);
  CHECK(p[1]["z"] == 0.0);
  CHECK_THROWS_AS(parse_points("[[1, 2]]", c), ConfigError);
  CHECK_THROWS_AS(parse_points("[]", c), ConfigError);
  CHECK_THROWS_AS(parse_points(R"([{"q": 1}])", c), ChartMismatch);
}

TEST_CASE("check") {
  for (const char* f : {"contact3.json", "contact5.json", "poisson2.json", "damped_oscillator.json", "poisson_w.json"}) {
    CAPTURE(f);
    auto r = run({"check", sys(f)});
    CHECK(r.code == 0);
    CHECK(r.out.ends_with("PASS\n"));
  }

  // J(x, y, w) = -w for pi = dx ^ dy, R = w dw.
  auto bad = run({"check", sys("nonintegrable.json"), "--json"});
  CHECK(bad.code == 1);
  auto doc = json::parse(bad.out);
  CHECK_FALSE(doc["pass"].get<bool>());
  const auto& integ = doc["checks"][0];
  CHECK(integ["name"] == "integrability");
  CHECK_FALSE(integ["pass"].get<bool>());
  double w = integ["witness"]["w"].get<double>();
  CHECK(std::abs(integ["witness_value"].get<double>() + w) <= 1e-12);
  CHECK(std::abs(w) >= 0.1);

  auto pw = json::parse(run({"check", sys("poisson_w.json"), "--json"}).out);
  CHECK(pw["pass"].get<bool>());
  CHECK_FALSE(pw["nondegenerate"].get<bool>());
  auto c3 = json::parse(run({"check", sys("contact3.json"), "--json", "--points", "20", "--seed", "3"}).out);
  CHECK(c3["nondegenerate"].get<bool>());
  CHECK(c3["points"] == 20);
  CHECK(c3["seed"] == 3);

  CHECK(run({"check", (kData / "missing.json").string()}).code == 2);
  CHECK(run({"check", write_file("broken.json", "{\"chart\": ").string()}).code == 2);
  CHECK(run({"check", write_file("badexpr.json", R"j({"chart": {"coords": ["x"]}, "pi": {}, "r": ["foo(x)"]})j")
                          .string()})
            .code == 2);
  CHECK(run({"check", sys("contact3.json"), "--tol", "-1"}).code == 2);
  CHECK(run({"check"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("flow") {
  const std::string two_pi = "6.283185307179586";
  auto csv = scratch("osc.csv");
  auto r = run({"flow", sys("contact3.json"), "--hamiltonian", "oscillator", "--x0", "1,0,0", "--t-end", two_pi,
                "--out", csv.string()});
  CHECK(r.code == 0);
  std::string header;
  auto rows = read_csv(slurp(csv), header);
  CHECK(header == "t,q,p,z,h,residual");
  REQUIRE(rows.size() == 6285);
  const auto& last = rows.back();
  CHECK(last[0] == 2 * std::numbers::pi);
  CHECK(std::abs(last[1] - 1.0) <= 1e-6);
  CHECK(std::abs(last[2]) <= 1e-6);
  CHECK(std::abs(last[3] + std::sin(2 * last[0]) / 4) <= 1e-6);
  CHECK(r.out.starts_with("max residual "));

  // Damped: h(t) = h0 exp(-t/2).
  r = run({"flow", sys("damped_oscillator.json"), "--x0", "1,0,0", "--t-end", "10"});
  CHECK(r.code == 0);
  rows = read_csv(r.out, header);
  CHECK(std::abs(rows.back()[4] - 0.5 * std::exp(-5.0)) <= 1e-5);
  CHECK(r.err.starts_with("max residual "));

  // q'' + q'/2 + q = 0 from q = 1, q' = 0. Adaptive steps are long, so the
  // difference stencil only resolves the residual to about 1e-5.
  auto js = run({"flow", sys("damped_oscillator.json"), "--x0", "1,0,0", "--t-end", "1", "--method", "rk45",
                 "--out", scratch("d.csv").string(), "--json", "--tol", "1e-4"});
  CHECK(js.code == 0);
  auto doc = json::parse(js.out);
  CHECK(doc["max_residual"].get<double>() <= 1e-4);
  const double om = std::sqrt(15.0) / 4;
  CHECK(std::abs(doc["final_state"]["q"].get<double>() - std::exp(-0.25) * (std::cos(om) + std::sin(om) / (4 * om))) <=
        1e-8);

  // A tolerance below what the difference stencil resolves fails honestly.
  CHECK(run({"flow", sys("damped_oscillator.json"), "--x0", "1,0,0", "--tol", "1e-15"}).code == 1);

  auto blow = write_file("blow.json", kContact).string();
  CHECK(run({"flow", blow, "--x0", "0,0,-1", "--t-end", "2"}).code == 1);
  CHECK(run({"flow", blow, "--x0", "0,0,-1", "--t-end", "2", "--method", "rk45"}).code == 1);

  CHECK(run({"flow", sys("contact3.json"), "--hamiltonian", "oscillator", "--x0", "1,0"}).code == 2);
  CHECK(run({"flow", sys("contact3.json"), "--hamiltonian", "nope", "--x0", "1,0,0"}).code == 2);
  CHECK(run({"flow", sys("contact3.json"), "--x0", "1,0,0"}).code == 2);
  CHECK(run({"flow", sys("damped_oscillator.json"), "--x0", "1,0,0", "--method", "euler"}).code == 2);
  CHECK(run({"flow", sys("damped_oscillator.json"), "--x0", "1,0,0", "--dt", "0"}).code == 2);
  CHECK(run({"flow", sys("damped_oscillator.json"), "--x0", "1,0,0", "--t-end", "1e-3"}).code == 2);
  CHECK(run({"flow", sys("damped_oscillator.json"), "--x0", "1,a,0"}).code == 2);
  CHECK(run({"flow", sys("damped_oscillator.json")}).code == 2);
}

TEST_CASE("product") {
  auto r = run({"product", sys("contact3.json"), sys("contact3.json")});
  CHECK(r.code == 0);
  CHECK(r.out.find("R12 != 0") != std::string::npos);

  auto pp = run({"product", sys("poisson2.json"), sys("poisson2.json"), "--json"});
  CHECK(pp.code == 0);
  auto doc = json::parse(pp.out);
  CHECK(doc["R12_zero"].get<bool>());
  CHECK(doc["report"]["figures"]["max_abs_R12"] == 0.0);
  CHECK(doc["coords"] == std::vector<std::string>{"q_1", "p_1", "q_2", "p_2", "b"});

  auto bad = run({"product", sys("contact3.json"), sys("contact3.json"), "--corrupt", "--json"});
  CHECK(bad.code == 1);
  auto bd = json::parse(bad.out);
  bool ratio_failed = false;
  for (const auto& e : bd["report"]["entries"]) {
    if (e["label"] == "X_{P2*s2}[c/a] = {s2, c}/a") ratio_failed = !e["pass"].get<bool>();
  }
  CHECK(ratio_failed);

  CHECK(run({"product", sys("nonintegrable.json"), sys("contact3.json")}).code == 1);
  CHECK(run({"product", sys("contact3.json"), (kData / "missing.json").string()}).code == 2);
  CHECK(run({"product", sys("contact3.json")}).code == 2);
}

TEST_CASE("coiso") {
  auto ok = run({"coiso", sys("contact3.json"), "--constraints", "z0", "--surface-points", pts("contact3_z0.json")});
  CHECK(ok.code == 0);

  auto fail = run({"coiso", sys("contact3.json"), "--constraints", "qp", "--surface-points", pts("contact3_qp.json"),
                   "--json"});
  CHECK(fail.code == 1);
  auto doc = json::parse(fail.out);
  CHECK(doc["report"]["witness_label"] == "X_{q}[p]");
  CHECK(std::abs(doc["report"]["witness_value"].get<double>() + 1.0) <= 1e-12);
  CHECK(doc["report"]["figures"]["bracket_cross_check_pass"] == 0.0);

  CHECK(run({"coiso", sys("poisson_w.json"), "--constraints", "w0", "--surface-points", pts("poisson_w_w0.json")})
            .code == 0);
  CHECK(run({"coiso", sys("contact3.json"), "--constraints", "qp", "--surface-points",
             pts("contact3_off_surface.json")})
            .code == 2);
  CHECK(run({"coiso", sys("contact3.json"), "--constraints", "nope", "--surface-points", pts("contact3_z0.json")})
            .code == 2);
  CHECK(run({"coiso", sys("contact3.json"), "--constraints", "z0", "--surface-points", pts("missing.json")}).code ==
        2);
  CHECK(run({"coiso", sys("poisson2.json"), "--constraints", "z0", "--surface-points", pts("contact3_z0.json")})
            .code == 2);
}

TEST_CASE("output is deterministic") {
  auto a = run({"check", sys("contact5.json"), "--json", "--seed", "11"});
  auto b = run({"check", sys("contact5.json"), "--json", "--seed", "11"});
  CHECK(a.out == b.out);
  auto c = run({"check", sys("contact5.json"), "--json", "--seed", "12"});
  CHECK(a.out != c.out);

  auto p1 = run({"product", sys("contact3.json"), sys("poisson2.json"), "--json", "--seed", "5"});
  auto p2 = run({"product", sys("contact3.json"), sys("poisson2.json"), "--json", "--seed", "5"});
  CHECK(p1.out == p2.out);

  for (const char* m : {"rk4", "rk45"}) {
    auto f1 = run({"flow", sys("damped_oscillator.json"), "--x0", "0.3,0.2,0.1", "--method", m});
    auto f2 = run({"flow", sys("damped_oscillator.json"), "--x0", "0.3,0.2,0.1", "--method", m});
    CHECK(f1.out == f2.out);
    CHECK(f1.err == f2.err);
  }
}
