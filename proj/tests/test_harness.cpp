#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "peaqc/harness.hpp"

using namespace peaqc;

namespace {

const char* kComb = R"({
  "scheme": "comb",
  "environment": "vacuum",
  "encoding": {"d": 2, "m": 8, "f": "optimal"},
  "eta": [0.22984884706593015]
})";

std::string strip_timestamps(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    auto j = json::parse(line);
    j.erase("timestamp");
    out += j.dump() + "\n";
  }
  return out;
}

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "none";
}

}  // namespace

TEST_CASE("state strings") {
  CHECK(std::holds_alternative<Vacuum>(parse_state("vacuum")));
  CHECK(std::get<Fock>(parse_state("fock:3")).n == 3);
  auto c = std::get<Coherent>(parse_state("coherent:1.5:-0.5"));
  CHECK(c.alpha == cplx(1.5, -0.5));
  CHECK(std::get<Cat>(parse_state("cat:2:odd")).parity == 1);
  auto sc = std::get<SqueezedCat>(parse_state("squeezed_cat:1.5:1.4"));
  CHECK(sc.alpha == 1.5);
  CHECK(sc.r == 1.4);
  auto s = std::get<FockSuperposition>(parse_state("superposition:0=1,2=0.5/0.5"));
  REQUIRE(s.terms.size() == 2);
  CHECK(s.terms[1].second == cplx(0.5, 0.5));
  for (const char* bad : {"fock", "fock:-1", "fock:1.5", "cat:x", "squeezed_cat:1", "thermal:1", "superposition:1"})
    CHECK_THROWS_AS(parse_state(bad), ConfigError);
  for (const char* txt : {"vacuum", "fock:2", "coherent:1.5", "cat:2", "cat:2:odd", "squeezed_cat:1.5:1.4"})
    CHECK(describe(parse_state(txt)) == txt);
}

TEST_CASE("grids") {
  auto g = parse_grid("0.1:0.5:0.1");
  REQUIRE(g.size() == 5);
  CHECK(g.back() == doctest::Approx(0.5));
  CHECK(parse_grid("0.3,0.4").size() == 2);
  CHECK(parse_grid("0.2:4:0.05").size() == 77);
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
  CHECK_THROWS_AS(parse_grid("0.5:0.1:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a,b"), ConfigError);
}

TEST_CASE("config validation") {
  auto cfg = parse_config(kComb);
  CHECK(cfg.scheme == "comb");
  CHECK(cfg.etas.size() == 1);
  CHECK_FALSE(cfg.seed.has_value());

  CHECK(error_field(R"({"scheme": "comb", "environment": "vacuum", "eta": []})") == "/eta");
  CHECK(error_field(R"({"scheme": "nope", "environment": "vacuum", "eta": [0.1]})") == "/scheme");
  CHECK(error_field(R"({"scheme": "comb", "environment": "vacuum", "eta": [1.5]})") == "/eta/0");
  CHECK(error_field(R"({"scheme": "comb", "environment": "vacuum", "eta": [0.1], "extra": 1})") == "/extra");
  CHECK(error_field(R"({"scheme": "optimizer", "environment": "fock:1", "eta": [0.3]})") == "/seed");
  CHECK(error_field(R"({"scheme": "comb", "environment": "fock:x", "eta": [0.1]})") == "/environment");
  CHECK(error_field(R"({"scheme": "cat", "environment": "cat:2", "encoding": {"m": 2}, "eta": [0.1]})") ==
        "/encoding/m");
  CHECK(error_line("{\n  \"scheme\": \"comb\",\n  \"environment\": \"vacuum\",\n  \"eta\": []\n}") == 4);
  CHECK(error_line("{\n  \"scheme\": \"comb\",\n  \"eta\": [0.2,\n") == 4);
  CHECK(error_line("{\n  \"scheme\": \"comb\"\n  \"eta\": [0.2]\n}") == 3);
}

TEST_CASE("config hash") {
  auto a = parse_config(kComb);
  auto b = parse_config(R"({"eta": [0.22984884706593015], "encoding": {"m": 8, "f": "optimal", "d": 2},
                            "environment": "vacuum", "scheme": "comb", "output": "elsewhere.jsonl"})");
  CHECK(config_hash(a).size() == 16);
  CHECK(config_hash(a) == config_hash(b));
  b.etas.push_back(0.3);
  normalize(b);
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("records round trip") {
  SweepRecord r{"comb", 0.25, 0.97, 0.93, 0.95, json{{"trace_deficit", 1e-15}}, "0123456789abcdef",
                json{{"utc", "x"}}};
  auto back = record_from_json(json::parse(to_json(r).dump()));
  CHECK(back == r);
  CHECK(back.timestamp == r.timestamp);
  r.q1.reset();
  CHECK(record_from_json(to_json(r)) == r);
  auto t = r;
  t.timestamp = json{{"utc", "y"}};
  CHECK(t == r);
}

TEST_CASE("comb run matches the closed form") {
  auto cfg = parse_config(kComb);
  auto rec = evaluate_point(cfg, cfg.etas[0]);
  CHECK(std::abs(rec.fidelity - std::pow(std::cos(M_PI / 18), 2)) < 1e-6);
  CHECK(rec.config_hash == config_hash(cfg));
  CHECK(rec.timestamp.contains("wall_time_s"));
}

TEST_CASE("repeat runs are identical apart from timestamps") {
  auto cfg = parse_config(R"({"scheme": "cat", "environment": "cat:1.5", "encoding": {"alpha": 1.2},
                              "eta": "0.2:0.4:0.1"})");
  std::ostringstream a, b, c;
  write_run(cfg, a, 1);
  write_run(cfg, b, 3);
  CHECK(strip_timestamps(a.str()) == strip_timestamps(b.str()));
  std::istringstream lines(a.str());
  int n = 0;
  for (std::string line; std::getline(lines, line);) {
    auto j = json::parse(line);
    CHECK(j["config_hash"] == config_hash(cfg));
    if (n == 0) CHECK(j["version"] == kVersion);
    ++n;
  }
  CHECK(n == 4);
  write_sweep_csv(cfg, c, 2);
  CHECK(c.str().find("# config_hash " + config_hash(cfg)) != std::string::npos);
  CHECK(c.str().find("scheme,eta,fidelity,ic,q1,trace_deficit\n") != std::string::npos);
}

TEST_CASE("sweep records arrive in grid order") {
  auto cfg = parse_config(R"({"scheme": "comb", "environment": "vacuum", "encoding": {"m": 4},
                              "eta": [0.4, 0.1, 0.3, 0.2]})");
  std::vector<double> seen;
  run_sweep(cfg, 3, [&](const SweepRecord& r) { seen.push_back(r.eta); });
  CHECK(seen == cfg.etas);
}

TEST_CASE("evaluation errors propagate") {
  auto cfg = parse_config(R"({"scheme": "hex_gkp", "environment": "cat:2", "eta": [0.3]})");
  CHECK_THROWS_AS(evaluate_point(cfg, 0.3), ConfigError);
  auto bad = parse_config(R"({"scheme": "comb", "environment": "vacuum", "encoding": {"m": 4}, "eta": [0.2, 0.9]})");
  std::vector<double> seen;
  CHECK_THROWS(run_sweep(bad, 2, [&](const SweepRecord& r) { seen.push_back(r.eta); }));
  CHECK(seen.size() <= 1);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  setenv("PEAQC_WORKERS", "5", 1);
  CHECK(resolve_workers(0) == 5);
  setenv("PEAQC_WORKERS", "junk", 1);
  CHECK(resolve_workers(0) >= 1);
  unsetenv("PEAQC_WORKERS");
}
