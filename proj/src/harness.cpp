#include "peaqc/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "peaqc/comb.hpp"
#include "peaqc/decoders.hpp"
#include "peaqc/highfock.hpp"
#include "peaqc/metrics.hpp"
#include "peaqc/optimizer.hpp"
#include "peaqc/phase_space.hpp"

namespace peaqc {

const char* const kVersion = PEAQC_VERSION;

ConfigError::ConfigError(const std::string& msg, std::string field, int line)
    : Error(line > 0 ? fmt::format("line {}: {}{}", line, field.empty() ? "" : field + ": ", msg)
                     : (field.empty() ? msg : field + ": " + msg)),
      field_(std::move(field)),
      line_(line) {}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& field) {
  try {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("'{}' is not a number", s), field);
  }
}

int to_int(const std::string& s, const std::string& field) {
  const double v = to_double(s, field);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(fmt::format("'{}' is not an integer", s), field);
  return static_cast<int>(v);
}

}  // namespace

StateSpec parse_state(const std::string& text) {
  const auto parts = split(text, ':');
  const std::string& kind = parts.empty() ? text : parts[0];
  auto need = [&](size_t lo, size_t hi) {
    if (parts.size() < lo || parts.size() > hi) throw ConfigError(fmt::format("malformed state '{}'", text), "environment");
  };
  const std::string f = "environment";
  if (kind == "vacuum") {
    need(1, 1);
    return Vacuum{};
  }
  if (kind == "fock") {
    need(2, 2);
    const int n = to_int(parts[1], f);
    if (n < 0) throw ConfigError("photon number must be non-negative", f);
    return Fock{n};
  }
  if (kind == "coherent") {
    need(2, 3);
    return Coherent{cplx(to_double(parts[1], f), parts.size() == 3 ? to_double(parts[2], f) : 0.0)};
  }
  if (kind == "cat") {
    need(2, 3);
    int parity = 0;
    if (parts.size() == 3) {
      if (parts[2] == "odd") parity = 1;
      else if (parts[2] != "even") throw ConfigError("cat parity must be even or odd", f);
    }
    return Cat{to_double(parts[1], f), parity};
  }
  if (kind == "squeezed_cat") {
    need(3, 3);
    return SqueezedCat{to_double(parts[1], f), to_double(parts[2], f)};
  }
  if (kind == "superposition") {
    need(2, 2);
    FockSuperposition s;
    for (const auto& term : split(parts[1], ',')) {
      const auto kv = split(term, '=');
      if (kv.size() != 2) throw ConfigError(fmt::format("malformed term '{}'", term), f);
      const auto c = split(kv[1], '/');
      if (c.empty() || c.size() > 2) throw ConfigError(fmt::format("malformed amplitude '{}'", kv[1]), f);
      s.terms.push_back({to_int(kv[0], f), cplx(to_double(c[0], f), c.size() == 2 ? to_double(c[1], f) : 0.0)});
    }
    return s;
  }
  throw ConfigError(fmt::format("unknown state kind '{}'", kind), f);
}

StateSpec state_from_json(const json& j, const std::string& field) {
  if (!j.is_string()) throw ConfigError("expected a state string such as \"fock:1\"", field);
  try {
    return parse_state(j.get<std::string>());
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), field);
  }
}

std::string describe(const StateSpec& s) {
  struct V {
    std::string operator()(const Vacuum&) const { return "vacuum"; }
    std::string operator()(const Fock& f) const { return fmt::format("fock:{}", f.n); }
    std::string operator()(const Coherent& c) const {
      return c.alpha.imag() == 0 ? fmt::format("coherent:{}", c.alpha.real())
                                 : fmt::format("coherent:{}:{}", c.alpha.real(), c.alpha.imag());
    }
    std::string operator()(const Cat& c) const { return fmt::format("cat:{}{}", c.alpha, c.parity ? ":odd" : ""); }
    std::string operator()(const SqueezedCat& c) const { return fmt::format("squeezed_cat:{}:{}", c.alpha, c.r); }
    std::string operator()(const Comb& c) const { return fmt::format("comb:{}:{}", c.f.size(), c.spacing); }
    std::string operator()(const ApproxGkp& g) const { return fmt::format("gkp:{}:{}", g.delta, g.logical); }
    std::string operator()(const FockSuperposition& s) const {
      std::string out = "superposition:";
      for (size_t i = 0; i < s.terms.size(); ++i) {
        const auto& [n, c] = s.terms[i];
        out += fmt::format("{}{}={}", i ? "," : "", n, c.real());
        if (c.imag() != 0) out += fmt::format("/{}", c.imag());
      }
      return out;
    }
  };
  return std::visit(V{}, s);
}

std::vector<double> parse_grid(const std::string& text, const std::string& field) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    const auto p = split(text, ':');
    if (p.size() != 3) throw ConfigError(fmt::format("grid '{}' must be start:stop:step", text), field);
    const double a = to_double(p[0], field), b = to_double(p[1], field), s = to_double(p[2], field);
    if (!(s > 0)) throw ConfigError("grid step must be positive", field);
    if (b < a) throw ConfigError("grid is empty", field);
    const long n = static_cast<long>(std::floor((b - a) / s + 1e-9)) + 1;
    if (n > 1000000) throw ConfigError("grid is too large", field);
    for (long i = 0; i < n; ++i) out.push_back(std::round((a + s * i) * 1e12) / 1e12);
  } else {
    for (const auto& t : split(text, ','))
      if (!t.empty()) out.push_back(to_double(t, field));
  }
  if (out.empty()) throw ConfigError("grid is empty", field);
  return out;
}

const std::vector<std::string>& scheme_names() {
  static const std::vector<std::string> names{"optimizer", "comb", "cat", "highfock", "hex_gkp", "fock_code"};
  return names;
}

bool scheme_is_stochastic(const std::string& scheme) { return scheme == "optimizer"; }

namespace {

int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + pos, '\n'));
}

const std::vector<std::string>& encoding_keys(const std::string& scheme) {
  static const std::map<std::string, std::vector<std::string>> keys{
      {"optimizer", {"d", "rounds", "restarts", "step_iterations", "code_nmax"}},
      {"comb", {"d", "m", "f", "delta", "r"}},
      {"cat", {"alpha"}},
      {"highfock", {"n", "vacuum_weight"}},
      {"hex_gkp", {"delta"}},
      {"fock_code", {"levels"}},
  };
  return keys.at(scheme);
}

}  // namespace

void normalize(RunConfig& cfg) {
  json c;
  c["scheme"] = cfg.scheme;
  c["environment"] = describe(cfg.environment);
  c["encoding"] = cfg.encoding;
  c["eta"] = cfg.etas;
  c["nmax"] = cfg.nmax;
  c["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
  c["output"] = cfg.output;
  cfg.canonical = c;
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const size_t byte = std::min<size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
    throw ConfigError(fmt::format("invalid JSON ({})", e.what()), "", line);
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object", "/", 1);
  static const std::vector<std::string> allowed{"scheme", "environment", "encoding", "eta", "nmax", "seed", "output"};
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown field", "/" + k, line_of_key(text, k));
  auto fail = [&](const std::string& key, const std::string& msg, const std::string& sub = "") {
    throw ConfigError(msg, "/" + key + sub, line_of_key(text, key));
  };

  RunConfig cfg;
  if (!j.contains("scheme") || !j["scheme"].is_string()) fail("scheme", "required string");
  cfg.scheme = j["scheme"].get<std::string>();
  const auto& names = scheme_names();
  if (std::find(names.begin(), names.end(), cfg.scheme) == names.end())
    fail("scheme", fmt::format("unknown scheme '{}'", cfg.scheme));

  if (j.contains("environment")) {
    try {
      cfg.environment = state_from_json(j["environment"], "/environment");
    } catch (const ConfigError& e) {
      fail("environment", e.what());
    }
  } else if (cfg.scheme != "highfock") {
    fail("environment", "required");
  }

  cfg.encoding = j.value("encoding", json::object());
  if (!cfg.encoding.is_object()) fail("encoding", "must be an object");
  const auto& keys = encoding_keys(cfg.scheme);
  for (const auto& [k, v] : cfg.encoding.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail("encoding", "unknown key for this scheme", "/" + k);

  if (!j.contains("eta")) fail("eta", "required");
  const json& eta = j["eta"];
  if (eta.is_string()) {
    try {
      cfg.etas = parse_grid(eta.get<std::string>(), "/eta");
    } catch (const ConfigError& e) {
      fail("eta", e.what());
    }
  } else if (eta.is_array()) {
    for (size_t i = 0; i < eta.size(); ++i) {
      if (!eta[i].is_number()) fail("eta", "must be a number", "/" + std::to_string(i));
      cfg.etas.push_back(eta[i].get<double>());
    }
  } else {
    fail("eta", "must be an array or a start:stop:step string");
  }
  if (cfg.etas.empty()) fail("eta", "grid is empty");
  for (size_t i = 0; i < cfg.etas.size(); ++i)
    if (!(cfg.etas[i] >= 0 && cfg.etas[i] <= 1)) fail("eta", "must lie in [0, 1]", "/" + std::to_string(i));

  if (j.contains("nmax")) {
    if (!j["nmax"].is_number_integer() || j["nmax"].get<long>() < 0) fail("nmax", "must be a non-negative integer");
    cfg.nmax = j["nmax"].get<int>();
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    if (!j["seed"].is_number_unsigned()) fail("seed", "must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  if (scheme_is_stochastic(cfg.scheme) && !cfg.seed) fail("seed", "required for this scheme");
  if (j.contains("output")) {
    if (!j["output"].is_string()) fail("output", "must be a string");
    cfg.output = j["output"].get<std::string>();
  }
  normalize(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_hash(const RunConfig& cfg) {
  json c = cfg.canonical;
  c.erase("output");
  return content_hash(c);
}

std::string content_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

bool SweepRecord::operator==(const SweepRecord& o) const {
  return scheme == o.scheme && eta == o.eta && fidelity == o.fidelity && ic == o.ic && q1 == o.q1 &&
         diagnostics == o.diagnostics && config_hash == o.config_hash;
}

json to_json(const SweepRecord& r) {
  json j;
  j["scheme"] = r.scheme;
  j["eta"] = r.eta;
  j["fidelity"] = r.fidelity;
  j["ic"] = r.ic;
  j["q1"] = r.q1 ? json(*r.q1) : json(nullptr);
  j["diagnostics"] = r.diagnostics;
  j["config_hash"] = r.config_hash;
  j["timestamp"] = r.timestamp;
  return j;
}

SweepRecord record_from_json(const json& j) {
  SweepRecord r;
  r.scheme = j.at("scheme").get<std::string>();
  r.eta = j.at("eta").get<double>();
  r.fidelity = j.at("fidelity").get<double>();
  r.ic = j.at("ic").get<double>();
  if (!j.at("q1").is_null()) r.q1 = j.at("q1").get<double>();
  r.diagnostics = j.at("diagnostics");
  r.config_hash = j.at("config_hash").get<std::string>();
  r.timestamp = j.value("timestamp", json::object());
  return r;
}

namespace {

int enc_int(const RunConfig& cfg, const char* key, int def) {
  if (!cfg.encoding.contains(key)) return def;
  const json& v = cfg.encoding[key];
  if (!v.is_number_integer()) throw ConfigError("must be an integer", fmt::format("/encoding/{}", key));
  return v.get<int>();
}

double enc_double(const RunConfig& cfg, const char* key, std::optional<double> def) {
  if (!cfg.encoding.contains(key)) {
    if (!def) throw ConfigError("required", fmt::format("/encoding/{}", key));
    return *def;
  }
  const json& v = cfg.encoding[key];
  if (!v.is_number()) throw ConfigError("must be a number", fmt::format("/encoding/{}", key));
  return v.get<double>();
}

CapacityOptions cap_options(const RunConfig& cfg) {
  CapacityOptions c;
  c.seed = cfg.seed.value_or(0);
  return c;
}

struct PointResult {
  double fidelity;
  double ic;
  std::optional<double> q1;
  json diag;
};

PointResult measure(const RunConfig& cfg, const KrausChannel& ch, const KrausChannel& comp, const KrausChannel& dec,
                    const char* decoder) {
  const int d = ch.in_dim();
  PointResult p;
  p.fidelity = entanglement_fidelity(compose(ch, dec));
  p.ic = coherent_information(DensityMatrix::maximally_mixed(d), ch, comp);
  if (d <= 4) p.q1 = maximize_coherent_info(ch, comp, cap_options(cfg)).value;
  p.diag["decoder"] = decoder;
  p.diag["trace_deficit"] = ch.trace_deviation();
  p.diag["out_dim"] = ch.out_dim();
  return p;
}

std::vector<cplx> comb_amplitudes(const RunConfig& cfg, int d, int m) {
  if (!cfg.encoding.contains("f") || cfg.encoding["f"] == "optimal") return closed_form_report(d, m).f;
  const json& f = cfg.encoding["f"];
  if (f == "uniform") return std::vector<cplx>(m, 1 / std::sqrt(static_cast<double>(m)));
  if (!f.is_array() || static_cast<int>(f.size()) != m)
    throw ConfigError("must be \"optimal\", \"uniform\" or m numbers", "/encoding/f");
  std::vector<cplx> out;
  double norm = 0;
  for (const auto& v : f) {
    if (!v.is_number()) throw ConfigError("must be numbers", "/encoding/f");
    out.emplace_back(v.get<double>());
    norm += std::norm(out.back());
  }
  if (!(norm > 0)) throw ConfigError("must not vanish", "/encoding/f");
  for (auto& c : out) c /= std::sqrt(norm);
  return out;
}

PointResult eval_optimizer(const RunConfig& cfg, double eta, int workers) {
  AlternatingOptions opt;
  opt.rounds = enc_int(cfg, "rounds", opt.rounds);
  opt.restarts = enc_int(cfg, "restarts", opt.restarts);
  opt.step_iterations = enc_int(cfg, "step_iterations", opt.step_iterations);
  opt.code_nmax = cfg.nmax > 0 ? cfg.nmax : enc_int(cfg, "code_nmax", opt.code_nmax);
  opt.seed = *cfg.seed;
  opt.workers = workers;
  const int d = enc_int(cfg, "d", 2);
  auto ch = optimizer_channel(cfg.environment, theta_from_eta(eta), opt.code_nmax);
  auto res = alternate_optimize(ch, d, opt);
  auto ev = evaluate_scheme(ch, res.encoding, res.decoding, cap_options(cfg));
  PointResult p{ev.fidelity, ev.ic_decoded, ev.ic_decoded_max, json::object()};
  p.diag["ic_undecoded"] = ev.ic_undecoded;
  p.diag["ic_undecoded_max"] = ev.ic_undecoded_max;
  p.diag["best_restart"] = res.best_restart;
  p.diag["restart_fidelities"] = res.restart_fidelities;
  p.diag["rejected_steps"] = res.trace.rejected_steps;
  p.diag["converged"] = res.trace.converged;
  p.diag["rounds"] = res.trace.rounds;
  p.diag["code_nmax"] = opt.code_nmax;
  return p;
}

PointResult eval_comb(const RunConfig& cfg, double eta) {
  const int d = enc_int(cfg, "d", 2);
  const int m = enc_int(cfg, "m", 0);
  if (m < 1) throw ConfigError("required positive integer", "/encoding/m");
  const bool finite = cfg.encoding.contains("r");
  if (!finite && cfg.encoding.contains("delta"))
    throw ConfigError("only applies together with r; the ideal comb sits at sin^2 delta = eta", "/encoding/delta");
  const double delta = cfg.encoding.contains("delta") ? enc_double(cfg, "delta", {}) : std::asin(std::sqrt(eta));
  CombSpec spec{d, m, delta, comb_amplitudes(cfg, d, m)};
  validate(spec);
  if (!finite) {
    auto ch = ideal_kraus(spec);
    auto p = measure(cfg, ch, ch.complement(), comb_decoder(spec), "comb");
    p.diag["delta"] = delta;
    return p;
  }
  const double r = enc_double(cfg, "r", {});
  auto pr = finite_r_channel(spec, r, theta_from_eta(eta));
  auto p = measure(cfg, pr.channel, pr.complement, petz_decoder(pr.channel), "petz");
  p.diag["delta"] = delta;
  p.diag["r"] = r;
  return p;
}

PointResult eval_cat(const RunConfig& cfg, double eta) {
  const auto* env = std::get_if<Cat>(&cfg.environment);
  if (!env || env->parity != 0) throw ConfigError("the cat scheme needs an even cat environment", "/environment");
  const double alpha = enc_double(cfg, "alpha", {});
  auto pr = compressed_cat_channel(alpha, env->alpha, theta_from_eta(eta));
  return measure(cfg, pr.channel, pr.complement, petz_decoder(pr.channel), "petz");
}

PointResult eval_highfock(const RunConfig& cfg, double eta) {
  const int n = enc_int(cfg, "n", 40);
  const double w = enc_double(cfg, "vacuum_weight", 0.0);
  HighFockSpec spec{n, w, eta * n, eta};
  spec.validate();
  if (n < 3) throw ConfigError("must be at least 3", "/encoding/n");
  auto pr = exact_channel(spec, cfg.nmax > 0 ? cfg.nmax : n + 6);
  auto p = measure(cfg, pr.channel, pr.complement, highfock_decoder({0, n, pr.channel.out_dim()}), "highfock");
  p.diag["lambda"] = eta * n;
  return p;
}

PointResult eval_hex(const RunConfig& cfg, double eta) {
  const auto* env = std::get_if<Fock>(&cfg.environment);
  if (!env) throw ConfigError("the hex_gkp scheme needs a Fock environment", "/environment");
  const double delta = enc_double(cfg, "delta", 0.3);
  Mat code = gkp_code(LatticeKind::Hexagonal, delta, cfg.nmax);
  Vec e = Vec::Zero(env->n + 1);
  e(env->n) = 1;
  auto ch = encoded_env_assisted_channel(e, theta_from_eta(eta), code);
  auto p = measure(cfg, ch, ch.complement(), petz_decoder(ch), "petz");
  p.diag["delta"] = delta;
  p.diag["code_nmax"] = code.rows() - 1;
  return p;
}

PointResult eval_fock_code(const RunConfig& cfg, double eta) {
  std::vector<int> levels{0, 1};
  if (cfg.encoding.contains("levels")) {
    levels.clear();
    for (const auto& v : cfg.encoding["levels"]) {
      if (!v.is_number_integer() || v.get<int>() < 0) throw ConfigError("must be photon numbers", "/encoding/levels");
      levels.push_back(v.get<int>());
    }
    std::vector<int> sorted = levels;
    std::sort(sorted.begin(), sorted.end());
    if (levels.size() < 2 || std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("needs at least two distinct levels", "/encoding/levels");
  }
  const int top = *std::max_element(levels.begin(), levels.end());
  Mat code = Mat::Zero(top + 1, levels.size());
  for (size_t i = 0; i < levels.size(); ++i) code(levels[i], i) = 1;
  const int env_n = cfg.nmax > 0 ? cfg.nmax : std::max(1, suggest_nmax(cfg.environment));
  auto env = make_state(cfg.environment, TruncatedBasis(env_n));
  auto ch = compress_output(encoded_env_assisted_channel(env.amplitudes(), theta_from_eta(eta), code));
  SdpOptions so;
  so.require_convergence = false;
  auto p = measure(cfg, ch, ch.complement(), optimal_decoder(ch, so), "optimal");
  p.diag["env_nmax"] = env_n;
  return p;
}

SweepRecord evaluate_point_impl(const RunConfig& cfg, double eta, int workers) {
  const auto t0 = std::chrono::steady_clock::now();
  PointResult p;
  if (cfg.scheme == "optimizer") p = eval_optimizer(cfg, eta, workers);
  else if (cfg.scheme == "comb") p = eval_comb(cfg, eta);
  else if (cfg.scheme == "cat") p = eval_cat(cfg, eta);
  else if (cfg.scheme == "highfock") p = eval_highfock(cfg, eta);
  else if (cfg.scheme == "hex_gkp") p = eval_hex(cfg, eta);
  else if (cfg.scheme == "fock_code") p = eval_fock_code(cfg, eta);
  else throw ConfigError(fmt::format("unknown scheme '{}'", cfg.scheme), "/scheme");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  SweepRecord r{cfg.scheme, eta, p.fidelity, p.ic, p.q1, p.diag, config_hash(cfg), json::object()};
  r.timestamp["utc"] = utc_now();
  r.timestamp["wall_time_s"] = secs;
  return r;
}

}  // namespace

SweepRecord evaluate_point(const RunConfig& cfg, double eta) { return evaluate_point_impl(cfg, eta, 1); }

void run_sweep(const RunConfig& cfg, int workers, const std::function<void(const SweepRecord&)>& sink) {
  const size_t n = cfg.etas.size();
  workers = std::max(1, workers);
  const int outer = static_cast<int>(std::min<size_t>(workers, n));
  const int inner = std::max(1, workers / outer);
  std::vector<std::optional<SweepRecord>> done(n);
  std::vector<std::exception_ptr> errs(n);
  std::mutex mu;
  std::condition_variable cv;
  std::atomic<size_t> next{0};
  std::atomic<bool> stop{false};
  int finished = 0;
  auto work = [&] {
    for (size_t i; !stop && (i = next++) < n;) {
      std::optional<SweepRecord> rec;
      std::exception_ptr err;
      try {
        rec = evaluate_point_impl(cfg, cfg.etas[i], inner);
      } catch (...) {
        err = std::current_exception();
        stop = true;
      }
      std::lock_guard<std::mutex> lk(mu);
      done[i] = std::move(rec);
      errs[i] = err;
      cv.notify_all();
    }
    std::lock_guard<std::mutex> lk(mu);
    ++finished;
    cv.notify_all();
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < outer; ++w) pool.emplace_back(work);
  bool failed = false;
  try {
    for (size_t i = 0; i < n; ++i) {
      std::unique_lock<std::mutex> lk(mu);
      cv.wait(lk, [&] { return done[i].has_value() || errs[i] || finished == outer; });
      if (!done[i]) {
        failed = true;
        break;
      }
      SweepRecord r = *done[i];
      lk.unlock();
      sink(r);
    }
  } catch (...) {
    stop = true;
    for (auto& t : pool) t.join();
    throw;
  }
  stop = true;
  for (auto& t : pool) t.join();
  if (failed)
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
}

void write_run(const RunConfig& cfg, std::ostream& os, int workers) {
  json header;
  header["kind"] = "header";
  header["version"] = kVersion;
  header["config_hash"] = config_hash(cfg);
  header["config"] = cfg.canonical;
  header["timestamp"] = {{"utc", utc_now()}};
  os << header.dump() << '\n' << std::flush;
  run_sweep(cfg, workers, [&](const SweepRecord& r) {
    json j = to_json(r);
    j["kind"] = "record";
    os << j.dump() << '\n' << std::flush;
  });
}

void write_sweep_csv(const RunConfig& cfg, std::ostream& os, int workers) {
  os << "# peaqc " << kVersion << '\n';
  os << "# config_hash " << config_hash(cfg) << '\n';
  os << "# config " << cfg.canonical.dump() << '\n';
  os << "scheme,eta,fidelity,ic,q1,trace_deficit\n" << std::flush;
  run_sweep(cfg, workers, [&](const SweepRecord& r) {
    os << fmt::format("{},{:.10g},{:.10g},{:.10g},{},{:.3g}\n", r.scheme, r.eta, r.fidelity, r.ic,
                      r.q1 ? fmt::format("{:.10g}", *r.q1) : std::string(),
                      r.diagnostics.value("trace_deficit", 0.0))
       << std::flush;
  });
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("PEAQC_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace peaqc
