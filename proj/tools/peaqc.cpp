#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "peaqc/acceptance.hpp"
#include "peaqc/comb.hpp"
#include "peaqc/error.hpp"
#include "peaqc/harness.hpp"
#include "peaqc/highfock.hpp"
#include "peaqc/phase_space.hpp"

using namespace peaqc;

namespace {

enum Exit { kOk = 0, kFailure = 1, kConfig = 2 };

struct Common {
  std::string out;
  std::optional<std::uint64_t> seed;
  int workers = 0;
  int nmax = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Output file (stdout when omitted)");
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--workers", c.workers, "Worker threads (default: PEAQC_WORKERS or all cores)");
  app->add_option("--nmax", c.nmax, "Fock truncation override");
}

/// Opens `path` only once the caller has validated everything; "-" or empty means stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ConfigError(fmt::format("cannot write '{}'", path), "--out");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool is_stdout() const { return !file_; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void apply_common(RunConfig& cfg, const Common& c) {
  if (c.seed) cfg.seed = c.seed;
  if (c.nmax > 0) cfg.nmax = c.nmax;
  if (!c.out.empty()) cfg.output = c.out;
  if (scheme_is_stochastic(cfg.scheme) && !cfg.seed) throw ConfigError("required for this scheme", "/seed");
  normalize(cfg);
}

void csv_meta(std::ostream& os, const json& params) {
  os << "# peaqc " << kVersion << '\n';
  os << "# config_hash " << content_hash(params) << '\n';
  os << "# config " << params.dump() << '\n';
}

json encoding_from_text(const std::string& text) {
  if (text.empty()) return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("must be a JSON object", "--encoding");
    return j;
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("invalid JSON ({})", e.what()), "--encoding");
  }
}

int cmd_run(const std::string& path, const Common& c) {
  RunConfig cfg = load_config(path);
  apply_common(cfg, c);
  Output out(cfg.output);
  write_run(cfg, out.stream(), resolve_workers(c.workers));
  return kOk;
}

int cmd_sweep(const std::string& config, const std::string& scheme, const std::string& env,
              const std::string& encoding, const std::string& grid, const Common& c) {
  RunConfig cfg;
  if (!config.empty()) {
    cfg = load_config(config);
  } else {
    json j;
    j["scheme"] = scheme;
    if (!env.empty()) j["environment"] = env;
    j["encoding"] = encoding_from_text(encoding);
    j["eta"] = grid;
    cfg = parse_config(j.dump());
  }
  if (!grid.empty()) cfg.etas = parse_grid(grid, "--eta-grid");
  for (double e : cfg.etas)
    if (!(e >= 0 && e <= 1)) throw ConfigError("values must lie in [0, 1]", "--eta-grid");
  apply_common(cfg, c);
  Output out(c.out);
  write_sweep_csv(cfg, out.stream(), resolve_workers(c.workers));
  return kOk;
}

int cmd_optimize(const std::string& env, double eta, int d, int rounds, int restarts, const Common& c) {
  json j;
  j["scheme"] = "optimizer";
  j["environment"] = env;
  j["encoding"] = {{"d", d}, {"rounds", rounds}, {"restarts", restarts}};
  j["eta"] = json::array({eta});
  if (c.seed) j["seed"] = *c.seed;
  RunConfig cfg = parse_config(j.dump());
  apply_common(cfg, c);
  Output out(c.out);
  json rec;
  run_sweep(cfg, resolve_workers(c.workers), [&](const SweepRecord& r) { rec = to_json(r); });
  rec["version"] = kVersion;
  out.stream() << rec.dump(2) << '\n';
  return kOk;
}

int cmd_comb(int d, int m, std::optional<double> r, const std::string& deltas, const std::string& etas,
             const std::string& f, const Common& c) {
  if (d < 2) throw ConfigError("must be at least 2", "--d");
  if (m < 1) throw ConfigError("must be positive", "--m");
  if (!r) {
    if (!deltas.empty() || !etas.empty()) throw ConfigError("grids only apply together with --r", "--delta-grid");
    const auto rep = closed_form_report(d, m);
    json j;
    j["version"] = kVersion;
    j["d"] = d;
    j["m"] = m;
    j["fidelity"] = rep.fidelity;
    j["lambda_max"] = rep.lambda_max;
    j["ic_bound"] = rep.ic_bound;
    std::vector<double> amps;
    for (auto a : rep.f) amps.push_back(a.real());
    j["f"] = amps;
    std::vector<std::vector<double>> kappa(rep.kappa.rows(), std::vector<double>(rep.kappa.cols()));
    for (int i = 0; i < rep.kappa.rows(); ++i)
      for (int k = 0; k < rep.kappa.cols(); ++k) kappa[i][k] = rep.kappa(i, k);
    j["kappa"] = kappa;
    j["config_hash"] = content_hash({{"d", d}, {"m", m}});
    Output out(c.out);
    out.stream() << j.dump(2) << '\n';
    return kOk;
  }
  const auto dg = parse_grid(deltas.empty() ? "0.5" : deltas, "--delta-grid");
  const auto eg = parse_grid(etas.empty() ? "0.05:0.95:0.05" : etas, "--eta-grid");
  for (double e : eg)
    if (!(e > 0 && e < 1)) throw ConfigError("values must lie in (0, 1)", "--eta-grid");
  std::vector<cplx> amps;
  if (f == "optimal") amps = closed_form_report(d, m).f;
  else if (f == "uniform") amps.assign(m, 1 / std::sqrt(static_cast<double>(m)));
  else throw ConfigError("must be optimal or uniform", "--f");
  CombSpec spec{d, m, dg.front(), amps};
  validate(spec);
  json params{{"d", d}, {"m", m}, {"r", *r}, {"f", f}, {"delta", dg}, {"eta", eg}};
  Output out(c.out);
  auto& os = out.stream();
  csv_meta(os, params);
  os << "delta,eta,ic,q1\n";
  for (const auto& p : finite_r_scan(spec, *r, dg, eg, true, resolve_workers(c.workers)))
    os << fmt::format("{:.10g},{:.10g},{:.10g},{:.10g}\n", p.delta, p.eta, p.ic_mixed, p.q1);
  return kOk;
}

int cmd_highfock(const std::string& grid, int exact_n, std::optional<double> weight, const Common& c) {
  const auto lambdas = parse_grid(grid, "--lambda-grid");
  for (double l : lambdas)
    if (!(l > 0)) throw ConfigError("values must be positive", "--lambda-grid");
  if (weight && !(*weight >= 0 && *weight <= 1)) throw ConfigError("must lie in [0, 1]", "--vacuum-weight");
  if (exact_n < 0) throw ConfigError("must be non-negative", "--exact-n");
  const int workers = resolve_workers(c.workers);
  std::vector<AlphaPoint> pts;
  if (weight) {
    for (double l : lambdas) {
      auto ch = poisson_limit_channel(l, *weight);
      pts.push_back({l, *weight, coherent_information(DensityMatrix::maximally_mixed(2), ch)});
    }
  } else {
    pts = optimize_alpha(lambdas, workers);
  }
  json params{{"lambda", lambdas}, {"exact_n", exact_n}, {"vacuum_weight", weight ? json(*weight) : json("optimal")},
              {"nmax", c.nmax}};
  Output out(c.out);
  auto& os = out.stream();
  csv_meta(os, params);
  os << "lambda,vacuum_weight,ic_limit" << (exact_n > 0 ? ",ic_exact" : "") << '\n' << std::flush;
  for (const auto& p : pts) {
    os << fmt::format("{:.10g},{:.10g},{:.10g}", p.lambda, p.vacuum_weight, p.ic);
    if (exact_n > 0) {
      auto spec = HighFockSpec::at_lambda(exact_n, p.vacuum_weight, p.lambda);
      if (spec.eta > 1) throw ConfigError(fmt::format("lambda {} exceeds n", p.lambda), "--exact-n");
      auto pr = exact_channel(spec, c.nmax > 0 ? c.nmax : exact_n + 6);
      os << fmt::format(",{:.10g}", coherent_information(DensityMatrix::maximally_mixed(2), pr.channel, pr.complement));
    }
    os << '\n' << std::flush;
  }
  return kOk;
}

GridSpec grid_from_text(const std::string& text) {
  GridSpec g;
  if (text.empty()) return g;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
  if (parts.size() != 3) throw ConfigError("must be lo:hi:points", "--grid");
  try {
    g.lo = std::stod(parts[0]);
    g.hi = std::stod(parts[1]);
    g.points = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ConfigError("must be lo:hi:points", "--grid");
  }
  if (!(g.hi > g.lo) || g.points < 2) throw ConfigError("needs hi > lo and at least 2 points", "--grid");
  return g;
}

json report_json(const HidingReport& rep) {
  json j;
  j["eta"] = rep.eta;
  j["threshold"] = rep.threshold;
  j["max_logical_magnitude"] = rep.max_logical_magnitude;
  j["max_logical_unscaled"] = rep.max_logical_naive;
  for (const auto& p : rep.points)
    j["points"].push_back({{"label", p.label},
                           {"x", p.point[0]},
                           {"p", p.point[1]},
                           {"logical", p.logical},
                           {"magnitude", p.magnitude},
                           {"unscaled_magnitude", p.naive_magnitude},
                           {"hidden", p.hidden}});
  return j;
}

int cmd_charfunc(const std::string& env_text, double eta, const std::string& lattice, const std::string& grid,
                 double threshold, const std::string& report_path, const Common& c) {
  const StateSpec env = parse_state(env_text);
  if (!(eta > 0 && eta < 1)) throw ConfigError("must lie in (0, 1)", "--eta");
  LatticeKind kind;
  if (lattice == "hex") kind = LatticeKind::Hexagonal;
  else if (lattice == "square") kind = LatticeKind::Square;
  else throw ConfigError("must be hex or square", "--lattice");
  const GridSpec g = grid_from_text(grid);
  const auto rep = hiding_report(env, eta, kind, threshold);
  json params{{"env", describe(env)}, {"eta", eta}, {"lattice", lattice}, {"threshold", threshold}, {"grid", {g.lo, g.hi, g.points}}};
  json rj = report_json(rep);
  rj["version"] = kVersion;
  rj["config_hash"] = content_hash(params);

  Output out(c.out);
  const auto values = evaluate(char_func(env), g, resolve_workers(c.workers));
  write_csv(out.stream(), values,
            {fmt::format("peaqc {}", kVersion), fmt::format("config_hash {}", content_hash(params)),
             fmt::format("config {}", params.dump()), "environment characteristic function"});
  if (!report_path.empty()) {
    Output rout(report_path);
    rout.stream() << rj.dump(2) << '\n';
  } else {
    (out.is_stdout() ? std::cerr : std::cout) << rj.dump(2) << '\n';
  }
  return kOk;
}

std::set<int> suite_ids(const std::string& suite) {
  if (suite == "all") return {};
  if (suite == "fast") return {1, 2, 6, 8};
  std::set<int> ids;
  std::stringstream ss(suite);
  for (std::string t; std::getline(ss, t, ',');) {
    int id = 0;
    try {
      id = std::stoi(t);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("unknown suite '{}'", suite), "--suite");
    }
    if (id < 1 || id > 8) throw ConfigError(fmt::format("no criterion {}", id), "--suite");
    ids.insert(id);
  }
  if (ids.empty()) throw ConfigError("empty suite", "--suite");
  return ids;
}

int cmd_verify(const std::string& suite, const Common& c) {
  AcceptanceOptions opt;
  opt.only = suite_ids(suite);
  opt.workers = resolve_workers(c.workers);
  Output out(c.out);
  auto& os = out.stream();
  os << fmt::format("{:<3} {:<44} {:<6} {:>9} {:>8}\n", "id", "criterion", "result", "seconds", "budget") << std::flush;
  bool ok = true;
  std::vector<CriterionResult> all;
  run_acceptance(opt, [&](const CriterionResult& r) {
    ok = ok && r.pass;
    all.push_back(r);
    os << fmt::format("{:<3} {:<44} {:<6} {:>9.1f} {:>8}\n", r.id, r.name, r.pass ? "PASS" : "FAIL", r.seconds,
                      r.budget_seconds > 0 ? fmt::format("{:.0f}", r.budget_seconds) : "-")
       << std::flush;
  });
  os << '\n';
  for (const auto& r : all) os << format_result(r) << '\n';
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Environment-assisted bosonic error correction toolkit"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  Common common;

  auto* run = app.add_subcommand("run", "Evaluate a JSON run config, writing JSON lines");
  std::string run_path;
  run->add_option("config,--config", run_path, "Config file");
  add_common(run, common);

  auto* sweep = app.add_subcommand("sweep", "Sweep a scheme over a transmissivity grid, writing CSV");
  std::string sw_config, sw_scheme, sw_env, sw_enc, sw_grid;
  sweep->add_option("--config", sw_config, "Base config file");
  sweep->add_option("--scheme", sw_scheme, "Scheme name");
  sweep->add_option("--env", sw_env, "Environment state");
  sweep->add_option("--encoding", sw_enc, "Encoding parameters as a JSON object");
  sweep->add_option("--eta-grid", sw_grid, "start:stop:step or a comma list");
  add_common(sweep, common);

  auto* optimize = app.add_subcommand("optimize", "Alternating encoder/decoder optimization at one transmissivity");
  std::string op_env;
  double op_eta = 0.3;
  int op_d = 2, op_rounds = 150, op_restarts = 8;
  optimize->add_option("--env", op_env, "Environment state")->required();
  optimize->add_option("--eta", op_eta, "Transmissivity");
  optimize->add_option("--d", op_d, "Logical dimension");
  optimize->add_option("--rounds", op_rounds, "Rounds per restart");
  optimize->add_option("--restarts", op_restarts, "Random restarts");
  add_common(optimize, common);

  auto* comb = app.add_subcommand("comb", "Comb closed forms, or a finite-r scan when --r is given");
  int cb_d = 2, cb_m = 8;
  std::optional<double> cb_r;
  std::string cb_deltas, cb_etas, cb_f = "optimal";
  comb->add_option("--d", cb_d, "Logical dimension");
  comb->add_option("--m", cb_m, "Number of teeth");
  comb->add_option("--r", cb_r, "Squeezing parameter");
  comb->add_option("--delta-grid", cb_deltas, "Comb angles for the scan");
  comb->add_option("--eta-grid", cb_etas, "Transmissivities for the scan");
  comb->add_option("--f", cb_f, "Amplitude profile: optimal or uniform");
  add_common(comb, common);

  auto* highfock = app.add_subcommand("highfock", "High-Fock environment curve over the Poisson parameter");
  std::string hf_grid;
  int hf_exact = 0;
  std::optional<double> hf_weight;
  highfock->add_option("--lambda-grid", hf_grid, "start:stop:step or a comma list")->required();
  highfock->add_option("--exact-n", hf_exact, "Also evaluate the exact channel at this photon number");
  highfock->add_option("--vacuum-weight", hf_weight, "Fixed vacuum weight (optimized when omitted)");
  add_common(highfock, common);

  auto* charfunc = app.add_subcommand("charfunc", "Environment characteristic function and hiding report");
  std::string ch_env, ch_lattice = "hex", ch_grid, ch_report;
  double ch_eta = 0.34, ch_threshold = 0.1;
  charfunc->add_option("--env", ch_env, "Environment state")->required();
  charfunc->add_option("--eta", ch_eta, "Transmissivity");
  charfunc->add_option("--lattice", ch_lattice, "hex or square");
  charfunc->add_option("--grid", ch_grid, "lo:hi:points");
  charfunc->add_option("--threshold", ch_threshold, "Magnitude below which a point counts as hidden");
  charfunc->add_option("--report", ch_report, "Hiding report path");
  add_common(charfunc, common);

  auto* verify = app.add_subcommand("verify", "Run the acceptance criteria and print a table");
  std::string vf_suite = "all";
  verify->add_option("--suite", vf_suite, "all, fast, or a comma list of criterion ids");
  add_common(verify, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) {
      if (run_path.empty()) throw ConfigError("a config file is required", "config");
      return cmd_run(run_path, common);
    }
    if (*sweep) {
      if (sw_config.empty() && sw_scheme.empty()) throw ConfigError("give --config or --scheme", "--scheme");
      return cmd_sweep(sw_config, sw_scheme, sw_env, sw_enc, sw_grid, common);
    }
    if (*optimize) return cmd_optimize(op_env, op_eta, op_d, op_rounds, op_restarts, common);
    if (*comb) return cmd_comb(cb_d, cb_m, cb_r, cb_deltas, cb_etas, cb_f, common);
    if (*highfock) return cmd_highfock(hf_grid, hf_exact, hf_weight, common);
    if (*charfunc) return cmd_charfunc(ch_env, ch_eta, ch_lattice, ch_grid, ch_threshold, ch_report, common);
    if (*verify) return cmd_verify(vf_suite, common);
  } catch (const ConfigError& e) {
    std::cerr << "peaqc: config error: " << e.what() << '\n';
    return kConfig;
  } catch (const InvalidSpec& e) {
    std::cerr << "peaqc: invalid parameters: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "peaqc: " << e.what() << '\n';
    return kFailure;
  }
  return kFailure;
}
