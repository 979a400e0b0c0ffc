#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "peaqc/error.hpp"
#include "peaqc/fock.hpp"

namespace peaqc {

using json = nlohmann::json;

extern const char* const kVersion;

/// "vacuum", "fock:N", "coherent:RE[:IM]", "cat:A[:odd]", "squeezed_cat:A:R",
/// "superposition:N=C,N=C" (C real, or RE/IM).
StateSpec parse_state(const std::string& text);
StateSpec state_from_json(const json& j, const std::string& field);
std::string describe(const StateSpec& s);

/// "a:b:step" inclusive, or a comma list.  Empty or malformed grids throw ConfigError.
std::vector<double> parse_grid(const std::string& text, const std::string& field = "grid");

struct RunConfig {
  std::string scheme;
  StateSpec environment;
  json encoding;
  std::vector<double> etas;
  int nmax = 0;  ///< 0 keeps the scheme default
  std::optional<std::uint64_t> seed;
  std::string output;
  json canonical;  ///< normalized config, hashed without `output`
};

/// Schemes that draw random numbers need a seed.
bool scheme_is_stochastic(const std::string& scheme);
const std::vector<std::string>& scheme_names();

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
/// Rebuilds `canonical` after overrides.
void normalize(RunConfig& cfg);
/// 16 hex digits, FNV-1a over the canonical JSON without `output`.
std::string config_hash(const RunConfig& cfg);
/// Same hash over an arbitrary JSON value.
std::string content_hash(const json& j);

struct SweepRecord {
  std::string scheme;
  double eta;
  double fidelity;
  double ic;                  ///< I_c(I/d)
  std::optional<double> q1;   ///< I_c maximized over the logical input
  json diagnostics;
  std::string config_hash;
  json timestamp;  ///< wall-clock fields, excluded from comparisons

  bool operator==(const SweepRecord& o) const;
};

json to_json(const SweepRecord& r);
SweepRecord record_from_json(const json& j);

SweepRecord evaluate_point(const RunConfig& cfg, double eta);

/// Evaluates every grid point on `workers` threads; `sink` sees records in grid order.
void run_sweep(const RunConfig& cfg, int workers, const std::function<void(const SweepRecord&)>& sink);

/// JSON lines: one header, then one record per grid point, flushed as they complete.
void write_run(const RunConfig& cfg, std::ostream& os, int workers);
/// CSV with `#` metadata and a header row.
void write_sweep_csv(const RunConfig& cfg, std::ostream& os, int workers);

/// --workers, then PEAQC_WORKERS, then hardware concurrency.
int resolve_workers(int requested);

std::string utc_now();

}  // namespace peaqc
