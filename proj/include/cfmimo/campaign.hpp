// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfmimo/pilot_assignment.hpp"

namespace cfmimo {

enum class AlgoKind { Rpa, Shpa, Mhpa, Greedy };

std::string to_string(AlgoKind kind);
std::string to_string(DlPowerMode mode);

// One algorithm entry of a campaign. Labels must be unique; the default
// label is the spec string handed to parse_algo_spec.
struct AlgoSpec {
  AlgoKind kind = AlgoKind::Rpa;
  DlPowerMode dl_mode = DlPowerMode::MinRate;
  std::string label;
};

// "rpa", "shpa", "mhpa", "greedy", optionally suffixed ":sr" or ":mr" to
// override the DL power mode (defaults: shpa -> SumRate, others -> MinRate).
AlgoSpec parse_algo_spec(const std::string& text);

struct CampaignConfig {
  SystemConfig system;
  std::vector<AlgoSpec> algorithms;
  int n_drops = 200;
  std::uint64_t master_seed = 1;
  int n_threads = 0;      // 0 = hardware concurrency; results are thread-count invariant
  int max_sweeps = 20;
  double rel_tol = 0.02;
};

struct RateRecord {
  int drop = 0;
  int algo = 0;  // index into CampaignConfig::algorithms
  int user = 0;
  double dl_bps = 0.0;
  double ul_bps = 0.0;
  int sweeps = 0;
};

struct AlgoSummary {
  std::string label;
  AlgoKind kind = AlgoKind::Rpa;
  DlPowerMode dl_mode = DlPowerMode::MinRate;
  std::size_t record_count = 0;
  double dl_5pct_bps = 0.0;       // pooled per-user 5%-rate
  double ul_5pct_bps = 0.0;
  double median_dl_sum_bps = 0.0; // per-drop sum-rate medians
  double median_ul_sum_bps = 0.0;
  double median_dl_min_bps = 0.0; // per-drop min-rate medians
  double median_ul_min_bps = 0.0;
  double mean_sweeps = 0.0;
};

struct CampaignResult {
  CampaignConfig config;
  std::vector<RateRecord> records;    // ordered by (drop, algo, user)
  std::vector<AlgoSummary> summaries; // one per algorithm entry
};

// Runs every requested algorithm on the same drops (paired design). Drop d
// uses substream_seed(master, d, 0) for its geometry and shadowing and
// substream_seed(master, d, 1) for the initial random assignment shared by
// all algorithms. Deterministic for a fixed master seed regardless of
// n_threads.
CampaignResult run_campaign(const CampaignConfig& cfg);

// Empirical CDF: (i-th smallest value, i/n) pairs. Errors on empty input.
std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values);

// Nearest-rank percentile: the ceil(p*n)-th smallest value, 0 < p < 1.
double percentile(std::span<const double> values, double p);

// Writes records.csv (`drop,algo,user,dl_bps,ul_bps,sweeps`), summary.json
// (per-algorithm statistics plus the full config echo) and per-algorithm
// CDF files cdf_<label>_<metric>.dat with `value probability` rows for the
// metrics dl_user, ul_user, dl_sum, ul_sum, dl_min, ul_min.
void emit_outputs(const CampaignResult& result, const std::filesystem::path& out_dir);

// Parses a records.csv produced by emit_outputs. Labels are returned as
// written; throws on malformed rows, with the line number.
struct ParsedRecord {
  int drop = 0;
  std::string algo;
  int user = 0;
  double dl_bps = 0.0;
  double ul_bps = 0.0;
  int sweeps = 0;
};
std::vector<ParsedRecord> parse_records_csv(const std::filesystem::path& csv_path);

// Metric extraction shared by emit_outputs and the `cdf` CLI subcommand:
// per-user pools or per-drop sum/min aggregates for one algorithm label.
std::vector<double> metric_series(const std::vector<ParsedRecord>& records,
                                  const std::string& algo_label,
                                  const std::string& metric);

}  // namespace cfmimo
