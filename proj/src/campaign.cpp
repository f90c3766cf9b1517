// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace cfmimo {

std::string to_string(AlgoKind kind) {
  switch (kind) {
    case AlgoKind::Rpa: return "rpa";
    case AlgoKind::Shpa: return "shpa";
    case AlgoKind::Mhpa: return "mhpa";
    case AlgoKind::Greedy: return "greedy";
  }
  return "?";
}

std::string to_string(DlPowerMode mode) {
  return mode == DlPowerMode::SumRate ? "sum_rate" : "min_rate";
}

AlgoSpec parse_algo_spec(const std::string& text) {
  AlgoSpec spec;
  spec.label = text;

  std::string name = text;
  std::string mode;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    name = text.substr(0, colon);
    mode = text.substr(colon + 1);
  }

  if (name == "rpa") spec.kind = AlgoKind::Rpa;
  else if (name == "shpa") spec.kind = AlgoKind::Shpa;
  else if (name == "mhpa") spec.kind = AlgoKind::Mhpa;
  else if (name == "greedy") spec.kind = AlgoKind::Greedy;
  else throw std::invalid_argument("unknown algorithm '" + name + "' (try rpa, shpa, mhpa, greedy)");

  if (mode.empty()) {
    spec.dl_mode = spec.kind == AlgoKind::Shpa ? DlPowerMode::SumRate : DlPowerMode::MinRate;
  } else if (mode == "sr") {
    spec.dl_mode = DlPowerMode::SumRate;
  } else if (mode == "mr") {
    spec.dl_mode = DlPowerMode::MinRate;
  } else {
    throw std::invalid_argument("unknown DL power mode suffix ':" + mode + "' (use :sr or :mr)");
  }
  return spec;
}

namespace {

PaResult run_algorithm(const AlgoSpec& spec, const Drop& drop, const SystemConfig& sys,
                       const CampaignConfig& cfg, const PilotVector& initial) {
  PaRunConfig pa;
  pa.dl_mode = spec.dl_mode;
  pa.max_sweeps = cfg.max_sweeps;
  pa.rel_tol = cfg.rel_tol;
  switch (spec.kind) {
    case AlgoKind::Rpa:
      return evaluate_assignment(drop, sys, spec.dl_mode, initial);
    case AlgoKind::Shpa:
      pa.mode = PaMode::Shpa;
      return run_hungarian_pa_from(drop, sys, pa, initial);
    case AlgoKind::Mhpa:
      pa.mode = PaMode::Mhpa;
      return run_hungarian_pa_from(drop, sys, pa, initial);
    case AlgoKind::Greedy:
      return run_greedy_baseline_from(drop, sys, pa, initial);
  }
  throw std::logic_error("unreachable algorithm kind");
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

AlgoSummary summarize(const AlgoSpec& spec, int algo_index,
                      const std::vector<RateRecord>& records, int n_drops, int K) {
  AlgoSummary s;
  s.label = spec.label;
  s.kind = spec.kind;
  s.dl_mode = spec.dl_mode;

  std::vector<double> dl_users, ul_users;
  std::vector<double> dl_sum(n_drops, 0.0), ul_sum(n_drops, 0.0);
  std::vector<double> dl_min(n_drops, std::numeric_limits<double>::infinity());
  std::vector<double> ul_min(n_drops, std::numeric_limits<double>::infinity());
  double sweep_total = 0.0;
  std::vector<char> drop_seen(n_drops, 0);

  for (const auto& r : records) {
    if (r.algo != algo_index) continue;
    ++s.record_count;
    dl_users.push_back(r.dl_bps);
    ul_users.push_back(r.ul_bps);
    dl_sum[r.drop] += r.dl_bps;
    ul_sum[r.drop] += r.ul_bps;
    dl_min[r.drop] = std::min(dl_min[r.drop], r.dl_bps);
    ul_min[r.drop] = std::min(ul_min[r.drop], r.ul_bps);
    if (!drop_seen[r.drop]) {
      drop_seen[r.drop] = 1;
      sweep_total += r.sweeps;
    }
  }
  if (s.record_count == 0) return s;

  s.dl_5pct_bps = percentile(dl_users, 0.05);
  s.ul_5pct_bps = percentile(ul_users, 0.05);
  s.median_dl_sum_bps = median(dl_sum);
  s.median_ul_sum_bps = median(ul_sum);
  s.median_dl_min_bps = median(dl_min);
  s.median_ul_min_bps = median(ul_min);
  s.mean_sweeps = sweep_total / n_drops;
  (void)K;
  return s;
}

}  // namespace

CampaignResult run_campaign(const CampaignConfig& cfg) {
  cfg.system.validate();
  if (cfg.n_drops < 1) throw std::invalid_argument("run_campaign: n_drops must be >= 1");
  if (cfg.algorithms.empty()) {
    throw std::invalid_argument("run_campaign: algorithm set must be non-empty");
  }
  {
    std::set<std::string> labels;
    for (const auto& a : cfg.algorithms) {
      if (!labels.insert(a.label).second) {
        throw std::invalid_argument("run_campaign: duplicate algorithm label '" + a.label + "'");
      }
    }
  }

  const int n_algos = static_cast<int>(cfg.algorithms.size());
  const int K = cfg.system.K;

  // One contiguous block of records per drop, merged in drop order below, so
  // the result does not depend on which worker ran which drop.
  std::vector<std::vector<RateRecord>> per_drop(cfg.n_drops);

  std::atomic<int> next_drop{0};
  auto worker = [&]() {
    for (;;) {
      const int d = next_drop.fetch_add(1);
      if (d >= cfg.n_drops) return;

      const Drop drop = generate_drop(cfg.system, substream_seed(cfg.master_seed, d, 0));
      Rng init_rng(substream_seed(cfg.master_seed, d, 1));
      const PilotVector initial = random_assignment(K, cfg.system.tau_p, init_rng);

      auto& out = per_drop[d];
      out.reserve(static_cast<std::size_t>(n_algos) * K);
      for (int a = 0; a < n_algos; ++a) {
        const PaResult res = run_algorithm(cfg.algorithms[a], drop, cfg.system, cfg, initial);
        for (int k = 0; k < K; ++k) {
          out.push_back(RateRecord{d, a, k, res.rates.dl(k), res.rates.ul(k),
                                   res.sweeps_used});
        }
      }
    }
  };

  int threads = cfg.n_threads > 0 ? cfg.n_threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.n_drops);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  CampaignResult result;
  result.config = cfg;
  result.records.reserve(static_cast<std::size_t>(cfg.n_drops) * n_algos * K);
  for (auto& block : per_drop) {
    result.records.insert(result.records.end(), block.begin(), block.end());
  }
  for (int a = 0; a < n_algos; ++a) {
    result.summaries.push_back(
        summarize(cfg.algorithms[a], a, result.records, cfg.n_drops, K));
  }
  return result;
}

std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empirical_cdf: empty input");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> cdf;
  cdf.reserve(sorted.size());
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

double percentile(std::span<const double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("percentile: p must be in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Nearest rank; the epsilon absorbs decimal p values that land a hair
  // above an integer rank.
  const double rank = p * static_cast<double>(sorted.size());
  auto idx = static_cast<std::size_t>(std::ceil(rank - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

namespace {

std::string sanitize_label(const std::string& label) {
  std::string out = label;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '-';
  }
  return out;
}

void write_or_throw(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

nlohmann::json config_echo(const SystemConfig& c) {
  return nlohmann::json{
      {"W", c.W}, {"f0", c.f0}, {"h_AP", c.h_AP}, {"h_MS", c.h_MS},
      {"noise_figure_dB", c.noise_figure_dB}, {"M", c.M}, {"N_AP", c.N_AP},
      {"K", c.K}, {"tau_p", c.tau_p}, {"tau_c", c.tau_c}, {"tau_u", c.tau_u},
      {"tau_d", c.tau_d}, {"N_serving", c.N_serving}, {"p_k", c.p_k},
      {"P_dl_m", c.P_dl_m}, {"P0_ul", c.P0_ul}, {"P_max_ul", c.P_max_ul},
      {"alpha_dl", c.alpha_dl}, {"alpha_ul", c.alpha_ul}, {"side", c.side},
      {"pl_const_dB", c.pl_const_dB}, {"pl_slope", c.pl_slope},
      {"sigma_sh_dB", c.sigma_sh_dB}, {"d_decorr", c.d_decorr},
      {"delta_sh", c.delta_sh}, {"d_min", c.d_min}};
}

}  // namespace

void emit_outputs(const CampaignResult& result, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + out_dir.string() +
                             "': " + ec.message());
  }

  // Per-record CSV.
  {
    std::ostringstream csv;
    csv << "drop,algo,user,dl_bps,ul_bps,sweeps\n";
    for (const auto& r : result.records) {
      csv << r.drop << ',' << result.config.algorithms[r.algo].label << ',' << r.user
          << ',' << fmt_double(r.dl_bps) << ',' << fmt_double(r.ul_bps) << ','
          << r.sweeps << '\n';
    }
    write_or_throw(out_dir / "records.csv", csv.str());
  }

  // Summary JSON with the config echo.
  {
    nlohmann::json summary;
    summary["n_drops"] = result.config.n_drops;
    summary["master_seed"] = result.config.master_seed;
    summary["max_sweeps"] = result.config.max_sweeps;
    summary["rel_tol"] = result.config.rel_tol;
    summary["record_count"] = result.records.size();
    summary["config"] = config_echo(result.config.system);
    summary["algorithms"] = nlohmann::json::array();
    for (const auto& s : result.summaries) {
      summary["algorithms"].push_back(nlohmann::json{
          {"label", s.label},
          {"kind", to_string(s.kind)},
          {"dl_power_mode", to_string(s.dl_mode)},
          {"record_count", s.record_count},
          {"dl_5pct_bps", s.dl_5pct_bps},
          {"ul_5pct_bps", s.ul_5pct_bps},
          {"median_dl_sum_bps", s.median_dl_sum_bps},
          {"median_ul_sum_bps", s.median_ul_sum_bps},
          {"median_dl_min_bps", s.median_dl_min_bps},
          {"median_ul_min_bps", s.median_ul_min_bps},
          {"mean_sweeps", s.mean_sweeps}});
    }
    write_or_throw(out_dir / "summary.json", summary.dump(2) + "\n");
  }

  // Plot-ready CDF data, one file per (algorithm, metric) with any samples.
  std::vector<ParsedRecord> parsed;
  parsed.reserve(result.records.size());
  for (const auto& r : result.records) {
    parsed.push_back(ParsedRecord{r.drop, result.config.algorithms[r.algo].label, r.user,
                                  r.dl_bps, r.ul_bps, r.sweeps});
  }
  static const char* kMetrics[] = {"dl_user", "ul_user", "dl_sum", "ul_sum", "dl_min", "ul_min"};
  for (const auto& spec : result.config.algorithms) {
    for (const char* metric : kMetrics) {
      const std::vector<double> series = metric_series(parsed, spec.label, metric);
      if (series.empty()) continue;
      std::ostringstream data;
      data << "# value probability\n";
      for (const auto& [value, prob] : empirical_cdf(series)) {
        data << fmt_double(value) << ' ' << fmt_double(prob) << '\n';
      }
      write_or_throw(out_dir / ("cdf_" + sanitize_label(spec.label) + "_" + metric + ".dat"),
                     data.str());
    }
  }
}

std::vector<ParsedRecord> parse_records_csv(const std::filesystem::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open '" + csv_path.string() + "'");

  std::vector<ParsedRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "drop,algo,user,dl_bps,ul_bps,sweeps") {
        throw std::runtime_error(csv_path.string() + ": unexpected header '" + line + "'");
      }
      continue;
    }
    std::array<std::string, 6> fields;
    std::size_t start = 0;
    for (int f = 0; f < 6; ++f) {
      const auto comma = line.find(',', start);
      if (f < 5 && comma == std::string::npos) {
        throw std::runtime_error(csv_path.string() + ":" + std::to_string(line_no) +
                                 ": expected 6 fields");
      }
      fields[f] = line.substr(start, comma == std::string::npos ? std::string::npos
                                                                : comma - start);
      start = comma + 1;
    }
    try {
      records.push_back(ParsedRecord{std::stoi(fields[0]), fields[1], std::stoi(fields[2]),
                                     std::stod(fields[3]), std::stod(fields[4]),
                                     std::stoi(fields[5])});
    } catch (const std::exception&) {
      throw std::runtime_error(csv_path.string() + ":" + std::to_string(line_no) +
                               ": malformed record '" + line + "'");
    }
  }
  return records;
}

std::vector<double> metric_series(const std::vector<ParsedRecord>& records,
                                  const std::string& algo_label, const std::string& metric) {
  const bool uplink = metric.starts_with("ul_");
  const bool per_user = metric.ends_with("_user");
  const bool per_drop_sum = metric.ends_with("_sum");
  const bool per_drop_min = metric.ends_with("_min");
  if ((!metric.starts_with("dl_") && !uplink) || (!per_user && !per_drop_sum && !per_drop_min)) {
    throw std::invalid_argument(
        "unknown metric '" + metric +
        "' (expected one of dl_user, ul_user, dl_sum, ul_sum, dl_min, ul_min)");
  }

  std::vector<double> series;
  if (per_user) {
    for (const auto& r : records) {
      if (r.algo == algo_label) series.push_back(uplink ? r.ul_bps : r.dl_bps);
    }
    return series;
  }

  std::map<int, double> per_drop;
  for (const auto& r : records) {
    if (r.algo != algo_label) continue;
    const double v = uplink ? r.ul_bps : r.dl_bps;
    auto [it, fresh] = per_drop.try_emplace(r.drop, v);
    if (!fresh) {
      it->second = per_drop_sum ? it->second + v : std::min(it->second, v);
    }
  }
  series.reserve(per_drop.size());
  for (const auto& [drop, v] : per_drop) series.push_back(v);
  return series;
}

}  // namespace cfmimo
