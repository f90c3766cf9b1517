// SPDX-License-Identifier: Apache-2.0
//
// cfmimo-sim: Monte Carlo driver for the pilot-assignment simulator.
//
//   cfmimo-sim simulate --config net.cfg --drops 200 --algos rpa,shpa,mhpa,greedy \
//       --seed 1 --out results/
//   cfmimo-sim cdf --in results/records.csv --metric dl_min --algo mhpa --out mhpa.dat
//
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cfmimo/campaign.hpp"

namespace {

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

int run_simulate(const std::string& config_path, int drops, const std::string& algos,
                 std::uint64_t seed, const std::string& out_dir, int threads,
                 int max_sweeps, double rel_tol) {
  cfmimo::CampaignConfig cfg;
  if (!config_path.empty()) {
    cfg.system = cfmimo::SystemConfig::from_file(config_path);
  }
  cfg.n_drops = drops;
  cfg.master_seed = seed;
  cfg.n_threads = threads;
  cfg.max_sweeps = max_sweeps;
  cfg.rel_tol = rel_tol;
  for (const auto& token : split_csv_list(algos)) {
    cfg.algorithms.push_back(cfmimo::parse_algo_spec(token));
  }

  const cfmimo::CampaignResult result = cfmimo::run_campaign(cfg);
  cfmimo::emit_outputs(result, out_dir);

  for (const auto& s : result.summaries) {
    std::printf("%-10s dl5%%=%.4g Mbps  ul5%%=%.4g Mbps  med(dl_min)=%.4g  med(ul_min)=%.4g  sweeps=%.2f\n",
                s.label.c_str(), s.dl_5pct_bps / 1e6, s.ul_5pct_bps / 1e6,
                s.median_dl_min_bps / 1e6, s.median_ul_min_bps / 1e6, s.mean_sweeps);
  }
  std::printf("wrote %zu records to %s\n", result.records.size(), out_dir.c_str());
  return 0;
}

int run_cdf(const std::string& in_csv, const std::string& metric, std::string algo,
            const std::string& out_file) {
  const auto records = cfmimo::parse_records_csv(in_csv);

  if (algo.empty()) {
    std::set<std::string> labels;
    for (const auto& r : records) labels.insert(r.algo);
    if (labels.size() != 1) {
      std::ostringstream msg;
      msg << "records.csv contains " << labels.size()
          << " algorithms; pick one with --algo (found:";
      for (const auto& l : labels) msg << ' ' << l;
      msg << ")";
      throw std::runtime_error(msg.str());
    }
    algo = *labels.begin();
  }

  const auto series = cfmimo::metric_series(records, algo, metric);
  if (series.empty()) {
    throw std::runtime_error("no records for algorithm '" + algo + "'");
  }

  std::ofstream out(out_file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + out_file + "' for writing");
  out << "# value probability\n";
  for (const auto& [value, prob] : cfmimo::empirical_cdf(series)) {
    char line[80];
    std::snprintf(line, sizeof line, "%.17g %.17g\n", value, prob);
    out << line;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cell-free massive MIMO pilot-assignment simulator"};
  app.require_subcommand(1);

  std::string config_path, algos = "rpa,shpa,mhpa,greedy", out_dir = "results";
  int drops = 200, threads = 0, max_sweeps = 20;
  double rel_tol = 0.02;
  std::uint64_t seed = 1;

  auto* sim = app.add_subcommand("simulate", "run a Monte Carlo campaign");
  sim->add_option("--config", config_path, "key = value config file (defaults otherwise)");
  sim->add_option("--drops", drops, "number of network drops")->check(CLI::PositiveNumber);
  sim->add_option("--algos", algos, "comma list: rpa,shpa,mhpa,greedy with optional :sr/:mr");
  sim->add_option("--seed", seed, "master seed");
  sim->add_option("--out", out_dir, "output directory");
  sim->add_option("--threads", threads, "worker threads (0 = hardware)");
  sim->add_option("--max-sweeps", max_sweeps, "assignment sweep cap")->check(CLI::PositiveNumber);
  sim->add_option("--rel-tol", rel_tol, "convergence tolerance on the objective");

  std::string in_csv, metric = "dl_user", algo, out_file = "cdf.dat";
  auto* cdf = app.add_subcommand("cdf", "empirical CDF from a records.csv");
  cdf->add_option("--in", in_csv, "records.csv path")->required();
  cdf->add_option("--metric", metric, "dl_user, ul_user, dl_sum, ul_sum, dl_min, ul_min");
  cdf->add_option("--algo", algo, "algorithm label (required when the csv has several)");
  cdf->add_option("--out", out_file, "output data file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return run_simulate(config_path, drops, algos, seed, out_dir, threads, max_sweeps,
                          rel_tol);
    }
    return run_cdf(in_csv, metric, algo, out_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
