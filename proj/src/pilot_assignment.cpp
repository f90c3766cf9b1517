// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/pilot_assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfmimo {

namespace {

double rate_product(const RateVector& rates, int k) {
  return rates.dl(k) * rates.ul(k);
}

double pa_objective(const RateVector& rates, PaMode mode) {
  const int K = static_cast<int>(rates.dl.size());
  if (mode == PaMode::Shpa) {
    double sum = 0.0;
    for (int k = 0; k < K; ++k) sum += rate_product(rates, k);
    return sum;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) best = std::min(best, rate_product(rates, k));
  return best;
}

void check_initial(const PilotVector& pilots, int K, int tau_p) {
  if (static_cast<int>(pilots.size()) != K) {
    throw std::invalid_argument("initial assignment length != K");
  }
  for (int p : pilots) {
    if (p < 1 || p > tau_p) {
      throw std::invalid_argument("initial assignment holds pilot " + std::to_string(p) +
                                  " outside {1.." + std::to_string(tau_p) + "}");
    }
  }
}

}  // namespace

PilotVector random_assignment(int K, int tau_p, Rng& rng) {
  if (K < 1 || tau_p < 1) {
    throw std::invalid_argument("random_assignment: K and tau_p must be >= 1");
  }
  PilotVector pilots(K);
  if (K <= tau_p) {
    std::iota(pilots.begin(), pilots.end(), 1);
    return pilots;
  }
  for (int k = 0; k < K; ++k) pilots[k] = 1 + rng.uniform_int(tau_p);
  return pilots;
}

NeighborSets neighbor_set(int k, const Matrix& beta, int tau_p) {
  const int K = static_cast<int>(beta.rows());
  const int M = static_cast<int>(beta.cols());
  if (K < tau_p) {
    throw std::invalid_argument("neighbor_set: needs K >= tau_p (got K = " +
                                std::to_string(K) + ", tau_p = " + std::to_string(tau_p) +
                                "); use the distinct-pilot branch instead");
  }

  int best_ap = 0;
  for (int m = 1; m < M; ++m) {
    if (beta(k, m) > beta(k, best_ap)) best_ap = m;  // ties keep the smaller m
  }

  std::vector<int> others;
  others.reserve(K - 1);
  for (int j = 0; j < K; ++j) {
    if (j != k) others.push_back(j);
  }
  std::sort(others.begin(), others.end(), [&](int a, int b) {
    if (beta(a, best_ap) != beta(b, best_ap)) return beta(a, best_ap) > beta(b, best_ap);
    return a < b;
  });

  NeighborSets ns;
  ns.s.reserve(tau_p);
  ns.s.push_back(k);
  ns.s.insert(ns.s.end(), others.begin(), others.begin() + (tau_p - 1));
  ns.t.assign(others.begin() + (tau_p - 1), others.end());
  std::sort(ns.t.begin(), ns.t.end());
  return ns;
}

RewardMatrix reward_matrix(int k, const NeighborSets& ns, const Drop& drop,
                           const PilotVector& pilots, PaMode mode, DlPowerMode dl_mode,
                           const SystemConfig& cfg) {
  const int tau_p = cfg.tau_p;
  if (static_cast<int>(ns.s.size()) != tau_p) {
    throw std::invalid_argument("reward_matrix: |S_k| != tau_p");
  }

  // All of S_k starts on private orthogonal pilots (> tau_p, pairwise
  // distinct); each entry then moves only the candidate user onto q. This
  // makes entries independent of the pilots the rest of S_k holds or will
  // receive.
  PilotVector cand = pilots;
  for (int i = 0; i < tau_p; ++i) cand[ns.s[i]] = tau_p + 1 + i;

  RewardMatrix rewards(tau_p);
  for (int l = 0; l < tau_p; ++l) {
    const int user = ns.s[l];
    for (int q = 1; q <= tau_p; ++q) {
      cand[user] = q;

      const Matrix gamma = compute_gamma(drop.beta, cand, cfg);
      const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, dl_mode, cfg);
      const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);

      auto product = [&](int j) {
        return dl_rate(j, drop.beta, gamma, eta_dl, cand, drop.serving, cfg) *
               ul_rate(j, drop.beta, gamma, eta_ul, cand, drop.serving, cfg);
      };

      double value = product(user);
      if (mode == PaMode::Mhpa) {
        for (int t : ns.t) {
          if (pilots[t] == q) value = std::min(value, product(t));
        }
      }
      rewards.at(l, q - 1) = value;
    }
    cand[user] = tau_p + 1 + l;
  }
  (void)k;
  return rewards;
}

PaResult run_hungarian_pa_from(const Drop& drop, const SystemConfig& cfg,
                               const PaRunConfig& pa, PilotVector initial,
                               const PaHooks* hooks) {
  const int K = cfg.K;
  const int tau_p = cfg.tau_p;
  check_initial(initial, K, tau_p);

  PaResult result;
  result.pilots = std::move(initial);

  if (K <= tau_p) {
    // Contamination-free; nothing to optimize.
    result.rates = all_rates(drop, result.pilots, pa.dl_mode, cfg);
    result.sweeps_used = 1;
    result.objective_trace = {pa_objective(result.rates, pa.mode)};
    result.stop = PaStop::FixedPoint;
    return result;
  }

  std::vector<NeighborSets> neighbors;
  neighbors.reserve(K);
  for (int k = 0; k < K; ++k) neighbors.push_back(neighbor_set(k, drop.beta, tau_p));

  // The sweep map has no fixed point in general (overlapping S_k sets keep
  // re-matching each other), so convergence is detected on the objective:
  // stop once kStallSweeps consecutive sweeps fail to push the running best
  // up by more than rel_tol, and return the best state seen.
  constexpr int kStallSweeps = 3;

  PilotVector best_pilots = result.pilots;
  RateVector best_rates;
  double best_objective = -1.0;
  int stalled = 0;

  for (int sweep = 1; sweep <= pa.max_sweeps; ++sweep) {
    const PilotVector before = result.pilots;

    for (int k = 0; k < K; ++k) {
      const NeighborSets& ns = neighbors[k];
      const RewardMatrix rewards =
          reward_matrix(k, ns, drop, result.pilots, pa.mode, pa.dl_mode, cfg);

      std::vector<int> incumbent(tau_p);
      for (int l = 0; l < tau_p; ++l) incumbent[l] = result.pilots[ns.s[l]];

      const Assignment matched = solve_max(rewards);
      for (int l = 0; l < tau_p; ++l) result.pilots[ns.s[l]] = matched.perm[l] + 1;

      if (hooks && hooks->on_matching) {
        std::vector<int> sorted = incumbent;
        std::sort(sorted.begin(), sorted.end());
        const bool feasible =
            std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
        double incumbent_value = 0.0;
        if (feasible) {
          for (int l = 0; l < tau_p; ++l) incumbent_value += rewards.at(l, incumbent[l] - 1);
        }
        hooks->on_matching(k, ns, result.pilots, feasible, incumbent_value, matched.value);
      }
    }

    const RateVector rates = all_rates(drop, result.pilots, pa.dl_mode, cfg);
    const double objective = pa_objective(rates, pa.mode);
    result.objective_trace.push_back(objective);
    result.sweeps_used = sweep;

    if (objective > best_objective * (1.0 + pa.rel_tol)) {
      best_objective = objective;
      best_pilots = result.pilots;
      best_rates = rates;
      stalled = 0;
    } else {
      ++stalled;
    }

    if (result.pilots == before) {
      result.stop = PaStop::FixedPoint;
      break;
    }
    if (stalled >= kStallSweeps) {
      result.stop = PaStop::Stalled;
      break;
    }
    result.stop = PaStop::SweepCap;
  }

  result.pilots = std::move(best_pilots);
  result.rates = best_rates.dl.size() > 0
                     ? std::move(best_rates)
                     : all_rates(drop, result.pilots, pa.dl_mode, cfg);
  return result;
}

PaResult run_hungarian_pa(const Drop& drop, const SystemConfig& cfg, const PaRunConfig& pa,
                          Rng& rng, const PaHooks* hooks) {
  return run_hungarian_pa_from(drop, cfg, pa, random_assignment(cfg.K, cfg.tau_p, rng),
                               hooks);
}

PaResult run_greedy_baseline_from(const Drop& drop, const SystemConfig& cfg,
                                  const PaRunConfig& pa, PilotVector initial) {
  const int K = cfg.K;
  const int tau_p = cfg.tau_p;
  check_initial(initial, K, tau_p);

  PaResult result;
  result.pilots = std::move(initial);
  result.rates = all_rates(drop, result.pilots, pa.dl_mode, cfg);

  // One candidate evaluation: full statistics recompute, rate product of the
  // moved user only.
  auto candidate_product = [&](const PilotVector& cand, int user) {
    const Matrix gamma = compute_gamma(drop.beta, cand, cfg);
    const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, pa.dl_mode, cfg);
    const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);
    return dl_rate(user, drop.beta, gamma, eta_dl, cand, drop.serving, cfg) *
           ul_rate(user, drop.beta, gamma, eta_ul, cand, drop.serving, cfg);
  };

  const int max_updates = pa.max_sweeps * K;
  int updates = 0;
  bool stalled = false;
  result.stop = PaStop::SweepCap;
  while (!stalled && updates < max_updates) {
    const int block_end = std::min(updates + K, max_updates);
    for (; updates < block_end; ++updates) {
      int worst = 0;
      for (int k = 1; k < K; ++k) {
        if (rate_product(result.rates, k) < rate_product(result.rates, worst)) worst = k;
      }

      const int current_q = result.pilots[worst];
      double best_value = rate_product(result.rates, worst);
      int best_q = current_q;
      PilotVector cand = result.pilots;
      for (int q = 1; q <= tau_p; ++q) {
        if (q == current_q) continue;
        cand[worst] = q;
        const double value = candidate_product(cand, worst);
        if (value > best_value) {
          best_value = value;
          best_q = q;
        }
      }

      if (best_q == current_q) {
        stalled = true;
        result.stop = PaStop::Stalled;
        ++updates;
        break;
      }
      result.pilots[worst] = best_q;
      result.rates = all_rates(drop, result.pilots, pa.dl_mode, cfg);
    }
    result.objective_trace.push_back(pa_objective(result.rates, PaMode::Mhpa));
    ++result.sweeps_used;
  }
  return result;
}

PaResult run_greedy_baseline(const Drop& drop, const SystemConfig& cfg,
                             const PaRunConfig& pa, Rng& rng) {
  return run_greedy_baseline_from(drop, cfg, pa, random_assignment(cfg.K, cfg.tau_p, rng));
}

PaResult evaluate_assignment(const Drop& drop, const SystemConfig& cfg,
                             DlPowerMode dl_mode, PilotVector pilots) {
  check_initial(pilots, cfg.K, cfg.tau_p);
  PaResult result;
  result.pilots = std::move(pilots);
  result.rates = all_rates(drop, result.pilots, dl_mode, cfg);
  result.sweeps_used = 0;
  return result;
}

PaResult run_rpa(const Drop& drop, const SystemConfig& cfg, DlPowerMode dl_mode,
                 Rng& rng) {
  return evaluate_assignment(drop, cfg, dl_mode,
                             random_assignment(cfg.K, cfg.tau_p, rng));
}

}  // namespace cfmimo
