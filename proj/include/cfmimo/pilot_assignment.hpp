// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>

#include "cfmimo/hungarian.hpp"
#include "cfmimo/network.hpp"
#include "cfmimo/rates.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

enum class PaMode { Shpa, Mhpa };

struct PaRunConfig {
  PaMode mode = PaMode::Shpa;
  DlPowerMode dl_mode = DlPowerMode::SumRate;
  int max_sweeps = 20;
  double rel_tol = 0.02;
};

// S_k: the tau_p users matched together when user k is visited (k first,
// then neighbors by descending LSF at k's strongest AP). T_k: the rest.
struct NeighborSets {
  std::vector<int> s;
  std::vector<int> t;
};

enum class PaStop {
  None,        // no sweeps ran (plain evaluation)
  FixedPoint,  // a sweep left the assignment unchanged
  Stalled,     // objective stopped improving beyond rel_tol
  SweepCap,    // max_sweeps reached
};

struct PaResult {
  PilotVector pilots;
  int sweeps_used = 0;
  std::vector<double> objective_trace;  // one entry per sweep
  RateVector rates;
  PaStop stop = PaStop::None;
};

// Test instrumentation: called right after each Hungarian matching is
// applied. incumbent_value is the reward-matrix value of the pre-matching
// pilots of S_k (meaningful only when incumbent_feasible, i.e. they were
// pairwise distinct).
struct PaHooks {
  std::function<void(int k, const NeighborSets& ns, const PilotVector& pilots,
                     bool incumbent_feasible, double incumbent_value,
                     double matched_value)>
      on_matching;
};

// i.i.d. uniform pilots over {1..tau_p}; for K <= tau_p, the contamination
// free assignment 1..K instead.
PilotVector random_assignment(int K, int tau_p, Rng& rng);

// m* = argmax_m beta[k][m] (ties to smaller m); S_k = {k} + the tau_p - 1
// users with the largest beta[., m*] (ties to smaller user index).
// Requires K >= tau_p.
NeighborSets neighbor_set(int k, const Matrix& beta, int tau_p);

// Reward a[l][q-1] for giving pilot q to S_k[l]. The candidate state keeps
// every current pilot except: S_k[l] takes q and the other S_k members take
// private orthogonal pilots, so entries do not depend on the pilots held or
// received by the rest of S_k. Statistics are recomputed in full per entry.
// Shpa: the candidate user's DL*UL rate product. Mhpa: the smallest product
// among the candidate user and the T_k members currently holding q.
RewardMatrix reward_matrix(int k, const NeighborSets& ns, const Drop& drop,
                           const PilotVector& pilots, PaMode mode,
                           DlPowerMode dl_mode, const SystemConfig& cfg);

// Iterative Hungarian assignment: Gauss-Seidel sweeps over k = 0..K-1,
// matching S_k each visit and applying the result immediately. The sweep
// objective is the sum of DL*UL products (Shpa) or their minimum (Mhpa),
// recomputed in full after each sweep. Stops on an unchanged assignment, on
// three consecutive sweeps without a relative improvement > rel_tol of the
// running best, or at max_sweeps; the best-objective assignment seen is the
// one returned.
PaResult run_hungarian_pa(const Drop& drop, const SystemConfig& cfg,
                          const PaRunConfig& pa, Rng& rng,
                          const PaHooks* hooks = nullptr);
PaResult run_hungarian_pa_from(const Drop& drop, const SystemConfig& cfg,
                               const PaRunConfig& pa, PilotVector initial,
                               const PaHooks* hooks = nullptr);

// Worst-user greedy baseline: repeatedly move the user with the smallest
// DL*UL product to its best pilot with all others fixed; stop when the move
// no longer improves that user or after max_sweeps * K updates.
PaResult run_greedy_baseline(const Drop& drop, const SystemConfig& cfg,
                             const PaRunConfig& pa, Rng& rng);
PaResult run_greedy_baseline_from(const Drop& drop, const SystemConfig& cfg,
                                  const PaRunConfig& pa, PilotVector initial);

// Random assignment evaluated once; sweeps_used = 0.
PaResult run_rpa(const Drop& drop, const SystemConfig& cfg, DlPowerMode dl_mode,
                 Rng& rng);
PaResult evaluate_assignment(const Drop& drop, const SystemConfig& cfg,
                             DlPowerMode dl_mode, PilotVector pilots);

}  // namespace cfmimo
