// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/rng.hpp"

namespace cfmimo {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

// Minimum Euclidean distance over the 9 toroidal images of q (shifts of
// 0, +/-side per coordinate). Never exceeds side * sqrt(2) / 2.
double wrap_distance(const Position& p, const Position& q, double side);

// PL(d) = pl_const_dB + pl_slope * log10(d / 1 km), with d clamped below
// cfg.d_min. Monotonically nondecreasing in d.
double path_loss_dB(double distance_m, const SystemConfig& cfg);

// Correlated log-normal shadowing, one dB value per (MS, AP) pair:
//   Z[k][m] = sigma_sh * (sqrt(delta) * a_m + sqrt(1 - delta) * b_k)
// a_m i.i.d. standard normal per AP; b_k jointly normal across MSs with
// corr(b_k, b_k') = 2^(-wrap_distance(k, k') / d_decorr). Draw order is
// fixed: a_1..a_M first, then the K innovations behind b.
// Throws if the MS correlation matrix stays non-PSD after diagonal jitter.
Matrix generate_shadowing(const std::vector<Position>& ap_pos,
                          const std::vector<Position>& ms_pos,
                          const SystemConfig& cfg, Rng& rng);

// beta[k][m] = 10^(-(PL(d_km) + Z[k][m]) / 10), with d_km the 3-D distance
// sqrt(max(d2D, d_min)^2 + (h_AP - h_MS)^2) over the wrapped area.
Matrix compute_lsf(const std::vector<Position>& ap_pos,
                   const std::vector<Position>& ms_pos, const Matrix& shadowing_dB,
                   const SystemConfig& cfg);

struct ServingSets {
  std::vector<std::vector<int>> ap_of_ms;  // M_k: ascending AP indices, |.| = N_serving
  std::vector<std::vector<int>> ms_of_ap;  // K_m: ascending MS indices, possibly empty
};

// M_k = indices of the N_serving largest beta[k][.], ties to the smaller AP
// index; K_m derived by inversion.
ServingSets serving_sets(const Matrix& beta, int n_serving);

// One network realization: geometry, LSF matrix, serving sets.
struct Drop {
  std::vector<Position> ap_pos;
  std::vector<Position> ms_pos;
  Matrix beta;          // K x M, strictly positive
  ServingSets serving;
};

// Pure function of (cfg, seed): AP positions, MS positions, shadowing, LSF,
// serving sets, in that draw order.
Drop generate_drop(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace cfmimo
