// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>

namespace cfmimo {

// K x M matrices (users by access points) are stored row-major so that the
// per-user rows walked by the rate kernels are contiguous.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Scalar parameters of the simulated network. Defaults reproduce the
// reference setup: 20 MHz at 1.9 GHz, 100 four-antenna APs and 40 single
// antenna users on a wrapped 1 km square, 8 orthogonal pilots out of a
// 200-sample coherence interval, NLOS pico path loss with correlated
// log-normal shadowing.
struct SystemConfig {
  double W = 20e6;                // bandwidth, Hz
  double f0 = 1.9e9;              // carrier, Hz
  double h_AP = 10.0;             // AP antenna height, m
  double h_MS = 1.65;             // MS antenna height, m
  double noise_figure_dB = 9.0;   // receiver noise figure, both ends

  int M = 100;                    // number of APs
  int N_AP = 4;                   // antennas per AP
  int K = 40;                     // number of MSs
  int tau_p = 8;                  // pilot sequence length / count
  int tau_c = 200;                // coherence interval, samples
  int tau_u = 96;                 // UL data samples, default (tau_c - tau_p) / 2
  int tau_d = 96;                 // DL data samples, default (tau_c - tau_p) / 2
  int N_serving = 20;             // APs serving each MS

  double p_k = 0.1;               // per-MS pilot symbol power, W
  double P_dl_m = 0.2;            // per-AP DL power budget, W
  double P0_ul = 1e-4;            // UL fractional power-control target, W (-10 dBm)
  double P_max_ul = 0.1;          // UL power cap, W
  double alpha_dl = -0.5;         // DL min-rate power-control exponent
  double alpha_ul = 0.5;          // UL fractional power-control exponent

  double side = 1000.0;           // area side, m
  double pl_const_dB = 140.7;     // path loss at 1 km, dB
  double pl_slope = 36.7;         // path loss slope, dB/decade
  double sigma_sh_dB = 8.0;       // shadowing std, dB
  double d_decorr = 9.0;          // MS shadowing decorrelation distance, m
  double delta_sh = 0.5;          // AP/MS shadowing mixing weight in [0, 1]
  double d_min = 10.0;            // 2-D distance clamp before path loss, m

  // Training energy eta_tilde_k = tau_p * p_k (uniform across users).
  double eta_train() const { return static_cast<double>(tau_p) * p_k; }

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  // Flat key-value text (`key = value`, `#` comments). Unset keys keep their
  // defaults; tau_u/tau_d default to (tau_c - tau_p) / 2 after overrides.
  static SystemConfig from_text(const std::string& text);
  static SystemConfig from_file(const std::filesystem::path& path);
};

}  // namespace cfmimo
