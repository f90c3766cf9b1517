// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <vector>

#include "cfmimo/config.hpp"
#include "cfmimo/network.hpp"

namespace cfmimo {

// Pilot assignment: pilot_of[k] in {1..tau_p} for committed assignments.
// Candidate states built by the assignment algorithms may carry values
// > tau_p, meaning "a private pilot orthogonal to everything"; the rate
// formulas only ever test pilot equality, so no other handling is needed.
using PilotVector = std::vector<int>;

enum class DlPowerMode { SumRate, MinRate };

// Thermal noise power in W for -174 dBm/Hz density plus a noise figure.
double noise_power(double bandwidth_hz, double noise_figure_dB);

// Channel-estimate second moments:
//   gamma[k][m] = N_AP * eta_t * beta[k][m]^2
//                 / (sum_{j: pilot j = pilot k} eta_t * beta[j][m] + sigma_w^2)
// Evaluation order keeps gamma[k][m] <= N_AP * beta[k][m] exact in floats.
Matrix compute_gamma(const Matrix& beta, const PilotVector& pilots,
                     const SystemConfig& cfg);

// DL power coefficients, zero outside the serving sets.
//   SumRate: eta[k][m] = gamma[k][m] * P / sum_{k' in K_m} gamma[k'][m]
//            (per-AP sums telescope to exactly P)
//   MinRate: eta[k][m] = gamma[k][m]^-(alpha_dl+1) * P
//            / sum_{k' in K_m} gamma[k'][m]^-alpha_dl, as printed -- the
//            column sums deliberately do not renormalize to P.
Matrix dl_power_coefficients(const Matrix& gamma, const ServingSets& serving,
                             DlPowerMode mode, const SystemConfig& cfg);

// eta_k = min(P_max_ul, P0_ul * gamma_bar^-alpha_ul),
// gamma_bar = sqrt(sum_{m in M_k} gamma[k][m]); the cap applies at
// gamma_bar = 0.
Eigen::VectorXd ul_power_coefficients(const Matrix& gamma, const ServingSets& serving,
                                      const SystemConfig& cfg);

// SINR decomposition; every component is a sum of nonnegative quantities.
struct RateTerms {
  double desired = 0.0;      // squared coherent sum in the numerator
  double noncoherent = 0.0;  // beamforming-uncertainty + inter-user term
  double coherent = 0.0;     // pilot-contamination term (zero iff no co-pilot user)
  double noise = 0.0;
  double sinr = 0.0;
  double rate_bps = 0.0;
};

RateTerms dl_rate_terms(int k, const Matrix& beta, const Matrix& gamma,
                        const Matrix& eta_dl, const PilotVector& pilots,
                        const ServingSets& serving, const SystemConfig& cfg);
double dl_rate(int k, const Matrix& beta, const Matrix& gamma, const Matrix& eta_dl,
               const PilotVector& pilots, const ServingSets& serving,
               const SystemConfig& cfg);

RateTerms ul_rate_terms(int k, const Matrix& beta, const Matrix& gamma,
                        const Eigen::VectorXd& eta_ul, const PilotVector& pilots,
                        const ServingSets& serving, const SystemConfig& cfg);
double ul_rate(int k, const Matrix& beta, const Matrix& gamma,
               const Eigen::VectorXd& eta_ul, const PilotVector& pilots,
               const ServingSets& serving, const SystemConfig& cfg);

struct RateVector {
  Eigen::VectorXd dl;  // bit/s per user
  Eigen::VectorXd ul;
};

// Full pipeline for one assignment: gamma, both power-coefficient families,
// then per-user DL/UL rates. Everything is recomputed from scratch.
RateVector all_rates(const Drop& drop, const PilotVector& pilots, DlPowerMode mode,
                     const SystemConfig& cfg);

}  // namespace cfmimo
