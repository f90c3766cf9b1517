// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/rates.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace cfmimo {

double noise_power(double bandwidth_hz, double noise_figure_dB) {
  if (!(bandwidth_hz > 0.0)) {
    throw std::invalid_argument("noise_power: bandwidth must be > 0");
  }
  // -174 dBm/Hz density; -30 converts dBm to dBW. Linear in W by
  // construction, so scaling the bandwidth scales the power exactly.
  return bandwidth_hz * std::pow(10.0, (-174.0 + noise_figure_dB - 30.0) / 10.0);
}

namespace {

void check_pilots(const PilotVector& pilots, int K) {
  if (static_cast<int>(pilots.size()) != K) {
    throw std::invalid_argument("pilot vector length " + std::to_string(pilots.size()) +
                                " != K = " + std::to_string(K));
  }
  for (int k = 0; k < K; ++k) {
    if (pilots[k] < 1) {
      throw std::invalid_argument("pilot index " + std::to_string(pilots[k]) +
                                  " for user " + std::to_string(k) + " is < 1");
    }
  }
}

}  // namespace

Matrix compute_gamma(const Matrix& beta, const PilotVector& pilots,
                     const SystemConfig& cfg) {
  const int K = static_cast<int>(beta.rows());
  const int M = static_cast<int>(beta.cols());
  check_pilots(pilots, K);

  int max_pilot = 0;
  for (int p : pilots) max_pilot = std::max(max_pilot, p);

  // pilot_sum[p][m] = sum over users on pilot p of eta_t * beta[j][m].
  Matrix pilot_sum(max_pilot + 1, M);
  pilot_sum.setZero();
  const double eta_t = cfg.eta_train();
  for (int j = 0; j < K; ++j) {
    for (int m = 0; m < M; ++m) {
      pilot_sum(pilots[j], m) += eta_t * beta(j, m);
    }
  }

  const double sigma_w2 = noise_power(cfg.W, cfg.noise_figure_dB);
  Matrix gamma(K, M);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      // t appears in the denominator's pilot sum, so ratio <= 1 and the
      // bound gamma <= N_AP * beta holds exactly in float arithmetic.
      const double t = eta_t * beta(k, m);
      const double ratio = t / (pilot_sum(pilots[k], m) + sigma_w2);
      gamma(k, m) = cfg.N_AP * (beta(k, m) * ratio);
    }
  }
  return gamma;
}

Matrix dl_power_coefficients(const Matrix& gamma, const ServingSets& serving,
                             DlPowerMode mode, const SystemConfig& cfg) {
  const int K = static_cast<int>(gamma.rows());
  const int M = static_cast<int>(gamma.cols());
  Matrix eta(K, M);
  eta.setZero();

  for (int m = 0; m < M; ++m) {
    const auto& served = serving.ms_of_ap[m];
    if (served.empty()) continue;
    if (mode == DlPowerMode::SumRate) {
      double denom = 0.0;
      for (int k : served) denom += gamma(k, m);
      for (int k : served) eta(k, m) = gamma(k, m) * cfg.P_dl_m / denom;
    } else {
      double denom = 0.0;
      for (int k : served) denom += std::pow(gamma(k, m), -cfg.alpha_dl);
      for (int k : served) {
        eta(k, m) = std::pow(gamma(k, m), -(cfg.alpha_dl + 1.0)) * cfg.P_dl_m / denom;
      }
    }
  }
  return eta;
}

Eigen::VectorXd ul_power_coefficients(const Matrix& gamma, const ServingSets& serving,
                                      const SystemConfig& cfg) {
  const int K = static_cast<int>(gamma.rows());
  Eigen::VectorXd eta(K);
  for (int k = 0; k < K; ++k) {
    double sum = 0.0;
    for (int m : serving.ap_of_ms[k]) sum += gamma(k, m);
    const double gamma_bar = std::sqrt(sum);
    if (gamma_bar == 0.0) {
      eta(k) = cfg.P_max_ul;
    } else {
      eta(k) = std::min(cfg.P_max_ul, cfg.P0_ul * std::pow(gamma_bar, -cfg.alpha_ul));
    }
  }
  return eta;
}

namespace {

double finish(double desired_sq, double noncoherent, double coherent, double noise,
              double samples, const SystemConfig& cfg, RateTerms& out) {
  if (noncoherent < 0.0 || coherent < 0.0 || desired_sq < 0.0) {
    throw std::logic_error("rate terms must be nonnegative");
  }
  out.desired = desired_sq;
  out.noncoherent = noncoherent;
  out.coherent = coherent;
  out.noise = noise;
  out.sinr = desired_sq / (noncoherent + coherent + noise);
  out.rate_bps = samples / cfg.tau_c * cfg.W * std::log2(1.0 + out.sinr);
  return out.rate_bps;
}

}  // namespace

RateTerms dl_rate_terms(int k, const Matrix& beta, const Matrix& gamma,
                        const Matrix& eta_dl, const PilotVector& pilots,
                        const ServingSets& serving, const SystemConfig& cfg) {
  const int K = static_cast<int>(beta.rows());

  double desired = 0.0;
  for (int m : serving.ap_of_ms[k]) desired += eta_dl(k, m) * gamma(k, m);

  double noncoherent = 0.0;
  for (int j = 0; j < K; ++j) {
    for (int m : serving.ap_of_ms[j]) {
      noncoherent += eta_dl(j, m) * beta(k, m) * gamma(j, m);
    }
  }

  // Training powers are uniform, so the sqrt(eta_k / eta_j) factor is one;
  // it is evaluated anyway to keep the term's shape.
  double coherent = 0.0;
  for (int j = 0; j < K; ++j) {
    if (j == k || pilots[j] != pilots[k]) continue;
    const double train_ratio = std::sqrt(cfg.eta_train() / cfg.eta_train());
    double inner = 0.0;
    for (int m : serving.ap_of_ms[j]) {
      inner += eta_dl(j, m) * train_ratio * gamma(j, m) * beta(k, m) / beta(j, m);
    }
    coherent += inner * inner;
  }

  const double sigma_z2 = noise_power(cfg.W, cfg.noise_figure_dB);
  RateTerms terms;
  finish(desired * desired, noncoherent, coherent, sigma_z2, cfg.tau_d, cfg, terms);
  return terms;
}

double dl_rate(int k, const Matrix& beta, const Matrix& gamma, const Matrix& eta_dl,
               const PilotVector& pilots, const ServingSets& serving,
               const SystemConfig& cfg) {
  return dl_rate_terms(k, beta, gamma, eta_dl, pilots, serving, cfg).rate_bps;
}

RateTerms ul_rate_terms(int k, const Matrix& beta, const Matrix& gamma,
                        const Eigen::VectorXd& eta_ul, const PilotVector& pilots,
                        const ServingSets& serving, const SystemConfig& cfg) {
  const int K = static_cast<int>(beta.rows());
  const auto& aps = serving.ap_of_ms[k];

  double gamma_sum = 0.0;
  for (int m : aps) gamma_sum += gamma(k, m);
  const double desired = eta_ul(k) * gamma_sum * gamma_sum;

  double noncoherent = 0.0;
  for (int j = 0; j < K; ++j) {
    double inner = 0.0;
    for (int m : aps) inner += beta(j, m) * gamma(k, m);
    noncoherent += eta_ul(j) * inner;
  }

  double coherent = 0.0;
  for (int j = 0; j < K; ++j) {
    if (j == k || pilots[j] != pilots[k]) continue;
    double inner = 0.0;
    for (int m : aps) inner += gamma(k, m) * beta(j, m) / beta(k, m);
    coherent += eta_ul(j) * inner * inner;
  }

  const double sigma_w2 = noise_power(cfg.W, cfg.noise_figure_dB);
  RateTerms terms;
  finish(desired, noncoherent, coherent, sigma_w2 * gamma_sum, cfg.tau_u, cfg, terms);
  return terms;
}

double ul_rate(int k, const Matrix& beta, const Matrix& gamma,
               const Eigen::VectorXd& eta_ul, const PilotVector& pilots,
               const ServingSets& serving, const SystemConfig& cfg) {
  return ul_rate_terms(k, beta, gamma, eta_ul, pilots, serving, cfg).rate_bps;
}

RateVector all_rates(const Drop& drop, const PilotVector& pilots, DlPowerMode mode,
                     const SystemConfig& cfg) {
  const int K = static_cast<int>(drop.beta.rows());
  const Matrix gamma = compute_gamma(drop.beta, pilots, cfg);
  const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, mode, cfg);
  const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);

  RateVector rates;
  rates.dl.resize(K);
  rates.ul.resize(K);
  for (int k = 0; k < K; ++k) {
    rates.dl(k) = dl_rate(k, drop.beta, gamma, eta_dl, pilots, drop.serving, cfg);
    rates.ul(k) = ul_rate(k, drop.beta, gamma, eta_ul, pilots, drop.serving, cfg);
  }
  return rates;
}

}  // namespace cfmimo
