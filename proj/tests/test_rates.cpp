// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cfmimo/rates.hpp"
#include "cfmimo/rng.hpp"

#include "rate_oracles.hpp"

using namespace cfmimo;

namespace {

// Synthetic network state with a hand-chosen LSF matrix, for closed-form and
// transcription checks without geometry in the way.
Drop make_drop(Matrix beta, int n_serving) {
  Drop d;
  d.beta = std::move(beta);
  d.serving = serving_sets(d.beta, n_serving);
  return d;
}

SystemConfig tiny_cfg(int K, int M, int tau_p, int n_serving) {
  SystemConfig cfg;
  cfg.K = K;
  cfg.M = M;
  cfg.tau_p = tau_p;
  cfg.N_serving = n_serving;
  cfg.tau_u = (cfg.tau_c - tau_p) / 2;
  cfg.tau_d = (cfg.tau_c - tau_p) / 2;
  return cfg;
}

Matrix random_beta(int K, int M, Rng& rng) {
  Matrix beta(K, M);
  for (int k = 0; k < K; ++k)
    for (int m = 0; m < M; ++m) beta(k, m) = std::pow(10.0, rng.uniform(-12.0, -8.0));
  return beta;
}

}  // namespace

TEST_CASE("noise power reference values") {
  CHECK(noise_power(1.0, 0.0) == doctest::Approx(std::pow(10.0, -20.4)).epsilon(1e-14));
  CHECK(noise_power(20e6, 9.0) ==
        doctest::Approx(std::pow(10.0, (-174.0 + 9.0 + 10.0 * std::log10(20e6) - 30.0) / 10.0))
            .epsilon(1e-12));
  // ~ -91.99 dBm
  CHECK(10.0 * std::log10(noise_power(20e6, 9.0)) + 30.0 == doctest::Approx(-91.99).epsilon(1e-4));
  CHECK(noise_power(2.0 * 7e6, 5.0) == 2.0 * noise_power(7e6, 5.0));
}

TEST_CASE("gamma: single-user closed form") {
  SystemConfig cfg = tiny_cfg(1, 1, 2, 1);
  Matrix beta(1, 1);
  beta(0, 0) = 3e-10;
  const Matrix gamma = compute_gamma(beta, {1}, cfg);
  const double et = cfg.eta_train();
  const double sw2 = noise_power(cfg.W, cfg.noise_figure_dB);
  const double expected = cfg.N_AP * et * beta(0, 0) * beta(0, 0) / (et * beta(0, 0) + sw2);
  CHECK(gamma(0, 0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("gamma: perfect-estimation limit approaches N_AP * beta") {
  SystemConfig cfg = tiny_cfg(1, 1, 2, 1);
  cfg.p_k = 1e6;  // pilot SNR -> infinity
  Matrix beta(1, 1);
  beta(0, 0) = 3e-10;
  const Matrix gamma = compute_gamma(beta, {1}, cfg);
  CHECK(gamma(0, 0) == doctest::Approx(cfg.N_AP * beta(0, 0)).epsilon(1e-9));
  CHECK(gamma(0, 0) <= cfg.N_AP * beta(0, 0));
}

TEST_CASE("gamma: equal co-pilot pair halves the effective pilot energy") {
  SystemConfig cfg = tiny_cfg(2, 1, 2, 1);
  const double b = 2e-10;
  Matrix beta(2, 1);
  beta << b, b;
  const double et = cfg.eta_train();
  const double sw2 = noise_power(cfg.W, cfg.noise_figure_dB);

  const Matrix shared = compute_gamma(beta, {1, 1}, cfg);
  CHECK(shared(0, 0) == doctest::Approx(cfg.N_AP * et * b * b / (2.0 * et * b + sw2)).epsilon(1e-14));

  const Matrix split = compute_gamma(beta, {1, 2}, cfg);
  CHECK(shared(0, 0) < split(0, 0));
}

TEST_CASE("gamma bounds and contamination monotonicity on random instances") {
  Rng rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const int K = 2 + rng.uniform_int(5);
    const int M = 1 + rng.uniform_int(5);
    SystemConfig cfg = tiny_cfg(K, M, 4, 1);
    const Matrix beta = random_beta(K, M, rng);
    PilotVector pilots(K);
    for (auto& p : pilots) p = 1 + rng.uniform_int(cfg.tau_p);

    const Matrix gamma = compute_gamma(beta, pilots, cfg);
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < M; ++m) {
        CHECK(gamma(k, m) >= 0.0);
        CHECK(gamma(k, m) <= cfg.N_AP * beta(k, m));
      }

    // Appending a co-pilot user never raises anyone's gamma.
    SystemConfig big = cfg;
    big.K = K + 1;
    Matrix beta2(K + 1, M);
    beta2.topRows(K) = beta;
    for (int m = 0; m < M; ++m) beta2(K, m) = std::pow(10.0, rng.uniform(-12.0, -8.0));
    PilotVector pilots2 = pilots;
    pilots2.push_back(pilots[rng.uniform_int(K)]);
    const Matrix gamma2 = compute_gamma(beta2, pilots2, big);
    for (int k = 0; k < K; ++k)
      for (int m = 0; m < M; ++m) CHECK(gamma2(k, m) <= gamma(k, m));
  }
}

TEST_CASE("DL power: single served MS takes the whole budget") {
  SystemConfig cfg = tiny_cfg(1, 1, 2, 1);
  Matrix gamma(1, 1);
  gamma(0, 0) = 7e-11;
  ServingSets s{{{0}}, {{0}}};
  const Matrix eta = dl_power_coefficients(gamma, s, DlPowerMode::SumRate, cfg);
  CHECK(eta(0, 0) == cfg.P_dl_m);
}

TEST_CASE("DL power: sum-rate mode splits proportionally and meets the budget") {
  SystemConfig cfg = tiny_cfg(2, 1, 2, 1);
  Matrix gamma(2, 1);
  gamma << 3e-10, 1e-10;
  ServingSets s{{{0}, {0}}, {{0, 1}}};
  const Matrix eta = dl_power_coefficients(gamma, s, DlPowerMode::SumRate, cfg);
  CHECK(eta(0, 0) == doctest::Approx(0.75 * cfg.P_dl_m).epsilon(1e-14));
  CHECK(eta(1, 0) == doctest::Approx(0.25 * cfg.P_dl_m).epsilon(1e-14));
  CHECK(eta(0, 0) + eta(1, 0) == doctest::Approx(cfg.P_dl_m).epsilon(1e-12));
}

TEST_CASE("DL power: per-AP budget holds on random instances, empty APs stay dark") {
  Rng rng(13);
  for (int rep = 0; rep < 30; ++rep) {
    const int K = 2 + rng.uniform_int(5);
    const int M = 2 + rng.uniform_int(5);
    const int n_serving = 1 + rng.uniform_int(M);
    SystemConfig cfg = tiny_cfg(K, M, 4, n_serving);
    const Matrix beta = random_beta(K, M, rng);
    const ServingSets s = serving_sets(beta, n_serving);
    PilotVector pilots(K, 1);
    const Matrix gamma = compute_gamma(beta, pilots, cfg);
    const Matrix eta = dl_power_coefficients(gamma, s, DlPowerMode::SumRate, cfg);
    for (int m = 0; m < M; ++m) {
      const double col = eta.col(m).sum();
      if (s.ms_of_ap[m].empty()) {
        CHECK(col == 0.0);
      } else {
        CHECK(std::abs(col - cfg.P_dl_m) <= 1e-9 * cfg.P_dl_m);
      }
      for (int k = 0; k < K; ++k) {
        if (!test_oracle::serves(s, m, k)) CHECK(eta(k, m) == 0.0);
      }
    }
  }
}

TEST_CASE("UL power: fractional region, cap, and monotonicity") {
  SystemConfig cfg = tiny_cfg(3, 1, 2, 1);
  Matrix gamma(3, 1);
  gamma << 1e-6, 1e-16, 4e-6;
  ServingSets s{{{0}, {0}, {0}}, {{0, 1, 2}}};
  const Eigen::VectorXd eta = ul_power_coefficients(gamma, s, cfg);
  // gamma_bar = sqrt(1e-6) = 1e-3; P0 * (1e-3)^-0.5 ~ 3.16e-3 < cap.
  CHECK(eta(0) == doctest::Approx(cfg.P0_ul * std::pow(1e-3, -0.5)).epsilon(1e-12));
  CHECK(eta(0) < cfg.P_max_ul);
  // Vanishing gamma_bar saturates the cap.
  CHECK(eta(1) == cfg.P_max_ul);
  // Larger gamma_bar never gets more power.
  CHECK(eta(2) <= eta(0));

  // Boundary: gamma_bar = 1e-6 puts P0 * gamma_bar^-0.5 exactly at the cap.
  Matrix g2(1, 1);
  g2(0, 0) = 1e-12;
  ServingSets s2{{{0}}, {{0}}};
  const Eigen::VectorXd eta2 = ul_power_coefficients(g2, s2, cfg);
  CHECK(eta2(0) == doctest::Approx(cfg.P_max_ul).epsilon(1e-12));
}

TEST_CASE("zero DL power means zero DL rate") {
  SystemConfig cfg = tiny_cfg(2, 2, 2, 2);
  Rng rng(3);
  const Drop drop = make_drop(random_beta(2, 2, rng), 2);
  const PilotVector pilots{1, 2};
  const Matrix gamma = compute_gamma(drop.beta, pilots, cfg);
  const Matrix eta = Matrix::Zero(2, 2);
  CHECK(dl_rate(0, drop.beta, gamma, eta, pilots, drop.serving, cfg) == 0.0);
}

TEST_CASE("single-user, single-AP closed forms") {
  SystemConfig cfg = tiny_cfg(1, 1, 2, 1);
  Matrix beta(1, 1);
  beta(0, 0) = 5e-10;
  const Drop drop = make_drop(beta, 1);
  const PilotVector pilots{1};
  const Matrix gamma = compute_gamma(beta, pilots, cfg);
  const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, DlPowerMode::SumRate, cfg);
  const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);

  const double g = gamma(0, 0), b = beta(0, 0);
  const double sz2 = noise_power(cfg.W, cfg.noise_figure_dB);

  const double dl_sinr = (eta_dl(0, 0) * g) * (eta_dl(0, 0) * g) / (eta_dl(0, 0) * b * g + sz2);
  const double dl_expected = static_cast<double>(cfg.tau_d) / cfg.tau_c * cfg.W * std::log2(1.0 + dl_sinr);
  CHECK(dl_rate(0, beta, gamma, eta_dl, pilots, drop.serving, cfg) ==
        doctest::Approx(dl_expected).epsilon(1e-13));

  const double ul_sinr = eta_ul(0) * g * g / (eta_ul(0) * b * g + sz2 * g);
  const double ul_expected = static_cast<double>(cfg.tau_u) / cfg.tau_c * cfg.W * std::log2(1.0 + ul_sinr);
  CHECK(ul_rate(0, beta, gamma, eta_ul, pilots, drop.serving, cfg) ==
        doctest::Approx(ul_expected).epsilon(1e-13));
}

TEST_CASE("mirrored co-pilot users see identical rates") {
  SystemConfig cfg = tiny_cfg(2, 2, 1, 2);
  Matrix beta(2, 2);
  beta << 4e-10, 9e-11,
          9e-11, 4e-10;
  const Drop drop = make_drop(beta, 2);
  const PilotVector pilots{1, 1};
  const Matrix gamma = compute_gamma(beta, pilots, cfg);
  const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, DlPowerMode::SumRate, cfg);
  const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);

  CHECK(dl_rate(0, beta, gamma, eta_dl, pilots, drop.serving, cfg) ==
        doctest::Approx(dl_rate(1, beta, gamma, eta_dl, pilots, drop.serving, cfg))
            .epsilon(1e-13));
  CHECK(ul_rate(0, beta, gamma, eta_ul, pilots, drop.serving, cfg) ==
        doctest::Approx(ul_rate(1, beta, gamma, eta_ul, pilots, drop.serving, cfg))
            .epsilon(1e-13));
}

TEST_CASE("distinct pilots zero the coherent interference exactly") {
  SystemConfig cfg = tiny_cfg(3, 3, 3, 2);
  Rng rng(17);
  const Drop drop = make_drop(random_beta(3, 3, rng), 2);
  const PilotVector pilots{1, 2, 3};
  const Matrix gamma = compute_gamma(drop.beta, pilots, cfg);
  const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, DlPowerMode::MinRate, cfg);
  const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);
  for (int k = 0; k < 3; ++k) {
    CHECK(dl_rate_terms(k, drop.beta, gamma, eta_dl, pilots, drop.serving, cfg).coherent == 0.0);
    CHECK(ul_rate_terms(k, drop.beta, gamma, eta_ul, pilots, drop.serving, cfg).coherent == 0.0);
  }

  // Re-pointing one user onto k's pilot turns the coherent term back on.
  const PilotVector clash{1, 1, 3};
  const Matrix gamma2 = compute_gamma(drop.beta, clash, cfg);
  const Matrix eta2 = dl_power_coefficients(gamma2, drop.serving, DlPowerMode::MinRate, cfg);
  CHECK(dl_rate_terms(0, drop.beta, gamma2, eta2, clash, drop.serving, cfg).coherent > 0.0);
}

TEST_CASE("production rates match the verbatim transcription oracle") {
  Rng rng(2718);
  for (int rep = 0; rep < 20; ++rep) {
    const int K = 1 + rng.uniform_int(4);   // K <= 4
    const int M = 1 + rng.uniform_int(5);   // M <= 5
    const int n_serving = 1 + rng.uniform_int(M);
    const int tau_p = 2 + rng.uniform_int(2);
    SystemConfig cfg = tiny_cfg(K, M, tau_p, n_serving);
    const Matrix beta = random_beta(K, M, rng);
    const Drop drop = make_drop(beta, n_serving);
    PilotVector pilots(K);
    for (auto& p : pilots) p = 1 + rng.uniform_int(tau_p);
    const DlPowerMode mode = rep % 2 == 0 ? DlPowerMode::SumRate : DlPowerMode::MinRate;

    const Matrix gamma = compute_gamma(beta, pilots, cfg);
    const Matrix eta_dl = dl_power_coefficients(gamma, drop.serving, mode, cfg);
    const Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);

    for (int k = 0; k < K; ++k) {
      const double dl = dl_rate(k, beta, gamma, eta_dl, pilots, drop.serving, cfg);
      const double dl_oracle = test_oracle::dl_rate(k, beta, gamma, eta_dl, pilots, drop.serving, cfg);
      CHECK(std::abs(dl - dl_oracle) <= 1e-12 * std::max(std::abs(dl_oracle), 1e-300));

      const double ul = ul_rate(k, beta, gamma, eta_ul, pilots, drop.serving, cfg);
      const double ul_oracle = test_oracle::ul_rate(k, beta, gamma, eta_ul, pilots, drop.serving, cfg);
      CHECK(std::abs(ul - ul_oracle) <= 1e-12 * std::max(std::abs(ul_oracle), 1e-300));
    }
  }
}

TEST_CASE("rate evaluation is pure: identical inputs, identical bits") {
  SystemConfig cfg = tiny_cfg(3, 4, 2, 3);
  Rng rng(5);
  const Drop drop = make_drop(random_beta(3, 4, rng), 3);
  const PilotVector pilots{1, 2, 1};
  const RateVector a = all_rates(drop, pilots, DlPowerMode::MinRate, cfg);
  const RateVector b = all_rates(drop, pilots, DlPowerMode::MinRate, cfg);
  for (int k = 0; k < 3; ++k) {
    CHECK(a.dl(k) == b.dl(k));
    CHECK(a.ul(k) == b.ul(k));
    CHECK(a.dl(k) >= 0.0);
    CHECK(a.ul(k) >= 0.0);
  }
}

TEST_CASE("removing a co-pilot interferer never lowers the UL rate (gamma fixed)") {
  Rng rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const int K = 3 + rng.uniform_int(3);
    const int M = 2 + rng.uniform_int(3);
    SystemConfig cfg = tiny_cfg(K, M, 2, M);
    const Drop drop = make_drop(random_beta(K, M, rng), M);
    PilotVector pilots(K);
    for (auto& p : pilots) p = 1 + rng.uniform_int(2);

    const Matrix gamma = compute_gamma(drop.beta, pilots, cfg);
    Eigen::VectorXd eta_ul = ul_power_coefficients(gamma, drop.serving, cfg);

    int j = -1;
    for (int cand = 1; cand < K; ++cand) {
      if (pilots[cand] == pilots[0]) j = cand;
    }
    if (j < 0) continue;

    const double before = ul_rate(0, drop.beta, gamma, eta_ul, pilots, drop.serving, cfg);
    // Remove user j's transmissions and pilot collision, gamma untouched.
    PilotVector without = pilots;
    without[j] = cfg.tau_p + 1;
    Eigen::VectorXd eta_without = eta_ul;
    eta_without(j) = 0.0;
    const double after = ul_rate(0, drop.beta, gamma, eta_without, without, drop.serving, cfg);
    CHECK(after >= before);
  }
}
