// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/network.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cfmimo {

double wrap_distance(const Position& p, const Position& q, double side) {
  // Per-coordinate minimum over the toroidal images; for in-area points this
  // equals the minimum over the 9 shifted copies of q, and the symmetric
  // form keeps wrap_distance(p, q) == wrap_distance(q, p) bit for bit.
  double dx = std::abs(p.x - q.x);
  double dy = std::abs(p.y - q.y);
  dx = std::min(dx, side - dx);
  dy = std::min(dy, side - dy);
  return std::hypot(dx, dy);
}

double path_loss_dB(double distance_m, const SystemConfig& cfg) {
  const double d = std::max(distance_m, cfg.d_min);
  return cfg.pl_const_dB + cfg.pl_slope * std::log10(d / 1000.0);
}

Matrix generate_shadowing(const std::vector<Position>& ap_pos,
                          const std::vector<Position>& ms_pos,
                          const SystemConfig& cfg, Rng& rng) {
  const int M = static_cast<int>(ap_pos.size());
  const int K = static_cast<int>(ms_pos.size());
  Matrix z(K, M);
  if (cfg.sigma_sh_dB == 0.0) {
    z.setZero();
    return z;
  }

  Eigen::VectorXd a(M);
  for (int m = 0; m < M; ++m) a(m) = rng.normal();

  // b = L * innovations, L a Cholesky factor of the MS correlation matrix
  // 2^(-d/d_decorr). Exponential kernels are PD for distinct positions;
  // duplicated positions make the matrix semidefinite, handled by a jitter
  // ladder on the diagonal.
  Eigen::MatrixXd corr(K, K);
  for (int k = 0; k < K; ++k) {
    corr(k, k) = 1.0;
    for (int j = k + 1; j < K; ++j) {
      const double d = wrap_distance(ms_pos[k], ms_pos[j], cfg.side);
      const double c = std::exp2(-d / cfg.d_decorr);
      corr(k, j) = c;
      corr(j, k) = c;
    }
  }

  Eigen::MatrixXd chol;
  bool ok = false;
  for (const double jitter : {0.0, 1e-12, 1e-9, 1e-6}) {
    Eigen::MatrixXd attempt = corr;
    attempt.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(attempt);
    if (llt.info() == Eigen::Success) {
      chol = llt.matrixL();
      ok = true;
      break;
    }
  }
  if (!ok) {
    throw std::runtime_error(
        "generate_shadowing: MS correlation matrix is not positive semidefinite "
        "after diagonal jitter up to 1e-6");
  }

  Eigen::VectorXd innovations(K);
  for (int k = 0; k < K; ++k) innovations(k) = rng.normal();
  const Eigen::VectorXd b = chol * innovations;

  const double w_ap = std::sqrt(cfg.delta_sh);
  const double w_ms = std::sqrt(1.0 - cfg.delta_sh);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      z(k, m) = cfg.sigma_sh_dB * (w_ap * a(m) + w_ms * b(k));
    }
  }
  return z;
}

Matrix compute_lsf(const std::vector<Position>& ap_pos,
                   const std::vector<Position>& ms_pos, const Matrix& shadowing_dB,
                   const SystemConfig& cfg) {
  const int M = static_cast<int>(ap_pos.size());
  const int K = static_cast<int>(ms_pos.size());
  const double dh = cfg.h_AP - cfg.h_MS;
  Matrix beta(K, M);
  for (int k = 0; k < K; ++k) {
    for (int m = 0; m < M; ++m) {
      const double d2 = std::max(wrap_distance(ms_pos[k], ap_pos[m], cfg.side), cfg.d_min);
      const double d3 = std::hypot(d2, dh);
      const double loss_dB = path_loss_dB(d3, cfg) + shadowing_dB(k, m);
      beta(k, m) = std::pow(10.0, -loss_dB / 10.0);
    }
  }
  return beta;
}

ServingSets serving_sets(const Matrix& beta, int n_serving) {
  const int K = static_cast<int>(beta.rows());
  const int M = static_cast<int>(beta.cols());
  if (n_serving < 1 || n_serving > M) {
    throw std::invalid_argument("serving_sets: N_serving out of [1, M]");
  }

  ServingSets s;
  s.ap_of_ms.resize(K);
  s.ms_of_ap.resize(M);

  std::vector<int> order(M);
  for (int k = 0; k < K; ++k) {
    std::iota(order.begin(), order.end(), 0);
    // Largest beta first, ties to the smaller AP index.
    std::partial_sort(order.begin(), order.begin() + n_serving, order.end(),
                      [&](int a, int b) {
                        if (beta(k, a) != beta(k, b)) return beta(k, a) > beta(k, b);
                        return a < b;
                      });
    s.ap_of_ms[k].assign(order.begin(), order.begin() + n_serving);
    std::sort(s.ap_of_ms[k].begin(), s.ap_of_ms[k].end());
    for (int m : s.ap_of_ms[k]) s.ms_of_ap[m].push_back(k);
  }
  return s;
}

Drop generate_drop(const SystemConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);

  Drop drop;
  drop.ap_pos.resize(cfg.M);
  for (auto& p : drop.ap_pos) {
    p.x = rng.uniform(0.0, cfg.side);
    p.y = rng.uniform(0.0, cfg.side);
  }
  drop.ms_pos.resize(cfg.K);
  for (auto& p : drop.ms_pos) {
    p.x = rng.uniform(0.0, cfg.side);
    p.y = rng.uniform(0.0, cfg.side);
  }

  const Matrix z = generate_shadowing(drop.ap_pos, drop.ms_pos, cfg, rng);
  drop.beta = compute_lsf(drop.ap_pos, drop.ms_pos, z, cfg);
  drop.serving = serving_sets(drop.beta, cfg.N_serving);
  return drop;
}

}  // namespace cfmimo
