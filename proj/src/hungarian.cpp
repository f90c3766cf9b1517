// SPDX-License-Identifier: Apache-2.0
#include "cfmimo/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfmimo {

RewardMatrix::RewardMatrix(int n) : n_(n) {
  if (n <= 0) {
    throw std::invalid_argument("RewardMatrix: order must be positive, got " +
                                std::to_string(n));
  }
  a_.assign(static_cast<std::size_t>(n) * n, 0.0);
}

RewardMatrix RewardMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  RewardMatrix m(static_cast<int>(rows.size()));
  for (int i = 0; i < m.n_; ++i) {
    if (static_cast<int>(rows[i].size()) != m.n_) {
      throw std::invalid_argument("RewardMatrix: row " + std::to_string(i) +
                                  " has length " + std::to_string(rows[i].size()) +
                                  ", expected " + std::to_string(m.n_));
    }
    for (int j = 0; j < m.n_; ++j) m.at(i, j) = rows[i][j];
  }
  m.validate();
  return m;
}

void RewardMatrix::validate() const {
  for (int i = 0; i < n_; ++i) {
    for (int j = 0; j < n_; ++j) {
      const double v = at(i, j);
      if (!std::isfinite(v)) {
        throw std::invalid_argument("RewardMatrix: non-finite entry at (" +
                                    std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      if (v < 0.0) {
        throw std::invalid_argument("RewardMatrix: negative entry " + std::to_string(v) +
                                    " at (" + std::to_string(i) + ", " +
                                    std::to_string(j) + ")");
      }
    }
  }
}

RewardMatrix RewardMatrix::scaled_by(double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor)) {
    throw std::invalid_argument("RewardMatrix::scaled_by: factor must be positive and finite");
  }
  RewardMatrix out(n_);
  for (std::size_t i = 0; i < a_.size(); ++i) out.a_[i] = a_[i] * factor;
  return out;
}

namespace {

double assignment_value(const RewardMatrix& m, const std::vector<int>& perm) {
  double v = 0.0;
  for (int i = 0; i < m.order(); ++i) v += m.at(i, perm[i]);
  return v;
}

// Potentials (dual) form of the Hungarian method on a min-cost matrix,
// one Dijkstra-like row insertion per row, O(n^3) total. Scan order is
// ascending in the column index, so among equal candidates the smallest
// column wins at every step.
std::vector<int> solve_min_cost(const std::vector<double>& cost, int n) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> perm(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] != 0) perm[p[j] - 1] = j - 1;
  }
  return perm;
}

}  // namespace

namespace {

// Maximization reduces to min cost with cost = max_entry - a.
std::vector<int> solve_max_base(const RewardMatrix& m, const std::vector<int>& rows,
                                const std::vector<int>& cols) {
  const int n = static_cast<int>(rows.size());
  double max_entry = 0.0;
  for (int i : rows)
    for (int j : cols) max_entry = std::max(max_entry, m.at(i, j));

  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[static_cast<std::size_t>(i) * n + j] = max_entry - m.at(rows[i], cols[j]);

  const std::vector<int> sub_perm = solve_min_cost(cost, n);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = cols[sub_perm[i]];
  return perm;  // perm[i] = original column for original row rows[i]
}

bool has_duplicate_entries(const RewardMatrix& m) {
  const int n = m.order();
  std::vector<double> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.push_back(m.at(i, j));
  std::sort(entries.begin(), entries.end());
  return std::adjacent_find(entries.begin(), entries.end()) != entries.end();
}

}  // namespace

Assignment solve_max(const RewardMatrix& m) {
  m.validate();
  const int n = m.order();

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  const std::vector<int> base = solve_max_base(m, all, all);
  const double value = assignment_value(m, base);

  // Lexicographic tie resolution by prefix forcing: row by row, fix the
  // smallest column whose forced subproblem still completes to the optimal
  // value. Completions are compared through full row-order sums, which makes
  // the test exact whenever ties come from repeated entries (the case that
  // actually occurs in reward matrices). Skipped for large tie-free inputs,
  // where the optimum is unique and the base permutation already is it.
  if (n > 12 && !has_duplicate_entries(m)) {
    return Assignment{base, value};
  }

  std::vector<int> forced(n, -1);
  std::vector<char> used(n, 0);
  for (int i = 0; i < n && n > 1; ++i) {
    int chosen = -1;
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      std::vector<int> rows, cols;
      for (int r = i + 1; r < n; ++r) rows.push_back(r);
      for (int j = 0; j < n; ++j) {
        if (!used[j] && j != c) cols.push_back(j);
      }
      std::vector<int> candidate = forced;
      candidate[i] = c;
      if (!rows.empty()) {
        const std::vector<int> tail = solve_max_base(m, rows, cols);
        for (std::size_t r = 0; r < rows.size(); ++r) candidate[rows[r]] = tail[r];
      }
      if (assignment_value(m, candidate) == value) {
        chosen = c;
        break;
      }
    }
    if (chosen < 0) {
      // Grouping dust kept every completion off the base value; the base
      // permutation is still an optimum.
      return Assignment{base, value};
    }
    forced[i] = chosen;
    used[chosen] = 1;
  }
  if (n == 1) forced[0] = 0;

  return Assignment{forced, value};
}

Assignment solve_brute_force(const RewardMatrix& m) {
  m.validate();
  const int n = m.order();
  if (n > 10) {
    throw std::invalid_argument("solve_brute_force: refusing n = " + std::to_string(n) +
                                " > 10 (factorial enumeration)");
  }

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<int> best = perm;
  double best_value = assignment_value(m, perm);
  while (std::next_permutation(perm.begin(), perm.end())) {
    const double v = assignment_value(m, perm);
    if (v > best_value) {  // strict: the first (lex-smallest) optimum is kept
      best_value = v;
      best = perm;
    }
  }
  return Assignment{best, best_value};
}

}  // namespace cfmimo
