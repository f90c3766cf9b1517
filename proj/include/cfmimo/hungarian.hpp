// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace cfmimo {

/// Square matrix of nonnegative matching rewards, row-major.
/// Entries must be finite and >= 0; validate() names the offending cell.
class RewardMatrix {
 public:
  explicit RewardMatrix(int n);
  static RewardMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int order() const { return n_; }
  double& at(int row, int col) { return a_[static_cast<std::size_t>(row) * n_ + col]; }
  double at(int row, int col) const { return a_[static_cast<std::size_t>(row) * n_ + col]; }

  void validate() const;

  /// Uniformly rescaled copy; scaling by a positive constant preserves the
  /// set of optimal permutations.
  RewardMatrix scaled_by(double factor) const;

 private:
  int n_;
  std::vector<double> a_;
};

/// perm[row] = assigned column (0-based); value = sum of the selected
/// rewards accumulated in row order.
struct Assignment {
  std::vector<int> perm;
  double value = 0.0;
};

/// Maximum-total-reward assignment in O(n^3) via the potentials form of the
/// Hungarian method on the cost matrix (max_entry - a). Ties between equally
/// optimal matchings resolve to the lexicographically smallest permutation.
Assignment solve_max(const RewardMatrix& m);

/// Testing oracle: exhaustive enumeration of all n! permutations in
/// lexicographic order, keeping strict improvements only (so ties resolve to
/// the lexicographically smallest optimum, same rule as solve_max).
/// Refuses n > 10.
Assignment solve_brute_force(const RewardMatrix& m);

}  // namespace cfmimo
