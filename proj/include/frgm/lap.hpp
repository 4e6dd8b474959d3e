// Linear assignment: O(n^3) Hungarian solver on potentials plus an
// exhaustive-search oracle for small instances.
#pragma once

#include "frgm/types.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace frgm {

struct LapResult {
  Permutation perm;
  double objective = 0.0;
};

// Minimum-cost injective assignment of the m rows into the n >= m columns.
// Rectangular inputs are padded with zero-cost dummy rows.
inline LapResult hungarian(const Mat& cost) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  if (m > n) throw std::invalid_argument("hungarian: more rows than columns");
  if (!cost.allFinite()) throw std::invalid_argument("hungarian: non-finite cost");

  const double inf = std::numeric_limits<double>::infinity();
  // 1-based potentials formulation over the padded n x n matrix.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  auto c = [&](int i, int j) -> double {  // 1-based, dummy rows cost 0
    return i <= m ? cost(i - 1, j - 1) : 0.0;
  };
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = c(i0, j) - u[i0] - v[j];
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
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0);
  }

  LapResult res;
  res.perm.assign.assign(m, -1);
  for (int j = 1; j <= n; ++j)
    if (match[j] >= 1 && match[j] <= m) res.perm.assign[match[j] - 1] = j - 1;
  for (Eigen::Index i = 0; i < m; ++i) res.objective += cost(i, res.perm.assign[i]);
  return res;
}

// Exhaustive optimum over all injections; oracle for hungarian, n <= 10.
inline LapResult brute_force_lap(const Mat& cost) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  if (m > n) throw std::invalid_argument("brute_force_lap: more rows than columns");
  if (n > 10) throw std::invalid_argument("brute_force_lap: instance too large (n > 10)");
  std::vector<int> cur(m, -1), best(m, -1);
  std::vector<char> used(n, 0);
  double best_obj = std::numeric_limits<double>::infinity();
  auto rec = [&](auto&& self, Eigen::Index row, double acc) -> void {
    if (row == m) {
      if (acc < best_obj) {
        best_obj = acc;
        best = cur;
      }
      return;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (used[j]) continue;
      used[j] = 1;
      cur[row] = static_cast<int>(j);
      self(self, row + 1, acc + cost(row, j));
      used[j] = 0;
    }
  };
  rec(rec, 0, 0.0);
  return {Permutation{best}, best_obj};
}

}  // namespace frgm
