// Ratio-test outlier removal on transformed-node distances, iterated with
// Euclidean matching.
#pragma once

#include "frgm/frgm_euclid.hpp"
#include "frgm/types.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace frgm {

// Keeps node j of V2 iff some transformed node has d_ij within k times its
// nearest distance. When fewer than m nodes survive, the removed nodes
// closest to the transformed set are re-added so a full matching stays
// possible. Returns sorted indices into V2.
inline std::vector<int> ratio_prune(const Mat& transformed_v1, const Mat& v2, double k) {
  if (k <= 1.0) throw std::invalid_argument("ratio_prune: k must exceed 1");
  const Eigen::Index m = transformed_v1.rows(), n = v2.rows();
  const Mat d = pairwise_distances(transformed_v1, v2);
  const Vec row_min = d.rowwise().minCoeff();

  std::vector<char> keep(n, 0);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      if (d(i, j) <= k * row_min(i)) {  // boundary ties kept
        keep[j] = 1;
        break;
      }

  std::vector<int> kept, removed;
  for (Eigen::Index j = 0; j < n; ++j) (keep[j] ? kept : removed).push_back(static_cast<int>(j));

  if (static_cast<Eigen::Index>(kept.size()) < m) {
    const Vec col_min = d.colwise().minCoeff();
    std::sort(removed.begin(), removed.end(), [&](int a, int b) {
      if (col_min(a) != col_min(b)) return col_min(a) < col_min(b);
      return a < b;
    });
    for (int j : removed) {
      kept.push_back(j);
      if (static_cast<Eigen::Index>(kept.size()) == m) break;
    }
    std::sort(kept.begin(), kept.end());
  }
  return kept;
}

struct RemovalConfig {
  double k = 2.0;
  int rounds = 3;
  EuclidConfig matcher;
};

struct RemovalResult {
  std::vector<int> kept;        // surviving V2 indices (original numbering)
  Permutation perm;             // final match, values in original V2 indices
  std::vector<size_t> kept_per_round;
};

// Alternates Euclidean matching with ratio pruning; the transformed nodes fed
// to the ratio test are P* V2 with the soft stage-2 map.
inline RemovalResult iterative_removal(const Mat& v1, const Mat& v2,
                                       const RemovalConfig& cfg = {}) {
  if (cfg.rounds < 1) throw std::invalid_argument("iterative_removal: rounds must be >= 1");
  RemovalResult res;
  res.kept.resize(v2.rows());
  std::iota(res.kept.begin(), res.kept.end(), 0);

  for (int round = 0; round < cfg.rounds; ++round) {
    Mat sub(res.kept.size(), v2.cols());
    for (size_t r = 0; r < res.kept.size(); ++r) sub.row(r) = v2.row(res.kept[r]);
    const EuclideanMatch match = match_euclidean(v1, sub, cfg.matcher);
    const Mat transformed = match.p2_star * sub;
    const std::vector<int> local = ratio_prune(transformed, sub, cfg.k);
    std::vector<int> next;
    next.reserve(local.size());
    for (int l : local) next.push_back(res.kept[l]);
    res.kept_per_round.push_back(next.size());
    const bool stable = next == res.kept;
    res.kept = std::move(next);
    if (stable) break;
  }

  Mat sub(res.kept.size(), v2.cols());
  for (size_t r = 0; r < res.kept.size(); ++r) sub.row(r) = v2.row(res.kept[r]);
  const EuclideanMatch final_match = match_euclidean(v1, sub, cfg.matcher);
  res.perm.assign.resize(final_match.perm.size());
  for (Eigen::Index i = 0; i < final_match.perm.size(); ++i)
    res.perm.assign[i] = res.kept[final_match.perm.assign[i]];
  return res;
}

}  // namespace frgm
