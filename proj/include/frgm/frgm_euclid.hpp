// Matching graphs embedded in R^d: edge-length preservation followed by
// offset smoothing over a pruned Delaunay graph.
#pragma once

#include "frgm/core.hpp"
#include "frgm/features.hpp"
#include "frgm/lap.hpp"
#include "frgm/optimizer.hpp"
#include "frgm/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace frgm {

struct EuclideanProblem {
  Mat v1;    // m x d
  Mat v2;    // n x d
  Mat adj1;  // m x m adjacency weights
  Mat unary; // m x n, may be empty (treated as zero)
  double lambda1 = 0.99;
  double lambda2 = 0.5;
  SolverKind solver = SolverKind::kFrankWolfe;

  Eigen::Index m() const { return v1.rows(); }
  Eigen::Index n() const { return v2.rows(); }
  Mat unary_or_zero() const { return unary.size() ? unary : Mat::Zero(m(), n()); }
};

struct SmoothingGraph {
  Mat s;          // kept-edge indicator
  Mat laplacian;  // diag(S 1) - S
};

namespace detail {

struct Edge {
  int i, j;
  double w;
};

inline std::vector<Edge> edge_list(const Mat& adj) {
  std::vector<Edge> edges;
  for (Eigen::Index i = 0; i < adj.rows(); ++i)
    for (Eigen::Index j = i + 1; j < adj.cols(); ++j)
      if (adj(i, j) > 0) edges.push_back({static_cast<int>(i), static_cast<int>(j), adj(i, j)});
  return edges;
}

// Optimal 1-d 2-means split by exhaustive threshold search over the sorted
// values. Returns the first index of the upper cluster, or size() when the
// clusters are too close to be meaningful.
inline size_t two_means_split(std::vector<double> vals, double min_gap_fraction = 0.05) {
  if (vals.size() < 2) return vals.size();
  std::sort(vals.begin(), vals.end());
  std::vector<double> prefix(vals.size() + 1, 0.0), prefix2(vals.size() + 1, 0.0);
  for (size_t i = 0; i < vals.size(); ++i) {
    prefix[i + 1] = prefix[i] + vals[i];
    prefix2[i + 1] = prefix2[i] + vals[i] * vals[i];
  }
  auto sse = [&](size_t lo, size_t hi) {  // within-cluster sum of squares on [lo, hi)
    const double cnt = static_cast<double>(hi - lo);
    const double s = prefix[hi] - prefix[lo];
    return (prefix2[hi] - prefix2[lo]) - s * s / cnt;
  };
  size_t best = 1;
  double best_sse = std::numeric_limits<double>::infinity();
  for (size_t cut = 1; cut < vals.size(); ++cut) {
    const double total = sse(0, cut) + sse(cut, vals.size());
    if (total < best_sse) {
      best_sse = total;
      best = cut;
    }
  }
  const double mean_all = prefix[vals.size()] / static_cast<double>(vals.size());
  const double mean_lo = prefix[best] / static_cast<double>(best);
  const double mean_hi = (prefix[vals.size()] - prefix[best]) /
                         static_cast<double>(vals.size() - best);
  if (mean_hi - mean_lo < min_gap_fraction * std::max(mean_all, 1e-300))
    return vals.size();  // single cluster: drop nothing
  return best;
}

}  // namespace detail

// Edge-length preservation objective with a unary term.
inline Objective edge_length_objective(const EuclideanProblem& prob) {
  const auto edges = detail::edge_list(prob.adj1);
  const Mat unary = prob.unary_or_zero();
  std::vector<double> rest_len(edges.size());
  for (size_t e = 0; e < edges.size(); ++e)
    rest_len[e] = (prob.v1.row(edges[e].i) - prob.v1.row(edges[e].j)).norm();
  const Mat v2 = prob.v2;
  const double l1 = prob.lambda1;

  return Objective{
      .value =
          [=](const Mat& p) {
            const Mat t = p * v2;
            double pair = 0.0;
            for (size_t e = 0; e < edges.size(); ++e) {
              const double len = (t.row(edges[e].i) - t.row(edges[e].j)).norm();
              const double diff = rest_len[e] - len;
              pair += edges[e].w * diff * diff;
            }
            return (1.0 - l1) * p.cwiseProduct(unary).sum() + l1 * pair;
          },
      .gradient =
          [=](const Mat& p) {
            const Mat t = p * v2;
            Mat gt = Mat::Zero(t.rows(), t.cols());
            for (size_t e = 0; e < edges.size(); ++e) {
              const RowVec offset = t.row(edges[e].i) - t.row(edges[e].j);
              const double len = offset.norm();
              if (len < 1e-12) continue;  // zero subgradient at coincident nodes
              const RowVec contrib =
                  (-2.0 * edges[e].w * (rest_len[e] - len) / len) * offset;
              gt.row(edges[e].i) += contrib;
              gt.row(edges[e].j) -= contrib;
            }
            return Mat((1.0 - l1) * unary + l1 * gt * v2.transpose());
          },
      .line_coeffs = nullptr,
  };
}

// Delaunay adjacency of V1 with the longer-length k-means cluster of edges
// removed, plus the graph Laplacian of what remains.
inline SmoothingGraph build_smoothing_graph(const PointSet& v1) {
  const Mat adj = build_delaunay_adjacency(v1);
  auto edges = detail::edge_list(adj);
  std::vector<double> lengths(edges.size());
  for (size_t e = 0; e < edges.size(); ++e)
    lengths[e] = (v1.points.row(edges[e].i) - v1.points.row(edges[e].j)).norm();

  std::vector<double> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  const size_t cut = detail::two_means_split(lengths);
  const double threshold =
      cut < sorted.size() ? sorted[cut] : std::numeric_limits<double>::infinity();

  SmoothingGraph sg;
  sg.s = Mat::Zero(v1.size(), v1.size());
  for (size_t e = 0; e < edges.size(); ++e)
    if (lengths[e] < threshold) sg.s(edges[e].i, edges[e].j) = sg.s(edges[e].j, edges[e].i) = 1.0;
  sg.laplacian = Mat(sg.s.rowwise().sum().asDiagonal()) - sg.s;
  return sg;
}

// D_ij = || (P1 V2)_i - V2_j ||: distance from each transformed node to each
// candidate node.
inline Mat offset_distance(const SoftAssignment& p1, const Mat& /*v1*/, const Mat& v2) {
  return pairwise_distances(p1 * v2, v2);
}

// Convex offset-smoothing objective; exposes exact quadratic line-search
// coefficients.
inline Objective offset_smoothing_objective(const EuclideanProblem& prob,
                                            const SmoothingGraph& sg,
                                            const SoftAssignment& p1_star) {
  const Mat v2 = prob.v2;
  const Mat t1 = p1_star * v2;
  const Mat d = offset_distance(p1_star, prob.v1, v2);
  const Mat lap = sg.laplacian;
  const double l2 = prob.lambda2;

  return Objective{
      .value =
          [=](const Mat& p) {
            const Mat x = p * v2 - t1;
            return (1.0 - l2) * p.cwiseProduct(d).sum() +
                   l2 * (x.transpose() * lap * x).trace();
          },
      .gradient =
          [=](const Mat& p) {
            const Mat x = p * v2 - t1;
            return Mat((1.0 - l2) * d + 2.0 * l2 * lap * x * v2.transpose());
          },
      .line_coeffs =
          [=](const Mat& p, const Mat& dir) {
            const Mat x0 = p * v2 - t1;
            const Mat y = dir * v2;
            const double c2 = l2 * (y.transpose() * lap * y).trace();
            const double c1 = (1.0 - l2) * dir.cwiseProduct(d).sum() +
                              2.0 * l2 * (y.transpose() * lap * x0).trace();
            const double c0 = (1.0 - l2) * p.cwiseProduct(d).sum() +
                              l2 * (x0.transpose() * lap * x0).trace();
            return std::array<double, 3>{c0, c1, c2};
          },
  };
}

struct EuclideanMatch {
  Permutation perm;
  SoftAssignment p1_star;
  SoftAssignment p2_star;
  SolveReport stage1;
  SolveReport stage2;
  double binarity = 0.0;  // mean over rows of the largest entry of P2*
};

// Two-stage Euclidean matcher. The smoothing graph comes from a Delaunay
// triangulation for planar inputs and falls back to the problem adjacency in
// 3-d (no 3-d triangulation here).
inline EuclideanMatch match_euclidean(const EuclideanProblem& prob,
                                      const SolveOptions& opts = {}) {
  if (prob.m() > prob.n()) throw std::invalid_argument("match_euclidean: m > n");
  EuclideanMatch res;
  const SoftAssignment init = uniform_init(prob.m(), prob.n());
  res.stage1 = solve(prob.solver, edge_length_objective(prob), init, opts);
  res.p1_star = res.stage1.solution;

  SmoothingGraph sg;
  if (prob.v1.cols() == 2 && prob.m() >= 3) {
    try {
      sg = build_smoothing_graph(PointSet(prob.v1));
    } catch (const std::invalid_argument&) {
      sg.s = prob.adj1;  // degenerate geometry: reuse the problem adjacency
      sg.laplacian = Mat(sg.s.rowwise().sum().asDiagonal()) - sg.s;
    }
  } else {
    sg.s = prob.adj1;
    sg.laplacian = Mat(sg.s.rowwise().sum().asDiagonal()) - sg.s;
  }

  res.stage2 = solve(prob.solver, offset_smoothing_objective(prob, sg, res.p1_star), init, opts);
  res.p2_star = res.stage2.solution;
  res.perm = hungarian(-res.p2_star).perm;
  res.binarity = res.p2_star.rowwise().maxCoeff().mean();
  return res;
}

enum class AdjacencyKind { kComplete, kDelaunay, kKnn };

enum class UnarySource { kNone, kShapeContext, kRotationInvariantSC };

// Everything needed to assemble a Euclidean problem from two bare point sets;
// shared by the outlier loop, the deformable matcher, the benchmark harness
// and the CLI.
struct EuclidConfig {
  double lambda1 = 0.99;
  double lambda2 = 0.5;
  SolverKind solver = SolverKind::kFrankWolfe;
  AdjacencyKind adjacency = AdjacencyKind::kComplete;
  int knn_k = 8;
  UnarySource unary = UnarySource::kShapeContext;
  UnaryKind unary_metric = UnaryKind::kL2;
  SolveOptions solve_opts;
};

inline Mat build_adjacency(const PointSet& v, AdjacencyKind kind, int knn_k = 8) {
  const Eigen::Index m = v.size();
  switch (kind) {
    case AdjacencyKind::kDelaunay:
      if (v.dim() == 2 && m >= 3) return build_delaunay_adjacency(v);
      log_warn("build_adjacency: Delaunay unavailable, using complete graph");
      [[fallthrough]];
    case AdjacencyKind::kComplete: {
      Mat adj = Mat::Ones(m, m);
      adj.diagonal().setZero();
      return adj;
    }
    case AdjacencyKind::kKnn:
      return build_knn_adjacency(v, std::min<int>(knn_k, static_cast<int>(m) - 1));
  }
  throw std::invalid_argument("build_adjacency: unknown kind");
}

inline EuclideanProblem make_euclidean_problem(const Mat& v1, const Mat& v2,
                                               const EuclidConfig& cfg) {
  EuclideanProblem prob;
  prob.v1 = v1;
  prob.v2 = v2;
  prob.adj1 = build_adjacency(PointSet(v1), cfg.adjacency, cfg.knn_k);
  prob.lambda1 = cfg.lambda1;
  prob.lambda2 = cfg.lambda2;
  prob.solver = cfg.solver;
  if (cfg.unary != UnarySource::kNone && v1.cols() == 2 && v1.rows() >= 2 && v2.rows() >= 2) {
    const bool ri = cfg.unary == UnarySource::kRotationInvariantSC;
    const Mat f1 = ri ? rotation_invariant_shape_context(PointSet(v1))
                      : shape_context(PointSet(v1));
    const Mat f2 = ri ? rotation_invariant_shape_context(PointSet(v2))
                      : shape_context(PointSet(v2));
    prob.unary = unary_cost(f1, f2, cfg.unary_metric);
  }
  return prob;
}

inline EuclideanMatch match_euclidean(const Mat& v1, const Mat& v2, const EuclidConfig& cfg) {
  return match_euclidean(make_euclidean_problem(v1, v2, cfg), cfg.solve_opts);
}

}  // namespace frgm
