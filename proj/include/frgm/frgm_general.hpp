// General graph matching on function spaces: the transported-attribute matrix
// F(P) = P E2 P^T, the two-stage objectives over it, and the full matcher.
#pragma once

#include "frgm/core.hpp"
#include "frgm/lap.hpp"
#include "frgm/optimizer.hpp"
#include "frgm/sinkhorn.hpp"
#include "frgm/types.hpp"

#include <cmath>
#include <utility>

namespace frgm {

enum class FunctionMetric { kWasserstein, kInnerProduct };

struct GeneralProblem {
  Mat adj1;     // m x m adjacency weights of graph 1
  Mat e1_hat;   // exp-normalized edge attributes (inner-product functional)
  Mat e2_hat;   // n x n
  Mat e1_raw;   // max-normalized raw metrics (distance functional)
  Mat e2_raw;
  Mat unary;    // m x n dissimilarities, may be zero
  double alpha1 = 0.99;
  double alpha2 = 0.5;
  SolverKind solver = SolverKind::kFrankWolfe;
  FunctionMetric metric = FunctionMetric::kWasserstein;

  Eigen::Index m() const { return adj1.rows(); }
  Eigen::Index n() const { return e2_hat.rows(); }
};

// Assembles a problem from raw metric matrices: attributes are max-normalized
// and passed through the Gaussian map with bandwidth sigma.
inline GeneralProblem make_general_problem(const Mat& e1, const Mat& e2, const Mat& unary,
                                           const Mat& adj1, double alpha1 = 0.99,
                                           double alpha2 = 0.5, double sigma = 0.5) {
  GeneralProblem prob;
  prob.adj1 = adj1;
  prob.e1_hat = normalize_edge_attr(e1, sigma);
  prob.e2_hat = normalize_edge_attr(e2, sigma);
  prob.e1_raw = e1.maxCoeff() > 0 ? Mat(e1 / e1.maxCoeff()) : e1;
  prob.e2_raw = e2.maxCoeff() > 0 ? Mat(e2 / e2.maxCoeff()) : e2;
  prob.unary = unary.size() ? unary : Mat::Zero(e1.rows(), e2.rows());
  prob.alpha1 = alpha1;
  prob.alpha2 = alpha2;
  return prob;
}

// F(P): graph-2 edge attributes transported onto graph-1 indices by the
// functional map, the bilinear form P E2 P^T.
inline Mat transported_attr(const SoftAssignment& p, const Mat& e2_hat) {
  return p * e2_hat * p.transpose();
}

namespace detail {

// Shared form of both general objectives:
//   (1 - w) <P, linear> + w * sum adj1 .* (target - F(P))^2
inline Objective weighted_frobenius_objective(const Mat& adj1, const Mat& target,
                                              const Mat& e2_hat, Mat linear, double w) {
  return Objective{
      .value =
          [=](const Mat& p) {
            const Mat r = target - transported_attr(p, e2_hat);
            return (1.0 - w) * p.cwiseProduct(linear).sum() +
                   w * adj1.cwiseProduct(r.cwiseProduct(r)).sum();
          },
      .gradient =
          [=](const Mat& p) {
            const Mat r = target - transported_attr(p, e2_hat);
            const Mat m = adj1.cwiseProduct(r);
            return Mat((1.0 - w) * linear - 2.0 * w * (m + m.transpose()) * p * e2_hat);
          },
      .line_coeffs = nullptr,  // quartic along segments; Armijo applies
  };
}

}  // namespace detail

// First-stage objective: unary term plus the adjacency-weighted squared
// mismatch between graph-1 attributes and F(P).
inline Objective attribute_objective(const GeneralProblem& prob) {
  return detail::weighted_frobenius_objective(prob.adj1, prob.e1_hat, prob.e2_hat,
                                              prob.unary, prob.alpha1);
}

// Distances between transported basis functions and graph-2 basis functions.
// Wasserstein against a Dirac collapses to the linear form (P1 E2)_ij, which
// is exact; the inner-product alternative is available behind the switch.
inline Mat function_space_distance(const SoftAssignment& p1, const Mat& e2,
                                   FunctionMetric metric = FunctionMetric::kWasserstein) {
  if (metric == FunctionMetric::kWasserstein) return p1 * e2;
  // d(phi_a, phi_b) = F(phi_a - phi_b, phi_a - phi_b)^{1/2} with a = P1 row i,
  // b = the j-th basis vector.
  const Mat b = p1 * e2;  // m x n
  Mat d(p1.rows(), e2.rows());
  for (Eigen::Index i = 0; i < p1.rows(); ++i) {
    const double q = p1.row(i) * e2 * p1.row(i).transpose();
    for (Eigen::Index j = 0; j < e2.rows(); ++j)
      d(i, j) = std::sqrt(std::max(0.0, q - 2.0 * b(i, j) + e2(j, j)));
  }
  return d;
}

// Second-stage objective: interpolation between the LAP on the transport
// distances D and staying close to the stage-1 transported attributes.
inline Objective interpolation_objective(const GeneralProblem& prob,
                                         const SoftAssignment& p1_star) {
  const Mat target = transported_attr(p1_star, prob.e2_hat);
  const Mat d = function_space_distance(
      p1_star, prob.metric == FunctionMetric::kWasserstein ? prob.e2_raw : prob.e2_hat,
      prob.metric);
  return detail::weighted_frobenius_objective(prob.adj1, target, prob.e2_hat, d,
                                              prob.alpha2);
}

struct GeneralMatch {
  Permutation perm;
  SoftAssignment p1_star;
  SoftAssignment p2_star;
  SolveReport stage1;
  SolveReport stage2;
};

// Two-stage matcher: minimize the attribute objective from the barycenter,
// rebuild the unary term from the stage-1 map, minimize the interpolation
// objective, then discretize with the Hungarian method on -P.
inline GeneralMatch match_general(const GeneralProblem& prob, const SolveOptions& opts = {}) {
  GeneralMatch res;
  const SoftAssignment init = uniform_init(prob.m(), prob.n());
  res.stage1 = solve(prob.solver, attribute_objective(prob), init, opts);
  res.p1_star = res.stage1.solution;
  res.stage2 = solve(prob.solver, interpolation_objective(prob, res.p1_star), init, opts);
  res.p2_star = res.stage2.solution;
  res.perm = hungarian(-res.p2_star).perm;
  return res;
}

}  // namespace frgm
