// Entropy-regularized optimal transport: Sinkhorn scaling with log-domain
// stabilization, the relaxed-assignment subsolver used by the approximated
// Frank-Wolfe method, and the Wasserstein metric on node distributions.
#pragma once

#include "frgm/types.hpp"

#include <cmath>
#include <limits>

namespace frgm {

struct SinkhornOptions {
  int max_iter = 2000;
  double tol = 1e-7;  // max marginal violation on exit
};

struct TransportPlan {
  Mat pi;  // m x n, nonnegative
  Vec row_marginal;
  Vec col_marginal;
  int iterations = 0;
  bool converged = false;
};

namespace detail {

// Scaling-domain Sinkhorn on strictly positive marginals. Overflowing scaling
// factors are absorbed into log potentials and the kernel is rebuilt, which
// keeps iterations cheap until stabilization is actually needed.
inline TransportPlan sinkhorn_positive(const Mat& cost, const Vec& a, const Vec& b,
                                       double eps, const SinkhornOptions& opts) {
  const Eigen::Index m = cost.rows(), n = cost.cols();
  Vec alpha = Vec::Zero(m), beta = Vec::Zero(n);  // absorbed log potentials
  Mat kernel = (-cost / eps).array().exp().matrix();
  Vec u = Vec::Ones(m), v = Vec::Ones(n);

  const double tiny = std::numeric_limits<double>::min();
  auto absorb = [&]() {
    alpha += eps * u.array().max(tiny).log().matrix();
    beta += eps * v.array().max(tiny).log().matrix();
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        kernel(i, j) = std::exp((alpha(i) + beta(j) - cost(i, j)) / eps);
    u.setOnes();
    v.setOnes();
  };

  TransportPlan plan;
  constexpr double kBig = 1e30;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    Vec kv = kernel * v;
    u = a.array() / kv.array().max(tiny);
    if (!u.allFinite() || u.maxCoeff() > kBig) {
      absorb();
      continue;
    }
    Vec ktu = kernel.transpose() * u;
    v = b.array() / ktu.array().max(tiny);
    if (!v.allFinite() || v.maxCoeff() > kBig) {
      absorb();
      continue;
    }
    // After the v-update columns match b; row violation measures convergence.
    Vec row = u.array() * (kernel * v).array();
    if ((row - a).cwiseAbs().maxCoeff() <= opts.tol) {
      plan.converged = true;
      ++it;
      break;
    }
  }
  plan.pi = u.asDiagonal() * kernel * v.asDiagonal();
  plan.row_marginal = a;
  plan.col_marginal = b;
  plan.iterations = it;
  if (!plan.converged)
    log_debug("sinkhorn: max_iter reached, marginal violation " +
              std::to_string((plan.pi.rowwise().sum() - a).cwiseAbs().maxCoeff()));
  return plan;
}

}  // namespace detail

// Minimizes <pi, cost> - eps * H(pi) over couplings with marginals (a, b).
// Zero-mass rows/columns are removed up front so Dirac marginals stay exact.
inline TransportPlan sinkhorn(const Mat& cost, const Vec& a, const Vec& b, double eps,
                              const SinkhornOptions& opts = {}) {
  if (eps <= 0) throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (a.size() != cost.rows() || b.size() != cost.cols())
    throw std::invalid_argument("sinkhorn: marginal size mismatch");
  if (a.minCoeff() < 0 || b.minCoeff() < 0)
    throw std::invalid_argument("sinkhorn: negative marginal");
  if (std::abs(a.sum() - b.sum()) > 1e-9 * std::max(1.0, a.sum()))
    throw std::invalid_argument("sinkhorn: marginal mass mismatch");

  std::vector<Eigen::Index> ri, ci;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (a(i) > 0) ri.push_back(i);
  for (Eigen::Index j = 0; j < b.size(); ++j)
    if (b(j) > 0) ci.push_back(j);

  TransportPlan plan;
  plan.pi = Mat::Zero(cost.rows(), cost.cols());
  plan.row_marginal = a;
  plan.col_marginal = b;
  if (ri.empty() || ci.empty()) {
    plan.converged = true;
    return plan;
  }

  Mat sub(ri.size(), ci.size());
  Vec sa(ri.size()), sb(ci.size());
  for (size_t i = 0; i < ri.size(); ++i) {
    sa(i) = a(ri[i]);
    for (size_t j = 0; j < ci.size(); ++j) sub(i, j) = cost(ri[i], ci[j]);
  }
  for (size_t j = 0; j < ci.size(); ++j) sb(j) = b(ci[j]);

  TransportPlan inner = detail::sinkhorn_positive(sub, sa, sb, eps, opts);
  for (size_t i = 0; i < ri.size(); ++i)
    for (size_t j = 0; j < ci.size(); ++j) plan.pi(ri[i], ci[j]) = inner.pi(i, j);
  plan.iterations = inner.iterations;
  plan.converged = inner.converged;
  return plan;
}

// Entropy of a nonnegative matrix, with 0 log 0 = 0.
inline double entropy(const Mat& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j)
      if (p(i, j) > 0) h -= p(i, j) * std::log(p(i, j));
  return h;
}

// Repairs marginal drift left by truncated Sinkhorn runs: shrinks oversized
// columns and rows, then spreads the row deficits across remaining column
// slack. Output rows sum to 1 and column sums stay at most 1 up to roundoff.
inline void round_to_polytope(Mat& p) {
  const Eigen::Index m = p.rows(), n = p.cols();
  p = p.cwiseMax(0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double s = p.col(j).sum();
    if (s > 1.0) p.col(j) /= s;
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const double s = p.row(i).sum();
    if (s > 1.0) p.row(i) /= s;
  }
  Vec slack = Vec::Ones(n) - p.colwise().sum().transpose();
  slack = slack.cwiseMax(0.0);
  double total = slack.sum();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double deficit = 1.0 - p.row(i).sum();
    if (deficit <= 0.0 || total <= 0.0) continue;
    const double ratio = deficit / total;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double add = ratio * slack(j);
      p(i, j) += add;
      slack(j) -= add;
    }
    total -= deficit;
  }
}

// Entropic relaxation of the assignment subproblem
//   min <grad, P> - eps H(P)  with P row-stochastic, column sums <= 1.
// The column slack is carried by one extra zero-cost row of mass n - m; the
// result is rounded back onto the polytope exactly.
inline SoftAssignment lap_sinkhorn(const Mat& grad, double eps,
                                   SinkhornOptions opts = {.max_iter = 5000, .tol = 1e-9}) {
  const Eigen::Index m = grad.rows(), n = grad.cols();
  if (m > n) throw std::invalid_argument("lap_sinkhorn: more rows than columns");

  Mat plan;
  if (m == n) {
    plan = sinkhorn(grad, Vec::Ones(m), Vec::Ones(n), eps, opts).pi;
  } else {
    Mat padded(m + 1, n);
    padded.topRows(m) = grad;
    padded.row(m).setZero();
    Vec a(m + 1);
    a.head(m).setOnes();
    a(m) = static_cast<double>(n - m);
    plan = sinkhorn(padded, a, Vec::Ones(n), eps, opts).pi.topRows(m);
  }
  round_to_polytope(plan);
  return plan;
}

// Entropic Wasserstein distance between two distributions on one node set
// under a ground metric; <pi*, E> for the Sinkhorn plan.
inline double wasserstein_metric(const Vec& a, const Vec& b, const Mat& e, double eps,
                                 const SinkhornOptions& opts = {}) {
  if (e.rows() != e.cols() || a.size() != e.rows() || b.size() != e.rows())
    throw std::invalid_argument("wasserstein_metric: dimension mismatch");
  const TransportPlan plan = sinkhorn(e, a, b, eps, opts);
  return plan.pi.cwiseProduct(e).sum();
}

}  // namespace frgm
