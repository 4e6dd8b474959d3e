// Frank-Wolfe conditional gradient over the relaxed assignment polytope and
// its entropy-regularized approximation whose subproblem is solved by
// Sinkhorn scaling instead of an exact linear assignment.
#pragma once

#include "frgm/core.hpp"
#include "frgm/lap.hpp"
#include "frgm/sinkhorn.hpp"
#include "frgm/types.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <ostream>
#include <vector>

namespace frgm {

// Differentiable objective over assignment matrices. line_coeffs, when set,
// returns the exact coefficients (c0, c1, c2) of g(t) = f(P + t D) for
// objectives that are quadratic along polytope segments.
struct Objective {
  std::function<double(const Mat&)> value;
  std::function<Mat(const Mat&)> gradient;
  std::function<std::array<double, 3>(const Mat&, const Mat&)> line_coeffs;
};

struct SolveOptions {
  int max_iter = 100;
  double gap_tol = 1e-6;
  double eps0 = 0.05;  // AFW: base regularization, scaled by max |gradient|
  std::function<double(int)> eps_schedule;  // default eps0 / (k + 1)
  double rel_obj_tol = 1e-9;  // stall exit: relative change over 3 iterations
  std::ostream* trace_out = nullptr;  // per-iteration JSON lines
  bool check_gradient = false;  // finite-difference audit at the start point
};

struct SolveReport {
  SoftAssignment solution;
  std::vector<double> objective_trace;
  std::vector<double> fw_gaps;
  int iterations = 0;
  bool converged = false;
};

// Central-difference audit of obj.gradient at p; returns max relative error.
inline double gradient_check(const Objective& obj, const Mat& p, double h = 1e-5) {
  Mat g = obj.gradient(p);
  Mat fd(p.rows(), p.cols());
  Mat q = p;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      q(i, j) = p(i, j) + h;
      const double fp = obj.value(q);
      q(i, j) = p(i, j) - h;
      const double fm = obj.value(q);
      q(i, j) = p(i, j);
      fd(i, j) = (fp - fm) / (2 * h);
    }
  return (g - fd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff());
}

// Step size on [0,1] along D: exact minimizer when the objective exposes
// quadratic coefficients, Armijo backtracking from t = 1 otherwise. Returns 0
// when no decrease exists.
inline double line_search(const Objective& obj, const Mat& p, const Mat& d,
                          const Mat* grad_at_p = nullptr) {
  if (obj.line_coeffs) {
    const auto [c0, c1, c2] = obj.line_coeffs(p, d);
    (void)c0;
    if (c2 > 1e-300) {
      const double t = -c1 / (2.0 * c2);
      return std::clamp(t, 0.0, 1.0);
    }
    return c1 <= 0 ? 1.0 : 0.0;  // linear (or concave-flat) restriction
  }
  const double g0 = obj.value(p);
  const double slope = grad_at_p ? grad_at_p->cwiseProduct(d).sum()
                                 : obj.gradient(p).cwiseProduct(d).sum();
  constexpr double kSufficient = 1e-4;
  double t = 1.0;
  while (t > 1e-12) {
    if (obj.value(p + t * d) <= g0 + kSufficient * t * slope) return t;
    t *= 0.5;
  }
  return 0.0;
}

namespace detail {

enum class Subproblem { kExactLap, kEntropic };

inline SolveReport conditional_gradient(const Objective& obj, const SoftAssignment& init,
                                        const SolveOptions& opts, Subproblem kind) {
  if (!is_feasible(init)) throw std::invalid_argument("fw: infeasible initial point");
  if (opts.check_gradient) {
    const double err = gradient_check(obj, init);
    if (err > 1e-4)
      throw numerical_error("fw: analytic gradient disagrees with finite differences (" +
                            std::to_string(err) + ")");
  }

  SolveReport rep;
  Mat p = init;
  double f = obj.value(p);
  rep.objective_trace.push_back(f);
  int stall = 0;

  for (int k = 0; k < opts.max_iter; ++k) {
    rep.iterations = k + 1;
    const Mat g = obj.gradient(p);
    if (!g.allFinite()) {
      log_warn("fw: non-finite gradient at iteration " + std::to_string(k));
      throw numerical_error("fw: non-finite gradient");
    }

    double eps_k = 0.0;
    Mat target;
    if (kind == Subproblem::kExactLap) {
      target = hungarian(g).perm.to_matrix(p.cols());
    } else {
      const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-12);
      eps_k = scale * (opts.eps_schedule ? opts.eps_schedule(k)
                                         : opts.eps0 / static_cast<double>(k + 1));
      target = lap_sinkhorn(g, eps_k);
    }

    const double gap = g.cwiseProduct(p - target).sum();
    rep.fw_gaps.push_back(gap);
    double alpha = 0.0;
    bool done = false;
    if (gap <= opts.gap_tol) {
      rep.converged = true;
      done = true;
    } else {
      const Mat d = target - p;
      alpha = line_search(obj, p, d, &g);
      if (alpha == 0.0) {
        rep.converged = true;  // no descent along the FW direction
        done = true;
      } else {
        p += alpha * d;
        const double f_new = obj.value(p);
        rep.objective_trace.push_back(f_new);
        if (std::abs(f - f_new) <= opts.rel_obj_tol * std::max(1.0, std::abs(f)))
          ++stall;
        else
          stall = 0;
        f = f_new;
        if (stall >= 3) {
          rep.converged = true;
          done = true;
        }
      }
    }
    if (opts.trace_out)
      (*opts.trace_out) << "{\"iter\":" << k << ",\"f\":" << f << ",\"gap\":" << gap
                        << ",\"eps\":" << eps_k << ",\"alpha\":" << alpha << "}\n";
    if (done) break;
  }
  rep.solution = p;
  return rep;
}

}  // namespace detail

// Frank-Wolfe with the linear subproblem solved exactly by the Hungarian
// algorithm; terminates on the FW gap <g, P - P~>.
inline SolveReport fw_solve(const Objective& obj, const SoftAssignment& init,
                            const SolveOptions& opts = {}) {
  return detail::conditional_gradient(obj, init, opts, detail::Subproblem::kExactLap);
}

// Approximated Frank-Wolfe: the subproblem gains an entropy term with
// schedule eps_k = eps0 / (k+1) and is solved by Sinkhorn scaling.
inline SolveReport afw_solve(const Objective& obj, const SoftAssignment& init,
                             const SolveOptions& opts = {}) {
  return detail::conditional_gradient(obj, init, opts, detail::Subproblem::kEntropic);
}

enum class SolverKind { kFrankWolfe, kApproxFrankWolfe };

inline SolveReport solve(SolverKind kind, const Objective& obj, const SoftAssignment& init,
                         const SolveOptions& opts = {}) {
  return kind == SolverKind::kFrankWolfe ? fw_solve(obj, init, opts)
                                         : afw_solve(obj, init, opts);
}

// Uniform barycenter initialization P_ij = 1/n.
inline SoftAssignment uniform_init(Eigen::Index m, Eigen::Index n) {
  return Mat::Constant(m, n, 1.0 / static_cast<double>(n));
}

}  // namespace frgm
