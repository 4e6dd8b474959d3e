// Alternating estimation of correspondence and geometric deformation:
// similarity / affine / Gaussian-RBF nonrigid parameterizations with
// closed-form updates, wrapped around the Euclidean matcher.
#pragma once

#include "frgm/frgm_euclid.hpp"
#include "frgm/types.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <variant>
#include <vector>

namespace frgm {

struct SimilarityTransform {
  double s = 1.0;
  Mat r;       // d x d rotation, det +1
  RowVec t;    // 1 x d
};

struct AffineTransform {
  Mat a;       // d x d
  RowVec t;
};

struct NonrigidTransform {
  Mat basis;     // m x d RBF centers
  Mat w;         // m x d weights
  double sigma_w = 1.0;
};

using Transform = std::variant<SimilarityTransform, AffineTransform, NonrigidTransform>;

inline Transform identity_transform(Eigen::Index d) {
  return SimilarityTransform{1.0, Mat::Identity(d, d), RowVec::Zero(d)};
}

// K_ij = exp(-||basis_j - basis_i||^2 / sigma_w^2); symmetric, unit diagonal.
inline Mat gaussian_rbf_kernel(const Mat& basis, double sigma_w) {
  if (sigma_w <= 0) throw std::invalid_argument("gaussian_rbf_kernel: sigma_w must be positive");
  const Mat d = pairwise_distances(basis, basis);
  return (-d.array().square() / (sigma_w * sigma_w)).exp().matrix();
}

inline Mat gaussian_rbf_cross(const Mat& pts, const Mat& basis, double sigma_w) {
  const Mat d = pairwise_distances(pts, basis);
  return (-d.array().square() / (sigma_w * sigma_w)).exp().matrix();
}

inline Mat apply_transform(const Transform& tau, const Mat& v) {
  return std::visit(
      [&](const auto& t) -> Mat {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, SimilarityTransform>) {
          if (t.r.rows() != v.cols()) throw std::invalid_argument("apply_transform: dimension mismatch");
          return ((t.s * v * t.r).rowwise() + t.t).eval();
        } else if constexpr (std::is_same_v<T, AffineTransform>) {
          if (t.a.rows() != v.cols()) throw std::invalid_argument("apply_transform: dimension mismatch");
          return ((v * t.a).rowwise() + t.t).eval();
        } else {
          if (t.basis.cols() != v.cols()) throw std::invalid_argument("apply_transform: dimension mismatch");
          return (v + gaussian_rbf_cross(v, t.basis, t.sigma_w) * t.w).eval();
        }
      },
      tau);
}

namespace detail {

inline Mat fit_weight_matrix(const Mat& adj1, double lambda) {
  const Mat lap = Mat(adj1.rowwise().sum().asDiagonal()) - adj1;
  return Mat::Identity(adj1.rows(), adj1.cols()) + lambda * lap;
}

}  // namespace detail

// The residual the fits minimize: unary offsets plus lambda-weighted
// adjacent-edge offsets, i.e. Tr((tau(V1) - P V2)^T (I + lambda L1)
// (tau(V1) - P V2)). The fitted transform moves V1 toward the targets P V2.
inline double fit_objective(const Transform& tau, const SoftAssignment& p, const Mat& v1,
                            const Mat& v2, const Mat& adj1, double lambda) {
  const Mat z = apply_transform(tau, v1) - p * v2;
  const Mat m = detail::fit_weight_matrix(adj1, lambda);
  double j = (z.transpose() * m * z).trace();
  if (const auto* nr = std::get_if<NonrigidTransform>(&tau)) {
    const Mat k = gaussian_rbf_kernel(nr->basis, nr->sigma_w);
    // sigma^2-damped smoothness penalty; sigma^2 from the current coupling.
    double sigma2 = 0.0;
    const Mat d = pairwise_distances(v1, v2);
    sigma2 = p.cwiseProduct(d.cwiseProduct(d)).sum() /
             static_cast<double>(v1.rows() * v2.rows());
    j += sigma2 * (nr->w.transpose() * k * nr->w).trace();
  }
  return j;
}

// Weighted Procrustes: closed-form similarity minimizing the fit objective.
inline SimilarityTransform fit_similarity(const SoftAssignment& p, const Mat& v1,
                                          const Mat& v2, const Mat& adj1, double lambda) {
  const Eigen::Index d = v1.cols();
  if (v1.rows() < 2) throw std::invalid_argument("fit_similarity: need at least 2 points");
  const Mat m = detail::fit_weight_matrix(adj1, lambda);
  const Mat y = p * v2;
  const RowVec xbar = v1.colwise().mean();
  const RowVec ybar = y.colwise().mean();  // 1^T M = 1^T since L1 1 = 0
  const Mat xc = v1.rowwise() - xbar;
  const Mat yc = y.rowwise() - ybar;

  const Mat h = xc.transpose() * m * yc;
  Eigen::JacobiSVD<Mat> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);

  SimilarityTransform out;
  const double smax = svd.singularValues()(0);
  if (smax <= 1e-300 || svd.singularValues()(d - 1) <= 1e-12 * smax) {
    log_warn("fit_similarity: rank-deficient cross-covariance, falling back to identity rotation");
    out.r = Mat::Identity(d, d);
  } else {
    Vec corr = Vec::Ones(d);
    corr(d - 1) = ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) ? -1.0 : 1.0;
    out.r = svd.matrixU() * corr.asDiagonal() * svd.matrixV().transpose();
  }
  const double den = (xc.transpose() * m * xc).trace();
  const double num = (out.r.transpose() * h).trace();
  out.s = (den > 1e-300 && num > 0) ? num / den : 1.0;
  out.t = ybar - out.s * xbar * out.r;
  return out;
}

// Closed-form affine fit (weighted least squares on centered points).
inline AffineTransform fit_affine(const SoftAssignment& p, const Mat& v1, const Mat& v2,
                                  const Mat& adj1, double lambda) {
  const Eigen::Index d = v1.cols();
  const Mat m = detail::fit_weight_matrix(adj1, lambda);
  const Mat y = p * v2;
  const RowVec xbar = v1.colwise().mean();
  const RowVec ybar = y.colwise().mean();
  const Mat xc = v1.rowwise() - xbar;
  const Mat yc = y.rowwise() - ybar;

  const Mat gram = xc.transpose() * m * xc;
  AffineTransform out;
  Eigen::FullPivLU<Mat> lu(gram);
  if (!lu.isInvertible()) {
    log_warn("fit_affine: singular normal matrix, falling back to identity");
    out.a = Mat::Identity(d, d);
  } else {
    out.a = lu.solve(xc.transpose() * m * yc);
  }
  out.t = ybar - xbar * out.a;
  return out;
}

// Closed-form RBF weights: (M K + sigma^2 I) W = M (P V2 - V1) with
// sigma^2 = mean coupled squared distance, damping the kernel solve.
inline NonrigidTransform fit_nonrigid(const SoftAssignment& p, const Mat& v1, const Mat& v2,
                                      const Mat& adj1, double lambda, double sigma_w) {
  NonrigidTransform out;
  out.basis = v1;
  out.sigma_w = sigma_w;
  const Mat k = gaussian_rbf_kernel(v1, sigma_w);
  const Mat m = detail::fit_weight_matrix(adj1, lambda);
  const Mat dist = pairwise_distances(v1, v2);
  const double sigma2 = p.cwiseProduct(dist.cwiseProduct(dist)).sum() /
                        static_cast<double>(v1.rows() * v2.rows());

  const Mat lhs = m * k + sigma2 * Mat::Identity(v1.rows(), v1.rows());
  const Mat rhs = m * (p * v2 - v1);
  Eigen::PartialPivLU<Mat> lu(lhs);
  if (lu.rcond() < 1e-14)
    throw numerical_error("fit_nonrigid: kernel system singular after damping");
  out.w = lu.solve(rhs);
  return out;
}

enum class DeformVariant { kSimilarity, kAffine, kNonrigid };

struct DeformOptions {
  DeformVariant variant = DeformVariant::kSimilarity;
  double lambda = 0.5;       // pairwise weight in the fit objective
  int rounds = 10;
  double sigma_w = 0.0;      // 0: 0.5 x mean pairwise distance (working frame)
  bool cumulative = true;    // compose fits across rounds vs refit from origin
  double displacement_tol = 1e-6;
  EuclidConfig matcher{.solver = SolverKind::kApproxFrankWolfe,
                       .unary = UnarySource::kRotationInvariantSC};
};

struct DeformResult {
  Permutation perm;              // final correspondence
  Transform transform;           // composite, original coordinates
  SoftAssignment p_soft;         // final soft map
  Mat positions;                 // final tau(V1), original coordinates
  std::vector<Mat> round_positions;
  std::vector<double> displacement_trace;
  std::vector<Transform> round_transforms;  // working-frame fits per round
};

namespace detail {

struct FrameNorm {
  RowVec mean;
  double scale = 1.0;
};

inline FrameNorm frame_of(const Mat& pts) {
  FrameNorm f;
  f.mean = pts.colwise().mean();
  const double rms = std::sqrt((pts.rowwise() - f.mean).squaredNorm() /
                               static_cast<double>(pts.rows()));
  f.scale = rms > 1e-12 ? rms : 1.0;
  return f;
}

}  // namespace detail

// Alternates (match, fit, move): the working copy of V1 is pushed through
// each fitted transform and re-matched. Both point sets are normalized to
// zero mean / unit RMS internally; the returned transform and positions are
// mapped back to the original coordinates.
inline DeformResult match_deformable(const Mat& v1_in, const Mat& v2_in,
                                     const DeformOptions& opts = {}) {
  if (opts.rounds < 1) throw std::invalid_argument("match_deformable: rounds must be >= 1");
  const Eigen::Index d = v1_in.cols();
  const detail::FrameNorm f1 = detail::frame_of(v1_in);
  const detail::FrameNorm f2 = detail::frame_of(v2_in);
  const Mat x0 = (v1_in.rowwise() - f1.mean) / f1.scale;
  const Mat z = (v2_in.rowwise() - f2.mean) / f2.scale;
  const Mat adj1 = build_adjacency(PointSet(x0), opts.matcher.adjacency, opts.matcher.knn_k);

  double sigma_w = opts.sigma_w;
  if (sigma_w <= 0) {
    const Mat dd = pairwise_distances(x0, x0);
    sigma_w = 0.5 * dd.sum() / static_cast<double>(x0.rows() * (x0.rows() - 1));
  }

  DeformResult res;
  Mat x = x0;
  // Running similarity/affine composition in the working frame.
  Mat comp_a = Mat::Identity(d, d);
  RowVec comp_t = RowVec::Zero(d);
  double comp_s = 1.0;
  Mat comp_r = Mat::Identity(d, d);

  EuclideanMatch match;
  for (int round = 0; round < opts.rounds; ++round) {
    match = match_euclidean(x, z, opts.matcher);
    const SoftAssignment& p = match.p2_star;

    const Mat& fit_src = opts.cumulative ? x : x0;
    Transform tau;
    switch (opts.variant) {
      case DeformVariant::kSimilarity:
        tau = fit_similarity(p, fit_src, z, adj1, opts.lambda);
        break;
      case DeformVariant::kAffine:
        tau = fit_affine(p, fit_src, z, adj1, opts.lambda);
        break;
      case DeformVariant::kNonrigid:
        tau = fit_nonrigid(p, fit_src, z, adj1, opts.lambda, sigma_w);
        break;
    }
    res.round_transforms.push_back(tau);

    const Mat x_new = apply_transform(tau, fit_src);
    const double displacement = (x_new - x).rowwise().norm().mean();
    res.displacement_trace.push_back(displacement);

    if (opts.cumulative) {
      if (const auto* st = std::get_if<SimilarityTransform>(&tau)) {
        comp_t = st->s * comp_t * st->r + st->t;
        comp_s *= st->s;
        comp_r = comp_r * st->r;
      } else if (const auto* at = std::get_if<AffineTransform>(&tau)) {
        comp_t = comp_t * at->a + at->t;
        comp_a = comp_a * at->a;
      }
    }
    x = x_new;
    res.round_positions.push_back((x * f2.scale).rowwise() + f2.mean);
    if (displacement < opts.displacement_tol) break;
  }

  match = match_euclidean(x, z, opts.matcher);
  res.perm = match.perm;
  res.p_soft = match.p2_star;
  res.positions = (x * f2.scale).rowwise() + f2.mean;

  // Map the working-frame composite x -> (x - m1)/s1 -> tau -> * s2 + m2 back
  // into one transform on original coordinates.
  const double a_scale = f2.scale / f1.scale;
  switch (opts.variant) {
    case DeformVariant::kSimilarity: {
      SimilarityTransform total;
      if (!opts.cumulative) {
        if (const auto* st = std::get_if<SimilarityTransform>(&res.round_transforms.back())) {
          comp_s = st->s;
          comp_r = st->r;
          comp_t = st->t;
        }
      }
      total.s = a_scale * comp_s;
      total.r = comp_r;
      total.t = -total.s * f1.mean * comp_r + f2.scale * comp_t + f2.mean;
      res.transform = total;
      break;
    }
    case DeformVariant::kAffine: {
      AffineTransform total;
      if (!opts.cumulative) {
        if (const auto* at = std::get_if<AffineTransform>(&res.round_transforms.back())) {
          comp_a = at->a;
          comp_t = at->t;
        }
      }
      total.a = a_scale * comp_a;
      total.t = -f1.mean * total.a + f2.scale * comp_t + f2.mean;
      res.transform = total;
      break;
    }
    case DeformVariant::kNonrigid: {
      // The rounds do not compose in closed form; recover one displacement
      // field that reproduces the final positions through an exact kernel
      // solve (the Gaussian kernel on distinct centers is invertible).
      NonrigidTransform total;
      total.basis = v1_in;
      total.sigma_w = sigma_w * f1.scale;
      const Mat k = gaussian_rbf_kernel(v1_in, total.sigma_w);
      const Mat delta = res.positions - v1_in;
      Eigen::PartialPivLU<Mat> lu(k + 1e-10 * Mat::Identity(k.rows(), k.cols()));
      total.w = lu.solve(delta);
      res.transform = total;
      break;
    }
  }
  return res;
}

}  // namespace frgm
