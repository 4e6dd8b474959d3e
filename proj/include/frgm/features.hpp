// Node descriptors for the unary term: log-polar shape context and a
// rotation-invariant variant aligned to the centroid direction.
#pragma once

#include "frgm/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace frgm {

struct ShapeContextOptions {
  int radial_bins = 5;
  int angular_bins = 12;
  double r_inner = 0.125;  // times the median pairwise distance
  double r_outer = 2.0;
};

namespace detail {

inline double median_pairwise_distance(const Mat& pts) {
  std::vector<double> d;
  d.reserve(static_cast<size_t>(pts.rows()) * (pts.rows() - 1) / 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = i + 1; j < pts.rows(); ++j)
      d.push_back((pts.row(i) - pts.row(j)).norm());
  std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
  return d[d.size() / 2];
}

// Log-polar histograms; ref_angle(i) fixes the angular origin of point i.
template <typename RefAngle>
Mat shape_context_impl(const PointSet& v, const ShapeContextOptions& o, RefAngle ref_angle) {
  const Eigen::Index m = v.size();
  if (m < 2) throw std::invalid_argument("shape_context: need at least 2 points");
  if (v.dim() != 2) throw std::invalid_argument("shape_context: 2-d points required");
  const Mat& pts = v.points;
  const double med = std::max(median_pairwise_distance(pts), 1e-300);

  std::vector<double> log_edges(o.radial_bins + 1);
  const double lo = std::log(o.r_inner * med), hi = std::log(o.r_outer * med);
  for (int k = 0; k <= o.radial_bins; ++k)
    log_edges[k] = lo + (hi - lo) * k / o.radial_bins;

  const double two_pi = 2.0 * M_PI;
  Mat h = Mat::Zero(m, o.radial_bins * o.angular_bins);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double theta0 = ref_angle(i);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const double dx = pts(j, 0) - pts(i, 0), dy = pts(j, 1) - pts(i, 1);
      const double r = std::hypot(dx, dy);
      // Distances outside the annulus clamp into the end bins so every
      // neighbour is counted and rows always normalize to 1.
      int rb = 0;
      const double lr = std::log(std::max(r, 1e-300));
      while (rb < o.radial_bins - 1 && lr >= log_edges[rb + 1]) ++rb;
      double ang = std::atan2(dy, dx) - theta0;
      ang -= two_pi * std::floor(ang / two_pi);  // wrap to [0, 2pi)
      int ab = static_cast<int>(ang / (two_pi / o.angular_bins));
      ab = std::clamp(ab, 0, o.angular_bins - 1);
      h(i, rb * o.angular_bins + ab) += 1.0;
    }
    h.row(i) /= static_cast<double>(m - 1);
  }
  return h;
}

}  // namespace detail

// Translation-invariant log-polar histograms, one row per point.
inline Mat shape_context(const PointSet& v, const ShapeContextOptions& o = {}) {
  return detail::shape_context_impl(v, o, [](Eigen::Index) { return 0.0; });
}

// Shape context with the angular origin of each point set to the direction
// toward the point-set centroid; invariant to global rotations, sensitive to
// reflections.
inline Mat rotation_invariant_shape_context(const PointSet& v,
                                            const ShapeContextOptions& o = {}) {
  const RowVec c = v.points.colwise().mean();
  return detail::shape_context_impl(v, o, [&](Eigen::Index i) {
    return std::atan2(c(1) - v.points(i, 1), c(0) - v.points(i, 0));
  });
}

enum class UnaryKind { kChiSquare, kL2 };

// Descriptor dissimilarity matrix, max-normalized into [0, 1].
inline Mat unary_cost(const Mat& f1, const Mat& f2, UnaryKind kind = UnaryKind::kL2) {
  if (f1.cols() != f2.cols()) throw std::invalid_argument("unary_cost: descriptor width mismatch");
  Mat u(f1.rows(), f2.rows());
  for (Eigen::Index i = 0; i < f1.rows(); ++i)
    for (Eigen::Index j = 0; j < f2.rows(); ++j) {
      if (kind == UnaryKind::kChiSquare) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < f1.cols(); ++k) {
          const double diff = f1(i, k) - f2(j, k);
          s += diff * diff / (f1(i, k) + f2(j, k) + 1e-12);
        }
        u(i, j) = 0.5 * s;
      } else {
        u(i, j) = (f1.row(i) - f2.row(j)).norm();
      }
    }
  const double mx = u.maxCoeff();
  if (mx > 0) u /= mx;
  return u;
}

}  // namespace frgm
