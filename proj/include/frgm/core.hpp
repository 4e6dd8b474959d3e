// Polytope membership, graph construction (k-nn, Delaunay) and edge-attribute
// normalization shared by all matchers.
#pragma once

#include "frgm/types.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

namespace frgm {

// Membership in the relaxed assignment polytope: rows sum to 1, column sums
// at most 1, entries in [0,1]. Tolerances sized for Sinkhorn output.
inline bool is_feasible(const SoftAssignment& p, double tol = 1e-8) {
  if (!p.allFinite()) return false;
  if (p.minCoeff() < -1e-12 || p.maxCoeff() > 1.0 + 1e-12) return false;
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    if (std::abs(p.row(i).sum() - 1.0) > tol) return false;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    if (p.col(j).sum() > 1.0 + tol) return false;
  return true;
}

enum class KnnSymmetrize { kUnion, kIntersection };

// 0/1 adjacency of the k-nearest-neighbour graph. An edge survives if either
// endpoint selects the other (union) or both do (intersection).
inline Mat build_knn_adjacency(const PointSet& v, int k,
                               KnnSymmetrize sym = KnnSymmetrize::kUnion) {
  const Eigen::Index m = v.size();
  if (k < 1 || k > m - 1) throw std::invalid_argument("build_knn_adjacency: k out of range");
  const Mat d = pairwise_distances(v.points, v.points);
  Mat directed = Mat::Zero(m, m);
  std::vector<int> order(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (d(i, a) != d(i, b)) return d(i, a) < d(i, b);
      return a < b;  // deterministic tie-break
    });
    int picked = 0;
    for (int j : order) {
      if (j == i) continue;
      directed(i, j) = 1.0;
      if (++picked == k) break;
    }
  }
  Mat adj(m, m);
  if (sym == KnnSymmetrize::kUnion)
    adj = (directed + directed.transpose()).cwiseMin(1.0);
  else
    adj = directed.cwiseProduct(directed.transpose());
  adj.diagonal().setZero();
  return adj;
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Orientation predicate: > 0 when (a,b,c) is counter-clockwise.
inline double orient2d(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b,
                       const Eigen::RowVector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

// In-circumcircle predicate for a ccw triangle (a,b,c).
inline bool in_circumcircle(const Eigen::RowVector2d& a, const Eigen::RowVector2d& b,
                            const Eigen::RowVector2d& c, const Eigen::RowVector2d& p) {
  const double ax = a.x() - p.x(), ay = a.y() - p.y();
  const double bx = b.x() - p.x(), by = b.y() - p.y();
  const double cx = c.x() - p.x(), cy = c.y() - p.y();
  const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                     (bx * bx + by * by) * (ax * cy - cx * ay) +
                     (cx * cx + cy * cy) * (ax * by - bx * ay);
  return det > 0.0;
}

}  // namespace detail

struct Triangle {
  int a, b, c;
};

// Incremental Bowyer-Watson triangulation. Points get a deterministic,
// index-seeded perturbation of magnitude 1e-9 so exactly duplicate or
// cocircular inputs resolve reproducibly.
inline std::vector<Triangle> delaunay_triangles(const PointSet& v) {
  const Eigen::Index m = v.size();
  if (v.dim() != 2) throw std::invalid_argument("delaunay: 2-d points required");
  if (m < 3) throw std::invalid_argument("delaunay: need at least 3 points");

  Eigen::Matrix<double, Eigen::Dynamic, 2> pts = v.points;
  const double lox = pts.col(0).minCoeff(), hix = pts.col(0).maxCoeff();
  const double loy = pts.col(1).minCoeff(), hiy = pts.col(1).maxCoeff();
  const double span = std::max({hix - lox, hiy - loy, 1.0});

  {  // all-collinear inputs (before perturbation) have no triangulation
    Eigen::Index base = -1;  // first point distinct from point 0
    for (Eigen::Index i = 1; i < m && base < 0; ++i)
      if ((pts.row(i) - pts.row(0)).norm() > 1e-12 * span) base = i;
    bool collinear = true;
    if (base >= 0)
      for (Eigen::Index i = 1; i < m && collinear; ++i)
        if (std::abs(detail::orient2d(pts.row(0), pts.row(base), pts.row(i))) >
            1e-12 * span * span)
          collinear = false;
    if (collinear) throw std::invalid_argument("delaunay: degenerate (collinear) geometry");
  }

  const double eps = 1e-9 * span;
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::uint64_t h1 = detail::splitmix64(static_cast<std::uint64_t>(i) * 2 + 1);
    const std::uint64_t h2 = detail::splitmix64(static_cast<std::uint64_t>(i) * 2 + 2);
    pts(i, 0) += eps * (2.0 * (static_cast<double>(h1 >> 11) * 0x1.0p-53) - 1.0);
    pts(i, 1) += eps * (2.0 * (static_cast<double>(h2 >> 11) * 0x1.0p-53) - 1.0);
  }

  // Super vertices are treated as points at infinity in three fixed
  // directions; triangles touching them use the limit form of the
  // circumcircle test (half-plane / direction tests), which keeps hull
  // triangles with large circumcircles intact.
  const double cx = 0.5 * (lox + hix), cy = 0.5 * (loy + hiy);
  const double r = 20.0 * span;
  const Eigen::RowVector2d dir[3] = {{0.0, 1.0},
                                     {-std::sqrt(3.0) / 2.0, -0.5},
                                     {std::sqrt(3.0) / 2.0, -0.5}};
  std::vector<Eigen::RowVector2d> pt(m + 3);
  for (Eigen::Index i = 0; i < m; ++i) pt[i] = pts.row(i);
  for (int s = 0; s < 3; ++s) pt[m + s] = Eigen::RowVector2d{cx, cy} + r * dir[s];

  auto is_super = [&](int i) { return i >= m; };
  auto make_ccw = [&](Triangle t) {
    // Positions are valid for orientation: super vertices are far enough
    // that the sign matches the infinite limit.
    if (detail::orient2d(pt[t.a], pt[t.b], pt[t.c]) < 0) std::swap(t.b, t.c);
    return t;
  };

  // In-circumcircle with super vertices at infinity. For one super vertex the
  // limit disk is the open half-plane on its side of the finite edge; for two
  // it is the half-plane cross(a - p, d1 - d2) > 0 from the leading term of
  // the lifted determinant.
  auto in_circle_ex = [&](const Triangle& t, int p) {
    int sup[3], nsup = 0, fin[3], nfin = 0;
    int idx[3] = {t.a, t.b, t.c};
    for (int v : idx) (is_super(v) ? sup[nsup++] : fin[nfin++]) = v;
    if (nsup == 0) return detail::in_circumcircle(pt[t.a], pt[t.b], pt[t.c], pt[p]);
    if (nsup == 3) return true;
    if (nsup == 1) {
      // rotate (a,b,c) so the super vertex is last, keeping orientation
      int a = t.a, b = t.b, c = t.c;
      while (!is_super(c)) {
        const int tmp = a;
        a = b;
        b = c;
        c = tmp;
      }
      return detail::orient2d(pt[a], pt[b], pt[p]) > 0.0;
    }
    // nsup == 2: rotate so the finite vertex is first
    int a = t.a, b = t.b, c = t.c;
    while (is_super(a)) {
      const int tmp = a;
      a = b;
      b = c;
      c = tmp;
    }
    const Eigen::RowVector2d d1 = dir[b - m], d2 = dir[c - m];
    const Eigen::RowVector2d ap = pt[a] - pt[p];
    return ap.x() * (d1.y() - d2.y()) - ap.y() * (d1.x() - d2.x()) > 0.0;
  };

  std::vector<Triangle> tris{make_ccw({static_cast<int>(m), static_cast<int>(m + 1),
                                       static_cast<int>(m + 2)})};
  for (int p = 0; p < m; ++p) {
    std::vector<Triangle> bad, keep;
    for (const Triangle& t : tris) {
      if (in_circle_ex(t, p))
        bad.push_back(t);
      else
        keep.push_back(t);
    }
    // Cavity boundary = edges of bad triangles not shared by two bad triangles.
    std::vector<std::array<int, 2>> boundary;
    auto add_edge = [&](int u, int w) {
      for (auto it = boundary.begin(); it != boundary.end(); ++it) {
        if (((*it)[0] == w && (*it)[1] == u) || ((*it)[0] == u && (*it)[1] == w)) {
          boundary.erase(it);
          return;
        }
      }
      boundary.push_back({u, w});
    };
    for (const Triangle& t : bad) {
      add_edge(t.a, t.b);
      add_edge(t.b, t.c);
      add_edge(t.c, t.a);
    }
    tris = std::move(keep);
    for (const auto& e : boundary) tris.push_back(make_ccw({e[0], e[1], p}));
  }

  std::vector<Triangle> out;
  for (const Triangle& t : tris)
    if (t.a < m && t.b < m && t.c < m) out.push_back(t);
  return out;
}

// Symmetric 0/1 adjacency of the Delaunay edges of a planar point set.
inline Mat build_delaunay_adjacency(const PointSet& v) {
  const Eigen::Index m = v.size();
  Mat adj = Mat::Zero(m, m);
  for (const Triangle& t : delaunay_triangles(v)) {
    adj(t.a, t.b) = adj(t.b, t.a) = 1.0;
    adj(t.b, t.c) = adj(t.c, t.b) = 1.0;
    adj(t.c, t.a) = adj(t.a, t.c) = 1.0;
  }
  return adj;
}

// Gaussian map of a max-normalized attribute matrix: exp(-(E/max E)^2 / sigma^2).
// Keeps the matrix symmetric with unit diagonal whenever E_ii = 0.
inline Mat normalize_edge_attr(const Mat& e, double sigma) {
  if (sigma <= 0) throw std::invalid_argument("normalize_edge_attr: sigma must be positive");
  if (e.rows() != e.cols()) throw std::invalid_argument("normalize_edge_attr: square matrix required");
  const double mx = e.maxCoeff();
  if (mx <= 0.0) {
    log_warn("normalize_edge_attr: zero attribute matrix, returning all-ones");
    return Mat::Ones(e.rows(), e.cols());
  }
  const Mat scaled = e / mx;
  return (-scaled.array().square() / (sigma * sigma)).exp().matrix();
}

// lambda_min / lambda_max of a symmetric matrix.
inline double eig_ratio(const Mat& m) {
  if (m.rows() != m.cols() ||
      (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("eig_ratio: symmetric matrix required");
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  const Vec& ev = es.eigenvalues();
  return ev(0) / ev(ev.size() - 1);
}

}  // namespace frgm
