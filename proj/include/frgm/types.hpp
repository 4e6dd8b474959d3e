// Shared data model: point sets, graph attributes, assignment matrices.
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frgm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;

// Thrown when an algorithm breaks down numerically (singular systems,
// non-finite gradients); the CLI maps it to exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown on malformed external input (files, formats); CLI exit code 2.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ordered nodes in R^d, one point per row. d is 2 or 3.
struct PointSet {
  Mat points;  // m x d

  PointSet() = default;
  explicit PointSet(Mat pts) : points(std::move(pts)) {
    if (points.rows() < 1) throw std::invalid_argument("PointSet: need at least one point");
    if (points.cols() != 2 && points.cols() != 3)
      throw std::invalid_argument("PointSet: dimension must be 2 or 3");
    if (!points.allFinite()) throw std::invalid_argument("PointSet: non-finite coordinate");
  }

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

// Adjacency weights, edge attributes and optional per-node features of one graph.
struct GraphAttributes {
  Mat adjacency;  // m x m, symmetric, zero diagonal, nonnegative
  Mat edge_attr;  // m x m, symmetric, nonnegative
  std::optional<Mat> node_attr;  // m x d_v

  void validate() const {
    const auto m = adjacency.rows();
    if (adjacency.cols() != m || edge_attr.rows() != m || edge_attr.cols() != m)
      throw std::invalid_argument("GraphAttributes: dimension mismatch");
    if (node_attr && node_attr->rows() != m)
      throw std::invalid_argument("GraphAttributes: node_attr rows mismatch");
    if ((adjacency - adjacency.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("GraphAttributes: adjacency not symmetric");
    if (adjacency.diagonal().cwiseAbs().maxCoeff() > 0)
      throw std::invalid_argument("GraphAttributes: adjacency diagonal not zero");
    if ((edge_attr - edge_attr.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("GraphAttributes: edge_attr not symmetric");
    if (adjacency.minCoeff() < 0 || edge_attr.minCoeff() < 0)
      throw std::invalid_argument("GraphAttributes: negative weights");
  }
};

// Relaxed correspondence: row-stochastic with column sums <= 1. Stored as a
// plain matrix; is_feasible (core.hpp) checks polytope membership.
using SoftAssignment = Mat;

// Injective binary assignment: assign[i] is the matched column of row i.
struct Permutation {
  std::vector<int> assign;

  Eigen::Index size() const { return static_cast<Eigen::Index>(assign.size()); }

  // Binary extreme-point matrix of the relaxed polytope.
  Mat to_matrix(Eigen::Index n) const {
    Mat p = Mat::Zero(size(), n);
    for (Eigen::Index i = 0; i < size(); ++i) {
      if (assign[i] < 0 || assign[i] >= n)
        throw std::invalid_argument("Permutation: index out of range");
      p(i, assign[i]) = 1.0;
    }
    return p;
  }
};

inline Mat pairwise_distances(const Mat& a, const Mat& b) {
  Mat d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    d.row(i) = (b.rowwise() - a.row(i)).rowwise().norm().transpose();
  return d;
}

// Log level from the FRGM_LOG environment variable: "debug" > "info" > default off.
inline int log_level() {
  static const int lvl = [] {
    const char* v = std::getenv("FRGM_LOG");
    if (!v) return 0;
    std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return lvl;
}

inline void log_warn(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[frgm] %s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= 2) std::fprintf(stderr, "[frgm:debug] %s\n", msg.c_str());
}

}  // namespace frgm
