#include "frgm/features.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace frgm;

namespace {

Mat random_points(int m, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  Mat p(m, 2);
  for (int i = 0; i < m; ++i) {
    p(i, 0) = g(gen);
    p(i, 1) = g(gen);
  }
  return p;
}

Mat rotate(const Mat& pts, double theta) {
  Mat r(2, 2);
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return pts * r;
}

}  // namespace

TEST_CASE("two points give a single nonzero bin") {
  Mat pts(2, 2);
  pts << 0, 0, 1, 0;
  const Mat h = shape_context(PointSet(pts));
  for (int i = 0; i < 2; ++i) {
    CHECK(h.row(i).sum() == Catch::Approx(1.0));
    CHECK((h.row(i).array() > 0).count() == 1);
  }
}

TEST_CASE("histogram rows sum to one and are nonnegative") {
  const Mat pts = random_points(40, 5);
  for (const Mat& h : {shape_context(PointSet(pts)),
                       rotation_invariant_shape_context(PointSet(pts))}) {
    CHECK(h.minCoeff() >= 0.0);
    for (int i = 0; i < h.rows(); ++i) CHECK(h.row(i).sum() == Catch::Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("shape context is exactly translation invariant") {
  const Mat pts = random_points(25, 7);
  const Mat shifted = pts.rowwise() + Eigen::RowVector2d(3.7, -1.2);
  CHECK((shape_context(PointSet(pts)) - shape_context(PointSet(shifted)))
            .cwiseAbs().maxCoeff() == 0.0);
  CHECK((rotation_invariant_shape_context(PointSet(pts)) -
         rotation_invariant_shape_context(PointSet(shifted)))
            .cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation-invariant variant survives global rotations") {
  const Mat pts = random_points(30, 11);
  const Mat base = rotation_invariant_shape_context(PointSet(pts));
  for (double theta : {0.37, 1.9, -2.4}) {  // angles away from bin boundaries
    const Mat rot = rotation_invariant_shape_context(PointSet(rotate(pts, theta)));
    CHECK((base - rot).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("plain shape context is not rotation invariant") {
  const Mat pts = random_points(30, 13);
  const Mat base = shape_context(PointSet(pts));
  const Mat rot = shape_context(PointSet(rotate(pts, 1.1)));
  CHECK((base - rot).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("reflection changes the rotation-invariant histograms") {
  const Mat pts = random_points(30, 17);
  Mat reflected = pts;
  reflected.col(0) *= -1.0;
  const Mat a = rotation_invariant_shape_context(PointSet(pts));
  const Mat b = rotation_invariant_shape_context(PointSet(reflected));
  CHECK((a - b).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("identical point sets give zero-diagonal chi-square costs") {
  const Mat pts = random_points(15, 19);
  const Mat h = shape_context(PointSet(pts));
  const Mat u = unary_cost(h, h, UnaryKind::kChiSquare);
  CHECK(u.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((u - u.transpose()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(u.minCoeff() >= 0.0);
}

TEST_CASE("disjoint-support histograms have unit chi-square distance") {
  Mat f1 = Mat::Zero(1, 4), f2 = Mat::Zero(1, 4);
  f1(0, 0) = 0.5;
  f1(0, 1) = 0.5;
  f2(0, 2) = 1.0;
  // chi-square of disjoint supports: 0.5 * sum (h1 + h2) = 1 (then the 1x1
  // matrix normalizes to 1 as its own max)
  const Mat u = unary_cost(f1, f2, UnaryKind::kChiSquare);
  CHECK(u(0, 0) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("unary cost rejects width mismatches and normalizes to [0,1]") {
  CHECK_THROWS_AS(unary_cost(Mat::Ones(2, 3), Mat::Ones(2, 4)), std::invalid_argument);
  const Mat pts1 = random_points(10, 23), pts2 = random_points(12, 29);
  const Mat u = unary_cost(shape_context(PointSet(pts1)), shape_context(PointSet(pts2)));
  CHECK(u.maxCoeff() <= 1.0);
  CHECK(u.minCoeff() >= 0.0);
}
