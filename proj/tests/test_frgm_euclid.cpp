#include "frgm/bench.hpp"
#include "frgm/frgm_euclid.hpp"

#include <catch2/catch_amalgamated.hpp>

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

Mat random_feasible(int m, int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Mat p = Mat::Zero(m, n);
  double total = 0.0;
  for (int k = 0; k < 6; ++k) {
    std::vector<int> cols(n);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), gen);
    const double w = 1.0 + static_cast<double>(gen() % 5);
    for (int i = 0; i < m; ++i) p(i, cols[i]) += w;
    total += w;
  }
  p /= total;
  return 0.7 * p + 0.3 * uniform_init(m, n);
}

EuclideanProblem random_problem(int m, int n, std::uint64_t seed, double l1 = 0.8,
                                double l2 = 0.5) {
  EuclideanProblem prob;
  prob.v1 = random_points(m, seed);
  prob.v2 = random_points(n, seed + 500);
  prob.adj1 = Mat::Ones(m, m);
  prob.adj1.diagonal().setZero();
  std::mt19937_64 gen(seed + 900);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  prob.unary.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) prob.unary(i, j) = u(gen);
  prob.lambda1 = l1;
  prob.lambda2 = l2;
  return prob;
}

}  // namespace

TEST_CASE("edge-length objective vanishes at the identity on equal sets") {
  EuclideanProblem prob = random_problem(6, 6, 1, 1.0);
  prob.v2 = prob.v1;
  const Mat p = Mat::Identity(6, 6);
  CHECK(edge_length_objective(prob).value(p) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("edge-length objective with lambda1 = 0 reduces to the unary term") {
  EuclideanProblem prob = random_problem(4, 6, 3, 0.0);
  const Mat p = random_feasible(4, 6, 5);
  CHECK(edge_length_objective(prob).value(p) ==
        Catch::Approx(p.cwiseProduct(prob.unary).sum()).margin(1e-12));
}

TEST_CASE("edge-length gradient matches finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EuclideanProblem prob = random_problem(8, 10, 100 + seed);
    CHECK(gradient_check(edge_length_objective(prob), random_feasible(8, 10, seed)) < 1e-4);
  }
}

TEST_CASE("smoothing graph keeps all edges of an equilateral triangle") {
  Mat pts(3, 2);
  pts << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2;
  const SmoothingGraph sg = build_smoothing_graph(PointSet(pts));
  CHECK(sg.s.sum() == 6.0);  // single length cluster: nothing dropped
}

TEST_CASE("smoothing graph drops the far point's long edges") {
  Mat pts(11, 2);
  pts.topRows(10) = random_points(10, 7) * 0.3;
  pts.row(10) << 25.0, 25.0;
  const SmoothingGraph sg = build_smoothing_graph(PointSet(pts));
  CHECK(sg.s.row(10).sum() == 0.0);  // every incident edge is in the long cluster
  CHECK(sg.s.topLeftCorner(10, 10).sum() > 0.0);

  // 1-d 2-means oracle: exhaustive threshold over the Delaunay edge lengths
  // must classify exactly the dropped edges as the long cluster.
  const Mat adj = build_delaunay_adjacency(PointSet(pts));
  std::vector<double> lengths;
  for (int i = 0; i < 11; ++i)
    for (int j = i + 1; j < 11; ++j)
      if (adj(i, j) > 0) lengths.push_back((pts.row(i) - pts.row(j)).norm());
  std::sort(lengths.begin(), lengths.end());
  double best_sse = 1e300, threshold = 1e300;
  for (size_t cut = 1; cut < lengths.size(); ++cut) {
    auto sse = [&](size_t lo, size_t hi) {
      double mean = 0.0;
      for (size_t t = lo; t < hi; ++t) mean += lengths[t];
      mean /= (hi - lo);
      double s = 0.0;
      for (size_t t = lo; t < hi; ++t) s += (lengths[t] - mean) * (lengths[t] - mean);
      return s;
    };
    const double total = sse(0, cut) + sse(cut, lengths.size());
    if (total < best_sse) {
      best_sse = total;
      threshold = lengths[cut];
    }
  }
  for (int i = 0; i < 11; ++i)
    for (int j = i + 1; j < 11; ++j)
      if (adj(i, j) > 0) {
        const double len = (pts.row(i) - pts.row(j)).norm();
        CHECK(sg.s(i, j) == (len < threshold ? 1.0 : 0.0));
      }
}

TEST_CASE("smoothing Laplacian identities") {
  const Mat pts = random_points(15, 9);
  const SmoothingGraph sg = build_smoothing_graph(PointSet(pts));
  CHECK((sg.laplacian.rowwise().sum()).cwiseAbs().maxCoeff() < 1e-12);
  std::mt19937_64 gen(10);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Vec x(15);
    for (int i = 0; i < 15; ++i) x(i) = g(gen);
    CHECK(x.dot(sg.laplacian * x) >= -1e-12);
  }
}

TEST_CASE("offset distance basics") {
  const Mat v2 = random_points(7, 11);
  Permutation perm{{4, 2, 6, 0}};
  const Mat p = perm.to_matrix(7);
  const Mat d = offset_distance(p, Mat(), v2);
  for (int i = 0; i < 4; ++i) CHECK(d(i, perm.assign[i]) == 0.0);

  const Mat du = offset_distance(uniform_init(4, 7), Mat(), v2);
  for (int i = 1; i < 4; ++i) CHECK((du.row(i) - du.row(0)).cwiseAbs().maxCoeff() < 1e-12);

  // explicit loop oracle
  const Mat pr = random_feasible(4, 7, 13);
  const Mat dr = offset_distance(pr, Mat(), v2);
  const Mat t = pr * v2;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(dr(i, j) == Catch::Approx((t.row(i) - v2.row(j)).norm()).margin(1e-12));
}

TEST_CASE("offset smoothing objective at the stage-1 map with lambda2 = 1 is zero") {
  EuclideanProblem prob = random_problem(6, 8, 15, 0.8, 1.0);
  const SmoothingGraph sg = build_smoothing_graph(PointSet(prob.v1));
  const Mat p1 = random_feasible(6, 8, 17);
  CHECK(offset_smoothing_objective(prob, sg, p1).value(p1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("offset smoothing with lambda2 = 0 is the LAP on D") {
  EuclideanProblem prob = random_problem(6, 8, 19, 0.8, 0.0);
  const SmoothingGraph sg = build_smoothing_graph(PointSet(prob.v1));
  const Mat p1 = random_feasible(6, 8, 21);
  const Objective obj = offset_smoothing_objective(prob, sg, p1);
  const SolveReport rep = fw_solve(obj, uniform_init(6, 8));
  const Mat d = offset_distance(p1, prob.v1, prob.v2);
  CHECK(rep.objective_trace.back() == Catch::Approx(hungarian(d).objective).margin(1e-8));
}

TEST_CASE("offset smoothing gradient matches finite differences tightly") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EuclideanProblem prob = random_problem(7, 9, 200 + seed);
    const SmoothingGraph sg = build_smoothing_graph(PointSet(prob.v1));
    const Mat p1 = random_feasible(7, 9, 300 + seed);
    CHECK(gradient_check(offset_smoothing_objective(prob, sg, p1),
                         random_feasible(7, 9, seed)) < 1e-6);
  }
}

TEST_CASE("offset smoothing line coefficients are exact and convex") {
  EuclideanProblem prob = random_problem(6, 8, 23);
  const SmoothingGraph sg = build_smoothing_graph(PointSet(prob.v1));
  const Mat p1 = random_feasible(6, 8, 25);
  const Objective obj = offset_smoothing_objective(prob, sg, p1);
  const Mat p = random_feasible(6, 8, 27);
  const Mat q = random_feasible(6, 8, 29);
  const Mat d = q - p;
  const auto [c0, c1, c2] = obj.line_coeffs(p, d);
  CHECK(c2 >= -1e-12);  // convex along any segment
  for (double t : {0.0, 0.3, 0.7, 1.0})
    CHECK(obj.value(p + t * d) == Catch::Approx(c0 + c1 * t + c2 * t * t).margin(1e-9));
}

TEST_CASE("match_euclidean recovers a planted shuffle exactly") {
  const int m = 20;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SyntheticInstance inst = gen_synthetic(m, 0.0, 0, 4000 + seed);
    EuclidConfig cfg;  // defaults: lambda1 .99, lambda2 .5, complete, SC unary
    const EuclideanMatch res = match_euclidean(inst.v1, inst.v2, cfg);
    CHECK(accuracy(res.perm, inst.truth) == 1.0);
    CHECK(res.binarity >= 0.9);  // nearly binary stage-2 map
  }
}

TEST_CASE("match_euclidean stage-2 does not lose accuracy on noisy instances") {
  int stage2_wins = 0, seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    const SyntheticInstance inst = gen_synthetic(30, 0.03, 0, 6000 + s);
    EuclidConfig cfg;
    const EuclideanMatch res = match_euclidean(inst.v1, inst.v2, cfg);
    const Permutation stage1 = hungarian(-res.p1_star).perm;
    if (accuracy(res.perm, inst.truth) >= accuracy(stage1, inst.truth)) ++stage2_wins;
  }
  CHECK(stage2_wins >= 8);
}

TEST_CASE("offset smoothing does not prefer the soft stage-1 map over truth") {
  // The trace term alone is 0 at P1* by construction, so the meaningful
  // comparison is the full stage-2 objective: truth must score at least as
  // well as the soft solution it refines.
  for (std::uint64_t seed : {8100, 8101, 8102}) {
    const SyntheticInstance inst = gen_synthetic(15, 0.02, 0, seed);
    EuclidConfig cfg;
    const EuclideanMatch res = match_euclidean(inst.v1, inst.v2, cfg);
    EuclideanProblem prob = make_euclidean_problem(inst.v1, inst.v2, cfg);
    const SmoothingGraph sg = build_smoothing_graph(PointSet(inst.v1));
    const Objective jcon = offset_smoothing_objective(prob, sg, res.p1_star);
    const Mat pt = Permutation{inst.truth}.to_matrix(inst.v2.rows());
    CHECK(jcon.value(pt) <= jcon.value(res.p1_star) + 1e-9);
  }
}

TEST_CASE("match_euclidean validates shapes") {
  EuclideanProblem prob = random_problem(5, 3, 31);
  CHECK_THROWS_AS(match_euclidean(prob), std::invalid_argument);
}
