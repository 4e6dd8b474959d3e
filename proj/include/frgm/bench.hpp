// Synthetic data generation, evaluation metrics, QAP cross-checks and the
// experiment grid runner.
#pragma once

#include "frgm/deform.hpp"
#include "frgm/frgm_euclid.hpp"
#include "frgm/frgm_general.hpp"
#include "frgm/types.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace frgm {

// Seedable generator with a fixed Box-Muller gaussian so (seed, config)
// reproduces output streams exactly on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  // Fisher-Yates with explicit arithmetic, avoiding std::shuffle's
  // implementation-defined draws.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(gen_() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

struct SyntheticInstance {
  Mat v1;                   // n_in x 2 inliers
  Mat v2;                   // (n_in + n_out) x 2, shuffled inliers then outliers
  std::vector<int> truth;   // truth[i] = V2 index of inlier i
};

// Inliers iid N(0, I2); graph 2 adds per-point gaussian noise, shuffles, and
// appends outliers drawn from N(0, outlier_sigma^2 I) (1.0 = same law as the
// inliers).
inline SyntheticInstance gen_synthetic(int n_in, double noise_sigma, int n_out,
                                       std::uint64_t seed, double outlier_sigma = 1.0) {
  if (n_in < 1) throw std::invalid_argument("gen_synthetic: n_in must be >= 1");
  Rng rng(seed);
  SyntheticInstance inst;
  inst.v1.resize(n_in, 2);
  for (int i = 0; i < n_in; ++i)
    for (int c = 0; c < 2; ++c) inst.v1(i, c) = rng.gaussian();

  Mat noisy = inst.v1;
  for (int i = 0; i < n_in; ++i)
    for (int c = 0; c < 2; ++c) noisy(i, c) += noise_sigma * rng.gaussian();

  std::vector<int> order(n_in);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  inst.v2.resize(n_in + n_out, 2);
  inst.truth.assign(n_in, -1);
  for (int pos = 0; pos < n_in; ++pos) {
    inst.v2.row(pos) = noisy.row(order[pos]);
    inst.truth[order[pos]] = pos;
  }
  for (int o = 0; o < n_out; ++o)
    for (int c = 0; c < 2; ++c) inst.v2(n_in + o, c) = outlier_sigma * rng.gaussian();
  return inst;
}

// ---- procedural deformation templates (the paper-style external assets are
// replaced by parametric shapes of comparable size) ----

inline Mat template_circle(int n = 100) {
  Mat pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 2.0 * M_PI * i / n;
    pts(i, 0) = std::cos(t);
    pts(i, 1) = std::sin(t);
  }
  return pts;
}

inline Mat template_grid(int side = 10) {
  Mat pts(side * side, 2);
  for (int i = 0; i < side; ++i)
    for (int j = 0; j < side; ++j) {
      pts(i * side + j, 0) = -1.0 + 2.0 * j / (side - 1);
      pts(i * side + j, 1) = -1.0 + 2.0 * i / (side - 1);
    }
  return pts;
}

inline Mat template_two_moons(int n = 100) {
  Mat pts(n, 2);
  const int n1 = n / 2;
  for (int i = 0; i < n1; ++i) {
    const double t = M_PI * i / (n1 - 1);
    pts(i, 0) = std::cos(t);
    pts(i, 1) = std::sin(t);
  }
  for (int i = n1; i < n; ++i) {
    const double t = M_PI * (i - n1) / (n - n1 - 1);
    pts(i, 0) = 1.0 - std::cos(t);
    pts(i, 1) = 0.5 - std::sin(t);
  }
  return pts;
}

inline Mat template_spiral(int n = 100) {
  Mat pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 3.0 * M_PI * i / (n - 1);
    const double r = 0.25 + 0.75 * i / (n - 1);
    pts(i, 0) = r * std::cos(t);
    pts(i, 1) = r * std::sin(t);
  }
  return pts;
}

// Low-discrepancy cloud on [-1,1]^2 (Halton bases 2 and 3): irregular local
// neighborhoods make the correspondence unambiguous, unlike curve templates
// whose arcs are locally shift-symmetric.
inline Mat template_cloud(int n = 100) {
  auto radical_inverse = [](int base, int i) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
      f /= base;
      r += f * (i % base);
      i /= base;
    }
    return r;
  };
  Mat pts(n, 2);
  for (int i = 0; i < n; ++i) {
    pts(i, 0) = 2.0 * radical_inverse(2, i + 1) - 1.0;
    pts(i, 1) = 2.0 * radical_inverse(3, i + 1) - 1.0;
  }
  return pts;
}

inline Mat named_template(const std::string& name, int n = 100) {
  if (name == "circle") return template_circle(n);
  if (name == "grid") return template_grid(static_cast<int>(std::lround(std::sqrt(n))));
  if (name == "two-moons") return template_two_moons(n);
  if (name == "spiral") return template_spiral(n);
  if (name == "cloud") return template_cloud(n);
  throw std::invalid_argument("unknown template '" + name + "'");
}

struct DeformGenParams {
  DeformVariant variant = DeformVariant::kSimilarity;
  double rotation = 0.0;        // similarity
  double scale = 1.0;           // similarity
  RowVec translation;           // similarity/affine; empty = zero
  Mat affine;                   // affine; empty = identity
  double warp_sigma = 0.2;      // nonrigid: N(0, warp_sigma^2) RBF weights
  double rbf_bandwidth = 0.0;   // nonrigid: 0 = mean pairwise distance
  double noise_sigma = 0.0;
  double outlier_ratio = 0.0;   // n_out = ratio * m
  double outlier_sigma = 0.5;   // relative to the deformed template's RMS radius
  double missing_ratio = 0.0;
};

struct DeformedInstance {
  Mat v1;                  // surviving template points
  Mat v2;                  // shuffled deformed inliers + outliers
  std::vector<int> truth;  // per V1 row, V2 index
  Transform applied;       // ground-truth transform (template frame)
};

// Applies a planted transform to the template, perturbs, shuffles and
// decorates with outliers / missing points. Extreme nonrigid draws (mean
// displacement > 3x template diameter) are rejected and redrawn.
inline DeformedInstance gen_deformed(const Mat& tmpl, const DeformGenParams& params,
                                     std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index m = tmpl.rows(), d = tmpl.cols();

  Transform tau = identity_transform(d);
  Mat deformed;
  switch (params.variant) {
    case DeformVariant::kSimilarity: {
      SimilarityTransform st;
      st.s = params.scale;
      st.r = Mat::Identity(d, d);
      st.r(0, 0) = std::cos(params.rotation);
      st.r(0, 1) = std::sin(params.rotation);
      st.r(1, 0) = -std::sin(params.rotation);
      st.r(1, 1) = std::cos(params.rotation);
      st.t = params.translation.size() ? params.translation : RowVec::Zero(d);
      tau = st;
      deformed = apply_transform(tau, tmpl);
      break;
    }
    case DeformVariant::kAffine: {
      AffineTransform at;
      at.a = params.affine.size() ? params.affine : Mat(Mat::Identity(d, d));
      at.t = params.translation.size() ? params.translation : RowVec::Zero(d);
      tau = at;
      deformed = apply_transform(tau, tmpl);
      break;
    }
    case DeformVariant::kNonrigid: {
      const Mat dd = pairwise_distances(tmpl, tmpl);
      const double diam = dd.maxCoeff();
      const double bw = params.rbf_bandwidth > 0
                            ? params.rbf_bandwidth
                            : dd.sum() / static_cast<double>(m * (m - 1));
      NonrigidTransform nt;
      nt.basis = tmpl;
      nt.sigma_w = bw;
      for (int attempt = 0; attempt < 64; ++attempt) {
        nt.w.resize(m, d);
        for (Eigen::Index i = 0; i < m; ++i)
          for (Eigen::Index c = 0; c < d; ++c) nt.w(i, c) = params.warp_sigma * rng.gaussian();
        deformed = apply_transform(nt, tmpl);
        if ((deformed - tmpl).rowwise().norm().mean() <= 3.0 * diam) break;
      }
      tau = nt;
      break;
    }
  }

  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index c = 0; c < d; ++c) deformed(i, c) += params.noise_sigma * rng.gaussian();

  // Missing points: drop a fraction of V1 (their deformed twins stay in V2).
  std::vector<int> v1_rows(m);
  std::iota(v1_rows.begin(), v1_rows.end(), 0);
  rng.shuffle(v1_rows);
  const int survivors = std::max<int>(1, static_cast<int>(std::lround(
                                             (1.0 - params.missing_ratio) * m)));
  v1_rows.resize(survivors);
  std::sort(v1_rows.begin(), v1_rows.end());

  const int n_out = static_cast<int>(std::lround(params.outlier_ratio * m));
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  DeformedInstance inst;
  inst.applied = tau;
  inst.v1.resize(survivors, d);
  inst.v2.resize(m + n_out, d);
  std::vector<int> pos_of(m);
  for (int pos = 0; pos < m; ++pos) {
    inst.v2.row(pos) = deformed.row(order[pos]);
    pos_of[order[pos]] = pos;
  }
  inst.truth.resize(survivors);
  for (int r = 0; r < survivors; ++r) {
    inst.v1.row(r) = tmpl.row(v1_rows[r]);
    inst.truth[r] = pos_of[v1_rows[r]];
  }
  const RowVec center = deformed.colwise().mean();
  const double rms = std::sqrt((deformed.rowwise() - center).squaredNorm() /
                               static_cast<double>(m));
  for (int o = 0; o < n_out; ++o)
    for (Eigen::Index c = 0; c < d; ++c)
      inst.v2(m + o, c) = center(c) + params.outlier_sigma * rms * rng.gaussian();
  return inst;
}

// Fraction of ground-truth pairs matched exactly.
inline double accuracy(const Permutation& result, const std::vector<int>& truth) {
  if (result.assign.size() != truth.size())
    throw std::invalid_argument("accuracy: size mismatch");
  int n_truth = 0, hits = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0) continue;
    ++n_truth;
    if (result.assign[i] == truth[i]) ++hits;
  }
  return n_truth ? static_cast<double>(hits) / n_truth : 0.0;
}

inline double mean_error(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("mean_error: size mismatch");
  return (a - b).rowwise().norm().mean();
}

struct DeformErrors {
  double transform_error = 0.0;  // mean || tau(V1_i) - V2_{truth(i)} ||
  double match_error = 0.0;      // mean || (P V2)_i - V2_{truth(i)} ||
};

inline DeformErrors deform_errors(const DeformResult& res, const Mat& v2,
                                  const std::vector<int>& truth) {
  DeformErrors err;
  int n = 0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0) continue;
    ++n;
    err.transform_error += (res.positions.row(i) - v2.row(truth[i])).norm();
    err.match_error += (v2.row(res.perm.assign[i]) - v2.row(truth[i])).norm();
  }
  if (n) {
    err.transform_error /= n;
    err.match_error /= n;
  }
  return err;
}

struct QapReport {
  double kron_identity_error = 0.0;   // |Pv^T (E2 (x) E1) Pv - tr(E1 P E2 P^T)|
  double conversion_error = 0.0;      // |Eq(4)-form + Eq(3)-form - constant|
  double lawler_value = 0.0;          // Pv^T K Pv with the experiment kernels
  double koopmans_value = 0.0;        // tr(E1 P E2 P^T)
};

// Small-instance bridge between this data model and the classical QAP forms.
// Builds the full Lawler affinity matrix (the object the representation
// avoids) and checks the algebraic identities tying the formulations.
inline QapReport qap_cross_check(const Mat& v1, const Mat& v2, const Mat& adj1,
                                 const Mat& adj2, const Permutation& perm,
                                 double lambda = 1.0) {
  const Eigen::Index m = v1.rows(), n = v2.rows();
  if (m * n > 400) throw std::invalid_argument("qap_cross_check: instance too large (mn > 400)");
  const Mat p = perm.to_matrix(n);

  // (i) Kronecker special case K = E1 (x) E2 against the trace form.
  const double trace_form = (adj1 * p * adj2 * p.transpose()).trace();
  double quad_form = 0.0;
  for (Eigen::Index i1 = 0; i1 < m; ++i1)
    for (Eigen::Index j1 = 0; j1 < n; ++j1)
      for (Eigen::Index i2 = 0; i2 < m; ++i2)
        for (Eigen::Index j2 = 0; j2 < n; ++j2)
          quad_form += p(i1, j1) * adj1(i1, i2) * adj2(j1, j2) * p(i2, j2);
  QapReport rep;
  rep.kron_identity_error = std::abs(quad_form - trace_form);
  rep.koopmans_value = trace_form;

  // Lawler value with the synthetic-experiment kernels: node affinity
  // exp(-||v1_i - v2_j||), edge affinity exp(-(len1 - len2)^2 / 0.15).
  const Mat d1 = pairwise_distances(v1, v1), d2 = pairwise_distances(v2, v2);
  for (Eigen::Index i1 = 0; i1 < m; ++i1)
    for (Eigen::Index j1 = 0; j1 < n; ++j1) {
      if (p(i1, j1) == 0.0) continue;
      rep.lawler_value += std::exp(-(v1.row(i1) - v2.row(j1)).norm());
      for (Eigen::Index i2 = 0; i2 < m; ++i2)
        for (Eigen::Index j2 = 0; j2 < n; ++j2) {
          if (p(i2, j2) == 0.0 || i1 == i2) continue;
          const double diff = d1(i1, i2) - d2(j1, j2);
          rep.lawler_value += std::exp(-diff * diff / 0.15);
        }
    }

  // (ii) m = n only: || E1 - P E2 P^T ||_F^2 expands so that minimizing it
  // matches maximizing the trace form up to a P-independent constant.
  if (m == n) {
    const Mat r = adj1 - p * adj2 * p.transpose();
    const double eq4 = 0.5 * lambda * r.squaredNorm();
    const double eq3 = lambda * trace_form;
    const double constant = 0.5 * lambda * (adj1.squaredNorm() + adj2.squaredNorm());
    rep.conversion_error = std::abs(eq4 + eq3 - constant);
  }
  return rep;
}

// ---- experiment grid runner ----

enum class BenchAlgo { kFrgmE, kFrgmG };

struct ExperimentGrid {
  BenchAlgo algo = BenchAlgo::kFrgmE;
  int n_in = 100;
  std::vector<double> noise_levels{0.0};
  std::vector<double> outlier_ratios{0.0};
  int seeds = 20;
  std::uint64_t base_seed = 1;
  int workers = 0;  // 0: hardware concurrency
  EuclidConfig euclid;
  double general_sigma = 0.5;  // FRGM-G bandwidth
  double general_alpha1 = 0.99;
  double general_alpha2 = 0.5;
};

struct CellResult {
  double noise = 0.0;
  double outlier_ratio = 0.0;
  double mean_acc = 0.0;
  double std_acc = 0.0;
  double mean_err = 0.0;
  double mean_time_s = 0.0;
  int n_seeds = 0;
};

namespace detail {

inline double run_one_trial(const ExperimentGrid& grid, double noise, double ratio,
                            std::uint64_t seed, double* err_out) {
  const int n_out = static_cast<int>(std::lround(ratio * grid.n_in));
  const SyntheticInstance inst = gen_synthetic(grid.n_in, noise, n_out, seed);
  Permutation perm;
  if (grid.algo == BenchAlgo::kFrgmE) {
    perm = match_euclidean(inst.v1, inst.v2, grid.euclid).perm;
  } else {
    const Mat e1 = pairwise_distances(inst.v1, inst.v1);
    const Mat e2 = pairwise_distances(inst.v2, inst.v2);
    Mat unary;
    if (grid.euclid.unary != UnarySource::kNone) {
      const Mat f1 = shape_context(PointSet(inst.v1));
      const Mat f2 = shape_context(PointSet(inst.v2));
      unary = unary_cost(f1, f2, grid.euclid.unary_metric);
    }
    const Mat adj1 = build_adjacency(PointSet(inst.v1), grid.euclid.adjacency, grid.euclid.knn_k);
    GeneralProblem prob = make_general_problem(e1, e2, unary, adj1, grid.general_alpha1,
                                               grid.general_alpha2, grid.general_sigma);
    prob.solver = grid.euclid.solver;
    perm = match_general(prob, grid.euclid.solve_opts).perm;
  }
  if (err_out) {
    double e = 0.0;
    int cnt = 0;
    for (size_t i = 0; i < inst.truth.size(); ++i)
      if (inst.truth[i] >= 0) {
        e += (inst.v2.row(perm.assign[i]) - inst.v2.row(inst.truth[i])).norm();
        ++cnt;
      }
    *err_out = cnt ? e / cnt : 0.0;
  }
  return accuracy(perm, inst.truth);
}

}  // namespace detail

// Runs matcher x seeds over the grid; trials are dispatched to a worker pool
// and aggregated in cell order, so output is independent of scheduling.
inline std::vector<CellResult> run_experiment(const ExperimentGrid& grid) {
  struct Task {
    size_t cell;
    double noise, ratio;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  std::vector<CellResult> cells;
  for (double noise : grid.noise_levels)
    for (double ratio : grid.outlier_ratios) {
      const size_t cell = cells.size();
      cells.push_back({noise, ratio, 0, 0, 0, 0, grid.seeds});
      for (int s = 0; s < grid.seeds; ++s)
        tasks.push_back({cell, noise, ratio, grid.base_seed + static_cast<std::uint64_t>(s)});
    }

  std::vector<double> accs(tasks.size(), 0.0), errs(tasks.size(), 0.0),
      times(tasks.size(), 0.0);
  std::vector<std::string> failures(tasks.size());
  std::atomic<size_t> next{0};
  const int workers = grid.workers > 0
                          ? grid.workers
                          : std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&]() {
    for (;;) {
      const size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const auto start = std::chrono::steady_clock::now();
      try {
        accs[t] = detail::run_one_trial(grid, tasks[t].noise, tasks[t].ratio,
                                        tasks[t].seed, &errs[t]);
      } catch (const std::exception& e) {
        failures[t] = e.what();  // recorded per cell, not fatal
      }
      times[t] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<std::vector<double>> cell_accs(cells.size());
  for (size_t t = 0; t < tasks.size(); ++t) {
    if (!failures[t].empty()) {
      log_warn("bench trial failed: " + failures[t]);
      continue;
    }
    cell_accs[tasks[t].cell].push_back(accs[t]);
    cells[tasks[t].cell].mean_err += errs[t];
    cells[tasks[t].cell].mean_time_s += times[t];
  }
  for (size_t c = 0; c < cells.size(); ++c) {
    const auto& a = cell_accs[c];
    cells[c].n_seeds = static_cast<int>(a.size());
    if (a.empty()) continue;
    const double mean = std::accumulate(a.begin(), a.end(), 0.0) / a.size();
    double var = 0.0;
    for (double x : a) var += (x - mean) * (x - mean);
    cells[c].mean_acc = mean;
    cells[c].std_acc = std::sqrt(var / a.size());
    cells[c].mean_err /= a.size();
    cells[c].mean_time_s /= a.size();
  }
  return cells;
}

inline void write_results_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "noise,outlier_ratio,mean_acc,std_acc,mean_err,mean_time_s,n_seeds\n";
  char buf[256];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", c.noise,
                  c.outlier_ratio, c.mean_acc, c.std_acc, c.mean_err, c.mean_time_s,
                  c.n_seeds);
    out << buf;
  }
}

// Accuracy-vs-parameter polyline, one series, Fig.-style quick look.
inline void write_results_svg(std::ostream& out, const std::vector<CellResult>& cells,
                              bool x_is_noise) {
  const int w = 640, h = 400, pad = 50;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  double xmax = 1e-12;
  for (const auto& c : cells) xmax = std::max(xmax, x_is_noise ? c.noise : c.outlier_ratio);
  auto sx = [&](double x) { return pad + (w - 2 * pad) * x / xmax; };
  auto sy = [&](double y) { return h - pad - (h - 2 * pad) * y; };
  out << "<line x1=\"" << pad << "\" y1=\"" << h - pad << "\" x2=\"" << w - pad << "\" y2=\""
      << h - pad << "\" stroke=\"black\"/>\n<line x1=\"" << pad << "\" y1=\"" << pad
      << "\" x2=\"" << pad << "\" y2=\"" << h - pad << "\" stroke=\"black\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (const auto& c : cells)
    out << sx(x_is_noise ? c.noise : c.outlier_ratio) << ',' << sy(c.mean_acc) << ' ';
  out << "\"/>\n";
  for (const auto& c : cells)
    out << "<circle cx=\"" << sx(x_is_noise ? c.noise : c.outlier_ratio) << "\" cy=\""
        << sy(c.mean_acc) << "\" r=\"3\" fill=\"steelblue\"/>\n";
  out << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\">"
      << (x_is_noise ? "noise sigma" : "outlier ratio") << "</text>\n"
      << "<text x=\"14\" y=\"" << h / 2 << "\" transform=\"rotate(-90 14 " << h / 2
      << ")\" text-anchor=\"middle\">accuracy</text>\n</svg>\n";
}

// Named grids mirroring the synthetic protocol.
inline ExperimentGrid bench_preset(const std::string& name) {
  ExperimentGrid g;
  if (name == "paper-noise") {
    g.n_in = 100;
    g.noise_levels = {0.02, 0.04, 0.06, 0.08, 0.10};
    g.outlier_ratios = {0.0};
  } else if (name == "paper-noise-small") {
    g.n_in = 20;
    g.noise_levels.clear();
    for (int i = 0; i <= 10; ++i) g.noise_levels.push_back(0.05 * i);
    g.outlier_ratios = {0.0};
  } else if (name == "paper-outliers") {
    g.n_in = 100;
    g.noise_levels = {0.0};
    g.outlier_ratios = {0.2, 0.4, 0.6, 0.8, 1.0};
  } else if (name == "paper-outliers-small") {
    g.n_in = 20;
    g.noise_levels = {0.0};
    g.outlier_ratios.clear();
    for (int i = 0; i <= 10; ++i) g.outlier_ratios.push_back(0.1 * i);
  } else {
    throw std::invalid_argument("unknown bench preset '" + name + "'");
  }
  return g;
}

}  // namespace frgm
