// frgm: command-line front end for graph matching, point-set registration,
// outlier removal and the synthetic benchmark.
//
// Exit codes: 0 ok, 2 malformed input, 3 numerical failure, 4 bad config.

#include "frgm/frgm.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

using frgm::json;
using frgm::Mat;

frgm::SolverKind parse_solver(const std::string& s) {
  if (s == "fw") return frgm::SolverKind::kFrankWolfe;
  if (s == "afw") return frgm::SolverKind::kApproxFrankWolfe;
  throw std::invalid_argument("--solver must be fw or afw");
}

frgm::AdjacencyKind parse_adjacency(const std::string& s, int* knn_k) {
  if (s == "complete") return frgm::AdjacencyKind::kComplete;
  if (s == "delaunay") return frgm::AdjacencyKind::kDelaunay;
  if (s.rfind("knn:", 0) == 0) {
    *knn_k = std::stoi(s.substr(4));
    return frgm::AdjacencyKind::kKnn;
  }
  throw std::invalid_argument("--adjacency must be complete, delaunay or knn:<k>");
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw frgm::io_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

json assignment_json(const frgm::Permutation& perm) {
  return json(perm.assign);
}

json transform_json(const frgm::Transform& tau) {
  json j;
  if (const auto* st = std::get_if<frgm::SimilarityTransform>(&tau)) {
    j["variant"] = "similarity";
    j["s"] = st->s;
    j["R"] = frgm::matrix_to_json(st->r);
    j["t"] = frgm::matrix_to_json(st->t);
  } else if (const auto* at = std::get_if<frgm::AffineTransform>(&tau)) {
    j["variant"] = "affine";
    j["A"] = frgm::matrix_to_json(at->a);
    j["t"] = frgm::matrix_to_json(at->t);
  } else if (const auto* nt = std::get_if<frgm::NonrigidTransform>(&tau)) {
    j["variant"] = "nonrigid";
    j["basis"] = frgm::matrix_to_json(nt->basis);
    j["W"] = frgm::matrix_to_json(nt->w);
    j["sigma_w"] = nt->sigma_w;
  }
  return j;
}

struct CommonOut {
  std::string out = "-";
  void emit(const json& j) const {
    if (out == "-")
      std::cout << j.dump(2) << '\n';
    else
      write_json(out, j);
  }
};

int run(int argc, char** argv) {
  CLI::App app{"functional-representation graph matching toolkit"};
  app.require_subcommand(1);

  // ---- lap ----
  auto* lap = app.add_subcommand("lap", "solve a linear assignment problem");
  std::string lap_cost;
  CommonOut lap_out;
  lap->add_option("--cost", lap_cost, "cost matrix (CSV or JSON)")->required();
  lap->add_option("--out", lap_out.out, "output path or - for stdout");
  lap->callback([&] {
    const Mat cost = frgm::read_matrix(lap_cost);
    const frgm::LapResult res = frgm::hungarian(cost);
    lap_out.emit({{"assignment", assignment_json(res.perm)}, {"objective", res.objective}});
  });

  // ---- match-g ----
  auto* mg = app.add_subcommand("match-g", "general graph matching on edge attributes");
  std::string mg_e1, mg_e2, mg_u, mg_adj1, mg_soft, mg_solver = "fw", mg_config;
  double mg_a1 = 0.99, mg_a2 = 0.5, mg_sigma = 0.5;
  CommonOut mg_out;
  mg->add_option("--e1", mg_e1, "graph-1 edge attribute matrix")->required();
  mg->add_option("--e2", mg_e2, "graph-2 edge attribute matrix")->required();
  mg->add_option("--u", mg_u, "unary cost matrix (optional)");
  mg->add_option("--adj1", mg_adj1, "graph-1 adjacency matrix (default complete)");
  mg->add_option("--alpha1", mg_a1, "stage-1 pairwise weight");
  mg->add_option("--alpha2", mg_a2, "stage-2 pairwise weight");
  mg->add_option("--sigma", mg_sigma, "attribute normalization bandwidth");
  mg->add_option("--solver", mg_solver, "fw or afw");
  mg->add_option("--config", mg_config, "JSON config {alpha1, alpha2, sigma, solver}");
  mg->add_option("--soft", mg_soft, "also write the soft map as CSV");
  mg->add_option("--out", mg_out.out, "output path or - for stdout");
  mg->callback([&] {
    if (!mg_config.empty()) {
      const json cfg = frgm::read_config(mg_config);
      mg_a1 = cfg.value("alpha1", mg_a1);
      mg_a2 = cfg.value("alpha2", mg_a2);
      mg_sigma = cfg.value("sigma", mg_sigma);
      mg_solver = cfg.value("solver", mg_solver);
    }
    const Mat e1 = frgm::read_matrix(mg_e1);
    const Mat e2 = frgm::read_matrix(mg_e2);
    Mat unary, adj1;
    if (!mg_u.empty()) unary = frgm::read_matrix(mg_u);
    if (!mg_adj1.empty()) {
      adj1 = frgm::read_matrix(mg_adj1);
    } else {
      adj1 = Mat::Ones(e1.rows(), e1.cols());
      adj1.diagonal().setZero();
    }
    frgm::GeneralProblem prob =
        frgm::make_general_problem(e1, e2, unary, adj1, mg_a1, mg_a2, mg_sigma);
    prob.solver = parse_solver(mg_solver);
    const frgm::GeneralMatch res = frgm::match_general(prob);
    json j{{"assignment", assignment_json(res.perm)},
           {"objective_trace", res.stage2.objective_trace}};
    if (!mg_soft.empty()) {
      frgm::write_matrix_csv(mg_soft, res.p2_star);
      j["soft"] = mg_soft;
    }
    mg_out.emit(j);
  });

  // ---- match-e ----
  auto* me = app.add_subcommand("match-e", "Euclidean graph matching");
  std::string me_v1, me_v2, me_u, me_solver = "fw", me_adj = "complete", me_config;
  double me_l1 = 0.99, me_l2 = 0.5;
  CommonOut me_out;
  me->add_option("--v1", me_v1, "point set 1 (CSV or JSON)")->required();
  me->add_option("--v2", me_v2, "point set 2")->required();
  me->add_option("--u", me_u, "unary cost matrix (default: shape context)");
  me->add_option("--lambda1", me_l1, "stage-1 pairwise weight");
  me->add_option("--lambda2", me_l2, "stage-2 pairwise weight");
  me->add_option("--solver", me_solver, "fw or afw");
  me->add_option("--adjacency", me_adj, "complete, delaunay or knn:<k>");
  me->add_option("--config", me_config, "JSON config {lambda1, lambda2, solver, adjacency}");
  me->add_option("--out", me_out.out, "output path or - for stdout");
  me->callback([&] {
    if (!me_config.empty()) {
      const json cfg = frgm::read_config(me_config);
      me_l1 = cfg.value("lambda1", me_l1);
      me_l2 = cfg.value("lambda2", me_l2);
      me_solver = cfg.value("solver", me_solver);
      if (cfg.contains("adjacency")) {
        if (cfg["adjacency"].is_object())
          me_adj = "knn:" + std::to_string(cfg["adjacency"].value("knn", 8));
        else
          me_adj = cfg["adjacency"].get<std::string>();
      }
    }
    frgm::EuclidConfig cfg;
    cfg.lambda1 = me_l1;
    cfg.lambda2 = me_l2;
    cfg.solver = parse_solver(me_solver);
    cfg.adjacency = parse_adjacency(me_adj, &cfg.knn_k);
    const frgm::PointSet v1 = frgm::read_points(me_v1);
    const frgm::PointSet v2 = frgm::read_points(me_v2);
    frgm::EuclideanProblem prob = frgm::make_euclidean_problem(v1.points, v2.points, cfg);
    if (!me_u.empty()) prob.unary = frgm::read_matrix(me_u);
    const frgm::EuclideanMatch res = frgm::match_euclidean(prob, cfg.solve_opts);
    me_out.emit({{"assignment", assignment_json(res.perm)},
                 {"objective_trace", res.stage2.objective_trace},
                 {"binarity", res.binarity}});
  });

  // ---- match-d ----
  auto* md = app.add_subcommand("match-d", "deformable matching with transform recovery");
  std::string md_v1, md_v2, md_variant = "similarity";
  int md_rounds = 10;
  double md_lambda = 0.5, md_sigma_w = 0.0;
  CommonOut md_out;
  md->add_option("--v1", md_v1, "point set 1")->required();
  md->add_option("--v2", md_v2, "point set 2")->required();
  md->add_option("--variant", md_variant, "similarity, affine or nonrigid");
  md->add_option("--rounds", md_rounds, "alternation rounds");
  md->add_option("--lambda", md_lambda, "pairwise weight of the fit");
  md->add_option("--sigma-w", md_sigma_w, "RBF bandwidth (0: auto)");
  md->add_option("--out", md_out.out, "output path or - for stdout");
  md->callback([&] {
    frgm::DeformOptions opts;
    if (md_variant == "similarity")
      opts.variant = frgm::DeformVariant::kSimilarity;
    else if (md_variant == "affine")
      opts.variant = frgm::DeformVariant::kAffine;
    else if (md_variant == "nonrigid")
      opts.variant = frgm::DeformVariant::kNonrigid;
    else
      throw std::invalid_argument("--variant must be similarity, affine or nonrigid");
    opts.rounds = md_rounds;
    opts.lambda = md_lambda;
    opts.sigma_w = md_sigma_w;
    const frgm::PointSet v1 = frgm::read_points(md_v1);
    const frgm::PointSet v2 = frgm::read_points(md_v2);
    const frgm::DeformResult res = frgm::match_deformable(v1.points, v2.points, opts);
    md_out.emit({{"assignment", assignment_json(res.perm)},
                 {"transform", transform_json(res.transform)},
                 {"displacement_trace", res.displacement_trace}});
  });

  // ---- remove-outliers ----
  auto* ro = app.add_subcommand("remove-outliers", "iterative ratio-test pruning of V2");
  std::string ro_v1, ro_v2;
  double ro_k = 2.0;
  int ro_rounds = 3;
  CommonOut ro_out;
  ro->add_option("--v1", ro_v1, "point set 1")->required();
  ro->add_option("--v2", ro_v2, "point set 2")->required();
  ro->add_option("--outlier-k", ro_k, "ratio-test threshold (> 1)");
  ro->add_option("--outlier-rounds", ro_rounds, "match/prune rounds");
  ro->add_option("--out", ro_out.out, "output path or - for stdout");
  ro->callback([&] {
    const frgm::PointSet v1 = frgm::read_points(ro_v1);
    const frgm::PointSet v2 = frgm::read_points(ro_v2);
    frgm::RemovalConfig cfg;
    cfg.k = ro_k;
    cfg.rounds = ro_rounds;
    const frgm::RemovalResult res = frgm::iterative_removal(v1.points, v2.points, cfg);
    ro_out.emit({{"kept", res.kept}, {"assignment", assignment_json(res.perm)}});
  });

  // ---- bench ----
  auto* be = app.add_subcommand("bench", "synthetic experiment grids");
  std::string be_preset, be_grid, be_algo = "frgm-e", be_csv = "-", be_svg;
  std::uint64_t be_seed = 0;
  int be_workers = 0;
  be->add_option("--preset", be_preset, "paper-noise, paper-noise-small, paper-outliers, paper-outliers-small");
  be->add_option("--grid", be_grid, "grid config file (JSON or TOML)");
  be->add_option("--algo", be_algo, "frgm-e or frgm-g");
  be->add_option("--seed", be_seed, "base seed")->required();
  be->add_option("--workers", be_workers, "worker threads (0: hardware)");
  be->add_option("--out", be_csv, "CSV output path or - for stdout");
  be->add_option("--svg", be_svg, "optional accuracy plot");
  be->callback([&] {
    frgm::ExperimentGrid grid;
    if (!be_preset.empty()) {
      grid = frgm::bench_preset(be_preset);
    } else if (!be_grid.empty()) {
      const json cfg = frgm::read_config(be_grid);
      grid.n_in = cfg.value("n_in", grid.n_in);
      grid.seeds = cfg.value("seeds", grid.seeds);
      if (cfg.contains("noise"))
        grid.noise_levels = cfg["noise"].get<std::vector<double>>();
      if (cfg.contains("outliers"))
        grid.outlier_ratios = cfg["outliers"].get<std::vector<double>>();
      be_algo = cfg.value("algo", be_algo);
    } else {
      throw std::invalid_argument("bench requires --preset or --grid");
    }
    if (be_algo == "frgm-e")
      grid.algo = frgm::BenchAlgo::kFrgmE;
    else if (be_algo == "frgm-g")
      grid.algo = frgm::BenchAlgo::kFrgmG;
    else
      throw std::invalid_argument("--algo must be frgm-e or frgm-g");
    grid.base_seed = be_seed;
    grid.workers = be_workers;
    const std::vector<frgm::CellResult> cells = frgm::run_experiment(grid);
    if (be_csv == "-") {
      frgm::write_results_csv(std::cout, cells);
    } else {
      std::ofstream out(be_csv, std::ios::binary);
      if (!out) throw frgm::io_error("cannot write " + be_csv);
      frgm::write_results_csv(out, cells);
    }
    if (!be_svg.empty()) {
      std::ofstream out(be_svg, std::ios::binary);
      if (!out) throw frgm::io_error("cannot write " + be_svg);
      frgm::write_results_svg(out, cells, grid.noise_levels.size() > 1);
    }
  });

  // ---- synth ----
  auto* sy = app.add_subcommand("synth", "emit a synthetic instance");
  int sy_nin = 100, sy_nout = 0;
  double sy_noise = 0.0;
  std::uint64_t sy_seed = 0;
  std::string sy_prefix = "instance";
  sy->add_option("--n-in", sy_nin, "inlier count");
  sy->add_option("--noise", sy_noise, "gaussian noise sigma");
  sy->add_option("--n-out", sy_nout, "outlier count");
  sy->add_option("--seed", sy_seed, "seed")->required();
  sy->add_option("--out-prefix", sy_prefix, "writes <prefix>_v1.csv, _v2.csv, _truth.json");
  sy->callback([&] {
    const frgm::SyntheticInstance inst = frgm::gen_synthetic(sy_nin, sy_noise, sy_nout, sy_seed);
    frgm::write_points_csv(sy_prefix + "_v1.csv", inst.v1);
    frgm::write_points_csv(sy_prefix + "_v2.csv", inst.v2);
    write_json(sy_prefix + "_truth.json", json{{"truth", inst.truth}});
    std::cout << sy_prefix << "_v1.csv " << sy_prefix << "_v2.csv " << sy_prefix
              << "_truth.json\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const frgm::io_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return 2;
  } catch (const frgm::numerical_error& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
