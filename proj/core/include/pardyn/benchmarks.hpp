#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pardyn/discretization.hpp"
#include "pardyn/model.hpp"
#include "pardyn/offline.hpp"

namespace pardyn {

// A registered benchmark problem: the parametric PDE, its meshes (full tier and a
// cheaper CI tier), time grid, seeded training/test draws, and the rank list reported
// in its error table.
struct BenchmarkSpec {
  std::string id;
  ParametricProblem problem;
  int nx = 0, ny = 0;
  int nx_ci = 0, ny_ci = 0;
  TimeGrid grid;
  int train_size = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t test_seed = 0;
  int test_size_full = 0;
  int test_size_ci = 0;
  std::vector<int> n_list;
};

std::vector<std::string> benchmark_ids();
BenchmarkSpec benchmark_spec(const std::string& id);
Discretization benchmark_discretization(const BenchmarkSpec& spec, const std::string& tier);

struct RunTableRow {
  int n = 0;
  double err_mean = 0.0;
  double err_max = 0.0;
  double offline_s = 0.0;
  double online_total_s = 0.0;
  double online_mean_s = 0.0;
};

struct RunOptions {
  std::string tier = "ci";       // "ci" | "full"
  std::string method = "dvs";    // "dvs" | "vs"
  std::string strategy = "true-error";
  std::vector<int> n_list;       // overrides the spec's rank list when non-empty
  int test_size = 0;             // overrides the tier's test-set size when > 0
  int jobs = 0;
  bool verbose = false;
};

struct EvalResult {
  std::vector<RunTableRow> rows;
  Eigen::MatrixXd time_mean_err;  // (steps+1) x |n_list|: per-node mean relative error
  Eigen::MatrixXd sample_rows;    // M x (dim+2): xi..., rel error at max rank, online_s
  double online_total_s = 0.0;
};

// Evaluates an existing model on explicit samples: one streamed full-order solve per
// sample, all requested ranks in a single pass. `offline_s` is only copied into the
// table rows.
EvalResult evaluate_on_samples(const Discretization& disc, const ReducedModel& model,
                               const std::vector<Sample>& samples,
                               const std::vector<int>& n_list, int jobs,
                               double offline_s);

struct BenchmarkRun {
  BenchmarkSpec spec;
  ReducedModel model;
  OfflineDiagnostics diag;
  double offline_s = 0.0;
  std::vector<int> n_list;
  std::vector<Sample> test_set;
  std::vector<RunTableRow> rows;
  Eigen::MatrixXd time_mean_err;
  Eigen::MatrixXd sample_rows;
};

// Offline stage plus test-set evaluation for one registered benchmark.
BenchmarkRun run_benchmark(const BenchmarkSpec& spec, const RunOptions& opt);

}  // namespace pardyn
