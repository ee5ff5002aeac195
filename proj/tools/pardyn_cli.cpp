// pardyn: train, evaluate, and benchmark separated reduced models.
//
// Subcommands
//   offline    build a reduced model (greedy dynamical method or static baseline)
//   online     evaluate a saved model at new parameter samples
//   benchmark  run a registered benchmark sweep and emit its table/figure CSVs
//   inspect    print the human-readable summary of a saved model
//
// Exit codes: 0 success, 2 usage/configuration, 3 numerical failure, 4 I/O or
// format problems.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "pardyn/benchmarks.hpp"
#include "pardyn/csv.hpp"
#include "pardyn/metrics.hpp"
#include "pardyn/model_io.hpp"
#include "pardyn/offline.hpp"
#include "pardyn/online.hpp"
#include "pardyn/parallel.hpp"
#include "pardyn/version.hpp"
#include "pardyn/vs.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pardyn;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Sample parse_params(const std::string& text) {
  Sample out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || tok.empty())
      throw ConfigError(fmt::format("--params: cannot parse '{}' as a number", tok));
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--params needs at least one value");
  return out;
}

std::string normalize_strategy(const std::string& s) {
  if (s == "estimator") return "residual-bound";  // accepted alias
  if (s == "true-error" || s == "residual-bound") return s;
  throw ConfigError(fmt::format(
      "unknown strategy '{}' (expected true-error, residual-bound, or estimator)", s));
}

fs::path prepare_out_dir(const std::string& out) {
  fs::path dir(out.empty() ? "." : out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError(fmt::format("cannot create output directory '{}': {}",
                                        dir.string(), ec.message()));
  return dir;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(fmt::format("cannot open '{}' for writing", path.string()));
  os.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!os) throw FormatError(fmt::format("failed writing '{}'", path.string()));
}

void write_run_manifest(const fs::path& dir, const std::string& command, json config) {
  json j;
  j["command"] = command;
  j["config"] = std::move(config);
  j["version"] = kVersion;
  j["revision"] = kGitDescribe;
  write_text(dir / "run_manifest.json", j.dump(2) + "\n");
}

std::vector<std::string> xi_header(std::size_t dim) {
  std::vector<std::string> h;
  for (std::size_t i = 0; i < dim; ++i) h.push_back(fmt::format("xi_{}", i));
  return h;
}

CsvTable trace_table(const ReducedModel& model) {
  const std::size_t dim = model.problem.box.dim();
  CsvTable t;
  t.header = {"term"};
  for (const auto& h : xi_header(dim)) t.header.push_back(h);
  t.header.insert(t.header.end(), {"indicator", "strategy", "elapsed_s"});
  for (const auto& s : model.trace) {
    std::vector<std::string> row{fmt::format("{}", s.term)};
    for (double v : s.anchor) row.push_back(format_sci(v));
    row.push_back(format_sci(s.indicator));
    row.push_back(s.strategy);
    row.push_back(format_sci(s.elapsed_s));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// offline

struct OfflineArgs {
  std::string benchmark;
  std::string config_path;
  std::string tier = "ci";
  std::string method = "dvs";
  std::string strategy = "true-error";
  int n_max = 0;  // 0: benchmark rank-list max, or the library default
  double eps = 0.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int train = 0;
  int jobs = 0;
  bool strip_g = false;
  bool verbose = false;
  std::string out = ".";
};

struct TrainingSetup {
  ParametricProblem problem;
  int nx = 0, ny = 0;
  TimeGrid grid;
  int train_count = 0;
  std::uint64_t train_seed = 0;
  SamplingScheme scheme = SamplingScheme::Uniform;
  int default_n_max = 10;
};

TrainingSetup setup_from_config_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(fmt::format("cannot open '{}'", path));
  std::stringstream buf;
  buf << is.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': invalid JSON: {}", path, e.what()));
  }
  TrainingSetup s;
  try {
    s.problem = problem_from_json_string(j.at("problem").dump());
    s.nx = j.at("mesh").at("nx").get<int>();
    s.ny = j.at("mesh").value("ny", 0);
    s.grid.T = s.problem.T;
    s.grid.steps = j.at("grid").at("steps").get<int>();
    const json& tr = j.at("training");
    s.train_count = tr.at("count").get<int>();
    s.train_seed = tr.at("seed").get<std::uint64_t>();
    const std::string scheme = tr.value("scheme", "uniform");
    if (scheme == "uniform") {
      s.scheme = SamplingScheme::Uniform;
    } else if (scheme == "latin-hypercube" || scheme == "lhs") {
      s.scheme = SamplingScheme::LatinHypercube;
    } else {
      throw ConfigError(fmt::format("unknown sampling scheme '{}'", scheme));
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': bad config: {}", path, e.what()));
  }
  return s;
}

TrainingSetup setup_from_benchmark(const std::string& id, const std::string& tier) {
  const BenchmarkSpec spec = benchmark_spec(id);
  TrainingSetup s;
  s.problem = spec.problem;
  if (tier == "full") {
    s.nx = spec.nx;
    s.ny = spec.ny;
  } else if (tier == "ci") {
    s.nx = spec.nx_ci;
    s.ny = spec.ny_ci;
  } else {
    throw ConfigError(fmt::format("unknown tier '{}' (expected ci or full)", tier));
  }
  s.grid = spec.grid;
  s.train_count = spec.train_size;
  s.train_seed = spec.train_seed;
  s.default_n_max = *std::max_element(spec.n_list.begin(), spec.n_list.end());
  return s;
}

int cmd_offline(const OfflineArgs& args) {
  if (args.benchmark.empty() == args.config_path.empty())
    throw ConfigError("offline needs exactly one of --benchmark or --config");
  TrainingSetup setup = args.benchmark.empty()
                            ? setup_from_config_file(args.config_path)
                            : setup_from_benchmark(args.benchmark, args.tier);
  if (args.seed_given) setup.train_seed = args.seed;
  if (args.train > 0) setup.train_count = args.train;
  const int n_max = args.n_max > 0 ? args.n_max : setup.default_n_max;
  const std::string strategy = normalize_strategy(args.strategy);

  const fs::path dir = prepare_out_dir(args.out);
  const Discretization disc = build_discretization(setup.problem, setup.nx, setup.ny);
  const std::vector<Sample> training =
      sample_parameters(setup.problem.box, static_cast<std::size_t>(setup.train_count),
                        setup.train_seed, setup.scheme);

  const auto t0 = std::chrono::steady_clock::now();
  ReducedModel model;
  OfflineDiagnostics diag;
  if (args.method == "dvs") {
    OfflineOptions opt;
    opt.n_max = n_max;
    opt.eps = args.eps;
    opt.strategy = strategy;
    opt.jobs = args.jobs;
    opt.verbose = args.verbose;
    model = run_offline(disc, setup.grid, training, opt, &diag);
  } else if (args.method == "vs") {
    VsOptions opt;
    opt.n_max = n_max;
    opt.eps = args.eps;
    opt.seed = setup.train_seed + 50;
    opt.jobs = args.jobs;
    opt.verbose = args.verbose;
    model = vs_offline(disc, setup.grid, training, opt);
  } else {
    throw ConfigError(fmt::format("unknown method '{}' (expected dvs or vs)", args.method));
  }
  const double offline_s = seconds_since(t0);

  save_model(model, (dir / "model.pdyn").string(), args.strip_g);
  write_model_manifest(model, (dir / "model.manifest.txt").string());
  write_csv((dir / "trace.csv").string(), trace_table(model));
  for (const auto& w : diag.warnings) fmt::print(stderr, "warning: {}\n", w);

  json config;
  config["benchmark"] = args.benchmark;
  config["config_path"] = args.config_path;
  config["tier"] = args.tier;
  config["method"] = args.method;
  config["strategy"] = strategy;
  config["n_max"] = n_max;
  config["eps"] = args.eps;
  config["train_count"] = setup.train_count;
  config["train_seed"] = setup.train_seed;
  config["mesh"] = {{"nx", setup.nx}, {"ny", setup.ny}};
  config["steps"] = setup.grid.steps;
  config["jobs"] = args.jobs;
  config["strip_g"] = args.strip_g;
  write_run_manifest(dir, "offline", std::move(config));

  fmt::print("offline: {} terms in {:.2f}s -> {}\n", model.n_terms(), offline_s,
             (dir / "model.pdyn").string());
  return 0;
}

// ---------------------------------------------------------------------------
// online

struct OnlineArgs {
  std::string model_path;
  std::string params;
  int m = 0;
  std::uint64_t seed = 0;
  int n = -1;
  bool with_fom = false;
  bool reconstruct = false;
  int jobs = 0;
  std::string out = ".";
};

int cmd_online(const OnlineArgs& args) {
  if (args.model_path.empty()) throw ConfigError("online needs --model");
  if (args.params.empty() && args.m <= 0)
    throw ConfigError("online needs --params or a positive --m");
  const ReducedModel model = load_model(args.model_path);
  const std::size_t dim = model.problem.box.dim();

  std::vector<Sample> samples;
  if (!args.params.empty()) {
    Sample xi = parse_params(args.params);
    if (xi.size() != dim)
      throw ConfigError(fmt::format("--params has {} components, problem expects {}",
                                    xi.size(), dim));
    samples.push_back(std::move(xi));
  } else {
    samples = sample_parameters(model.problem.box, static_cast<std::size_t>(args.m),
                                args.seed);
  }
  const fs::path dir = prepare_out_dir(args.out);
  const int m = static_cast<int>(samples.size());

  CsvTable table;
  table.header = {"row"};
  for (const auto& h : xi_header(dim)) table.header.push_back(h);
  if (args.with_fom) table.header.push_back("rel_err");
  table.header.push_back("online_s");

  auto push_summary = [&](const std::string& label, double err, double secs) {
    std::vector<std::string> row{label};
    for (std::size_t i = 0; i < dim; ++i) row.emplace_back();
    if (args.with_fom) row.push_back(format_sci(err));
    row.push_back(format_sci(secs));
    table.rows.push_back(std::move(row));
  };

  if (args.with_fom) {
    const Discretization disc =
        build_discretization(model.problem, model.mesh.nx, model.mesh.ny);
    const int n_use = args.n > 0 ? args.n : model.n_terms();
    const EvalResult ev =
        evaluate_on_samples(disc, model, samples, {n_use}, args.jobs, 0.0);
    double err_max = 0.0, secs_max = 0.0;
    for (int s = 0; s < m; ++s) {
      std::vector<std::string> row{"sample"};
      for (std::size_t i = 0; i < dim; ++i)
        row.push_back(format_sci(ev.sample_rows(s, static_cast<int>(i))));
      const double err = ev.sample_rows(s, static_cast<int>(dim));
      const double secs = ev.sample_rows(s, static_cast<int>(dim) + 1);
      row.push_back(format_sci(err));
      row.push_back(format_sci(secs));
      table.rows.push_back(std::move(row));
      err_max = std::max(err_max, err);
      secs_max = std::max(secs_max, secs);
    }
    push_summary("mean", ev.rows.at(0).err_mean, ev.rows.at(0).online_mean_s);
    push_summary("max", ev.rows.at(0).err_max, secs_max);
    write_csv((dir / "online.csv").string(), table);

    CsvTable curve;
    curve.header = {"node", "t", "err_mean"};
    for (int nnode = 0; nnode < ev.time_mean_err.rows(); ++nnode)
      curve.rows.push_back({fmt::format("{}", nnode),
                            format_sci(model.grid.node(nnode)),
                            format_sci(ev.time_mean_err(nnode, 0))});
    write_csv((dir / "online_curve.csv").string(), curve);
  } else {
    double secs_sum = 0.0, secs_max = 0.0;
    int frozen = 0;
    std::vector<Eigen::MatrixXd> zeta_store(args.reconstruct ? 1 : 0);
    for (int s = 0; s < m; ++s) {
      double secs = 0.0;
      Eigen::MatrixXd zetas;
      if (model.method == "vs") {
        const auto t0 = std::chrono::steady_clock::now();
        zetas = vs_zeta_matrix(model, samples[static_cast<std::size_t>(s)]);
        secs = seconds_since(t0);
      } else {
        OnlineEvaluation ev =
            online_zetas(model, samples[static_cast<std::size_t>(s)], args.n);
        secs = ev.elapsed_s;
        frozen += ev.frozen_steps;
        zetas = std::move(ev.zetas);
      }
      if (args.reconstruct && s == 0) zeta_store[0] = zetas;
      std::vector<std::string> row{"sample"};
      for (double v : samples[static_cast<std::size_t>(s)]) row.push_back(format_sci(v));
      row.push_back(format_sci(secs));
      table.rows.push_back(std::move(row));
      secs_sum += secs;
      secs_max = std::max(secs_max, secs);
    }
    push_summary("mean", 0.0, secs_sum / std::max(1, m));
    push_summary("max", 0.0, secs_max);
    write_csv((dir / "online.csv").string(), table);
    if (frozen > 0)
      fmt::print(stderr, "warning: {} singular coefficient steps were frozen\n", frozen);

    if (args.reconstruct) {
      if (!model.has_g())
        throw FormatError("model was stripped of basis trajectories; cannot reconstruct");
      const Discretization disc =
          build_discretization(model.problem, model.mesh.nx, model.mesh.ny);
      const Sample& xi = samples.front();
      const Vector lift = disc.lifting_field(xi);
      CsvTable fields;
      fields.header = {"time_node", "t", "node", "x", "y", "u"};
      for (int nnode = 0; nnode <= model.grid.steps; ++nnode) {
        const Vector u = reconstruct(model, zeta_store[0], nnode, args.n) + lift;
        for (int p = 0; p < disc.n_nodes(); ++p)
          fields.rows.push_back({fmt::format("{}", nnode),
                                 format_sci(model.grid.node(nnode)),
                                 fmt::format("{}", p),
                                 format_sci(disc.mesh.node_x(p)),
                                 format_sci(disc.mesh.node_y(p)), format_sci(u[p])});
      }
      write_csv((dir / "fields.csv").string(), fields);
    }
  }

  json config;
  config["model"] = args.model_path;
  config["params"] = args.params;
  config["m"] = m;
  config["seed"] = args.seed;
  config["n"] = args.n;
  config["with_fom"] = args.with_fom;
  config["reconstruct"] = args.reconstruct;
  config["jobs"] = args.jobs;
  write_run_manifest(dir, "online", std::move(config));
  fmt::print("online: {} samples -> {}\n", m, (dir / "online.csv").string());
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkArgs {
  std::string id;
  std::string tier = "ci";
  std::string strategy = "true-error";
  std::vector<int> n_list;
  int m = 0;
  std::string compare;
  int jobs = 0;
  bool verbose = false;
  std::string out = ".";
};

int cmd_benchmark(const BenchmarkArgs& args) {
  if (args.id.empty()) throw ConfigError("benchmark needs --id");
  if (!args.compare.empty() && args.compare != "vs")
    throw ConfigError(fmt::format("--compare supports only 'vs', got '{}'", args.compare));
  const BenchmarkSpec spec = benchmark_spec(args.id);
  const fs::path dir = prepare_out_dir(args.out);

  RunOptions opt;
  opt.tier = args.tier;
  opt.method = "dvs";
  opt.strategy = normalize_strategy(args.strategy);
  opt.n_list = args.n_list;
  opt.test_size = args.m;
  opt.jobs = args.jobs;
  opt.verbose = args.verbose;
  const BenchmarkRun dvs = run_benchmark(spec, opt);

  const bool with_vs = !args.compare.empty();
  BenchmarkRun vs;
  if (with_vs) {
    RunOptions vopt = opt;
    vopt.method = "vs";
    vs = run_benchmark(spec, vopt);
  }

  // table: one row per requested rank; the baseline columns are joined on the rank
  // and left empty when its greedy stage stopped earlier.
  CsvTable table;
  table.header = {"n", "err_mean", "err_max", "offline_s", "online_total_s",
                  "online_mean_s"};
  if (with_vs)
    table.header.insert(table.header.end(),
                        {"vs_err_mean", "vs_err_max", "vs_offline_s",
                         "vs_online_total_s", "vs_online_mean_s"});
  for (const auto& row : dvs.rows) {
    std::vector<std::string> cells{
        fmt::format("{}", row.n),        format_sci(row.err_mean),
        format_sci(row.err_max),         format_sci(row.offline_s),
        format_sci(row.online_total_s),  format_sci(row.online_mean_s)};
    if (with_vs) {
      const RunTableRow* match = nullptr;
      for (const auto& vrow : vs.rows)
        if (vrow.n == row.n) match = &vrow;
      if (match) {
        cells.push_back(format_sci(match->err_mean));
        cells.push_back(format_sci(match->err_max));
        cells.push_back(format_sci(match->offline_s));
        cells.push_back(format_sci(match->online_total_s));
        cells.push_back(format_sci(match->online_mean_s));
      } else {
        cells.insert(cells.end(), 5, std::string());
      }
    }
    table.rows.push_back(std::move(cells));
  }
  write_csv((dir / fmt::format("{}_table.csv", spec.id)).string(), table);

  CsvTable curve;
  curve.header = {"node", "t"};
  for (std::size_t c = 0; c < dvs.n_list.size(); ++c)
    curve.header.push_back(fmt::format("err_n{}", dvs.n_list[c]));
  if (with_vs)
    for (std::size_t c = 0; c < vs.n_list.size(); ++c)
      curve.header.push_back(fmt::format("vs_err_n{}", vs.n_list[c]));
  for (int nnode = 0; nnode < dvs.time_mean_err.rows(); ++nnode) {
    std::vector<std::string> cells{fmt::format("{}", nnode),
                                   format_sci(spec.grid.node(nnode))};
    for (int c = 0; c < dvs.time_mean_err.cols(); ++c)
      cells.push_back(format_sci(dvs.time_mean_err(nnode, c)));
    if (with_vs)
      for (int c = 0; c < vs.time_mean_err.cols(); ++c)
        cells.push_back(format_sci(vs.time_mean_err(nnode, c)));
    curve.rows.push_back(std::move(cells));
  }
  write_csv((dir / fmt::format("{}_curve.csv", spec.id)).string(), curve);

  const std::size_t dim = spec.problem.box.dim();
  CsvTable density;
  for (const auto& h : xi_header(dim)) density.header.push_back(h);
  density.header.push_back("rel_err");
  density.header.push_back("online_s");
  if (with_vs) {
    density.header.push_back("vs_rel_err");
    density.header.push_back("vs_online_s");
  }
  for (int s = 0; s < dvs.sample_rows.rows(); ++s) {
    std::vector<std::string> cells;
    for (int c = 0; c < dvs.sample_rows.cols(); ++c)
      cells.push_back(format_sci(dvs.sample_rows(s, c)));
    if (with_vs && s < vs.sample_rows.rows()) {
      cells.push_back(format_sci(vs.sample_rows(s, static_cast<int>(dim))));
      cells.push_back(format_sci(vs.sample_rows(s, static_cast<int>(dim) + 1)));
    } else if (with_vs) {
      cells.insert(cells.end(), 2, std::string());
    }
    density.rows.push_back(std::move(cells));
  }
  write_csv((dir / fmt::format("{}_density.csv", spec.id)).string(), density);

  write_csv((dir / fmt::format("{}_trace.csv", spec.id)).string(),
            trace_table(dvs.model));
  if (with_vs)
    write_csv((dir / fmt::format("{}_trace_vs.csv", spec.id)).string(),
              trace_table(vs.model));

  json config;
  config["id"] = spec.id;
  config["tier"] = args.tier;
  config["strategy"] = opt.strategy;
  config["n_list"] = dvs.n_list;
  config["test_size"] = static_cast<int>(dvs.test_set.size());
  config["train_seed"] = spec.train_seed;
  config["test_seed"] = spec.test_seed;
  config["compare"] = args.compare;
  config["jobs"] = args.jobs;
  write_run_manifest(dir, "benchmark", std::move(config));

  for (const auto& row : dvs.rows)
    fmt::print("{:>10} N={:<3} err_mean={} err_max={}\n", spec.id, row.n,
               format_sci(row.err_mean), format_sci(row.err_max));
  return 0;
}

// ---------------------------------------------------------------------------
// inspect

int cmd_inspect(const std::string& model_path, const std::string& out) {
  if (model_path.empty()) throw ConfigError("inspect needs --model");
  const ReducedModel model = load_model(model_path);
  const std::string body = model_manifest_string(model);
  fmt::print("{}", body);
  if (!out.empty()) write_text(out, body);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separated reduced models for parametric dynamical systems"};
  app.set_version_flag("--version", fmt::format("pardyn {} ({})", kVersion, kGitDescribe));
  app.require_subcommand(1);

  OfflineArgs off;
  CLI::App* c_off = app.add_subcommand("offline", "build a reduced model");
  c_off->add_option("--benchmark", off.benchmark, "registered benchmark id");
  c_off->add_option("--config", off.config_path, "problem config JSON path");
  c_off->add_option("--tier", off.tier, "benchmark mesh tier: ci|full");
  c_off->add_option("--method", off.method, "dvs (dynamical) or vs (static baseline)");
  c_off->add_option("--strategy", off.strategy,
                    "greedy indicator: true-error | residual-bound (alias: estimator)");
  c_off->add_option("--n-max", off.n_max, "maximum number of terms");
  c_off->add_option("--eps", off.eps, "early-stop threshold on the indicator");
  c_off->add_option("--seed", off.seed, "training sample seed");
  c_off->add_option("--train", off.train, "training set size");
  c_off->add_option("--jobs", off.jobs, "worker threads (default: PARDYN_JOBS)");
  c_off->add_flag("--strip-g", off.strip_g, "drop basis trajectories from the model file");
  c_off->add_flag("--verbose", off.verbose, "per-step progress on stderr");
  c_off->add_option("--out", off.out, "output directory");

  OnlineArgs onl;
  CLI::App* c_onl = app.add_subcommand("online", "evaluate a saved model");
  c_onl->add_option("--model", onl.model_path, "model container path");
  c_onl->add_option("--params", onl.params, "explicit sample, comma-separated");
  c_onl->add_option("--m", onl.m, "number of random test samples");
  c_onl->add_option("--seed", onl.seed, "test sample seed");
  c_onl->add_option("--n", onl.n, "truncation rank (default: all terms)");
  c_onl->add_flag("--with-fom", onl.with_fom, "add true errors from full-order solves");
  c_onl->add_flag("--reconstruct", onl.reconstruct,
                  "dump the reconstructed field of the first sample");
  c_onl->add_option("--jobs", onl.jobs, "worker threads (default: PARDYN_JOBS)");
  c_onl->add_option("--out", onl.out, "output directory");

  BenchmarkArgs bm;
  CLI::App* c_bm = app.add_subcommand("benchmark", "run a registered benchmark sweep");
  c_bm->add_option("--id", bm.id, "benchmark id (rd, heat2d, burgers, ac)");
  c_bm->add_option("--tier", bm.tier, "mesh/test tier: ci|full");
  c_bm->add_option("--strategy", bm.strategy,
                   "greedy indicator: true-error | residual-bound (alias: estimator)");
  c_bm->add_option("--n", bm.n_list, "rank list, e.g. 2,4,6,8,10")->delimiter(',');
  c_bm->add_option("--m", bm.m, "test-set size override");
  c_bm->add_option("--compare", bm.compare, "also run a baseline: vs");
  c_bm->add_option("--jobs", bm.jobs, "worker threads (default: PARDYN_JOBS)");
  c_bm->add_flag("--verbose", bm.verbose, "per-step progress on stderr");
  c_bm->add_option("--out", bm.out, "output directory");

  std::string ins_model, ins_out;
  CLI::App* c_ins = app.add_subcommand("inspect", "print a saved model's summary");
  c_ins->add_option("--model", ins_model, "model container path");
  c_ins->add_option("--out", ins_out, "also write the summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  off.seed_given = c_off->count("--seed") > 0;

  try {
    if (c_off->parsed()) return cmd_offline(off);
    if (c_onl->parsed()) return cmd_online(onl);
    if (c_bm->parsed()) return cmd_benchmark(bm);
    if (c_ins->parsed()) return cmd_inspect(ins_model, ins_out);
    throw ConfigError("no subcommand given");
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 3;
  } catch (const FormatError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
