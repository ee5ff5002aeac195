#include "pardyn/benchmarks.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pardyn/metrics.hpp"
#include "pardyn/online.hpp"
#include "pardyn/parallel.hpp"
#include "pardyn/vs.hpp"

namespace pardyn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BenchmarkSpec make_rd() {
  BenchmarkSpec s;
  s.id = "rd";
  ParametricProblem& p = s.problem;
  p.name = "rd";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 1.0;
  p.box.lo = {1.0, 1.0, 1.0, 1.0};
  p.box.hi = {3.0, 3.0, 3.0, 3.0};
  // du/dt = -xi1*u + 2*xi2*u_xx + xi3 with u(x,0) = u_boundary = 2*(x+1)*xi4.
  // The boundary data is absorbed by the static lifting 2*(x+1)*xi4, which adds the
  // source -xi1*xi4*2*(x+1) to the homogeneous problem and makes its start zero.
  p.A = {{LinearOp::Identity, CoefficientFn::xi(0, -1.0)},
         {LinearOp::Laplacian, CoefficientFn::xi(1, 2.0)}};
  p.C = {{SpatialFn::constant(1.0), CoefficientFn::xi(2)},
         {SpatialFn::affine_x(2.0, 2.0), CoefficientFn::xi_product(0, 3, -1.0)}};
  p.lifting = {{SpatialFn::affine_x(2.0, 2.0), CoefficientFn::xi(3)}};
  s.nx = s.nx_ci = 50;
  s.grid = {1.0, 1000};
  s.train_size = 11;
  s.train_seed = 101;
  s.test_seed = 201;
  s.test_size_full = 1000;
  s.test_size_ci = 1000;
  s.n_list = {1, 2, 4, 7};
  return s;
}

BenchmarkSpec make_heat2d() {
  BenchmarkSpec s;
  s.id = "heat2d";
  ParametricProblem& p = s.problem;
  p.name = "heat2d";
  p.dim = 2;
  p.xlim = {0.0, M_PI};
  p.ylim = {0.0, M_PI};
  p.T = 1.0;
  p.box.lo.assign(11, 1.0);
  p.box.hi.assign(11, 4.0);
  // du/dt = xi1*Lap(u) + 1 + sum_{m=1}^{10} (sin(2 pi m x) + sin(2 pi m y))/(m^2 pi^2) * xi_{m+1}
  // with u(x,0) = sin(x)sin(y) + 1 and boundary value 1 (lifted by the constant 1).
  p.A = {{LinearOp::Laplacian, CoefficientFn::xi(0)}};
  p.C.push_back({SpatialFn::constant(1.0), CoefficientFn::constant(1.0)});
  for (int m = 1; m <= 10; ++m) {
    p.C.push_back({SpatialFn::sine_pair(1.0, m),
                   CoefficientFn::xi(static_cast<std::size_t>(m), 1.0 / (m * m * M_PI * M_PI))});
  }
  p.initial = {{CoefficientFn::constant(1.0), SpatialFn::sinsin()}};
  p.lifting = {{SpatialFn::constant(1.0), CoefficientFn::constant(1.0)}};
  s.nx = s.ny = 50;
  s.nx_ci = s.ny_ci = 25;
  s.grid = {1.0, 10000};
  s.train_size = 12;
  s.train_seed = 102;
  s.test_seed = 202;
  s.test_size_full = 1000;
  s.test_size_ci = 100;
  s.n_list = {2, 4, 6, 8, 10};
  return s;
}

BenchmarkSpec make_burgers() {
  BenchmarkSpec s;
  s.id = "burgers";
  ParametricProblem& p = s.problem;
  p.name = "burgers";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 2.0;
  p.box.lo = {1.0, 1.0};
  p.box.hi = {3.0, 3.0};
  // du/dt + u*du/dx = (xi1/50)*u_xx, u(x,0) = x(1-x)*xi2/2, homogeneous boundary.
  p.A = {{LinearOp::Laplacian, CoefficientFn::xi(0, 1.0 / 50.0)}};
  p.H = {{NonlinearKind::Convection, -1.0, CoefficientFn::constant(1.0)}};
  p.initial = {{CoefficientFn::xi(1, 0.5), SpatialFn::parabola(1.0)}};
  s.nx = s.nx_ci = 100;
  s.grid = {2.0, 20000};
  s.train_size = 12;
  s.train_seed = 103;
  s.test_seed = 203;
  s.test_size_full = 1000;
  s.test_size_ci = 100;
  s.n_list = {2, 4, 6, 8, 10};
  return s;
}

BenchmarkSpec make_ac() {
  BenchmarkSpec s;
  s.id = "ac";
  ParametricProblem& p = s.problem;
  p.name = "ac";
  p.dim = 2;
  p.xlim = {0.0, 1.0};
  p.ylim = {0.0, 1.0};
  p.T = 1.0;
  p.box.lo = {0.1};
  p.box.hi = {0.2};
  // du/dt = xi^2*Lap(u) - (u^3 - u), u(x,0) = sqrt(5)(x^2-x)(y^2-y), zero boundary.
  p.A = {{LinearOp::Laplacian, CoefficientFn::xi_product(0, 0)},
         {LinearOp::Identity, CoefficientFn::constant(1.0)}};
  p.H = {{NonlinearKind::Cubic, -1.0, CoefficientFn::constant(1.0)}};
  p.initial = {{CoefficientFn::constant(1.0), SpatialFn::well(std::sqrt(5.0))}};
  s.nx = s.ny = s.nx_ci = s.ny_ci = 20;
  s.grid = {1.0, 10000};
  s.train_size = 8;
  s.train_seed = 104;
  s.test_seed = 204;
  s.test_size_full = 1000;
  s.test_size_ci = 100;
  s.n_list = {1, 2, 3, 4};
  return s;
}

}  // namespace

std::vector<std::string> benchmark_ids() { return {"rd", "heat2d", "burgers", "ac"}; }

BenchmarkSpec benchmark_spec(const std::string& id) {
  if (id == "rd") return make_rd();
  if (id == "heat2d") return make_heat2d();
  if (id == "burgers") return make_burgers();
  if (id == "ac") return make_ac();
  throw ConfigError(fmt::format("unknown benchmark '{}'", id));
}

Discretization benchmark_discretization(const BenchmarkSpec& spec, const std::string& tier) {
  if (tier != "ci" && tier != "full") {
    throw ConfigError(fmt::format("unknown tier '{}'", tier));
  }
  const bool full = tier == "full";
  const int nx = full ? spec.nx : spec.nx_ci;
  const int ny = full ? spec.ny : spec.ny_ci;
  return build_discretization(spec.problem, nx, ny);
}

EvalResult evaluate_on_samples(const Discretization& disc, const ReducedModel& model,
                               const std::vector<Sample>& samples,
                               const std::vector<int>& n_list, int jobs,
                               double offline_s) {
  if (samples.empty()) throw ConfigError("empty evaluation sample set");
  const int m = static_cast<int>(samples.size());
  const int l = static_cast<int>(n_list.size());
  const int steps = model.grid.steps;
  const int dim = static_cast<int>(model.problem.box.dim());

  Eigen::MatrixXd rel = Eigen::MatrixXd::Constant(m, l, kNaN);
  Eigen::VectorXd online_s(m);
  std::vector<Eigen::MatrixXd> ratios(
      static_cast<std::size_t>(l), Eigen::MatrixXd::Constant(steps + 1, m, kNaN));

  parallel_for(m, jobs, [&](int s) {
    const Sample& xi = samples[static_cast<std::size_t>(s)];
    Eigen::MatrixXd zetas;
    double t_online = 0.0;
    if (model.method == "dvs") {
      OnlineEvaluation ev = online_zetas(model, xi);
      t_online = ev.elapsed_s;
      zetas = std::move(ev.zetas);
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      zetas = vs_zeta_matrix(model, xi);
      t_online = seconds_since(t0);
    }
    online_s[s] = t_online;
    const std::vector<ErrorCurves> curves =
        compare_to_fom_multi(disc, model, zetas, xi, n_list);
    for (int j = 0; j < l; ++j) {
      rel(s, j) = curves[static_cast<std::size_t>(j)].rel_spacetime;
      const Vector& err = curves[static_cast<std::size_t>(j)].err_nodes;
      const Vector& ref = curves[static_cast<std::size_t>(j)].ref_nodes;
      for (int node = 0; node <= steps; ++node) {
        if (ref[node] > 0.0) ratios[static_cast<std::size_t>(j)](node, s) = err[node] / ref[node];
      }
    }
  });

  EvalResult out;
  out.online_total_s = online_s.sum();
  out.rows.resize(static_cast<std::size_t>(l));
  int excluded = 0;
  for (int j = 0; j < l; ++j) {
    double acc = 0.0, mx = 0.0;
    int cnt = 0;
    for (int s = 0; s < m; ++s) {
      const double v = rel(s, j);
      if (std::isfinite(v)) {
        acc += v;
        mx = std::max(mx, v);
        ++cnt;
      } else if (j == 0) {
        ++excluded;
      }
    }
    if (cnt == 0) throw DivergenceError("every evaluation sample had a zero-norm reference");
    out.rows[static_cast<std::size_t>(j)] = {n_list[static_cast<std::size_t>(j)],
                                             acc / cnt,
                                             mx,
                                             offline_s,
                                             out.online_total_s,
                                             out.online_total_s / m};
  }
  if (excluded > 0) {
    fmt::print(stderr, "[evaluate] warning: {} samples excluded (zero-norm reference)\n",
               excluded);
  }

  out.time_mean_err.setZero(steps + 1, l);
  for (int j = 0; j < l; ++j) {
    for (int node = 0; node <= steps; ++node) {
      double acc = 0.0;
      int cnt = 0;
      for (int s = 0; s < m; ++s) {
        const double v = ratios[static_cast<std::size_t>(j)](node, s);
        if (std::isfinite(v)) {
          acc += v;
          ++cnt;
        }
      }
      out.time_mean_err(node, j) = cnt > 0 ? acc / cnt : kNaN;
    }
  }

  out.sample_rows.setZero(m, dim + 2);
  for (int s = 0; s < m; ++s) {
    for (int d = 0; d < dim; ++d) out.sample_rows(s, d) = samples[static_cast<std::size_t>(s)][static_cast<std::size_t>(d)];
    out.sample_rows(s, dim) = rel(s, l - 1);
    out.sample_rows(s, dim + 1) = online_s[s];
  }
  return out;
}

BenchmarkRun run_benchmark(const BenchmarkSpec& spec, const RunOptions& opt) {
  BenchmarkRun out;
  out.spec = spec;
  const Discretization disc = benchmark_discretization(spec, opt.tier);
  const std::vector<Sample> training = sample_parameters(
      spec.problem.box, static_cast<std::size_t>(spec.train_size), spec.train_seed);

  out.n_list = opt.n_list.empty() ? spec.n_list : opt.n_list;
  if (out.n_list.empty()) throw ConfigError("empty rank list");
  const int n_max = out.n_list.back();

  const auto t0 = std::chrono::steady_clock::now();
  if (opt.method == "dvs") {
    OfflineOptions oo;
    oo.n_max = n_max;
    oo.strategy = opt.strategy;
    oo.jobs = opt.jobs;
    oo.verbose = opt.verbose;
    out.model = run_offline(disc, spec.grid, training, oo, &out.diag);
  } else if (opt.method == "vs") {
    VsOptions vo;
    vo.n_max = n_max;
    vo.seed = spec.train_seed + 50;
    vo.jobs = opt.jobs;
    vo.verbose = opt.verbose;
    out.model = vs_offline(disc, spec.grid, training, vo);
  } else {
    throw ConfigError(fmt::format("unknown method '{}'", opt.method));
  }
  out.offline_s = seconds_since(t0);

  // Early stopping can leave fewer terms than requested; drop unreachable ranks.
  std::vector<int> usable;
  for (int n : out.n_list) {
    if (n <= out.model.n_terms()) usable.push_back(n);
  }
  if (usable.empty()) usable.push_back(out.model.n_terms());
  if (usable.size() != out.n_list.size()) {
    fmt::print(stderr, "[benchmark] note: model stopped at {} terms; table covers {} ranks\n",
               out.model.n_terms(), usable.size());
  }
  out.n_list = usable;

  const int m = opt.test_size > 0
                    ? opt.test_size
                    : (opt.tier == "full" ? spec.test_size_full : spec.test_size_ci);
  out.test_set =
      sample_parameters(spec.problem.box, static_cast<std::size_t>(m), spec.test_seed);
  EvalResult ev =
      evaluate_on_samples(disc, out.model, out.test_set, out.n_list, opt.jobs, out.offline_s);
  out.rows = std::move(ev.rows);
  out.time_mean_err = std::move(ev.time_mean_err);
  out.sample_rows = std::move(ev.sample_rows);
  return out;
}

}  // namespace pardyn
