// Acceptance gate for the separated-model library.
//
// Each criterion prints exactly one line
//   [PASS|FAIL] criterion <k>: <name> (<detail>)
// and the process exits with the number of failed criteria. --tier=ci (default)
// runs the reduced meshes/test sets; --tier=full runs the published benchmark
// settings and enables the accuracy and budget targets tied to them. Tolerances
// are pinned in this file and nowhere else.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "pardyn/benchmarks.hpp"
#include "pardyn/estimator.hpp"
#include "pardyn/fom.hpp"
#include "pardyn/metrics.hpp"
#include "pardyn/offline.hpp"
#include "pardyn/online.hpp"
#include "pardyn/params.hpp"
#include "pardyn/vs.hpp"
#include "pardyn/zeta.hpp"

#include "../unit/helpers.hpp"

namespace {

using namespace pardyn;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Report {
  int failures = 0;
  void line(int idx, const std::string& name, bool pass, const std::string& detail) {
    fmt::print("[{}] criterion {}: {} ({})\n", pass ? "PASS" : "FAIL", idx, name, detail);
    if (!pass) ++failures;
  }
};

using Outcome = std::pair<bool, std::string>;

void guarded(Report& rep, int idx, const std::string& name,
             const std::function<Outcome()>& fn) {
  Outcome out{false, ""};
  try {
    out = fn();
  } catch (const std::exception& e) {
    out = {false, fmt::format("exception: {}", e.what())};
  }
  rep.line(idx, name, out.first, out.second);
}

// Benchmark runs are expensive; criteria share them through this cache.
struct Cache {
  std::string tier;
  std::map<std::string, BenchmarkRun> store;
  std::map<std::string, double> wall_s;

  const BenchmarkRun& get(const std::string& id, const std::string& method,
                          const std::string& strategy = "true-error") {
    const std::string key = fmt::format("{}:{}:{}", id, method, strategy);
    const auto it = store.find(key);
    if (it != store.end()) return it->second;
    fmt::print(stderr, "[acceptance] running {} ({}, {}, tier {})...\n", id, method,
               strategy, tier);
    RunOptions opt;
    opt.tier = tier;
    opt.method = method;
    opt.strategy = strategy;
    const auto t0 = std::chrono::steady_clock::now();
    BenchmarkRun run = run_benchmark(benchmark_spec(id), opt);
    wall_s[key] = seconds_since(t0);
    fmt::print(stderr, "[acceptance] {} done in {:.1f}s\n", key, wall_s[key]);
    return store.emplace(key, std::move(run)).first->second;
  }
};

double row_err(const BenchmarkRun& run, int n) {
  for (const RunTableRow& r : run.rows) {
    if (r.n == n) return r.err_mean;
  }
  return kNaN;
}

int rank_column(const BenchmarkRun& run, int n) {
  for (std::size_t i = 0; i < run.n_list.size(); ++i) {
    if (run.n_list[i] == n) return static_cast<int>(i);
  }
  return -1;
}

// No worse than one order of magnitude above a published reference value. The
// reference tables act as upper bounds only: the exact-projection recursion
// converges faster than the published numbers on the linear benchmarks, so a
// lower edge would reject the implementation for being too accurate.
bool in_band(double err, double target) {
  return std::isfinite(err) && err <= target * 10.0;
}

// Weakly non-increasing. A greedy error curve that has reached its floor can
// tick up by a fraction of a percent between adjacent ranks (the cubic-reaction
// benchmark plateaus near 8e-5 with a ~1.4% uptick); upticks below 2% count as
// plateau, not growth.
bool non_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] <= v[i - 1] * 1.02)) return false;
  }
  return true;
}

// Mean seconds per call: warm up once, then take the best of three measured
// batches so scheduler noise only ever inflates, never deflates, the result.
double time_per_call(const std::function<void()>& fn, double batch_budget_s = 0.1) {
  fn();
  double best = std::numeric_limits<double>::infinity();
  for (int b = 0; b < 3; ++b) {
    const auto t0 = std::chrono::steady_clock::now();
    int reps = 0;
    double elapsed = 0.0;
    do {
      fn();
      ++reps;
      elapsed = seconds_since(t0);
    } while (elapsed < batch_budget_s || reps < 2);
    best = std::min(best, elapsed / reps);
  }
  return best;
}

// ---------------------------------------------------------------------------
// criterion 1: the reaction-diffusion error table

Outcome criterion_rd_table(Cache& cache) {
  const BenchmarkRun& run = cache.get("rd", "dvs");
  const std::vector<std::pair<int, double>> targets{{2, 3.43e-4}, {4, 1.46e-4}, {7, 4.66e-5}};
  bool ok = true;
  std::string d;
  for (const auto& [n, target] : targets) {
    const double e = row_err(run, n);
    ok = ok && in_band(e, target);
    d += fmt::format("N={} {:.2e} (ref {:.2e}) ", n, e, target);
  }
  std::vector<double> curve;
  for (int n : run.n_list) curve.push_back(row_err(run, n));
  ok = ok && non_increasing(curve);

  const double budget = cache.wall_s.at("rd:dvs:true-error");
  ok = ok && budget < 900.0;
  d += fmt::format("budget {:.0f}s/900s", budget);
  return {ok, d};
}

// ---------------------------------------------------------------------------
// criterion 2: heat equation against the static baseline

Outcome criterion_heat(Cache& cache, bool full) {
  const BenchmarkRun& dvs = cache.get("heat2d", "dvs");
  const BenchmarkRun& vs = cache.get("heat2d", "vs");

  bool ok = true;
  std::string d;
  std::vector<double> curve;
  d += "decay";
  for (int n : {2, 4, 6, 8}) {
    curve.push_back(row_err(dvs, n));
    d += fmt::format(" {:.2e}", curve.back());
  }
  const bool finite = std::all_of(curve.begin(), curve.end(),
                                  [](double v) { return std::isfinite(v); });
  const bool monotone = non_increasing(curve);
  ok = ok && finite && monotone;
  if (!monotone) d += " NOT-MONOTONE";

  int compared = 0;
  d += " dvs/static";
  for (int n : {4, 6, 8, 10}) {
    const double a = row_err(dvs, n);
    const double b = row_err(vs, n);
    if (std::isfinite(a) && std::isfinite(b)) {
      ++compared;
      ok = ok && a <= b;
      d += fmt::format(" N={}:{:.2e}/{:.2e}{}", n, a, b, a <= b ? "" : "!");
    }
  }
  ok = ok && compared > 0;
  d += fmt::format(" ({} ranks) ", compared);

  if (full) {
    const double e8 = row_err(dvs, 8);
    const double v8 = row_err(vs, 8);
    ok = ok && e8 <= 5e-4;
    ok = ok && std::isfinite(v8) && v8 / e8 >= 1e2;
    d += fmt::format("N=8 {:.2e} (<=5e-4) baseline-ratio {:.0f} (>=100)", e8, v8 / e8);
  }
  return {ok, d};
}

// ---------------------------------------------------------------------------
// criterion 3: viscous-convection errors at fixed times

Outcome criterion_burgers(Cache& cache) {
  const BenchmarkRun& run = cache.get("burgers", "dvs");
  const int steps = run.spec.grid.steps;
  const struct {
    int node;
    std::vector<std::pair<int, double>> targets;
  } checks[] = {
      {steps / 2, {{2, 1.17e-2}, {6, 2.17e-4}, {10, 2.76e-5}}},
      {steps, {{2, 8.7e-3}, {6, 4.10e-4}, {10, 7.12e-5}}},
  };

  bool ok = true;
  std::string d;
  for (const auto& chk : checks) {
    std::vector<double> curve;
    d += fmt::format("t={:g}:", run.spec.grid.node(chk.node));
    for (const auto& [n, target] : chk.targets) {
      const int col = rank_column(run, n);
      const double e = col >= 0 ? run.time_mean_err(chk.node, col) : kNaN;
      curve.push_back(e);
      ok = ok && in_band(e, target);
      d += fmt::format(" N={} {:.2e} (ref {:.2e})", n, e, target);
    }
    ok = ok && non_increasing(curve);
    d += "  ";
  }
  return {ok, d};
}

// ---------------------------------------------------------------------------
// criterion 4: cubic-reaction error decay

Outcome criterion_cubic(Cache& cache) {
  const BenchmarkRun& run = cache.get("ac", "dvs");
  const double e1 = row_err(run, 1);
  const double e3 = row_err(run, 3);
  const bool ok = std::isfinite(e1) && e1 <= 5e-2 && std::isfinite(e3) && e3 <= 1e-3;
  return {ok, fmt::format("N=1 {:.2e} (<=5e-2) N=3 {:.2e} (<=1e-3)", e1, e3)};
}

// ---------------------------------------------------------------------------
// criterion 5: online speedup and mesh independence

Outcome criterion_speed(Cache& cache) {
  bool ok = true;
  std::string d;
  const auto noop = [](int, const Vector&) {};

  for (const std::string& id : benchmark_ids()) {
    const BenchmarkRun& run = cache.get(id, "dvs");
    const Discretization disc = benchmark_discretization(run.spec, cache.tier);
    const std::vector<Sample> pts(run.test_set.begin(),
                                  run.test_set.begin() +
                                      std::min<std::ptrdiff_t>(3, run.test_set.size()));
    std::size_t i = 0, j = 0;
    const double fom = time_per_call(
        [&] { solve_fom(disc, pts[i++ % pts.size()], run.spec.grid, noop); });
    const double onl = time_per_call(
        [&] { (void)online_zetas(run.model, pts[j++ % pts.size()]); });
    const double ratio = fom / onl;
    ok = ok && ratio >= 10.0;
    d += fmt::format("{} {:.0f}x ({:.0f}us/{:.0f}us) ", id, ratio, 1e6 * fom,
                     1e6 * onl);
  }

  // Mesh refinement: double the heat-equation mesh, retrain, and compare. The
  // online stage must not see the mesh; the full-order solve must.
  const BenchmarkSpec spec = benchmark_spec("heat2d");
  const BenchmarkRun& base = cache.get("heat2d", "dvs");
  const bool full = cache.tier == "full";
  const int nx = full ? spec.nx : spec.nx_ci;
  const int ny = full ? spec.ny : spec.ny_ci;
  const Discretization d1 = benchmark_discretization(spec, cache.tier);
  fmt::print(stderr, "[acceptance] retraining heat2d on the doubled mesh...\n");
  const Discretization d2 = build_discretization(spec.problem, 2 * nx, 2 * ny);
  const std::vector<Sample> training = sample_parameters(
      spec.problem.box, static_cast<std::size_t>(spec.train_size), spec.train_seed);
  OfflineOptions oo;
  oo.n_max = base.model.n_terms();
  const ReducedModel m2 = run_offline(d2, spec.grid, training, oo);

  const Sample& xi = base.test_set.front();
  const double on1 = time_per_call([&] { (void)online_zetas(base.model, xi); });
  const double on2 = time_per_call([&] { (void)online_zetas(m2, xi); });
  const double f1 = time_per_call([&] { solve_fom(d1, xi, spec.grid, noop); });
  const double f2 = time_per_call([&] { solve_fom(d2, xi, spec.grid, noop); });
  const bool online_flat = std::abs(on2 / on1 - 1.0) <= 0.2;
  const bool fom_grows = f2 >= 2.0 * f1;
  ok = ok && online_flat && fom_grows;
  d += fmt::format("mesh x2: online {:+.0f}% (|..|<=20%), fom {:.1f}x (>=2x)",
                   100.0 * (on2 / on1 - 1.0), f2 / f1);
  return {ok, d};
}

// ---------------------------------------------------------------------------
// criterion 6: the online stage reproduces the training-time coefficients

Outcome criterion_anchors(Cache& cache) {
  bool ok = true;
  double worst = 0.0;
  int terms = 0;
  std::string d;
  for (const std::string& id : benchmark_ids()) {
    const BenchmarkRun& run = cache.get(id, "dvs");
    const ReducedModel& model = run.model;
    for (int k = 0; k < model.n_terms(); ++k) {
      const Sample& anchor = model.terms[static_cast<std::size_t>(k)].anchor;
      ++terms;

      if (k > 0) {
        const Eigen::MatrixXd& ref = run.diag.anchor_zetas[static_cast<std::size_t>(k)];
        const OnlineEvaluation ev = online_zetas(model, anchor, k);
        if (ev.zetas.rows() != ref.rows() || ev.zetas.cols() != ref.cols()) {
          ok = false;
          continue;
        }
        for (Eigen::Index r = 0; r < ref.rows(); ++r) {
          for (Eigen::Index c = 0; c < ref.cols(); ++c) {
            const double scale = std::max(1.0, std::abs(ref(r, c)));
            worst = std::max(worst, std::abs(ev.zetas(r, c) - ref(r, c)) / scale);
          }
        }
      }

      const Vector z0 = initial_zetas(model, anchor);
      const double v = z0[k];
      const bool degenerate =
          model.terms[static_cast<std::size_t>(k)].zeta0.w.size() == 0;
      if (degenerate) {
        ok = ok && v == 0.0;
      } else {
        ok = ok && std::abs(v - 1.0) <= 1e-13;
      }
    }
  }
  ok = ok && worst <= 1e-14;
  d = fmt::format("{} terms, worst coefficient deviation {:.1e} (<=1e-14)", terms, worst);
  return {ok, d};
}

// ---------------------------------------------------------------------------
// criterion 7: exactness on a manufactured rank-2 problem

Outcome criterion_manufactured() {
  const int nx = 24;
  const ParametricProblem p = testing::rank2(nx);
  const Discretization disc = build_discretization(p, nx);
  const TimeGrid grid{p.T, 40};
  OfflineOptions opt;
  opt.n_max = 2;
  const ReducedModel model =
      run_offline(disc, grid, {{1.0}, {1.8}, {0.6}, {1.4}}, opt);
  if (model.n_terms() != 2) return {false, "did not reach two terms"};

  double worst = 0.0;
  for (const Sample& xi : {Sample{1.3}, Sample{0.77}}) {
    const OnlineEvaluation ev = online_zetas(model, xi);
    const ErrorCurves c = compare_to_fom(disc, model, ev.zetas, xi);
    worst = std::max(worst, c.rel_spacetime);
  }
  return {worst <= 1e-8, fmt::format("worst relative error {:.2e} (<=1e-8)", worst)};
}

// ---------------------------------------------------------------------------
// criterion 8: error-bound coverage and greedy-strategy agreement

Outcome criterion_estimator(Cache& cache) {
  // Coverage: the per-node bound dominates the true error on fresh samples.
  const BenchmarkRun& heat = cache.get("heat2d", "dvs");
  const Discretization disc = benchmark_discretization(heat.spec, cache.tier);
  ReducedModel m3 = heat.model;
  m3.terms.resize(static_cast<std::size_t>(std::min(3, heat.model.n_terms())));
  const ResidualEstimator est(disc, m3, LipschitzMode::EigenBound);

  const std::vector<Sample> samples =
      sample_parameters(heat.spec.problem.box, 50, 4242);
  long covered = 0, total = 0;
  for (const Sample& xi : samples) {
    const Vector delta = est.delta_curve(xi);
    const OnlineEvaluation ev = online_zetas(m3, xi);
    solve_fom(disc, xi, heat.spec.grid, [&](int n, const Vector& w) {
      const double err = disc.norm(w - reconstruct(m3, ev.zetas, n));
      if (delta[n] * (1.0 + 1e-9) + 1e-14 >= err) ++covered;
      ++total;
    });
  }
  const double cov = static_cast<double>(covered) / static_cast<double>(total);
  bool ok = cov >= 0.98;
  std::string d = fmt::format("bound coverage {:.2f}% (>=98%) ", 100.0 * cov);

  // Strategy agreement: greedy driven by the bound lands near greedy driven by
  // the true error on the reaction-diffusion benchmark.
  const BenchmarkRun& te = cache.get("rd", "dvs");
  const BenchmarkRun& rb = cache.get("rd", "dvs", "residual-bound");
  int n_common = 0;
  for (int n : te.n_list) {
    if (rank_column(rb, n) >= 0) n_common = std::max(n_common, n);
  }
  const double a = row_err(te, n_common);
  const double b = row_err(rb, n_common);
  const double ratio = std::max(a, b) / std::min(a, b);
  ok = ok && std::isfinite(ratio) && ratio <= 3.0;
  d += fmt::format("strategy ratio at N={} {:.2f} (<=3)", n_common, ratio);
  return {ok, d};
}

// ---------------------------------------------------------------------------
// criterion 9: kernel oracles (assembly, spectral constant, coefficient recursion)

// Hat-function quadrature oracle, independent of the assembly code.
struct HatOracle {
  int nx;
  double h;
  explicit HatOracle(int n) : nx(n), h(1.0 / n) {}
  double hat(int i, double x) const {
    const double t = 1.0 - std::abs(x - i * h) / h;
    return t > 0.0 ? t : 0.0;
  }
  double dhat(int i, double x) const {
    if (x < (i - 1) * h || x > (i + 1) * h) return 0.0;
    return x < i * h ? 1.0 / h : -1.0 / h;
  }
  double integrate(const std::function<double(double)>& f) const {
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    double acc = 0.0;
    for (int e = 0; e < nx; ++e) {
      const double a = e * h, b = (e + 1) * h;
      for (int q = 0; q < 5; ++q) {
        acc += 0.5 * (b - a) * gw[q] * f(0.5 * (a + b) + 0.5 * (b - a) * gx[q]);
      }
    }
    return acc;
  }
};

Outcome criterion_kernels() {
  bool ok = true;
  std::string d;

  // (a) assembled mass/stiffness/load entries against direct quadrature
  {
    const int nx = 7;
    const HatOracle oracle(nx);
    const ParametricProblem p = testing::forcing_only();  // Laplacian-free, one load
    const Discretization disc = build_discretization(p, nx);
    const ParametricProblem ph = testing::heat1d();
    const Discretization dh = build_discretization(ph, nx);
    double worst = 0.0;
    for (int i = 0; i <= nx; ++i) {
      for (int j = 0; j <= nx; ++j) {
        const double m_ref =
            oracle.integrate([&](double x) { return oracle.hat(i, x) * oracle.hat(j, x); });
        const double k_ref = -oracle.integrate(
            [&](double x) { return oracle.dhat(i, x) * oracle.dhat(j, x); });
        worst = std::max(worst, std::abs(dh.M.coeff(i, j) - m_ref) /
                                    std::max(1.0, std::abs(m_ref)));
        worst = std::max(worst, std::abs(dh.A_ops[0].coeff(i, j) - k_ref) /
                                    std::max(1.0, std::abs(k_ref)));
      }
      const double b_ref = oracle.integrate(
          [&](double x) { return x * (1.0 - x) * oracle.hat(i, x); });
      worst = std::max(worst,
                       std::abs(disc.C_loads[0][i] - b_ref) / std::max(1.0, std::abs(b_ref)));
    }
    ok = ok && worst <= 1e-10;
    d += fmt::format("assembly {:.1e} (<=1e-10) ", worst);
  }

  // (b) spectral log-Lipschitz constant against a dense generalized eigensolve
  {
    const ParametricProblem p = testing::heat1d();
    const Discretization disc = build_discretization(p, 8);
    const Sample xi{1.1};
    const CoefficientValues coef = evaluate_coefficients(p, xi);
    const double lam = log_lipschitz(disc, coef, Vector::Zero(disc.n_nodes()),
                                     LipschitzMode::EigenBound);
    Eigen::MatrixXd s = coef.kA[0] * Eigen::MatrixXd(disc.A_int()[0]);
    s = 0.5 * (s + s.transpose()).eval();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
        s, Eigen::MatrixXd(disc.M_int()));
    const double lam_ref = ges.eigenvalues().maxCoeff();
    const double rel = std::abs(lam - lam_ref) / std::abs(lam_ref);
    ok = ok && rel <= 1e-8;
    d += fmt::format("spectral {:.1e} (<=1e-8) ", rel);
  }

  // (c) coefficient recursion against the scalar backward-Euler closed form
  {
    ParametricProblem p;
    p.name = "decay";
    p.dim = 1;
    p.T = 1.0;
    p.box.lo = {0.5};
    p.box.hi = {2.0};
    p.A.push_back({LinearOp::Identity, CoefficientFn::xi(0)});
    p.initial.push_back({CoefficientFn::constant(1.0), SpatialFn::sine(1.0, 1.0)});
    const RecordLayout lay(p, 1);
    const double lambda = 3.25, tau = 0.01;
    std::vector<double> rec(static_cast<std::size_t>(lay.size()), 0.0);
    rec[0] = rec[1] = 1.0;
    rec[static_cast<std::size_t>(lay.a(0, 0))] = -lambda;
    rec[static_cast<std::size_t>(lay.g_cross(0))] = 1.0;
    rec[static_cast<std::size_t>(lay.g_cross_lag(0))] = 1.0;
    const Sample xi{1.7};
    const CoefficientValues coef = evaluate_coefficients(p, xi);
    double worst = 0.0;
    std::vector<double> zn{1.0}, znp1{0.0};
    for (int n = 0; n < 200; ++n) {
      const ZetaStepResult r =
          zeta_step(rec.data(), lay, tau, coef, 0.0, 0.0, zn.data(), znp1.data());
      if (r.frozen) return {false, "recursion froze unexpectedly"};
      zn[0] = r.value;
      const double closed = std::pow(1.0 + tau * xi[0] * lambda, -(n + 1));
      worst = std::max(worst, std::abs(r.value - closed) / std::abs(closed));
    }
    ok = ok && worst <= 1e-12;
    d += fmt::format("recursion {:.1e} (<=1e-12)", worst);
  }
  return {ok, d};
}

}  // namespace

int main(int argc, char** argv) {
  std::string tier = "ci";
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--tier=ci") {
      tier = "ci";
    } else if (a == "--tier=full") {
      tier = "full";
    } else {
      fmt::print(stderr, "usage: {} [--tier=ci|--tier=full]\n", argv[0]);
      return 64;
    }
  }
  const bool full = tier == "full";
  fmt::print("acceptance tier: {}\n", tier);

  Report rep;
  Cache cache{tier, {}, {}};
  guarded(rep, 1, "reaction-diffusion error table",
          [&] { return criterion_rd_table(cache); });
  guarded(rep, 2, "heat equation vs static baseline",
          [&] { return criterion_heat(cache, full); });
  guarded(rep, 3, "viscous-convection fixed-time errors",
          [&] { return criterion_burgers(cache); });
  guarded(rep, 4, "cubic-reaction error decay", [&] { return criterion_cubic(cache); });
  guarded(rep, 5, "online speedup and mesh independence",
          [&] { return criterion_speed(cache); });
  guarded(rep, 6, "anchor coefficient reproduction",
          [&] { return criterion_anchors(cache); });
  guarded(rep, 7, "manufactured rank-2 exactness",
          [] { return criterion_manufactured(); });
  guarded(rep, 8, "error-bound coverage and strategy agreement",
          [&] { return criterion_estimator(cache); });
  guarded(rep, 9, "kernel oracles", [] { return criterion_kernels(); });

  fmt::print("{} of 9 criteria passed\n", 9 - rep.failures);
  return rep.failures;
}
