// Microbenchmarks for the kernels that dominate offline/online wall time:
// operator assembly, one implicit full-order step, the scalar coefficient
// recursion, the full online evaluation, and the discrete inner product.

#include <benchmark/benchmark.h>

#include "pardyn/benchmarks.hpp"
#include "pardyn/fom.hpp"
#include "pardyn/offline.hpp"
#include "pardyn/online.hpp"
#include "pardyn/zeta.hpp"

using namespace pardyn;

namespace {

const BenchmarkSpec& rd_spec() {
  static const BenchmarkSpec spec = benchmark_spec("rd");
  return spec;
}

const Discretization& rd_disc() {
  static const Discretization disc = benchmark_discretization(rd_spec(), "ci");
  return disc;
}

// A small trained model shared by the recursion/online benchmarks.
const ReducedModel& rd_model() {
  static const ReducedModel model = [] {
    const BenchmarkSpec& spec = rd_spec();
    const auto training = sample_parameters(spec.problem.box, 6, spec.train_seed);
    OfflineOptions opt;
    opt.n_max = 4;
    opt.jobs = 1;
    return run_offline(rd_disc(), spec.grid, training, opt);
  }();
  return model;
}

void bm_assembly(benchmark::State& state) {
  const BenchmarkSpec& spec = rd_spec();
  for (auto _ : state) {
    Discretization disc = build_discretization(spec.problem, spec.nx, spec.ny);
    benchmark::DoNotOptimize(disc.M.valuePtr());
  }
}
BENCHMARK(bm_assembly);

void bm_fom_step(benchmark::State& state) {
  const Discretization& disc = rd_disc();
  const BenchmarkSpec& spec = rd_spec();
  const Sample xi = sample_parameters(spec.problem.box, 1, 42).front();
  ImplicitStepper stepper(disc, xi, spec.grid.tau());
  Vector w = disc.restrict_interior(disc.initial_field_homogeneous(xi));
  stepper.prepare(disc.prolong_interior(w));
  const Vector rhs = (disc.M_int() * w) / spec.grid.tau() + stepper.source_int();
  for (auto _ : state) {
    Vector next = stepper.solve_interior(rhs);
    benchmark::DoNotOptimize(next.data());
  }
}
BENCHMARK(bm_fom_step);

void bm_fom_solve(benchmark::State& state) {
  const Discretization& disc = rd_disc();
  const BenchmarkSpec& spec = rd_spec();
  const Sample xi = sample_parameters(spec.problem.box, 1, 42).front();
  for (auto _ : state) {
    Trajectory traj = solve_fom_trajectory(disc, xi, spec.grid);
    benchmark::DoNotOptimize(traj.fields.back().data());
  }
}
BENCHMARK(bm_fom_solve);

void bm_zeta_step(benchmark::State& state) {
  const ReducedModel& model = rd_model();
  const Sample xi = sample_parameters(model.problem.box, 1, 43).front();
  const CoefficientValues coef = evaluate_coefficients(model.problem, xi);
  const int k = model.n_terms();
  const RecordLayout lay(model.problem, k);
  const double* rec = model.terms.back().records.data();  // step 0 records
  Vector zn = Vector::Constant(k, 0.5), znp1 = Vector::Constant(k, 0.5);
  for (auto _ : state) {
    auto r = zeta_step(rec, lay, model.grid.tau(), coef, 0.0, 0.0, zn.data(), znp1.data());
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(bm_zeta_step);

void bm_online(benchmark::State& state) {
  const ReducedModel& model = rd_model();
  const Sample xi = sample_parameters(model.problem.box, 1, 44).front();
  for (auto _ : state) {
    OnlineEvaluation ev = online_zetas(model, xi);
    benchmark::DoNotOptimize(ev.zetas.data());
  }
}
BENCHMARK(bm_online);

void bm_inner_product(benchmark::State& state) {
  const Discretization& disc = rd_disc();
  const Vector a = Vector::LinSpaced(disc.n_nodes(), 0.0, 1.0);
  const Vector b = Vector::LinSpaced(disc.n_nodes(), 1.0, -1.0);
  for (auto _ : state) {
    double v = disc.inner(a, b);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(bm_inner_product);

}  // namespace

BENCHMARK_MAIN();
