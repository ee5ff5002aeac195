#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "pardyn/benchmarks.hpp"
#include "pardyn/metrics.hpp"
#include "pardyn/model_io.hpp"
#include "pardyn/offline.hpp"
#include "pardyn/online.hpp"

using namespace pardyn;

namespace {

std::vector<Sample> fixed_training(std::initializer_list<double> values) {
  std::vector<Sample> out;
  for (double v : values) out.push_back({v});
  return out;
}

}  // namespace

TEST_CASE("a separable rank-1 problem is exact with a single term") {
  const ParametricProblem p = testing::rank1();
  const Discretization disc = build_discretization(p, 24);
  const TimeGrid grid{p.T, 50};
  const auto training = fixed_training({1.0, 1.9, 0.6, 1.4});

  OfflineOptions opt;
  opt.n_max = 1;
  opt.jobs = 1;
  ReducedModel model = run_offline(disc, grid, training, opt);
  REQUIRE(model.n_terms() == 1);
  CHECK(model.trace.at(0).anchor == training.front());  // greedy starts at sample 1

  for (double v : {0.55, 0.8, 1.23, 1.77}) {
    const Sample xi{v};
    const OnlineEvaluation ev = online_zetas(model, xi);
    const ErrorCurves err = compare_to_fom(disc, model, ev.zetas, xi);
    CHECK(err.rel_spacetime < 1e-10);
  }
}

TEST_CASE("the two-mode manufactured problem is reproduced exactly at rank 2") {
  const int nx = 24;
  const ParametricProblem p = testing::rank2(nx);
  const Discretization disc = build_discretization(p, nx);
  const TimeGrid grid{p.T, 80};
  // first sample exactly at the decoupling point xi = 1
  const auto training = fixed_training({1.0, 1.8, 0.6, 1.4, 0.9});

  OfflineOptions opt;
  opt.n_max = 2;
  opt.jobs = 1;
  OfflineDiagnostics diag;
  ReducedModel model = run_offline(disc, grid, training, opt, &diag);
  REQUIRE(model.n_terms() == 2);

  for (double v : {0.51, 0.77, 1.33, 1.96}) {
    const Sample xi{v};
    const OnlineEvaluation ev = online_zetas(model, xi);
    const ErrorCurves err = compare_to_fom(disc, model, ev.zetas, xi);
    CHECK(err.rel_spacetime < 1e-9);
  }
}

TEST_CASE("training errors at the anchors drop far below the training maximum") {
  // Parabola initial data mixes every diffusion eigenmode, so the solution
  // manifold has no finite rank and un-enrolled samples keep a real error.
  ParametricProblem p = testing::heat1d();
  p.initial[0].q = SpatialFn::parabola(1.0);
  const Discretization disc = build_discretization(p, 20);
  const TimeGrid grid{p.T, 40};
  const auto training = sample_parameters(p.box, 8, 5);

  OfflineOptions opt;
  opt.n_max = 3;
  opt.jobs = 1;
  ReducedModel model = run_offline(disc, grid, training, opt);
  REQUIRE(model.n_terms() >= 2);

  double anchor_max = 0.0, train_max = 0.0;
  for (const auto& xi : training) {
    const OnlineEvaluation ev = online_zetas(model, xi);
    const double e = compare_to_fom(disc, model, ev.zetas, xi).rel_spacetime;
    train_max = std::max(train_max, e);
    for (const auto& t : model.terms)
      if (t.anchor == xi) anchor_max = std::max(anchor_max, e);
  }
  CHECK(anchor_max * 10.0 <= train_max + 1e-30);
}

TEST_CASE("the diagonal cross record of every step equals the squared norm record") {
  const int nx = 16;
  const ParametricProblem p = testing::rank2(nx);
  const Discretization disc = build_discretization(p, nx);
  const TimeGrid grid{p.T, 30};
  OfflineOptions opt;
  opt.n_max = 2;
  opt.jobs = 1;
  const ReducedModel model = run_offline(disc, grid, fixed_training({1.0, 1.7}), opt);

  for (int k = 1; k <= model.n_terms(); ++k) {
    const RecordLayout lay(p, k);
    const auto& rec = model.terms[static_cast<std::size_t>(k - 1)].records;
    REQUIRE(rec.size() == static_cast<std::size_t>(lay.size()) *
                              static_cast<std::size_t>(grid.steps));
    for (int n = 0; n < grid.steps; ++n) {
      const double* r = rec.data() + static_cast<std::size_t>(n) * lay.size();
      CHECK(r[lay.g_cross(k - 1)] == r[0]);
      CHECK(r[lay.g_cross_lag(k - 1)] == r[1]);
    }
  }
}

TEST_CASE("initial coefficients at the anchors are exactly one") {
  const int nx = 16;
  const ParametricProblem p = testing::rank2(nx);
  const Discretization disc = build_discretization(p, nx);
  const TimeGrid grid{p.T, 30};
  OfflineOptions opt;
  opt.n_max = 3;
  opt.jobs = 1;
  const ReducedModel model =
      run_offline(disc, grid, fixed_training({1.0, 1.7, 0.8, 1.3}), opt);

  for (int k = 1; k <= model.n_terms(); ++k) {
    const Sample& anchor = model.terms[static_cast<std::size_t>(k - 1)].anchor;
    const Vector z0 = initial_zetas(model, anchor, k);
    if (model.terms[static_cast<std::size_t>(k - 1)].zeta0.w.size() == 0) {
      CHECK(z0[k - 1] == 0.0);  // degenerate representation
    } else {
      CHECK(std::abs(z0[k - 1] - 1.0) <= 1e-13);
    }
  }
}

TEST_CASE("an identically zero initial error is stored as degenerate") {
  // The registered reaction-diffusion benchmark starts from zero homogeneous data
  // (the initial condition is exactly the lifting), so e_0 = 0 for every sample.
  const BenchmarkSpec spec = benchmark_spec("rd");
  const Discretization disc = benchmark_discretization(spec, "ci");
  const TimeGrid grid{spec.grid.T, 60};  // shortened march, same structure
  const auto training = sample_parameters(spec.problem.box, 4, spec.train_seed);
  OfflineOptions opt;
  opt.n_max = 1;
  opt.jobs = 1;
  const ReducedModel model = run_offline(disc, grid, training, opt);
  REQUIRE(model.n_terms() == 1);
  CHECK(model.terms[0].zeta0.w.size() == 0);
  const Vector z0 = initial_zetas(model, training.front(), 1);
  CHECK(z0[0] == 0.0);
  // the stored g at node 0 is the zero field
  const auto g0 = term_field(model.terms[0], 0, disc.n_nodes());
  CHECK(g0.norm() == 0.0);
}

TEST_CASE("online coefficients at an anchor match the rows used during training") {
  const ParametricProblem p = testing::heat1d();
  const Discretization disc = build_discretization(p, 20);
  const TimeGrid grid{p.T, 40};
  const auto training = sample_parameters(p.box, 8, 5);

  OfflineOptions opt;
  opt.n_max = 3;
  opt.jobs = 1;
  OfflineDiagnostics diag;
  const ReducedModel model = run_offline(disc, grid, training, opt, &diag);
  REQUIRE(model.n_terms() == 3);
  REQUIRE(diag.anchor_zetas.size() == 3);

  for (int k = 1; k < model.n_terms(); ++k) {
    // diag.anchor_zetas[k] holds the coefficients of terms 1..k evaluated at the
    // anchor of term k+1, exactly as used while building that term.
    const Sample& anchor = model.terms[static_cast<std::size_t>(k)].anchor;
    const Eigen::MatrixXd& cached = diag.anchor_zetas[static_cast<std::size_t>(k)];
    REQUIRE(cached.rows() == k);
    const OnlineEvaluation ev = online_zetas(model, anchor, k);
    REQUIRE(ev.zetas.rows() == k);
    REQUIRE(ev.zetas.cols() == cached.cols());
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < cached.cols(); ++c) {
        const double a = ev.zetas(r, c), b = cached(r, c);
        CHECK(std::abs(a - b) <= 1e-14 * std::max({1.0, std::abs(a), std::abs(b)}));
      }
  }
}

TEST_CASE("truncated online evaluation is a prefix of the full one") {
  const int nx = 16;
  const ParametricProblem p = testing::rank2(nx);
  const Discretization disc = build_discretization(p, nx);
  const TimeGrid grid{p.T, 30};
  OfflineOptions opt;
  opt.n_max = 3;
  opt.jobs = 1;
  const ReducedModel model =
      run_offline(disc, grid, fixed_training({1.0, 1.7, 0.8, 1.3}), opt);
  REQUIRE(model.n_terms() >= 2);

  const Sample xi{1.21};
  const OnlineEvaluation full = online_zetas(model, xi);
  const OnlineEvaluation trunc = online_zetas(model, xi, 2);
  REQUIRE(trunc.zetas.rows() == 2);
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c <= grid.steps; ++c) CHECK(trunc.zetas(r, c) == full.zetas(r, c));
}

TEST_CASE("a stripped model still runs online but refuses reconstruction") {
  const ParametricProblem p = testing::rank1();
  const Discretization disc = build_discretization(p, 16);
  const TimeGrid grid{p.T, 25};
  OfflineOptions opt;
  opt.n_max = 1;
  opt.jobs = 1;
  ReducedModel model = run_offline(disc, grid, fixed_training({1.0, 1.5}), opt);

  ReducedModel stripped = model;
  for (auto& t : stripped.terms) t.g.clear();
  CHECK_FALSE(stripped.has_g());

  const Sample xi{1.2};
  const OnlineEvaluation ev = online_zetas(stripped, xi);
  CHECK(ev.zetas.rows() == 1);
  CHECK_THROWS_AS(reconstruct(stripped, ev.zetas, 0), FormatError);
}

TEST_CASE("the greedy trace records every enrichment with a decaying indicator") {
  const ParametricProblem p = testing::heat1d();
  const Discretization disc = build_discretization(p, 20);
  const TimeGrid grid{p.T, 40};
  const auto training = sample_parameters(p.box, 8, 5);
  OfflineOptions opt;
  opt.n_max = 4;
  opt.jobs = 1;
  const ReducedModel model = run_offline(disc, grid, training, opt);
  REQUIRE(model.trace.size() == static_cast<std::size_t>(model.n_terms()));
  for (std::size_t i = 0; i < model.trace.size(); ++i) {
    CHECK(model.trace[i].term == static_cast<int>(i) + 1);
    CHECK(model.trace[i].strategy == "true-error");
    CHECK(model.trace[i].elapsed_s >= 0.0);
    CHECK(model.trace[i].indicator >= 0.0);
  }
  // The first entry starts the stage unconditionally (no indicator); over several
  // enrichments of this smooth problem the selection maximum falls sharply.
  REQUIRE(model.trace.size() >= 3);
  CHECK(model.trace.back().indicator < model.trace[1].indicator);
}

TEST_CASE("early stop on the indicator threshold is recorded in the trace") {
  const ParametricProblem p = testing::rank1();
  const Discretization disc = build_discretization(p, 16);
  const TimeGrid grid{p.T, 25};
  OfflineOptions opt;
  opt.n_max = 5;
  opt.eps = 1e-8;  // rank-1 problem: one term reaches machine-level training error
  opt.jobs = 1;
  const ReducedModel model =
      run_offline(disc, grid, fixed_training({1.0, 1.5, 0.7}), opt);
  CHECK(model.n_terms() < 5);
}
