#include "pardyn/offline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pardyn/fom.hpp"
#include "pardyn/metrics.hpp"
#include "pardyn/online.hpp"
#include "pardyn/parallel.hpp"

namespace pardyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

SeparatedTerm build_term(const Discretization& disc, const TimeGrid& grid,
                         const ReducedModel& model, const Sample& anchor,
                         const Eigen::MatrixXd& prev_zetas) {
  const int k_prev = model.n_terms();
  const int k = k_prev + 1;
  if (prev_zetas.rows() != k_prev || (k_prev > 0 && prev_zetas.cols() != grid.steps + 1)) {
    throw ConfigError("coefficient rows do not match the existing terms");
  }
  const int nn = disc.n_nodes();
  const int steps = grid.steps;
  const double tau = grid.tau();
  const ParametricProblem& problem = disc.problem;
  const RecordLayout lay(problem, k);

  SeparatedTerm term;
  term.anchor = anchor;
  term.records.assign(static_cast<std::size_t>(steps) * lay.size(), 0.0);
  term.g.assign(static_cast<std::size_t>(steps + 1) * nn, 0.0);
  double* g_data = term.g.data();

  ImplicitStepper stepper(disc, anchor, tau);
  const CoefficientValues& coef = stepper.coef();

  Vector u_red_n = Vector::Zero(nn), u_red_np1 = Vector::Zero(nn);
  const auto red_at = [&](int n, Vector& out) {
    out.setZero();
    for (int j = 0; j < k_prev; ++j) {
      out += prev_zetas(j, n) * term_field(model.terms[j], n, nn);
    }
  };

  // Start field: residual of the initial data against the current reconstruction,
  // clamped to the discrete space. A start with no energy relative to the initial
  // data is degenerate: both the mode and its coefficient representation stay zero.
  const Vector mu =
      disc.prolong_interior(disc.restrict_interior(disc.initial_field_homogeneous(anchor)));
  const double mu_sq = disc.inner(mu, mu);
  red_at(0, u_red_n);
  Vector e0 = mu - u_red_n;
  double gg0 = disc.inner(e0, e0);
  if (!(gg0 > 1e-24 * (mu_sq + std::numeric_limits<double>::min()))) {
    e0.setZero();
    gg0 = 0.0;
  } else {
    term.zeta0.w.resize(static_cast<Eigen::Index>(problem.initial.size()));
    for (std::size_t i = 0; i < problem.initial.size(); ++i) {
      term.zeta0.w[static_cast<Eigen::Index>(i)] = disc.inner(disc.q_fields[i], e0) / gg0;
    }
    term.zeta0.v.resize(k_prev);
    for (int j = 0; j < k_prev; ++j) {
      term.zeta0.v[j] = disc.inner(Vector(term_field(model.terms[j], 0, nn)), e0) / gg0;
    }
  }
  Eigen::Map<Vector>(g_data, nn) = e0;
  Vector e_int = disc.restrict_interior(e0);
  const double limit = 1e6 * (std::sqrt(mu_sq) + 1.0);

  Vector w_lin(nn), extra(nn), rhs_int(disc.n_interior()), tmp(nn), test_buf(nn);
  std::vector<const double*> fn, fnp1;
  if (lay.conv || lay.cubic) {
    fn.resize(k);
    fnp1.resize(k);
  }

  for (int n = 0; n < steps; ++n) {
    const Eigen::Map<const Vector> e_n(g_data + static_cast<std::size_t>(n) * nn, nn);
    red_at(n + 1, u_red_np1);
    if (!stepper.linear_at_sample() || n == 0) {
      w_lin = e_n + u_red_n;  // full lagged state drives the linearization
      stepper.prepare(w_lin);
    }
    rhs_int = (disc.M_int() * e_int) / tau;
    if (k_prev > 0) {
      extra = disc.M * ((u_red_n - u_red_np1) / tau);
      for (std::size_t i = 0; i < problem.A.size(); ++i) {
        extra += coef.kA[i] * (disc.A_ops[i] * u_red_np1);
      }
      for (std::size_t t = 0; t < problem.H.size(); ++t) {
        const double w = problem.H[t].sign * coef.kH[t];
        if (problem.H[t].kind == NonlinearKind::Convection) {
          extra += w * disc.apply_convection(w_lin, u_red_np1);
        } else {
          extra += w * disc.apply_cubic(w_lin, w_lin, u_red_np1);
        }
      }
      rhs_int += disc.restrict_interior(extra);
    }
    rhs_int += stepper.source_int();
    e_int = stepper.solve_interior(rhs_int);
    if (!e_int.allFinite() || e_int.norm() > limit) {
      throw DivergenceError(
          fmt::format("enrichment term {} diverged at time node {}", k, n + 1));
    }
    Eigen::Map<Vector>(g_data + static_cast<std::size_t>(n + 1) * nn, nn) =
        disc.prolong_interior(e_int);
    const Eigen::Map<const Vector> e_np1(g_data + static_cast<std::size_t>(n + 1) * nn, nn);

    double* rec = term.records.data() + static_cast<std::size_t>(n) * lay.size();
    tmp = disc.M * e_np1;
    rec[0] = e_np1.dot(tmp);
    rec[1] = e_n.dot(tmp);
    for (int j = 0; j < k_prev; ++j) {
      rec[lay.g_cross(j)] = term_field(model.terms[j], n + 1, nn).dot(tmp);
      rec[lay.g_cross_lag(j)] = term_field(model.terms[j], n, nn).dot(tmp);
    }
    rec[lay.g_cross(k - 1)] = rec[0];
    rec[lay.g_cross_lag(k - 1)] = rec[1];
    for (int i = 0; i < lay.n_a; ++i) {
      // both operator kinds are symmetric, so a_i(g_j, g_k) = g_j . (A_i g_k)
      tmp = disc.A_ops[static_cast<std::size_t>(i)] * e_np1;
      for (int j = 0; j < k_prev; ++j) {
        rec[lay.a(i, j)] = term_field(model.terms[j], n + 1, nn).dot(tmp);
      }
      rec[lay.a(i, k - 1)] = e_np1.dot(tmp);
    }
    for (int i = 0; i < lay.n_c; ++i) {
      rec[lay.c_proj(i)] = disc.C_loads[static_cast<std::size_t>(i)].dot(e_np1);
    }
    if (lay.conv || lay.cubic) {
      for (int j = 0; j < k_prev; ++j) {
        fn[static_cast<std::size_t>(j)] =
            model.terms[static_cast<std::size_t>(j)].g.data() + static_cast<std::size_t>(n) * nn;
        fnp1[static_cast<std::size_t>(j)] = model.terms[static_cast<std::size_t>(j)].g.data() +
                                            static_cast<std::size_t>(n + 1) * nn;
      }
      fn[static_cast<std::size_t>(k - 1)] = g_data + static_cast<std::size_t>(n) * nn;
      fnp1[static_cast<std::size_t>(k - 1)] = g_data + static_cast<std::size_t>(n + 1) * nn;
      test_buf = e_np1;
      if (lay.conv) disc.convection_projection(fn, fnp1, test_buf, rec + lay.conv_at(0, 0));
      if (lay.cubic) disc.cubic_projection(fn, fnp1, test_buf, rec + lay.cubic_at(0, 0, 0));
    }
    u_red_n.swap(u_red_np1);
  }
  return term;
}

ReducedModel run_offline(const Discretization& disc, const TimeGrid& grid,
                         const std::vector<Sample>& training, const OfflineOptions& opt,
                         OfflineDiagnostics* diag) {
  if (training.empty()) throw ConfigError("training set is empty");
  if (opt.n_max < 1) throw ConfigError("n_max must be at least 1");
  const bool want_true_error = opt.strategy == "true-error";
  if (!want_true_error && opt.strategy != "residual-bound") {
    throw ConfigError(fmt::format("unknown strategy '{}'", opt.strategy));
  }

  ReducedModel model;
  model.problem = disc.problem;
  model.grid = grid;
  model.mesh = disc.mesh;
  model.method = "dvs";

  const int n_train = static_cast<int>(training.size());
  std::vector<char> used(static_cast<std::size_t>(n_train), 0);
  const auto warn = [&](std::string msg) {
    fmt::print(stderr, "[offline] warning: {}\n", msg);
    if (diag) diag->warnings.push_back(std::move(msg));
  };

  int pick = 0;  // the first anchor is the first training sample
  for (int k = 1; k <= opt.n_max; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    used[static_cast<std::size_t>(pick)] = 1;
    const Sample anchor = training[static_cast<std::size_t>(pick)];

    Eigen::MatrixXd prev(model.n_terms(), grid.steps + 1);
    if (model.n_terms() > 0) {
      OnlineEvaluation ev = online_zetas(model, anchor);
      if (ev.frozen_steps > 0) {
        warn(fmt::format("{} singular coefficient steps at the anchor of term {}",
                         ev.frozen_steps, k));
        if (diag) diag->frozen_steps += ev.frozen_steps;
      }
      prev = std::move(ev.zetas);
    }
    if (diag) diag->anchor_zetas.push_back(prev);
    model.terms.push_back(build_term(disc, grid, model, anchor, prev));

    std::vector<int> remaining;
    for (int i = 0; i < n_train; ++i) {
      if (!used[static_cast<std::size_t>(i)]) remaining.push_back(i);
    }
    std::vector<double> vals(remaining.size(), -kInf);
    std::string strategy_used = opt.strategy;
    std::atomic<int> frozen_acc{0};

    const auto true_error_sweep = [&]() {
      parallel_for(static_cast<int>(remaining.size()), opt.jobs, [&](int r) {
        const Sample& xi = training[static_cast<std::size_t>(remaining[static_cast<std::size_t>(r)])];
        OnlineEvaluation ev = online_zetas(model, xi);
        frozen_acc += ev.frozen_steps;
        const ErrorCurves c = compare_to_fom(disc, model, ev.zetas, xi);
        if (std::isfinite(c.rel_spacetime)) vals[static_cast<std::size_t>(r)] = c.rel_spacetime;
      });
    };
    if (want_true_error) {
      true_error_sweep();
    } else {
      const ResidualEstimator est(disc, model, opt.lipschitz);
      parallel_for(static_cast<int>(remaining.size()), opt.jobs, [&](int r) {
        const Sample& xi = training[static_cast<std::size_t>(remaining[static_cast<std::size_t>(r)])];
        vals[static_cast<std::size_t>(r)] = est.bound(xi);
      });
      const bool all_inf = !remaining.empty() &&
                           std::all_of(vals.begin(), vals.end(),
                                       [](double v) { return v == kInf; });
      if (all_inf) {
        warn(fmt::format("error bound overflowed on every candidate after term {}; "
                         "falling back to the true error for this sweep",
                         k));
        strategy_used = "true-error";
        std::fill(vals.begin(), vals.end(), -kInf);
        true_error_sweep();
      }
    }
    if (frozen_acc > 0) {
      warn(fmt::format("{} singular coefficient steps across the training sweep after term {}",
                       frozen_acc.load(), k));
      if (diag) diag->frozen_steps += frozen_acc;
    }

    int arg = -1;
    double max_val = -kInf;
    for (std::size_t r = 0; r < vals.size(); ++r) {
      if (vals[r] > max_val) {  // strict: ties keep the lowest training index
        max_val = vals[r];
        arg = remaining[r];
      }
    }
    const double indicator = arg >= 0 ? max_val : 0.0;
    model.trace.push_back(
        {k, anchor, indicator, strategy_used, seconds_since(t0)});
    if (opt.verbose) {
      fmt::print(stderr, "[offline] term {:2d}  indicator {:.5e}  ({:.2f}s, {})\n", k,
                 indicator, model.trace.back().elapsed_s, strategy_used);
    }

    if (remaining.empty()) {
      if (k < opt.n_max) {
        warn(fmt::format("training set exhausted after {} terms", k));
      }
      break;
    }
    if (arg < 0) {
      warn(fmt::format("no usable selection indicator after term {}", k));
      break;
    }
    if (opt.eps > 0.0 && indicator <= opt.eps) break;
    pick = arg;
  }
  return model;
}

}  // namespace pardyn
