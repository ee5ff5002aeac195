#include "pardyn/vs.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>

#include <fmt/format.h>

#include "pardyn/fom.hpp"
#include "pardyn/metrics.hpp"
#include "pardyn/offline.hpp"
#include "pardyn/parallel.hpp"
#include "pardyn/params.hpp"

namespace pardyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Coefficient of term k from one candidate record given the earlier static values.
// Returns false (and leaves *out untouched) when the denominator is singular.
bool vs_step(const double* rec, const RecordLayout& lay, double tau,
             const CoefficientValues& coef, const double* prev, double* out,
             double* den_out = nullptr) {
  const int k = lay.k;
  double den = (rec[0] - rec[1]) / tau;
  for (int i = 0; i < lay.n_a; ++i) den -= coef.kA[i] * rec[lay.a(i, k - 1)];
  if (den_out) *den_out = den;
  double num = 0.0;
  for (int i = 0; i < lay.n_c; ++i) num += coef.kC[i] * rec[lay.c_proj(i)];
  for (int j = 0; j < k - 1; ++j) {
    double aj = 0.0;
    for (int i = 0; i < lay.n_a; ++i) aj += coef.kA[i] * rec[lay.a(i, j)];
    num += prev[j] * (aj - (rec[lay.g_cross(j)] - rec[lay.g_cross_lag(j)]) / tau);
  }
  if (!(std::abs(den) > 1e-12 * std::abs(rec[0] / tau))) return false;
  *out = num / den;
  return true;
}

Vector static_values(const ReducedModel& model, const Sample& xi, int n_use) {
  const CoefficientValues coef = evaluate_coefficients(model.problem, xi);
  const double tau = model.grid.tau();
  Vector out = Vector::Zero(n_use);
  for (int k = 1; k <= n_use; ++k) {
    const SeparatedTerm& t = model.terms[static_cast<std::size_t>(k - 1)];
    const RecordLayout lay(model.problem, k);
    if (t.vs_chosen < 0 || t.vs_nodes.empty() ||
        t.records.size() != t.vs_nodes.size() * static_cast<std::size_t>(lay.size())) {
      throw FormatError(fmt::format("term {} carries no static-coefficient records", k));
    }
    const double* rec =
        t.records.data() + static_cast<std::size_t>(t.vs_chosen) * lay.size();
    double value = 0.0;
    if (vs_step(rec, lay, tau, coef, out.data(), &value)) {
      out[k - 1] = value;
    }  // singular denominator: the term contributes nothing at this sample
  }
  return out;
}

// Relative space-time error of the static reconstruction against a cached
// trajectory, reusing precomputed reference norms.
double static_error(const Discretization& disc, const ReducedModel& model,
                    const Eigen::MatrixXd& zetas, int n_use, const Trajectory& traj,
                    const Vector& ref_nodes) {
  const int steps = model.grid.steps;
  Vector err(steps + 1), diff;
  for (int n = 0; n <= steps; ++n) {
    diff = reconstruct(model, zetas, n, n_use) - traj.fields[static_cast<std::size_t>(n)];
    err[n] = std::sqrt(std::max(0.0, disc.inner(diff, diff)));
  }
  return spacetime_relative(err, ref_nodes, model.grid.tau());
}

}  // namespace

Vector vs_zeta_values(const ReducedModel& model, const Sample& xi) {
  if (model.method != "vs") {
    throw ConfigError(fmt::format("static coefficients require a 'vs' model, got '{}'",
                                  model.method));
  }
  return static_values(model, xi, model.n_terms());
}

Eigen::MatrixXd vs_zeta_matrix(const ReducedModel& model, const Sample& xi) {
  const Vector vals = vs_zeta_values(model, xi);
  Eigen::MatrixXd z(vals.size(), model.grid.steps + 1);
  for (Eigen::Index r = 0; r < vals.size(); ++r) z.row(r).setConstant(vals[r]);
  return z;
}

ReducedModel vs_offline(const Discretization& disc, const TimeGrid& grid,
                        const std::vector<Sample>& training, const VsOptions& opt) {
  if (!disc.problem.H.empty()) {
    throw ConfigError("static-coefficient baseline supports linear problems only");
  }
  if (training.empty()) throw ConfigError("training set is empty");
  if (opt.n_max < 1 || opt.n_candidates < 1 || opt.n_validation < 1) {
    throw ConfigError("n_max, n_candidates and n_validation must be positive");
  }

  ReducedModel model;
  model.problem = disc.problem;
  model.grid = grid;
  model.mesh = disc.mesh;
  model.method = "vs";

  const int steps = grid.steps;
  const int nn = disc.n_nodes();

  // Validation set with cached full-order trajectories and reference norms.
  const std::vector<Sample> validation =
      sample_parameters(disc.problem.box, static_cast<std::size_t>(opt.n_validation), opt.seed);
  std::vector<Trajectory> vtraj(validation.size());
  std::vector<CoefficientValues> vcoef(validation.size());
  std::vector<Vector> vref(validation.size());
  for (std::size_t v = 0; v < validation.size(); ++v) {
    vtraj[v] = solve_fom_trajectory(disc, validation[v], grid);
    vcoef[v] = evaluate_coefficients(disc.problem, validation[v]);
    const Vector lift = disc.lifting_field(validation[v]);
    Vector ref(steps + 1);
    Vector full(nn);
    for (int n = 0; n <= steps; ++n) {
      full = vtraj[v].fields[static_cast<std::size_t>(n)] + lift;
      ref[n] = std::sqrt(std::max(0.0, disc.inner(full, full)));
    }
    vref[v] = std::move(ref);
  }

  const int n_train = static_cast<int>(training.size());
  std::vector<char> used(static_cast<std::size_t>(n_train), 0);
  int pick = 0;

  for (int k = 1; k <= opt.n_max; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    used[static_cast<std::size_t>(pick)] = 1;
    const Sample anchor = training[static_cast<std::size_t>(pick)];
    const int k_prev = model.n_terms();

    Eigen::MatrixXd prev(k_prev, steps + 1);
    if (k_prev > 0) {
      const Vector pv = static_values(model, anchor, k_prev);
      for (int j = 0; j < k_prev; ++j) prev.row(j).setConstant(pv[j]);
    }
    SeparatedTerm term = build_term(disc, grid, model, anchor, prev);

    // Candidate time nodes: distinct draws from {1..steps}, stream keyed by term.
    const int n_cand = std::min(opt.n_candidates, steps);
    std::vector<int> nodes;
    std::uint64_t attempt = 0;
    while (static_cast<int>(nodes.size()) < n_cand && attempt < 1000 + 64ull * n_cand) {
      const int cand = 1 + static_cast<int>(sample_index(
                               opt.seed + 1 + 7919ull * static_cast<std::uint64_t>(k),
                               attempt++, static_cast<std::uint64_t>(steps)));
      if (std::find(nodes.begin(), nodes.end(), cand) == nodes.end()) nodes.push_back(cand);
    }
    std::sort(nodes.begin(), nodes.end());

    const RecordLayout lay(disc.problem, k);
    std::vector<double> crec(nodes.size() * static_cast<std::size_t>(lay.size()));
    for (std::size_t ci = 0; ci < nodes.size(); ++ci) {
      std::memcpy(crec.data() + ci * lay.size(),
                  term.records.data() +
                      static_cast<std::size_t>(nodes[ci] - 1) * lay.size(),
                  sizeof(double) * static_cast<std::size_t>(lay.size()));
    }
    term.records = std::move(crec);
    term.vs_nodes = nodes;
    term.vs_chosen = 0;
    model.terms.push_back(std::move(term));

    // Score candidates on the validation set; discard singular ones.
    std::vector<Vector> pv(validation.size());
    for (std::size_t v = 0; v < validation.size(); ++v) {
      pv[v] = static_values(model, validation[v], k_prev);
    }
    std::vector<double> score(nodes.size(), kInf);
    std::vector<double> min_den(nodes.size(), 0.0);
    Eigen::MatrixXd z(k, steps + 1);
    for (std::size_t ci = 0; ci < nodes.size(); ++ci) {
      const double* rec = model.terms.back().records.data() +
                          ci * static_cast<std::size_t>(lay.size());
      double acc = 0.0;
      double mden = kInf;
      bool ok = true;
      for (std::size_t v = 0; v < validation.size(); ++v) {
        double zk = 0.0, den = 0.0;
        const bool fine =
            vs_step(rec, lay, grid.tau(), vcoef[v], pv[v].data(), &zk, &den);
        mden = std::min(mden, std::abs(den));
        if (!fine) {
          ok = false;
          break;
        }
        for (int j = 0; j < k_prev; ++j) z.row(j).setConstant(pv[v][j]);
        z.row(k - 1).setConstant(zk);
        acc += static_error(disc, model, z, k, vtraj[v], vref[v]);
      }
      min_den[ci] = mden;
      if (ok) score[ci] = acc / static_cast<double>(validation.size());
    }
    int chosen = -1;
    double best = kInf;
    for (std::size_t ci = 0; ci < nodes.size(); ++ci) {
      if (score[ci] < best) {
        best = score[ci];
        chosen = static_cast<int>(ci);
      }
    }
    if (chosen < 0) {
      // every candidate singular somewhere: keep the least singular one
      chosen = static_cast<int>(
          std::max_element(min_den.begin(), min_den.end()) - min_den.begin());
      fmt::print(stderr,
                 "[vs] warning: all candidate nodes singular for term {}; keeping node {}\n",
                 k, nodes[static_cast<std::size_t>(chosen)]);
    }
    model.terms.back().vs_chosen = chosen;

    // Greedy selection: true training error with the retained coefficients.
    std::vector<int> remaining;
    for (int i = 0; i < n_train; ++i) {
      if (!used[static_cast<std::size_t>(i)]) remaining.push_back(i);
    }
    std::vector<double> vals(remaining.size(), -kInf);
    parallel_for(static_cast<int>(remaining.size()), opt.jobs, [&](int r) {
      const Sample& xi = training[static_cast<std::size_t>(remaining[static_cast<std::size_t>(r)])];
      const ErrorCurves c = compare_to_fom(disc, model, vs_zeta_matrix(model, xi), xi);
      if (std::isfinite(c.rel_spacetime)) vals[static_cast<std::size_t>(r)] = c.rel_spacetime;
    });

    int arg = -1;
    double max_val = -kInf;
    for (std::size_t r = 0; r < vals.size(); ++r) {
      if (vals[r] > max_val) {
        max_val = vals[r];
        arg = remaining[r];
      }
    }
    const double indicator = arg >= 0 ? max_val : 0.0;
    model.trace.push_back({k, anchor, indicator, "true-error", seconds_since(t0)});
    if (opt.verbose) {
      fmt::print(stderr, "[vs] term {:2d}  node {:5d}  indicator {:.5e}  ({:.2f}s)\n", k,
                 nodes[static_cast<std::size_t>(chosen)], indicator,
                 model.trace.back().elapsed_s);
    }

    if (remaining.empty()) {
      if (k < opt.n_max) {
        fmt::print(stderr, "[vs] warning: training set exhausted after {} terms\n", k);
      }
      break;
    }
    if (arg < 0) break;
    if (opt.eps > 0.0 && indicator <= opt.eps) break;
    pick = arg;
  }
  return model;
}

}  // namespace pardyn
