#include "pardyn/estimator.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include <fmt/format.h>

#include "pardyn/online.hpp"
#include "pardyn/params.hpp"

namespace pardyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Deterministic seeded vector with entries in [-0.5, 0.5).
Vector seeded_direction(std::uint64_t seed, int n, int stream) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = unit_double(hash_counter(seed, i, stream)) - 0.5;
  return v;
}

}  // namespace

double log_lipschitz(const Discretization& disc, const CoefficientValues& coef,
                     const Vector& u_ref, LipschitzMode mode) {
  const ParametricProblem& problem = disc.problem;
  const int n = disc.n_interior();
  if (n == 0) return 0.0;

  SpMat S = disc.make_interior_pattern();
  const std::size_t nnz = static_cast<std::size_t>(S.nonZeros());
  std::vector<double> values(nnz, 0.0);
  for (std::size_t i = 0; i < problem.A.size(); ++i) {
    const SpMat& ai = disc.A_int()[i];
    if (static_cast<std::size_t>(ai.nonZeros()) != nnz) {
      throw FormatError("operator does not share the mass sparsity pattern");
    }
    const double* av = ai.valuePtr();
    for (std::size_t s = 0; s < nnz; ++s) values[s] += coef.kA[i] * av[s];
  }
  for (std::size_t t = 0; t < problem.H.size(); ++t) {
    const double w = problem.H[t].sign * coef.kH[t];
    if (problem.H[t].kind == NonlinearKind::Convection) {
      // Jacobian of u -> <u du/dx, v> at u_ref is B(u_ref) + the (du_ref/dx)-weighted mass
      disc.accumulate_convection_interior(u_ref, w, values);
      disc.accumulate_gradient_weighted_mass_interior(u_ref, w, values);
    } else {
      disc.accumulate_weighted_mass_interior(u_ref, u_ref, 3.0 * w, values);
    }
  }

  // Symmetrize: on a structurally symmetric pattern the CSR->CSC slot permutation is
  // exactly the transpose permutation, so this forms (J + J^T)/2 without assembly.
  const std::vector<int>& perm = disc.csr_to_csc();
  double* sv = S.valuePtr();
  for (std::size_t s = 0; s < nnz; ++s) {
    sv[s] = 0.5 * (values[s] + values[static_cast<std::size_t>(perm[s])]);
  }

  const SpMat& m_int = disc.M_int();
  const auto m_norm = [&](const Vector& v) {
    return std::sqrt(std::max(0.0, v.dot(m_int * v)));
  };

  // Rayleigh-quotient power iteration on M^{-1} S + shift, M-orthonormalized.
  const auto dominant = [&](double shift) {
    Vector x = seeded_direction(9001, n, 0);
    const double nx = m_norm(x);
    if (nx <= 0.0) throw DivergenceError("degenerate start vector");
    x /= nx;
    double rho_prev = kInf;
    for (int it = 0; it < 10000; ++it) {
      const Vector sx = S * x;
      const double rho = x.dot(sx) + shift;
      if (it > 0 && std::abs(rho - rho_prev) <= 1e-12 * std::max(1.0, std::abs(rho))) {
        return rho;
      }
      rho_prev = rho;
      Vector y = disc.mass_solve_interior(sx) + shift * x;
      const double ny = m_norm(y);
      if (ny <= 1e-300) return shift;  // operator annihilates the iterate
      x = y / ny;
    }
    throw DivergenceError("log-Lipschitz power iteration did not converge");
  };

  const double rho1 = dominant(0.0);
  double lam = rho1;
  if (rho1 < 0.0) {
    // Dominant eigenvalue is the most negative one; shift to expose the largest.
    const double shift = -rho1 * (1.0 + 1e-6);
    lam = dominant(shift) - shift;
  }

  if (mode == LipschitzMode::SampledSup && !problem.H.empty()) {
    const double base = std::max(1e-6, std::sqrt(std::max(0.0, disc.inner(u_ref, u_ref))));
    for (int d = 0; d < 16; ++d) {
      Vector v = seeded_direction(77, n, d + 1);
      const double target = base * std::pow(10.0, -(d % 4));
      const double nv = m_norm(v);
      if (nv <= 0.0) continue;
      v *= target / nv;
      const Vector vf = disc.prolong_interior(v);
      const Vector up = u_ref + vf;
      double num = 0.0;
      for (std::size_t i = 0; i < problem.A.size(); ++i) {
        num += coef.kA[i] * vf.dot(disc.A_ops[i] * vf);
      }
      for (std::size_t t = 0; t < problem.H.size(); ++t) {
        const double w = problem.H[t].sign * coef.kH[t];
        if (problem.H[t].kind == NonlinearKind::Convection) {
          num += w * vf.dot(disc.apply_convection(up, up) - disc.apply_convection(u_ref, u_ref));
        } else {
          num += w * vf.dot(disc.apply_cubic(up, up, up) - disc.apply_cubic(u_ref, u_ref, u_ref));
        }
      }
      lam = std::max(lam, num / (target * target));
    }
  }
  return lam;
}

ResidualEstimator::ResidualEstimator(const Discretization& disc, const ReducedModel& model,
                                     LipschitzMode mode)
    : disc_(disc), model_(model), mode_(mode) {
  if (model.method != "dvs") {
    throw ConfigError(fmt::format("estimator requires a dynamical model, got '{}'", model.method));
  }
  if (!model.has_g()) throw FormatError("estimator needs spatial modes; model was stripped");
  k_ = model.n_terms();
  n_a_ = static_cast<int>(disc.problem.A.size());
  n_c_ = static_cast<int>(disc.problem.C.size());
  mesh_free_ = disc.problem.H.empty();
  zero_state_ = Vector::Zero(disc.n_nodes());

  // Gram of the initial-data components {q_i} + {g_a(., 0)} in the V inner product.
  const int n_p = static_cast<int>(disc.problem.initial.size());
  const int n0 = n_p + k_;
  Eigen::MatrixXd f(disc.n_interior(), n0);
  for (int i = 0; i < n_p; ++i) f.col(i) = disc.restrict_interior(disc.q_fields[i]);
  for (int a = 0; a < k_; ++a) {
    f.col(n_p + a) =
        disc.restrict_interior(term_field(model.terms[a], 0, disc.n_nodes()));
  }
  init_gram_ = f.transpose() * (disc.M_int() * f);

  if (mesh_free_) {
    build_linear_grams();
  } else {
    // Warm the mass factorization so later dual-norm calls are safe to run anywhere.
    (void)disc.mass_solve_interior(Vector::Zero(disc.n_interior()));
  }
}

void ResidualEstimator::build_linear_grams() {
  const int steps = model_.grid.steps;
  const int ni = disc_.n_interior();
  const int nn = disc_.n_nodes();
  m_ = n_c_ + (n_a_ + 2) * k_;

  Eigen::MatrixXd r(ni, m_), z(ni, m_);
  for (int j = 0; j < n_c_; ++j) {
    r.col(j) = disc_.restrict_interior(disc_.C_loads[j]);
    z.col(j) = disc_.mass_solve_interior(r.col(j));
  }

  // Riesz representative of M*g is g itself (modes vanish on the boundary), so only
  // the operator columns need actual mass solves.
  Eigen::MatrixXd g_prev(ni, k_), mg_prev(ni, k_);
  for (int a = 0; a < k_; ++a) {
    const auto ga = term_field(model_.terms[a], 0, nn);
    g_prev.col(a) = disc_.restrict_interior(ga);
    mg_prev.col(a) = disc_.restrict_interior(disc_.M * ga);
  }

  gram_.assign(steps, Eigen::MatrixXd());
  Eigen::MatrixXd g_curr(ni, k_), mg_curr(ni, k_);
  for (int n = 0; n < steps; ++n) {
    for (int a = 0; a < k_; ++a) {
      const auto ga = term_field(model_.terms[a], n + 1, nn);
      g_curr.col(a) = disc_.restrict_interior(ga);
      mg_curr.col(a) = disc_.restrict_interior(disc_.M * ga);
      for (int i = 0; i < n_a_; ++i) {
        const int c = n_c_ + i * k_ + a;
        r.col(c) = disc_.restrict_interior(disc_.A_ops[i] * ga);
        z.col(c) = disc_.mass_solve_interior(r.col(c));
      }
    }
    r.middleCols(n_c_ + n_a_ * k_, k_) = mg_curr;
    z.middleCols(n_c_ + n_a_ * k_, k_) = g_curr;
    r.rightCols(k_) = mg_prev;
    z.rightCols(k_) = g_prev;
    Eigen::MatrixXd gm = r.transpose() * z;
    gram_[n] = 0.5 * (gm + gm.transpose());
    g_prev.swap(g_curr);
    mg_prev.swap(mg_curr);
  }
}

double ResidualEstimator::beta_of(const CoefficientValues& coef,
                                  const Eigen::MatrixXd& zetas) const {
  if (mesh_free_) return log_lipschitz(disc_, coef, zero_state_, mode_);
  const int steps = model_.grid.steps;
  double beta = -kInf;
  for (int node : {0, steps / 2, steps}) {
    const Vector u = reconstruct(model_, zetas, node);
    beta = std::max(beta, log_lipschitz(disc_, coef, u, mode_));
  }
  return beta;
}

Vector ResidualEstimator::delta_curve(const Sample& xi) const {
  const ParametricProblem& problem = disc_.problem;
  const CoefficientValues coef = evaluate_coefficients(problem, xi);
  const OnlineEvaluation ev = online_zetas(model_, xi);
  const Eigen::MatrixXd& zetas = ev.zetas;
  const TimeGrid& grid = model_.grid;
  const double tau = grid.tau();
  const int steps = grid.steps;

  const double beta = beta_of(coef, zetas);
  const double grow = std::exp(beta * tau);

  const int n_p = static_cast<int>(problem.initial.size());
  Eigen::VectorXd th0(n_p + k_);
  for (int i = 0; i < n_p; ++i) th0[i] = problem.initial[i].p(xi);
  for (int a = 0; a < k_; ++a) th0[n_p + a] = -zetas(a, 0);
  double d = std::sqrt(std::max(0.0, th0.dot(init_gram_ * th0)));

  Vector delta(steps + 1);
  delta[0] = d;
  int n_done = 0;
  if (mesh_free_) {
    Eigen::VectorXd th(m_);
    for (int n = 0; n < steps; ++n) {
      for (int j = 0; j < n_c_; ++j) th[j] = coef.kC[j];
      for (int i = 0; i < n_a_; ++i) {
        for (int a = 0; a < k_; ++a) th[n_c_ + i * k_ + a] = coef.kA[i] * zetas(a, n + 1);
      }
      for (int a = 0; a < k_; ++a) {
        th[n_c_ + n_a_ * k_ + a] = -zetas(a, n + 1) / tau;
        th[n_c_ + n_a_ * k_ + k_ + a] = zetas(a, n) / tau;
      }
      const double alpha = std::sqrt(std::max(0.0, th.dot(gram_[n] * th)));
      d = grow * (d + tau * alpha);
      if (!(d < 1e300)) break;
      delta[n + 1] = d;
      n_done = n + 1;
    }
  } else {
    Vector u_prev = reconstruct(model_, zetas, 0);
    Vector r(disc_.n_nodes());
    for (int n = 0; n < steps; ++n) {
      const Vector u = reconstruct(model_, zetas, n + 1);
      r.setZero();
      for (int j = 0; j < n_c_; ++j) r += coef.kC[j] * disc_.C_loads[j];
      for (int i = 0; i < n_a_; ++i) r += coef.kA[i] * (disc_.A_ops[i] * u);
      r -= disc_.M * ((u - u_prev) / tau);
      for (std::size_t t = 0; t < problem.H.size(); ++t) {
        const double w = problem.H[t].sign * coef.kH[t];
        if (problem.H[t].kind == NonlinearKind::Convection) {
          r += w * disc_.apply_convection(u, u);
        } else {
          r += w * disc_.apply_cubic(u, u, u);
        }
      }
      const double alpha = disc_.dual_norm(r);
      d = grow * (d + tau * alpha);
      if (!(d < 1e300)) break;
      delta[n + 1] = d;
      n_done = n + 1;
      u_prev = u;
    }
  }
  for (int n = n_done + 1; n <= steps; ++n) delta[n] = kInf;
  return delta;
}

double ResidualEstimator::bound(const Sample& xi) const {
  const Vector delta = delta_curve(xi);
  const double tau = model_.grid.tau();
  const Eigen::Index n = delta.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!std::isfinite(delta[i])) return kInf;
    const double w = (i == 0 || i == n - 1) ? 0.5 * tau : tau;
    acc += w * delta[i] * delta[i];
  }
  return std::sqrt(acc);
}

}  // namespace pardyn
