#include "pardyn/fom.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pardyn {

ImplicitStepper::ImplicitStepper(const Discretization& disc, const Sample& xi, double tau)
    : disc_(disc), coef_(evaluate_coefficients(disc.problem, xi)), tau_(tau) {
  if (tau_ <= 0.0) throw ConfigError("time step must be positive");

  const SpMat& m = disc.M_int();
  const auto& a_ops = disc.A_int();
  base_values_.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());
  for (auto& v : base_values_) v /= tau_;
  for (std::size_t i = 0; i < a_ops.size(); ++i) {
    const double* av = a_ops[i].valuePtr();
    for (int s = 0; s < m.nonZeros(); ++s) {
      base_values_[static_cast<std::size_t>(s)] -= coef_.kA[i] * av[s];
    }
  }
  values_.resize(base_values_.size());

  for (std::size_t t = 0; t < disc.problem.H.size(); ++t) {
    if (coef_.kH[t] != 0.0) {
      linear_ = false;
      if (disc.problem.H[t].kind == NonlinearKind::Convection) symmetric_ = false;
    }
  }

  source_int_ = Vector::Zero(disc.n_interior());
  for (std::size_t i = 0; i < disc.C_loads.size(); ++i) {
    source_int_ += coef_.kC[i] * disc.restrict_interior(disc.C_loads[i]);
  }

  mat_ = disc.make_interior_pattern_col();
  if (symmetric_) {
    ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMatCol>>();
    ldlt_->analyzePattern(mat_);
  } else {
    lu_ = std::make_unique<Eigen::SparseLU<SpMatCol>>();
    lu_->analyzePattern(mat_);
  }
}

void ImplicitStepper::prepare(const Vector& w_lin_full) {
  if (linear_ && prepared_) return;

  if (linear_) {
    values_ = base_values_;
  } else {
    values_ = base_values_;
    for (std::size_t t = 0; t < disc_.problem.H.size(); ++t) {
      const double kh = coef_.kH[t];
      if (kh == 0.0) continue;
      const double scale = -disc_.problem.H[t].sign * kh;
      if (disc_.problem.H[t].kind == NonlinearKind::Convection) {
        disc_.accumulate_convection_interior(w_lin_full, scale, values_);
      } else {
        disc_.accumulate_weighted_mass_interior(w_lin_full, w_lin_full, scale, values_);
      }
    }
  }

  const auto& perm = disc_.csr_to_csc();
  double* out = mat_.valuePtr();
  for (std::size_t s = 0; s < values_.size(); ++s) out[perm[s]] = values_[s];

  if (symmetric_) {
    ldlt_->factorize(mat_);
    if (ldlt_->info() != Eigen::Success) {
      throw DivergenceError("step matrix factorization failed (symmetric path)");
    }
  } else {
    lu_->factorize(mat_);
    if (lu_->info() != Eigen::Success) {
      throw DivergenceError("step matrix factorization failed (LU path)");
    }
  }
  prepared_ = true;
}

Vector ImplicitStepper::solve_interior(const Vector& rhs_int) const {
  if (!prepared_) throw DivergenceError("step solve requested before prepare()");
  Vector x;
  if (symmetric_) {
    x = ldlt_->solve(rhs_int);
  } else {
    x = lu_->solve(rhs_int);
  }
  if (!x.allFinite()) throw DivergenceError("step solve produced non-finite values");
  return x;
}

void solve_fom(const Discretization& disc, const Sample& xi, const TimeGrid& grid,
               const std::function<void(int, const Vector&)>& on_node) {
  ImplicitStepper stepper(disc, xi, grid.tau());
  const SpMat& m_int = disc.M_int();
  const double tau = grid.tau();

  // The homogeneous variable lives in the Dirichlet-zero space: clamp any boundary
  // residue of the interpolated initial data.
  Vector w = disc.restrict_interior(disc.initial_field_homogeneous(xi));
  Vector w_full = disc.prolong_interior(w);

  const double limit = 1e6 * (disc.norm(w_full) + 1.0);
  on_node(0, w_full);

  for (int n = 0; n < grid.steps; ++n) {
    stepper.prepare(w_full);
    const Vector rhs = m_int * w / tau + stepper.source_int();
    w = stepper.solve_interior(rhs);
    for (int r = 0; r < disc.n_interior(); ++r) w_full[disc.interior[r]] = w[r];
    const double nrm = disc.norm(w_full);
    if (!std::isfinite(nrm) || nrm > limit) {
      throw DivergenceError(fmt::format(
          "solution norm {:.3e} at time node {} exceeds the divergence guard {:.3e}",
          nrm, n + 1, limit));
    }
    on_node(n + 1, w_full);
  }
}

Trajectory solve_fom_trajectory(const Discretization& disc, const Sample& xi,
                                const TimeGrid& grid) {
  Trajectory traj;
  traj.grid = grid;
  traj.fields.reserve(static_cast<std::size_t>(grid.steps) + 1);
  solve_fom(disc, xi, grid,
            [&](int, const Vector& w) { traj.fields.push_back(w); });
  return traj;
}

}  // namespace pardyn
