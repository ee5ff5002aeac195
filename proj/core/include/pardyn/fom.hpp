#pragma once

#include "pardyn/discretization.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <functional>
#include <memory>

namespace pardyn {

// Discrete solution of the homogeneous-variable problem: one full-size nodal field per
// time node, fields[0] holding the initial data.
struct Trajectory {
  TimeGrid grid;
  std::vector<Vector> fields;
};

// One backward-Euler step operator at a fixed parameter sample:
//
//   (M/tau - sum_i kA_i A_i - sum_t sign_t kH_t N_t(w_lin)) w_next = rhs
//
// where N_t is the convection matrix B(w_lin) or the weighted mass W(w_lin, w_lin)
// of the problem's nonlinear terms, linearized at a caller-supplied state. The same
// operator advances the full-order solution (w_lin = previous solution) and the
// residual subproblems of the greedy stage (w_lin = previous rank-k approximation).
//
// Per-step work is allocation-free: component value arrays are combined into the
// shared interior sparsity pattern, permuted into the column-major factorization
// matrix in place, and refactorized only when the matrix actually changes (for
// problems that are linear at this sample the factorization happens once).
class ImplicitStepper {
 public:
  ImplicitStepper(const Discretization& disc, const Sample& xi, double tau);

  const CoefficientValues& coef() const { return coef_; }
  double tau() const { return tau_; }
  // True when every nonlinear coefficient vanishes at this sample; the step matrix is
  // then constant in time and the solve path is identical to a purely linear problem.
  bool linear_at_sample() const { return linear_; }
  // Constant-in-time source sum_i kC_i C_i restricted to interior dofs.
  const Vector& source_int() const { return source_int_; }

  // (Re)builds and factorizes the step matrix for the linearization state w_lin
  // (full-size nodal field). No-op after the first call for linear problems.
  void prepare(const Vector& w_lin_full);
  // Solves the prepared system for an interior-sized right-hand side.
  Vector solve_interior(const Vector& rhs_int) const;

  const Discretization& disc() const { return disc_; }

 private:
  const Discretization& disc_;
  CoefficientValues coef_;
  double tau_ = 0.0;
  bool linear_ = true;
  bool symmetric_ = true;
  bool prepared_ = false;
  Vector source_int_;
  std::vector<double> base_values_;  // M/tau - sum kA A on the shared pattern
  std::vector<double> values_;      // per-step scratch
  SpMatCol mat_;
  std::unique_ptr<Eigen::SimplicialLDLT<SpMatCol>> ldlt_;
  std::unique_ptr<Eigen::SparseLU<SpMatCol>> lu_;
};

// Backward-Euler (semi-implicit for nonlinear terms) solution of the homogeneous
// problem at xi. on_node is called for every time node including n = 0 with the
// full-size nodal field. Throws DivergenceError when the solution norm exceeds
// 1e6 * (initial norm + 1) or turns non-finite.
void solve_fom(const Discretization& disc, const Sample& xi, const TimeGrid& grid,
               const std::function<void(int, const Vector&)>& on_node);

Trajectory solve_fom_trajectory(const Discretization& disc, const Sample& xi,
                                const TimeGrid& grid);

}  // namespace pardyn
