#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pardyn/discretization.hpp"
#include "pardyn/model.hpp"

namespace pardyn {

// How the one-sided log-Lipschitz constant of the spatial operator is estimated.
//  - EigenBound: largest eigenvalue of the symmetrized Jacobian pencil
//    ((J + J^T)/2) x = lambda M x on interior nodes (exact for linear operators).
//  - SampledSup: additionally probes difference quotients
//    <v, F(u+v) - F(u)> / ||v||^2 along seeded random directions and keeps the max.
enum class LipschitzMode { EigenBound, SampledSup };

// Log-Lipschitz constant at linearization state `u_ref` (full-size nodal field,
// ignored for linear operators). Throws DivergenceError if the underlying power
// iteration fails to converge.
double log_lipschitz(const Discretization& disc, const CoefficientValues& coef,
                     const Vector& u_ref, LipschitzMode mode = LipschitzMode::EigenBound);

// A posteriori error bound for a reduced model: delta_0 = ||u(0) - u_N(0)||_V and
// delta_{n+1} = exp(beta*tau) * (delta_n + tau * alpha_{n+1}) with alpha the dual
// norm of the reduced solution's residual and beta the log-Lipschitz constant.
//
// For linear problems the dual norms come from precomputed Gram matrices of the
// residual components, so evaluating a new parameter sample never touches mesh-size
// arrays. Problems with nonlinear terms fall back to assembling the residual on the
// mesh (their component set grows like rank^2 or rank^3, which makes precomputed
// Grams impractically large); only the per-sample cost differs, not the bound.
class ResidualEstimator {
 public:
  ResidualEstimator(const Discretization& disc, const ReducedModel& model,
                    LipschitzMode mode = LipschitzMode::EigenBound);

  // delta_n for n = 0..steps; +inf tail once exp(int beta) exceeds 1e300.
  Vector delta_curve(const Sample& xi) const;
  // sqrt of the trapezoid rule applied to delta(t)^2; +inf propagates.
  double bound(const Sample& xi) const;

  bool mesh_free() const { return mesh_free_; }

 private:
  void build_linear_grams();
  double beta_of(const CoefficientValues& coef, const Eigen::MatrixXd& zetas) const;

  const Discretization& disc_;
  const ReducedModel& model_;
  LipschitzMode mode_;
  bool mesh_free_ = false;
  int k_ = 0, n_a_ = 0, n_c_ = 0, m_ = 0;
  std::vector<Eigen::MatrixXd> gram_;  // one m x m Gram per time step (linear path)
  Eigen::MatrixXd init_gram_;          // Gram of initial-data components
  Vector zero_state_;
};

}  // namespace pardyn
