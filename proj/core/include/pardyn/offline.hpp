#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pardyn/discretization.hpp"
#include "pardyn/estimator.hpp"
#include "pardyn/model.hpp"

namespace pardyn {

struct OfflineOptions {
  int n_max = 10;
  double eps = 0.0;                     // stop once the max indicator <= eps (0: off)
  std::string strategy = "true-error";  // "true-error" | "residual-bound"
  LipschitzMode lipschitz = LipschitzMode::EigenBound;
  int jobs = 0;      // training-sweep workers (0: PARDYN_JOBS / hardware)
  bool verbose = false;
};

// Per-run byproducts that are not part of the persisted model.
struct OfflineDiagnostics {
  // Coefficient rows of the existing terms at each anchor, exactly as used while
  // building the next term (entry k has k rows); lets callers check that the online
  // stage reproduces the training-time coefficients.
  std::vector<Eigen::MatrixXd> anchor_zetas;
  int frozen_steps = 0;  // singular coefficient steps hit during training sweeps
  std::vector<std::string> warnings;
};

// Builds the next enrichment term at `anchor` on top of `model` (which stays
// untouched): marches the implicit correction equation in the full-order space,
// collecting the projection records that close the mesh-free coefficient recursion
// and the affine representation of the initial coefficient. `prev_zetas` holds the
// existing terms' coefficient rows at the anchor (n_terms x (steps+1)).
SeparatedTerm build_term(const Discretization& disc, const TimeGrid& grid,
                         const ReducedModel& model, const Sample& anchor,
                         const Eigen::MatrixXd& prev_zetas);

// Greedy offline stage: starts from the first training sample, enriches until
// n_max terms, the indicator drops below eps, or training anchors are exhausted.
// The indicator is either the true relative space-time error against streamed
// full-order solves or the residual-based error bound.
ReducedModel run_offline(const Discretization& disc, const TimeGrid& grid,
                         const std::vector<Sample>& training, const OfflineOptions& opt,
                         OfflineDiagnostics* diag = nullptr);

}  // namespace pardyn
