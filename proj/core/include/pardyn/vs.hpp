#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pardyn/discretization.hpp"
#include "pardyn/model.hpp"

namespace pardyn {

// Static-coefficient baseline: same greedy enrichment and spatial modes as the
// dynamical method (the first mode is bitwise identical), but each term carries one
// parameter-dependent scalar coefficient, fixed in time. The coefficient comes from
// projecting the equation onto the mode at a single time node; candidate nodes are
// drawn per term, and the node whose coefficients give the smallest mean true error
// over a seeded validation set is retained. Linear problems only.
struct VsOptions {
  int n_max = 10;
  double eps = 0.0;       // stop once the max training error <= eps (0: off)
  int n_candidates = 8;   // candidate time nodes per term
  int n_validation = 4;   // validation samples scoring the candidates
  std::uint64_t seed = 0; // validation draws; node draws use seed + 1
  int jobs = 0;
  bool verbose = false;
};

ReducedModel vs_offline(const Discretization& disc, const TimeGrid& grid,
                        const std::vector<Sample>& training, const VsOptions& opt);

// Static coefficients of every term at a sample (term k uses the records of its
// retained candidate node and the coefficients of terms 1..k-1).
Vector vs_zeta_values(const ReducedModel& model, const Sample& xi);

// The same values replicated over all time nodes, shaped like the dynamical
// coefficient matrix so reconstruction and metrics code applies unchanged.
Eigen::MatrixXd vs_zeta_matrix(const ReducedModel& model, const Sample& xi);

}  // namespace pardyn
