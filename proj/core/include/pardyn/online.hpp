#pragma once

#include "pardyn/zeta.hpp"

namespace pardyn {

struct OnlineEvaluation {
  Sample xi;
  Eigen::MatrixXd zetas;  // n_use x (steps + 1), row k = coefficient of term k+1
  int frozen_steps = 0;   // singular-step fallbacks encountered
  double elapsed_s = 0.0;
};

// Evaluates the parametric coefficients of the first n_use terms (all when < 0) at a
// new sample: initial values from the affine representations, then the backward-Euler
// scalar recursion over the stored projection records. Touches no nodal data.
OnlineEvaluation online_zetas(const ReducedModel& model, const Sample& xi,
                              int n_use = -1);

}  // namespace pardyn
