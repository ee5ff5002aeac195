#pragma once

#include "pardyn/model.hpp"

namespace pardyn {

struct ZetaStepResult {
  double value = 0.0;
  bool frozen = false;  // singular-denominator fallback to the previous value
};

// One backward-Euler step of the parametric-coefficient recursion for term k:
//
//   zeta_{k,n+1} = (c * zeta_{k,n} + s) / l
//
// assembled from the projection record of this step. zeta_n holds the values of
// terms 1..k at node n; zeta_np1 holds the already-advanced values of terms 1..k-1
// at node n+1. h_conv / h_cubic are the aggregated signed nonlinear coefficients
// sum_t sign_t * kH_t(xi) of the convection / cubic terms.
//
// When |l| <= 1e-12 * |<g_k^{n+1}, g_k^{n+1}>| / tau the step is singular; the
// previous value is kept and the result is flagged.
ZetaStepResult zeta_step(const double* rec, const RecordLayout& lay, double tau,
                         const CoefficientValues& coef, double h_conv, double h_cubic,
                         const double* zeta_n, const double* zeta_np1);

// Signed nonlinear coefficient aggregates at a sample.
double aggregate_h_conv(const ParametricProblem& problem, const CoefficientValues& coef);
double aggregate_h_cubic(const ParametricProblem& problem, const CoefficientValues& coef);

// Initial coefficients zeta_{k,0}(xi) for the first n_use terms, by the affine
// recursion over the stored representations.
Vector initial_zetas(const ReducedModel& model, const Sample& xi, int n_use = -1);

}  // namespace pardyn
