#pragma once

#include <vector>

#include <Eigen/Dense>

#include "pardyn/discretization.hpp"
#include "pardyn/model.hpp"

namespace pardyn {

// Space-time error of a reduced solution against a freshly computed full-order
// reference at one parameter sample. Norms are energy norms induced by the mass
// matrix; the reference norm is taken in the original variable (homogeneous part
// plus lifting) so relative errors match what a user of the original problem sees.
struct ErrorCurves {
  double rel_spacetime = 0.0;  // sqrt(int ||u - u_N||^2 dt / int ||u||^2 dt)
  Vector err_nodes;            // ||u - u_N||_V at every time node
  Vector ref_nodes;            // ||u||_V at every time node
};

// Trapezoid-in-time relative error from per-node norm curves. Returns NaN when the
// reference is identically zero (callers exclude such samples and warn).
double spacetime_relative(const Vector& err_nodes, const Vector& ref_nodes, double tau);

// Streams one full-order solve at `xi` and compares the reconstruction built from
// `zetas` (rows = terms, cols = time nodes). `n_use` < 0 means all terms.
ErrorCurves compare_to_fom(const Discretization& disc, const ReducedModel& model,
                           const Eigen::MatrixXd& zetas, const Sample& xi, int n_use = -1);

// Same single full-order pass evaluated at several truncation ranks at once;
// `n_list` must be increasing. Entry i corresponds to the first n_list[i] terms.
std::vector<ErrorCurves> compare_to_fom_multi(const Discretization& disc,
                                              const ReducedModel& model,
                                              const Eigen::MatrixXd& zetas, const Sample& xi,
                                              const std::vector<int>& n_list);

}  // namespace pardyn
