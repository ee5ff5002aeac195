#pragma once

#include "pardyn/discretization.hpp"

#include <Eigen/Dense>

#include <string>

namespace pardyn {

// Affine representation of the initial parametric coefficient of term k:
//   zeta_{k,0}(xi) = sum_i w[i] * p_i(xi) - sum_{j<k} v[j] * zeta_{j,0}(xi).
// A zero-size w marks the degenerate (identically zero) representation.
struct Zeta0Rep {
  Vector w;
  Vector v;
};

// One enrichment term: anchor sample, initial-coefficient representation, the
// projection scalars closing the mesh-free recursion (one record per time step,
// step-major), and optionally the spatial basis trajectory (time-node-major blocks
// of nodal values; empty when the model has been stripped for mesh-free use).
//
// For the static-coefficient baseline the records are per candidate time node
// (vs_nodes) instead of per step, and vs_chosen marks the retained candidate.
struct SeparatedTerm {
  Sample anchor;
  Zeta0Rep zeta0;
  std::vector<double> records;
  std::vector<double> g;
  std::vector<int> vs_nodes;
  int vs_chosen = -1;
};

struct GreedyStep {
  int term = 0;
  Sample anchor;
  double indicator = 0.0;  // training-set max of the selection indicator
  std::string strategy;
  double elapsed_s = 0.0;
};

struct ReducedModel {
  ParametricProblem problem;
  TimeGrid grid;
  Mesh mesh;
  std::string method = "dvs";  // "dvs" or "vs"
  std::vector<SeparatedTerm> terms;
  std::vector<GreedyStep> trace;

  int n_terms() const { return static_cast<int>(terms.size()); }
  bool has_g() const { return terms.empty() || !terms.front().g.empty(); }
};

// Scalar-record layout for term k (1-based): the linear block
//   [gg_diag, gg_lag, a(i,j) i<n_a j<k, g_cross(j) j<k, g_cross_lag(j) j<k, c_proj(i)]
// followed by the nonlinear projection tensors when the problem has convection
// (k*k entries) and/or cubic (k*k*k entries) terms. Index j = k-1 is the term itself;
// nonlinear first factors are taken at the earlier time node (lagging convention).
struct RecordLayout {
  int k = 1;
  int n_a = 0;
  int n_c = 0;
  bool conv = false;
  bool cubic = false;

  RecordLayout() = default;
  RecordLayout(const ParametricProblem& problem, int term);

  int a(int i, int j) const { return 2 + i * k + j; }
  int g_cross(int j) const { return 2 + n_a * k + j; }
  int g_cross_lag(int j) const { return 2 + n_a * k + k + j; }
  int c_proj(int i) const { return 2 + n_a * k + 2 * k + i; }
  int conv_at(int a_, int b_) const { return linear_size() + a_ * k + b_; }
  int cubic_at(int a_, int b_, int c_) const {
    return linear_size() + (conv ? k * k : 0) + (a_ * k + b_) * k + c_;
  }
  int linear_size() const { return 2 + n_a * k + 2 * k + n_c; }
  int size() const {
    return linear_size() + (conv ? k * k : 0) + (cubic ? k * k * k : 0);
  }
};

// Nodal field of basis term `t` at time node n (requires an unstripped model).
Eigen::Map<const Vector> term_field(const SeparatedTerm& t, int n, int n_nodes);

// u_N at time node n: sum over the first n_use terms (all when n_use < 0) of
// zetas(k, n) * g_k(·, t_n).
Vector reconstruct(const ReducedModel& model, const Eigen::MatrixXd& zetas, int n,
                   int n_use = -1);

}  // namespace pardyn
