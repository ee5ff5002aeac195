#include "pardyn/metrics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "pardyn/fom.hpp"

namespace pardyn {

double spacetime_relative(const Vector& err_nodes, const Vector& ref_nodes, double tau) {
  const Eigen::Index n = err_nodes.size();
  double num = 0.0, den = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = (i == 0 || i == n - 1) ? 0.5 * tau : tau;
    num += w * err_nodes[i] * err_nodes[i];
    den += w * ref_nodes[i] * ref_nodes[i];
  }
  if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(num / den);
}

ErrorCurves compare_to_fom(const Discretization& disc, const ReducedModel& model,
                           const Eigen::MatrixXd& zetas, const Sample& xi, int n_use) {
  std::vector<int> one{n_use < 0 ? model.n_terms() : n_use};
  return compare_to_fom_multi(disc, model, zetas, xi, one).front();
}

std::vector<ErrorCurves> compare_to_fom_multi(const Discretization& disc,
                                              const ReducedModel& model,
                                              const Eigen::MatrixXd& zetas, const Sample& xi,
                                              const std::vector<int>& n_list) {
  if (n_list.empty()) throw ConfigError("empty rank list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 1 || n_list[i] > model.n_terms()) {
      throw ConfigError(fmt::format("rank {} outside [1, {}]", n_list[i], model.n_terms()));
    }
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ConfigError("rank list must increase");
  }
  const int max_n = n_list.back();
  if (zetas.rows() < max_n) throw ConfigError("coefficient matrix has too few rows");
  if (!model.has_g()) throw FormatError("model was stripped of spatial modes");

  const TimeGrid& grid = model.grid;
  const int n_nodes_mesh = disc.n_nodes();
  const Vector lift = disc.lifting_field(xi);

  std::vector<ErrorCurves> out(n_list.size());
  for (auto& c : out) {
    c.err_nodes = Vector::Zero(grid.steps + 1);
    c.ref_nodes = Vector::Zero(grid.steps + 1);
  }

  Vector partial = Vector::Zero(n_nodes_mesh);
  Vector diff(n_nodes_mesh), ref(n_nodes_mesh);
  solve_fom(disc, xi, grid, [&](int n, const Vector& w) {
    ref = w + lift;
    const double ref_norm = std::sqrt(std::max(0.0, disc.inner(ref, ref)));
    partial.setZero();
    int term = 0;
    for (std::size_t r = 0; r < n_list.size(); ++r) {
      for (; term < n_list[r]; ++term) {
        partial += zetas(term, n) * term_field(model.terms[term], n, n_nodes_mesh);
      }
      diff = partial - w;
      out[r].err_nodes[n] = std::sqrt(std::max(0.0, disc.inner(diff, diff)));
      out[r].ref_nodes[n] = ref_norm;
    }
  });

  for (auto& c : out) c.rel_spacetime = spacetime_relative(c.err_nodes, c.ref_nodes, grid.tau());
  return out;
}

}  // namespace pardyn
