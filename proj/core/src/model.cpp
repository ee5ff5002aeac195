#include "pardyn/model.hpp"

#include <fmt/format.h>

namespace pardyn {

RecordLayout::RecordLayout(const ParametricProblem& problem, int term)
    : k(term),
      n_a(static_cast<int>(problem.A.size())),
      n_c(static_cast<int>(problem.C.size())) {
  for (const auto& h : problem.H) {
    if (h.kind == NonlinearKind::Convection) conv = true;
    if (h.kind == NonlinearKind::Cubic) cubic = true;
  }
}

Eigen::Map<const Vector> term_field(const SeparatedTerm& t, int n, int n_nodes) {
  const std::size_t offset = static_cast<std::size_t>(n) * n_nodes;
  if (t.g.size() < offset + n_nodes) {
    throw FormatError(fmt::format(
        "basis field for time node {} is unavailable (stripped or truncated model)", n));
  }
  return {t.g.data() + offset, n_nodes};
}

Vector reconstruct(const ReducedModel& model, const Eigen::MatrixXd& zetas, int n,
                   int n_use) {
  const int n_nodes = model.mesh.n_nodes();
  const int use = n_use < 0 ? model.n_terms() : n_use;
  if (use > model.n_terms() || use > zetas.rows()) {
    throw ConfigError(fmt::format("reconstruction over {} terms requested, model has {}",
                                  use, model.n_terms()));
  }
  if (n < 0 || n > model.grid.steps) {
    throw ConfigError(fmt::format("time node {} outside the grid [0, {}]", n,
                                  model.grid.steps));
  }
  Vector out = Vector::Zero(n_nodes);
  for (int k = 0; k < use; ++k) {
    out += zetas(k, n) * term_field(model.terms[k], n, n_nodes);
  }
  return out;
}

}  // namespace pardyn
