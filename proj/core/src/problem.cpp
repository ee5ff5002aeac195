#include "pardyn/problem.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pardyn {

CoefficientValues evaluate_coefficients(const ParametricProblem& problem,
                                        const Sample& xi) {
  if (xi.size() != problem.box.dim()) {
    throw ConfigError(fmt::format("parameter vector has dimension {}, expected {}",
                                  xi.size(), problem.box.dim()));
  }
  // Small relative slack so samples on the box boundary survive round-tripping.
  double scale = 0.0;
  for (std::size_t d = 0; d < problem.box.dim(); ++d) {
    scale = std::max(scale, std::abs(problem.box.hi[d] - problem.box.lo[d]));
  }
  if (!problem.box.contains(xi, 1e-12 * std::max(scale, 1.0))) {
    throw ConfigError("parameter vector lies outside the admissible box");
  }

  CoefficientValues v;
  v.kC.reserve(problem.C.size());
  v.kA.reserve(problem.A.size());
  v.kH.reserve(problem.H.size());
  v.kLift.reserve(problem.lifting.size());
  for (const auto& t : problem.C) v.kC.push_back(t.coef(xi));
  for (const auto& t : problem.A) v.kA.push_back(t.coef(xi));
  for (const auto& t : problem.H) v.kH.push_back(t.coef(xi));
  for (const auto& t : problem.lifting) v.kLift.push_back(t.coef(xi));
  return v;
}

void validate_problem(const ParametricProblem& problem) {
  if (problem.dim != 1 && problem.dim != 2) {
    throw ConfigError("spatial dimension must be 1 or 2");
  }
  if (!(problem.xlim[1] > problem.xlim[0])) throw ConfigError("empty x extent");
  if (problem.dim == 2 && !(problem.ylim[1] > problem.ylim[0])) {
    throw ConfigError("empty y extent");
  }
  if (!(problem.T > 0.0) || !std::isfinite(problem.T)) {
    throw ConfigError("final time must be positive");
  }
  problem.box.validate();

  const std::size_t pd = problem.box.dim();
  for (const auto& t : problem.C) {
    t.coef.validate(pd);
    t.field.validate(problem.dim);
  }
  for (const auto& t : problem.A) t.coef.validate(pd);
  for (const auto& t : problem.H) {
    t.coef.validate(pd);
    if (problem.dim != 1 && t.kind == NonlinearKind::Convection) {
      throw ConfigError("convection nonlinearity is only available in 1D");
    }
    if (t.sign != 1.0 && t.sign != -1.0) {
      throw ConfigError("nonlinear term sign must be +1 or -1");
    }
  }
  for (const auto& t : problem.initial) {
    t.p.validate(pd);
    t.q.validate(problem.dim);
  }
  for (const auto& t : problem.lifting) {
    t.coef.validate(pd);
    t.field.validate(problem.dim);
  }
  if (problem.A.empty() && problem.C.empty() && problem.H.empty()) {
    throw ConfigError("problem has no dynamics terms");
  }
  if (problem.initial.empty() && problem.lifting.empty() && problem.C.empty()) {
    throw ConfigError("problem has neither initial data nor sources: the solution "
                      "is identically zero");
  }
}

}  // namespace pardyn
