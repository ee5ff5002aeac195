#include "pardyn/online.hpp"

#include <fmt/format.h>

#include <chrono>

namespace pardyn {

OnlineEvaluation online_zetas(const ReducedModel& model, const Sample& xi, int n_use) {
  if (model.method != "dvs") {
    throw ConfigError(fmt::format(
        "time-dependent coefficient recursion requested on a '{}' model", model.method));
  }
  const int use = n_use < 0 ? model.n_terms() : n_use;
  if (use > model.n_terms()) {
    throw ConfigError(fmt::format("requested {} terms from a model with {}", use,
                                  model.n_terms()));
  }
  const int steps = model.grid.steps;
  const double tau = model.grid.tau();

  std::vector<RecordLayout> lays;
  lays.reserve(static_cast<std::size_t>(use));
  for (int k = 1; k <= use; ++k) {
    lays.emplace_back(model.problem, k);
    const auto expected = static_cast<std::size_t>(steps) * lays.back().size();
    if (model.terms[static_cast<std::size_t>(k - 1)].records.size() != expected) {
      throw FormatError(fmt::format(
          "projection record of term {} has {} scalars, expected {}", k,
          model.terms[static_cast<std::size_t>(k - 1)].records.size(), expected));
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  const CoefficientValues coef = evaluate_coefficients(model.problem, xi);
  const double h_conv = aggregate_h_conv(model.problem, coef);
  const double h_cubic = aggregate_h_cubic(model.problem, coef);

  OnlineEvaluation eval;
  eval.xi = xi;
  eval.zetas.resize(use, steps + 1);
  eval.zetas.col(0) = initial_zetas(model, xi, use);

  for (int n = 0; n < steps; ++n) {
    const double* zn = eval.zetas.data() + static_cast<std::ptrdiff_t>(n) * use;
    double* znp1 = eval.zetas.data() + static_cast<std::ptrdiff_t>(n + 1) * use;
    for (int k = 0; k < use; ++k) {
      const RecordLayout& lay = lays[static_cast<std::size_t>(k)];
      const double* rec = model.terms[static_cast<std::size_t>(k)].records.data() +
                          static_cast<std::size_t>(n) * lay.size();
      const ZetaStepResult res =
          zeta_step(rec, lay, tau, coef, h_conv, h_cubic, zn, znp1);
      znp1[k] = res.value;
      eval.frozen_steps += res.frozen ? 1 : 0;
    }
  }

  eval.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return eval;
}

}  // namespace pardyn
