#include "pardyn/zeta.hpp"

#include <cmath>

namespace pardyn {

ZetaStepResult zeta_step(const double* rec, const RecordLayout& lay, double tau,
                         const CoefficientValues& coef, double h_conv, double h_cubic,
                         const double* zeta_n, const double* zeta_np1) {
  const int k = lay.k;
  const double scale = rec[0] / tau;  // diagonal mass product, the natural size of l
  const double c = rec[1] / tau;      // lagged mass product multiplies the old value
  double l = scale;
  for (int i = 0; i < lay.n_a; ++i) l -= coef.kA[i] * rec[lay.a(i, k - 1)];

  double s = 0.0;
  for (int i = 0; i < lay.n_a; ++i) {
    double acc = 0.0;
    for (int j = 0; j < k - 1; ++j) acc += zeta_np1[j] * rec[lay.a(i, j)];
    s += coef.kA[i] * acc;
  }
  for (int i = 0; i < lay.n_c; ++i) s += coef.kC[i] * rec[lay.c_proj(i)];
  for (int j = 0; j < k - 1; ++j) {
    s += (zeta_n[j] * rec[lay.g_cross_lag(j)] - zeta_np1[j] * rec[lay.g_cross(j)]) / tau;
  }

  if (lay.conv && h_conv != 0.0) {
    double lc = 0.0;
    double sc = 0.0;
    for (int a = 0; a < k; ++a) {
      const double za = zeta_n[a];
      lc += za * rec[lay.conv_at(a, k - 1)];
      for (int b = 0; b < k - 1; ++b) sc += za * zeta_np1[b] * rec[lay.conv_at(a, b)];
    }
    l -= h_conv * lc;
    s += h_conv * sc;
  }
  if (lay.cubic && h_cubic != 0.0) {
    double lc = 0.0;
    double sc = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        const double zab = zeta_n[a] * zeta_n[b];
        lc += zab * rec[lay.cubic_at(a, b, k - 1)];
        for (int cc = 0; cc < k - 1; ++cc) {
          sc += zab * zeta_np1[cc] * rec[lay.cubic_at(a, b, cc)];
        }
      }
    }
    l -= h_cubic * lc;
    s += h_cubic * sc;
  }

  if (!(std::abs(l) > 1e-12 * std::abs(scale))) {
    return {zeta_n[k - 1], true};
  }
  return {(c * zeta_n[k - 1] + s) / l, false};
}

double aggregate_h_conv(const ParametricProblem& problem, const CoefficientValues& coef) {
  double h = 0.0;
  for (std::size_t t = 0; t < problem.H.size(); ++t) {
    if (problem.H[t].kind == NonlinearKind::Convection) {
      h += problem.H[t].sign * coef.kH[t];
    }
  }
  return h;
}

double aggregate_h_cubic(const ParametricProblem& problem, const CoefficientValues& coef) {
  double h = 0.0;
  for (std::size_t t = 0; t < problem.H.size(); ++t) {
    if (problem.H[t].kind == NonlinearKind::Cubic) {
      h += problem.H[t].sign * coef.kH[t];
    }
  }
  return h;
}

Vector initial_zetas(const ReducedModel& model, const Sample& xi, int n_use) {
  const int use = n_use < 0 ? model.n_terms() : n_use;
  Vector p(model.problem.initial.size());
  for (std::size_t i = 0; i < model.problem.initial.size(); ++i) {
    p[static_cast<int>(i)] = model.problem.initial[i].p(xi);
  }
  Vector z0(use);
  for (int k = 0; k < use; ++k) {
    const Zeta0Rep& rep = model.terms[k].zeta0;
    double val = rep.w.size() > 0 ? rep.w.dot(p) : 0.0;
    for (int j = 0; j < rep.v.size(); ++j) val -= rep.v[j] * z0[j];
    z0[k] = val;
  }
  return z0;
}

}  // namespace pardyn
