#pragma once

#include "pardyn/coefficients.hpp"

#include <array>
#include <optional>

namespace pardyn {

// Parameter-dependent evolution problem
//   du/dt = F(u; xi) = C(xi) + A(u; xi) + H(u; xi),   u(., 0; xi) = mu(.; xi),
// with every piece affine in fixed parameter functions:
//   C(xi)    = sum_i kC_i(xi) * C_i(x)            (static sources)
//   A(u;xi)  = sum_i kA_i(xi) * A_i(u)            (linear spatial operators)
//   H(u;xi)  = sum_i kH_i(xi) * H_i(u)            (polynomial nonlinearities)
//   mu(.;xi) = sum_i p_i(xi)  * q_i(x)            (separated initial data)
//
// Non-homogeneous Dirichlet data is absorbed by a static lifting: the library solves
// for the homogeneous remainder w with u = w + sum_i lift_i(xi) * L_i(x). The affine
// terms above describe the *lifted* problem; `lifting` is used when reporting errors
// or fields in the original variable.

enum class LinearOp { Laplacian, Identity };
enum class NonlinearKind { Convection, Cubic };  // u*du/dx and u^3

struct OperatorTermSpec {
  LinearOp op;
  CoefficientFn coef;
};

struct SourceTermSpec {
  SpatialFn field;
  CoefficientFn coef;
};

struct NonlinearTermSpec {
  NonlinearKind kind;
  double sign;  // the term enters F as sign * kind(u), e.g. -u*du/dx has sign = -1
  CoefficientFn coef;
};

struct InitialTerm {
  CoefficientFn p;
  SpatialFn q;
};

struct ParametricProblem {
  std::string name;
  int dim = 1;                              // spatial dimension (1 or 2)
  std::array<double, 2> xlim{0.0, 1.0};
  std::array<double, 2> ylim{0.0, 1.0};     // ignored for dim == 1
  double T = 1.0;
  ParameterBox box;

  std::vector<SourceTermSpec> C;
  std::vector<OperatorTermSpec> A;
  std::vector<NonlinearTermSpec> H;
  std::vector<InitialTerm> initial;         // initial data of the homogeneous variable
  std::vector<SourceTermSpec> lifting;      // static lifting, constant in time

  bool has_nonlinear() const { return !H.empty(); }
};

struct CoefficientValues {
  std::vector<double> kC;
  std::vector<double> kA;
  std::vector<double> kH;
  std::vector<double> kLift;
};

// Evaluates every coefficient function at xi. Throws ConfigError if xi does not match
// the problem's parameter dimension or lies outside the box (small relative slack).
CoefficientValues evaluate_coefficients(const ParametricProblem& problem, const Sample& xi);

// Structural validation: dimensions, affine-form ids, finiteness, T > 0, and at least
// one term that can put energy into the solution (initial data, lifting, or sources).
void validate_problem(const ParametricProblem& problem);

}  // namespace pardyn
