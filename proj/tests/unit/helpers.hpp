#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "pardyn/discretization.hpp"
#include "pardyn/problem.hpp"

namespace pardyn::testing {

// 1D heat equation with parametric diffusivity on [0,1]:
//   du/dt = xi_0 * u_xx, u(.,0) = sin(pi x), xi_0 in [0.5, 2].
inline ParametricProblem heat1d() {
  ParametricProblem p;
  p.name = "heat1d";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 0.1;
  p.box.lo = {0.5};
  p.box.hi = {2.0};
  p.A.push_back({LinearOp::Laplacian, CoefficientFn::xi(0)});
  p.initial.push_back({CoefficientFn::constant(1.0), SpatialFn::sine(1.0, 1.0)});
  return p;
}

// Rank-1 separable problem: xi-independent dynamics, separated initial data
//   du/dt = u_xx, u(.,0) = xi_0 * sin(pi x).
// The solution is xi_0 * w(x,t), so a single enrichment term is exact for every
// parameter value.
inline ParametricProblem rank1() {
  ParametricProblem p;
  p.name = "rank1";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 0.1;
  p.box.lo = {0.5};
  p.box.hi = {2.0};
  p.A.push_back({LinearOp::Laplacian, CoefficientFn::constant(1.0)});
  p.initial.push_back({CoefficientFn::xi(0), SpatialFn::sine(1.0, 1.0)});
  return p;
}

// Nodal interpolant of sin(m pi x) on a uniform nx-element grid of [0,1]. On this
// grid the vector is a generalized eigenvector of the P1 stiffness/mass pair, so
// dynamics driven by these loads stay in a two-dimensional subspace exactly.
inline std::vector<double> sine_nodal(int nx, int m) {
  std::vector<double> v(static_cast<std::size_t>(nx) + 1);
  for (int i = 0; i <= nx; ++i)
    v[static_cast<std::size_t>(i)] =
        std::sin(std::numbers::pi * m * static_cast<double>(i) / nx);
  return v;
}

// Rank-2 separable problem on [0,1] with one parameter:
//   du/dt = u_xx + s1(x) + (xi_0 - 1) s2(x),  u(.,0) = s1,  s_m = sin(m pi x).
// With nodal loads the discrete solution is a(t) s1 + b(t; xi) s2 for every sample;
// at xi_0 = 1 the second component vanishes identically. Two enrichment terms
// reproduce the full-order solution to roundoff at every parameter value.
inline ParametricProblem rank2(int nx) {
  ParametricProblem p;
  p.name = "rank2";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 0.2;
  p.box.lo = {0.5};
  p.box.hi = {2.0};
  p.A.push_back({LinearOp::Laplacian, CoefficientFn::constant(1.0)});
  p.C.push_back({SpatialFn::from_nodal(sine_nodal(nx, 1)), CoefficientFn::constant(1.0)});
  p.C.push_back({SpatialFn::from_nodal(sine_nodal(nx, 2)),
                 CoefficientFn::xi_affine(-1.0, 1.0, 0)});
  p.initial.push_back({CoefficientFn::constant(1.0),
                       SpatialFn::from_nodal(sine_nodal(nx, 1))});
  return p;
}

// Forcing-only problem (no spatial operator): du/dt = xi_0 * f(x), u(., 0) = 0.
// The log-Lipschitz constant is exactly zero and the error-bound recursion has the
// closed form delta_n = alpha * t_n.
inline ParametricProblem forcing_only() {
  ParametricProblem p;
  p.name = "forcing";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 1.0;
  p.box.lo = {0.5};
  p.box.hi = {2.0};
  p.C.push_back({SpatialFn::parabola(1.0), CoefficientFn::xi(0)});
  return p;
}

// 1D viscous convection problem (semi-implicit nonlinear path):
//   du/dt = nu u_xx - xi_0 u u_x, u(.,0) = 2 x (1 - x).
inline ParametricProblem burgers_small() {
  ParametricProblem p;
  p.name = "burgers-small";
  p.dim = 1;
  p.xlim = {0.0, 1.0};
  p.T = 0.5;
  p.box.lo = {0.5};
  p.box.hi = {2.0};
  p.A.push_back({LinearOp::Laplacian, CoefficientFn::constant(0.05)});
  p.H.push_back({NonlinearKind::Convection, -1.0, CoefficientFn::xi(0)});
  p.initial.push_back({CoefficientFn::constant(1.0), SpatialFn::parabola(2.0)});
  return p;
}

// Cubic-reaction problem (Allen-Cahn type) on a tiny 2D mesh:
//   du/dt = xi_0^2 Lap u + u - u^3, u(.,0) = scale * well(x, y).
inline ParametricProblem cubic_small() {
  ParametricProblem p;
  p.name = "cubic-small";
  p.dim = 2;
  p.xlim = {0.0, 1.0};
  p.ylim = {0.0, 1.0};
  p.T = 0.25;
  p.box.lo = {0.1};
  p.box.hi = {0.2};
  p.A.push_back({LinearOp::Laplacian, CoefficientFn::xi_product(0, 0)});
  p.A.push_back({LinearOp::Identity, CoefficientFn::constant(1.0)});
  p.H.push_back({NonlinearKind::Cubic, -1.0, CoefficientFn::constant(1.0)});
  p.initial.push_back({CoefficientFn::constant(1.0), SpatialFn::well(4.0)});
  return p;
}

}  // namespace pardyn::testing
