#pragma once

#include "pardyn/params.hpp"

namespace pardyn {

// Parameter coefficient functions are named closures keyed by `kind`, with their
// defining constants and parameter indices stored alongside. Persistence writes the
// (kind, consts, xi) triple, never code, so a saved model can re-evaluate kappa(xi)
// for new parameters. Supported kinds (all affine-composable closed forms):
//   "const"      : consts[0]
//   "xi"         : consts[0] * xi[idx[0]]
//   "xi_affine"  : consts[0] + consts[1] * xi[idx[0]]
//   "xi_product" : consts[0] * xi[idx[0]] * xi[idx[1]]   (idx[0]==idx[1] gives xi^2)
struct CoefficientFn {
  std::string kind;
  std::vector<double> consts;
  std::vector<std::size_t> idx;

  double operator()(const Sample& xi) const;
  void validate(std::size_t param_dim) const;

  static CoefficientFn constant(double c);
  static CoefficientFn xi(std::size_t i, double scale = 1.0);
  static CoefficientFn xi_affine(double c0, double c1, std::size_t i);
  static CoefficientFn xi_product(std::size_t i, std::size_t j, double scale = 1.0);
};

// Spatial fields (sources, initial profiles, lifting profiles) use the same
// id-plus-constants scheme. Evaluation is pointwise; the discretization interpolates
// at mesh nodes or quadrature points. Kinds:
//   "const"       : consts[0]
//   "affine_x"    : consts[0] + consts[1]*x            (1D)
//   "parabola"    : consts[0] * x * (1 - x)            (1D)
//   "sine"        : consts[0] * sin(consts[1]*pi*x)    (1D)
//   "sinsin"      : sin(x) * sin(y)                    (2D)
//   "sine_pair"   : consts[0] * (sin(2*pi*m*x) + sin(2*pi*m*y)), m = consts[1]  (2D)
//   "well"        : consts[0] * (x^2 - x) * (y^2 - y)  (2D)
//   "nodal"       : explicit nodal values (persisted alongside the model)
struct SpatialFn {
  std::string kind;
  std::vector<double> consts;
  std::vector<double> nodal;  // only for kind == "nodal"

  double operator()(double x, double y = 0.0) const;
  bool is_nodal() const { return kind == "nodal"; }
  void validate(int dim) const;

  static SpatialFn constant(double c);
  static SpatialFn affine_x(double c0, double c1);
  static SpatialFn parabola(double scale);
  static SpatialFn sine(double scale, double freq);
  static SpatialFn sinsin();
  static SpatialFn sine_pair(double scale, int m);
  static SpatialFn well(double scale);
  static SpatialFn from_nodal(std::vector<double> values);
};

}  // namespace pardyn
