#pragma once

#include "pardyn/problem.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace pardyn {

// Structured mesh: nx (and ny in 2D) elements per axis, piecewise-linear elements in
// 1D, bilinear quadrilaterals in 2D. Node numbering runs x-fastest.
struct Mesh {
  int dim = 1;
  int nx = 1;
  int ny = 0;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  int nodes_x() const { return nx + 1; }
  int nodes_y() const { return dim == 2 ? ny + 1 : 1; }
  int n_nodes() const { return nodes_x() * nodes_y(); }
  int n_elements() const { return dim == 2 ? nx * ny : nx; }
  double hx() const { return (x1 - x0) / nx; }
  double hy() const { return dim == 2 ? (y1 - y0) / ny : 0.0; }
  double node_x(int node) const { return x0 + hx() * (node % nodes_x()); }
  double node_y(int node) const { return dim == 2 ? y0 + hy() * (node / nodes_x()) : 0.0; }
  bool is_boundary(int node) const;
};

// Mesh-level realization of a ParametricProblem: assembled operators, load vectors,
// nodal initial/lifting fields, the discrete L2 inner product, and the interior
// (Dirichlet-eliminated) index maps used by the time steppers.
//
// Every bilinear form is integrated with Gauss rules exact for its polynomial degree
// (2 for mass/stiffness-type kernels, 4 for the cubic kernel). All matrices share the
// mass sparsity pattern, which makes per-step matrix updates allocation-free.
class Discretization {
 public:
  ParametricProblem problem;
  Mesh mesh;

  SpMat M;                    // full mass matrix (SPD)
  SpMat D;                    // 1D first-derivative pairing <dphi_j/dx, phi_i>
  std::vector<SpMat> A_ops;   // assembled A terms with natural sign (Laplacian -> -K)
  std::vector<Vector> C_loads;
  std::vector<Vector> q_fields;     // nodal initial profiles of the homogeneous variable
  std::vector<Vector> lift_fields;  // nodal lifting profiles

  std::vector<int> interior;        // node index per interior dof
  std::vector<int> interior_of;     // interior dof per node, -1 on the boundary

  int n_nodes() const { return mesh.n_nodes(); }
  int n_interior() const { return static_cast<int>(interior.size()); }

  // Discrete L2 inner product / norm on the full node set.
  double inner(const Vector& a, const Vector& b) const;
  double norm(const Vector& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }

  // Load vector of the trilinear convection form <a * db/dx, v> (1D).
  Vector apply_convection(const Vector& a, const Vector& b) const;
  // Load vector of the quadrilinear cubic form <a*b*c, v>.
  Vector apply_cubic(const Vector& a, const Vector& b, const Vector& c) const;

  // Batched projection tensors: with k = fn.size() = fnp1.size() and full-size nodal
  // arrays, one element sweep accumulates
  //   tensor[a*k + b]         += <fn[a] * d(fnp1[b])/dx, test>        (convection, 1D)
  //   tensor[(a*k + b)*k + c] += <fn[a] * fn[b] * fnp1[c], test>      (cubic)
  // far cheaper than k^2 (resp. k^3) separate form applications.
  void convection_projection(const std::vector<const double*>& fn,
                             const std::vector<const double*>& fnp1, const Vector& test,
                             double* tensor) const;
  void cubic_projection(const std::vector<const double*>& fn,
                        const std::vector<const double*>& fnp1, const Vector& test,
                        double* tensor) const;

  // Interior-block matrices for the steppers (patterns all mirror M_int).
  const SpMat& M_int() const { return m_int_; }
  const std::vector<SpMat>& A_int() const { return a_int_; }

  // Writes the interior convection matrix B(a)_{ij} = <a dphi_j/dx, phi_i> (1D) or the
  // interior weighted mass W(a,b)_{ij} = <a b phi_j phi_i> into `values`, which indexes
  // the shared interior pattern. Accumulates: caller zeroes the array first.
  void accumulate_convection_interior(const Vector& a, double scale,
                                      std::vector<double>& values) const;
  void accumulate_weighted_mass_interior(const Vector& a, const Vector& b, double scale,
                                         std::vector<double>& values) const;
  // Writes <(da/dx) phi_j, phi_i> (1D); together with the convection matrix this is the
  // Jacobian of the convection form w -> <w dw/dx, v> at a.
  void accumulate_gradient_weighted_mass_interior(const Vector& a, double scale,
                                                  std::vector<double>& values) const;

  // Pattern plumbing for per-step matrices: a CSR matrix with the interior pattern, a
  // CSR->CSC slot permutation for handing values to column-major factorizations, and
  // the raw component value arrays.
  SpMat make_interior_pattern() const;      // zero-valued clone of the shared pattern
  SpMatCol make_interior_pattern_col() const;
  const std::vector<int>& csr_to_csc() const { return csr_to_csc_; }

  Vector restrict_interior(const Vector& full) const;
  Vector prolong_interior(const Vector& inter) const;  // zero boundary values

  // Dual norm ||r||_{V'} = sqrt(r_int^T M_int^{-1} r_int) of a full-size load vector
  // supported on test functions vanishing at the boundary.
  double dual_norm(const Vector& load) const;
  Vector riesz(const Vector& load) const;  // M_int^{-1} restriction, interior-sized
  Vector mass_solve_interior(const Vector& rhs_int) const;  // M_int^{-1} rhs, cached

  // Nodal field of the homogeneous-variable initial data, and of the full original
  // variable (homogeneous part plus lifting).
  Vector initial_field_homogeneous(const Sample& xi) const;
  Vector initial_field(const Sample& xi) const;
  Vector lifting_field(const Sample& xi) const;  // zero vector if no lifting

 private:
  friend Discretization build_discretization(const ParametricProblem&, int, int);

  SpMat m_int_;
  std::vector<SpMat> a_int_;
  std::vector<int> csr_to_csc_;

  // element -> slot tables, built once, reused by all assemblies
  std::vector<int> full_slots_;  // element-local (i,j) -> index into full pattern values
  std::vector<int> int_slots_;   // element-local (i,j) -> index into interior values, -1
  mutable std::unique_ptr<Eigen::SimplicialLDLT<SpMatCol>> mass_ldlt_;
};

Discretization build_discretization(const ParametricProblem& problem, int nx, int ny = 0);

// Nodal interpolation of a spatial field (2D fields use tensor node coordinates).
Vector interpolate(const SpatialFn& f, const Mesh& mesh);

}  // namespace pardyn
