#include "pardyn/discretization.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pardyn {

namespace {

struct QuadRule {
  std::vector<double> x;  // points on [0, 1]
  std::vector<double> w;  // weights summing to 1
};

// Gauss-Legendre rules mapped to [0, 1]; n-point rule integrates degree 2n-1 exactly.
QuadRule gauss01(int n) {
  switch (n) {
    case 1:
      return {{0.5}, {1.0}};
    case 2: {
      const double d = 0.5 / std::sqrt(3.0);
      return {{0.5 - d, 0.5 + d}, {0.5, 0.5}};
    }
    case 3: {
      const double d = 0.5 * std::sqrt(3.0 / 5.0);
      return {{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
    }
    case 5: {
      const double a = 0.5 * 0.9061798459386639928;
      const double b = 0.5 * 0.5384693101056830910;
      const double wa = 0.5 * 0.2369268850561890875;
      const double wb = 0.5 * 0.4786286704993664680;
      const double wc = 0.5 * 0.5688888888888888889;
      return {{0.5 - a, 0.5 - b, 0.5, 0.5 + b, 0.5 + a}, {wa, wb, wc, wb, wa}};
    }
    default:
      throw ConfigError(fmt::format("unsupported quadrature order {}", n));
  }
}

// 1D hat basis on the reference element [0,1]: phi0 = 1-s, phi1 = s.
inline double hat(int local, double s) { return local == 0 ? 1.0 - s : s; }
inline double hat_ds(int local) { return local == 0 ? -1.0 : 1.0; }

// Bilinear basis on the reference square, local order (00, 10, 01, 11).
inline double q1(int local, double s, double t) {
  switch (local) {
    case 0: return (1.0 - s) * (1.0 - t);
    case 1: return s * (1.0 - t);
    case 2: return (1.0 - s) * t;
    default: return s * t;
  }
}
inline double q1_ds(int local, double, double t) {
  switch (local) {
    case 0: return -(1.0 - t);
    case 1: return (1.0 - t);
    case 2: return -t;
    default: return t;
  }
}
inline double q1_dt(int local, double s, double) {
  switch (local) {
    case 0: return -(1.0 - s);
    case 1: return -s;
    case 2: return (1.0 - s);
    default: return s;
  }
}

}  // namespace

bool Mesh::is_boundary(int node) const {
  const int i = node % nodes_x();
  if (i == 0 || i == nx) return true;
  if (dim == 2) {
    const int j = node / nodes_x();
    if (j == 0 || j == ny) return true;
  }
  return false;
}

Vector interpolate(const SpatialFn& f, const Mesh& mesh) {
  Vector v(mesh.n_nodes());
  if (f.is_nodal()) {
    if (static_cast<int>(f.nodal.size()) != mesh.n_nodes()) {
      throw ConfigError(fmt::format("nodal field has {} values, mesh has {} nodes",
                                    f.nodal.size(), mesh.n_nodes()));
    }
    for (int n = 0; n < mesh.n_nodes(); ++n) v[n] = f.nodal[n];
    return v;
  }
  for (int n = 0; n < mesh.n_nodes(); ++n) v[n] = f(mesh.node_x(n), mesh.node_y(n));
  return v;
}

double Discretization::inner(const Vector& a, const Vector& b) const {
  return a.dot(M * b);
}

namespace {

// Local node indices of an element (2 in 1D, 4 in 2D).
inline void element_nodes(const Mesh& mesh, int e, int* nodes, int& n_local) {
  if (mesh.dim == 1) {
    nodes[0] = e;
    nodes[1] = e + 1;
    n_local = 2;
  } else {
    const int ex = e % mesh.nx;
    const int ey = e / mesh.nx;
    const int base = ey * mesh.nodes_x() + ex;
    nodes[0] = base;
    nodes[1] = base + 1;
    nodes[2] = base + mesh.nodes_x();
    nodes[3] = base + mesh.nodes_x() + 1;
    n_local = 4;
  }
}

using Triplet = Eigen::Triplet<double>;

// Assembles a full-size matrix from a per-element local-matrix callback.
template <typename LocalKernel>
SpMat assemble_matrix(const Mesh& mesh, LocalKernel&& local) {
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(mesh.n_elements()) * (mesh.dim == 1 ? 4 : 16));
  int nodes[4];
  int n_local = 0;
  double loc[16];
  for (int e = 0; e < mesh.n_elements(); ++e) {
    element_nodes(mesh, e, nodes, n_local);
    local(e, loc);
    for (int i = 0; i < n_local; ++i) {
      for (int j = 0; j < n_local; ++j) {
        trips.emplace_back(nodes[i], nodes[j], loc[i * n_local + j]);
      }
    }
  }
  SpMat out(mesh.n_nodes(), mesh.n_nodes());
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

void local_mass(const Mesh& mesh, double* loc) {
  if (mesh.dim == 1) {
    const auto q = gauss01(2);
    const double h = mesh.hx();
    for (int i = 0; i < 4; ++i) loc[i] = 0.0;
    for (std::size_t p = 0; p < q.x.size(); ++p) {
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          loc[i * 2 + j] += q.w[p] * h * hat(i, q.x[p]) * hat(j, q.x[p]);
    }
  } else {
    const auto q = gauss01(2);
    const double jac = mesh.hx() * mesh.hy();
    for (int i = 0; i < 16; ++i) loc[i] = 0.0;
    for (std::size_t ps = 0; ps < q.x.size(); ++ps) {
      for (std::size_t pt = 0; pt < q.x.size(); ++pt) {
        const double wq = q.w[ps] * q.w[pt] * jac;
        for (int i = 0; i < 4; ++i)
          for (int j = 0; j < 4; ++j)
            loc[i * 4 + j] += wq * q1(i, q.x[ps], q.x[pt]) * q1(j, q.x[ps], q.x[pt]);
      }
    }
  }
}

void local_stiffness(const Mesh& mesh, double* loc) {
  if (mesh.dim == 1) {
    const double h = mesh.hx();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) loc[i * 2 + j] = hat_ds(i) * hat_ds(j) / h;
  } else {
    const auto q = gauss01(2);
    const double hx = mesh.hx(), hy = mesh.hy();
    const double jac = hx * hy;
    for (int i = 0; i < 16; ++i) loc[i] = 0.0;
    for (std::size_t ps = 0; ps < q.x.size(); ++ps) {
      for (std::size_t pt = 0; pt < q.x.size(); ++pt) {
        const double wq = q.w[ps] * q.w[pt] * jac;
        for (int i = 0; i < 4; ++i) {
          const double gix = q1_ds(i, q.x[ps], q.x[pt]) / hx;
          const double giy = q1_dt(i, q.x[ps], q.x[pt]) / hy;
          for (int j = 0; j < 4; ++j) {
            const double gjx = q1_ds(j, q.x[ps], q.x[pt]) / hx;
            const double gjy = q1_dt(j, q.x[ps], q.x[pt]) / hy;
            loc[i * 4 + j] += wq * (gix * gjx + giy * gjy);
          }
        }
      }
    }
  }
}

// Load vector <f, phi_i> with a composite 4-subcell 5-point Gauss rule per element,
// accurate far beyond the mesh scale even for oscillatory analytic sources.
Vector assemble_load(const Mesh& mesh, const SpatialFn& f) {
  Vector load = Vector::Zero(mesh.n_nodes());
  const auto q = gauss01(5);
  const int sub = 4;
  int nodes[4];
  int n_local = 0;
  if (mesh.dim == 1) {
    const double h = mesh.hx();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_nodes(mesh, e, nodes, n_local);
      const double xl = mesh.x0 + e * h;
      for (int c = 0; c < sub; ++c) {
        for (std::size_t p = 0; p < q.x.size(); ++p) {
          const double s = (c + q.x[p]) / sub;
          const double wq = q.w[p] * h / sub;
          const double fx = f(xl + s * h);
          for (int i = 0; i < 2; ++i) load[nodes[i]] += wq * fx * hat(i, s);
        }
      }
    }
  } else {
    const double hx = mesh.hx(), hy = mesh.hy();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_nodes(mesh, e, nodes, n_local);
      const double xl = mesh.x0 + (e % mesh.nx) * hx;
      const double yl = mesh.y0 + (e / mesh.nx) * hy;
      for (int cs = 0; cs < sub; ++cs) {
        for (int ct = 0; ct < sub; ++ct) {
          for (std::size_t ps = 0; ps < q.x.size(); ++ps) {
            for (std::size_t pt = 0; pt < q.x.size(); ++pt) {
              const double s = (cs + q.x[ps]) / sub;
              const double t = (ct + q.x[pt]) / sub;
              const double wq = q.w[ps] * q.w[pt] * hx * hy / (sub * sub);
              const double fx = f(xl + s * hx, yl + t * hy);
              for (int i = 0; i < 4; ++i) load[nodes[i]] += wq * fx * q1(i, s, t);
            }
          }
        }
      }
    }
  }
  return load;
}

// Maps each element-local (i, j) pair to its slot in a compressed pattern;
// boundary-filtered variant writes -1 where either node is eliminated.
std::vector<int> build_slots(const Mesh& mesh, const SpMat& pattern,
                             const std::vector<int>& index_of_node) {
  const int nl = mesh.dim == 1 ? 2 : 4;
  std::vector<int> slots(static_cast<std::size_t>(mesh.n_elements()) * nl * nl, -1);
  int nodes[4];
  int n_local = 0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    element_nodes(mesh, e, nodes, n_local);
    for (int i = 0; i < n_local; ++i) {
      const int ri = index_of_node.empty() ? nodes[i] : index_of_node[nodes[i]];
      if (ri < 0) continue;
      for (int j = 0; j < n_local; ++j) {
        const int cj = index_of_node.empty() ? nodes[j] : index_of_node[nodes[j]];
        if (cj < 0) continue;
        const int begin = pattern.outerIndexPtr()[ri];
        const int end = pattern.outerIndexPtr()[ri + 1];
        const auto* inner = pattern.innerIndexPtr();
        const auto* it = std::lower_bound(inner + begin, inner + end, cj);
        if (it == inner + end || *it != cj) {
          throw FormatError("sparsity pattern is missing an element entry");
        }
        slots[(static_cast<std::size_t>(e) * nl + i) * nl + j] =
            static_cast<int>(it - inner);
      }
    }
  }
  return slots;
}

SpMat restrict_matrix(const SpMat& full, const std::vector<int>& interior,
                      const std::vector<int>& interior_of) {
  std::vector<Triplet> trips;
  for (std::size_t r = 0; r < interior.size(); ++r) {
    const int node = interior[r];
    for (SpMat::InnerIterator it(full, node); it; ++it) {
      const int c = interior_of[it.col()];
      if (c >= 0) trips.emplace_back(static_cast<int>(r), c, it.value());
    }
  }
  SpMat out(static_cast<int>(interior.size()), static_cast<int>(interior.size()));
  out.setFromTriplets(trips.begin(), trips.end());
  out.makeCompressed();
  return out;
}

}  // namespace

Vector Discretization::apply_convection(const Vector& a, const Vector& b) const {
  if (mesh.dim != 1) throw ConfigError("convection kernel requires a 1D mesh");
  Vector out = Vector::Zero(n_nodes());
  const auto q = gauss01(2);  // integrand degree 2: a, phi_i linear, db/dx constant
  const double h = mesh.hx();
  for (int e = 0; e < mesh.nx; ++e) {
    const double a0 = a[e], a1 = a[e + 1];
    const double db = (b[e + 1] - b[e]) / h;
    double v0 = 0.0, v1 = 0.0;
    for (std::size_t p = 0; p < q.x.size(); ++p) {
      const double av = a0 + (a1 - a0) * q.x[p];
      const double wq = q.w[p] * h * av * db;
      v0 += wq * (1.0 - q.x[p]);
      v1 += wq * q.x[p];
    }
    out[e] += v0;
    out[e + 1] += v1;
  }
  return out;
}

Vector Discretization::apply_cubic(const Vector& a, const Vector& b,
                                   const Vector& c) const {
  Vector out = Vector::Zero(n_nodes());
  const auto q = gauss01(3);  // integrand degree 4 per axis
  int nodes[4];
  int n_local = 0;
  if (mesh.dim == 1) {
    const double h = mesh.hx();
    for (int e = 0; e < mesh.nx; ++e) {
      for (std::size_t p = 0; p < q.x.size(); ++p) {
        const double s = q.x[p];
        const double av = a[e] + (a[e + 1] - a[e]) * s;
        const double bv = b[e] + (b[e + 1] - b[e]) * s;
        const double cv = c[e] + (c[e + 1] - c[e]) * s;
        const double wq = q.w[p] * h * av * bv * cv;
        out[e] += wq * (1.0 - s);
        out[e + 1] += wq * s;
      }
    }
  } else {
    const double jac = mesh.hx() * mesh.hy();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_nodes(mesh, e, nodes, n_local);
      for (std::size_t ps = 0; ps < q.x.size(); ++ps) {
        for (std::size_t pt = 0; pt < q.x.size(); ++pt) {
          const double s = q.x[ps], t = q.x[pt];
          double av = 0.0, bv = 0.0, cv = 0.0, phi[4];
          for (int i = 0; i < 4; ++i) {
            phi[i] = q1(i, s, t);
            av += a[nodes[i]] * phi[i];
            bv += b[nodes[i]] * phi[i];
            cv += c[nodes[i]] * phi[i];
          }
          const double wq = q.w[ps] * q.w[pt] * jac * av * bv * cv;
          for (int i = 0; i < 4; ++i) out[nodes[i]] += wq * phi[i];
        }
      }
    }
  }
  return out;
}

void Discretization::accumulate_convection_interior(const Vector& a, double scale,
                                                    std::vector<double>& values) const {
  if (mesh.dim != 1) throw ConfigError("convection kernel requires a 1D mesh");
  const auto q = gauss01(2);
  const double h = mesh.hx();
  const int nl = 2;
  for (int e = 0; e < mesh.nx; ++e) {
    const double a0 = a[e], a1 = a[e + 1];
    for (int i = 0; i < nl; ++i) {
      for (int j = 0; j < nl; ++j) {
        const int slot = int_slots_[(static_cast<std::size_t>(e) * nl + i) * nl + j];
        if (slot < 0) continue;
        double acc = 0.0;
        for (std::size_t p = 0; p < q.x.size(); ++p) {
          const double av = a0 + (a1 - a0) * q.x[p];
          acc += q.w[p] * h * av * (hat_ds(j) / h) * hat(i, q.x[p]);
        }
        values[static_cast<std::size_t>(slot)] += scale * acc;
      }
    }
  }
}

void Discretization::accumulate_weighted_mass_interior(const Vector& a, const Vector& b,
                                                       double scale,
                                                       std::vector<double>& values) const {
  const auto q = gauss01(3);
  int nodes[4];
  int n_local = 0;
  if (mesh.dim == 1) {
    const double h = mesh.hx();
    for (int e = 0; e < mesh.nx; ++e) {
      element_nodes(mesh, e, nodes, n_local);
      for (std::size_t p = 0; p < q.x.size(); ++p) {
        const double s = q.x[p];
        const double av = a[e] + (a[e + 1] - a[e]) * s;
        const double bv = b[e] + (b[e + 1] - b[e]) * s;
        const double wq = q.w[p] * h * av * bv;
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const int slot = int_slots_[(static_cast<std::size_t>(e) * 2 + i) * 2 + j];
            if (slot >= 0) {
              values[static_cast<std::size_t>(slot)] +=
                  scale * wq * hat(i, s) * hat(j, s);
            }
          }
        }
      }
    }
  } else {
    const double jac = mesh.hx() * mesh.hy();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_nodes(mesh, e, nodes, n_local);
      for (std::size_t ps = 0; ps < q.x.size(); ++ps) {
        for (std::size_t pt = 0; pt < q.x.size(); ++pt) {
          const double s = q.x[ps], t = q.x[pt];
          double av = 0.0, bv = 0.0, phi[4];
          for (int i = 0; i < 4; ++i) {
            phi[i] = q1(i, s, t);
            av += a[nodes[i]] * phi[i];
            bv += b[nodes[i]] * phi[i];
          }
          const double wq = q.w[ps] * q.w[pt] * jac * av * bv;
          for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
              const int slot = int_slots_[(static_cast<std::size_t>(e) * 4 + i) * 4 + j];
              if (slot >= 0) values[static_cast<std::size_t>(slot)] += scale * wq * phi[i] * phi[j];
            }
          }
        }
      }
    }
  }
}

void Discretization::accumulate_gradient_weighted_mass_interior(
    const Vector& a, double scale, std::vector<double>& values) const {
  if (mesh.dim != 1) throw ConfigError("gradient weight kernel requires a 1D mesh");
  const double h = mesh.hx();
  const double mloc[2][2] = {{h / 3.0, h / 6.0}, {h / 6.0, h / 3.0}};
  for (int e = 0; e < mesh.nx; ++e) {
    const double da = (a[e + 1] - a[e]) / h;  // element-wise constant derivative
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const int slot = int_slots_[(static_cast<std::size_t>(e) * 2 + i) * 2 + j];
        if (slot >= 0) values[static_cast<std::size_t>(slot)] += scale * da * mloc[i][j];
      }
    }
  }
}

void Discretization::convection_projection(const std::vector<const double*>& fn,
                                           const std::vector<const double*>& fnp1,
                                           const Vector& test, double* tensor) const {
  if (mesh.dim != 1) throw ConfigError("convection kernel requires a 1D mesh");
  const std::size_t k = fn.size();
  const auto q = gauss01(2);
  const double h = mesh.hx();
  std::vector<double> s(k), d(k);
  for (int e = 0; e < mesh.nx; ++e) {
    // Per element the tensor update is rank one: s[a] (x) d[b] with
    // s[a] = int_e fn[a]*test and d[b] the constant derivative of fnp1[b].
    const double t0 = test[e], t1 = test[e + 1];
    for (std::size_t a = 0; a < k; ++a) {
      const double f0 = fn[a][e], f1 = fn[a][e + 1];
      double acc = 0.0;
      for (std::size_t p = 0; p < q.x.size(); ++p) {
        const double x = q.x[p];
        acc += q.w[p] * h * (f0 + (f1 - f0) * x) * (t0 + (t1 - t0) * x);
      }
      s[a] = acc;
    }
    for (std::size_t b = 0; b < k; ++b) d[b] = (fnp1[b][e + 1] - fnp1[b][e]) / h;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) tensor[a * k + b] += s[a] * d[b];
    }
  }
}

void Discretization::cubic_projection(const std::vector<const double*>& fn,
                                      const std::vector<const double*>& fnp1,
                                      const Vector& test, double* tensor) const {
  const std::size_t k = fn.size();
  const auto q = gauss01(3);
  std::vector<double> va(k), vc(k);
  int nodes[4];
  int n_local = 0;
  auto scatter = [&](double wq_test) {
    // tensor[(a,b,c)] += (wq * test) * fn[a] * fn[b] * fnp1[c] at one quadrature point
    for (std::size_t a = 0; a < k; ++a) {
      const double fa = wq_test * va[a];
      for (std::size_t b = 0; b < k; ++b) {
        const double fab = fa * va[b];
        double* row = tensor + (a * k + b) * k;
        for (std::size_t c = 0; c < k; ++c) row[c] += fab * vc[c];
      }
    }
  };
  if (mesh.dim == 1) {
    const double h = mesh.hx();
    for (int e = 0; e < mesh.nx; ++e) {
      for (std::size_t p = 0; p < q.x.size(); ++p) {
        const double x = q.x[p];
        for (std::size_t a = 0; a < k; ++a) va[a] = fn[a][e] + (fn[a][e + 1] - fn[a][e]) * x;
        for (std::size_t c = 0; c < k; ++c) {
          vc[c] = fnp1[c][e] + (fnp1[c][e + 1] - fnp1[c][e]) * x;
        }
        scatter(q.w[p] * h * (test[e] + (test[e + 1] - test[e]) * x));
      }
    }
  } else {
    const double jac = mesh.hx() * mesh.hy();
    for (int e = 0; e < mesh.n_elements(); ++e) {
      element_nodes(mesh, e, nodes, n_local);
      for (std::size_t ps = 0; ps < q.x.size(); ++ps) {
        for (std::size_t pt = 0; pt < q.x.size(); ++pt) {
          const double s = q.x[ps], t = q.x[pt];
          double phi[4], tv = 0.0;
          for (int i = 0; i < 4; ++i) {
            phi[i] = q1(i, s, t);
            tv += test[nodes[i]] * phi[i];
          }
          for (std::size_t a = 0; a < k; ++a) {
            double acc = 0.0;
            for (int i = 0; i < 4; ++i) acc += fn[a][nodes[i]] * phi[i];
            va[a] = acc;
          }
          for (std::size_t c = 0; c < k; ++c) {
            double acc = 0.0;
            for (int i = 0; i < 4; ++i) acc += fnp1[c][nodes[i]] * phi[i];
            vc[c] = acc;
          }
          scatter(q.w[ps] * q.w[pt] * jac * tv);
        }
      }
    }
  }
}

SpMat Discretization::make_interior_pattern() const {
  SpMat out = m_int_;
  std::fill(out.valuePtr(), out.valuePtr() + out.nonZeros(), 0.0);
  return out;
}

SpMatCol Discretization::make_interior_pattern_col() const {
  SpMatCol out = SpMatCol(m_int_);
  out.makeCompressed();
  std::fill(out.valuePtr(), out.valuePtr() + out.nonZeros(), 0.0);
  return out;
}

Vector Discretization::restrict_interior(const Vector& full) const {
  Vector out(n_interior());
  for (int r = 0; r < n_interior(); ++r) out[r] = full[interior[r]];
  return out;
}

Vector Discretization::prolong_interior(const Vector& inter) const {
  Vector out = Vector::Zero(n_nodes());
  for (int r = 0; r < n_interior(); ++r) out[interior[r]] = inter[r];
  return out;
}

Vector Discretization::mass_solve_interior(const Vector& rhs_int) const {
  if (!mass_ldlt_) {
    mass_ldlt_ = std::make_unique<Eigen::SimplicialLDLT<SpMatCol>>();
    mass_ldlt_->compute(SpMatCol(m_int_));
    if (mass_ldlt_->info() != Eigen::Success) {
      throw DivergenceError("mass matrix factorization failed");
    }
  }
  return mass_ldlt_->solve(rhs_int);
}

Vector Discretization::riesz(const Vector& load) const {
  return mass_solve_interior(restrict_interior(load));
}

double Discretization::dual_norm(const Vector& load) const {
  const Vector r_int = restrict_interior(load);
  const Vector z = riesz(load);
  return std::sqrt(std::max(0.0, r_int.dot(z)));
}

Vector Discretization::initial_field_homogeneous(const Sample& xi) const {
  Vector out = Vector::Zero(n_nodes());
  for (std::size_t i = 0; i < problem.initial.size(); ++i) {
    out += problem.initial[i].p(xi) * q_fields[i];
  }
  return out;
}

Vector Discretization::lifting_field(const Sample& xi) const {
  Vector out = Vector::Zero(n_nodes());
  for (std::size_t i = 0; i < problem.lifting.size(); ++i) {
    out += problem.lifting[i].coef(xi) * lift_fields[i];
  }
  return out;
}

Vector Discretization::initial_field(const Sample& xi) const {
  return initial_field_homogeneous(xi) + lifting_field(xi);
}

Discretization build_discretization(const ParametricProblem& problem, int nx, int ny) {
  validate_problem(problem);
  Discretization d;
  d.problem = problem;
  d.mesh.dim = problem.dim;
  d.mesh.nx = nx;
  d.mesh.ny = problem.dim == 2 ? (ny > 0 ? ny : nx) : 0;
  d.mesh.x0 = problem.xlim[0];
  d.mesh.x1 = problem.xlim[1];
  d.mesh.y0 = problem.ylim[0];
  d.mesh.y1 = problem.ylim[1];
  if (nx < 2 || (problem.dim == 2 && d.mesh.ny < 2)) {
    throw ConfigError("mesh needs at least 2 elements per axis");
  }

  const Mesh& mesh = d.mesh;
  d.interior_of.assign(mesh.n_nodes(), -1);
  for (int n = 0; n < mesh.n_nodes(); ++n) {
    if (!mesh.is_boundary(n)) {
      d.interior_of[n] = static_cast<int>(d.interior.size());
      d.interior.push_back(n);
    }
  }

  d.M = assemble_matrix(mesh, [&](int, double* loc) { local_mass(mesh, loc); });
  SpMat K = assemble_matrix(mesh, [&](int, double* loc) { local_stiffness(mesh, loc); });

  if (mesh.dim == 1) {
    // <dphi_j/dx, phi_i>: integrand degree 1.
    d.D = assemble_matrix(mesh, [&](int, double* loc) {
      const auto q = gauss01(2);
      const double h = mesh.hx();
      for (int i = 0; i < 4; ++i) loc[i] = 0.0;
      for (std::size_t p = 0; p < q.x.size(); ++p) {
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j)
            loc[i * 2 + j] += q.w[p] * h * hat(i, q.x[p]) * (hat_ds(j) / h);
      }
    });
  }

  d.A_ops.reserve(problem.A.size());
  for (const auto& t : problem.A) {
    if (t.op == LinearOp::Laplacian) {
      d.A_ops.push_back(SpMat(-K));
    } else {
      d.A_ops.push_back(d.M);
    }
  }

  d.C_loads.reserve(problem.C.size());
  for (const auto& t : problem.C) {
    if (t.field.is_nodal()) {
      d.C_loads.push_back(d.M * interpolate(t.field, mesh));
    } else {
      d.C_loads.push_back(assemble_load(mesh, t.field));
    }
  }

  d.q_fields.reserve(problem.initial.size());
  for (const auto& t : problem.initial) d.q_fields.push_back(interpolate(t.q, mesh));
  d.lift_fields.reserve(problem.lifting.size());
  for (const auto& t : problem.lifting) d.lift_fields.push_back(interpolate(t.field, mesh));

  d.m_int_ = restrict_matrix(d.M, d.interior, d.interior_of);
  d.a_int_.reserve(d.A_ops.size());
  for (const auto& a : d.A_ops) d.a_int_.push_back(restrict_matrix(a, d.interior, d.interior_of));

  d.full_slots_ = build_slots(mesh, d.M, {});
  d.int_slots_ = build_slots(mesh, d.m_int_, d.interior_of);

  // CSR -> CSC slot permutation of the shared interior pattern, for feeding values to
  // column-major direct solvers without per-step allocation.
  {
    SpMatCol csc(d.m_int_);
    csc.makeCompressed();
    d.csr_to_csc_.assign(static_cast<std::size_t>(d.m_int_.nonZeros()), -1);
    // Walk CSC in storage order and record, for each (row, col), the CSR slot.
    for (int col = 0; col < csc.cols(); ++col) {
      for (int p = csc.outerIndexPtr()[col]; p < csc.outerIndexPtr()[col + 1]; ++p) {
        const int row = csc.innerIndexPtr()[p];
        const int begin = d.m_int_.outerIndexPtr()[row];
        const int end = d.m_int_.outerIndexPtr()[row + 1];
        const auto* inner = d.m_int_.innerIndexPtr();
        const auto* it = std::lower_bound(inner + begin, inner + end, col);
        d.csr_to_csc_[static_cast<std::size_t>(it - inner)] = p;
      }
    }
  }

  return d;
}

}  // namespace pardyn
