#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pardyn {

using Vector = Eigen::VectorXd;
// Operator storage is compressed-row; direct solvers convert to column-major
// internally at factorization time.
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using SpMatCol = Eigen::SparseMatrix<double, Eigen::ColMajor>;

// Error taxonomy mapped by the CLI onto exit codes:
//   ConfigError -> 2, DivergenceError -> 3, FormatError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform time grid on [0, T] with `steps` backward-Euler steps.
struct TimeGrid {
  double T = 1.0;
  int steps = 1;

  double tau() const { return T / static_cast<double>(steps); }
  int nodes() const { return steps + 1; }
  double node(int n) const { return T * static_cast<double>(n) / static_cast<double>(steps); }
};

}  // namespace pardyn
