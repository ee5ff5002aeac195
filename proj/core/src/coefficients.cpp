#include "pardyn/coefficients.hpp"

#include <fmt/format.h>

#include <cmath>

namespace pardyn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double CoefficientFn::operator()(const Sample& xi) const {
  if (kind == "const") return consts[0];
  if (kind == "xi") return consts[0] * xi[idx[0]];
  if (kind == "xi_affine") return consts[0] + consts[1] * xi[idx[0]];
  if (kind == "xi_product") return consts[0] * xi[idx[0]] * xi[idx[1]];
  throw ConfigError(fmt::format("unknown coefficient kind '{}'", kind));
}

void CoefficientFn::validate(std::size_t param_dim) const {
  std::size_t need_consts = 0, need_idx = 0;
  if (kind == "const") {
    need_consts = 1;
  } else if (kind == "xi") {
    need_consts = 1;
    need_idx = 1;
  } else if (kind == "xi_affine") {
    need_consts = 2;
    need_idx = 1;
  } else if (kind == "xi_product") {
    need_consts = 1;
    need_idx = 2;
  } else {
    throw ConfigError(fmt::format("unknown coefficient kind '{}'", kind));
  }
  if (consts.size() != need_consts || idx.size() != need_idx) {
    throw ConfigError(fmt::format("coefficient '{}' has malformed constants", kind));
  }
  for (double c : consts) {
    if (!std::isfinite(c)) throw ConfigError("coefficient constant not finite");
  }
  for (std::size_t i : idx) {
    if (i >= param_dim) {
      throw ConfigError(
          fmt::format("coefficient '{}' references parameter {} beyond dimension {}",
                      kind, i, param_dim));
    }
  }
}

CoefficientFn CoefficientFn::constant(double c) { return {"const", {c}, {}}; }
CoefficientFn CoefficientFn::xi(std::size_t i, double scale) {
  return {"xi", {scale}, {i}};
}
CoefficientFn CoefficientFn::xi_affine(double c0, double c1, std::size_t i) {
  return {"xi_affine", {c0, c1}, {i}};
}
CoefficientFn CoefficientFn::xi_product(std::size_t i, std::size_t j, double scale) {
  return {"xi_product", {scale}, {i, j}};
}

double SpatialFn::operator()(double x, double y) const {
  if (kind == "const") return consts[0];
  if (kind == "affine_x") return consts[0] + consts[1] * x;
  if (kind == "parabola") return consts[0] * x * (1.0 - x);
  if (kind == "sine") return consts[0] * std::sin(consts[1] * kPi * x);
  if (kind == "sinsin") return std::sin(x) * std::sin(y);
  if (kind == "sine_pair") {
    const double m = consts[1];
    return consts[0] * (std::sin(2.0 * kPi * m * x) + std::sin(2.0 * kPi * m * y));
  }
  if (kind == "well") return consts[0] * (x * x - x) * (y * y - y);
  if (kind == "nodal") {
    throw ConfigError("nodal spatial field has no pointwise closed form");
  }
  throw ConfigError(fmt::format("unknown spatial field kind '{}'", kind));
}

void SpatialFn::validate(int dim) const {
  const bool two_d = kind == "sinsin" || kind == "sine_pair" || kind == "well";
  const bool one_d = kind == "affine_x" || kind == "parabola" || kind == "sine";
  if (two_d && dim != 2) {
    throw ConfigError(fmt::format("spatial field '{}' requires a 2D domain", kind));
  }
  if (one_d && dim != 1) {
    throw ConfigError(fmt::format("spatial field '{}' requires a 1D domain", kind));
  }
  if (kind == "nodal" && nodal.empty()) {
    throw ConfigError("nodal spatial field without values");
  }
}

SpatialFn SpatialFn::constant(double c) { return {"const", {c}, {}}; }
SpatialFn SpatialFn::affine_x(double c0, double c1) { return {"affine_x", {c0, c1}, {}}; }
SpatialFn SpatialFn::parabola(double scale) { return {"parabola", {scale}, {}}; }
SpatialFn SpatialFn::sine(double scale, double freq) { return {"sine", {scale, freq}, {}}; }
SpatialFn SpatialFn::sinsin() { return {"sinsin", {}, {}}; }
SpatialFn SpatialFn::sine_pair(double scale, int m) {
  return {"sine_pair", {scale, static_cast<double>(m)}, {}};
}
SpatialFn SpatialFn::well(double scale) { return {"well", {scale}, {}}; }
SpatialFn SpatialFn::from_nodal(std::vector<double> values) {
  SpatialFn f{"nodal", {}, std::move(values)};
  return f;
}

}  // namespace pardyn
