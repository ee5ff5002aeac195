#include "pardyn/params.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace pardyn {

bool ParameterBox::contains(const Sample& xi, double slack) const {
  if (xi.size() != dim()) return false;
  for (std::size_t d = 0; d < dim(); ++d) {
    if (xi[d] < lo[d] - slack || xi[d] > hi[d] + slack) return false;
  }
  return true;
}

void ParameterBox::validate() const {
  if (lo.empty() || lo.size() != hi.size()) {
    throw ConfigError("parameter box must have matching, non-empty bounds");
  }
  for (std::size_t d = 0; d < dim(); ++d) {
    if (!(lo[d] <= hi[d]) || !std::isfinite(lo[d]) || !std::isfinite(hi[d])) {
      throw ConfigError(fmt::format("parameter box axis {} has invalid bounds [{}, {}]",
                                    d, lo[d], hi[d]));
    }
  }
}

namespace {

// splitmix64 finalizer: full-avalanche mix of a 64-bit counter.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t index, std::uint64_t axis) {
  return mix64(mix64(mix64(seed) ^ index) ^ (0xd1342543de82ef95ULL * (axis + 1)));
}

double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

std::uint64_t sample_index(std::uint64_t seed, std::uint64_t counter, std::uint64_t n) {
  if (n == 0) throw ConfigError("sample_index: empty range");
  return hash_counter(seed, counter, 0) % n;
}

std::vector<Sample> sample_parameters(const ParameterBox& box, std::size_t count,
                                      std::uint64_t seed, SamplingScheme scheme) {
  box.validate();
  const std::size_t d = box.dim();
  std::vector<Sample> out(count, Sample(d, 0.0));

  if (scheme == SamplingScheme::Uniform) {
    for (std::size_t i = 0; i < count; ++i) {
      for (std::size_t a = 0; a < d; ++a) {
        const double u = unit_double(hash_counter(seed, i, a));
        out[i][a] = box.lo[a] + (box.hi[a] - box.lo[a]) * u;
      }
    }
    return out;
  }

  // Latin hypercube: per axis, one jittered point per stratum, with a seeded
  // Fisher-Yates shuffle of stratum assignments.
  for (std::size_t a = 0; a < d; ++a) {
    std::vector<std::size_t> perm(count);
    for (std::size_t i = 0; i < count; ++i) perm[i] = i;
    for (std::size_t i = count; i > 1; --i) {
      const std::size_t j = hash_counter(seed ^ 0xabcdef12ULL, i, a) % i;
      std::swap(perm[i - 1], perm[j]);
    }
    for (std::size_t i = 0; i < count; ++i) {
      const double u =
          (static_cast<double>(perm[i]) + unit_double(hash_counter(seed, i, a))) /
          static_cast<double>(count);
      out[i][a] = box.lo[a] + (box.hi[a] - box.lo[a]) * u;
    }
  }
  return out;
}

}  // namespace pardyn
