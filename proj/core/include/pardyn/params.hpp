#pragma once

#include "pardyn/common.hpp"

namespace pardyn {

using Sample = std::vector<double>;

// Axis-aligned box of admissible parameter vectors.
struct ParameterBox {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  bool contains(const Sample& xi, double slack = 0.0) const;
  void validate() const;  // throws ConfigError on empty/inverted axes
};

enum class SamplingScheme { Uniform, LatinHypercube };

// Counter-based deterministic generator: every drawn value is a pure function of
// (seed, sample index, axis), so sample sets are reproducible across platforms and
// independent of draw order. Used for training sets, test sets, and every other
// randomized choice in the library.
std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t index, std::uint64_t axis);
double unit_double(std::uint64_t bits);  // maps 64 random bits into [0,1)

std::vector<Sample> sample_parameters(const ParameterBox& box, std::size_t count,
                                      std::uint64_t seed,
                                      SamplingScheme scheme = SamplingScheme::Uniform);

// Uniform integer in [0, n) from the same counter-based stream.
std::uint64_t sample_index(std::uint64_t seed, std::uint64_t counter, std::uint64_t n);

}  // namespace pardyn
