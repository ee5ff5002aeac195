#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pardyn/params.hpp"
#include "pardyn/problem.hpp"
#include "pardyn/benchmarks.hpp"

using namespace pardyn;

TEST_CASE("counter-based sampling is reproducible and order-independent") {
  ParameterBox box{{0.0, -1.0, 2.0}, {1.0, 1.0, 5.0}};
  const auto a = sample_parameters(box, 20, 7);
  const auto b = sample_parameters(box, 20, 7);
  REQUIRE(a.size() == 20);
  CHECK(a == b);

  // A prefix draw equals the prefix of a longer draw (pure function of the counter).
  const auto c = sample_parameters(box, 5, 7);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == a[i]);

  const auto d = sample_parameters(box, 20, 8);
  CHECK(a != d);

  for (const auto& s : a) {
    REQUIRE(s.size() == 3);
    for (std::size_t ax = 0; ax < 3; ++ax) {
      CHECK(s[ax] >= box.lo[ax]);
      CHECK(s[ax] < box.hi[ax]);
    }
  }
}

TEST_CASE("latin hypercube sampling stratifies every axis") {
  ParameterBox box{{0.0, 10.0}, {1.0, 20.0}};
  const std::size_t m = 16;
  const auto s = sample_parameters(box, m, 3, SamplingScheme::LatinHypercube);
  REQUIRE(s.size() == m);
  for (std::size_t ax = 0; ax < 2; ++ax) {
    std::vector<int> strata;
    for (const auto& xi : s) {
      const double u = (xi[ax] - box.lo[ax]) / (box.hi[ax] - box.lo[ax]);
      strata.push_back(static_cast<int>(std::floor(u * static_cast<double>(m))));
    }
    std::sort(strata.begin(), strata.end());
    for (std::size_t i = 0; i < m; ++i) CHECK(strata[i] == static_cast<int>(i));
  }
}

TEST_CASE("unit_double maps into [0,1) and hash_counter separates axes") {
  CHECK(unit_double(0) >= 0.0);
  CHECK(unit_double(~0ull) < 1.0);
  CHECK(hash_counter(1, 2, 3) != hash_counter(1, 2, 4));
  CHECK(hash_counter(1, 2, 3) != hash_counter(1, 3, 3));
  CHECK(hash_counter(1, 2, 3) != hash_counter(2, 2, 3));
  CHECK(hash_counter(1, 2, 3) == hash_counter(1, 2, 3));
}

TEST_CASE("sample_index stays in range and is deterministic") {
  for (std::uint64_t n : {1ull, 2ull, 7ull, 1000ull}) {
    for (std::uint64_t c = 0; c < 50; ++c) {
      const auto v = sample_index(99, c, n);
      CHECK(v < n);
      CHECK(v == sample_index(99, c, n));
    }
  }
}

TEST_CASE("coefficient closures evaluate their stored closed forms") {
  // Every registered benchmark's coefficient table, evaluated against the
  // closed forms at random samples.
  for (const auto& id : benchmark_ids()) {
    const BenchmarkSpec spec = benchmark_spec(id);
    const auto samples = sample_parameters(spec.problem.box, 100, 11);
    for (const auto& xi : samples) {
      const CoefficientValues v = evaluate_coefficients(spec.problem, xi);
      REQUIRE(v.kC.size() == spec.problem.C.size());
      REQUIRE(v.kA.size() == spec.problem.A.size());
      REQUIRE(v.kH.size() == spec.problem.H.size());
      auto eval = [&xi](const CoefficientFn& f) {
        if (f.kind == "const") return f.consts[0];
        if (f.kind == "xi") return f.consts[0] * xi[f.idx[0]];
        if (f.kind == "xi_affine") return f.consts[0] + f.consts[1] * xi[f.idx[0]];
        if (f.kind == "xi_product") return f.consts[0] * xi[f.idx[0]] * xi[f.idx[1]];
        FAIL("unknown coefficient kind ", f.kind);
        return 0.0;
      };
      for (std::size_t i = 0; i < spec.problem.C.size(); ++i)
        CHECK(v.kC[i] == doctest::Approx(eval(spec.problem.C[i].coef)).epsilon(1e-15));
      for (std::size_t i = 0; i < spec.problem.A.size(); ++i)
        CHECK(v.kA[i] == doctest::Approx(eval(spec.problem.A[i].coef)).epsilon(1e-15));
      for (std::size_t i = 0; i < spec.problem.H.size(); ++i)
        CHECK(v.kH[i] == doctest::Approx(eval(spec.problem.H[i].coef)).epsilon(1e-15));
    }
  }
}

TEST_CASE("out-of-box and wrong-dimension samples are rejected") {
  const BenchmarkSpec spec = benchmark_spec("heat2d");
  Sample xi(spec.problem.box.dim());
  for (std::size_t i = 0; i < xi.size(); ++i)
    xi[i] = 0.5 * (spec.problem.box.lo[i] + spec.problem.box.hi[i]);
  CHECK_NOTHROW(evaluate_coefficients(spec.problem, xi));
  // wrong dimension
  Sample bad(spec.problem.box.dim() + 1, 1.0);
  CHECK_THROWS_AS(evaluate_coefficients(spec.problem, bad), ConfigError);
  // far outside the box
  Sample outside = xi;
  outside[0] = 1e9;
  CHECK_THROWS_AS(evaluate_coefficients(spec.problem, outside), ConfigError);
}
