// Model-container round-trip tests: binary fidelity of the payload arrays, JSON
// fidelity of the metadata, rejection of foreign or damaged files, and the
// standalone problem-definition JSON form.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "pardyn/model_io.hpp"
#include "pardyn/offline.hpp"
#include "pardyn/online.hpp"

namespace {

using namespace pardyn;

std::filesystem::path io_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "pardyn_model_io_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  REQUIRE(is.good());
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream os(p, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  REQUIRE(os.good());
}

bool exact_eq(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

ReducedModel trained_model() {
  const int nx = 16;
  const ParametricProblem p = testing::rank2(nx);
  const Discretization disc = build_discretization(p, nx);
  OfflineOptions opt;
  opt.n_max = 2;
  opt.jobs = 1;
  return run_offline(disc, TimeGrid{p.T, 25}, {{1.0}, {1.8}, {0.6}}, opt);
}

}  // namespace

TEST_CASE("model container round-trips every field") {
  const ReducedModel model = trained_model();
  const auto path = io_dir() / "roundtrip.pdyn";
  save_model(model, path.string());
  const ReducedModel loaded = load_model(path.string());

  CHECK(loaded.method == model.method);
  CHECK(loaded.grid.T == model.grid.T);
  CHECK(loaded.grid.steps == model.grid.steps);
  CHECK(loaded.mesh.dim == model.mesh.dim);
  CHECK(loaded.mesh.nx == model.mesh.nx);
  CHECK(loaded.mesh.ny == model.mesh.ny);
  CHECK(loaded.mesh.x0 == model.mesh.x0);
  CHECK(loaded.mesh.x1 == model.mesh.x1);

  REQUIRE(loaded.n_terms() == model.n_terms());
  for (int k = 0; k < model.n_terms(); ++k) {
    const SeparatedTerm& a = model.terms[static_cast<std::size_t>(k)];
    const SeparatedTerm& b = loaded.terms[static_cast<std::size_t>(k)];
    CHECK(b.anchor == a.anchor);
    CHECK(b.records == a.records);  // payload doubles are stored bit-exactly
    CHECK(b.g == a.g);
    CHECK(exact_eq(b.zeta0.w, a.zeta0.w));
    CHECK(exact_eq(b.zeta0.v, a.zeta0.v));
    CHECK(b.vs_nodes == a.vs_nodes);
    CHECK(b.vs_chosen == a.vs_chosen);
  }

  REQUIRE(loaded.trace.size() == model.trace.size());
  for (std::size_t i = 0; i < model.trace.size(); ++i) {
    CHECK(loaded.trace[i].term == model.trace[i].term);
    CHECK(loaded.trace[i].anchor == model.trace[i].anchor);
    CHECK(loaded.trace[i].indicator == model.trace[i].indicator);
    CHECK(loaded.trace[i].strategy == model.trace[i].strategy);
    CHECK(loaded.trace[i].elapsed_s == model.trace[i].elapsed_s);
  }

  // The problem definition (including nodal fields) survives unchanged.
  CHECK(problem_to_json_string(loaded.problem) == problem_to_json_string(model.problem));
}

TEST_CASE("stripped container still drives the mesh-free online stage") {
  const ReducedModel model = trained_model();
  const auto path = io_dir() / "stripped.pdyn";
  save_model(model, path.string(), /*strip_g=*/true);
  const ReducedModel loaded = load_model(path.string());

  CHECK_FALSE(loaded.has_g());
  const Sample xi{1.3};
  const OnlineEvaluation full = online_zetas(model, xi);
  const OnlineEvaluation lean = online_zetas(loaded, xi);
  REQUIRE(lean.zetas.rows() == full.zetas.rows());
  REQUIRE(lean.zetas.cols() == full.zetas.cols());
  CHECK((lean.zetas - full.zetas).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(reconstruct(loaded, lean.zetas, 0), FormatError);

  // Stripping reduces the file: the basis trajectories dominate the payload.
  CHECK(std::filesystem::file_size(path) <
        std::filesystem::file_size(io_dir() / "roundtrip.pdyn"));
}

TEST_CASE("loader rejects foreign and damaged files") {
  const ReducedModel model = trained_model();
  const auto path = io_dir() / "donor.pdyn";
  save_model(model, path.string());
  const std::string bytes = slurp(path);
  REQUIRE(bytes.size() > 16);

  // Wrong magic.
  {
    std::string bad = bytes;
    bad[0] = 'X';
    const auto p = io_dir() / "magic.pdyn";
    spit(p, bad);
    CHECK_THROWS_AS(load_model(p.string()), FormatError);
  }

  // Future major version: refused with a diagnostic of the header.
  {
    std::string bad = bytes;
    bad[4] = 2;  // little-endian u16 major at offset 4
    bad[5] = 0;
    const auto p = io_dir() / "future.pdyn";
    spit(p, bad);
    bool threw = false;
    try {
      load_model(p.string());
    } catch (const FormatError& e) {
      threw = true;
      CHECK(std::string(e.what()).find("newer than the supported") != std::string::npos);
    }
    CHECK(threw);
  }

  // Truncated payload.
  {
    const auto p = io_dir() / "short.pdyn";
    spit(p, bytes.substr(0, bytes.size() - 7));
    CHECK_THROWS_AS(load_model(p.string()), FormatError);
  }

  // Not a container at all.
  {
    const auto p = io_dir() / "not_a_model.pdyn";
    spit(p, "just some text");
    CHECK_THROWS_AS(load_model(p.string()), FormatError);
  }
  CHECK_THROWS_AS(load_model((io_dir() / "missing.pdyn").string()), FormatError);
}

TEST_CASE("static-baseline bookkeeping survives the container") {
  ReducedModel m;
  m.problem = testing::forcing_only();
  m.grid = {1.0, 10};
  m.mesh.dim = 1;
  m.mesh.nx = 4;
  m.method = "vs";
  SeparatedTerm t;
  t.anchor = {1.25};
  t.records = {2.0, 1.0, 2.0, 1.0, 3.5};
  t.vs_nodes = {3};
  t.vs_chosen = 0;
  m.terms.push_back(t);

  const auto path = io_dir() / "static.pdyn";
  save_model(m, path.string());
  const ReducedModel loaded = load_model(path.string());
  CHECK(loaded.method == "vs");
  REQUIRE(loaded.n_terms() == 1);
  CHECK(loaded.terms[0].anchor == t.anchor);
  CHECK(loaded.terms[0].records == t.records);
  CHECK(loaded.terms[0].vs_nodes == t.vs_nodes);
  CHECK(loaded.terms[0].vs_chosen == 0);
  CHECK_FALSE(loaded.has_g());
}

TEST_CASE("problem definitions round-trip through standalone JSON") {
  for (const ParametricProblem& p :
       {testing::rank2(12), testing::burgers_small(), testing::cubic_small()}) {
    const std::string s = problem_to_json_string(p);
    const ParametricProblem q = problem_from_json_string(s);
    CHECK(problem_to_json_string(q) == s);

    // The re-hydrated coefficient closures match the originals numerically.
    Sample mid(p.box.dim(), 0.0);
    for (std::size_t d = 0; d < p.box.dim(); ++d) {
      mid[d] = 0.5 * (p.box.lo[d] + p.box.hi[d]);
    }
    const CoefficientValues a = evaluate_coefficients(p, mid);
    const CoefficientValues b = evaluate_coefficients(q, mid);
    CHECK(a.kA == b.kA);
    CHECK(a.kC == b.kC);
    CHECK(a.kH == b.kH);
  }

  CHECK_THROWS_AS(problem_from_json_string("{\"name\": 12}"), FormatError);
  CHECK_THROWS_AS(problem_from_json_string("not json"), FormatError);
}

TEST_CASE("manifest text summarizes the model") {
  const ReducedModel model = trained_model();
  const std::string s = model_manifest_string(model);
  CHECK(s.find("dvs") != std::string::npos);
  CHECK(s.find("rank2") != std::string::npos);
  CHECK(s.find("term") != std::string::npos);
  CHECK(s.find("steps=25") != std::string::npos);

  const auto path = io_dir() / "manifest.txt";
  write_model_manifest(model, path.string());
  CHECK(slurp(path) == s);
}
