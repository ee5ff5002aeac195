#include "pardyn/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "pardyn/csv.hpp"

namespace pardyn {

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

namespace {

using nlohmann::json;

constexpr std::uint16_t kMajor = 1;
constexpr std::uint16_t kMinor = 0;
constexpr std::uint32_t kFlagHasG = 1u;

// ---------------------------------------------------------------------------
// payload bookkeeping

struct PayloadBuilder {
  std::vector<double> data;
  json dir = json::array();

  json add(const std::string& name, const double* p, std::size_t n) {
    dir.push_back({{"name", name}, {"offset", data.size()}, {"count", n}});
    if (n > 0) data.insert(data.end(), p, p + n);
    return json{{"payload", name}};
  }
};

class PayloadReader {
 public:
  PayloadReader(const std::vector<double>& data, const json& dir) : data_(data) {
    for (const auto& e : dir) {
      const auto name = e.at("name").get<std::string>();
      const auto offset = e.at("offset").get<std::size_t>();
      const auto count = e.at("count").get<std::size_t>();
      if (offset + count > data_.size())
        throw FormatError(fmt::format(
            "payload entry '{}' ([{}, {})) exceeds the stored payload of {} values",
            name, offset, offset + count, data_.size()));
      entries_[name] = {offset, count};
    }
  }

  std::vector<double> fetch(const std::string& name) const {
    auto it = entries_.find(name);
    if (it == entries_.end())
      throw FormatError(fmt::format("payload entry '{}' missing from directory", name));
    const auto [offset, count] = it->second;
    return {data_.begin() + static_cast<std::ptrdiff_t>(offset),
            data_.begin() + static_cast<std::ptrdiff_t>(offset + count)};
  }

  std::vector<double> fetch_ref(const json& ref) const {
    return fetch(ref.at("payload").get<std::string>());
  }

 private:
  const std::vector<double>& data_;
  std::map<std::string, std::pair<std::size_t, std::size_t>> entries_;
};

Vector to_eigen(const std::vector<double>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

// ---------------------------------------------------------------------------
// problem <-> JSON

json coef_to_json(const CoefficientFn& c) {
  return json{{"kind", c.kind}, {"consts", c.consts}, {"idx", c.idx}};
}

CoefficientFn coef_from_json(const json& j) {
  CoefficientFn c;
  c.kind = j.at("kind").get<std::string>();
  c.consts = j.value("consts", std::vector<double>{});
  c.idx = j.value("idx", std::vector<std::size_t>{});
  return c;
}

json field_to_json(const SpatialFn& f, PayloadBuilder* payload, const std::string& name) {
  json j{{"kind", f.kind}, {"consts", f.consts}};
  if (f.is_nodal()) {
    j["nodal"] = payload ? payload->add(name, f.nodal.data(), f.nodal.size())
                         : json(f.nodal);
  }
  return j;
}

SpatialFn field_from_json(const json& j, const PayloadReader* payload) {
  SpatialFn f;
  f.kind = j.at("kind").get<std::string>();
  f.consts = j.value("consts", std::vector<double>{});
  if (j.contains("nodal")) {
    const json& n = j.at("nodal");
    if (n.is_array()) {
      f.nodal = n.get<std::vector<double>>();
    } else if (payload) {
      f.nodal = payload->fetch_ref(n);
    } else {
      throw FormatError("nodal field references a payload, but none is available");
    }
  }
  return f;
}

std::string op_name(LinearOp op) {
  return op == LinearOp::Laplacian ? "laplacian" : "identity";
}

LinearOp op_from_name(const std::string& s) {
  if (s == "laplacian") return LinearOp::Laplacian;
  if (s == "identity") return LinearOp::Identity;
  throw FormatError(fmt::format("unknown linear operator '{}'", s));
}

std::string nonlinear_name(NonlinearKind k) {
  return k == NonlinearKind::Convection ? "convection" : "cubic";
}

NonlinearKind nonlinear_from_name(const std::string& s) {
  if (s == "convection") return NonlinearKind::Convection;
  if (s == "cubic") return NonlinearKind::Cubic;
  throw FormatError(fmt::format("unknown nonlinear term '{}'", s));
}

json problem_to_json(const ParametricProblem& p, PayloadBuilder* payload) {
  json j;
  j["name"] = p.name;
  j["dim"] = p.dim;
  j["xlim"] = {p.xlim[0], p.xlim[1]};
  j["ylim"] = {p.ylim[0], p.ylim[1]};
  j["T"] = p.T;
  j["box"] = {{"lo", p.box.lo}, {"hi", p.box.hi}};

  json cc = json::array();
  for (std::size_t i = 0; i < p.C.size(); ++i)
    cc.push_back({{"field", field_to_json(p.C[i].field, payload,
                                          fmt::format("problem.C{}.field", i))},
                  {"coef", coef_to_json(p.C[i].coef)}});
  j["C"] = std::move(cc);

  json aa = json::array();
  for (const auto& t : p.A)
    aa.push_back({{"op", op_name(t.op)}, {"coef", coef_to_json(t.coef)}});
  j["A"] = std::move(aa);

  json hh = json::array();
  for (const auto& t : p.H)
    hh.push_back({{"kind", nonlinear_name(t.kind)},
                  {"sign", t.sign},
                  {"coef", coef_to_json(t.coef)}});
  j["H"] = std::move(hh);

  json init = json::array();
  for (std::size_t i = 0; i < p.initial.size(); ++i)
    init.push_back({{"p", coef_to_json(p.initial[i].p)},
                    {"q", field_to_json(p.initial[i].q, payload,
                                        fmt::format("problem.init{}.q", i))}});
  j["initial"] = std::move(init);

  json lift = json::array();
  for (std::size_t i = 0; i < p.lifting.size(); ++i)
    lift.push_back({{"field", field_to_json(p.lifting[i].field, payload,
                                            fmt::format("problem.lift{}.field", i))},
                    {"coef", coef_to_json(p.lifting[i].coef)}});
  j["lifting"] = std::move(lift);
  return j;
}

// Hand-written configs may omit whole sections; absent sections mean "none" and
// absent geometry falls back to the unit interval/square.
ParametricProblem problem_from_json(const json& j, const PayloadReader* payload) {
  ParametricProblem p;
  p.name = j.value("name", std::string("problem"));
  p.dim = j.at("dim").get<int>();
  if (j.contains("xlim"))
    p.xlim = {j.at("xlim").at(0).get<double>(), j.at("xlim").at(1).get<double>()};
  if (j.contains("ylim"))
    p.ylim = {j.at("ylim").at(0).get<double>(), j.at("ylim").at(1).get<double>()};
  p.T = j.at("T").get<double>();
  p.box.lo = j.at("box").at("lo").get<std::vector<double>>();
  p.box.hi = j.at("box").at("hi").get<std::vector<double>>();

  if (j.contains("C"))
    for (const auto& t : j.at("C"))
      p.C.push_back(
          {field_from_json(t.at("field"), payload), coef_from_json(t.at("coef"))});
  if (j.contains("A"))
    for (const auto& t : j.at("A"))
      p.A.push_back({op_from_name(t.at("op").get<std::string>()),
                     coef_from_json(t.at("coef"))});
  if (j.contains("H"))
    for (const auto& t : j.at("H"))
      p.H.push_back({nonlinear_from_name(t.at("kind").get<std::string>()),
                     t.at("sign").get<double>(), coef_from_json(t.at("coef"))});
  if (j.contains("initial"))
    for (const auto& t : j.at("initial"))
      p.initial.push_back({coef_from_json(t.at("p")), field_from_json(t.at("q"), payload)});
  if (j.contains("lifting"))
    for (const auto& t : j.at("lifting"))
      p.lifting.push_back(
          {field_from_json(t.at("field"), payload), coef_from_json(t.at("coef"))});
  validate_problem(p);
  return p;
}

// ---------------------------------------------------------------------------
// model <-> JSON

json model_to_json(const ReducedModel& m, bool strip_g, PayloadBuilder& payload) {
  json j;
  j["method"] = m.method;
  j["grid"] = {{"T", m.grid.T}, {"steps", m.grid.steps}};
  j["mesh"] = {{"dim", m.mesh.dim}, {"nx", m.mesh.nx},   {"ny", m.mesh.ny},
               {"x0", m.mesh.x0},   {"x1", m.mesh.x1},   {"y0", m.mesh.y0},
               {"y1", m.mesh.y1}};
  j["problem"] = problem_to_json(m.problem, &payload);

  json terms = json::array();
  for (std::size_t i = 0; i < m.terms.size(); ++i) {
    const SeparatedTerm& t = m.terms[i];
    json tj;
    tj["anchor"] = t.anchor;
    tj["records"] =
        payload.add(fmt::format("term{}.records", i), t.records.data(), t.records.size());
    if (!strip_g && !t.g.empty())
      tj["g"] = payload.add(fmt::format("term{}.g", i), t.g.data(), t.g.size());
    tj["zeta0_w"] = payload.add(fmt::format("term{}.zeta0.w", i), t.zeta0.w.data(),
                                static_cast<std::size_t>(t.zeta0.w.size()));
    tj["zeta0_v"] = payload.add(fmt::format("term{}.zeta0.v", i), t.zeta0.v.data(),
                                static_cast<std::size_t>(t.zeta0.v.size()));
    if (!t.vs_nodes.empty()) {
      tj["vs_nodes"] = t.vs_nodes;
      tj["vs_chosen"] = t.vs_chosen;
    }
    terms.push_back(std::move(tj));
  }
  j["terms"] = std::move(terms);

  json trace = json::array();
  for (const auto& s : m.trace)
    trace.push_back({{"term", s.term},
                     {"anchor", s.anchor},
                     {"indicator", s.indicator},
                     {"strategy", s.strategy},
                     {"elapsed_s", s.elapsed_s}});
  j["trace"] = std::move(trace);
  return j;
}

ReducedModel model_from_json(const json& j, const PayloadReader& payload) {
  ReducedModel m;
  m.method = j.at("method").get<std::string>();
  m.grid.T = j.at("grid").at("T").get<double>();
  m.grid.steps = j.at("grid").at("steps").get<int>();
  const json& mesh = j.at("mesh");
  m.mesh.dim = mesh.at("dim").get<int>();
  m.mesh.nx = mesh.at("nx").get<int>();
  m.mesh.ny = mesh.at("ny").get<int>();
  m.mesh.x0 = mesh.at("x0").get<double>();
  m.mesh.x1 = mesh.at("x1").get<double>();
  m.mesh.y0 = mesh.at("y0").get<double>();
  m.mesh.y1 = mesh.at("y1").get<double>();
  if (m.grid.steps < 1 || !(m.grid.T > 0.0))
    throw FormatError("container time grid is invalid");
  if (m.mesh.dim < 1 || m.mesh.dim > 2 || m.mesh.nx < 1 ||
      (m.mesh.dim == 2 && m.mesh.ny < 1))
    throw FormatError("container mesh is invalid");
  m.problem = problem_from_json(j.at("problem"), &payload);

  for (const auto& tj : j.at("terms")) {
    SeparatedTerm t;
    t.anchor = tj.at("anchor").get<Sample>();
    t.records = payload.fetch_ref(tj.at("records"));
    if (tj.contains("g")) t.g = payload.fetch_ref(tj.at("g"));
    t.zeta0.w = to_eigen(payload.fetch_ref(tj.at("zeta0_w")));
    t.zeta0.v = to_eigen(payload.fetch_ref(tj.at("zeta0_v")));
    if (tj.contains("vs_nodes")) {
      t.vs_nodes = tj.at("vs_nodes").get<std::vector<int>>();
      t.vs_chosen = tj.at("vs_chosen").get<int>();
    }
    m.terms.push_back(std::move(t));
  }
  for (const auto& sj : j.at("trace")) {
    GreedyStep s;
    s.term = sj.at("term").get<int>();
    s.anchor = sj.at("anchor").get<Sample>();
    s.indicator = sj.at("indicator").get<double>();
    s.strategy = sj.at("strategy").get<std::string>();
    s.elapsed_s = sj.at("elapsed_s").get<double>();
    m.trace.push_back(std::move(s));
  }
  return m;
}

// ---------------------------------------------------------------------------
// little-endian stream helpers

void put_bytes(std::ostream& os, std::uint64_t v, int n) {
  for (int i = 0; i < n; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_bytes(std::istream& is, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) return v;
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void save_model(const ReducedModel& model, const std::string& path, bool strip_g) {
  PayloadBuilder payload;
  json j;
  try {
    j = model_to_json(model, strip_g, payload);
    j["payload"] = std::move(payload.dir);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("cannot serialize model: {}", e.what()));
  }
  const std::string meta = j.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError(fmt::format("cannot open '{}' for writing", path));
  os.write("PDYN", 4);
  put_bytes(os, kMajor, 2);
  put_bytes(os, kMinor, 2);
  std::uint32_t flags = 0;
  if (!strip_g && model.has_g() && !model.terms.empty()) flags |= kFlagHasG;
  put_bytes(os, flags, 4);
  put_bytes(os, meta.size(), 8);
  os.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  os.write(reinterpret_cast<const char*>(payload.data.data()),
           static_cast<std::streamsize>(payload.data.size() * sizeof(double)));
  if (!os) throw FormatError(fmt::format("failed writing '{}'", path));
}

ReducedModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(fmt::format("cannot open '{}'", path));
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "PDYN", 4) != 0)
    throw FormatError(fmt::format("'{}' is not a model container (bad magic)", path));
  const auto major = static_cast<std::uint16_t>(get_bytes(is, 2));
  const auto minor = static_cast<std::uint16_t>(get_bytes(is, 2));
  const auto flags = static_cast<std::uint32_t>(get_bytes(is, 4));
  const std::uint64_t json_len = get_bytes(is, 8);
  if (!is) throw FormatError(fmt::format("'{}': truncated container header", path));
  if (major > kMajor)
    throw FormatError(fmt::format(
        "'{}': container format {}.{} is newer than the supported {}.{} "
        "(header: flags={:#x}, metadata bytes={})",
        path, major, minor, kMajor, kMinor, flags, json_len));
  if (json_len > (1ull << 31))
    throw FormatError(fmt::format("'{}': implausible metadata length {}", path, json_len));

  std::string meta(static_cast<std::size_t>(json_len), '\0');
  is.read(meta.data(), static_cast<std::streamsize>(json_len));
  if (!is) throw FormatError(fmt::format("'{}': truncated container metadata", path));

  std::vector<char> rest((std::istreambuf_iterator<char>(is)),
                         std::istreambuf_iterator<char>());
  if (rest.size() % sizeof(double) != 0)
    throw FormatError(
        fmt::format("'{}': payload is not a whole number of float64 values", path));
  std::vector<double> data(rest.size() / sizeof(double));
  if (!rest.empty()) std::memcpy(data.data(), rest.data(), rest.size());

  try {
    const json j = json::parse(meta);
    PayloadReader payload(data, j.at("payload"));
    return model_from_json(j, payload);
  } catch (const FormatError&) {
    throw;
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}': invalid container metadata: {}", path, e.what()));
  }
}

std::string model_manifest_string(const ReducedModel& model) {
  std::ostringstream os;
  os << "model container summary\n";
  os << fmt::format("method: {}\n", model.method);
  os << fmt::format("problem: {} (dim {}, {} parameters)\n", model.problem.name,
                    model.problem.dim, model.problem.box.dim());
  os << fmt::format("time grid: T={:g}, steps={}, tau={}\n", model.grid.T,
                    model.grid.steps, format_sci(model.grid.tau()));
  if (model.mesh.dim == 2)
    os << fmt::format("mesh: dim=2, nx={}, ny={} ({} nodes)\n", model.mesh.nx,
                      model.mesh.ny, model.mesh.n_nodes());
  else
    os << fmt::format("mesh: dim=1, nx={} ({} nodes)\n", model.mesh.nx,
                      model.mesh.n_nodes());
  os << fmt::format("terms: {} (basis trajectories: {})\n", model.n_terms(),
                    model.has_g() ? "yes" : "no");
  for (std::size_t i = 0; i < model.terms.size(); ++i) {
    const SeparatedTerm& t = model.terms[i];
    os << fmt::format("  term {}: anchor=({})", i + 1, fmt::join(t.anchor, ", "));
    os << fmt::format(", records={}, g values={}, zeta0 w/v sizes={}/{}",
                      t.records.size(), t.g.size(), t.zeta0.w.size(), t.zeta0.v.size());
    if (!t.vs_nodes.empty())
      os << fmt::format(", candidate nodes=({}), chosen={}",
                        fmt::join(t.vs_nodes, ", "), t.vs_chosen);
    os << '\n';
  }
  os << "trace:\n";
  for (const auto& s : model.trace)
    os << fmt::format("  k={} anchor=({}) indicator={} strategy={} elapsed_s={:.3f}\n",
                      s.term, fmt::join(s.anchor, ", "), format_sci(s.indicator),
                      s.strategy, s.elapsed_s);
  return os.str();
}

void write_model_manifest(const ReducedModel& model, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError(fmt::format("cannot open '{}' for writing", path));
  const std::string body = model_manifest_string(model);
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!file) throw FormatError(fmt::format("failed writing '{}'", path));
}

std::string problem_to_json_string(const ParametricProblem& problem, int indent) {
  try {
    return problem_to_json(problem, nullptr).dump(indent);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("cannot serialize problem: {}", e.what()));
  }
}

ParametricProblem problem_from_json_string(const std::string& text) {
  try {
    return problem_from_json(json::parse(text), nullptr);
  } catch (const FormatError&) {
    throw;
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("invalid problem definition: {}", e.what()));
  }
}

}  // namespace pardyn
