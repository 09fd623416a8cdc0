#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <set>
#include <type_traits>
#include <variant>

#include "exinf/error.hpp"

namespace exinf::app {

namespace {

constexpr double kNormWarn = 1e-10;
constexpr double kNormReject = 1e-6;

std::string where(const YAML::Mark& mark) {
  if (mark.is_null()) return {};
  return "line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// A mapping node plus its dotted path; every lookup is checked against the
// keys the caller declared, and anything else in the document is an error.
class Section {
 public:
  Section(YAML::Node node, std::string path, std::set<std::string> allowed)
      : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail("", "expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) {
        throw ConfigError(join(path_, key), where(kv.first.Mark()), "unknown key");
      }
    }
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
  YAML::Node raw(const std::string& key) const { return node_[key]; }
  std::string path(const std::string& key) const { return join(path_, key); }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const YAML::Node n = key.empty() ? node_ : node_[key];
    throw ConfigError(key.empty() ? path_ : join(path_, key), n ? where(n.Mark()) : where(node_.Mark()),
                      message);
  }

  YAML::Node required(const std::string& key) const {
    if (!has(key)) fail("", "missing required key '" + key + "'");
    return node_[key];
  }

  Section section(const std::string& key, std::set<std::string> allowed) const {
    return Section(required(key), path(key), std::move(allowed));
  }

  double real(const std::string& key, std::optional<double> fallback = {}) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      required(key);
    }
    const YAML::Node n = node_[key];
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v)) fail(key, "expected a real number");
    if (!std::isfinite(v)) fail(key, "must be finite");
    return v;
  }

  double positive(const std::string& key, std::optional<double> fallback = {}) const {
    const double v = real(key, fallback);
    if (!(v > 0.0)) fail(key, "must be > 0");
    return v;
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> fallback = {}) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      required(key);
    }
    const YAML::Node n = node_[key];
    long long v = 0;
    if (!n.IsScalar() || !YAML::convert<long long>::decode(n, v)) fail(key, "expected an integer");
    return v;
  }

  std::uint64_t count(const std::string& key, std::optional<std::int64_t> fallback = {},
                      std::int64_t minimum = 1) const {
    const auto v = integer(key, fallback);
    if (v < minimum) fail(key, "must be >= " + std::to_string(minimum));
    return static_cast<std::uint64_t>(v);
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const YAML::Node n = node_[key];
    unsigned long long v = 0;
    if (!n.IsScalar() || !YAML::convert<unsigned long long>::decode(n, v)) {
      fail(key, "expected a non-negative integer");
    }
    return v;
  }

  std::string word(const std::string& key, std::optional<std::string> fallback = {}) const {
    if (!has(key)) {
      if (fallback) return *fallback;
      required(key);
    }
    const YAML::Node n = node_[key];
    if (!n.IsScalar()) fail(key, "expected a string");
    return n.Scalar();
  }

  // A real number, or a two-element [re, im] sequence.
  Complex complex(const YAML::Node& n, const std::string& field) const {
    double re = 0.0;
    double im = 0.0;
    if (n.IsScalar() && YAML::convert<double>::decode(n, re)) return {re, im};
    if (n.IsSequence() && n.size() == 2 && YAML::convert<double>::decode(n[0], re) &&
        YAML::convert<double>::decode(n[1], im)) {
      return {re, im};
    }
    throw ConfigError(field, where(n.Mark()), "expected a real number or [re, im]");
  }

 private:
  YAML::Node node_;
  std::string path_;
};

Grid read_grid(const Section& top) {
  const Section s = top.section("grid", {"q_min", "q_max", "n", "boundary"});
  const double q_min = s.real("q_min");
  const double q_max = s.real("q_max");
  if (!(q_max > q_min)) s.fail("q_max", "must be greater than q_min");
  const auto n = s.count("n", {}, 3);
  const std::string b = s.word("boundary", "dirichlet");
  Boundary boundary = Boundary::dirichlet;
  if (b == "periodic") {
    boundary = Boundary::periodic;
  } else if (b != "dirichlet") {
    s.fail("boundary", "must be 'dirichlet' or 'periodic'");
  }
  return Grid(q_min, q_max, n, boundary);
}

Potential read_potential(const Section& top, const Grid& grid) {
  const YAML::Node node = top.required("potential");
  if (!node.IsMap() || !node["kind"]) {
    throw ConfigError("potential", where(node.Mark()), "expected a mapping with a 'kind'");
  }
  const std::string kind = node["kind"].IsScalar() ? node["kind"].Scalar() : "";
  if (kind == "free") {
    Section(node, "potential", {"kind"});
    return Potential::free();
  }
  if (kind == "harmonic") {
    const Section s(node, "potential", {"kind", "omega"});
    return Potential::harmonic(s.positive("omega"));
  }
  if (kind == "barrier") {
    const Section s(node, "potential", {"kind", "height", "q_lo", "q_hi"});
    const double lo = s.real("q_lo");
    const double hi = s.real("q_hi");
    if (!(hi > lo)) s.fail("q_hi", "must be greater than q_lo");
    return Potential::barrier(s.real("height"), lo, hi);
  }
  if (kind == "tabulated") {
    const Section s(node, "potential", {"kind", "values"});
    const YAML::Node values = s.required("values");
    if (!values.IsSequence()) s.fail("values", "expected a sequence of reals");
    std::vector<double> v;
    for (std::size_t i = 0; i < values.size(); ++i) {
      double x = 0.0;
      if (!values[i].IsScalar() || !YAML::convert<double>::decode(values[i], x) || !std::isfinite(x)) {
        throw ConfigError("potential.values[" + std::to_string(i) + "]", where(values[i].Mark()),
                          "expected a finite real number");
      }
      v.push_back(x);
    }
    if (v.size() != grid.size()) {
      s.fail("values", "has " + std::to_string(v.size()) + " entries, grid has " +
                           std::to_string(grid.size()) + " samples");
    }
    return Potential::tabulated(std::move(v));
  }
  throw ConfigError("potential.kind", where(node["kind"].Mark()),
                    "must be one of free, harmonic, barrier, tabulated");
}

// Unit-normalizes `c` in place: silently within 1e-10, with a warning up to
// 1e-6, otherwise a ConfigError on `field`.
void normalize_weights(std::vector<Complex*> c, const std::string& field, const YAML::Mark& mark,
                       std::vector<std::string>& warnings) {
  double total = 0.0;
  for (const Complex* x : c) total += std::norm(*x);
  const double dev = std::abs(total - 1.0);
  if (dev > kNormReject || !(total > 0.0)) {
    throw ConfigError(field, where(mark),
                      "squared magnitudes must sum to 1 (deviation " + std::to_string(dev) + ")");
  }
  if (dev > kNormWarn) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: squared magnitudes sum to %.12g; renormalized", field.c_str(), total);
    warnings.emplace_back(buf);
  }
  if (dev > 0.0) {
    const double s = 1.0 / std::sqrt(total);
    for (Complex* x : c) *x *= s;
  }
}

EigensolverOptions read_eigensolver(const Section& top) {
  EigensolverOptions o;
  if (!top.has("eigensolver")) return o;
  const Section s = top.section("eigensolver", {"residual_tolerance", "degeneracy_tolerance"});
  o.residual_tolerance = s.positive("residual_tolerance", o.residual_tolerance);
  o.degeneracy_tolerance = s.positive("degeneracy_tolerance", o.degeneracy_tolerance);
  return o;
}

VariationalOptions read_variational(const Section& top) {
  VariationalOptions o;
  if (!top.has("variational")) return o;
  const Section s = top.section("variational", {"step", "max_iters", "tol", "scheme"});
  o.step = s.positive("step", o.step);
  o.max_iters = s.count("max_iters", static_cast<std::int64_t>(o.max_iters));
  o.tol = s.positive("tol", o.tol);
  const std::string scheme = s.word("scheme", "locally_optimal");
  if (scheme == "projected_gradient") {
    o.scheme = VariationalScheme::projected_gradient;
  } else if (scheme == "locally_optimal") {
    o.scheme = VariationalScheme::locally_optimal;
  } else {
    s.fail("scheme", "must be 'projected_gradient' or 'locally_optimal'");
  }
  return o;
}

SlitConfig read_slits(const Section& top, std::vector<std::string>& warnings) {
  const Section s = top.section("slits", {"separation", "screen_distance", "wavenumber",
                                         "screen_halfwidth", "bins", "alpha1", "alpha2", "mode", "eta"});
  SlitConfig c;
  c.separation = s.positive("separation", c.separation);
  c.screen_distance = s.positive("screen_distance", c.screen_distance);
  c.wavenumber = s.positive("wavenumber", c.wavenumber);
  c.screen_halfwidth = s.positive("screen_halfwidth", c.screen_halfwidth);
  c.bins = s.count("bins", static_cast<std::int64_t>(c.bins), 16);
  if (s.has("alpha1")) c.alpha1 = s.complex(s.raw("alpha1"), s.path("alpha1"));
  if (s.has("alpha2")) c.alpha2 = s.complex(s.raw("alpha2"), s.path("alpha2"));
  const YAML::Node anchor = s.has("alpha1") ? s.raw("alpha1") : s.has("alpha2") ? s.raw("alpha2") : YAML::Node();
  normalize_weights({&c.alpha1, &c.alpha2}, s.path("alpha"), anchor ? anchor.Mark() : YAML::Mark::null_mark(),
                    warnings);

  const std::string mode = s.word("mode", "full");
  if (mode == "full") {
    c.mode = VisibilityMode::full();
  } else if (mode == "individual") {
    c.mode = VisibilityMode::individual();
  } else if (mode == "partial") {
    const double eta = s.real("eta");
    if (!(eta >= 0.0 && eta <= 1.0)) s.fail("eta", "must lie in [0, 1]");
    c.mode = VisibilityMode::partial(eta);
  } else {
    s.fail("mode", "must be 'full', 'individual' or 'partial'");
  }
  if (s.has("eta") && mode != "partial") s.fail("eta", "only meaningful with mode: partial");
  c.validate();
  return c;
}

ConsistencyInput read_consistency(const Section& top, std::vector<std::string>& warnings) {
  const Section s = top.section("consistency", {"states", "coefficients", "assigned_energy", "tolerance"});
  ConsistencyInput in;
  const YAML::Node states = s.required("states");
  const YAML::Node coeffs = s.required("coefficients");
  if (!states.IsSequence() || states.size() == 0) s.fail("states", "expected a non-empty list of indices");
  if (!coeffs.IsSequence()) s.fail("coefficients", "expected a list");
  if (coeffs.size() != states.size()) {
    s.fail("coefficients", "needs one entry per state (" + std::to_string(states.size()) + ")");
  }
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < states.size(); ++i) {
    long long k = -1;
    const std::string field = s.path("states") + "[" + std::to_string(i) + "]";
    if (!states[i].IsScalar() || !YAML::convert<long long>::decode(states[i], k) || k < 0) {
      throw ConfigError(field, where(states[i].Mark()), "expected a non-negative integer");
    }
    if (!seen.insert(static_cast<std::size_t>(k)).second) {
      throw ConfigError(field, where(states[i].Mark()), "duplicate state index");
    }
    in.states.push_back(static_cast<std::size_t>(k));
    in.coefficients.push_back(
        s.complex(coeffs[i], s.path("coefficients") + "[" + std::to_string(i) + "]"));
  }
  std::vector<Complex*> refs;
  for (auto& c : in.coefficients) refs.push_back(&c);
  normalize_weights(refs, s.path("coefficients"), coeffs.Mark(), warnings);
  in.assigned_energy = s.real("assigned_energy");
  in.tolerance = s.positive("tolerance", in.tolerance);
  return in;
}

nlohmann::ordered_json complex_json(Complex c) { return nlohmann::ordered_json::array({c.real(), c.imag()}); }

nlohmann::ordered_json echo_grid(const Grid& g) {
  return {{"q_min", g.q_min()},
          {"q_max", g.q_max()},
          {"n", g.size()},
          {"boundary", g.periodic() ? "periodic" : "dirichlet"}};
}

nlohmann::ordered_json echo_potential(const Potential& p) {
  nlohmann::ordered_json j{{"kind", p.name()}};
  std::visit(
      [&](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, HarmonicPotential>) {
          j["omega"] = k.omega;
        } else if constexpr (std::is_same_v<K, BarrierPotential>) {
          j["height"] = k.height;
          j["q_lo"] = k.q_lo;
          j["q_hi"] = k.q_hi;
        } else if constexpr (std::is_same_v<K, TabulatedPotential>) {
          j["values"] = k.values;
        }
      },
      p.kind());
  return j;
}

nlohmann::ordered_json echo_slits(const SlitConfig& c) {
  nlohmann::ordered_json j{{"separation", c.separation},
                           {"screen_distance", c.screen_distance},
                           {"wavenumber", c.wavenumber},
                           {"screen_halfwidth", c.screen_halfwidth},
                           {"bins", c.bins},
                           {"alpha1", complex_json(c.alpha1)},
                           {"alpha2", complex_json(c.alpha2)}};
  switch (c.mode.kind) {
    case VisibilityMode::Kind::full: j["mode"] = "full"; break;
    case VisibilityMode::Kind::individual: j["mode"] = "individual"; break;
    case VisibilityMode::Kind::partial:
      j["mode"] = "partial";
      j["eta"] = c.mode.eta;
      break;
  }
  return j;
}

void build_echo(ExperimentConfig& c) {
  nlohmann::ordered_json j{{"command", command_name(c.command)}};
  if (c.grid) j["grid"] = echo_grid(*c.grid);
  if (c.potential) j["potential"] = echo_potential(*c.potential);
  switch (c.command) {
    case Command::eigensolve:
      j["states"] = c.states;
      j["eigensolver"] = {{"residual_tolerance", c.eigensolver.residual_tolerance},
                          {"degeneracy_tolerance", c.eigensolver.degeneracy_tolerance}};
      break;
    case Command::variational:
      j["states"] = c.states;
      j["variational"] = {
          {"step", c.variational.step},
          {"max_iters", c.variational.max_iters},
          {"tol", c.variational.tol},
          {"scheme", c.variational.scheme == VariationalScheme::locally_optimal ? "locally_optimal"
                                                                                : "projected_gradient"}};
      j["seed"] = c.seed;
      break;
    case Command::consistency: {
      nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
      for (auto x : c.consistency.coefficients) coeffs.push_back(complex_json(x));
      j["consistency"] = {{"states", c.consistency.states},
                          {"coefficients", coeffs},
                          {"assigned_energy", c.consistency.assigned_energy},
                          {"tolerance", c.consistency.tolerance}};
      j["eigensolver"] = {{"residual_tolerance", c.eigensolver.residual_tolerance},
                          {"degeneracy_tolerance", c.eigensolver.degeneracy_tolerance}};
      break;
    }
    case Command::doubleslit:
      j["slits"] = echo_slits(c.slits);
      break;
    case Command::sample:
      j["slits"] = echo_slits(c.slits);
      j["hits"] = c.hits;
      j["seed"] = c.seed;
      break;
  }
  c.echo = std::move(j);
}

std::set<std::string> top_keys(Command command) {
  switch (command) {
    case Command::eigensolve: return {"command", "grid", "potential", "states", "eigensolver"};
    case Command::variational: return {"command", "grid", "potential", "states", "variational", "seed"};
    case Command::consistency: return {"command", "grid", "potential", "consistency", "eigensolver"};
    case Command::doubleslit: return {"command", "slits"};
    case Command::sample: return {"command", "slits", "hits", "seed"};
  }
  return {};
}

}  // namespace

ConfigError::ConfigError(std::string field, std::string where, const std::string& message)
    : std::runtime_error((where.empty() ? std::string{} : where + ": ") +
                         (field.empty() ? std::string{} : field + ": ") + message),
      field_(std::move(field)),
      where_(std::move(where)) {}

std::string_view command_name(Command command) {
  switch (command) {
    case Command::eigensolve: return "eigensolve";
    case Command::variational: return "variational";
    case Command::consistency: return "consistency";
    case Command::doubleslit: return "doubleslit";
    case Command::sample: return "sample";
  }
  return "";
}

std::optional<Command> parse_command(std::string_view name) {
  for (Command c : {Command::eigensolve, Command::variational, Command::consistency, Command::doubleslit,
                    Command::sample}) {
    if (command_name(c) == name) return c;
  }
  return std::nullopt;
}

ExperimentConfig parse_config(std::string_view text, Command command) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", where(e.mark), "syntax error: " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("", "", "the document must be a mapping of settings");

  ExperimentConfig c;
  c.command = command;
  try {
    const Section top(root, "", top_keys(command));
    if (top.has("command") && top.word("command") != command_name(command)) {
      top.fail("command", "document is for '" + top.word("command") + "', invoked as '" +
                              std::string(command_name(command)) + "'");
    }
    switch (command) {
      case Command::eigensolve:
      case Command::variational:
        c.grid = read_grid(top);
        c.potential = read_potential(top, *c.grid);
        c.states = top.count("states");
        if (c.states > c.grid->degrees_of_freedom()) {
          top.fail("states", "exceeds the " + std::to_string(c.grid->degrees_of_freedom()) +
                                 " free samples of the grid");
        }
        if (command == Command::eigensolve) {
          c.eigensolver = read_eigensolver(top);
        } else {
          c.variational = read_variational(top);
          c.seed = top.seed("seed", 0);
          c.variational.seed = c.seed;
        }
        break;
      case Command::consistency:
        c.grid = read_grid(top);
        c.potential = read_potential(top, *c.grid);
        c.eigensolver = read_eigensolver(top);
        c.consistency = read_consistency(top, c.warnings);
        for (std::size_t k : c.consistency.states) {
          if (k >= c.grid->degrees_of_freedom()) {
            throw ConfigError("consistency.states", "",
                              "index " + std::to_string(k) + " exceeds the grid's free samples");
          }
        }
        break;
      case Command::doubleslit:
        c.slits = read_slits(top, c.warnings);
        break;
      case Command::sample:
        c.slits = read_slits(top, c.warnings);
        c.hits = top.count("hits");
        c.seed = top.seed("seed", 0);
        break;
    }
  } catch (const exinf::InvalidArgument& e) {
    throw ConfigError("", "", e.what());
  } catch (const YAML::Exception& e) {
    throw ConfigError("", where(e.mark), e.msg);
  }
  build_echo(c);
  return c;
}

void override_seed(ExperimentConfig& config, std::uint64_t seed) {
  config.seed = seed;
  config.variational.seed = seed;
  if (config.echo.contains("seed")) config.echo["seed"] = seed;
}

}  // namespace exinf::app
