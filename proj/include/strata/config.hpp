#ifndef STRATA_CONFIG_HPP
#define STRATA_CONFIG_HPP

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "strata/derivatives.hpp"
#include "strata/errors.hpp"
#include "strata/grid.hpp"
#include "strata/measure.hpp"
#include "strata/quasi_norm.hpp"

namespace strata {

inline constexpr int kSchemaVersion = 1;

using json = nlohmann::json;

/// Object reader that remembers which keys were consumed, so leftovers can be
/// rejected. Every error carries the JSON path.
class ConfigObject {
 public:
  ConfigObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InputError(path_ + ": expected an object");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw InputError(path_ + ": missing key '" + key + "'");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    const json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw InputError(path_ + "." + key + ": wrong type");
    }
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) {
      seen_.insert(key);
      return fallback;
    }
    return get<T>(key);
  }

  template <class T>
  std::optional<T> maybe(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return get<T>(key);
  }

  ConfigObject child(const std::string& key) { return ConfigObject(raw(key), path_ + "." + key); }

  /// Throws on keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw InputError(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

inline void check_schema(ConfigObject& o) {
  int v = o.get<int>("schema_version");
  if (v != kSchemaVersion)
    throw InputError(o.path() + ": schema_version " + std::to_string(v) + " is not supported (expected " +
                     std::to_string(kSchemaVersion) + ")");
}

// ---- shared pieces -----------------------------------------------------------

/// {"half_width": L or [L...], "points": N or [N...]}; scalars broadcast.
inline GridSpec parse_grid(ConfigObject o, std::size_t dim) {
  auto vec = [&](const std::string& key, auto tag) {
    using T = decltype(tag);
    const json& v = o.raw(key);
    std::vector<T> out;
    try {
      if (v.is_array()) {
        out = v.get<std::vector<T>>();
      } else {
        out.assign(dim, v.get<T>());
      }
    } catch (const json::exception&) {
      throw InputError(o.path() + "." + key + ": wrong type");
    }
    if (out.size() != dim)
      throw InputError(o.path() + "." + key + ": expected " + std::to_string(dim) + " entries");
    return out;
  };
  auto L = vec("half_width", double{});
  auto N = vec("points", std::size_t{});
  o.finish();
  return GridSpec(L, N);
}

/// {"kind": "lp", "p": 2} (p may be "inf") or {"kind": "koranyi", "c": 16}.
inline QuasiNorm parse_norm(ConfigObject o) {
  auto kind = o.get<std::string>("kind");
  QuasiNorm out = QuasiNorm::euclidean_lp(2.0);
  if (kind == "lp") {
    const json& p = o.raw("p");
    if (p.is_string() && p.get<std::string>() == "inf") {
      out = QuasiNorm::euclidean_lp(INFINITY);
    } else if (p.is_number()) {
      out = QuasiNorm::euclidean_lp(p.get<double>());
    } else {
      throw InputError(o.path() + ".p: expected a number or \"inf\"");
    }
  } else if (kind == "koranyi") {
    out = QuasiNorm::koranyi(o.get<double>("c", 16.0));
  } else {
    throw InputError(o.path() + ": unknown norm kind '" + kind + "'");
  }
  o.finish();
  return out;
}

inline DerivativeScheme parse_scheme(const std::string& s, const std::string& where) {
  if (s == "spectral") return DerivativeScheme::Spectral;
  if (s == "fd4") return DerivativeScheme::FiniteDifference4;
  throw InputError(where + ": unknown derivative scheme '" + s + "' (expected spectral or fd4)");
}

inline std::pair<double, double> parse_range(ConfigObject& o, const std::string& key, std::pair<double, double> d) {
  if (!o.has(key)) {
    o.maybe<double>(key);
    return d;
  }
  const json& v = o.raw(key);
  if (v.is_number()) return {v.get<double>(), v.get<double>()};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    double lo = v[0].get<double>(), hi = v[1].get<double>();
    if (lo > hi) throw InputError(o.path() + "." + key + ": range is reversed");
    return {lo, hi};
  }
  throw InputError(o.path() + "." + key + ": expected a number or [lo, hi]");
}

// ---- test families -------------------------------------------------------------

struct FamilyConfig {
  std::string kind = "gaussian-mixture";  // gaussian-mixture | graded-bump | constant | discrete
  std::size_t count = 1;
  std::size_t components = 3;
  std::pair<double, double> width{0.5, 1.2};
  double spread = 1.0;
  std::pair<double, double> alpha{1.0, 1.0}, beta{1.0, 1.0};
  double shift = 0.0;
  double value = 1.0;
  std::size_t atoms = 16;
};

inline FamilyConfig parse_family(ConfigObject o) {
  FamilyConfig f;
  f.kind = o.get<std::string>("kind");
  f.count = o.get<std::size_t>("count", 1);
  if (f.count == 0) throw InputError(o.path() + ".count: must be at least 1");
  if (f.kind == "gaussian-mixture") {
    f.components = o.get<std::size_t>("components", f.components);
    f.width = parse_range(o, "width", f.width);
    f.spread = o.get<double>("spread", f.spread);
    if (f.components == 0 || f.width.first <= 0.0) throw InputError(o.path() + ": need components >= 1 and width > 0");
  } else if (f.kind == "graded-bump") {
    f.alpha = parse_range(o, "alpha", f.alpha);
    f.beta = parse_range(o, "beta", f.beta);
    f.shift = o.get<double>("shift", 0.0);
    if (f.alpha.first <= 0.0 || f.beta.first <= 0.0) throw InputError(o.path() + ": bump rates must be positive");
  } else if (f.kind == "constant") {
    f.value = o.get<double>("value", 1.0);
  } else if (f.kind == "discrete") {
    f.atoms = o.get<std::size_t>("atoms", 16);
    if (f.atoms == 0 || f.atoms > 16) throw InputError(o.path() + ".atoms: must lie in 1..16");
  } else {
    throw InputError(o.path() + ": unknown family kind '" + f.kind + "'");
  }
  o.finish();
  return f;
}

// ---- verification suite --------------------------------------------------------

/// Where a case's constant comes from. "auto": closed form where one exists,
/// the estimated constant on the Heisenberg group, the empirical supremum
/// otherwise.
struct ConstantSource {
  enum class Kind { Auto, Empirical, Value, Table };
  Kind kind = Kind::Auto;
  double value = 0.0;
  std::string direction = "exact";
  std::string table, name;
};

inline ConstantSource parse_constant_source(const json& j, const std::string& path) {
  ConstantSource s;
  if (j.is_string()) {
    auto v = j.get<std::string>();
    if (v == "auto") return s;
    if (v == "empirical") return s.kind = ConstantSource::Kind::Empirical, s;
    throw InputError(path + ": expected \"auto\", \"empirical\" or an object");
  }
  ConfigObject o(j, path);
  if (o.has("value")) {
    s.kind = ConstantSource::Kind::Value;
    s.value = o.get<double>("value");
    s.direction = o.get<std::string>("direction", "exact");
    if (!(s.value > 0.0) || !std::isfinite(s.value)) throw InputError(path + ".value: must be positive");
    if (s.direction != "exact" && s.direction != "lower-bound")
      throw InputError(path + ".direction: expected exact or lower-bound");
  } else {
    s.kind = ConstantSource::Kind::Table;
    s.table = o.get<std::string>("table");
    s.name = o.get<std::string>("name");
  }
  o.finish();
  return s;
}

/// Every exponent a tag may use; unused ones stay empty.
struct CaseParams {
  std::optional<double> p, q, r, a, a1, a2, beta, delta, gamma, a_mix;
};

struct CaseConfig {
  std::string name, tag, group;
  std::optional<GridSpec> grid;
  FamilyConfig family;
  CaseParams params;
  std::optional<QuasiNorm> norm;
  ConstantSource constant;
  std::optional<DerivativeScheme> scheme;
  std::string measure = "lebesgue";  // constant-free tags only
  double measure_gamma = 1.0;
};

inline const std::vector<std::string>& known_tags() {
  static const std::vector<std::string> tags{"interp",      "log-holder",    "jensen-step",    "log-sobolev",
                                             "log-sobolev-weighted", "log-gn", "log-ckn",    "nash",
                                             "nash-weighted", "gross",       "gross-weighted", "gross-euclidean-lp"};
  return tags;
}

inline bool is_constant_free(const std::string& tag) {
  return tag == "interp" || tag == "log-holder" || tag == "jensen-step";
}

/// Group dimension for grid broadcasting; the group itself is built later.
inline std::size_t group_dim_from_name(const std::string& name) {
  auto colon = name.find(':');
  if (colon == std::string::npos) throw InputError("group name must look like 'family:n', got '" + name + "'");
  int n = std::atoi(name.c_str() + colon + 1);
  if (name.compare(0, colon, "heisenberg") == 0) return static_cast<std::size_t>(2 * n + 1);
  return static_cast<std::size_t>(n);
}

inline CaseConfig parse_case(ConfigObject o) {
  CaseConfig c;
  c.name = o.get<std::string>("name");
  c.tag = o.get<std::string>("tag");
  bool known = false;
  for (const auto& t : known_tags()) known = known || t == c.tag;
  if (!known) throw InputError(o.path() + ": unknown tag '" + c.tag + "'");
  c.family = parse_family(o.child("family"));
  if (c.family.kind == "discrete") {
    if (!is_constant_free(c.tag)) throw InputError(o.path() + ": discrete family only serves constant-free tags");
    c.group = o.get<std::string>("group", std::string("discrete"));
  } else {
    c.group = o.get<std::string>("group");
    c.grid = parse_grid(o.child("grid"), group_dim_from_name(c.group));
  }
  if (o.has("params")) {
    ConfigObject p = o.child("params");
    auto& P = c.params;
    P.p = p.maybe<double>("p"), P.q = p.maybe<double>("q"), P.r = p.maybe<double>("r");
    P.a = p.maybe<double>("a"), P.a1 = p.maybe<double>("a1"), P.a2 = p.maybe<double>("a2");
    P.beta = p.maybe<double>("beta"), P.delta = p.maybe<double>("delta"), P.gamma = p.maybe<double>("gamma");
    P.a_mix = p.maybe<double>("a_mix");
    p.finish();
  }
  if (o.has("norm")) c.norm = parse_norm(o.child("norm"));
  if (o.has("constant")) c.constant = parse_constant_source(o.raw("constant"), o.path() + ".constant");
  if (auto s = o.maybe<std::string>("scheme")) c.scheme = parse_scheme(*s, o.path() + ".scheme");
  if (auto m = o.maybe<std::string>("measure")) {
    if (*m != "lebesgue" && *m != "semi-gaussian")
      throw InputError(o.path() + ".measure: expected lebesgue or semi-gaussian");
    if (!is_constant_free(c.tag)) throw InputError(o.path() + ".measure: only constant-free tags take a measure");
    c.measure = *m;
  }
  c.measure_gamma = o.get<double>("measure_gamma", 1.0);
  o.finish();
  return c;
}

/// Settings for constants estimated on the fly (Heisenberg A).
struct EstimationConfig {
  std::optional<GridSpec> grid;  // default chosen per group
  std::size_t q_points = 9;
  double safety = 1.25;
  double tol = 1e-3;
};

inline EstimationConfig parse_estimation(ConfigObject o) {
  EstimationConfig e;
  if (o.has("grid")) e.grid = parse_grid(o.child("grid"), 3);
  e.q_points = o.get<std::size_t>("q_points", e.q_points);
  e.safety = o.get<double>("safety", e.safety);
  e.tol = o.get<double>("tol", e.tol);
  if (e.q_points == 0 || e.safety < 1.0 || !(e.tol > 0.0))
    throw InputError(o.path() + ": need q_points >= 1, safety >= 1, tol > 0");
  o.finish();
  return e;
}

struct SuiteConfig {
  std::uint64_t seed = 1;
  std::optional<std::string> tolerance_profile;
  EstimationConfig estimation;
  std::vector<CaseConfig> cases;
};

inline SuiteConfig parse_suite(const json& j, const std::string& where = "config") {
  ConfigObject o(j, where);
  check_schema(o);
  SuiteConfig s;
  s.seed = o.get<std::uint64_t>("seed", 1);
  s.tolerance_profile = o.maybe<std::string>("tolerance_profile");
  if (o.has("estimation")) s.estimation = parse_estimation(o.child("estimation"));
  const json& cases = o.raw("cases");
  if (!cases.is_array()) throw InputError(where + ".cases: expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    s.cases.push_back(parse_case(ConfigObject(cases[i], where + ".cases[" + std::to_string(i) + "]")));
    if (!names.insert(s.cases.back().name).second)
      throw InputError(where + ".cases[" + std::to_string(i) + "]: duplicate case name '" + s.cases.back().name + "'");
  }
  o.finish();
  return s;
}

// ---- constant tables ---------------------------------------------------------------

struct ConstantRowConfig {
  std::string quantity;  // A | gamma | d0 | gn | sobolev
  std::string group;
  std::string method = "auto";  // auto | exact | family
  double a = 1.0, a2 = 0.0, p = 2.0;
  std::optional<double> q;
  std::optional<GridSpec> grid;
  std::size_t q_points = 33;
  double tol = 1e-3;
};

struct ConstantsConfig {
  std::vector<ConstantRowConfig> rows;
};

inline ConstantsConfig parse_constants(const json& j, const std::string& where = "config") {
  ConfigObject o(j, where);
  check_schema(o);
  ConstantsConfig c;
  const json& rows = o.raw("rows");
  if (!rows.is_array()) throw InputError(where + ".rows: expected an array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ConfigObject r(rows[i], where + ".rows[" + std::to_string(i) + "]");
    ConstantRowConfig row;
    row.quantity = r.get<std::string>("quantity");
    if (row.quantity != "A" && row.quantity != "gamma" && row.quantity != "d0" && row.quantity != "gn" &&
        row.quantity != "sobolev")
      throw InputError(r.path() + ": unknown quantity '" + row.quantity + "'");
    row.group = r.get<std::string>("group");
    row.method = r.get<std::string>("method", row.method);
    if (row.method != "auto" && row.method != "exact" && row.method != "family")
      throw InputError(r.path() + ".method: expected auto, exact or family");
    row.a = r.get<double>("a", row.a);
    row.a2 = r.get<double>("a2", row.a2);
    row.p = r.get<double>("p", row.p);
    row.q = r.maybe<double>("q");
    if (r.has("grid")) row.grid = parse_grid(r.child("grid"), group_dim_from_name(row.group));
    row.q_points = r.get<std::size_t>("q_points", row.q_points);
    row.tol = r.get<double>("tol", row.tol);
    if ((row.quantity == "d0" || row.quantity == "gn" || row.quantity == "sobolev") && !row.q)
      throw InputError(r.path() + ": quantity '" + row.quantity + "' needs q");
    r.finish();
    c.rows.push_back(std::move(row));
  }
  o.finish();
  return c;
}

// ---- heat runs ---------------------------------------------------------------------

struct HeatRunConfig {
  std::string name, group;
  GridSpec grid;
  std::string initial = "gaussian";  // gaussian | graded-bump | zero
  double width = 1.0;                // gaussian: exp(-|x|^2 / (2 width^2))
  double alpha = 1.0, beta = 1.0;    // graded-bump
  double T = 1.0;
  std::size_t steps = 100;
  std::optional<double> A2;  // empty: closed form on R^n, estimated on the Heisenberg group
  double cfl = 0.9;
};

struct HeatConfig {
  EstimationConfig estimation;
  std::vector<HeatRunConfig> runs;
};

inline HeatConfig parse_heat(const json& j, const std::string& where = "config") {
  ConfigObject o(j, where);
  check_schema(o);
  HeatConfig h;
  if (o.has("estimation")) h.estimation = parse_estimation(o.child("estimation"));
  const json& runs = o.raw("runs");
  if (!runs.is_array()) throw InputError(where + ".runs: expected an array");
  std::set<std::string> names;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    ConfigObject r(runs[i], where + ".runs[" + std::to_string(i) + "]");
    HeatRunConfig run;
    run.name = r.get<std::string>("name");
    if (!names.insert(run.name).second) throw InputError(r.path() + ": duplicate run name '" + run.name + "'");
    run.group = r.get<std::string>("group");
    run.grid = parse_grid(r.child("grid"), group_dim_from_name(run.group));
    ConfigObject init = r.child("initial");
    run.initial = init.get<std::string>("kind");
    if (run.initial == "gaussian") {
      run.width = init.get<double>("width", 1.0);
    } else if (run.initial == "graded-bump") {
      run.alpha = init.get<double>("alpha", 1.0);
      run.beta = init.get<double>("beta", 1.0);
    } else if (run.initial != "zero") {
      throw InputError(init.path() + ": unknown initial datum '" + run.initial + "'");
    }
    init.finish();
    run.T = r.get<double>("T");
    run.steps = r.get<std::size_t>("steps", run.steps);
    if (r.has("A2")) {
      const json& a = r.raw("A2");
      if (a.is_number()) {
        run.A2 = a.get<double>();
      } else if (!(a.is_string() && a.get<std::string>() == "auto")) {
        throw InputError(r.path() + ".A2: expected a number or \"auto\"");
      }
    }
    run.cfl = r.get<double>("cfl", run.cfl);
    if (!(run.T > 0.0) || run.steps == 0 || !(run.cfl > 0.0 && run.cfl <= 1.0))
      throw InputError(r.path() + ": need T > 0, steps >= 1 and cfl in (0, 1]");
    r.finish();
    h.runs.push_back(std::move(run));
  }
  o.finish();
  return h;
}

}  // namespace strata

#endif  // STRATA_CONFIG_HPP
