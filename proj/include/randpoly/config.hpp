#pragma once

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "randpoly/experiments.hpp"

namespace randpoly {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

/// Dimension-independent run description as read from JSON. Sub-specs are
/// kept in normalized form (defaults filled in) so that equality is exact.
struct RunConfig {
  Mode mode = Mode::InscribedMeanWidth;
  int dim = 2;
  json body;
  json q;
  json rho;     // null when absent
  json lambda;
  std::vector<std::size_t> n_grid;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  int quad_m = 1024;
  std::string out;

  bool operator==(const RunConfig&) const = default;
};

namespace config_detail {

[[noreturn]] inline void fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) fail("unknown key '" + key + "' in " + where);
  }
}

inline double number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(where + " is missing '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  return v.get<double>();
}

inline double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

inline std::vector<double> vector(const json& v, int dim, const std::string& where) {
  if (!v.is_array() || static_cast<int>(v.size()) != dim) fail(where + " must be an array of " + std::to_string(dim) + " numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) fail(where + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline const json& params_of(const json& spec, const std::string& where, std::string& kind) {
  check_keys(spec, {"kind", "params"}, where);
  if (!spec.contains("kind") || !spec.at("kind").is_string()) fail(where + ".kind must be a string");
  kind = spec.at("kind").get<std::string>();
  static const json empty = json::object();
  if (!spec.contains("params")) return empty;
  if (!spec.at("params").is_object()) fail(where + ".params must be an object");
  return spec.at("params");
}

inline json zeros(int dim) { return json(std::vector<double>(dim, 0.0)); }

inline json normalize_body(const json& spec, int dim, const std::string& where) {
  std::string kind;
  const json& p = params_of(spec, where, kind);
  const std::string pw = where + ".params";
  json out = {{"kind", kind}};
  if (kind == "ball") {
    check_keys(p, {"center", "R"}, pw);
    const json c = p.contains("center") ? json(vector(p.at("center"), dim, pw + ".center")) : zeros(dim);
    out["params"] = {{"center", c}, {"R", number(p, "R", pw)}};
  } else if (kind == "ellipsoid") {
    check_keys(p, {"center", "frame", "semiaxes"}, pw);
    const json c = p.contains("center") ? json(vector(p.at("center"), dim, pw + ".center")) : zeros(dim);
    json frame = json::array();
    if (p.contains("frame")) {
      const json& f = p.at("frame");
      if (!f.is_array() || static_cast<int>(f.size()) != dim) fail(pw + ".frame must list " + std::to_string(dim) + " axes");
      for (const auto& axis : f) frame.push_back(vector(axis, dim, pw + ".frame"));
    } else {
      for (int i = 0; i < dim; ++i) {
        std::vector<double> e(dim, 0.0);
        e[i] = 1.0;
        frame.push_back(e);
      }
    }
    if (!p.contains("semiaxes")) fail(pw + " is missing 'semiaxes'");
    out["params"] = {{"center", c}, {"frame", frame}, {"semiaxes", vector(p.at("semiaxes"), dim, pw + ".semiaxes")}};
  } else if (kind == "polytope") {
    check_keys(p, {"vertices"}, pw);
    if (!p.contains("vertices") || !p.at("vertices").is_array()) fail(pw + ".vertices must be an array");
    json verts = json::array();
    for (const auto& v : p.at("vertices")) verts.push_back(vector(v, dim, pw + ".vertices"));
    out["params"] = {{"vertices", verts}};
  } else if (kind == "halfspaces") {
    check_keys(p, {"planes"}, pw);
    if (!p.contains("planes") || !p.at("planes").is_array()) fail(pw + ".planes must be an array");
    json planes = json::array();
    for (const auto& h : p.at("planes")) {
      check_keys(h, {"u", "t"}, pw + ".planes");
      if (!h.contains("u")) fail(pw + ".planes entry is missing 'u'");
      planes.push_back({{"u", vector(h.at("u"), dim, pw + ".planes.u")}, {"t", number(h, "t", pw + ".planes")}});
    }
    out["params"] = {{"planes", planes}};
  } else if (kind == "parallel") {
    check_keys(p, {"inner", "r"}, pw);
    if (!p.contains("inner")) fail(pw + " is missing 'inner'");
    out["params"] = {{"inner", normalize_body(p.at("inner"), dim, pw + ".inner")}, {"r", number(p, "r", pw)}};
  } else {
    fail("unknown body kind '" + kind + "'");
  }
  return out;
}

inline json normalize_weight(const json& spec, const std::string& where) {
  std::string kind;
  const json& p = params_of(spec, where, kind);
  const std::string pw = where + ".params";
  json out = {{"kind", kind}};
  if (kind == "constant") {
    check_keys(p, {"c"}, pw);
    out["params"] = {{"c", number_or(p, "c", 1.0, pw)}};
  } else if (kind == "power") {
    check_keys(p, {"c", "alpha"}, pw);
    out["params"] = {{"c", number_or(p, "c", 1.0, pw)}, {"alpha", number(p, "alpha", pw)}};
  } else if (kind == "band") {
    check_keys(p, {"lo", "hi", "c"}, pw);
    out["params"] = {{"lo", number(p, "lo", pw)}, {"hi", number(p, "hi", pw)}, {"c", number_or(p, "c", 1.0, pw)}};
  } else {
    fail("unknown weight kind '" + kind + "'");
  }
  return out;
}

inline json normalize_density(const json& spec, int dim, const std::string& where) {
  std::string kind;
  const json& p = params_of(spec, where, kind);
  const std::string pw = where + ".params";
  json out = {{"kind", kind}};
  if (kind == "uniform") {
    check_keys(p, {}, pw);
    out["params"] = json::object();
  } else if (kind == "radial_power") {
    check_keys(p, {"beta", "c"}, pw);
    json params = {{"beta", number(p, "beta", pw)}};
    if (p.contains("c")) params["c"] = number(p, "c", pw);
    out["params"] = params;
  } else if (kind == "induced_polar") {
    check_keys(p, {"q", "body"}, pw);
    if (!p.contains("q") || !p.contains("body")) fail(pw + " needs 'q' and 'body'");
    out["params"] = {{"q", normalize_weight(p.at("q"), pw + ".q")}, {"body", normalize_body(p.at("body"), dim, pw + ".body")}};
  } else {
    fail("unknown density kind '" + kind + "'");
  }
  return out;
}

template <int D>
Vec<D> to_vec(const json& v) {
  Vec<D> x;
  for (int i = 0; i < D; ++i) x[i] = v.at(i).get<double>();
  return x;
}

}  // namespace config_detail

inline Mode parse_mode(const std::string& s) {
  if (s == "inscribed" || s == "InscribedMeanWidth") return Mode::InscribedMeanWidth;
  if (s == "circumscribed" || s == "CircumscribedVolume") return Mode::CircumscribedVolume;
  throw Error(ErrorKind::ConfigError, "unknown mode '" + s + "'");
}

/// Validates a parsed JSON document and fills in defaults.
inline RunConfig parse_config(const json& doc) {
  using namespace config_detail;
  check_keys(doc, {"mode", "dim", "body", "q", "rho", "lambda", "n_grid", "trials", "seed", "quad_m", "out"}, "config");
  RunConfig cfg;
  try {
    if (doc.contains("mode")) {
      if (!doc.at("mode").is_string()) fail("mode must be a string");
      cfg.mode = parse_mode(doc.at("mode").get<std::string>());
    }
    if (doc.contains("dim")) {
      if (!doc.at("dim").is_number_integer()) fail("dim must be an integer");
      cfg.dim = doc.at("dim").get<int>();
    }
    if (cfg.dim != 2 && cfg.dim != 3) fail("dim must be 2 or 3");
    cfg.body = doc.contains("body") ? normalize_body(doc.at("body"), cfg.dim, "body")
                                    : normalize_body(json{{"kind", "ball"}, {"params", {{"R", 1.0}}}}, cfg.dim, "body");
    cfg.q = normalize_weight(doc.contains("q") ? doc.at("q") : json{{"kind", "constant"}}, "q");
    cfg.lambda = normalize_weight(doc.contains("lambda") ? doc.at("lambda") : json{{"kind", "constant"}}, "lambda");
    if (doc.contains("rho") && !doc.at("rho").is_null()) cfg.rho = normalize_density(doc.at("rho"), cfg.dim, "rho");
    if (!doc.contains("n_grid") || !doc.at("n_grid").is_array() || doc.at("n_grid").empty()) fail("n_grid must be a non-empty array of integers");
    for (const auto& n : doc.at("n_grid")) {
      if (!n.is_number_integer() || n.get<long long>() < 1) fail("n_grid entries must be integers >= 1");
      cfg.n_grid.push_back(n.get<std::size_t>());
    }
    if (doc.contains("trials")) {
      if (!doc.at("trials").is_number_integer() || doc.at("trials").get<long long>() < 1) fail("trials must be an integer >= 1");
      cfg.trials = doc.at("trials").get<std::size_t>();
    }
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_integer() || doc.at("seed").is_number_float()) fail("seed must be an integer");
      if (doc.at("seed").is_number_unsigned()) {
        cfg.seed = doc.at("seed").get<std::uint64_t>();
      } else {
        const auto s = doc.at("seed").get<long long>();
        if (s < 0) fail("seed must be nonnegative");
        cfg.seed = static_cast<std::uint64_t>(s);
      }
    }
    if (doc.contains("quad_m")) {
      if (!doc.at("quad_m").is_number_integer()) fail("quad_m must be an integer");
      cfg.quad_m = doc.at("quad_m").get<int>();
    }
    if (doc.contains("out")) {
      if (!doc.at("out").is_string()) fail("out must be a string");
      cfg.out = doc.at("out").get<std::string>();
    }
  } catch (const json::exception& e) {
    fail(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

/// RANDPOLY_SEED, when set, replaces the configured seed.
inline void apply_seed_override(RunConfig& cfg) {
  const char* env = std::getenv("RANDPOLY_SEED");
  if (env == nullptr || *env == '\0') return;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(env, &end, 0);
  if (errno != 0 || *end != '\0' || *env == '-') throw Error(ErrorKind::ConfigError, std::string("bad RANDPOLY_SEED '") + env + "'");
  cfg.seed = v;
}

inline json to_json(const RunConfig& cfg) {
  json out = {{"mode", to_string(cfg.mode)}, {"dim", cfg.dim},       {"body", cfg.body},
              {"q", cfg.q},                  {"lambda", cfg.lambda}, {"n_grid", cfg.n_grid},
              {"trials", cfg.trials},        {"seed", cfg.seed},     {"quad_m", cfg.quad_m},
              {"out", cfg.out}};
  if (!cfg.rho.is_null()) out["rho"] = cfg.rho;
  return out;
}

// ---------------------------------------------------------------------------
// Construction of typed objects
// ---------------------------------------------------------------------------

template <int D>
Body<D> build_body(const json& spec) {
  using config_detail::to_vec;
  const std::string kind = spec.at("kind");
  const json& p = spec.at("params");
  if (kind == "ball") return make_ball<D>(to_vec<D>(p.at("center")), p.at("R").get<double>());
  if (kind == "ellipsoid") {
    Mat<D> frame;
    for (int i = 0; i < D; ++i) frame.col(i) = to_vec<D>(p.at("frame").at(i));
    return make_ellipsoid<D>(to_vec<D>(p.at("center")), frame, to_vec<D>(p.at("semiaxes")));
  }
  if (kind == "polytope") {
    std::vector<Vec<D>> verts;
    for (const auto& v : p.at("vertices")) verts.push_back(to_vec<D>(v));
    return make_polytope<D>(std::move(verts));
  }
  if (kind == "halfspaces") {
    std::vector<Hyperplane<D>> planes;
    for (const auto& h : p.at("planes")) {
      const Vec<D> u = to_vec<D>(h.at("u"));
      if (!(u.norm() > 0.0)) throw Error(ErrorKind::ConfigError, "plane normal must be nonzero");
      planes.push_back({Direction<D>(Vec<D>(u.normalized())), h.at("t").get<double>() / u.norm()});
    }
    return make_halfspaces<D>(std::move(planes));
  }
  if (kind == "parallel") return parallel_body<D>(build_body<D>(p.at("inner")), p.at("r").get<double>());
  throw Error(ErrorKind::ConfigError, "unknown body kind '" + kind + "'");
}

template <int D>
WeightSpec<D> build_weight(const json& spec) {
  const std::string kind = spec.at("kind");
  const json& p = spec.at("params");
  if (kind == "constant") return WeightSpec<D>::constant(p.at("c").get<double>());
  if (kind == "power") return WeightSpec<D>::power(p.at("c").get<double>(), p.at("alpha").get<double>());
  if (kind == "band") return WeightSpec<D>::band(p.at("lo").get<double>(), p.at("hi").get<double>(), p.at("c").get<double>());
  throw Error(ErrorKind::ConfigError, "unknown weight kind '" + kind + "'");
}

template <int D>
DensitySpec<D> build_density(const json& spec, const Body<D>& region, const SphereRule<D>& rule) {
  const std::string kind = spec.at("kind");
  const json& p = spec.at("params");
  if (kind == "uniform") return DensitySpec<D>::uniform(region, rule);
  if (kind == "radial_power") {
    std::optional<double> c;
    if (p.contains("c")) c = p.at("c").get<double>();
    return DensitySpec<D>::radial_power(region, p.at("beta").get<double>(), c, rule);
  }
  if (kind == "induced_polar") {
    return DensitySpec<D>::induced_polar(build_weight<D>(p.at("q")), build_body<D>(p.at("body")), rule);
  }
  throw Error(ErrorKind::ConfigError, "unknown density kind '" + kind + "'");
}

/// Typed experiment configuration. Construction errors of bodies and
/// weights surface as ConfigError.
template <int D>
ExperimentConfig<D> build_experiment(const RunConfig& rc, unsigned threads = default_threads()) {
  if (rc.dim != D) throw Error(ErrorKind::ConfigError, "dimension mismatch");
  ExperimentConfig<D> cfg;
  try {
    cfg.mode = rc.mode;
    cfg.body = build_body<D>(rc.body);
    cfg.q = build_weight<D>(rc.q);
    cfg.lambda = build_weight<D>(rc.lambda);
    cfg.n_grid = rc.n_grid;
    cfg.trials = rc.trials;
    cfg.seed = rc.seed;
    cfg.quad_m = rc.quad_m;
    cfg.out_path = rc.out;
    cfg.threads = threads;
    if (cfg.quad_m < ExperimentConfig<D>::kMinQuadM) throw Error(ErrorKind::ConfigError, "quad_m must be >= 64");
    const auto rule = sphere_rule<D>(cfg.quad_m);
    if (!rc.rho.is_null()) cfg.rho = build_density<D>(rc.rho, cfg.body, rule);
    if (cfg.mode == Mode::CircumscribedVolume) validate_hyperplane_weight<D>(cfg.body, cfg.q, rule);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    throw Error(ErrorKind::ConfigError, e.what());
  }
  cfg.validate();
  return cfg;
}

}  // namespace randpoly
