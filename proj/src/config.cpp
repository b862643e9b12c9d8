#include "faultsim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "faultsim/error.hpp"

namespace faultsim::scenario {

using nlohmann::json;

namespace {

// Pulls known keys out of one object; finish() rejects the rest.
class Reader {
 public:
  Reader(const json &j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  template <class T>
  void get(const char *key, T &out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception &e) {
      throw ConfigError(where() + "." + key + ": " + e.what());
    }
  }

  void get_opt(const char *key, std::optional<double> &out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) { out.reset(); return; }
    double v = 0;
    get(key, v);
    out = v;
  }

  void get_opt(const char *key, std::optional<int> &out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) { out.reset(); return; }
    int v = 0;
    get(key, v);
    out = v;
  }

  // Sub-object reader, or nullopt when the key is absent.
  std::optional<Reader> child(const char *key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Reader(*it, where() + "." + key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(where() + ": unknown key '" + it.key() + "'");
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  const json &j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string law_name(friction::StateLaw l) {
  return l == friction::StateLaw::ruina ? "ruina" : "dieterich";
}

friction::StateLaw parse_law(const std::string &s) {
  if (s == "dieterich") return friction::StateLaw::dieterich;
  if (s == "ruina") return friction::StateLaw::ruina;
  throw ConfigError("friction.law: expected dieterich or ruina, got '" + s + "'");
}

Exec parse_exec(const std::string &s) {
  if (s == "serial") return Exec::serial;
  if (s == "parallel") return Exec::parallel;
  throw ConfigError("solver.exec: expected serial or parallel, got '" + s + "'");
}

json opt_json(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }
json opt_json(const std::optional<int> &v) { return v ? json(*v) : json(nullptr); }

}  // namespace

void ScenarioConfig::validate() const {
  if (layers.size() < 3) throw ConfigError("geometry.layers: need at least two bodies");
  for (std::size_t i = 1; i < layers.size(); ++i)
    if (!(layers[i] > layers[i - 1]))
      throw ConfigError("geometry.layers: must be strictly increasing");
  if (!(x_max > x_min)) throw ConfigError("geometry: x_max must exceed x_min");
  if (!(h0 > 0)) throw ConfigError("mesh.h0 must be positive");
  if (!(mesh.h_min > 0)) throw ConfigError("mesh.h_min must be positive");
  if (!(mesh.grading >= 0)) throw ConfigError("mesh.grading must be nonnegative");
  if (mesh.level_cap < 0) throw ConfigError("mesh.level_cap must be nonnegative");
  if (mesh.max_levels && *mesh.max_levels < 0)
    throw ConfigError("mesh.refinements must be nonnegative");
  if (!sigma_n.empty() && static_cast<int>(sigma_n.size()) != num_faults())
    throw ConfigError("friction.sigma_n: expected " + std::to_string(num_faults()) +
                      " values (one per fault)");
  for (double s : sigma_n)
    if (!(s > 0)) throw ConfigError("friction.sigma_n must be positive");
  if (!(time.delta_tau > 0)) throw ConfigError("time.delta_tau must be positive");
  if (!(time.tau_min > 0)) throw ConfigError("time.tau_min must be positive");
  if (time.max_time && !(*time.max_time >= 0)) throw ConfigError("time.max_time must be >= 0");
  if (!(loading.T0 > 0)) throw ConfigError("loading.T0 must be positive");
  if (!(output.snapshot_every >= 1)) throw ConfigError("output.snapshot_every must be >= 1");
  if (output.checkpoint_every < 0) throw ConfigError("output.checkpoint_every must be >= 0");
  for (double l : output.contour_levels)
    if (!(l > 0)) throw ConfigError("output.contour_levels must be positive");
  try {
    material.validate();
    friction::FrictionParams f = friction;
    if (f.sigma_n <= 0) f.sigma_n = 1.0;
    f.validate();
    solver.validate();
  } catch (const ConfigError &) {
    throw;
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }
}

json to_json(const ScenarioConfig &c) {
  json j;
  j["name"] = c.name;
  j["geometry"] = {{"x_min", c.x_min}, {"x_max", c.x_max}, {"layers", c.layers}};
  j["mesh"] = {{"h0", c.h0},
               {"h_min", c.mesh.h_min},
               {"grading", c.mesh.grading},
               {"level_cap", c.mesh.level_cap},
               {"refinements", opt_json(c.mesh.max_levels)}};
  const auto &m = c.material;
  j["material"] = {{"E", m.E},     {"nu", m.nu},   {"rho", m.rho},
                   {"g", m.g},     {"c_A", m.c_A}, {"lumped_mass", m.lumped_mass}};
  const auto &f = c.friction;
  j["friction"] = {{"V0", f.V0}, {"mu0", f.mu0}, {"a", f.a},          {"b", f.b},
                   {"L", f.L},   {"law", law_name(f.law)}, {"sigma_n", c.sigma_n}};
  j["loading"] = {{"v_D", c.loading.v_D}, {"T0", c.loading.T0},
                  {"smooth_ramp", c.loading.smooth_ramp}};
  j["alpha0"] = c.alpha0;
  j["time"] = {{"delta_tau", c.time.delta_tau},
               {"tau_min", c.time.tau_min},
               {"max_time", opt_json(c.time.max_time)}};
  const auto &s = c.solver;
  j["solver"] = {{"omega", s.omega},
                 {"fp_tol_factor", s.fp_tol_factor},
                 {"mg_tol", s.mg_tol},
                 {"vcycles", s.vcycles},
                 {"pre_smooth", s.pre_smooth},
                 {"post_smooth", s.post_smooth},
                 {"smoother_damping", s.smoother_damping},
                 {"state_tol", s.state_tol},
                 {"tnnmg_cap", s.tnnmg_cap},
                 {"fp_cap", s.fp_cap},
                 {"scalar_bound_gs", s.scalar_bound_gs},
                 {"stiff_truncation", s.stiff_truncation},
                 {"reuse_coarse", s.reuse_coarse},
                 {"exec", s.exec == Exec::parallel ? "parallel" : "serial"}};
  j["update_coupling"] = c.update_coupling;
  const auto &o = c.output;
  j["output"] = {{"directory", o.directory},
                 {"snapshot_tau", o.snapshot_tau},
                 {"snapshot_every", o.snapshot_every},
                 {"checkpoint_every", o.checkpoint_every},
                 {"contour_levels", o.contour_levels}};
  return j;
}

ScenarioConfig from_json(const json &j) {
  ScenarioConfig c;
  Reader r(j, "");
  r.get("name", c.name);
  if (auto g = r.child("geometry")) {
    g->get("x_min", c.x_min);
    g->get("x_max", c.x_max);
    g->get("layers", c.layers);
    g->finish();
  }
  if (auto m = r.child("mesh")) {
    m->get("h0", c.h0);
    m->get("h_min", c.mesh.h_min);
    m->get("grading", c.mesh.grading);
    m->get("level_cap", c.mesh.level_cap);
    m->get_opt("refinements", c.mesh.max_levels);
    m->finish();
  }
  if (auto m = r.child("material")) {
    m->get("E", c.material.E);
    m->get("nu", c.material.nu);
    m->get("rho", c.material.rho);
    m->get("g", c.material.g);
    m->get("c_A", c.material.c_A);
    m->get("lumped_mass", c.material.lumped_mass);
    m->finish();
  }
  if (auto f = r.child("friction")) {
    f->get("V0", c.friction.V0);
    f->get("mu0", c.friction.mu0);
    f->get("a", c.friction.a);
    f->get("b", c.friction.b);
    f->get("L", c.friction.L);
    std::string law = law_name(c.friction.law);
    f->get("law", law);
    c.friction.law = parse_law(law);
    f->get("sigma_n", c.sigma_n);
    f->finish();
  }
  if (auto l = r.child("loading")) {
    l->get("v_D", c.loading.v_D);
    l->get("T0", c.loading.T0);
    l->get("smooth_ramp", c.loading.smooth_ramp);
    l->finish();
  }
  r.get("alpha0", c.alpha0);
  if (auto t = r.child("time")) {
    t->get("delta_tau", c.time.delta_tau);
    t->get("tau_min", c.time.tau_min);
    t->get_opt("max_time", c.time.max_time);
    t->finish();
  }
  if (auto s = r.child("solver")) {
    auto &v = c.solver;
    s->get("omega", v.omega);
    s->get("fp_tol_factor", v.fp_tol_factor);
    s->get("mg_tol", v.mg_tol);
    s->get("vcycles", v.vcycles);
    s->get("pre_smooth", v.pre_smooth);
    s->get("post_smooth", v.post_smooth);
    s->get("smoother_damping", v.smoother_damping);
    s->get("state_tol", v.state_tol);
    s->get("tnnmg_cap", v.tnnmg_cap);
    s->get("fp_cap", v.fp_cap);
    s->get("scalar_bound_gs", v.scalar_bound_gs);
    s->get("stiff_truncation", v.stiff_truncation);
    s->get("reuse_coarse", v.reuse_coarse);
    std::string exec = v.exec == Exec::parallel ? "parallel" : "serial";
    s->get("exec", exec);
    v.exec = parse_exec(exec);
    s->finish();
  }
  r.get("update_coupling", c.update_coupling);
  if (auto o = r.child("output")) {
    o->get("directory", c.output.directory);
    o->get("snapshot_tau", c.output.snapshot_tau);
    o->get("snapshot_every", c.output.snapshot_every);
    o->get("checkpoint_every", c.output.checkpoint_every);
    o->get("contour_levels", c.output.contour_levels);
    o->finish();
  }
  r.finish();
  c.validate();
  return c;
}

ScenarioConfig preset(const std::string &name) {
  ScenarioConfig c;
  if (name == "spring_slider") {
    c.name = name;
    c.layers = {-1.0, 0.0, 1.0};
  } else if (name == "layered_5body") {
    c.name = name;
    c.layers = {-1.345, -0.345, -0.045, 0.045, 0.345, 1.345};
  } else {
    throw ConfigError("unknown preset '" + name + "' (spring_slider, layered_5body)");
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::string &path, const std::optional<std::string> &preset_name) {
  json base = to_json(preset(preset_name.value_or("spring_slider")));
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json patch;
  try {
    patch = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error &e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!patch.is_object()) throw ConfigError(path + ": top level must be an object");
  json merged = base;
  merged.merge_patch(patch);
  return from_json(merged);
}

ModelSpec model_spec(const ScenarioConfig &c) {
  c.validate();
  ModelSpec s;
  s.subdomains = mesh::layered_spec(c.x_min, c.x_max, c.layers);
  s.h0 = c.h0;
  s.refinement = c.mesh;
  s.material = c.material;
  s.loading = c.loading;
  s.alpha0 = c.alpha0;
  s.exec = c.solver.exec;
  const auto sigma = c.sigma_n.empty() ? lithostatic_sigma(s.subdomains, c.material) : c.sigma_n;
  for (double sn : sigma) {
    friction::FrictionParams f = c.friction;
    f.sigma_n = sn;
    s.friction.push_back(f);
  }
  return s;
}

}  // namespace faultsim::scenario
