#include "fishschool/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "fishschool/diagnostics.hpp"
#include "fishschool/io.hpp"

namespace fishschool {

using json = nlohmann::ordered_json;

double ScenarioSpec::diameter_bound() const {
  return schooling_diameter_bound.value_or(default_schooling_diameter_bound(params));
}

void ScenarioSpec::validate() const {
  if (name.empty()) throw InvalidParameter("scenario name must not be empty");
  if (!(init_box.lo < init_box.hi) || !std::isfinite(init_box.lo) || !std::isfinite(init_box.hi)) {
    throw InvalidParameter("init_box must satisfy lo < hi");
  }
  if (!v0.empty() && v0.size() != params.dim()) {
    throw InvalidParameter("v0 must be empty or have one entry per dimension");
  }
  if (replicates < 1) throw InvalidParameter("replicates must be >= 1");
  if (schooling_diameter_bound && !(*schooling_diameter_bound > 0.0)) {
    throw InvalidParameter("schooling_diameter_bound must be > 0");
  }
  if (lyapunov && !(lyapunov->M > 0.0 && lyapunov->k > 0.0)) {
    throw InvalidParameter("lyapunov.M and lyapunov.k must be > 0");
  }
  if (sweep && sweep->values.empty()) throw InvalidParameter("sweep needs at least one value");
  integrator.validate(params);
}

namespace {

ScenarioSpec schooling(std::string name, std::size_t dim, double t_end,
                       std::vector<double> snapshots) {
  IntegratorConfig integ;
  integ.scheme = Scheme::euler_maruyama;
  integ.dt = 1e-3;
  integ.adaptive = true;
  integ.t_end = t_end;
  integ.record_every = 100;
  ScenarioSpec spec{
      std::move(name),
      "100 particles, weak noise, drag 5: robustness of schooling in " + std::to_string(dim) + "-D",
      ModelParams({1.0, 0.5, 1.0, 3.0, 4.0}, dim, 100, 0.015),
      ExternalForceSpec::linear_drag(5.0),
      {0.0, 10.0},
      std::vector<double>(dim, 0.0),
      integ,
      10,
      std::nullopt,
      std::nullopt,
      std::move(snapshots),
      std::nullopt};
  return spec;
}

ScenarioSpec collision_1d() {
  IntegratorConfig integ;
  integ.scheme = Scheme::euler_maruyama;
  integ.dt = 1e-3;
  integ.adaptive = true;
  integ.t_end = 10.0;
  integ.record_every = 10;
  return ScenarioSpec{"collision-1d",
                      "two particles on a line, drag 1; sweep sigma over {0, 0.15, 5}",
                      ModelParams({5.0, 1.0, 0.5, 3.0, 4.0}, 1, 2, 0.0),
                      ExternalForceSpec::linear_drag(1.0),
                      {0.0, 1.0},
                      {0.0},
                      integ,
                      100,
                      std::nullopt,
                      std::nullopt,
                      {0.0, 2.5, 5.0, 7.5, 10.0},
                      SweepSpec{"sigma", {0.0, 0.15, 5.0}}};
}

ScenarioSpec collision_2d() {
  IntegratorConfig integ;
  integ.scheme = Scheme::euler_maruyama;
  integ.dt = 1e-3;
  integ.adaptive = true;
  integ.t_end = 10.0;
  integ.record_every = 10;
  return ScenarioSpec{"collision-2d",
                      "two particles in the plane, strong noise sigma=9, drag 5",
                      ModelParams({7.0, 19.0, 1.0, 3.0, 4.0}, 2, 2, 9.0),
                      ExternalForceSpec::linear_drag(5.0),
                      {0.0, 5.0},
                      {0.0, 0.0},
                      integ,
                      100,
                      std::nullopt,
                      std::nullopt,
                      {0.0, 2.5, 5.0, 7.5, 10.0},
                      std::nullopt};
}

// --- json helpers ---------------------------------------------------------

void require_keys(const json& j, std::string_view where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw InvalidParameter(std::string(where) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) ==
        allowed.end()) {
      throw InvalidParameter("unknown key '" + key + "' in " + std::string(where));
    }
  }
}

template <typename T>
T get(const json& j, const char* key, std::string_view where) {
  if (!j.contains(key)) throw InvalidParameter("missing key '" + std::string(key) + "' in " + std::string(where));
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter("bad value for " + std::string(where) + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, std::string_view where) {
  return j.contains(key) ? get<T>(j, key, where) : fallback;
}

std::string_view kind_name(ExternalForceSpec::Kind kind) {
  return kind == ExternalForceSpec::Kind::linear_drag ? "linear_drag" : "none";
}

json params_to_json(const ModelParams& p) {
  json j;
  j["alpha"] = p.alpha();
  j["beta"] = p.beta();
  j["r"] = p.r();
  j["p"] = p.p();
  j["q"] = p.q();
  const auto sigma = p.sigma();
  if (std::all_of(sigma.begin(), sigma.end(), [&](double s) { return s == sigma.front(); })) {
    j["sigma"] = sigma.front();
  } else {
    j["sigma"] = std::vector<double>(sigma.begin(), sigma.end());
  }
  j["n_particles"] = p.n_particles();
  j["dim"] = p.dim();
  return j;
}

ModelParams params_from_json(const json& j) {
  require_keys(j, "params", {"alpha", "beta", "r", "p", "q", "sigma", "n_particles", "dim"});
  Interaction c{get<double>(j, "alpha", "params"), get<double>(j, "beta", "params"),
                get<double>(j, "r", "params"), get<double>(j, "p", "params"),
                get<double>(j, "q", "params")};
  const auto n = get<std::size_t>(j, "n_particles", "params");
  const auto dim = get<std::size_t>(j, "dim", "params");
  const auto& sigma = j.at("sigma");
  if (sigma.is_number()) return ModelParams(c, dim, n, sigma.get<double>());
  auto values = get<std::vector<double>>(j, "sigma", "params");
  if (values.size() != n) {
    throw InvalidParameter("params.sigma has " + std::to_string(values.size()) +
                           " entries but n_particles = " + std::to_string(n));
  }
  return ModelParams(c, dim, std::move(values));
}

json integrator_to_json(const IntegratorConfig& c) {
  json j;
  j["scheme"] = std::string(to_string(c.scheme));
  j["dt"] = c.dt;
  j["adaptive"] = c.adaptive;
  j["dt_min"] = c.dt_min;
  j["close_approach_factor"] = c.close_approach_factor;
  j["stiffness_safety"] = c.stiffness_safety;
  j["t_end"] = c.t_end;
  j["seed"] = c.seed;
  j["record_every"] = c.record_every;
  if (c.collision_eps) j["collision_eps"] = *c.collision_eps;
  j["overflow_bound"] = c.overflow_bound;
  if (c.min_separation) j["min_separation"] = *c.min_separation;
  j["threads"] = c.threads;
  return j;
}

IntegratorConfig integrator_from_json(const json& j) {
  constexpr std::string_view where = "integrator";
  require_keys(j, where,
               {"scheme", "dt", "adaptive", "dt_min", "close_approach_factor", "stiffness_safety",
                "t_end", "seed", "record_every", "collision_eps", "overflow_bound",
                "min_separation", "threads"});
  IntegratorConfig c;
  c.scheme = parse_scheme(get_or<std::string>(j, "scheme", std::string(to_string(c.scheme)), where));
  c.dt = get_or(j, "dt", c.dt, where);
  c.adaptive = get_or(j, "adaptive", c.adaptive, where);
  c.dt_min = get_or(j, "dt_min", c.dt_min, where);
  c.close_approach_factor = get_or(j, "close_approach_factor", c.close_approach_factor, where);
  c.stiffness_safety = get_or(j, "stiffness_safety", c.stiffness_safety, where);
  c.t_end = get_or(j, "t_end", c.t_end, where);
  c.seed = get_or(j, "seed", c.seed, where);
  c.record_every = get_or(j, "record_every", c.record_every, where);
  if (j.contains("collision_eps")) c.collision_eps = get<double>(j, "collision_eps", where);
  c.overflow_bound = get_or(j, "overflow_bound", c.overflow_bound, where);
  if (j.contains("min_separation")) c.min_separation = get<double>(j, "min_separation", where);
  c.threads = get_or(j, "threads", c.threads, where);
  return c;
}

// Collects dotted paths of every leaf whose last segment equals `name`.
void find_leaves(const json& node, const std::string& prefix, std::string_view name,
                 std::vector<std::string>& hits) {
  if (!node.is_object()) return;
  for (const auto& [key, child] : node.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (key == name) hits.push_back(path);
    find_leaves(child, path, name, hits);
  }
}

}  // namespace

std::vector<ScenarioSpec> builtin_scenarios() {
  return {schooling("schooling-2d", 2, 15.0, {0.0, 5.0, 10.0, 15.0}),
          schooling("schooling-3d", 3, 30.0, {0.0, 10.0, 20.0, 30.0}), collision_1d(),
          collision_2d()};
}

std::optional<ScenarioSpec> find_builtin(std::string_view name) {
  for (auto& s : builtin_scenarios()) {
    if (s.name == name) return s;
  }
  return std::nullopt;
}

json to_json(const ScenarioSpec& spec) {
  json j;
  j["name"] = spec.name;
  j["description"] = spec.description;
  j["params"] = params_to_json(spec.params);
  j["external"] = {{"kind", std::string(kind_name(spec.external.kind))},
                   {"drag_coefficient", spec.external.drag_coefficient}};
  j["init_box"] = {{"lo", spec.init_box.lo}, {"hi", spec.init_box.hi}};
  j["v0"] = spec.v0;
  j["integrator"] = integrator_to_json(spec.integrator);
  j["replicates"] = spec.replicates;
  if (spec.schooling_diameter_bound) {
    j["classify"] = {{"schooling_diameter_bound", *spec.schooling_diameter_bound}};
  }
  if (spec.lyapunov) {
    j["lyapunov"] = {{"M", spec.lyapunov->M}, {"theta", spec.lyapunov->theta}, {"k", spec.lyapunov->k}};
  }
  j["snapshot_times"] = spec.snapshot_times;
  if (spec.sweep) j["sweep"] = {{"key", spec.sweep->key}, {"values", spec.sweep->values}};
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  require_keys(j, "scenario",
               {"name", "description", "params", "external", "init_box", "v0", "integrator",
                "replicates", "classify", "lyapunov", "snapshot_times", "sweep"});
  if (!j.contains("params")) throw InvalidParameter("missing key 'params' in scenario");
  auto params = params_from_json(j.at("params"));

  ExternalForceSpec external;
  if (j.contains("external")) {
    const auto& e = j.at("external");
    require_keys(e, "external", {"kind", "drag_coefficient"});
    const auto kind = get_or<std::string>(e, "kind", "none", "external");
    if (kind == "none") {
      external = ExternalForceSpec::none();
    } else if (kind == "linear_drag") {
      external = ExternalForceSpec::linear_drag(get<double>(e, "drag_coefficient", "external"));
    } else {
      throw InvalidParameter("unknown external force kind '" + kind + "'");
    }
  }

  InitBox box;
  if (j.contains("init_box")) {
    const auto& b = j.at("init_box");
    require_keys(b, "init_box", {"lo", "hi"});
    box = {get<double>(b, "lo", "init_box"), get<double>(b, "hi", "init_box")};
  }

  ScenarioSpec spec{get_or<std::string>(j, "name", "custom", "scenario"),
                    get_or<std::string>(j, "description", "", "scenario"),
                    std::move(params),
                    external,
                    box,
                    get_or<std::vector<double>>(j, "v0", {}, "scenario"),
                    j.contains("integrator") ? integrator_from_json(j.at("integrator"))
                                             : IntegratorConfig{},
                    get_or<std::size_t>(j, "replicates", 1, "scenario"),
                    std::nullopt,
                    std::nullopt,
                    get_or<std::vector<double>>(j, "snapshot_times", {}, "scenario"),
                    std::nullopt};
  if (j.contains("classify")) {
    const auto& c = j.at("classify");
    require_keys(c, "classify", {"schooling_diameter_bound"});
    if (c.contains("schooling_diameter_bound")) {
      spec.schooling_diameter_bound = get<double>(c, "schooling_diameter_bound", "classify");
    }
  }
  if (j.contains("lyapunov")) {
    const auto& l = j.at("lyapunov");
    require_keys(l, "lyapunov", {"M", "theta", "k"});
    LyapunovConfig cfg;
    cfg.M = get_or(l, "M", default_lyapunov_M(spec.params), "lyapunov");
    cfg.theta = get_or(l, "theta", cfg.theta, "lyapunov");
    cfg.k = get_or(l, "k", cfg.k, "lyapunov");
    spec.lyapunov = cfg;
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    require_keys(s, "sweep", {"key", "values"});
    spec.sweep = SweepSpec{get<std::string>(s, "key", "sweep"),
                           get<std::vector<double>>(s, "values", "sweep")};
  }
  spec.validate();
  return spec;
}

void apply_override(json& tree, std::string_view key, std::string_view value) {
  if (key.empty()) throw InvalidParameter("empty override key");
  std::string path(key);
  if (path.find('.') == std::string::npos && !tree.contains(path)) {
    std::vector<std::string> hits;
    find_leaves(tree, "", key, hits);
    if (hits.empty()) throw InvalidParameter("unknown override key '" + path + "'");
    if (hits.size() > 1) {
      std::string all;
      for (const auto& h : hits) all += (all.empty() ? "" : ", ") + h;
      throw InvalidParameter("ambiguous override key '" + path + "' (matches " + all + ")");
    }
    path = hits.front();
  }

  json parsed = json::parse(value.begin(), value.end(), nullptr, false);
  if (parsed.is_discarded()) parsed = std::string(value);

  json* node = &tree;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string segment = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (segment.empty()) throw InvalidParameter("malformed override key '" + path + "'");
    if (!node->is_object()) throw InvalidParameter("override key '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[segment] = parsed;
      return;
    }
    node = &(*node)[segment];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

void apply_override(json& tree, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw InvalidParameter("override must look like key=value, got '" + std::string(assignment) + "'");
  }
  apply_override(tree, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open scenario file");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw InvalidParameter(path.string() + ": not valid JSON");
  return scenario_from_json(j);
}

void save_scenario_file(const ScenarioSpec& spec, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot open for writing");
  out << to_json(spec).dump(2) << '\n';
  if (!out) throw IoError(path, "write failed");
}

}  // namespace fishschool
