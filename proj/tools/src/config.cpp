#include "dthsem/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace dth::cli {
namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": not finite");
  return x;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

// A number or an array of numbers.
Vector vector(const json& v, const std::string& where) {
  if (v.is_number()) return Vector::Constant(1, number(v, where));
  if (!v.is_array() || v.empty()) throw ConfigError(where + ": expected a number or array");
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = number(v[i], where + "[" + std::to_string(i) + "]");
  }
  return out;
}

template <class T>
void read(const json& obj, const char* key, T& dst, const std::string& where) {
  if (!obj.contains(key)) return;
  const std::string w = where + "." + key;
  if constexpr (std::is_same_v<T, int>) {
    dst = integer(obj[key], w);
  } else if constexpr (std::is_same_v<T, double>) {
    dst = number(obj[key], w);
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!obj[key].is_string()) throw ConfigError(w + ": expected a string");
    dst = obj[key].get<std::string>();
  }
}

WpRule parse_wp_rule(const std::string& s) {
  if (s == "fixed") return WpRule::fixed;
  if (s == "energy") return WpRule::energy;
  if (s == "lambda_target") return WpRule::lambda_target;
  throw ConfigError("map.wp_rule: expected fixed, energy or lambda_target");
}

}  // namespace

BranchPolicy parse_policy(const std::string& name) {
  if (name == "smallest") return BranchPolicy::smallest;
  if (name == "follow-ghost" || name == "follow_ghost") return BranchPolicy::follow_ghost;
  throw ConfigError("policy: expected smallest or follow-ghost");
}

Config parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, {"model", "state", "initial", "steps", "tolerances", "policy", "delta", "shrink",
                    "safety_factor", "search_radius", "bounds", "bounds_path", "outputs", "seed",
                    "scan", "map", "verify"},
             "config");
  Config c;

  if (root.contains("model")) {
    const json& m = root["model"];
    if (m.is_string()) {
      c.model.name = m.get<std::string>();
    } else {
      check_keys(m, {"name", "params"}, "model");
      read(m, "name", c.model.name, "model");
      if (m.contains("params")) {
        check_keys(m["params"], {"omega", "dof"}, "model.params");
        for (auto it = m["params"].begin(); it != m["params"].end(); ++it) {
          c.model.params[it.key()] = number(it.value(), "model.params." + it.key());
        }
      }
    }
  }

  if (root.contains("state")) c.state = vector(root["state"], "state");
  if (root.contains("initial")) {
    const json& in = root["initial"];
    check_keys(in, {"q0", "p0", "t0", "wp0", "lambda_target"}, "initial");
    if (!in.contains("q0") || !in.contains("p0")) throw ConfigError("initial: q0 and p0 are required");
    InitialSpec s;
    s.q0 = vector(in["q0"], "initial.q0");
    s.p0 = vector(in["p0"], "initial.p0");
    read(in, "t0", s.t0, "initial");
    if (in.contains("wp0")) s.wp0 = number(in["wp0"], "initial.wp0");
    if (in.contains("lambda_target")) s.lambda_target = number(in["lambda_target"], "initial.lambda_target");
    c.initial = s;
  }

  read(root, "steps", c.steps, "config");
  if (root.contains("tolerances")) {
    const json& t = root["tolerances"];
    check_keys(t, {"tol_g", "tol_lambda"}, "tolerances");
    read(t, "tol_g", c.tol_g, "tolerances");
    read(t, "tol_lambda", c.tol_lambda, "tolerances");
  }
  if (root.contains("policy")) {
    if (!root["policy"].is_string()) throw ConfigError("policy: expected a string");
    c.policy = parse_policy(root["policy"].get<std::string>());
  }
  read(root, "delta", c.delta, "config");
  read(root, "shrink", c.shrink, "config");
  read(root, "safety_factor", c.safety_factor, "config");
  read(root, "search_radius", c.search_radius, "config");

  if (root.contains("bounds")) {
    const json& b = root["bounds"];
    check_keys(b, {"center", "radius", "samples"}, "bounds");
    if (b.contains("center")) c.bounds.center = vector(b["center"], "bounds.center");
    if (b.contains("radius")) c.bounds.radius = number(b["radius"], "bounds.radius");
    read(b, "samples", c.bounds.samples, "bounds");
  }
  read(root, "bounds_path", c.bounds.path, "config");

  if (root.contains("outputs")) {
    const json& o = root["outputs"];
    check_keys(o, {"dir", "trajectory_csv", "events_json", "scan_csv", "map_csv", "bounds_json"},
               "outputs");
    read(o, "dir", c.outputs.dir, "outputs");
    read(o, "trajectory_csv", c.outputs.trajectory_csv, "outputs");
    read(o, "events_json", c.outputs.events_json, "outputs");
    read(o, "scan_csv", c.outputs.scan_csv, "outputs");
    read(o, "map_csv", c.outputs.map_csv, "outputs");
    read(o, "bounds_json", c.outputs.bounds_json, "outputs");
  }
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
    c.seed = root["seed"].get<std::uint64_t>();
  }

  if (root.contains("scan")) {
    const json& s = root["scan"];
    check_keys(s, {"state", "lambda_min", "lambda_max", "count"}, "scan");
    if (s.contains("state")) c.scan.state = vector(s["state"], "scan.state");
    read(s, "lambda_min", c.scan.lambda_min, "scan");
    read(s, "lambda_max", c.scan.lambda_max, "scan");
    read(s, "count", c.scan.count, "scan");
  }

  if (root.contains("map")) {
    const json& m = root["map"];
    check_keys(m, {"q_min", "q_max", "p_min", "p_max", "nq", "np", "t", "wp_rule", "wp", "energy",
                   "lambda_target", "threads"},
               "map");
    read(m, "q_min", c.map.q_min, "map");
    read(m, "q_max", c.map.q_max, "map");
    read(m, "p_min", c.map.p_min, "map");
    read(m, "p_max", c.map.p_max, "map");
    read(m, "nq", c.map.nq, "map");
    read(m, "np", c.map.np, "map");
    read(m, "t", c.map.t, "map");
    if (m.contains("wp_rule")) {
      if (!m["wp_rule"].is_string()) throw ConfigError("map.wp_rule: expected a string");
      c.map.wp_rule = parse_wp_rule(m["wp_rule"].get<std::string>());
    }
    read(m, "wp", c.map.wp, "map");
    read(m, "energy", c.map.energy, "map");
    read(m, "lambda_target", c.map.lambda_target, "map");
    if (m.contains("threads")) {
      const int th = integer(m["threads"], "map.threads");
      if (th < 0) throw ConfigError("map.threads: must be >= 0");
      c.map.threads = static_cast<unsigned>(th);
    }
  }

  if (root.contains("verify")) {
    const json& v = root["verify"];
    check_keys(v, {"k_scale", "samples", "grid"}, "verify");
    read(v, "k_scale", c.verify.k_scale, "verify");
    read(v, "samples", c.verify.samples, "verify");
    read(v, "grid", c.verify.grid, "verify");
  }

  validate(c);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate(const Config& c) {
  if (c.steps < 1) throw ConfigError("steps: must be >= 1");
  if (!(c.tol_g > 0.0)) throw ConfigError("tolerances.tol_g: must be positive");
  if (!(c.tol_lambda > 0.0)) throw ConfigError("tolerances.tol_lambda: must be positive");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ConfigError("delta: must lie in (0, 1)");
  if (!(c.shrink > 0.0 && c.shrink < 1.0)) throw ConfigError("shrink: must lie in (0, 1)");
  if (!(c.safety_factor >= 1.0)) throw ConfigError("safety_factor: must be >= 1");
  if (c.search_radius < 0.0) throw ConfigError("search_radius: must be >= 0");
  if (c.bounds.radius && !(*c.bounds.radius > 0.0)) throw ConfigError("bounds.radius: must be positive");
  if (c.bounds.samples < 2) throw ConfigError("bounds.samples: must be >= 2");
  if (c.state && c.initial) throw ConfigError("give either state or initial, not both");
  if (c.initial) {
    const InitialSpec& s = *c.initial;
    if (s.q0.size() != s.p0.size()) throw ConfigError("initial: q0 and p0 differ in length");
    if (s.wp0.has_value() == s.lambda_target.has_value()) {
      throw ConfigError("initial: give exactly one of wp0 and lambda_target");
    }
    if (s.lambda_target && !(*s.lambda_target > 0.0)) {
      throw ConfigError("initial.lambda_target: must be positive");
    }
  }
  if (c.scan.count < 1) throw ConfigError("scan.count: must be >= 1");
  if (!(c.scan.lambda_min <= c.scan.lambda_max)) throw ConfigError("scan: lambda_min > lambda_max");
  if (c.map.nq < 2 || c.map.np < 2) throw ConfigError("map: nq and np must be >= 2");
  if (!(c.map.q_min < c.map.q_max) || !(c.map.p_min < c.map.p_max)) {
    throw ConfigError("map: empty grid range");
  }
  if (c.map.wp_rule == WpRule::lambda_target && !(c.map.lambda_target > 0.0)) {
    throw ConfigError("map.lambda_target: must be positive");
  }
  if (!(c.verify.k_scale > 0.0)) throw ConfigError("verify.k_scale: must be positive");
  if (c.verify.samples < 1 || c.verify.grid < 2) {
    throw ConfigError("verify: samples must be >= 1 and grid >= 2");
  }
}

std::shared_ptr<const HamiltonianModel> build_model(const Config& c) {
  try {
    return make_model(c.model.name, c.model.params);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

Constants build_constants(const Config& c, const HamiltonianModel& model,
                          const Vector& default_center, double default_radius) {
  Constants out;
  if (!c.bounds.path.empty()) {
    std::string text;
    try {
      text = read_text_file(c.bounds.path);
      out.bounds = bounds_from_json(text);
    } catch (const Error& e) {
      throw ConfigError(std::string("bounds_path: ") + e.what());
    }
    if (out.bounds.center.size() != model.dim()) {
      throw ConfigError("bounds_path: centre has the wrong dimension for this model");
    }
  } else {
    const Vector center = c.bounds.center.value_or(default_center);
    if (center.size() != model.dim()) {
      throw ConfigError("bounds.center: expected " + std::to_string(model.dim()) + " entries");
    }
    const double radius = c.bounds.radius.value_or(default_radius);
    try {
      out.bounds = with_safety_factor(estimate_bounds(model, center, radius, c.bounds.samples),
                                      c.safety_factor);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("bounds: ") + e.what());
    }
  }
  out.derived = derive_constants(out.bounds, c.delta);
  return out;
}

StepOptions step_options(const Config& c, const DerivedConstants& constants) {
  StepOptions o;
  o.constants = constants;
  o.prediction.shrink = c.shrink;
  o.prediction.zero_tol = c.tol_g;
  o.solve.tol_g = c.tol_g;
  o.solve.tol_lambda = c.tol_lambda;
  o.policy = c.policy;
  o.search_radius = c.search_radius;
  return o;
}

Vector initial_state(const Config& c, const HamiltonianModel& model, const StepOptions& options) {
  const int n = model.dof();
  if (c.state) {
    if (c.state->size() != model.dim()) {
      throw ConfigError("state: expected " + std::to_string(model.dim()) + " entries");
    }
    return *c.state;
  }
  if (!c.initial) throw ConfigError("no initial state: give state or initial");
  const InitialSpec& s = *c.initial;
  if (s.q0.size() != n) throw ConfigError("initial: q0 and p0 need " + std::to_string(n) + " entries");
  double wp = 0.0;
  if (s.wp0) {
    wp = *s.wp0;
  } else {
    try {
      wp = choose_conjugate_momentum(model, s.q0, s.t0, s.p0, *s.lambda_target, options);
    } catch (const UnsupportedRegionError& e) {
      throw ConfigError(std::string("initial.lambda_target: ") + e.what());
    }
  }
  return ExtendedState::from_parts(s.q0, s.t0, s.p0, wp).coords();
}

}  // namespace dth::cli
