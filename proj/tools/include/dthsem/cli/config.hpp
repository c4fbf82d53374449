#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include <dthsem/dthsem.hpp>

namespace dth::cli {

/// Malformed or inconsistent configuration. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelSpec {
  std::string name = "pendulum";
  std::map<std::string, double> params;
};

/// (q0, p0, t0) plus exactly one of wp0 or lambda_target.
struct InitialSpec {
  Vector q0;
  Vector p0;
  double t0 = 0.0;
  std::optional<double> wp0;
  std::optional<double> lambda_target;
};

struct BoundsSpec {
  std::optional<Vector> center;  // default: origin (run, scan) or grid centre (map)
  std::optional<double> radius;  // default: 2 (run, scan) or grid half-extent (map)
  int samples = 33;
  std::string path;  // saved bounds JSON; overrides the sampled region
};

struct OutputSpec {
  std::string dir = ".";
  std::string trajectory_csv = "trajectory.csv";
  std::string events_json = "trajectory.json";
  std::string scan_csv = "scan.csv";
  std::string map_csv = "map.csv";
  std::string bounds_json;  // written when non-empty
};

struct ScanSpec {
  std::optional<Vector> state;  // falls back to the run's initial state
  double lambda_min = -0.15;
  double lambda_max = 0.15;
  int count = 301;
};

enum class WpRule { fixed, energy, lambda_target };

struct MapSpec {
  double q_min = -3.141592653589793;
  double q_max = 3.141592653589793;
  double p_min = -3.0;
  double p_max = 3.0;
  int nq = 200;
  int np = 200;
  double t = 0.0;
  WpRule wp_rule = WpRule::energy;
  double wp = 0.0;             // fixed
  double energy = 0.0;         // energy: H(z) = energy
  double lambda_target = 0.1;  // lambda_target: H(z) = psi lambda_target^2 / 8
  unsigned threads = 0;
};

struct VerifySpec {
  double k_scale = 1.0;  // multiplies K before the quartic-bound check
  int samples = 200;
  int grid = 10;
};

struct Config {
  ModelSpec model;
  std::optional<Vector> state;
  std::optional<InitialSpec> initial;
  int steps = 100;
  double tol_g = 1e-12;
  double tol_lambda = 1e-14;
  BranchPolicy policy = BranchPolicy::smallest;
  double delta = 0.5;
  double shrink = 0.9;
  double safety_factor = 1.1;
  double search_radius = 0.0;
  BoundsSpec bounds;
  OutputSpec outputs;
  std::uint64_t seed = 0;
  ScanSpec scan;
  MapSpec map;
  VerifySpec verify;
};

/// Parses a JSON config. Missing fields keep their defaults; unknown
/// top-level keys are rejected. Throws ConfigError.
Config parse_config(const std::string& json_text);
Config load_config(const std::string& path);

/// Range checks shared by every command. Throws ConfigError.
void validate(const Config& config);

BranchPolicy parse_policy(const std::string& name);

std::shared_ptr<const HamiltonianModel> build_model(const Config& config);

/// Sampled (or loaded) bounds with the safety factor applied, plus the
/// derived constants.
struct Constants {
  RegionBounds bounds;
  DerivedConstants derived;
};

Constants build_constants(const Config& config, const HamiltonianModel& model,
                          const Vector& default_center, double default_radius);

StepOptions step_options(const Config& config, const DerivedConstants& constants);

/// Explicit state, or the initial spec completed with wp0 (directly or via
/// choose_conjugate_momentum). Throws ConfigError when neither is given.
Vector initial_state(const Config& config, const HamiltonianModel& model,
                     const StepOptions& options);

}  // namespace dth::cli
