#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dthsem/cli/commands.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::string> out, policy, model, bounds_path;
  std::optional<double> tol_g, tol_lambda, lambda_target, search_radius, delta, safety_factor,
      k_scale, lambda_min, lambda_max, q0, p0;
  std::optional<std::uint64_t> seed;
  std::optional<int> steps, count, nq, np;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--tol-g", o.tol_g, "constraint tolerance |g| <= tol_g");
  cmd->add_option("--tol-lambda", o.tol_lambda, "multiplier bracket tolerance");
  cmd->add_option("--seed", o.seed, "random seed (verify sampling)");
  cmd->add_option("--model", o.model, "built-in model name");
  cmd->add_option("--bounds", o.bounds_path, "saved bounds JSON");
  cmd->add_option("--delta", o.delta, "delta in (0, 1) for lambda_delta");
  cmd->add_option("--safety-factor", o.safety_factor, "factor (>= 1) applied to sampled bounds");
}

void apply(const Overrides& o, dth::cli::Config& c) {
  using dth::cli::ConfigError;
  if (o.out) c.outputs.dir = *o.out;
  if (o.tol_g) c.tol_g = *o.tol_g;
  if (o.tol_lambda) c.tol_lambda = *o.tol_lambda;
  if (o.seed) c.seed = *o.seed;
  if (o.model) {
    c.model.name = *o.model;
    c.model.params.clear();
  }
  if (o.bounds_path) c.bounds.path = *o.bounds_path;
  if (o.delta) c.delta = *o.delta;
  if (o.safety_factor) c.safety_factor = *o.safety_factor;
  if (o.policy) c.policy = dth::cli::parse_policy(*o.policy);
  if (o.steps) c.steps = *o.steps;
  if (o.search_radius) c.search_radius = *o.search_radius;
  if (o.q0 || o.p0) {
    if (!c.initial) {
      if (!o.q0 || !o.p0) throw ConfigError("--q0 and --p0 go together without an initial block");
      c.initial = dth::cli::InitialSpec{};
      c.initial->lambda_target = 0.1;
      c.state.reset();
    }
    if (o.q0) c.initial->q0 = dth::Vector::Constant(1, *o.q0);
    if (o.p0) c.initial->p0 = dth::Vector::Constant(1, *o.p0);
  }
  if (o.lambda_target) {
    if (!c.initial) throw ConfigError("--lambda-target needs --q0/--p0 or an initial block");
    c.initial->lambda_target = *o.lambda_target;
    c.initial->wp0.reset();
  }
  if (o.k_scale) c.verify.k_scale = *o.k_scale;
  if (o.lambda_min) c.scan.lambda_min = *o.lambda_min;
  if (o.lambda_max) c.scan.lambda_max = *o.lambda_max;
  if (o.count) c.scan.count = *o.count;
  if (o.nq) c.map.nq = *o.nq;
  if (o.np) c.map.np = *o.np;
  if (o.threads) c.map.threads = *o.threads;
  dth::cli::validate(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic-energy-momentum integration via the discrete-time Hamilton equations"};
  app.require_subcommand(1);
  Overrides o;

  CLI::App* run = app.add_subcommand("run", "propagate a DTH trajectory");
  add_common(run, o);
  run->add_option("--q0", o.q0, "initial q (one degree of freedom)");
  run->add_option("--p0", o.p0, "initial p (one degree of freedom)");
  run->add_option("--steps", o.steps, "number of steps N >= 1");
  run->add_option("--lambda-target", o.lambda_target, "first multiplier used to choose wp0");
  run->add_option("--policy", o.policy, "smallest | follow-ghost");
  run->add_option("--search-radius", o.search_radius, "search edge beyond Lambda_k (0: lambda_delta)");

  CLI::App* scan = app.add_subcommand("scan", "tabulate g(lambda, z_k)");
  add_common(scan, o);
  scan->add_option("--lambda-min", o.lambda_min);
  scan->add_option("--lambda-max", o.lambda_max);
  scan->add_option("--count", o.count);
  scan->add_option("--lambda-target", o.lambda_target, "wp0 choice when z_k comes from initial");

  CLI::App* map = app.add_subcommand("map", "region map over a (q, p) grid");
  add_common(map, o);
  map->add_option("--nq", o.nq);
  map->add_option("--np", o.np);
  map->add_option("--threads", o.threads, "worker threads (0: all cores)");

  CLI::App* verify = app.add_subcommand("verify", "run the invariant suites");
  add_common(verify, o);
  verify->add_option("--k-scale", o.k_scale, "multiply K before the quartic-bound check");
  verify->add_option("--steps", o.steps, "trajectory length for the trajectory checks (<= 500)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : dth::cli::bad_config;
  }

  try {
    dth::cli::Config c = o.config_path.empty() ? dth::cli::Config{} : dth::cli::load_config(o.config_path);
    apply(o, c);
    if (run->parsed()) return dth::cli::cmd_run(c, std::cout, std::cerr);
    if (scan->parsed()) return dth::cli::cmd_scan(c, std::cout, std::cerr);
    if (map->parsed()) return dth::cli::cmd_map(c, std::cout, std::cerr);
    return dth::cli::cmd_verify(c, std::cout, std::cerr);
  } catch (const dth::cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dth::cli::bad_config;
  } catch (const dth::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dth::cli::bad_config;
  } catch (const dth::DimensionError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return dth::cli::bad_config;
  } catch (const dth::StepNonexistenceError& e) {
    std::cerr << "nonexistence: " << e.verdict() << "\n";
    return dth::cli::nonexistence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dth::cli::bad_config;
  }
}
