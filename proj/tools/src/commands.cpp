#include "dthsem/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dthsem/parallel.hpp"

namespace dth::cli {
namespace {

using json = nlohmann::json;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

void maybe_write_bounds(const Config& c, const Constants& k) {
  if (!c.outputs.bounds_json.empty()) {
    write_file(output_path(c, c.outputs.bounds_json), to_json(k.bounds));
  }
}

Vector run_state(const Config& c, const HamiltonianModel& model, const StepOptions& opt) {
  if (c.scan.state) {
    if (c.scan.state->size() != model.dim()) {
      throw ConfigError("scan.state: expected " + std::to_string(model.dim()) + " entries");
    }
    return *c.scan.state;
  }
  return initial_state(c, model, opt);
}

// wp such that H(q, t, p, wp) = target, for models affine in wp.
double solve_wp(const HamiltonianModel& model, Vector z, double target) {
  const int iw = conjugate_momentum_index(model.dof());
  z[iw] = 0.0;
  const double h0 = model.value(z);
  const double h1 = model.gradient(z)[iw];
  if (std::abs(h1) < 1e-14) throw ConfigError("map: H does not depend on wp");
  return (target - h0) / h1;
}

}  // namespace

std::string output_path(const Config& c, const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path dir(c.outputs.dir.empty() ? "." : c.outputs.dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  return (dir / name).string();
}

int cmd_run(const Config& c, std::ostream& out, std::ostream& err) {
  const auto model = build_model(c);
  const Constants k = build_constants(c, *model, Vector::Zero(model->dim()), 2.0);
  maybe_write_bounds(c, k);
  const StepOptions opt = step_options(c, k.derived);
  const Vector z0 = initial_state(c, *model, opt);

  try {
    step(*model, z0, Direction::forward, opt);
  } catch (const StepNonexistenceError& e) {
    err << "nonexistence at z0: " << e.verdict() << "\n";
    return nonexistence;
  }

  const DTHTrajectory traj = propagate(*model, z0, c.steps, opt);
  ConservationOptions co;
  co.symplectic_stride = std::max<int>(1, static_cast<int>(traj.steps() / 100));
  const ConservationReport rep = conservation_report(*model, traj, co);

  {
    std::ofstream f(output_path(c, c.outputs.trajectory_csv), std::ios::binary);
    if (!f) throw ConfigError("cannot write " + c.outputs.trajectory_csv);
    write_trajectory_csv(f, traj);
  }
  json log;
  log["model"] = model->name();
  log["policy"] = to_string(c.policy);
  log["steps_requested"] = c.steps;
  log["steps_taken"] = traj.steps();
  log["initial_state"] = json::parse(states_to_json({z0}))[0];
  log["constants"] = json::parse(to_json(k.derived));
  log["bounds"] = json::parse(to_json(k.bounds));
  log["conservation"] = json::parse(to_json(rep));
  log["trajectory"] = json::parse(to_json(traj, false));
  write_file(output_path(c, c.outputs.events_json), log.dump(2) + "\n");

  double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
  for (double l : traj.multipliers) {
    lmin = std::min(lmin, l);
    lmax = std::max(lmax, l);
  }
  out << "model " << model->name() << ", wp0 = " << format_number(z0[model->dim() - 1]) << "\n";
  out << "steps taken: " << traj.steps() << " of " << c.steps << "\n";
  if (traj.steps() > 0) {
    out << "lambda range: [" << format_number(lmin) << ", " << format_number(lmax) << "]\n";
  }
  out << "max |H(zbar)|: " << format_number(rep.max_energy_residual) << "\n";
  out << "max |delta wp|: " << format_number(rep.max_wp_change) << "\n";
  out << "max symplectic defect: " << format_number(rep.max_symplectic_defect) << "\n";
  out << "events:";
  for (EventKind e : {EventKind::bifurcation, EventKind::ghost_taken, EventKind::terminated,
                      EventKind::fixed_point, EventKind::prediction_indeterminate}) {
    out << " " << to_string(e) << "=" << traj.count(e);
  }
  out << "\n";
  for (const TrajectoryEvent& e : traj.events) {
    if (e.kind == EventKind::terminated) out << "terminated at step " << e.index << ": " << e.detail << "\n";
  }
  return ok;
}

int cmd_scan(const Config& c, std::ostream& out, std::ostream&) {
  const auto model = build_model(c);
  const Constants k = build_constants(c, *model, Vector::Zero(model->dim()), 2.0);
  maybe_write_bounds(c, k);
  const StepOptions opt = step_options(c, k.derived);
  const Vector z = run_state(c, *model, opt);
  const CubicModel cm = cubic_model(*model, z, k.derived);
  const MidpointOptions mo = constraint_midpoint_options(std::min(1e-12, c.tol_g));

  std::ofstream f(output_path(c, c.outputs.scan_csv), std::ios::binary);
  if (!f) throw ConfigError("cannot write " + c.outputs.scan_csv);
  f << "lambda,g,cubic,bound,dg_dlambda,status\n";
  int missing = 0;
  const int n = c.scan.count;
  for (int i = 0; i < n; ++i) {
    double lam = n == 1 ? c.scan.lambda_min
                        : c.scan.lambda_min + (c.scan.lambda_max - c.scan.lambda_min) * i / (n - 1);
    // Hit lambda = 0 exactly on symmetric ranges.
    if (std::abs(lam) < 1e-15 * std::max(1.0, c.scan.lambda_max - c.scan.lambda_min)) lam = 0.0;
    f << format_number(lam) << ",";
    try {
      const ConstraintSample s = evaluate_constraint(*model, lam, z, mo);
      f << format_number(s.g) << "," << format_number(cm.evaluate(lam)) << ","
        << format_number(cm.bound(lam)) << "," << format_number(s.dg) << ",ok\n";
    } catch (const Error&) {
      ++missing;
      f << "," << format_number(cm.evaluate(lam)) << "," << format_number(cm.bound(lam)) << ",,missing\n";
    }
  }
  out << "scan: " << n << " rows (" << missing << " missing), H_k = " << format_number(cm.H_k)
      << ", psi_k = " << format_number(cm.psi_k) << ", psi'_k = " << format_number(cm.psi_prime_k)
      << ", K = " << format_number(cm.K) << ", lambda_delta = " << format_number(cm.lambda_delta)
      << "\n";
  return ok;
}

int cmd_map(const Config& c, std::ostream& out, std::ostream&) {
  const auto model = build_model(c);
  if (model->dof() != 1) throw ConfigError("map: needs a model with one degree of freedom");
  const MapSpec& m = c.map;
  Vector center(4);
  center << 0.5 * (m.q_min + m.q_max), m.t, 0.5 * (m.p_min + m.p_max), 0.0;
  const double radius = 0.5 * std::max(m.q_max - m.q_min, m.p_max - m.p_min);
  const Constants k = build_constants(c, *model, center, radius);
  maybe_write_bounds(c, k);
  PredictionOptions po;
  po.shrink = c.shrink;
  po.zero_tol = c.tol_g;

  const std::size_t cells = static_cast<std::size_t>(m.nq) * static_cast<std::size_t>(m.np);
  std::vector<std::string> rows(cells);
  parallel_for(cells, m.threads, [&](std::size_t idx) {
    const int i = static_cast<int>(idx / m.np);
    const int j = static_cast<int>(idx % m.np);
    const double q = m.q_min + (m.q_max - m.q_min) * i / (m.nq - 1);
    const double p = m.p_min + (m.p_max - m.p_min) * j / (m.np - 1);
    Vector z(4);
    z << q, m.t, p, 0.0;
    double wp = m.wp;
    if (m.wp_rule == WpRule::energy) {
      wp = solve_wp(*model, z, m.energy);
    } else if (m.wp_rule == WpRule::lambda_target) {
      wp = solve_wp(*model, z, psi(*model, z) * m.lambda_target * m.lambda_target / 8.0);
    }
    z[3] = wp;
    std::string line = format_number(q) + "," + format_number(p) + ",";
    try {
      const FieldSample fs = sample_fields(*model, z);
      const VertexClass v = classify_vertex(*model, z, k.derived, po);
      line += format_number(fs.psi) + "," + format_number(fs.psi_prime) + "," +
              to_string(v.region) + "," + to_string(v.kind);
    } catch (const Error&) {
      line += ",,degenerate,error";
    }
    rows[idx] = std::move(line);
  });

  std::ofstream f(output_path(c, c.outputs.map_csv), std::ios::binary);
  if (!f) throw ConfigError("cannot write " + c.outputs.map_csv);
  f << "q,p,psi,psi_prime,region,vertex_class\n";
  for (const std::string& r : rows) f << r << "\n";
  out << "map: " << m.nq << " x " << m.np << " cells, K = " << format_number(k.derived.K)
      << ", lambda_delta = " << format_number(k.derived.lambda_delta) << "\n";
  return ok;
}

int cmd_verify(const Config& c, std::ostream& out, std::ostream&) {
  const std::vector<CheckResult> results = run_checks(c);
  std::size_t wm = 6, wn = 5;
  for (const CheckResult& r : results) {
    wm = std::max(wm, r.module.size());
    wn = std::max(wn, r.name.size());
  }
  auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w - s.size(), ' '); };
  int failed = 0;
  out << pad("module", wm) << "  " << pad("check", wn) << "  result  detail\n";
  for (const CheckResult& r : results) {
    out << pad(r.module, wm) << "  " << pad(r.name, wn) << "  " << (r.passed ? "PASS  " : "FAIL  ")
        << "  " << r.detail << "\n";
    if (!r.passed) ++failed;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? ok : verify_failed;
}

}  // namespace dth::cli
