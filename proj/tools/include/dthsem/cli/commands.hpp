#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dthsem/cli/config.hpp"

namespace dth::cli {

enum ExitCode : int { ok = 0, bad_config = 1, nonexistence = 2, verify_failed = 3 };

/// Propagates a trajectory and writes the vertex CSV plus the event-log JSON.
/// Returns nonexistence (after printing the verdict) when no forward
/// multiplier exists at z0.
int cmd_run(const Config& config, std::ostream& out, std::ostream& err);

/// g(lambda, z_k) over a uniform lambda grid: CSV columns
/// lambda,g,cubic,bound,dg_dlambda,status.
int cmd_scan(const Config& config, std::ostream& out, std::ostream& err);

/// Region map over a (q, p) grid: CSV columns
/// q,p,psi,psi_prime,region,vertex_class. One degree of freedom only.
int cmd_map(const Config& config, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suites of every module at desk scale.
std::vector<CheckResult> run_checks(const Config& config);

/// Prints the pass/fail table; verify_failed unless every check passes.
int cmd_verify(const Config& config, std::ostream& out, std::ostream& err);

/// outputs.dir / name, creating the directory if needed.
std::string output_path(const Config& config, const std::string& name);

}  // namespace dth::cli
