#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dthsem/trajectory.hpp"

namespace dth {

// Text formats. States always use the order q1..qn, t, p1..pn, wp. JSON is
// exchanged as strings so callers need no JSON dependency.

/// Shortest round-trip decimal form of x ("nan"/"inf" for non-finite).
std::string format_number(double x);

std::vector<std::string> state_header(int dof);

void write_states_csv(std::ostream& out, const std::vector<Vector>& states, int dof);

/// Reads rows under a q1..qn,t,p1..pn,wp header. dof is inferred from the
/// header. Throws ParameterError on malformed input.
std::vector<Vector> read_states_csv(std::istream& in, int* dof = nullptr);

std::string states_to_json(const std::vector<Vector>& states);
std::vector<Vector> states_from_json(const std::string& text);

/// One row per vertex: k, lambda_k, state, |H(zbar_k)|. The last vertex has
/// empty lambda and residual fields.
void write_trajectory_csv(std::ostream& out, const DTHTrajectory& trajectory);

std::string to_json(const RegionBounds& bounds);
std::string to_json(const DerivedConstants& constants);
std::string to_json(const RootPrediction& prediction);
std::string to_json(const MultiplierSet& roots);
std::string to_json(const ConservationReport& report);
/// Multipliers, event log and (optionally) vertices and midpoints.
std::string to_json(const DTHTrajectory& trajectory, bool include_states = true);

/// Throws ParameterError on missing fields or negative constants.
RegionBounds bounds_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dth
