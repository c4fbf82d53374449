#include "dthsem/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dthsem/errors.hpp"

namespace dth {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<std::string> state_header(int dof) {
  std::vector<std::string> h;
  for (int i = 1; i <= dof; ++i) h.push_back("q" + std::to_string(i));
  h.push_back("t");
  for (int i = 1; i <= dof; ++i) h.push_back("p" + std::to_string(i));
  h.push_back("wp");
  return h;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    std::size_t b = 0;
    while (b < cell.size() && cell[b] == ' ') ++b;
    out.push_back(cell.substr(b));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParameterError("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw ParameterError("not a number: '" + s + "'");
  }
}

json vec(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(std::isfinite(v[i]) ? json(v[i]) : json(format_number(v[i])));
  }
  return a;
}

json num(double x) { return std::isfinite(x) ? json(x) : json(format_number(x)); }

}  // namespace

void write_states_csv(std::ostream& out, const std::vector<Vector>& states, int dof) {
  const auto header = state_header(dof);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const Vector& z : states) {
    if (z.size() != extended_dim(dof)) throw DimensionError("write_states_csv: state has wrong length");
    for (Eigen::Index i = 0; i < z.size(); ++i) out << (i ? "," : "") << format_number(z[i]);
    out << '\n';
  }
}

std::vector<Vector> read_states_csv(std::istream& in, int* dof_out) {
  std::string line;
  if (!std::getline(in, line)) throw ParameterError("read_states_csv: empty input");
  const auto header = split_csv(line);
  if (header.size() < 4 || header.size() % 2 != 0) {
    throw ParameterError("read_states_csv: header must list q1..qn,t,p1..pn,wp");
  }
  const int dof = static_cast<int>(header.size()) / 2 - 1;
  if (header != state_header(dof)) {
    throw ParameterError("read_states_csv: header must be q1..qn,t,p1..pn,wp");
  }
  std::vector<Vector> states;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ParameterError("read_states_csv: row has wrong width");
    Vector z(static_cast<Eigen::Index>(cells.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) z[static_cast<Eigen::Index>(i)] = parse_number(cells[i]);
    states.push_back(ExtendedState(dof, z).coords());
  }
  if (dof_out) *dof_out = dof;
  return states;
}

std::string states_to_json(const std::vector<Vector>& states) {
  json a = json::array();
  for (const Vector& z : states) a.push_back(vec(z));
  return a.dump();
}

std::vector<Vector> states_from_json(const std::string& text) {
  json a;
  try {
    a = json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("states_from_json: ") + e.what());
  }
  if (!a.is_array()) throw ParameterError("states_from_json: expected an array of states");
  std::vector<Vector> out;
  for (const json& row : a) {
    if (!row.is_array() || row.size() < 4 || row.size() % 2 != 0) {
      throw ParameterError("states_from_json: each state must be an even-length array (>= 4)");
    }
    Vector z(static_cast<Eigen::Index>(row.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!row[i].is_number()) throw ParameterError("states_from_json: non-numeric component");
      z[static_cast<Eigen::Index>(i)] = row[i].get<double>();
    }
    out.push_back(ExtendedState(static_cast<int>(row.size()) / 2 - 1, z).coords());
  }
  return out;
}

void write_trajectory_csv(std::ostream& out, const DTHTrajectory& traj) {
  out << "k,lambda";
  for (const auto& h : state_header(traj.dof)) out << ',' << h;
  out << ",abs_H_mid\n";
  for (std::size_t k = 0; k < traj.vertices.size(); ++k) {
    out << k << ',';
    if (k < traj.multipliers.size()) out << format_number(traj.multipliers[k]);
    const Vector& z = traj.vertices[k];
    for (Eigen::Index i = 0; i < z.size(); ++i) out << ',' << format_number(z[i]);
    out << ',';
    if (k < traj.energy_residuals.size()) out << format_number(traj.energy_residuals[k]);
    out << '\n';
  }
}

std::string to_json(const RegionBounds& b) {
  json j;
  j["M1"] = b.M1;
  j["M2"] = b.M2;
  j["gamma_H"] = b.gamma_H;
  j["N1"] = b.N1;
  j["N2"] = b.N2;
  j["center"] = vec(b.center);
  j["radius"] = b.radius;
  j["bounded_axes"] = b.bounded_axes;
  j["samples_per_axis"] = b.samples_per_axis;
  j["sample_count"] = b.sample_count;
  j["mode"] = b.mode == BoundsMode::sampled ? "sampled" : "user-supplied";
  j["safety_factor"] = b.safety_factor;
  return j.dump(2);
}

RegionBounds bounds_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bounds_from_json: ") + e.what());
  }
  RegionBounds b;
  auto need = [&](const char* key) -> double {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ParameterError(std::string("bounds_from_json: missing numeric field '") + key + "'");
    }
    const double v = j[key].get<double>();
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ParameterError(std::string("bounds_from_json: field '") + key + "' must be >= 0");
    }
    return v;
  };
  b.M1 = need("M1");
  b.M2 = need("M2");
  b.gamma_H = need("gamma_H");
  b.N1 = need("N1");
  b.N2 = need("N2");
  b.radius = need("radius");
  if (!j.contains("center") || !j["center"].is_array()) {
    throw ParameterError("bounds_from_json: missing 'center' array");
  }
  const auto c = j["center"].get<std::vector<double>>();
  b.center = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
  if (j.contains("bounded_axes")) b.bounded_axes = j["bounded_axes"].get<std::vector<bool>>();
  if (!b.bounded_axes.empty() && b.bounded_axes.size() != c.size()) {
    throw ParameterError("bounds_from_json: bounded_axes and center differ in length");
  }
  b.samples_per_axis = j.value("samples_per_axis", 0);
  b.sample_count = j.value("sample_count", 0L);
  b.mode = j.value("mode", std::string("user-supplied")) == "sampled" ? BoundsMode::sampled
                                                                    : BoundsMode::user_supplied;
  b.safety_factor = j.value("safety_factor", 1.0);
  return b;
}

std::string to_json(const DerivedConstants& c) {
  json j;
  j["gamma_z"] = num(c.gamma_z);
  j["gamma_h"] = num(c.gamma_h);
  j["K"] = num(c.K);
  j["lambda_delta"] = num(c.lambda_delta);
  j["delta"] = c.delta;
  return j.dump(2);
}

namespace {

json prediction_json(const RootPrediction& p) {
  json j;
  j["region"] = to_string(p.region.tag);
  j["psi"] = p.region.psi_k;
  j["psi_prime"] = p.region.psi_prime_k;
  j["H"] = p.cubic.H_k;
  j["K"] = p.cubic.K;
  j["capital_lambda"] = num(p.capital_lambda);
  j["S"] = p.S ? num(*p.S) : json(nullptr);
  j["ratio"] = num(p.ratio);
  j["zero_root"] = p.zero_root;
  j["ghost_expected"] = p.ghost_expected;
  json claims = json::array();
  for (const Claim& c : p.claims) {
    claims.push_back({{"lo", c.lo},
                      {"hi", c.hi},
                      {"lo_closed", c.lo_closed},
                      {"hi_closed", c.hi_closed},
                      {"verdict", to_string(c.verdict)},
                      {"case", c.label}});
  }
  j["claims"] = claims;
  json thresholds = json::object();
  for (const auto& [k, v] : p.thresholds) thresholds[k] = num(v);
  j["thresholds"] = thresholds;
  j["forward"] = p.describe_side(1);
  j["backward"] = p.describe_side(-1);
  return j;
}

json roots_json(const MultiplierSet& s) {
  json j;
  json roots = json::array();
  for (const Root& r : s.roots) {
    roots.push_back({{"lambda", r.lambda},
                     {"residual", r.residual},
                     {"kind", to_string(r.kind)},
                     {"theorem_backed", r.theorem_backed}});
  }
  j["roots"] = roots;
  json brackets = json::array();
  for (const SearchedInterval& b : s.brackets) {
    brackets.push_back({{"lo", b.lo},
                        {"hi", b.hi},
                        {"monotone", b.monotone},
                        {"searched", b.searched},
                        {"note", b.note}});
  }
  j["brackets"] = brackets;
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  j["lambda_minus"] = opt(s.lambda_minus());
  j["lambda_plus"] = opt(s.lambda_plus());
  j["lambda_ghost"] = opt(s.lambda_ghost());
  return j;
}

}  // namespace

std::string to_json(const RootPrediction& p) { return prediction_json(p).dump(2); }

std::string to_json(const MultiplierSet& s) { return roots_json(s).dump(2); }

std::string to_json(const ConservationReport& r) {
  json j;
  j["max_energy_residual"] = r.max_energy_residual;
  j["max_wp_change"] = r.max_wp_change;
  j["wp_conservation_expected"] = r.wp_conservation_expected;
  j["max_symplectic_defect"] = r.max_symplectic_defect;
  j["max_midpoint_identity"] = r.max_midpoint_identity;
  j["max_midpoint_gap"] = r.max_midpoint_gap;
  j["symplectic_checks"] = r.symplectic_defects.size();
  return j.dump(2);
}

std::string to_json(const DTHTrajectory& t, bool include_states) {
  json j;
  j["dof"] = t.dof;
  j["steps"] = t.steps();
  j["multipliers"] = t.multipliers;
  j["energy_residuals"] = t.energy_residuals;
  json events = json::array();
  for (const TrajectoryEvent& e : t.events) {
    events.push_back({{"index", e.index}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
  }
  j["events"] = events;
  if (include_states) {
    json v = json::array();
    for (const Vector& z : t.vertices) v.push_back(vec(z));
    json m = json::array();
    for (const Vector& z : t.midpoints) m.push_back(vec(z));
    j["vertices"] = v;
    j["midpoints"] = m;
  }
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ParameterError("write to '" + path + "' failed");
}

}  // namespace dth
