#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dthsem/dthsem.hpp"

using namespace dth;

namespace {

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FormatNumber, RoundTripsExactly) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(std::stod(format_number(x)), x);
  }
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
}

TEST(StatesCsv, RoundTrip) {
  std::vector<Vector> states;
  for (int i = 0; i < 5; ++i) states.push_back(Vector::Random(6));
  std::stringstream s;
  write_states_csv(s, states, 2);
  EXPECT_EQ(lines(s.str()).front(), "q1,q2,t,p1,p2,wp");
  int dof = 0;
  const auto back = read_states_csv(s, &dof);
  EXPECT_EQ(dof, 2);
  ASSERT_EQ(back.size(), states.size());
  for (std::size_t i = 0; i < states.size(); ++i) EXPECT_EQ(back[i], states[i]);
}

TEST(StatesCsv, MalformedInputThrows) {
  std::istringstream bad_header("a,b,c,d\n1,2,3,4\n");
  EXPECT_THROW(read_states_csv(bad_header), ParameterError);
  std::istringstream short_row("q1,t,p1,wp\n1,2,3\n");
  EXPECT_THROW(read_states_csv(short_row), ParameterError);
  std::istringstream text("q1,t,p1,wp\n1,x,3,4\n");
  EXPECT_THROW(read_states_csv(text), ParameterError);
}

TEST(StatesJson, RoundTripAndErrors) {
  std::vector<Vector> states{Vector::Random(4), Vector::Random(4)};
  const auto back = states_from_json(states_to_json(states));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], states[0]);
  EXPECT_EQ(back[1], states[1]);
  EXPECT_THROW(states_from_json("{"), ParameterError);
  EXPECT_THROW(states_from_json("[[1,2,3]]"), ParameterError);
  EXPECT_THROW(states_from_json("[[1,\"a\",3,4]]"), ParameterError);
}

TEST(TrajectoryCsv, OneRowPerVertexWithBlankFinalMultiplier) {
  StepOptions o;
  o.constants = derive_constants(with_safety_factor(estimate_bounds(*pendulum(), Vector::Zero(4), 2.0, 17), 1.1), 0.5);
  Vector z0(4);
  z0 << 1.0, 0.0, 0.5, std::cos(1.0) - 0.125 + 1e-3;
  const DTHTrajectory t = propagate(*pendulum(), z0, 12, o);
  ASSERT_EQ(t.steps(), 12u);
  std::stringstream s;
  write_trajectory_csv(s, t);
  const auto rows = lines(s.str());
  ASSERT_EQ(rows.size(), 14u);
  EXPECT_EQ(rows[0], "k,lambda,q1,t,p1,wp,abs_H_mid");
  EXPECT_EQ(rows.back().rfind("12,,", 0), 0u);
  EXPECT_EQ(rows.back().back(), ',');
  EXPECT_EQ(rows[1].rfind("0," + format_number(t.multipliers[0]) + ",", 0), 0u);
}

TEST(BoundsJson, RoundTrip) {
  const RegionBounds b = with_safety_factor(estimate_bounds(*pendulum(), Vector::Zero(4), 2.0, 9), 1.1);
  const RegionBounds c = bounds_from_json(to_json(b));
  EXPECT_EQ(c.M1, b.M1);
  EXPECT_EQ(c.M2, b.M2);
  EXPECT_EQ(c.gamma_H, b.gamma_H);
  EXPECT_EQ(c.N1, b.N1);
  EXPECT_EQ(c.N2, b.N2);
  EXPECT_EQ(c.radius, b.radius);
  EXPECT_EQ(c.center, b.center);
  EXPECT_EQ(c.mode, BoundsMode::sampled);
  EXPECT_EQ(c.safety_factor, b.safety_factor);
}

TEST(BoundsJson, RejectsMissingOrNegativeFields) {
  EXPECT_THROW(bounds_from_json("not json"), ParameterError);
  EXPECT_THROW(bounds_from_json(R"({"M1":1,"M2":1,"gamma_H":1,"N1":1,"radius":1,"center":[0,0,0,0]})"),
               ParameterError);
  EXPECT_THROW(
      bounds_from_json(R"({"M1":-1,"M2":1,"gamma_H":1,"N1":1,"N2":1,"radius":1,"center":[0,0,0,0]})"),
      ParameterError);
  EXPECT_THROW(bounds_from_json(R"({"M1":1,"M2":1,"gamma_H":1,"N1":1,"N2":1,"radius":1})"),
               ParameterError);
}
