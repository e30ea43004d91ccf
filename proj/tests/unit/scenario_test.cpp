#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "mfr/errors.hpp"
#include "mfr/scenario.hpp"

namespace mfr {
namespace {

const char* kMinimal = R"(
radars: [[0, 0], [5, 0]]
targets: [[1, 2, 0, 0], [3, 4, 0, 0], [2, 6, 0, 0]]
beams: 1
)";

std::string expect_config_error(const std::string& text) {
  try {
    parse_scenario(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  ADD_FAILURE() << "no ConfigError for:\n" << text;
  return {};
}

TEST(Scenario, Table12PresetGeometry) {
  const ScenarioConfig c = load_preset("table12");
  ASSERT_EQ(c.radar_count(), 3u);
  EXPECT_EQ(c.radars[0].x, -10.0);
  EXPECT_EQ(c.radars[1].x, 3.0);
  EXPECT_EQ(c.radars[2].x, 10.0);
  ASSERT_EQ(c.target_count(), 5u);
  EXPECT_EQ(c.targets[0].x, (StateVector() << 1.0, 6.0, 0.5, 0.1).finished());
  EXPECT_EQ(c.beams, 2);
  EXPECT_DOUBLE_EQ(c.update_time, 0.25);
  EXPECT_DOUBLE_EQ(c.noise.sigma_range, 0.015);
  EXPECT_GE(c.noise.range_coeff.minCoeff(), 1.0);
  EXPECT_LE(c.noise.range_coeff.maxCoeff(), 4.5);
  EXPECT_TRUE(c.topology.is_full());
}

TEST(Scenario, EveryPresetLoads) {
  for (const auto& name : preset_names()) EXPECT_NO_THROW(load_preset(name)) << name;
  EXPECT_THROW(load_preset("missing"), ConfigError);
}

TEST(Scenario, DefaultsAreFilled) {
  const ScenarioConfig c = parse_scenario(kMinimal);
  EXPECT_DOUBLE_EQ(c.selector.alpha, 0.5);
  EXPECT_DOUBLE_EQ(c.selector.theta, 0.5);
  EXPECT_EQ(c.horizon, 200);
  EXPECT_EQ(c.realizations, 100);
  EXPECT_EQ(c.init_cov_diag, Eigen::Vector4d::Constant(0.01));
  EXPECT_TRUE(c.weights.all_ones());
}

TEST(Scenario, InvariantViolationsNameTheField) {
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "selector: {kind: lcbrd, alpha: 2}\n"), "selector.alpha");
  EXPECT_EQ(expect_config_error(R"(
radars: [[0, 0]]
targets: [[1, 2, 0, 0], [3, 4, 0, 0]]
beams: 2
)"),
            "beams");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "horizon: 0\n"), "horizon");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "bogus: 1\n"), "bogus");
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "selector: {kind: rm, mu_scale: -1}\n"), "selector.mu_scale");
  EXPECT_THROW(parse_scenario("radars: [oops"), ConfigError);
}

TEST(Scenario, RangeCoefficientsRejectBelowOne) {
  EXPECT_EQ(expect_config_error(std::string(kMinimal) + "noise: {range_coeff: [[1, 1, 0.5], [1, 1, 1]]}\n").rfind("noise", 0),
            0u);
}

TEST(Scenario, DumpRoundTrips) {
  for (const auto& name : preset_names()) {
    const ScenarioConfig a = load_preset(name);
    const std::string text = dump_scenario(a);
    const ScenarioConfig b = parse_scenario(text);
    EXPECT_EQ(dump_scenario(b), text) << name;
    EXPECT_EQ(b.noise.range_coeff, a.noise.range_coeff) << name;
  }
}

TEST(Scenario, SpreadMapsDrawsOntoExactRatio) {
  const Eigen::MatrixXd a = range_coeff_spread(12, 5, 5, 4.5);
  EXPECT_DOUBLE_EQ(a.minCoeff(), 1.0);
  EXPECT_NEAR(a.maxCoeff() / a.minCoeff(), 4.5, 1e-12);
  EXPECT_TRUE(range_coeff_spread(12, 5, 5, 1.0).isApprox(Eigen::MatrixXd::Ones(5, 5)));
  const ScenarioConfig c = with_spread(load_preset("fig11"), 2.0);
  EXPECT_NEAR(c.noise.range_coeff.maxCoeff() / c.noise.range_coeff.minCoeff(), 2.0, 1e-12);
}

TEST(Scenario, UniformCoefficientsStayInInterval) {
  const Eigen::MatrixXd a = range_coeff_uniform(3, 4, 6, 1.0, 4.5);
  EXPECT_GE(a.minCoeff(), 1.0);
  EXPECT_LE(a.maxCoeff(), 4.5);
  EXPECT_EQ(a, range_coeff_uniform(3, 4, 6, 1.0, 4.5));
}

TEST(Scenario, SelectorTextForms) {
  EXPECT_EQ(parse_selector_text("rm").kind, SelectorKind::regret_matching);
  EXPECT_EQ(parse_selector_text("rm").mode, StrategyMode::multiset);
  const SelectorParams eps = parse_selector_text("{kind: lcbrd, epsilon: 0.1, label: e}");
  EXPECT_DOUBLE_EQ(eps.epsilon, 0.1);
  EXPECT_EQ(eps.display_name(), "e");
  EXPECT_THROW(parse_selector_text("{kind: lcbrd, alpha: 0}"), ConfigError);
}

TEST(Scenario, PartialTopologyPreset) {
  const ScenarioConfig c = load_preset("fig12");
  EXPECT_FALSE(c.topology.is_full());
  for (std::size_t i = 0; i < c.radar_count(); ++i) EXPECT_TRUE(c.topology.hears(i, i));
}

}  // namespace
}  // namespace mfr
