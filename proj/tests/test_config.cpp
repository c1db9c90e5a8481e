#include <algorithm>
#include <fstream>
#include <random>

#include "doctest.h"
#include "mgtr/config.hpp"
#include "mgtr/errors.hpp"
#include "oracles.hpp"

using namespace mgtr;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "devices": {"mt": {"w_um": 10, "l_um": 0.1}},
    "bias": {"vdd_v": 2.0, "vb_v": 0.4}
  })");
}

std::vector<std::string> issues_of(const json& doc) {
  try {
    (void)load_design(doc);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, const std::string& s) {
  return std::any_of(v.begin(), v.end(), [&](const std::string& x) { return x.find(s) != std::string::npos; });
}

}  // namespace

TEST_CASE("minimal document fills defaults") {
  const LoadedDesign l = load_design(minimal());
  CHECK(l.design.r_s == 50.0);
  CHECK(l.design.mt.w == doctest::Approx(10e-6));
  CHECK(l.design.bias.v_dd == 2.0);
  CHECK(mentions(l.defaults_applied, "env.rs_ohm"));
  CHECK_FALSE(mentions(l.defaults_applied, "bias.vdd_v"));
}

TEST_CASE("violations are reported together") {
  json doc = minimal();
  doc["devices"]["mt"].erase("w_um");
  doc["bias"].erase("vb_v");
  doc["env"] = {{"colour", 1}};
  const auto issues = issues_of(doc);
  CHECK(issues.size() >= 3);
  CHECK(mentions(issues, "mt.w"));
  CHECK(mentions(issues, "bias.vb_v"));
  CHECK(mentions(issues, "env.colour: unknown key"));
}

TEST_CASE("unit suffix mismatch") {
  json doc = minimal();
  doc["passives"] = {{"l2_ph", 100}};
  const auto issues = issues_of(doc);
  REQUIRE(issues.size() == 1);
  CHECK(mentions(issues, "passives.l2_ph"));
  CHECK(mentions(issues, "l2_nh"));
}

TEST_CASE("type errors") {
  json doc = minimal();
  doc["bias"]["vdd_v"] = "two";
  doc["mode"] = "triple";
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "bias.vdd_v: expected a number"));
  CHECK(mentions(issues, "mode: expected one of"));
}

TEST_CASE("invariant violations carry config paths") {
  json doc = minimal();
  doc["devices"]["mt"]["w_um"] = -1;
  doc["passives"] = {{"l2_nh", -3}};
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "devices.mt"));
  CHECK(mentions(issues, "l2"));
}

TEST_CASE("emit and load round trip") {
  const LnaDesign d = default_design();
  CHECK(load_design(emit(d)).design == d);
  CHECK(load_design(emit(default_design(Mode::single_gate))).design == default_design(Mode::single_gate));
  CHECK(load_design(json::parse(emit(d).dump())).design == d);
  CHECK(load_design(emit(d)).defaults_applied.empty());

  std::mt19937_64 rng(31);
  for (int k = 0; k < 20; ++k) {
    const LnaDesign r = oracle::random_design(rng);
    CHECK(load_design(json::parse(emit(r).dump())).design == r);
  }
}

TEST_CASE("shipped config is the default design") {
  const LoadedDesign l = load_design_file(MGTR_CONFIG_DIR "/default.json");
  CHECK(l.design == default_design());
  CHECK(l.defaults_applied.empty());
}

TEST_CASE("unreadable files") {
  CHECK_THROWS_AS((void)load_design_file("/nonexistent/none.json"), ConfigError);
  const std::string path = "/tmp/mgtr_test_bad.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS((void)load_design_file(path), ConfigError);
}
