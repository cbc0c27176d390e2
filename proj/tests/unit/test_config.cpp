#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fowt/config.hpp"
#include "fowt/error.hpp"

using namespace fowt;
using namespace fowt::workflow;

namespace {

ErrorKind kind_of(const std::string& text) {
  std::istringstream is(text);
  try {
    parse_config(is);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a configuration failure for " << text);
  return ErrorKind::Config;
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults describe the case study") {
    const auto c = case_study_config();
    CHECK(c.plan.state_count() == 6468);
    CHECK(c.max_cycles == 5);
    CHECK(c.constraints_for(1).gamma_d == 1.0);
    CHECK(c.constraints_for(2).gamma_d == doctest::Approx(1.11));
    CHECK(c.constraints_for(5).gamma_d == doctest::Approx(1.11));
    CHECK(c.lifetime == doctest::Approx(788940000.0));
    CHECK(c.event_duration == 600.0);
    CHECK(c.optimizer.tol == 1e-3);
    CHECK(c.optimizer.fd_step == 1e-4);
    CHECK(c.optimizer.max_iter == 100);
    CHECK(desk_scale_config().plan.state_count() == 90);
    CHECK_NOTHROW(c.validate());
  }

  TEST_CASE("write then parse round trip") {
    auto c = desk_scale_config();
    c.jobs = 3;
    // Keep the two segments continuous at the transition when changing m2.
    const double log_s = (c.sn_curve.log10_a1 - std::log10(c.sn_curve.n_transition)) / c.sn_curve.m1;
    c.sn_curve.m2 = 4.5;
    c.sn_curve.log10_a2 = std::log10(c.sn_curve.n_transition) + 4.5 * log_s;
    c.cycle_constraints.back().taper_band = {0.85, 1.0};
    std::stringstream ss;
    write_config(ss, c);
    const auto back = parse_config(ss);
    CHECK(config_hash(back) == config_hash(c));
    CHECK(back.jobs == 3);
    CHECK(back.sn_curve.m2 == 4.5);
    CHECK(back.cycle_constraints.back().taper_band.lo == 0.85);
    CHECK(config_hash(desk_scale_config()) != config_hash(case_study_config()));
  }

  TEST_CASE("partial files keep defaults") {
    std::istringstream is(R"({"sampling": {"n_u": 4}, "workflow": {"jobs": 2}})");
    const auto c = parse_config(is);
    CHECK(c.plan.n_u == 4);
    CHECK(c.plan.n_hs == 7);
    CHECK(c.jobs == 2);
    CHECK(c.sn_curve.log10_a1 == 12.010);
  }

  TEST_CASE("bundled config files load") {
    const auto desk = load_config(std::string(FOWT_CONFIG_DIR) + "/desk.json");
    CHECK(desk.plan.state_count() == 90);
    const auto cs = load_config(std::string(FOWT_CONFIG_DIR) + "/case_study.json");
    CHECK(cs.plan.state_count() == 6468);
  }

  TEST_CASE("invalid files are rejected") {
    CHECK(kind_of(R"({"sampling": {"n_uu": 4}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"bogus": 1})") == ErrorKind::Config);
    CHECK(kind_of(R"({"sampling": {"n_u": "many"}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"sampling": )") == ErrorKind::Io);
    CHECK(kind_of(R"({"workflow": {"lifetime_s": -1}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"workflow": {"event_duration_s": 0}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"tower": {"reference_geometry": "no_such_tower.csv"}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"psd": {"station": 99}})") == ErrorKind::Config);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
  }

  TEST_CASE("relative geometry path resolves against the config directory") {
    std::istringstream is(R"({"tower": {"reference_geometry": "optimized_tower.csv"}})");
    const auto c = parse_config(is, FOWT_DATA_DIR);
    CHECK(c.reference_geometry().t == tower::optimized_geometry().t);
  }
}
