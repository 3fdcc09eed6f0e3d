#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frontweave/engine.hpp"
#include "frontweave/examples.hpp"

#include <algorithm>
#include <cmath>

namespace fw = frontweave;

namespace {

fw::InitialCurve circle(double r0, double speed) {
  fw::InitialCurve c;
  c.phi0 = [r0](double x, double y) { return std::hypot(x, y) - r0; };
  c.phi = [r0, speed](double x, double y, double t) { return std::hypot(x, y) - r0 - speed * t; };
  return c;
}

}  // namespace

TEST_CASE("seeds sit within a cell of the curve, outside for an expanding front") {
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 40, 1.0);
  const auto st = fw::initialize(circle(0.25, 1.0), fw::SpeedField::constant(1.0), grid);
  REQUIRE_FALSE(st.narrow_band.empty());
  fw::MarchState copy = st;
  while (!copy.narrow_band.empty()) {
    const auto p = copy.narrow_band.extract_min();
    const double r = std::hypot(p.x, p.y);
    CHECK(r >= 0.25);
    CHECK(r - 0.25 <= grid.h);
    CHECK(p.psi == doctest::Approx(r - 0.25).epsilon(1e-9));
    CHECK(p.orient == 1);
    CHECK(p.source == fw::Source::seed);
  }
}

TEST_CASE("a curve off the grid is rejected") {
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 40, 1.0);
  CHECK_THROWS_AS(fw::initialize(circle(2.0, 1.0), fw::SpeedField::constant(1.0), grid), fw::CurveOffGridError);
  CHECK_THROWS_AS(fw::initialize(circle(0.5, 1.0), fw::SpeedField::constant(1.0), grid), fw::CurveOffGridError);
}

TEST_CASE("config validation") {
  fw::EngineConfig c;
  c.grid = fw::GridSpec::square(0.0, 1.0, 10, 1.0);
  CHECK_NOTHROW(c.validate());
  c.r1 = 3.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.r1 = 0.5;
  c.s_fraction = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_FALSE(fw::EngineConfig{}.first_crossing_guard);
}

TEST_CASE("a constant positive speed reduces to classical fast marching") {
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 40, 10.0);
  fw::EngineConfig cfg;
  cfg.grid = grid;
  const auto F = fw::SpeedField::constant(2.0);
  const auto c = circle(0.2, 2.0);
  const auto cloud = fw::run(c, F, cfg);
  const auto ref = fw::classical_fmm(c, F, grid);
  REQUIRE(cloud.size() == ref.size());
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    CHECK(cloud[k].i == ref[k].i);
    CHECK(cloud[k].j == ref[k].j);
    CHECK(cloud[k].psi == ref[k].psi);
  }
  double worst = 0.0;
  for (const auto& p : cloud) worst = std::max(worst, std::abs(p.psi - (std::hypot(p.x, p.y) - 0.2) / 2.0));
  CHECK(worst <= 2.0 * grid.h);
}

TEST_CASE("acceptance order is non-decreasing in psi") {
  const auto ex = fw::get_example("motivation");
  const auto cloud = fw::run(ex.initial, ex.F, ex.config(40));
  for (std::size_t k = 1; k < cloud.size(); ++k) CHECK(cloud[k - 1].psi <= cloud[k].psi);
}

TEST_CASE("the motivation example turns and collapses") {
  const auto ex = fw::get_example("motivation");
  const auto cfg = ex.config(80);
  fw::Engine e(ex.F, cfg);
  e.initialize(ex.initial);
  const auto& cloud = e.run();
  double top = 0.0;
  int inward = 0;
  for (const auto& p : cloud) {
    top = std::max(top, p.psi);
    if (p.orient == -1) ++inward;
  }
  CHECK(std::abs(top - 0.5 * (1.0 + std::sqrt(2.0))) <= 3.0 * cfg.grid.h);
  CHECK(inward > 0);
  CHECK(e.stats().rescues > 0);
}

TEST_CASE("the time guard stops the march") {
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 40, 0.1);
  fw::EngineConfig cfg;
  cfg.grid = grid;
  const auto cloud = fw::run(circle(0.25, 1.0), fw::SpeedField::constant(1.0), cfg);
  for (const auto& p : cloud) CHECK(p.psi < 0.1 + 2.0 * grid.h);
}

TEST_CASE("rescue failures of Example 2 stay near the expected points") {
  const auto ex = fw::get_example("ex2");
  const auto cfg = ex.config(40);
  fw::Engine e(ex.F, cfg);
  e.initialize(ex.initial);
  e.run();
  CHECK_FALSE(e.failures().empty());
  for (const auto& f : e.failures()) {
    const double x = cfg.grid.x(f.i);
    const double y = cfg.grid.y(f.j);
    CHECK(std::min(std::hypot(x, y - 0.25), std::hypot(x, y + 0.25)) <= 5.0 * cfg.grid.h);
  }
}
