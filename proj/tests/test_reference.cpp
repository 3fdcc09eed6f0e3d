#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frontweave/reference.hpp"

#include <cmath>
#include <random>

namespace fw = frontweave;

namespace {

double circle(double x, double y) { return std::hypot(x, y) - 0.25; }

fw::SurfacePoint at(double x, double y, double psi, fw::Source s = fw::Source::fmm) {
  fw::SurfacePoint p;
  p.x = x;
  p.y = y;
  p.psi = psi;
  p.source = s;
  return p;
}

}  // namespace

TEST_CASE("lsm_step rejects steps above the CFL bound") {
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 20, 1.0);
  const auto phi = fw::sample_grid(circle, grid);
  const auto F = fw::SpeedField::constant(1.0);
  CHECK_THROWS_AS(fw::lsm_step(F, phi, grid, 0.0, 0.6 * grid.h), fw::CflViolationError);
  CHECK_NOTHROW(fw::lsm_step(F, phi, grid, 0.0, 0.5 * grid.h));
}

TEST_CASE("an expanding circle keeps its radius under the level-set march") {
  const auto grid = fw::GridSpec::square(-0.5, 1.0, 80, 0.1);
  const auto F = fw::SpeedField::constant(1.0);
  const auto frames = fw::lsm_solve(F, circle, grid, 0.1, 0.25 * grid.h);
  REQUIRE(frames.size() >= 2);
  CHECK(frames.front().t == 0.0);
  CHECK(frames.back().t == doctest::Approx(0.1));
  const auto pts = fw::contour_points(frames.back().phi, grid, 0.1, 0.0);
  REQUIRE_FALSE(pts.empty());
  for (const auto& p : pts) CHECK(std::hypot(p.x(), p.y()) == doctest::Approx(0.35).epsilon(0.02));
}

TEST_CASE("contour points of a one-signed field are empty") {
  const auto grid = fw::GridSpec::square(0.0, 1.0, 10, 1.0);
  const Eigen::ArrayXXd phi = Eigen::ArrayXXd::Constant(11, 11, 1.0);
  CHECK(fw::contour_points(phi, grid, 0.0, 0.0).empty());
}

TEST_CASE("NearestIndex agrees with a linear scan") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Eigen::Vector3d> pts(2000);
  for (auto& p : pts) p = {u(rng), u(rng), 0.5 * u(rng)};
  const fw::NearestIndex index(pts);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Vector3d q(1.5 * u(rng), 1.5 * u(rng), u(rng));
    CHECK(index.distance(q) == index.brute_force(q));
  }
  CHECK(fw::NearestIndex({}).distance(Eigen::Vector3d::Zero()) == fw::kInf);
}

TEST_CASE("aggregate weights the sum by h^dim") {
  const auto a = fw::aggregate({0.1, 0.4, 0.2}, 2, 0.5);
  CHECK(a.L1 == doctest::Approx(0.7 * 0.25));
  CHECK(a.Linf == 0.4);
  CHECK(a.relative[0] == doctest::Approx(0.25));
  CHECK_THROWS_AS(fw::aggregate({}, 2, 0.5), fw::EmptyRegionError);
}

TEST_CASE("loglog slope of a power law") {
  CHECK(fw::loglog_slope({0.1, 0.05, 0.025}, {0.3, 0.075, 0.01875}) == doctest::Approx(2.0));
  CHECK(std::isnan(fw::loglog_slope({0.1}, {0.2})));
}

TEST_CASE("clusters link points closer than the radius") {
  const std::vector<Eigen::Vector2d> pts{{0, 0}, {0.1, 0}, {0.2, 0}, {1, 1}, {1.05, 1}};
  CHECK(fw::count_clusters(pts, 0.15) == 2);
  CHECK(fw::count_clusters(pts, 0.05) == 5);
  CHECK(fw::count_clusters({}, 1.0) == 0);
}

TEST_CASE("travel distance integrates |F|") {
  const fw::SpeedField F([](double, double, double t) { return 1.0 - t; }, 1.0, true);
  CHECK(fw::travel_distance(F, 0, 0, 0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(fw::travel_distance(F, 0, 0, 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(fw::travel_distance(F, 0, 0, 0.5, 0.5) == 0.0);
}

TEST_CASE("slab clusters keep points near time t") {
  const auto F = fw::SpeedField::constant(1.0);
  std::vector<fw::SurfacePoint> cloud{at(0, 0, 0.5), at(0.01, 0, 0.5), at(1, 0, 0.5), at(2, 0, 0.9)};
  CHECK(fw::slab_clusters(cloud, F, 0.5, 0.05, 0.05) == 2);
  CHECK(fw::slab_clusters(cloud, F, 0.9, 0.05, 0.05) == 1);
}

TEST_CASE("zero time and regions") {
  const fw::SpeedField F([](double, double, double t) { return 0.5 - t; }, 1.0, true);
  CHECK(fw::f_zero_time(F, 0, 0, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(fw::f_zero_time(fw::SpeedField::constant(1.0), 0, 0, 1.0) == fw::kInf);
  CHECK(fw::in_region(at(0, 0, 0.2), fw::Region::bottom, F, 1.0));
  CHECK(fw::in_region(at(0, 0, 0.8), fw::Region::top, F, 1.0));
  CHECK_FALSE(fw::in_region(at(0, 0, 0.8, fw::Source::sideways_yt), fw::Region::top, F, 1.0));
  CHECK(fw::in_region(at(0, 0, 0.8, fw::Source::sideways_yt), fw::Region::sideways, F, 1.0));
  CHECK(fw::region_from_string("top") == fw::Region::top);
  CHECK_THROWS(fw::region_from_string("middle"));
}

TEST_CASE("method 1 error is |phi| at the point") {
  fw::ExactSolution ex{"c", [](double x, double y, double t) { return std::hypot(x, y) - 0.25 - t; }};
  ex.t_hi = 1.0;
  CHECK(fw::error_method1(at(0.3, 0.4, 0.2), ex) == doctest::Approx(0.05));
  CHECK_THROWS_AS(fw::error_method1(at(0.3, 0.4, 1.5), ex), fw::NoExactError);
  ex.signed_distance = false;
  CHECK_THROWS_AS(fw::error_method1(at(0.3, 0.4, 0.2), ex), std::invalid_argument);
}
