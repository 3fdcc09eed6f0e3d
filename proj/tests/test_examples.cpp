#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frontweave/examples.hpp"

#include <cmath>

namespace fw = frontweave;

TEST_CASE("registry") {
  const auto& names = fw::example_names();
  CHECK(names.size() == 6);
  for (const auto& n : names) CHECK(fw::get_example(n).name == n);
  CHECK_THROWS_AS(fw::get_example("ex9"), fw::UnknownExampleError);
}

TEST_CASE("radii start at the initial circle") {
  CHECK(fw::example_radius("ex1", 0.0) == doctest::Approx(0.25));
  CHECK(fw::example_radius("motivation", 0.0) == doctest::Approx(0.25));
  const double e = std::exp(1.0);
  CHECK(fw::example_radius("ex1", 0.1) == doctest::Approx(0.25 - (std::exp(1.0) - 1.0) / (10.0 * e) + 0.1));
}

TEST_CASE("initial curves are the exact level sets at t = 0") {
  for (const auto& n : fw::example_names()) {
    const auto ex = fw::get_example(n);
    REQUIRE(ex.exact);
    for (double x : {-0.3, 0.0, 0.2}) {
      for (double y : {-0.1, 0.25, 0.4}) CHECK(ex.initial.phi0(x, y) == doctest::Approx(ex.exact->phi(x, y, 0.0)));
    }
  }
}

TEST_CASE("Example 4 has no exact solution from t = 0.5") {
  const auto ex = fw::get_example("ex4");
  REQUIRE(ex.exact);
  CHECK(ex.exact->valid(0.4));
  CHECK_FALSE(ex.exact->valid(0.5));
  CHECK_THROWS_AS((*ex.exact)(0.0, 0.0, 0.6), fw::NoExactError);
}

TEST_CASE("exact chart finds the left branch of Example 1") {
  const auto ex = fw::get_example("ex1");
  const double t = 0.1;
  const double R = fw::example_radius("ex1", t);
  const auto w = fw::exact_chart(ex, fw::Representation::yt, 0.1, t);
  REQUIRE(w);
  CHECK(*w == doctest::Approx(-std::sqrt(R * R - 0.01)).epsilon(1e-8));
  CHECK_FALSE(fw::exact_chart(ex, fw::Representation::yt, 0.9, t));
}

TEST_CASE("the sideways sweep converges on Example 1") {
  const auto ex = fw::get_example("ex1");
  const auto a = fw::sideways_sweep(ex, 40);
  const auto b = fw::sideways_sweep(ex, 80);
  CHECK(a.samples > 0);
  CHECK(b.samples > a.samples);
  CHECK(b.L1 < a.L1);
  CHECK(b.dt == doctest::Approx(0.5 * b.h));
}

TEST_CASE("configs carry the example's bounds") {
  const auto ex = fw::get_example("ex2");
  const auto cfg = ex.config(40);
  CHECK(cfg.grid.n == 41);
  CHECK(cfg.T() == ex.T_F);
  CHECK(cfg.r1 == ex.r1);
  CHECK_NOTHROW(cfg.validate());
}
