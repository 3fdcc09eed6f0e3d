#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frontweave/io.hpp"

#include <cmath>
#include <sstream>

namespace fw = frontweave;

TEST_CASE("doubles round trip") {
  for (double v : {0.0, 0.1, -1.0 / 3.0, 1e-300, 6.02e23, fw::kInf}) CHECK(fw::parse_double(fw::format_double(v)) == v);
  CHECK(fw::format_double(fw::kInf) == "inf");
  CHECK_THROWS_AS(fw::parse_double("1.5x"), fw::ParseError);
  CHECK(fw::parse_int("42") == 42);
  CHECK_THROWS_AS(fw::parse_int("4.2"), fw::ParseError);
}

TEST_CASE("cloud CSV round trip") {
  fw::SurfacePoint p;
  p.i = 3;
  p.j = 7;
  p.x = 0.125;
  p.y = -0.3;
  p.psi = 0.4142;
  p.set_normal({0.3, -0.2, -0.9});
  p.source = fw::Source::sideways_skew;
  p.attempts = 2;
  fw::SurfacePoint q = p;
  q.psi = fw::kInf;
  q.source = fw::Source::seed;

  std::stringstream ss;
  fw::write_cloud_csv(ss, {p, q});
  CHECK(ss.str().rfind(std::string(fw::kCloudHeader), 0) == 0);
  const auto back = fw::read_cloud_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].i == 3);
  CHECK(back[0].j == 7);
  CHECK(back[0].psi == p.psi);
  CHECK(back[0].normal3 == p.normal3);
  CHECK(back[0].orient == p.orient);
  CHECK(back[0].source == fw::Source::sideways_skew);
  CHECK(back[0].attempts == 2);
  CHECK(back[1].psi == fw::kInf);
  CHECK(back[1].source == fw::Source::seed);
}

TEST_CASE("xyt CSV round trip") {
  const std::vector<Eigen::Vector3d> pts{{0.1, 0.2, 0.3}, {-1.0, 2.5, 1.0 / 3.0}};
  std::stringstream ss;
  fw::write_xyt_csv(ss, pts);
  const auto back = fw::read_xyt_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1] == pts[1]);
}

TEST_CASE("malformed CSV rows throw") {
  std::stringstream ss(std::string(fw::kCloudHeader) + "\n1,2,3\n");
  CHECK_THROWS_AS(fw::read_cloud_csv(ss), fw::ParseError);
}

TEST_CASE("key-value config") {
  std::stringstream ss("# comment\ns_fraction = 0.25\n\nr1=0.5  # trailing\nr1 = 0.4\nfirst_crossing_guard = true\n");
  const auto kv = fw::parse_key_values(ss);
  CHECK(kv.at("r1") == "0.4");
  fw::EngineConfig c;
  fw::apply_config(c, kv);
  CHECK(c.s_fraction == 0.25);
  CHECK(c.r1 == 0.4);
  CHECK(c.first_crossing_guard);
  CHECK_THROWS_AS(fw::apply_config(c, {{"nonsense", "1"}}), fw::ConfigError);
  CHECK_THROWS_AS(fw::apply_config(c, {{"r1", "abc"}}), fw::ConfigError);
}
