#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frontweave/eikonal.hpp"

#include <cmath>
#include <limits>

namespace fw = frontweave;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scan_min(const fw::QuadrantData<double>& q, int n) {
  double best = kInf;
  for (int k = 0; k <= n; ++k) best = std::min(best, fw::quadrant_objective(q, static_cast<double>(k) / n));
  return best;
}

}  // namespace

TEST_CASE("classical update branches") {
  CHECK(fw::fmm_update(0.0, 0.0, 1.0, 1.0) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(fw::fmm_update(0.0, kInf, 0.1, 2.0) == doctest::Approx(0.05));
  CHECK(fw::fmm_update(0.2, 0.6, 0.1, 1.0) == doctest::Approx(0.3));
  CHECK(fw::fmm_update(kInf, kInf, 0.1, 1.0) == kInf);
  CHECK_THROWS_AS(fw::fmm_update(0.0, 0.0, 0.1, 0.0), fw::ZeroSpeedError);
}

TEST_CASE("quadrant minimum on symmetric data sits at xi = 1/2") {
  const auto m = fw::quadrant_minimize(fw::QuadrantData<double>{0.0, 0.0, 0.1, 0.1});
  CHECK(m.value == doctest::Approx(0.1 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(m.xi == doctest::Approx(0.5));
  CHECK(m.interior);
}

TEST_CASE("one missing neighbour leaves the one-dimensional value") {
  const auto m = fw::quadrant_minimize(fw::QuadrantData<double>{0.3, kInf, 0.05, kInf});
  CHECK(m.value == doctest::Approx(0.35));
  CHECK(fw::quadrant_minimize(fw::QuadrantData<double>{kInf, kInf, kInf, kInf}).value == kInf);
}

TEST_CASE("quadrant minimum agrees with a fine scan") {
  const fw::QuadrantData<double> q{0.0, 0.05, 0.1, 0.12};
  CHECK(std::abs(fw::quadrant_minimize(q).value - scan_min(q, 1000000)) <= 1e-6);
}

TEST_CASE("interior minima below the later neighbour are discarded") {
  const fw::QuadrantData<double> q{0.3628, 0.9607, 0.6983, 0.1088};
  const auto m = fw::quadrant_minimize(q);
  CHECK(m.value >= std::max(q.psi_u, q.psi_v));
  CHECK(scan_min(q, 100000) < m.value);
}

TEST_CASE("constant speed time-dependent update equals the classical one") {
  fw::NeighborValues<double> nb;
  nb.psi = {0.10, 0.14, kInf, 0.12};
  const double h = 0.05;
  const std::array<double, 4> tau{h, h, h, h};
  const auto t = fw::tfmm_point_update(nb, tau, h, 1);
  const auto c = fw::fmm_point_update(nb, h, 1.0, 1);
  CHECK(t.psi == doctest::Approx(c.psi).epsilon(1e-12));
  CHECK(t.normal3.z() < 0.0);
  CHECK(t.normal3.norm() == doctest::Approx(1.0));
}

TEST_CASE("update is symmetric under reflecting the neighbours") {
  fw::NeighborValues<double> nb;
  nb.psi = {0.10, 0.17, 0.13, 0.2};
  const std::array<double, 4> tau{0.04, 0.06, 0.05, 0.07};
  fw::NeighborValues<double> flipped;
  flipped.psi = {nb.psi[1], nb.psi[0], nb.psi[3], nb.psi[2]};
  const std::array<double, 4> tau_f{tau[1], tau[0], tau[3], tau[2]};
  CHECK(fw::tfmm_point_update(nb, tau, 0.05, 1).psi ==
        doctest::Approx(fw::tfmm_point_update(flipped, tau_f, 0.05, 1).psi).epsilon(1e-14));
}

TEST_CASE("no admissible neighbours gives +inf") {
  fw::NeighborValues<double> nb;
  const std::array<double, 4> tau{kInf, kInf, kInf, kInf};
  CHECK_FALSE(fw::tfmm_point_update(nb, tau, 0.1, 1).finite());
}

TEST_CASE("normal from a one-sided update") {
  fw::UsedNeighbors<double> used{-1, 0.0, 0, 0.0};
  const auto n = fw::normal_from_fmm(0.1, used, 0.1, 1);
  CHECK(n.x() == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(n.y() == 0.0);
  CHECK(n.z() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(fw::normal_from_fmm(0.1, used, 0.1, -1).z() > 0.0);
}
