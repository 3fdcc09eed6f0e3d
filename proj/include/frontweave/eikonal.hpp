#pragma once

#include "frontweave/normals.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace frontweave {

class ZeroSpeedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Classical first-order FMM update from the smaller x- and y-neighbour
/// arrivals u, v.
template <typename Scalar>
Scalar fmm_update(Scalar u, Scalar v, Scalar h, Scalar F) {
  if (F == Scalar(0)) throw ZeroSpeedError("fmm_update: zero speed");
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  if (u == inf && v == inf) return inf;
  const Scalar tau = h / std::abs(F);
  const Scalar lo = std::min(u, v);
  const Scalar hi = std::max(u, v);
  if (hi - lo < tau) {
    const Scalar r = h / F;
    return Scalar(0.5) * ((u + v) + std::sqrt(Scalar(2) * r * r - (u - v) * (u - v)));
  }
  return lo + tau;
}

/// Arrivals and local slownesses h/|F| at the two axis neighbours of one
/// quadrant; psi_v sits at xi = 1, psi_u at xi = 0.
template <typename Scalar>
struct QuadrantData {
  Scalar psi_v;
  Scalar psi_u;
  Scalar tau_v;
  Scalar tau_u;
};

template <typename Scalar>
struct QuadrantMin {
  Scalar value;
  Scalar xi;      // argmin on [0, 1]
  bool interior;  // true when a two-dimensional candidate won
};

template <typename Scalar>
Scalar quadrant_objective(const QuadrantData<Scalar>& q, Scalar xi) {
  const Scalar w = Scalar(1) - xi;
  return xi * q.psi_v + w * q.psi_u + std::sqrt(xi * xi + w * w) * (xi * q.tau_v + w * q.tau_u);
}

/// Coefficients c0..c4 of the quartic whose roots contain the critical
/// points of quadrant_objective. With e = tau_v - tau_u, the stationarity
/// condition is (2xi-1)(tau_u + e xi) + (2xi^2-2xi+1) e = -(psi_v - psi_u) q(xi),
/// q = sqrt(2xi^2-2xi+1); squaring both sides gives the quartic.
template <typename Scalar>
std::array<Scalar, 5> quartic_coefficients(const QuadrantData<Scalar>& q) {
  const Scalar e = q.tau_v - q.tau_u;
  const Scalar A = Scalar(4) * e;
  const Scalar B = Scalar(2) * q.tau_u - Scalar(3) * e;
  const Scalar C = e - q.tau_u;
  const Scalar k = (q.psi_v - q.psi_u) * (q.psi_v - q.psi_u);
  return {C * C - k, Scalar(2) * B * C + Scalar(2) * k, B * B + Scalar(2) * A * C - Scalar(2) * k,
          Scalar(2) * A * B, A * A};
}

namespace detail {

template <typename Scalar>
Scalar horner(const std::array<Scalar, 5>& c, Scalar x) {
  return (((c[4] * x + c[3]) * x + c[2]) * x + c[1]) * x + c[0];
}

template <typename Scalar>
Scalar horner_derivative(const std::array<Scalar, 5>& c, Scalar x) {
  return ((Scalar(4) * c[4] * x + Scalar(3) * c[3]) * x + Scalar(2) * c[2]) * x + c[1];
}

// q(xi) * f'(xi); smooth on [0, 1], used to polish quartic roots.
template <typename Scalar>
Scalar scaled_gradient(const QuadrantData<Scalar>& q, Scalar xi, Scalar* slope) {
  const Scalar e = q.tau_v - q.tau_u;
  const Scalar d = q.psi_v - q.psi_u;
  const Scalar q2 = Scalar(2) * xi * xi - Scalar(2) * xi + Scalar(1);
  const Scalar qq = std::sqrt(q2);
  const Scalar L = q.tau_u + e * xi;
  const Scalar g = d * qq + (Scalar(2) * xi - Scalar(1)) * L + q2 * e;
  if (slope != nullptr) {
    *slope = d * (Scalar(2) * xi - Scalar(1)) / qq + Scalar(2) * L + (Scalar(2) * xi - Scalar(1)) * e +
             (Scalar(4) * xi - Scalar(2)) * e;
  }
  return g;
}

}  // namespace detail

/// Minimum over xi in [0, 1] of quadrant_objective. Interior critical
/// points come from Newton iterations on the quartic (8 seeds), are
/// polished on the unsquared stationarity condition, and are discarded when
/// their value lies below either neighbour arrival. The one-dimensional
/// endpoint values psi + tau are always candidates.
template <typename Scalar>
QuadrantMin<Scalar> quadrant_minimize(const QuadrantData<Scalar>& q) {
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  const bool v_ok = q.psi_v < inf && q.tau_v < inf;
  const bool u_ok = q.psi_u < inf && q.tau_u < inf;
  if (!v_ok && !u_ok) return {inf, Scalar(0), false};
  if (!u_ok) return {q.psi_v + q.tau_v, Scalar(1), false};
  if (!v_ok) return {q.psi_u + q.tau_u, Scalar(0), false};

  QuadrantMin<Scalar> best{q.psi_u + q.tau_u, Scalar(0), false};
  if (q.psi_v + q.tau_v < best.value) best = {q.psi_v + q.tau_v, Scalar(1), false};

  const auto c = quartic_coefficients(q);
  const Scalar floor_value = std::max(q.psi_v, q.psi_u);
  constexpr int kSeeds = 8;
  for (int s = 0; s < kSeeds; ++s) {
    Scalar x = (Scalar(s) + Scalar(0.5)) / Scalar(kSeeds);
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      const Scalar dp = detail::horner_derivative(c, x);
      if (dp == Scalar(0)) break;
      const Scalar step = detail::horner(c, x) / dp;
      x -= step;
      if (!(x > Scalar(-0.25) && x < Scalar(1.25))) break;
      if (std::abs(step) <= Scalar(64) * std::numeric_limits<Scalar>::epsilon()) {
        converged = true;
        break;
      }
    }
    if (!(x > Scalar(-0.25) && x < Scalar(1.25))) continue;
    // polish on q*f', which has simple roots where the quartic may not
    for (int it = 0; it < 8; ++it) {
      Scalar slope;
      const Scalar g = detail::scaled_gradient(q, std::clamp(x, Scalar(0), Scalar(1)), &slope);
      if (slope == Scalar(0)) break;
      const Scalar nx = std::clamp(x, Scalar(0), Scalar(1)) - g / slope;
      if (!(nx > Scalar(-0.25) && nx < Scalar(1.25))) break;
      x = nx;
    }
    (void)converged;
    if (!(x > Scalar(0) && x < Scalar(1))) continue;
    const Scalar val = quadrant_objective(q, x);
    if (val < floor_value) continue;
    if (val < best.value) best = {val, x, true};
  }
  return best;
}

/// Arrivals of the four axis neighbours in the order x-, x+, y-, y+;
/// +inf marks a neighbour that is not admissible.
template <typename Scalar>
struct NeighborValues {
  std::array<Scalar, 4> psi{std::numeric_limits<Scalar>::infinity(),
                            std::numeric_limits<Scalar>::infinity(),
                            std::numeric_limits<Scalar>::infinity(),
                            std::numeric_limits<Scalar>::infinity()};
  bool any() const {
    return std::any_of(psi.begin(), psi.end(), [](Scalar v) { return v < std::numeric_limits<Scalar>::infinity(); });
  }
};

template <typename Scalar>
struct EikonalUpdate {
  Scalar psi = std::numeric_limits<Scalar>::infinity();
  int quadrant = -1;  // 0..3 for the time-dependent update, -1 otherwise
  UsedNeighbors<Scalar> used;
  Eigen::Matrix<Scalar, 3, 1> normal3 = Eigen::Matrix<Scalar, 3, 1>::Zero();
  bool finite() const { return psi < std::numeric_limits<Scalar>::infinity(); }
};

/// Classical update at a point with speed F_ij, including the normal.
template <typename Scalar>
EikonalUpdate<Scalar> fmm_point_update(const NeighborValues<Scalar>& nb, Scalar h, Scalar F_ij, int orient) {
  EikonalUpdate<Scalar> out;
  const Scalar u = std::min(nb.psi[0], nb.psi[1]);
  const Scalar v = std::min(nb.psi[2], nb.psi[3]);
  out.psi = fmm_update(u, v, h, F_ij);
  if (!out.finite()) return out;
  const int dx = nb.psi[0] <= nb.psi[1] ? -1 : 1;
  const int dy = nb.psi[2] <= nb.psi[3] ? -1 : 1;
  const Scalar tau = h / std::abs(F_ij);
  if (std::max(u, v) - std::min(u, v) < tau) {
    out.used = {dx, u, dy, v};
  } else if (u <= v) {
    out.used = {dx, u, 0, Scalar(0)};
  } else {
    out.used = {0, Scalar(0), dy, v};
  }
  out.normal3 = normal_from_fmm(out.psi, out.used, h, orient);
  return out;
}

/// Time-dependent update: minimum over the four quadrants of the segment
/// minimisation, with tau = h/|F| evaluated at each neighbour's own
/// position and arrival. `tau` holds those slownesses in x-, x+, y-, y+
/// order (+inf for inadmissible neighbours).
template <typename Scalar>
EikonalUpdate<Scalar> tfmm_point_update(const NeighborValues<Scalar>& nb, const std::array<Scalar, 4>& tau, Scalar h,
                                        int orient) {
  // Quadrant 1: (x+, y+), 2: (x-, y+), 3: (x-, y-), 4: (x+, y-); psi_u on x, psi_v on y.
  static constexpr std::array<std::array<int, 2>, 4> kQuadrants{{{1, 3}, {0, 3}, {0, 2}, {1, 2}}};
  EikonalUpdate<Scalar> out;
  QuadrantMin<Scalar> best{std::numeric_limits<Scalar>::infinity(), Scalar(0), false};
  for (int k = 0; k < 4; ++k) {
    const int ux = kQuadrants[k][0];
    const int vy = kQuadrants[k][1];
    const QuadrantData<Scalar> q{nb.psi[vy], nb.psi[ux], tau[vy], tau[ux]};
    const auto m = quadrant_minimize(q);
    if (m.value < best.value) {
      best = m;
      out.quadrant = k;
    }
  }
  out.psi = best.value;
  if (!out.finite()) return out;
  const int ux = kQuadrants[out.quadrant][0];
  const int vy = kQuadrants[out.quadrant][1];
  const int dx = ux == 0 ? -1 : 1;
  const int dy = vy == 2 ? -1 : 1;
  if (best.interior) {
    out.used = {dx, nb.psi[ux], dy, nb.psi[vy]};
  } else if (best.xi == Scalar(1)) {
    out.used = {0, Scalar(0), dy, nb.psi[vy]};
  } else {
    out.used = {dx, nb.psi[ux], 0, Scalar(0)};
  }
  out.normal3 = normal_from_fmm(out.psi, out.used, h, orient);
  return out;
}

}  // namespace frontweave
