#include "frontweave/speed.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace frontweave {

namespace {

// Centre, the six axis points and the eight cube corners scaled into the ball.
const std::array<Eigen::Vector3d, 15>& ball_stencil() {
  static const std::array<Eigen::Vector3d, 15> pts = [] {
    std::array<Eigen::Vector3d, 15> a;
    a[0] = Eigen::Vector3d::Zero();
    int k = 1;
    for (int d = 0; d < 3; ++d) {
      for (int s : {-1, 1}) {
        Eigen::Vector3d v = Eigen::Vector3d::Zero();
        v[d] = s;
        a[k++] = v;
      }
    }
    const double c = 1.0 / std::sqrt(3.0);
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        for (int st : {-1, 1}) a[k++] = Eigen::Vector3d(sx * c, sy * c, st * c);
    return a;
  }();
  return pts;
}

}  // namespace

double SpeedField::local_bound(const Eigen::Vector3d& p, double rho) const {
  double m = 0.0;
  for (const auto& d : ball_stencil()) m = std::max(m, std::abs(eval(p + rho * d)));
  return m;
}

double SpeedField::local_lipschitz(const Eigen::Vector3d& p, double rho) const {
  const double eps = std::max(rho * 1e-3, 1e-7);
  double k = 0.0;
  for (const auto& d : ball_stencil()) {
    const Eigen::Vector3d q = p + rho * d;
    Eigen::Vector3d g;
    for (int a = 0; a < 3; ++a) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[a] = eps;
      g[a] = (eval(q + e) - eval(q - e)) / (2.0 * eps);
    }
    if (std::isfinite(g.norm())) k = std::max(k, g.norm());
  }
  return K_ > 0.0 ? std::min(k, K_) : k;
}

double SpeedField::local_time_rate(const Eigen::Vector3d& p, double rho) const {
  const double eps = std::max(rho * 1e-3, 1e-7);
  const Eigen::Vector3d e(0.0, 0.0, eps);
  double k = 0.0;
  for (const auto& d : ball_stencil()) {
    const Eigen::Vector3d q = p + rho * d;
    const double g = std::abs(eval(q + e) - eval(q - e)) / (2.0 * eps);
    if (std::isfinite(g)) k = std::max(k, g);
  }
  return K_ > 0.0 ? std::min(k, K_) : k;
}

}  // namespace frontweave
