#pragma once

#include <Eigen/Core>

#include <functional>

namespace frontweave {

/// Normal speed F(x, y, t) of the front, with the constants the sideways
/// time-step bounds need.
class SpeedField {
 public:
  using Fn = std::function<double(double, double, double)>;

  SpeedField() = default;
  SpeedField(Fn f, double lipschitz, bool time_dependent)
      : f_(std::move(f)), K_(lipschitz), time_dependent_(time_dependent) {}

  double operator()(double x, double y, double t) const { return f_(x, y, t); }
  double eval(const Eigen::Vector3d& p) const { return f_(p.x(), p.y(), p.z()); }

  /// Global Lipschitz constant K.
  double K() const { return K_; }
  bool time_dependent() const { return time_dependent_; }

  /// Sampled sup of |F| over the ball B(p, rho) in (x, y, t).
  double local_bound(const Eigen::Vector3d& p, double rho) const;

  /// Sampled local Lipschitz estimate max |grad F| over B(p, rho), never
  /// larger than K().
  double local_lipschitz(const Eigen::Vector3d& p, double rho) const;

  /// Sampled max |dF/dt| over B(p, rho), never larger than K().
  double local_time_rate(const Eigen::Vector3d& p, double rho) const;

  static SpeedField constant(double value) {
    return SpeedField([value](double, double, double) { return value; }, 0.0, false);
  }

 private:
  Fn f_;
  double K_ = 0.0;
  bool time_dependent_ = true;
};

}  // namespace frontweave
