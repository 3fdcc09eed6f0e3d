#pragma once

#include "frontweave/grid.hpp"
#include "frontweave/speed.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace frontweave {

enum class Representation : std::uint8_t { yt, xt, skew };

std::string_view to_string(Representation r);
Source source_of(Representation r);

class InvalidSlopeBound : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Godunov-type selection of the squared one-sided slopes, switched by alpha.
template <typename Scalar>
Scalar upw_from_slopes(Scalar d_plus, Scalar d_minus, int alpha) {
  const Scalar zero(0);
  Scalar out(0);
  if (alpha > 0) {
    const Scalar a = std::min(d_plus, zero);
    const Scalar b = std::max(d_minus, zero);
    out += a * a + b * b;
  } else if (alpha < 0) {
    const Scalar a = std::max(d_plus, zero);
    const Scalar b = std::min(d_minus, zero);
    out += a * a + b * b;
  }
  return out;
}

template <typename Derived>
typename Derived::Scalar upw(const Eigen::DenseBase<Derived>& row, Eigen::Index l, typename Derived::Scalar h,
                             int alpha) {
  const auto d_plus = (row(l + 1) - row(l)) / h;
  const auto d_minus = (row(l) - row(l - 1)) / h;
  return upw_from_slopes(d_plus, d_minus, alpha);
}

/// One explicit step of chi_t + a F sqrt(1 + chi_z^2) = 0 at a node with
/// value chi, one-sided slopes d_plus / d_minus and local speed F.
template <typename Scalar>
Scalar sideways_update(Scalar chi, Scalar d_plus, Scalar d_minus, int a, Scalar F, Scalar dt) {
  const int alpha = sign_of(Scalar(a) * F);
  return chi - Scalar(a) * dt * F * std::sqrt(Scalar(1) + upw_from_slopes(d_plus, d_minus, alpha));
}

/// 0.9 times the minimum of the stability bounds. M = 0 or K = 0 drops the
/// corresponding term.
double cfl_dt(double P, double M, double K, double delta, double h);

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> skew_map(Scalar x, Scalar y, Scalar theta) {
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  return {x * c + y * s, -x * s + y * c};
}

template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> skew_unmap(Scalar w, Scalar z, Scalar theta) {
  const Scalar c = std::cos(theta);
  const Scalar s = std::sin(theta);
  return {w * c - z * s, w * s + z * c};
}

/// Piecewise-linear samples w(t) along one line z = const.
struct BoundaryLine {
  std::vector<double> t;
  std::vector<double> w;

  bool empty() const { return t.empty(); }
  bool covers(double time) const { return !t.empty() && time >= t.front() && time <= t.back(); }
  /// Linear interpolation; +inf outside [t.front(), t.back()].
  double at(double time) const;
};

/// A local (z, t) grid of chi values: the front written as w = chi(z, t) in
/// the chosen representation. Rows are time levels, columns are z lines.
struct SidewaysPatch {
  Representation rep = Representation::yt;
  double theta = 0.0;  // skew only
  int a = 1;
  double h = 0.0;
  int s = 0;
  std::vector<double> z_vals;
  double t0 = 0.0;
  std::vector<double> times;
  std::vector<double> dt_schedule;
  std::vector<Eigen::ArrayXd> chi;
  std::vector<BoundaryLine> boundary;  // per column, possibly empty
  std::vector<double> preset_dt;       // leading steps with fixed size
  int origin_col = -1;
  int origin_row = -1;
  double origin_w = 0.0;
  double origin_t = 0.0;
  int f_sign0 = 0;  // sign of F at t = 0 below the point that triggered the patch

  int cols() const { return static_cast<int>(z_vals.size()); }
  int rows() const { return static_cast<int>(chi.size()); }

  Eigen::Vector2d w_axis() const;
  Eigen::Vector2d z_axis() const;
  Eigen::Vector2d to_xy(double w, double z) const { return w * w_axis() + z * z_axis(); }
  double w_of(double x, double y) const { return w_axis().dot(Eigen::Vector2d(x, y)); }
  double z_of(double x, double y) const { return z_axis().dot(Eigen::Vector2d(x, y)); }

  /// Fills row `r` from the boundary lines wherever they cover times[r].
  void apply_boundary(int r);
};

/// Returns row r + 1. Nodes whose stencil touches +inf become +inf.
Eigen::ArrayXd sideways_step(const SidewaysPatch& patch, const SpeedField& F, int r, double dt);

struct DtPolicy {
  double r1 = 1.0 / 3.0;
  double r2 = 2.0;
  bool use_cfl = true;
  double delta = 1.0;
  bool local_lipschitz = true;
  std::optional<double> fixed;  // overrides everything when set
};

struct SolveStats {
  int steps = 0;
  bool exhausted = false;
  bool stopped = false;
  bool reached_T = false;
};

/// Called after each new row; returning true stops the solve.
using RowPredicate = std::function<bool(const SidewaysPatch&, int)>;

/// Steps the patch until R_max steps past the origin row, exhaustion,
/// t > T or the predicate fires.
SolveStats solve_patch(SidewaysPatch& patch, const SpeedField& F, int R_max, const DtPolicy& policy,
                       double T = std::numeric_limits<double>::infinity(), const RowPredicate& stop = {});

/// Slope bound P for a row: max finite |D+-|, clamped to [3, 2/h].
double row_slope_bound(const Eigen::ArrayXd& row, double h);

}  // namespace frontweave
