#include "frontweave/sideways.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontweave {

std::string_view to_string(Representation r) {
  switch (r) {
    case Representation::yt: return "yt";
    case Representation::xt: return "xt";
    case Representation::skew: return "skew";
  }
  return "unknown";
}

Source source_of(Representation r) {
  switch (r) {
    case Representation::yt: return Source::sideways_yt;
    case Representation::xt: return Source::sideways_xt;
    case Representation::skew: return Source::sideways_skew;
  }
  return Source::sideways_yt;
}

double cfl_dt(double P, double M, double K, double delta, double h) {
  if (!(P > 2.0)) {
    std::ostringstream ss;
    ss << "cfl_dt: slope bound P=" << P << " must exceed 2";
    throw InvalidSlopeBound(ss.str());
  }
  double bound = kInf;
  if (M > 0.0) bound = std::min(bound, h / (2.0 * P * M));
  if (K > 0.0) bound = std::min(bound, (P - 2.0) / (K * P * std::sqrt(1.0 + 2.0 * P * P)));
  if (delta > 0.0) bound = std::min(bound, 2.0 / (P * delta));
  return 0.9 * bound;
}

double BoundaryLine::at(double time) const {
  if (!covers(time)) return kInf;
  const auto it = std::lower_bound(t.begin(), t.end(), time);
  const auto k = static_cast<std::size_t>(it - t.begin());
  if (t[k] == time) return w[k];
  const double lam = (time - t[k - 1]) / (t[k] - t[k - 1]);
  return w[k - 1] + lam * (w[k] - w[k - 1]);
}

Eigen::Vector2d SidewaysPatch::w_axis() const {
  switch (rep) {
    case Representation::yt: return {1.0, 0.0};
    case Representation::xt: return {0.0, 1.0};
    case Representation::skew: return {std::cos(theta), std::sin(theta)};
  }
  return {1.0, 0.0};
}

Eigen::Vector2d SidewaysPatch::z_axis() const {
  switch (rep) {
    case Representation::yt: return {0.0, 1.0};
    case Representation::xt: return {1.0, 0.0};
    case Representation::skew: return {-std::sin(theta), std::cos(theta)};
  }
  return {0.0, 1.0};
}

void SidewaysPatch::apply_boundary(int r) {
  auto& row = chi[static_cast<std::size_t>(r)];
  const double t = times[static_cast<std::size_t>(r)];
  for (int l = 0; l < cols(); ++l) {
    const auto& line = boundary[static_cast<std::size_t>(l)];
    if (line.covers(t)) row(l) = line.at(t);
  }
  if (r == origin_row && origin_col >= 0) row(origin_col) = origin_w;
}

Eigen::ArrayXd sideways_step(const SidewaysPatch& patch, const SpeedField& F, int r, double dt) {
  const auto& row = patch.chi[static_cast<std::size_t>(r)];
  const double t = patch.times[static_cast<std::size_t>(r)];
  const Eigen::Index n = row.size();
  Eigen::ArrayXd next = Eigen::ArrayXd::Constant(n, kInf);
  for (Eigen::Index l = 1; l + 1 < n; ++l) {
    if (!std::isfinite(row(l - 1)) || !std::isfinite(row(l + 1)) || !std::isfinite(row(l))) continue;
    const Eigen::Vector2d p = patch.to_xy(row(l), patch.z_vals[static_cast<std::size_t>(l)]);
    const double f = F(p.x(), p.y(), t);
    const double d_plus = (row(l + 1) - row(l)) / patch.h;
    const double d_minus = (row(l) - row(l - 1)) / patch.h;
    next(l) = sideways_update(row(l), d_plus, d_minus, patch.a, f, dt);
  }
  return next;
}

double row_slope_bound(const Eigen::ArrayXd& row, double h) {
  double p = 0.0;
  for (Eigen::Index l = 0; l + 1 < row.size(); ++l) {
    if (std::isfinite(row(l)) && std::isfinite(row(l + 1))) p = std::max(p, std::abs(row(l + 1) - row(l)) / h);
  }
  return std::clamp(p, 3.0, std::max(3.0, 2.0 / h));
}

namespace {

// Column used to watch the sign of F: the origin column, or the nearest finite one.
int watch_column(const SidewaysPatch& patch, const Eigen::ArrayXd& row) {
  const int c = patch.origin_col >= 0 ? patch.origin_col : patch.cols() / 2;
  for (int d = 0; d < patch.cols(); ++d) {
    if (c - d >= 0 && std::isfinite(row(c - d))) return c - d;
    if (c + d < patch.cols() && std::isfinite(row(c + d))) return c + d;
  }
  return -1;
}

}  // namespace

SolveStats solve_patch(SidewaysPatch& patch, const SpeedField& F, int R_max, const DtPolicy& policy, double T,
                       const RowPredicate& stop) {
  SolveStats stats;
  if (patch.a == 0 || patch.chi.empty()) {
    stats.exhausted = true;
    return stats;
  }
  const double h = patch.h;
  const int origin_row = std::max(patch.origin_row, 0);
  double K = F.K();
  if (policy.local_lipschitz) {
    const int wc = watch_column(patch, patch.chi.back());
    if (wc >= 0) {
      const auto& row = patch.chi.back();
      const Eigen::Vector2d c = patch.to_xy(row(wc), patch.z_vals[static_cast<std::size_t>(wc)]);
      const double radius = std::max(patch.s, 1) * h;
      K = F.local_lipschitz(Eigen::Vector3d(c.x(), c.y(), patch.times.back()), radius);
    }
  }
  bool changed = false;
  int steps_after_origin = 0;
  for (;;) {
    const int r = patch.rows() - 1;
    if (r >= origin_row && steps_after_origin >= R_max) break;
    const auto& row = patch.chi.back();
    const double t = patch.times.back();
    if (t > T) {
      stats.reached_T = true;
      break;
    }
    if (!(row.isFinite().any())) {
      stats.exhausted = true;
      break;
    }
    if (!changed && r >= origin_row) {
      const int wc = watch_column(patch, row);
      if (wc >= 0) {
        const Eigen::Vector2d p = patch.to_xy(row(wc), patch.z_vals[static_cast<std::size_t>(wc)]);
        const int sg = sign_of(F(p.x(), p.y(), t));
        if (sg != 0 && sg != patch.f_sign0) changed = true;
      }
    }
    double dt;
    if (r < static_cast<int>(patch.preset_dt.size())) {
      dt = patch.preset_dt[static_cast<std::size_t>(r)];
    } else if (policy.fixed) {
      dt = *policy.fixed;
    } else {
      dt = (changed ? policy.r2 : policy.r1) * h;
      if (policy.use_cfl) {
        double M = 0.0;
        for (int l = 0; l < patch.cols(); ++l) {
          if (!std::isfinite(row(l))) continue;
          const Eigen::Vector2d p = patch.to_xy(row(l), patch.z_vals[static_cast<std::size_t>(l)]);
          M = std::max(M, F.local_bound(Eigen::Vector3d(p.x(), p.y(), t), 2.0 * h));
        }
        dt = std::min(dt, cfl_dt(row_slope_bound(row, h), M, K, policy.delta, h));
      }
    }
    Eigen::ArrayXd next = sideways_step(patch, F, r, dt);
    patch.chi.push_back(std::move(next));
    patch.times.push_back(r + 1 == patch.origin_row ? patch.origin_t : t + dt);
    patch.dt_schedule.push_back(dt);
    patch.apply_boundary(patch.rows() - 1);
    ++stats.steps;
    if (patch.rows() - 1 > origin_row) ++steps_after_origin;
    if (stop && patch.rows() - 1 > origin_row && stop(patch, patch.rows() - 1)) {
      stats.stopped = true;
      break;
    }
  }
  if (!patch.chi.back().isFinite().any()) stats.exhausted = true;
  return stats;
}

}  // namespace frontweave
