#include "frontweave/weaving.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontweave {

SignTestResult sign_test(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const SpeedField& F, int samples) {
  samples = std::max(samples, 2);
  int last = 0;
  int d = 0;
  for (int k = 0; k < samples; ++k) {
    const double lam = static_cast<double>(k) / (samples - 1);
    const Eigen::Vector3d r = p + lam * (q - p);
    const int sg = sign_of(F.eval(r));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++d;
    last = sg;
  }
  SignTestResult out;
  out.d = d;
  out.verdict = d == 0 ? Verdict::pass : (d == 1 ? Verdict::fail : Verdict::refine);
  return out;
}

SignTestResult sign_test(const SurfacePoint& p, const SurfacePoint& q, const SpeedField& F, int samples) {
  return sign_test(space_time(p), space_time(q), F, samples);
}

int segment_samples(const Eigen::Vector3d& p, const Eigen::Vector3d& q, double h, int per_cell) {
  const double len = (q - p).norm();
  if (!std::isfinite(len)) return 2;
  return std::max(2, static_cast<int>(std::ceil(per_cell * len / h)) + 1);
}

namespace {

Eigen::Vector3d assemble_normal(const SidewaysPatch& patch, double v_z, double v_t) {
  const double a = patch.a;
  const Eigen::Vector2d xy = -a * patch.w_axis() + a * v_z * patch.z_axis();
  Eigen::Vector3d v(xy.x(), xy.y(), a * v_t);
  return v / v.norm();
}

// Like normal_from_sideways but falls back to one-sided differences at the
// edges of the finite region.
Eigen::Vector3d relaxed_normal(const SidewaysPatch& patch, int l, int r) {
  const auto& prev = patch.chi[static_cast<std::size_t>(r - 1)];
  const auto& cur = patch.chi[static_cast<std::size_t>(r)];
  const double h = patch.h;
  double v_z = 0.0;
  const bool lo = l - 1 >= 0 && std::isfinite(prev(l - 1));
  const bool hi = l + 1 < patch.cols() && std::isfinite(prev(l + 1));
  const bool mid = std::isfinite(prev(l));
  if (lo && hi) {
    v_z = (prev(l + 1) - prev(l - 1)) / (2.0 * h);
  } else if (hi && mid) {
    v_z = (prev(l + 1) - prev(l)) / h;
  } else if (lo && mid) {
    v_z = (prev(l) - prev(l - 1)) / h;
  }
  double v_t = 0.0;
  const double dt = patch.times[static_cast<std::size_t>(r)] - patch.times[static_cast<std::size_t>(r - 1)];
  if (mid && std::isfinite(cur(l)) && dt > 0.0) v_t = (cur(l) - prev(l)) / dt;
  return assemble_normal(patch, v_z, v_t);
}

}  // namespace

Eigen::Vector3d normal_from_sideways(const SidewaysPatch& patch, int l, int r) {
  if (r < 1 || r >= patch.rows() || l < 1 || l + 1 >= patch.cols()) {
    throw MissingStencilError("normal_from_sideways: stencil outside the patch");
  }
  const auto& prev = patch.chi[static_cast<std::size_t>(r - 1)];
  const auto& cur = patch.chi[static_cast<std::size_t>(r)];
  if (!std::isfinite(prev(l - 1)) || !std::isfinite(prev(l + 1)) || !std::isfinite(prev(l)) ||
      !std::isfinite(cur(l))) {
    throw MissingStencilError("normal_from_sideways: stencil has +inf entries");
  }
  const double dt = patch.times[static_cast<std::size_t>(r)] - patch.times[static_cast<std::size_t>(r - 1)];
  const double v_z = (prev(l + 1) - prev(l - 1)) / (2.0 * patch.h);
  const double v_t = (cur(l) - prev(l)) / dt;
  return assemble_normal(patch, v_z, v_t);
}

std::vector<const SurfacePoint*> neigh_side(const MarchState& state, const SurfacePoint& p_ab,
                                            const Eigen::Vector2d& w_axis, int s) {
  std::vector<const SurfacePoint*> out;
  const int ref = sign_of(w_axis.dot(p_ab.normal3.head<2>()));
  const auto& g = state.grid;
  for (int i = std::max(0, p_ab.i - s); i <= std::min(g.n - 1, p_ab.i + s); ++i) {
    for (int j = std::max(0, p_ab.j - s); j <= std::min(g.n - 1, p_ab.j + s); ++j) {
      for (int k : state.history(i, j)) {
        const SurfacePoint& q = state.accepted[static_cast<std::size_t>(k)];
        if (!std::isfinite(q.psi)) continue;
        if (sign_of(w_axis.dot(q.normal3.head<2>())) == ref) out.push_back(&q);
      }
    }
  }
  return out;
}

namespace {

using LineSamples = std::vector<std::pair<double, double>>;  // (t, w)

// Runs of samples along w separated by gaps wider than `gap`, as [lo, hi).
std::vector<std::pair<std::size_t, std::size_t>> w_runs(LineSamples& sm, double gap) {
  std::sort(sm.begin(), sm.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  for (std::size_t k = 0; k < sm.size();) {
    std::size_t e = k + 1;
    while (e < sm.size() && sm[e].second - sm[e - 1].second <= gap) ++e;
    runs.emplace_back(k, e);
    k = e;
  }
  return runs;
}

double interval_gap(double lo_a, double hi_a, double lo_b, double hi_b) {
  return std::max({0.0, lo_b - hi_a, lo_a - hi_b});
}

// Keeps, on every line, the run of samples that continues the branch through
// the origin; runs belonging to other parts of the front are dropped. Lines
// whose nearest run lies more than `reach` from their inner neighbour's run are
// emptied.
void keep_origin_branch(std::vector<LineSamples>& samples, std::size_t origin_col, double w_c, double h) {
  const double gap = 2.5 * h;
  const double reach = 4.0 * h;
  const auto walk = [&](int step) {
    double lo = w_c;
    double hi = w_c;
    for (auto c = static_cast<std::ptrdiff_t>(origin_col); c >= 0 && c < static_cast<std::ptrdiff_t>(samples.size());
         c += step) {
      auto& sm = samples[static_cast<std::size_t>(c)];
      if (sm.empty()) continue;
      const auto runs = w_runs(sm, gap);
      std::size_t best = 0;
      double best_gap = kInf;
      for (std::size_t r = 0; r < runs.size(); ++r) {
        const double d = interval_gap(lo, hi, sm[runs[r].first].second, sm[runs[r].second - 1].second);
        if (d < best_gap) {
          best_gap = d;
          best = r;
        }
      }
      if (best_gap > reach) {
        sm.clear();
        continue;
      }
      LineSamples kept(sm.begin() + static_cast<std::ptrdiff_t>(runs[best].first),
                       sm.begin() + static_cast<std::ptrdiff_t>(runs[best].second));
      lo = kept.front().second;
      hi = kept.back().second;
      sm = std::move(kept);
    }
  };
  walk(-1);
  walk(+1);
}

// Crossing of the initial curve with the line z, near w_c, whose normal has
// the reference sign along the w axis.
std::optional<double> initial_crossing(const SidewaysPatch& patch, const std::function<double(double, double)>& phi0,
                                       double z, double w_c, double half_width, int ref) {
  const auto at = [&](double w) {
    const Eigen::Vector2d p = patch.to_xy(w, z);
    return phi0(p.x(), p.y());
  };
  const double step = patch.h / 4.0;
  const int n = static_cast<int>(std::ceil(2.0 * half_width / step));
  std::optional<double> best;
  double w0 = w_c - half_width;
  double f0 = at(w0);
  for (int k = 1; k <= n; ++k) {
    const double w1 = w_c - half_width + k * step;
    const double f1 = at(w1);
    if (std::isfinite(f0) && std::isfinite(f1) && ((f0 <= 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 <= 0.0))) {
      double lo = w0;
      double hi = w1;
      double flo = f0;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = at(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      const double w = 0.5 * (lo + hi);
      // phi0 increases along w where the crossing's normal points along +w
      if (sign_of(f1 - f0) == ref && (!best || std::abs(w - w_c) < std::abs(*best - w_c))) best = w;
    }
    w0 = w1;
    f0 = f1;
  }
  return best;
}

}  // namespace

SidewaysPatch convert_to_sideways(const MarchState& state, const SurfacePoint& p_ab, const PatchRequest& req,
                                  const SpeedField& F) {
  const auto& g = state.grid;
  SidewaysPatch patch;
  patch.rep = req.rep;
  patch.theta = req.theta;
  patch.a = req.a;
  patch.h = g.h;
  patch.s = req.s;
  patch.f_sign0 = sign_of(F(p_ab.x, p_ab.y, 0.0));

  const double w_c = patch.w_of(p_ab.x, p_ab.y);
  const double z_c = patch.z_of(p_ab.x, p_ab.y);

  // Columns: the lines z_c + k h, |k| <= s, restricted to grid lines for the
  // axis-aligned representations.
  int k_lo = -req.s;
  int k_hi = req.s;
  if (req.rep == Representation::yt) {
    k_lo = std::max(k_lo, -p_ab.j);
    k_hi = std::min(k_hi, g.n - 1 - p_ab.j);
  } else if (req.rep == Representation::xt) {
    k_lo = std::max(k_lo, -p_ab.i);
    k_hi = std::min(k_hi, g.n - 1 - p_ab.i);
  }
  for (int k = k_lo; k <= k_hi; ++k) patch.z_vals.push_back(z_c + k * g.h);
  patch.origin_col = -k_lo;

  // Samples (t, w) per line.
  std::vector<LineSamples> samples(patch.z_vals.size());
  for (const SurfacePoint* q : neigh_side(state, p_ab, patch.w_axis(), req.s)) {
    double w = patch.w_of(q->x, q->y);
    int col;
    if (req.rep == Representation::yt) {
      col = q->j - p_ab.j - k_lo;
    } else if (req.rep == Representation::xt) {
      col = q->i - p_ab.i - k_lo;
    } else {
      const double z = patch.z_of(q->x, q->y);
      const double u = (z - z_c) / g.h;
      const int k = static_cast<int>(std::lround(u));
      col = k - k_lo;
      if (col < 0 || col >= patch.cols()) continue;
      // shift along the front's tangent onto the line
      const double n_w = patch.w_axis().dot(q->normal3.head<2>());
      const double n_z = patch.z_axis().dot(q->normal3.head<2>());
      if (std::abs(n_w) < 0.2) continue;
      w += (patch.z_vals[static_cast<std::size_t>(col)] - z) * (-n_z / n_w);
    }
    if (col < 0 || col >= patch.cols()) continue;
    samples[static_cast<std::size_t>(col)].emplace_back(q->psi, w);
  }
  keep_origin_branch(samples, static_cast<std::size_t>(patch.origin_col), w_c, g.h);
  const double dt_pre = req.dt_pre > 0.0 ? req.dt_pre : g.h / 3.0;
  if (state.initial_phi && p_ab.psi <= req.s * dt_pre) {
    const int ref = sign_of(patch.w_axis().dot(p_ab.normal3.head<2>()));
    const double half = (req.s + 1) * g.h;
    for (std::size_t c = 0; c < samples.size(); ++c) {
      if (auto w = initial_crossing(patch, state.initial_phi, patch.z_vals[c], w_c, half, ref)) {
        samples[c].emplace_back(0.0, *w);
      }
    }
  }
  patch.boundary.resize(patch.z_vals.size());
  int lines_with_data = 0;
  for (std::size_t c = 0; c < samples.size(); ++c) {
    auto& sm = samples[c];
    if (sm.empty()) continue;
    std::sort(sm.begin(), sm.end());
    auto& line = patch.boundary[c];
    for (std::size_t k = 0; k < sm.size();) {
      std::size_t e = k;
      double sum = 0.0;
      while (e < sm.size() && sm[e].first == sm[k].first) sum += sm[e++].second;
      line.t.push_back(sm[k].first);
      line.w.push_back(sum / static_cast<double>(e - k));
      k = e;
    }
    ++lines_with_data;
  }
  if (lines_with_data < 3) {
    std::ostringstream ss;
    ss << "convert_to_sideways: only " << lines_with_data << " lines with data around (" << p_ab.i << ","
       << p_ab.j << ")";
    throw InsufficientDataError(ss.str());
  }

  // Leading rows end exactly at psi_ab; pick how many to maximize the
  // number of lines that carry data on the first row. The first row may be
  // shortened to start at t = 0.
  int best_r = 0;
  int best_cov = -1;
  for (int r = 0; r <= req.s; ++r) {
    const double t0 = std::max(0.0, p_ab.psi - r * dt_pre);
    if (r > 0 && !(t0 < p_ab.psi - (r - 1) * dt_pre)) break;
    int cov = 0;
    for (const auto& line : patch.boundary) cov += line.covers(t0) ? 1 : 0;
    if (cov > best_cov) {
      best_cov = cov;
      best_r = r;
    }
    if (t0 == 0.0) break;
  }
  patch.origin_row = best_r;
  patch.origin_w = w_c;
  patch.origin_t = p_ab.psi;
  patch.t0 = std::max(0.0, p_ab.psi - best_r * dt_pre);
  patch.preset_dt.clear();
  for (int k = 0; k < best_r; ++k) {
    const double from = k == 0 ? patch.t0 : p_ab.psi - (best_r - k) * dt_pre;
    patch.preset_dt.push_back(p_ab.psi - (best_r - k - 1) * dt_pre - from);
  }
  patch.times = {patch.t0};
  patch.chi = {Eigen::ArrayXd::Constant(patch.cols(), kInf)};
  patch.apply_boundary(0);
  return patch;
}

namespace {

// Patch front at fractional column position u (columns may be interpolated).
double column_value(const SidewaysPatch& patch, int r, int c0, double lam) {
  const auto& row = patch.chi[static_cast<std::size_t>(r)];
  if (lam == 0.0) return row(c0);
  const double a = row(c0);
  const double b = row(c0 + 1);
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return a + lam * (b - a);
}

}  // namespace

std::optional<Crossing> extract_crossing(const SidewaysPatch& patch, double x, double y, double after_t, double T,
                                         int first_row, int last_row) {
  if (patch.rows() < 2 || patch.cols() == 0) return std::nullopt;
  const double w_t = patch.w_of(x, y);
  const double u = (patch.z_of(x, y) - patch.z_vals.front()) / patch.h;
  int c0 = static_cast<int>(std::floor(u));
  double lam = u - c0;
  if (std::abs(lam) < 1e-9) {
    lam = 0.0;
  } else if (std::abs(lam - 1.0) < 1e-9) {
    lam = 0.0;
    ++c0;
  }
  if (c0 < 0 || c0 >= patch.cols() || (lam > 0.0 && c0 + 1 >= patch.cols())) return std::nullopt;
  const int nearest = lam > 0.5 ? c0 + 1 : c0;

  const int r_begin = std::max(first_row >= 0 ? first_row : patch.origin_row, 0);
  const int r_end = last_row >= 0 ? std::min(last_row, patch.rows() - 1) : patch.rows() - 1;
  for (int r = r_begin; r < r_end; ++r) {
    const double f0 = column_value(patch, r, c0, lam) - w_t;
    const double f1 = column_value(patch, r + 1, c0, lam) - w_t;
    if (!std::isfinite(f0) || !std::isfinite(f1)) continue;
    const bool strict = (f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0);
    const bool lands = f1 == 0.0 && f0 != 0.0;
    if (!strict && !lands) continue;
    const double t0 = patch.times[static_cast<std::size_t>(r)];
    const double t1 = patch.times[static_cast<std::size_t>(r + 1)];
    const double t = lands ? t1 : t0 + (t1 - t0) * f0 / (f0 - f1);
    if (!(t > after_t) || t > T) continue;
    Crossing c;
    c.psi = t;
    c.row = r + 1;
    try {
      c.normal3 = normal_from_sideways(patch, nearest, r + 1);
    } catch (const MissingStencilError&) {
      c.normal3 = relaxed_normal(patch, nearest, r + 1);
    }
    return c;
  }
  return std::nullopt;
}

}  // namespace frontweave
