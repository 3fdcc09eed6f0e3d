#include "frontweave/engine.hpp"

#include "frontweave/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontweave {

namespace {

constexpr std::array<std::array<int, 2>, 4> kOffsets{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};

// A one-dimensional update leaves one derivative of psi unknown and its
// normal axis-aligned. Take that derivative from the nearer admissible
// neighbour on the other axis when there is one.
Eigen::Vector3d normal_with_cross_axis(const EikonalUpdate<double>& up, const NeighborValues<double>& nb, double h,
                                       int orient) {
  UsedNeighbors<double> used = up.used;
  if (used.dx != 0 && used.dy != 0) return up.normal3;
  if (used.dx == 0 && std::min(nb.psi[0], nb.psi[1]) < kInf) {
    used.dx = nb.psi[0] <= nb.psi[1] ? -1 : 1;
    used.psi_x = std::min(nb.psi[0], nb.psi[1]);
  }
  if (used.dy == 0 && std::min(nb.psi[2], nb.psi[3]) < kInf) {
    used.dy = nb.psi[2] <= nb.psi[3] ? -1 : 1;
    used.psi_y = std::min(nb.psi[2], nb.psi[3]);
  }
  return normal_from_fmm(up.psi, used, h, orient);
}

double first_root(const std::function<double(double, double, double)>& phi, double x, double y, double T,
                  double step) {
  double t0 = 0.0;
  double f0 = phi(x, y, 0.0);
  if (f0 == 0.0) return 0.0;
  const int n = static_cast<int>(std::ceil(T / step));
  for (int k = 1; k <= n; ++k) {
    const double t1 = std::min(T, k * step);
    const double f1 = phi(x, y, t1);
    if (f1 == 0.0) return t1;
    if ((f0 < 0.0) != (f1 < 0.0)) {
      double lo = t0;
      double hi = t1;
      double flo = f0;
      for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = phi(x, y, mid);
        if (fm == 0.0) return mid;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    t0 = t1;
    f0 = f1;
  }
  return kInf;
}

Eigen::Vector3d fd_gradient(const std::function<double(double, double, double)>& phi, double x, double y,
                            double t) {
  const double e = 1e-6;
  return {(phi(x + e, y, t) - phi(x - e, y, t)) / (2 * e), (phi(x, y + e, t) - phi(x, y - e, t)) / (2 * e),
          (phi(x, y, t + e) - phi(x, y, std::max(0.0, t - e))) / (t >= e ? 2 * e : e + t)};
}

}  // namespace

int EngineConfig::s() const { return std::max(1, static_cast<int>(std::floor(s_fraction * grid.intervals()))); }

void EngineConfig::validate() const {
  grid.validate();
  if (!(s_fraction > 0.0 && s_fraction <= 0.5)) throw std::invalid_argument("s_fraction must lie in (0, 1/2]");
  if (!(r1 > 0.0) || !(r1 <= r2)) throw std::invalid_argument("need 0 < r1 <= r2");
  if (!(r1_skew > 0.0) || !(r1_skew <= r2_skew)) throw std::invalid_argument("need 0 < r1_skew <= r2_skew");
  if (sign_test_samples < 2) throw std::invalid_argument("sign_test_samples must be at least 2");
}

MarchState initialize(const InitialCurve& curve, const SpeedField& F, const GridSpec& grid) {
  grid.validate();
  MarchState state(grid);
  const double h = grid.h;
  const double step = std::min(h / 32.0, grid.T / 64.0);
  int seeds = 0;
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      const double x = grid.x(i);
      const double y = grid.y(j);
      const double d = curve.phi0(x, y);
      if (std::abs(d) > h) continue;
      const double f = F(x, y, 0.0);
      if (sign_of(f) * d < 0.0) continue;
      const double psi = first_root(curve.phi, x, y, grid.T, step);
      if (!std::isfinite(psi)) continue;
      if (i == 0 || j == 0 || i == grid.n - 1 || j == grid.n - 1) {
        std::ostringstream ss;
        ss << "initial curve touches the domain boundary at (" << x << ", " << y << ")";
        throw CurveOffGridError(ss.str());
      }
      SurfacePoint p;
      p.i = i;
      p.j = j;
      p.x = x;
      p.y = y;
      p.psi = psi;
      p.source = Source::seed;
      p.orient = sign_of(F(x, y, psi)) < 0 ? -1 : 1;
      p.set_normal(curve.grad ? curve.grad(x, y, psi) : fd_gradient(curve.phi, x, y, psi));
      state.narrow_band.push_or_replace(p);
      state.far_away(i, j) = false;
      ++seeds;
    }
  }
  if (seeds == 0) throw CurveOffGridError("initial curve does not intersect the grid");
  state.initial_phi = curve.phi0;
  return state;
}

Engine::Engine(SpeedField F, EngineConfig config) : F_(std::move(F)), config_(std::move(config)), state_(config_.grid) {
  config_.validate();
}

double Engine::admissible_speed(const SurfacePoint& q) const {
  double bound = config_.zero_speed;
  if (config_.slow_factor > 0.0) {
    const double h = config_.grid.h;
    const double K = F_.local_time_rate(Eigen::Vector3d(q.x, q.y, q.psi), h);
    bound = std::max(bound, std::sqrt(config_.slow_factor * K * h));
  }
  return bound;
}

bool Engine::time_dependent() const { return config_.time_dependent.value_or(F_.time_dependent()); }

void Engine::initialize(const InitialCurve& curve) {
  state_ = frontweave::initialize(curve, F_, config_.grid);
  stats_ = {};
  failures_.clear();
  sideways_cloud_.clear();
}

SurfacePoint Engine::accept_next() {
  SurfacePoint p = nb_extract_min(state_);
  state_.accept(p);
  return p;
}

void Engine::update_pile(const SurfacePoint& p_ab) {
  const auto& g = state_.grid;
  const int f_sign = sign_of(F_(p_ab.x, p_ab.y, p_ab.psi));
  for (const auto& off : kOffsets) {
    const int a = p_ab.i + off[0];
    const int b = p_ab.j + off[1];
    if (!g.contains(a, b)) continue;
    const int v_sign = sign_of(off[0] * p_ab.normal2.x() + off[1] * p_ab.normal2.y());
    if (!(v_sign == f_sign || v_sign == 0 || f_sign == 0)) continue;
    const SurfacePoint* cur = state_.current(a, b);
    bool add = cur != nullptr ? cur->orient != p_ab.orient : true;
    if (cur == nullptr && config_.first_crossing_guard && state_.initial_phi) {
      const int side = sign_of(state_.initial_phi(g.x(a), g.y(b)));
      if (side != 0 && side != p_ab.orient) add = false;
    }
    if (add && !state_.in_pile(a, b)) state_.pile.push_back({a, b});
  }
}

void Engine::insert_band(const SurfacePoint& p) {
  const SurfacePoint* cur = state_.current(p.i, p.j);
  if (cur != nullptr && cur->orient == p.orient) {
    ++stats_.guard_drops;
    return;
  }
  const SurfacePoint* queued = state_.narrow_band.find(p.i, p.j);
  if (queued != nullptr && queued->source == Source::seed) return;
  state_.narrow_band.push_or_replace(p);
  state_.far_away(p.i, p.j) = false;
}

void Engine::update_narrow_band(const SurfacePoint& p_ab) {
  const auto& g = state_.grid;
  const double h = g.h;
  const double T = config_.T();
  const bool tdep = time_dependent();
  std::vector<GridIndex> pile;
  pile.swap(state_.pile);
  for (const auto& c : pile) {
    const int i = c.i;
    const int j = c.j;
    NeighborValues<double> nb;
    std::array<double, 4> tau{kInf, kInf, kInf, kInf};
    std::array<const SurfacePoint*, 4> members{nullptr, nullptr, nullptr, nullptr};
    bool slow = false;
    for (int k = 0; k < 4; ++k) {
      const int a = i + kOffsets[static_cast<std::size_t>(k)][0];
      const int b = j + kOffsets[static_cast<std::size_t>(k)][1];
      if (!g.contains(a, b)) continue;
      const SurfacePoint* q = state_.current(a, b);
      if (q == nullptr || !orientation_test(*q, p_ab) || !std::isfinite(q->psi)) continue;
      if (tdep) {
        const double fq = std::abs(F_(q->x, q->y, q->psi));
        if (fq < admissible_speed(*q)) {
          slow = true;
          continue;
        }
        tau[static_cast<std::size_t>(k)] = h / fq;
      }
      nb.psi[static_cast<std::size_t>(k)] = q->psi;
      members[static_cast<std::size_t>(k)] = q;
    }
    if (!nb.any() && !slow) continue;

    SurfacePoint p;
    p.i = i;
    p.j = j;
    p.x = g.x(i);
    p.y = g.y(j);
    p.orient = p_ab.orient;
    bool failed = false;
    if (tdep && slow) {
      failed = true;
    } else if (tdep) {
      const auto up = tfmm_point_update(nb, tau, h, p_ab.orient);
      if (!up.finite()) continue;
      p.psi = up.psi;
      p.source = Source::tfmm;
      p.set_normal(normal_with_cross_axis(up, nb, h, p_ab.orient));
    } else {
      const double f_ij = F_(p.x, p.y, 0.0);
      double bound = config_.zero_speed;
      if (config_.slow_factor > 0.0) {
        bound = std::max(bound, config_.slow_factor * h * F_.local_lipschitz(Eigen::Vector3d(p.x, p.y, 0.0), h));
      }
      if (std::abs(f_ij) < bound) {
        failed = true;
      } else {
        const auto up = fmm_point_update(nb, h, f_ij, p_ab.orient);
        if (!up.finite()) continue;
        p.psi = up.psi;
        p.source = Source::fmm;
        p.set_normal(normal_with_cross_axis(up, nb, h, p_ab.orient));
      }
    }
    if (!failed && config_.exact_normal) {
      const Eigen::Vector3d n = config_.exact_normal(p.x, p.y, p.psi);
      if (n.squaredNorm() > 0.0) p.set_normal(n);
    }

    if (!failed) {
      const Eigen::Vector3d pt(p.x, p.y, p.psi);
      for (const SurfacePoint* q : members) {
        if (q == nullptr) continue;
        const Eigen::Vector3d a(q->x, q->y, q->psi);
        Eigen::Vector3d b = pt;
        if (b.z() > T && a.z() < T) b = a + (T - a.z()) / (b.z() - a.z()) * (b - a);
        const auto res = sign_test(a, b, F_, segment_samples(a, b, h, config_.sign_test_samples));
        if (res.verdict == Verdict::refine) {
          ++stats_.refine_events;
          if (config_.on_refine == RefinePolicy::error) {
            std::ostringstream ss;
            ss << "sign test found " << res.d << " sign changes between (" << a.x() << ", " << a.y() << ", "
               << a.z() << ") and (" << b.x() << ", " << b.y() << ", " << b.z() << "); refine the grid";
            throw RefineRequired(ss.str());
          }
        }
        if (res.verdict != Verdict::pass) {
          failed = true;
          break;
        }
      }
    }

    if (failed) {
      const RescueOutcome out = rescue(p_ab, i, j);
      if (out.status == RescueStatus::failed) continue;
      insert_band(out.point);
      continue;
    }
    if (p.psi > T) {
      ++stats_.dropped_after_T;
      continue;
    }
    insert_band(p);
  }
}

RescueOutcome Engine::rescue(const SurfacePoint& p_ab, int i, int j) {
  ++stats_.rescues;
  const auto& g = state_.grid;
  const int s = config_.s();
  const int R_max = config_.R_max > 0 ? config_.R_max : 3 * s;
  const double T = config_.T();
  const Eigen::Vector3d& n3 = p_ab.normal3;
  const bool yt_first = std::abs(n3.x()) > std::abs(n3.y());

  std::array<PatchRequest, 3> plan;
  plan[0].rep = yt_first ? Representation::yt : Representation::xt;
  plan[1].rep = yt_first ? Representation::xt : Representation::yt;
  for (int k = 0; k < 2; ++k) {
    plan[static_cast<std::size_t>(k)].a = plan[static_cast<std::size_t>(k)].rep == Representation::yt
                                              ? -sign_of(n3.x())
                                              : -sign_of(n3.y());
  }
  plan[2].rep = Representation::skew;
  plan[2].theta = std::atan2(p_ab.y, p_ab.x);
  plan[2].a = -sign_of(p_ab.x * p_ab.normal2.x() + p_ab.y * p_ab.normal2.y());

  const double xt = g.x(i);
  const double yt = g.y(j);
  for (int k = 0; k < 3; ++k) {
    PatchRequest req = plan[static_cast<std::size_t>(k)];
    if (req.a == 0) continue;
    const bool skew = req.rep == Representation::skew;
    req.s = s;
    req.dt_pre = (skew ? config_.r1_skew : config_.r1) * g.h;
    SidewaysPatch patch;
    try {
      patch = convert_to_sideways(state_, p_ab, req, F_);
    } catch (const InsufficientDataError&) {
      ++stats_.insufficient_data;
      continue;
    }
    DtPolicy policy;
    policy.r1 = skew ? config_.r1_skew : config_.r1;
    policy.r2 = skew ? config_.r2_skew : config_.r2;
    policy.use_cfl = config_.use_cfl;
    policy.delta = config_.delta;
    policy.local_lipschitz = config_.local_lipschitz;
    const double after = p_ab.psi;
    const auto crossed = [&](const SidewaysPatch& pt, int r) {
      return extract_crossing(pt, xt, yt, after, T, r - 1, r).has_value() ||
             extract_crossing(pt, p_ab.x, p_ab.y, after, T, r - 1, r).has_value();
    };
    solve_patch(patch, F_, R_max, policy, T, crossed);

    if (config_.record_sideways) {
      for (int r = std::max(patch.origin_row, 0) + 1; r < patch.rows(); ++r) {
        for (int l = 0; l < patch.cols(); ++l) {
          const double w = patch.chi[static_cast<std::size_t>(r)](l);
          if (!std::isfinite(w)) continue;
          const Eigen::Vector2d xy = patch.to_xy(w, patch.z_vals[static_cast<std::size_t>(l)]);
          sideways_cloud_.emplace_back(xy.x(), xy.y(), patch.times[static_cast<std::size_t>(r)]);
        }
      }
    }

    RescueOutcome out;
    out.attempts = k + 1;
    auto hit = extract_crossing(patch, xt, yt, after, T);
    if (hit) {
      out.status = RescueStatus::assigned_target;
      out.point.i = i;
      out.point.j = j;
      out.point.x = xt;
      out.point.y = yt;
    } else {
      hit = extract_crossing(patch, p_ab.x, p_ab.y, after, T);
      if (!hit) continue;
      out.status = RescueStatus::assigned_origin;
      out.point.i = p_ab.i;
      out.point.j = p_ab.j;
      out.point.x = p_ab.x;
      out.point.y = p_ab.y;
      ++stats_.assigned_origin;
    }
    out.point.psi = hit->psi;
    out.point.orient = p_ab.orient;
    out.point.set_normal(hit->normal3);
    if (config_.exact_normal) {
      const Eigen::Vector3d n = config_.exact_normal(out.point.x, out.point.y, out.point.psi);
      if (n.squaredNorm() > 0.0) out.point.set_normal(n);
    }
    out.point.source = source_of(req.rep);
    out.point.attempts = k + 1;
    ++stats_.assigned_on_attempt[static_cast<std::size_t>(k)];
    return out;
  }
  ++stats_.failures;
  failures_.push_back({i, j, p_ab.i, p_ab.j, p_ab.psi});
  RescueOutcome out;
  out.status = RescueStatus::failed;
  out.attempts = 3;
  return out;
}

const std::vector<SurfacePoint>& Engine::run() {
  const double T = config_.T();
  const std::size_t limit = 8 * static_cast<std::size_t>(config_.grid.n) * config_.grid.n;
  while (!state_.narrow_band.empty()) {
    const SurfacePoint p = accept_next();
    if (p.psi < T) update_pile(p);
    update_narrow_band(p);
    if (state_.accepted.size() > limit) throw std::runtime_error("run: accepted list exceeds 8 n^2 points");
  }
  return state_.accepted;
}

std::vector<SurfacePoint> run(const InitialCurve& curve, const SpeedField& F, const EngineConfig& config) {
  Engine engine(F, config);
  engine.initialize(curve);
  return engine.run();
}

std::vector<SurfacePoint> classical_fmm(const InitialCurve& curve, const SpeedField& F, const GridSpec& grid) {
  MarchState state = frontweave::initialize(curve, F, grid);
  const double h = grid.h;
  while (!state.narrow_band.empty()) {
    const SurfacePoint p = nb_extract_min(state);
    state.accept(p);
    for (const auto& off : kOffsets) {
      const int i = p.i + off[0];
      const int j = p.j + off[1];
      if (!grid.contains(i, j) || state.current(i, j) != nullptr) continue;
      if (curve.phi0(grid.x(i), grid.y(j)) < 0.0) continue;
      NeighborValues<double> nb;
      for (int k = 0; k < 4; ++k) {
        const int a = i + kOffsets[static_cast<std::size_t>(k)][0];
        const int b = j + kOffsets[static_cast<std::size_t>(k)][1];
        if (grid.contains(a, b)) nb.psi[static_cast<std::size_t>(k)] = state.grid_value(a, b);
      }
      const auto up = fmm_point_update(nb, h, F(grid.x(i), grid.y(j), 0.0), 1);
      if (!up.finite()) continue;
      SurfacePoint q;
      q.i = i;
      q.j = j;
      q.x = grid.x(i);
      q.y = grid.y(j);
      q.psi = up.psi;
      q.source = Source::fmm;
      q.set_normal(up.normal3);
      const SurfacePoint* queued = state.narrow_band.find(i, j);
      if (queued != nullptr && !(q.psi < queued->psi)) continue;
      state.narrow_band.push_or_replace(q);
    }
  }
  return state.accepted;
}

}  // namespace frontweave
