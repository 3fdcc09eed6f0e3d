#include "frontweave/reference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace frontweave {

namespace {

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return std::abs(a) < std::abs(b) ? a : b;
}

// phi with two ghost layers on each side, linearly extrapolated.
Eigen::ArrayXXd padded(const Eigen::ArrayXXd& phi) {
  const Eigen::Index n = phi.rows();
  const Eigen::Index m = phi.cols();
  Eigen::ArrayXXd p(n + 4, m + 4);
  p.block(2, 2, n, m) = phi;
  for (int g = 1; g >= 0; --g) {
    p.row(g).segment(2, m) = 2.0 * p.row(g + 1).segment(2, m) - p.row(g + 2).segment(2, m);
    p.row(n + 3 - g).segment(2, m) = 2.0 * p.row(n + 2 - g).segment(2, m) - p.row(n + 1 - g).segment(2, m);
  }
  for (int g = 1; g >= 0; --g) {
    p.col(g) = 2.0 * p.col(g + 1) - p.col(g + 2);
    p.col(m + 3 - g) = 2.0 * p.col(m + 2 - g) - p.col(m + 1 - g);
  }
  return p;
}

Eigen::ArrayXXd speed_on_grid(const SpeedField& F, const GridSpec& grid, double t) {
  Eigen::ArrayXXd f(grid.n, grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) f(i, j) = F(grid.x(i), grid.y(j), t);
  return f;
}

void check_cfl(const Eigen::ArrayXXd& f, double h, double dt) {
  const double M = f.abs().maxCoeff();
  if (M > 0.0 && dt > 0.5 * h / M) {
    std::ostringstream ss;
    ss << "lsm: dt=" << dt << " exceeds 0.5 h / max|F| = " << 0.5 * h / M;
    throw CflViolationError(ss.str());
  }
}

// -F |grad phi| with ENO2 one-sided differences and Godunov upwinding.
Eigen::ArrayXXd lsm_rhs(const Eigen::ArrayXXd& phi, const Eigen::ArrayXXd& f, double h) {
  const Eigen::ArrayXXd p = padded(phi);
  const Eigen::Index n = phi.rows();
  const Eigen::Index m = phi.cols();
  Eigen::ArrayXXd out(n, m);
  const double h2 = h * h;
  const auto d2x = [&](Eigen::Index a, Eigen::Index b) { return (p(a + 1, b) - 2.0 * p(a, b) + p(a - 1, b)) / h2; };
  const auto d2y = [&](Eigen::Index a, Eigen::Index b) { return (p(a, b + 1) - 2.0 * p(a, b) + p(a, b - 1)) / h2; };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index a = i + 2;
      const Eigen::Index b = j + 2;
      const double dxm = (p(a, b) - p(a - 1, b)) / h + 0.5 * h * minmod(d2x(a - 1, b), d2x(a, b));
      const double dxp = (p(a + 1, b) - p(a, b)) / h - 0.5 * h * minmod(d2x(a, b), d2x(a + 1, b));
      const double dym = (p(a, b) - p(a, b - 1)) / h + 0.5 * h * minmod(d2y(a, b - 1), d2y(a, b));
      const double dyp = (p(a, b + 1) - p(a, b)) / h - 0.5 * h * minmod(d2y(a, b), d2y(a, b + 1));
      const double F = f(i, j);
      double g2;
      if (F > 0.0) {
        g2 = std::max(std::pow(std::max(dxm, 0.0), 2), std::pow(std::min(dxp, 0.0), 2)) +
             std::max(std::pow(std::max(dym, 0.0), 2), std::pow(std::min(dyp, 0.0), 2));
      } else {
        g2 = std::max(std::pow(std::min(dxm, 0.0), 2), std::pow(std::max(dxp, 0.0), 2)) +
             std::max(std::pow(std::min(dym, 0.0), 2), std::pow(std::max(dyp, 0.0), 2));
      }
      out(i, j) = -F * std::sqrt(g2);
    }
  }
  return out;
}

}  // namespace

Eigen::ArrayXXd sample_grid(const std::function<double(double, double)>& phi0, const GridSpec& grid) {
  Eigen::ArrayXXd phi(grid.n, grid.n);
  for (int i = 0; i < grid.n; ++i)
    for (int j = 0; j < grid.n; ++j) phi(i, j) = phi0(grid.x(i), grid.y(j));
  return phi;
}

Eigen::ArrayXXd lsm_step(const SpeedField& F, const Eigen::ArrayXXd& phi, const GridSpec& grid, double t, double dt) {
  const Eigen::ArrayXXd f0 = speed_on_grid(F, grid, t);
  check_cfl(f0, grid.h, dt);
  const Eigen::ArrayXXd stage = phi + dt * lsm_rhs(phi, f0, grid.h);
  const Eigen::ArrayXXd f1 = speed_on_grid(F, grid, t + dt);
  check_cfl(f1, grid.h, dt);
  return 0.5 * (phi + stage + dt * lsm_rhs(stage, f1, grid.h));
}

void lsm_march(const SpeedField& F, const std::function<double(double, double)>& phi0, const GridSpec& grid, double T,
               double dt, const std::function<void(const LsmFrame&)>& on_frame) {
  if (!(dt > 0.0)) throw CflViolationError("lsm: dt must be positive");
  LsmFrame frame{0.0, sample_grid(phi0, grid)};
  on_frame(frame);
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
  for (long k = 0; k < steps; ++k) {
    const double step = std::min(dt, T - frame.t);
    if (!(step > 0.0)) break;
    frame.phi = lsm_step(F, frame.phi, grid, frame.t, step);
    frame.t = k + 1 == steps ? T : frame.t + step;
    on_frame(frame);
  }
}

std::vector<LsmFrame> lsm_solve(const SpeedField& F, const std::function<double(double, double)>& phi0,
                                const GridSpec& grid, double T, double dt) {
  std::vector<LsmFrame> out;
  lsm_march(F, phi0, grid, T, dt, [&](const LsmFrame& f) { out.push_back(f); });
  return out;
}

std::vector<Eigen::Vector3d> contour_points(const Eigen::ArrayXXd& phi, const GridSpec& grid, double t,
                                            double spacing) {
  std::vector<Eigen::Vector3d> raw;
  const auto edge = [&](int i0, int j0, int i1, int j1) {
    const double a = phi(i0, j0);
    const double b = phi(i1, j1);
    if (a == 0.0) {
      raw.emplace_back(grid.x(i0), grid.y(j0), t);
      return;
    }
    if (!((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0))) return;
    const double lam = a / (a - b);
    raw.emplace_back(grid.x(i0) + lam * (grid.x(i1) - grid.x(i0)), grid.y(j0) + lam * (grid.y(j1) - grid.y(j0)), t);
  };
  const int n = static_cast<int>(phi.rows());
  const int m = static_cast<int>(phi.cols());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      if (i + 1 < n) edge(i, j, i + 1, j);
      if (j + 1 < m) edge(i, j, i, j + 1);
      if (i + 1 == n && j + 1 == m && phi(i, j) == 0.0) raw.emplace_back(grid.x(i), grid.y(j), t);
    }
  }
  if (spacing <= 0.0 || raw.empty()) return raw;

  // greedy merge on a hash of cells of size spacing / 2
  const double cell = 0.5 * spacing;
  const double r2 = cell * cell;
  std::unordered_map<long long, std::vector<std::size_t>> bins;
  const auto key = [&](long a, long b) { return (static_cast<long long>(a) << 32) ^ static_cast<long long>(b & 0xffffffff); };
  std::vector<Eigen::Vector3d> out;
  for (const auto& q : raw) {
    const long cx = static_cast<long>(std::floor(q.x() / cell));
    const long cy = static_cast<long>(std::floor(q.y() / cell));
    bool dup = false;
    for (long dx = -1; dx <= 1 && !dup; ++dx) {
      for (long dy = -1; dy <= 1 && !dup; ++dy) {
        const auto it = bins.find(key(cx + dx, cy + dy));
        if (it == bins.end()) continue;
        for (std::size_t k : it->second) {
          if ((out[k].head<2>() - q.head<2>()).squaredNorm() < r2) {
            dup = true;
            break;
          }
        }
      }
    }
    if (dup) continue;
    bins[key(cx, cy)].push_back(out.size());
    out.push_back(q);
  }
  return out;
}

OracleCloud build_oracle(const SpeedField& F, const std::function<double(double, double)>& phi0,
                         const GridSpec& fine, double T, double dt) {
  OracleCloud cloud;
  cloud.h = fine.h;
  cloud.dt = dt;
  lsm_march(F, phi0, fine, T, dt, [&](const LsmFrame& f) {
    auto pts = contour_points(f.phi, fine, f.t, fine.h);
    cloud.points.insert(cloud.points.end(), pts.begin(), pts.end());
  });
  return cloud;
}

OracleSetup oracle_setup(const ExampleSpec& ex, int n_fine) {
  OracleSetup s;
  s.grid = ex.grid(n_fine);
  double M = 0.0;
  const int samples = 64;
  for (int a = 0; a <= samples; ++a) {
    for (int b = 0; b <= samples; ++b) {
      for (int c = 0; c <= samples; ++c) {
        const double x = ex.lo + ex.length * a / samples;
        const double y = ex.lo + ex.length * b / samples;
        const double t = ex.T_F * c / samples;
        M = std::max(M, std::abs(ex.F(x, y, t)));
      }
    }
  }
  // the sampled max may miss the true one; keep clear of the hard bound
  s.dt = 0.25 * s.grid.h / std::max(M, 1e-12);
  return s;
}

NearestIndex::NearestIndex(std::vector<Eigen::Vector3d> points, double bin) : points_(std::move(points)) {
  if (points_.empty()) return;
  Eigen::Vector3d lo = points_.front();
  Eigen::Vector3d hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Eigen::Vector3d ext = (hi - lo).cwiseMax(1e-12);
  if (!(bin > 0.0)) {
    const double vol = ext.prod();
    bin = std::cbrt(vol / static_cast<double>(points_.size())) * 2.0;
    bin = std::max(bin, ext.maxCoeff() / 1024.0);
  }
  bin_ = bin;
  lo_ = lo;
  for (int a = 0; a < 3; ++a) dims_[a] = static_cast<long>(std::floor(ext[a] / bin_)) + 1;
  const std::size_t nb = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
  std::vector<std::size_t> count(nb + 1, 0);
  std::vector<std::size_t> where(points_.size());
  for (std::size_t k = 0; k < points_.size(); ++k) {
    where[k] = slot(key(points_[k]));
    ++count[where[k] + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  start_ = count;
  order_.resize(points_.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < points_.size(); ++k) order_[fill[where[k]]++] = k;
}

std::array<long, 3> NearestIndex::key(const Eigen::Vector3d& p) const {
  std::array<long, 3> k{};
  for (int a = 0; a < 3; ++a) k[a] = static_cast<long>(std::floor((p[a] - lo_[a]) / bin_));
  return k;
}

std::size_t NearestIndex::slot(const std::array<long, 3>& k) const {
  std::array<long, 3> c{};
  for (int a = 0; a < 3; ++a) c[a] = std::clamp(k[a], 0L, dims_[a] - 1);
  return static_cast<std::size_t>((c[0] * dims_[1] + c[1]) * dims_[2] + c[2]);
}

double NearestIndex::distance(const Eigen::Vector3d& p) const {
  if (points_.empty()) return kInf;
  const auto c = key(p);
  long max_ring = 0;
  for (int a = 0; a < 3; ++a) max_ring = std::max({max_ring, std::abs(c[a]), std::abs(dims_[a] - 1 - c[a])});
  double best = kInf;
  for (long ring = 0; ring <= max_ring; ++ring) {
    for (long i = std::max(0L, c[0] - ring); i <= std::min(dims_[0] - 1, c[0] + ring); ++i) {
      for (long j = std::max(0L, c[1] - ring); j <= std::min(dims_[1] - 1, c[1] + ring); ++j) {
        for (long k = std::max(0L, c[2] - ring); k <= std::min(dims_[2] - 1, c[2] + ring); ++k) {
          const long cheb = std::max({std::abs(i - c[0]), std::abs(j - c[1]), std::abs(k - c[2])});
          if (cheb != ring) continue;
          const std::size_t s = static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k);
          for (std::size_t q = start_[s]; q < start_[s + 1]; ++q) {
            best = std::min(best, (points_[order_[q]] - p).norm());
          }
        }
      }
    }
    // anything in ring + 1 or beyond is at least ring * bin away
    if (best <= static_cast<double>(ring) * bin_) break;
  }
  return best;
}

double NearestIndex::brute_force(const Eigen::Vector3d& p) const {
  double best = kInf;
  for (const auto& q : points_) best = std::min(best, (q - p).norm());
  return best;
}

double error_method1(const SurfacePoint& p, const ExactSolution& exact) {
  if (!exact.signed_distance) {
    throw std::invalid_argument("error_method1: exact solution of " + exact.name + " is not a signed distance");
  }
  return std::abs(exact(p.x, p.y, p.psi));
}

double error_method2(const SurfacePoint& p, const NearestIndex& cloud) {
  return cloud.distance(Eigen::Vector3d(p.x, p.y, p.psi));
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::bottom: return "bottom";
    case Region::top: return "top";
    case Region::sideways: return "sideways";
    case Region::global: return "global";
  }
  return "global";
}

Region region_from_string(std::string_view s) {
  for (Region r : {Region::bottom, Region::top, Region::sideways, Region::global}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown region '" + std::string(s) + "'");
}

double f_zero_time(const SpeedField& F, double x, double y, double T) {
  const int steps = 1000;
  double t0 = 0.0;
  int s0 = sign_of(F(x, y, 0.0));
  for (int k = 1; k <= steps; ++k) {
    const double t1 = T * k / steps;
    const int s1 = sign_of(F(x, y, t1));
    if (s0 == 0) return t0;
    if (s1 != s0) {
      double lo = t0;
      double hi = t1;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sign_of(F(x, y, mid)) == s0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    t0 = t1;
  }
  return kInf;
}

bool in_region(const SurfacePoint& p, Region r, const SpeedField& F, double T) {
  switch (r) {
    case Region::global: return true;
    case Region::sideways: return is_sideways(p.source);
    case Region::bottom:
    case Region::top: {
      if (is_sideways(p.source)) return false;
      const bool top = p.psi > f_zero_time(F, p.x, p.y, T);
      return top == (r == Region::top);
    }
  }
  return false;
}

Aggregate aggregate(const std::vector<double>& errors, int dim, double h) {
  if (errors.empty()) throw EmptyRegionError("aggregate: no errors in region");
  Aggregate a;
  const double w = std::pow(h, dim);
  for (double e : errors) {
    a.L1 += e;
    a.Linf = std::max(a.Linf, e);
  }
  a.L1 *= w;
  a.relative.reserve(errors.size());
  for (double e : errors) a.relative.push_back(a.Linf > 0.0 ? e / a.Linf : 0.0);
  return a;
}

double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  if (h.size() != err.size() || h.size() < 2) return std::nan("");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double x = std::log(h[k]);
    const double y = std::log(err[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) return std::nan("");
  return (n * sxy - sx * sy) / den;
}

int count_clusters(const std::vector<Eigen::Vector2d>& pts, double radius) {
  const std::size_t n = pts.size();
  if (n == 0) return 0;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::map<std::pair<long, long>, std::vector<std::size_t>> bins;
  for (std::size_t k = 0; k < n; ++k) {
    bins[{static_cast<long>(std::floor(pts[k].x() / radius)), static_cast<long>(std::floor(pts[k].y() / radius))}]
        .push_back(k);
  }
  const double r2 = radius * radius;
  for (const auto& [cell, members] : bins) {
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        const auto it = bins.find({cell.first + dx, cell.second + dy});
        if (it == bins.end()) continue;
        for (std::size_t a : members) {
          for (std::size_t b : it->second) {
            if (a < b && (pts[a] - pts[b]).squaredNorm() < r2) parent[find(a)] = find(b);
          }
        }
      }
    }
  }
  int roots = 0;
  for (std::size_t k = 0; k < n; ++k) roots += find(k) == k ? 1 : 0;
  return roots;
}

double travel_distance(const SpeedField& F, double x, double y, double t0, double t1) {
  const double span = t1 - t0;
  if (span == 0.0) return 0.0;
  const int m = 2 * std::max(8, static_cast<int>(std::ceil(std::abs(span) * 64.0)));
  double sum = 0.0;
  for (int k = 0; k <= m; ++k) {
    const double w = (k == 0 || k == m) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    sum += w * std::abs(F(x, y, t0 + span * k / m));
  }
  return sum * std::abs(span) / (3.0 * m);
}

int slab_clusters(const std::vector<SurfacePoint>& cloud, const SpeedField& F, double t, double width, double radius) {
  std::vector<Eigen::Vector2d> pts;
  for (const auto& p : cloud) {
    if (std::isfinite(p.psi) && travel_distance(F, p.x, p.y, t, p.psi) <= width) pts.emplace_back(p.x, p.y);
  }
  return count_clusters(pts, radius);
}

EscapeReport detect_escapes(const std::vector<SurfacePoint>& cloud, const ExactSolution& exact, const SpeedField& F,
                            double T, double tol) {
  EscapeReport rep;
  const int samples = 2000;
  for (std::size_t k = 0; k < cloud.size(); ++k) {
    const SurfacePoint& p = cloud[k];
    if (!std::isfinite(p.psi)) continue;
    if (!(p.psi > f_zero_time(F, p.x, p.y, T))) continue;
    double lowest = kInf;
    for (int s = 0; s <= samples && lowest > tol; ++s) {
      const double t = T * s / samples;
      if (exact.valid(t)) lowest = std::min(lowest, exact.phi(p.x, p.y, t));
    }
    if (lowest > tol) {
      rep.escaped.push_back(k);
      rep.max_excess = std::max(rep.max_excess, lowest);
    }
  }
  return rep;
}

}  // namespace frontweave
