#include "frontweave/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace frontweave {

namespace {

constexpr double kR0 = 0.25;
const double kE = std::numbers::e;

double radius(double x, double y) { return std::hypot(x, y); }

InitialCurve curve_from(const ExactSolution& ex) {
  InitialCurve c;
  auto phi = ex.phi;
  c.phi0 = [phi](double x, double y) { return phi(x, y, 0.0); };
  c.phi = phi;
  c.grad = [ex](double x, double y, double t) { return ex.gradient(x, y, t); };
  return c;
}

double ex1_R(double t) { return kR0 - (std::exp(10.0 * t) - 1.0) / (10.0 * kE) + t; }
double ex4_R(double t) { return kR0 - (std::exp(2.0 * t) - 1.0) / (2.0 * kE) + t; }
double motivation_R(double t) { return kR0 + t - t * t; }

ExampleSpec make_motivation() {
  ExampleSpec s;
  s.name = "motivation";
  s.F = SpeedField([](double, double, double t) { return 1.0 - 2.0 * t; }, 2.0, true);
  s.exact = ExactSolution{"motivation", [](double x, double y, double t) { return radius(x, y) - motivation_R(t); }};
  s.lo = -0.641;
  s.length = 1.28;
  s.T_F = 1.3;
  s.initial = curve_from(*s.exact);
  return s;
}

ExampleSpec make_ex1() {
  ExampleSpec s;
  s.name = "ex1";
  s.F = SpeedField([](double, double, double t) { return 1.0 - std::exp(10.0 * t - 1.0); }, 10.0 * std::exp(2.0),
                   true);
  s.exact = ExactSolution{"ex1", [](double x, double y, double t) { return radius(x, y) - ex1_R(t); }};
  s.lo = -0.321;
  s.length = 0.64;
  s.T_F = 0.3;
  s.r1_skew = 1.0;
  s.r2_skew = 1.0;
  s.initial = curve_from(*s.exact);
  s.sideways_conv_domain = SidewaysConvDomain{Representation::yt, -0.25, 0.25, 0.0, 0.3};
  return s;
}

ExampleSpec make_ex2() {
  ExampleSpec s;
  s.name = "ex2";
  s.F = SpeedField([](double x, double, double) { return x; }, 1.0, false);
  ExactSolution ex{"ex2", [](double x, double y, double t) {
                     return std::hypot(x - kR0 * std::sinh(t), y) - kR0 * std::cosh(t);
                   }};
  ex.solves_lse = false;
  s.exact = ex;
  s.lo = -1.01;
  s.length = 2.0;
  s.T_F = 1.0;
  s.r1_skew = 1.0 / 3.0;
  s.r2_skew = 5.0;
  s.exact_normals = true;
  s.initial = curve_from(*s.exact);
  s.sideways_conv_domain = SidewaysConvDomain{Representation::yt, -0.25, 0.25, 0.0, 1.0};
  return s;
}

constexpr double kB3 = 10.0;
constexpr double kC3 = 0.5;
double ex3_g(double t) { return std::atan(kB3 * (t - 0.5)) + std::numbers::pi / 2.0; }
double ex3_gp(double t) { return kB3 / (1.0 + kB3 * kB3 * (t - 0.5) * (t - 0.5)); }

ExampleSpec make_ex3() {
  ExampleSpec s;
  s.name = "ex3";
  s.F = SpeedField(
      [](double x, double y, double t) {
        const double g = ex3_g(t);
        const double dx = x - g * t;
        const double rho2 = dx * dx + y * y;
        if (rho2 < 1e-24) return kC3;
        return dx * (ex3_gp(t) * t + ex3_g(t)) / std::sqrt(rho2) + kC3;
      },
      // |grad F| <~ (g' t + g) / rho is unbounded near the centre; use a
      // bound valid away from it
      60.0, true);
  s.exact = ExactSolution{"ex3", [](double x, double y, double t) {
                            return std::hypot(x - ex3_g(t) * t, y) - (kR0 + kC3 * t);
                          }};
  s.lo = -1.51;
  s.length = 3.0;
  s.T_F = 0.5;
  s.r1_skew = 1.0 / 3.0;
  s.r2_skew = 5.0;
  s.exact_normals = true;
  s.initial = curve_from(*s.exact);
  s.sideways_conv_domain = SidewaysConvDomain{Representation::yt, -0.25, 0.25, 0.0, 0.5};
  return s;
}

ExampleSpec make_ex4() {
  ExampleSpec s;
  s.name = "ex4";
  s.F = SpeedField([](double, double, double t) { return 1.0 - std::exp(2.0 * t - 1.0); }, 2.0 * std::exp(1.4),
                   true);
  ExactSolution ex{"ex4", [](double x, double y, double t) {
                     const double R = ex4_R(t);
                     return std::min(std::hypot(x + 0.3, y) - R, std::hypot(x - 0.3, y) - R);
                   }};
  ex.t_hi = 0.5;
  s.exact = ex;
  s.lo = -1.5 + 0.01 * kE;
  s.length = 3.0;
  s.T_F = 1.2;
  s.r1_skew = 1.0 / 3.0;
  s.r2_skew = 5.0;
  s.exact_normals = true;
  InitialCurve c;
  c.phi0 = [ex](double x, double y) { return ex.phi(x, y, 0.0); };
  c.phi = ex.phi;
  c.grad = [ex](double x, double y, double t) { return ex.gradient(x, y, t); };
  s.initial = c;
  s.sideways_conv_domain = SidewaysConvDomain{Representation::yt, -0.5, 0.5, 0.2, 0.5};
  return s;
}

constexpr double kCa = 1.0;
constexpr double kCCa = 0.65;

double almond_phi(double x, double y, double t) {
  const double tilde = radius(x, y) - kR0 + (std::exp(kCa * t) - 1.0) / (kCa * kE) - t * kCCa;
  return tilde + t * std::abs(x * t - y) / std::sqrt(1.0 + t * t);
}

double almond_speed(double x, double y, double t) {
  const double r = radius(x, y);
  const double u = x * t - y;
  const double s = static_cast<double>(sign_of(u));
  const double q = std::sqrt(1.0 + t * t);
  const double phi_t = std::exp(kCa * t - 1.0) - kCCa + std::abs(u) / (q * q * q) + t * s * x / q;
  double gx = t * s * t / q;
  double gy = -t * s / q;
  if (r > 0.0) {
    gx += x / r;
    gy += y / r;
  }
  const double g = std::hypot(gx, gy);
  if (g == 0.0) return 0.0;
  return -phi_t / g;
}

ExampleSpec make_almond() {
  ExampleSpec s;
  s.name = "almond";
  s.F = SpeedField(almond_speed, 20.0, true);
  ExactSolution ex{"almond", almond_phi};
  ex.signed_distance = false;
  s.exact = ex;
  s.lo = -0.5;
  s.length = 1.0;
  s.T_F = 1.9;
  s.r1_skew = 0.5;
  s.r2_skew = 6.0;
  s.exact_normals = true;
  s.initial = curve_from(*s.exact);
  return s;
}

}  // namespace

std::optional<double> exact_chart(const ExampleSpec& ex, Representation rep, double z, double t) {
  if (!ex.exact || !ex.exact->valid(t)) return std::nullopt;
  SidewaysPatch frame;
  frame.rep = rep;
  const auto phi = [&](double w) {
    const Eigen::Vector2d p = frame.to_xy(w, z);
    return ex.exact->phi(p.x(), p.y(), t);
  };
  const int scan = 4096;
  const double step = ex.length / scan;
  double w0 = ex.lo;
  double f0 = phi(w0);
  if (f0 <= 0.0) return std::nullopt;
  double w_min = w0;
  double f_min = f0;
  for (int k = 1; k <= scan; ++k) {
    const double w1 = ex.lo + k * step;
    const double f1 = phi(w1);
    if (f1 < f_min) {
      f_min = f1;
      w_min = w1;
    }
    if (f1 <= 0.0) {
      double lo = w0;
      double hi = w1;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) > 0.0 ? lo : hi) = mid;
      }
      return 0.5 * (lo + hi);
    }
    w0 = w1;
    f0 = f1;
  }
  // A line tangent to the front still touches it.
  double lo = w_min - step;
  double hi = w_min + step;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    (phi(m1) < phi(m2) ? hi : lo) = (phi(m1) < phi(m2) ? m2 : m1);
  }
  const double w = 0.5 * (lo + hi);
  if (phi(w) <= 1e-12) return w;
  return std::nullopt;
}

SidewaysSweep sideways_sweep(const ExampleSpec& ex, int intervals, double dt_ratio) {
  if (!ex.sideways_conv_domain) throw std::invalid_argument(ex.name + " has no sideways convergence domain");
  if (!ex.exact) throw NoExactError(ex.name + " has no exact solution");
  const SidewaysConvDomain& d = *ex.sideways_conv_domain;
  SidewaysSweep out;
  out.h = ex.grid(intervals).h;
  out.dt = dt_ratio * out.h;
  const int cols = static_cast<int>(std::floor((d.z_hi - d.z_lo) / out.h + 1e-9)) + 1;
  if (cols < 3) throw std::invalid_argument("sideways sweep: domain narrower than two cells");

  std::vector<double> times{d.t_lo};
  while (times.back() + 0.5 * out.dt < d.t_hi) times.push_back(times.back() + out.dt);

  SidewaysPatch patch;
  patch.rep = d.rep;
  patch.a = 1;
  patch.h = out.h;
  patch.t0 = d.t_lo;
  patch.origin_row = 0;
  patch.f_sign0 = 1;
  patch.boundary.resize(static_cast<std::size_t>(cols));
  Eigen::ArrayXd row0(cols);
  for (int l = 0; l < cols; ++l) {
    const double z = d.z_lo + l * out.h;
    patch.z_vals.push_back(z);
    row0(l) = exact_chart(ex, d.rep, z, d.t_lo).value_or(kInf);
  }
  for (const int l : {0, cols - 1}) {
    auto& line = patch.boundary[static_cast<std::size_t>(l)];
    for (const double t : times) {
      const auto w = exact_chart(ex, d.rep, patch.z_vals[static_cast<std::size_t>(l)], t);
      if (!w) {
        if (line.empty()) continue;
        break;
      }
      line.t.push_back(t);
      line.w.push_back(*w);
    }
  }
  patch.times.push_back(d.t_lo);
  patch.chi.push_back(row0);

  for (std::size_t r = 0; r + 1 < times.size(); ++r) {
    patch.chi.push_back(sideways_step(patch, ex.F, static_cast<int>(r), times[r + 1] - times[r]));
    patch.times.push_back(times[r + 1]);
    patch.dt_schedule.push_back(times[r + 1] - times[r]);
    patch.apply_boundary(patch.rows() - 1);
    const auto& row = patch.chi.back();
    for (int l = 0; l < cols; ++l) {
      if (!std::isfinite(row(l))) continue;
      const auto w = exact_chart(ex, d.rep, patch.z_vals[static_cast<std::size_t>(l)], times[r + 1]);
      if (!w) continue;
      const double e = std::abs(row(l) - *w);
      out.L1 += out.h * out.dt * e;
      out.Linf = std::max(out.Linf, e);
      ++out.samples;
    }
  }
  return out;
}

double ExactSolution::operator()(double x, double y, double t) const {
  if (!valid(t)) throw NoExactError("exact solution of " + name + " is not available at this time");
  return phi(x, y, t);
}

Eigen::Vector3d ExactSolution::gradient(double x, double y, double t) const {
  const double e = 1e-7;
  const double tm = std::max(t_lo, t - e);
  return {(phi(x + e, y, t) - phi(x - e, y, t)) / (2 * e), (phi(x, y + e, t) - phi(x, y - e, t)) / (2 * e),
          (phi(x, y, t + e) - phi(x, y, tm)) / (t + e - tm)};
}

EngineConfig ExampleSpec::config(int intervals) const {
  EngineConfig c;
  c.grid = grid(intervals);
  c.r1 = r1;
  c.r2 = r2;
  c.r1_skew = r1_skew;
  c.r2_skew = r2_skew;
  if (exact_normals && exact) {
    const ExactSolution ex = *exact;
    c.exact_normal = [ex](double x, double y, double t) -> Eigen::Vector3d {
      if (!ex.valid(t)) return Eigen::Vector3d::Zero();
      return ex.gradient(x, y, t);
    };
  }
  return c;
}

const std::vector<std::string>& example_names() {
  static const std::vector<std::string> names{"motivation", "ex1", "ex2", "ex3", "ex4", "almond"};
  return names;
}

ExampleSpec get_example(const std::string& name) {
  if (name == "motivation") return make_motivation();
  if (name == "ex1") return make_ex1();
  if (name == "ex2") return make_ex2();
  if (name == "ex3") return make_ex3();
  if (name == "ex4") return make_ex4();
  if (name == "almond") return make_almond();
  throw UnknownExampleError("unknown example '" + name + "'");
}

double exact_phi(const std::string& name, double x, double y, double t) {
  const ExampleSpec s = get_example(name);
  if (!s.exact) throw NoExactError("example " + name + " has no exact solution");
  return (*s.exact)(x, y, t);
}

double example_radius(const std::string& name, double t) {
  if (name == "ex1") return ex1_R(t);
  if (name == "ex4") return ex4_R(t);
  if (name == "motivation") return motivation_R(t);
  throw NoExactError("example " + name + " has no radius function");
}

}  // namespace frontweave
