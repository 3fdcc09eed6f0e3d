#pragma once

#include "frontweave/engine.hpp"
#include "frontweave/grid.hpp"
#include "frontweave/sideways.hpp"
#include "frontweave/speed.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontweave {

class UnknownExampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NoExactError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Closed-form level-set function of an example.
struct ExactSolution {
  std::string name;
  std::function<double(double, double, double)> phi;
  bool signed_distance = true;
  bool solves_lse = true;
  double t_lo = 0.0;
  double t_hi = kInf;  // exclusive when finite

  bool valid(double t) const { return t >= t_lo && t < t_hi; }
  /// Throws NoExactError outside [t_lo, t_hi).
  double operator()(double x, double y, double t) const;
  /// Central-difference gradient of phi in (x, y, t).
  Eigen::Vector3d gradient(double x, double y, double t) const;
};

struct SidewaysConvDomain {
  Representation rep = Representation::yt;
  double z_lo = 0.0;
  double z_hi = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
};

struct ExampleSpec {
  std::string name;
  SpeedField F;
  InitialCurve initial;
  double lo = 0.0;      // domain [lo, lo + length]^2
  double length = 0.0;
  double T_F = 0.0;
  double r0 = 0.25;
  double r1 = 1.0 / 3.0;
  double r2 = 2.0;
  double r1_skew = 1.0;
  double r2_skew = 1.0;
  bool exact_normals = false;
  std::optional<ExactSolution> exact;
  std::optional<SidewaysConvDomain> sideways_conv_domain;

  /// Grid with `intervals` cells per axis (intervals + 1 points).
  GridSpec grid(int intervals) const { return GridSpec::square(lo, length, intervals, T_F); }
  EngineConfig config(int intervals) const;
};

const std::vector<std::string>& example_names();
ExampleSpec get_example(const std::string& name);
double exact_phi(const std::string& name, double x, double y, double t);

/// Left branch (a = +1) of the front in the domain's sideways chart: the
/// smallest w with phi(w, z, t) = 0, phi > 0 before it. Empty when the line
/// misses the front or the exact solution is unavailable at t.
std::optional<double> exact_chart(const ExampleSpec& ex, Representation rep, double z, double t);

struct SidewaysSweep {
  double h = 0.0;
  double dt = 0.0;
  double L1 = 0.0;   // h dt sum over rows after the first
  double Linf = 0.0;
  int samples = 0;
};

/// The sideways scheme alone on the example's convergence domain: z lines
/// spaced h, steps dt = dt_ratio h, exact data on the first row and on the two
/// end lines. Errors against exact_chart wherever both are finite.
SidewaysSweep sideways_sweep(const ExampleSpec& ex, int intervals, double dt_ratio = 0.5);

/// Radius R(t) of the circles of Examples 1 and 4 and the motivation example.
double example_radius(const std::string& name, double t);

}  // namespace frontweave
