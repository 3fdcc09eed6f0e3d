#pragma once

#include "frontweave/grid.hpp"
#include "frontweave/sideways.hpp"
#include "frontweave/speed.hpp"
#include "frontweave/weaving.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace frontweave {

/// Initial front: a signed distance at t = 0 (negative inside) and a
/// level-set function used to time the seed points exactly.
struct InitialCurve {
  std::function<double(double, double)> phi0;
  std::function<double(double, double, double)> phi;
  std::function<Eigen::Vector3d(double, double, double)> grad;  // optional
};

enum class RefinePolicy : std::uint8_t { error, rescue };

struct EngineConfig {
  GridSpec grid;
  double s_fraction = 1.0 / 3.0;
  double r1 = 1.0 / 3.0;  // axis representations
  double r2 = 2.0;
  double r1_skew = 1.0;
  double r2_skew = 1.0;
  int sign_test_samples = 16;  // per cell length of the tested segment
  std::optional<bool> time_dependent;  // defaults to the speed field's flag
  bool record_sideways = false;
  int R_max = -1;  // -1: 3 s
  bool use_cfl = false;
  double delta = 1.0;
  bool local_lipschitz = true;
  double zero_speed = 1e-12;
  // Frozen-speed validity: F may not change by more than about itself over
  // one update. t-FMM neighbours need |F| >= sqrt(slow_factor K_t h), K_t
  // the local bound on |dF/dt| (variation over tau = h/|F|); a classical
  // update needs |F_ij| >= slow_factor K_loc h (variation across a cell).
  // Points failing this go to the sideways rescue.
  double slow_factor = 1.0;
  RefinePolicy on_refine = RefinePolicy::error;
  // Off follows Update Pile as published. On, a node never traversed joins the
  // pile only from a point whose orientation matches the node's side of the
  // initial curve: outside nodes are first crossed expanding, inside nodes
  // receding.
  bool first_crossing_guard = false;
  std::function<Eigen::Vector3d(double, double, double)> exact_normal;  // optional

  double T() const { return grid.T; }
  int s() const;
  void validate() const;
};

class RefineRequired : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CurveOffGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RescueStatus : std::uint8_t { assigned_target, assigned_origin, failed };

struct RescueOutcome {
  RescueStatus status = RescueStatus::failed;
  SurfacePoint point;
  int attempts = 0;
};

struct RescueFailure {
  int i = 0;
  int j = 0;
  int alpha = 0;
  int beta = 0;
  double psi_ab = 0.0;
};

struct RunStats {
  int rescues = 0;
  std::array<int, 3> assigned_on_attempt{0, 0, 0};
  int assigned_origin = 0;
  int failures = 0;
  int insufficient_data = 0;
  int dropped_after_T = 0;
  int guard_drops = 0;
  int refine_events = 0;
};

/// Seeds: grid points within one cell of the initial curve on the side the
/// front moves into, timed by the first root of curve.phi and given its
/// exact normal.
MarchState initialize(const InitialCurve& curve, const SpeedField& F, const GridSpec& grid);

class Engine {
 public:
  Engine(SpeedField F, EngineConfig config);

  void initialize(const InitialCurve& curve);
  /// Takes the band minimum and records it as accepted.
  SurfacePoint accept_next();
  void update_pile(const SurfacePoint& p_ab);
  void update_narrow_band(const SurfacePoint& p_ab);
  RescueOutcome rescue(const SurfacePoint& p_ab, int i, int j);
  /// Marches until the band is empty; returns the accepted cloud.
  const std::vector<SurfacePoint>& run();

  MarchState& state() { return state_; }
  const MarchState& state() const { return state_; }
  const RunStats& stats() const { return stats_; }
  const std::vector<RescueFailure>& failures() const { return failures_; }
  /// Interior patch points (x, y, t) when record_sideways is on.
  const std::vector<Eigen::Vector3d>& sideways_cloud() const { return sideways_cloud_; }
  const EngineConfig& config() const { return config_; }

 private:
  bool time_dependent() const;
  double admissible_speed(const SurfacePoint& q) const;
  void insert_band(const SurfacePoint& p);

  SpeedField F_;
  EngineConfig config_;
  MarchState state_;
  RunStats stats_;
  std::vector<RescueFailure> failures_;
  std::vector<Eigen::Vector3d> sideways_cloud_;
};

std::vector<SurfacePoint> run(const InitialCurve& curve, const SpeedField& F, const EngineConfig& config);

/// Plain fast marching with the same seeds and heap, never entering the
/// region inside the initial curve. Reference for the F > 0 reduction.
std::vector<SurfacePoint> classical_fmm(const InitialCurve& curve, const SpeedField& F, const GridSpec& grid);

}  // namespace frontweave
