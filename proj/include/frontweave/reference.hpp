#pragma once

#include "frontweave/examples.hpp"
#include "frontweave/grid.hpp"
#include "frontweave/speed.hpp"

#include <Eigen/Core>

#include <array>
#include <functional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace frontweave {

class CflViolationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyRegionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Level-set values on the nodes of a grid, phi(i, j) at (x_i, y_j).
struct LsmFrame {
  double t = 0.0;
  Eigen::ArrayXXd phi;
};

/// Values of phi0 on the grid nodes.
Eigen::ArrayXXd sample_grid(const std::function<double(double, double)>& phi0, const GridSpec& grid);

/// One Heun (RK2) step of phi_t + F |grad phi| = 0 with ENO2 one-sided
/// differences and Godunov upwinding. Throws CflViolationError when
/// dt > 0.5 h / max|F| over the nodes at either stage.
Eigen::ArrayXXd lsm_step(const SpeedField& F, const Eigen::ArrayXXd& phi, const GridSpec& grid, double t, double dt);

/// Marches from t = 0 to T (the last step is shortened to land on T) and
/// calls `on_frame` for t = 0 and after every step.
void lsm_march(const SpeedField& F, const std::function<double(double, double)>& phi0, const GridSpec& grid, double T,
               double dt, const std::function<void(const LsmFrame&)>& on_frame);

/// Every frame of lsm_march. Memory grows with T / dt; prefer lsm_march for
/// fine grids.
std::vector<LsmFrame> lsm_solve(const SpeedField& F, const std::function<double(double, double)>& phi0,
                                const GridSpec& grid, double T, double dt);

/// Zero crossings of phi on the grid edges by linear interpolation, at time
/// t. Points closer than spacing / 2 are merged. Empty when phi has one sign.
std::vector<Eigen::Vector3d> contour_points(const Eigen::ArrayXXd& phi, const GridSpec& grid, double t,
                                            double spacing);

/// Discrete sample of the space-time surface from a fine level-set run.
struct OracleCloud {
  std::vector<Eigen::Vector3d> points;
  double h = 0.0;
  double dt = 0.0;
};

OracleCloud build_oracle(const SpeedField& F, const std::function<double(double, double)>& phi0,
                         const GridSpec& fine, double T, double dt);

/// Fine grid and step used for an example's oracle: n_fine intervals on the
/// example domain, dt = 0.25 h / max|F| sampled over the domain and [0, T].
struct OracleSetup {
  GridSpec grid;
  double dt = 0.0;
};
OracleSetup oracle_setup(const ExampleSpec& ex, int n_fine);

/// Uniform-bin index over 3D points answering exact nearest distances.
class NearestIndex {
 public:
  explicit NearestIndex(std::vector<Eigen::Vector3d> points, double bin = 0.0);

  /// min |p - q| over the indexed points; +inf when empty.
  double distance(const Eigen::Vector3d& p) const;
  /// Linear scan, for checking.
  double brute_force(const Eigen::Vector3d& p) const;
  std::size_t size() const { return points_.size(); }

 private:
  std::array<long, 3> key(const Eigen::Vector3d& p) const;
  std::size_t slot(const std::array<long, 3>& k) const;

  std::vector<Eigen::Vector3d> points_;
  Eigen::Vector3d lo_ = Eigen::Vector3d::Zero();
  double bin_ = 1.0;
  std::array<long, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;  // CSR offsets per bin
  std::vector<std::size_t> order_;
};

/// |phi(x, y, psi)|; throws NoExactError outside the valid times and
/// std::invalid_argument when phi is not a signed distance.
double error_method1(const SurfacePoint& p, const ExactSolution& exact);
/// Distance in (x, y, t) to the nearest oracle point.
double error_method2(const SurfacePoint& p, const NearestIndex& cloud);

enum class Region : std::uint8_t { bottom, top, sideways, global };

std::string_view to_string(Region r);
Region region_from_string(std::string_view s);

/// First t in [0, T] at which F(x, y, .) changes sign, or +inf.
double f_zero_time(const SpeedField& F, double x, double y, double T);

/// Sideways points form their own region; the others split into bottom and
/// top by psi against the first zero time of F at (x, y).
bool in_region(const SurfacePoint& p, Region r, const SpeedField& F, double T);

struct Aggregate {
  double L1 = 0.0;
  double Linf = 0.0;
  std::vector<double> relative;  // e / Linf
};

/// L1 = h^dim * sum e, Linf = max e. Throws EmptyRegionError on no errors.
Aggregate aggregate(const std::vector<double>& errors, int dim, double h);

/// Least-squares slope of log(err) against log(h).
double loglog_slope(const std::vector<double>& h, const std::vector<double>& err);

/// Connected components of points in the plane, linking pairs closer than
/// `radius`.
int count_clusters(const std::vector<Eigen::Vector2d>& pts, double radius);

/// Integral of |F(x, y, s)| between t0 and t1: the distance a front at (x, y)
/// covers between the two times. Composite Simpson.
double travel_distance(const SpeedField& F, double x, double y, double t0, double t1);

/// Clusters of the slab of the cloud around time t. A point belongs to the
/// slab when the front travels at most `width` between t and its psi, so the
/// slab stays thin in space where F is small.
int slab_clusters(const std::vector<SurfacePoint>& cloud, const SpeedField& F, double t, double width, double radius);

/// Accepted points that the exact front never reaches: psi after the first
/// zero time of F at the point, and min over [0, T] of phi(x, y, .) above
/// `tol`.
struct EscapeReport {
  std::vector<std::size_t> escaped;  // indices into the cloud
  double max_excess = 0.0;           // largest min_t phi among them
};
EscapeReport detect_escapes(const std::vector<SurfacePoint>& cloud, const ExactSolution& exact, const SpeedField& F,
                            double T, double tol);

}  // namespace frontweave
