#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace frontweave {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Uniform square grid: x_i = x_min + i*h, y_j = y_min + j*h, i,j in [0, n).
struct GridSpec {
  double x_min = 0.0;
  double y_min = 0.0;
  double h = 0.0;
  int n = 0;  // points per axis (N + 1)
  double T = 0.0;

  double x(int i) const { return x_min + i * h; }
  double y(int j) const { return y_min + j * h; }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < n && j < n; }
  int intervals() const { return n - 1; }

  void validate() const;

  /// Square domain [lo, lo + length]^2 split into `intervals` cells per axis.
  static GridSpec square(double lo, double length, int intervals, double T);
};

enum class Source : std::uint8_t { fmm, tfmm, sideways_yt, sideways_xt, sideways_skew, seed };

std::string_view to_string(Source s);
Source source_from_string(std::string_view s);
inline bool is_sideways(Source s) {
  return s == Source::sideways_yt || s == Source::sideways_xt || s == Source::sideways_skew;
}

/// One sample (x_i, y_j, psi) of the space-time surface traced by the front.
struct SurfacePoint {
  int i = 0;
  int j = 0;
  double x = 0.0;
  double y = 0.0;
  double psi = kInf;
  Eigen::Vector3d normal3 = Eigen::Vector3d::Zero();
  Eigen::Vector2d normal2 = Eigen::Vector2d::Zero();
  int orient = 1;
  Source source = Source::fmm;
  int attempts = 0;

  /// Sets normal3 (normalized), and derives normal2 and orient from it.
  void set_normal(const Eigen::Vector3d& n3);
};

/// Spatial projection (x_i, y_j) of a surface point.
inline Eigen::Vector2d project_space(const SurfacePoint& p) { return {p.x, p.y}; }
/// Time projection of a surface point.
inline double project_time(const SurfacePoint& p) { return p.psi; }

/// -1, 0 or +1.
template <typename Scalar>
constexpr int sign_of(Scalar v) {
  return (Scalar(0) < v) - (v < Scalar(0));
}

/// Binary min-heap keyed on (psi, i, j) with one entry per grid coordinate
/// and a position index for in-place replacement.
class NarrowBand {
 public:
  explicit NarrowBand(int n = 0);

  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  bool contains(int i, int j) const { return pos_[index(i, j)] >= 0; }
  const SurfacePoint* find(int i, int j) const;

  /// Inserts p, replacing any entry with the same (i, j).
  void push_or_replace(const SurfacePoint& p);
  void erase(int i, int j);
  SurfacePoint extract_min();
  const SurfacePoint& top() const;

 private:
  int index(int i, int j) const { return i * n_ + j; }
  static bool less(const SurfacePoint& a, const SurfacePoint& b);
  void sift_up(std::size_t k);
  void sift_down(std::size_t k);
  void swap_nodes(std::size_t a, std::size_t b);

  int n_ = 0;
  std::vector<SurfacePoint> heap_;
  std::vector<std::ptrdiff_t> pos_;
};

struct GridIndex {
  int i = 0;
  int j = 0;
  friend bool operator==(const GridIndex&, const GridIndex&) = default;
};

/// Accepted / NarrowBand / Pile / FarAway lists together with the Grid,
/// Norm and Orient lookups. Grid holds the latest accepted arrival per
/// coordinate; the accepted list keeps every traversal.
struct MarchState {
  explicit MarchState(const GridSpec& g);

  GridSpec grid;
  std::vector<SurfacePoint> accepted;
  NarrowBand narrow_band;
  std::vector<GridIndex> pile;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> far_away;
  Eigen::ArrayXXd grid_fn;
  Eigen::ArrayXXi latest;  // index into `accepted` of the grid-current point, -1 if none
  std::vector<std::vector<int>> by_cell;  // indices into `accepted`, per coordinate
  // Level-set function of the initial curve; its zero set is M at t = 0 and
  // supplies sideways boundary data there. Optional.
  std::function<double(double, double)> initial_phi;

  double grid_value(int i, int j) const { return grid_fn(i, j); }
  /// Grid-current accepted point at (i, j), if the coordinate was ever traversed.
  const SurfacePoint* current(int i, int j) const;
  int traversals(int i, int j) const;
  const std::vector<int>& history(int i, int j) const { return by_cell[cell(i, j)]; }
  std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i) * grid.n + j; }

  /// Grid(x_i, y_j) := psi.
  void grid_set(int i, int j, double psi);

  /// Accepts p: grid_set, append to accepted, clear FarAway.
  void accept(const SurfacePoint& p);

  bool in_pile(int i, int j) const;
};

/// Removes and returns the narrow-band entry with the smallest psi, ties
/// broken lexicographically on (i, j).
SurfacePoint nb_extract_min(MarchState& state);

class EmptyBandError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace frontweave
