#pragma once

#include "frontweave/grid.hpp"
#include "frontweave/sideways.hpp"
#include "frontweave/speed.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <vector>

namespace frontweave {

enum class Verdict : std::uint8_t { pass, fail, refine };

struct SignTestResult {
  int d = 0;
  Verdict verdict = Verdict::pass;
};

/// Counts sign alternations of F at `samples` equispaced points of the
/// segment p -> q in (x, y, t). Zeros are skipped, so a grazing zero does
/// not count.
SignTestResult sign_test(const Eigen::Vector3d& p, const Eigen::Vector3d& q, const SpeedField& F, int samples);
SignTestResult sign_test(const SurfacePoint& p, const SurfacePoint& q, const SpeedField& F, int samples);

/// `per_cell` samples per cell length of the segment, at least 2.
int segment_samples(const Eigen::Vector3d& p, const Eigen::Vector3d& q, double h, int per_cell);

inline bool orientation_test(const SurfacePoint& p, const SurfacePoint& q) { return p.orient == q.orient; }

inline Eigen::Vector3d space_time(const SurfacePoint& p) { return {p.x, p.y, p.psi}; }

class MissingStencilError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Normal at chi^r_l from the central z-difference on row r - 1 and the
/// time difference between rows r - 1 and r, mapped back to (x, y, t).
Eigen::Vector3d normal_from_sideways(const SidewaysPatch& patch, int l, int r);

/// Accepted points of the (2s+1)^2 square around p_ab whose normal has the
/// same sign as p_ab's along the patch's w axis.
std::vector<const SurfacePoint*> neigh_side(const MarchState& state, const SurfacePoint& p_ab,
                                            const Eigen::Vector2d& w_axis, int s);

struct PatchRequest {
  Representation rep = Representation::yt;
  double theta = 0.0;
  int a = 0;
  int s = 1;
  double dt_pre = 0.0;  // step of the rows leading up to p_ab
};

/// Builds a patch whose origin row and column hold p_ab exactly, with
/// boundary lines interpolated linearly in t from NeighSide(p_ab).
SidewaysPatch convert_to_sideways(const MarchState& state, const SurfacePoint& p_ab, const PatchRequest& req,
                                  const SpeedField& F);

struct Crossing {
  double psi = kInf;
  Eigen::Vector3d normal3 = Eigen::Vector3d::Zero();
  int row = -1;
};

/// First time t in (after_t, T] at which the patch front passes through
/// (x, y), searched from the origin row onward.
std::optional<Crossing> extract_crossing(const SidewaysPatch& patch, double x, double y, double after_t,
                                         double T = kInf, int first_row = -1, int last_row = -1);

}  // namespace frontweave
