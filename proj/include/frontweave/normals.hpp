#pragma once

#include <Eigen/Core>

#include <cmath>

namespace frontweave {

/// Neighbour offsets and arrivals that produced an eikonal update; an offset
/// of 0 marks an axis that did not contribute (one-dimensional update).
template <typename Scalar>
struct UsedNeighbors {
  int dx = 0;
  Scalar psi_x = Scalar(0);
  int dy = 0;
  Scalar psi_y = Scalar(0);
};

/// Space-time normal from the one-sided differences of an eikonal update:
/// orient * (psi_x, psi_y, -1), normalized. With orient = +1 this is the
/// quadrant formula (d psi/dx, d psi/dy, -1); for orient = -1 the arrival
/// decreases along the outward direction and the whole vector flips.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> normal_from_fmm(Scalar psi_ij, const UsedNeighbors<Scalar>& used,
                                            Scalar h, int orient) {
  Eigen::Matrix<Scalar, 3, 1> v;
  v.x() = used.dx != 0 ? (psi_ij - used.psi_x) / (-used.dx * h) : Scalar(0);
  v.y() = used.dy != 0 ? (psi_ij - used.psi_y) / (-used.dy * h) : Scalar(0);
  v.z() = Scalar(-1);
  v *= Scalar(orient);
  return v / v.norm();
}

}  // namespace frontweave
