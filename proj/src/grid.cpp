#include "frontweave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frontweave {

void GridSpec::validate() const {
  if (!(h > 0.0) || n < 3 || !(T > 0.0)) {
    std::ostringstream ss;
    ss << "invalid grid: h=" << h << " n=" << n << " T=" << T;
    throw std::invalid_argument(ss.str());
  }
}

GridSpec GridSpec::square(double lo, double length, int intervals, double T) {
  GridSpec g;
  g.x_min = lo;
  g.y_min = lo;
  g.h = length / intervals;
  g.n = intervals + 1;
  g.T = T;
  g.validate();
  return g;
}

std::string_view to_string(Source s) {
  switch (s) {
    case Source::fmm: return "fmm";
    case Source::tfmm: return "tfmm";
    case Source::sideways_yt: return "sideways-yt";
    case Source::sideways_xt: return "sideways-xt";
    case Source::sideways_skew: return "sideways-skew";
    case Source::seed: return "seed";
  }
  return "unknown";
}

Source source_from_string(std::string_view s) {
  for (auto src : {Source::fmm, Source::tfmm, Source::sideways_yt, Source::sideways_xt,
                   Source::sideways_skew, Source::seed}) {
    if (to_string(src) == s) return src;
  }
  throw std::invalid_argument("unknown source tag: " + std::string(s));
}

void SurfacePoint::set_normal(const Eigen::Vector3d& n3) {
  const double len = n3.norm();
  normal3 = len > 0.0 ? Eigen::Vector3d(n3 / len) : Eigen::Vector3d::Zero();
  const Eigen::Vector2d xy = normal3.head<2>();
  const double len2 = xy.norm();
  normal2 = len2 > 0.0 ? Eigen::Vector2d(xy / len2) : Eigen::Vector2d::Zero();
  const int s = sign_of(normal3.z());
  if (s != 0) orient = -s;
}

// NarrowBand

NarrowBand::NarrowBand(int n) : n_(n), pos_(static_cast<std::size_t>(n) * n, -1) {}

const SurfacePoint* NarrowBand::find(int i, int j) const {
  const auto k = pos_[index(i, j)];
  return k >= 0 ? &heap_[static_cast<std::size_t>(k)] : nullptr;
}

bool NarrowBand::less(const SurfacePoint& a, const SurfacePoint& b) {
  if (a.psi != b.psi) return a.psi < b.psi;
  if (a.i != b.i) return a.i < b.i;
  return a.j < b.j;
}

void NarrowBand::swap_nodes(std::size_t a, std::size_t b) {
  std::swap(heap_[a], heap_[b]);
  pos_[index(heap_[a].i, heap_[a].j)] = static_cast<std::ptrdiff_t>(a);
  pos_[index(heap_[b].i, heap_[b].j)] = static_cast<std::ptrdiff_t>(b);
}

void NarrowBand::sift_up(std::size_t k) {
  while (k > 0) {
    const std::size_t parent = (k - 1) / 2;
    if (!less(heap_[k], heap_[parent])) break;
    swap_nodes(k, parent);
    k = parent;
  }
}

void NarrowBand::sift_down(std::size_t k) {
  const std::size_t size = heap_.size();
  for (;;) {
    std::size_t best = k;
    const std::size_t l = 2 * k + 1;
    const std::size_t r = l + 1;
    if (l < size && less(heap_[l], heap_[best])) best = l;
    if (r < size && less(heap_[r], heap_[best])) best = r;
    if (best == k) return;
    swap_nodes(k, best);
    k = best;
  }
}

void NarrowBand::push_or_replace(const SurfacePoint& p) {
  const auto k = pos_[index(p.i, p.j)];
  if (k >= 0) {
    const auto uk = static_cast<std::size_t>(k);
    heap_[uk] = p;
    sift_up(uk);
    sift_down(static_cast<std::size_t>(pos_[index(p.i, p.j)]));
    return;
  }
  heap_.push_back(p);
  pos_[index(p.i, p.j)] = static_cast<std::ptrdiff_t>(heap_.size() - 1);
  sift_up(heap_.size() - 1);
}

void NarrowBand::erase(int i, int j) {
  const auto k = pos_[index(i, j)];
  if (k < 0) return;
  const auto uk = static_cast<std::size_t>(k);
  const std::size_t last = heap_.size() - 1;
  if (uk != last) swap_nodes(uk, last);
  pos_[index(i, j)] = -1;
  heap_.pop_back();
  if (uk < heap_.size()) {
    sift_up(uk);
    sift_down(static_cast<std::size_t>(pos_[index(heap_[uk].i, heap_[uk].j)]));
  }
}

const SurfacePoint& NarrowBand::top() const {
  if (heap_.empty()) throw EmptyBandError("narrow band is empty");
  return heap_.front();
}

SurfacePoint NarrowBand::extract_min() {
  if (heap_.empty()) throw EmptyBandError("narrow band is empty");
  SurfacePoint p = heap_.front();
  erase(p.i, p.j);
  return p;
}

// MarchState

MarchState::MarchState(const GridSpec& g)
    : grid(g),
      narrow_band(g.n),
      far_away(Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(g.n, g.n, true)),
      grid_fn(Eigen::ArrayXXd::Constant(g.n, g.n, kInf)),
      latest(Eigen::ArrayXXi::Constant(g.n, g.n, -1)),
      by_cell(static_cast<std::size_t>(g.n) * g.n) {}

const SurfacePoint* MarchState::current(int i, int j) const {
  const int k = latest(i, j);
  return k >= 0 ? &accepted[static_cast<std::size_t>(k)] : nullptr;
}

int MarchState::traversals(int i, int j) const {
  return static_cast<int>(history(i, j).size());
}

void MarchState::grid_set(int i, int j, double psi) { grid_fn(i, j) = psi; }

void MarchState::accept(const SurfacePoint& p) {
  grid_set(p.i, p.j, p.psi);
  accepted.push_back(p);
  latest(p.i, p.j) = static_cast<int>(accepted.size() - 1);
  by_cell[cell(p.i, p.j)].push_back(latest(p.i, p.j));
  far_away(p.i, p.j) = false;
}

bool MarchState::in_pile(int i, int j) const {
  return std::find(pile.begin(), pile.end(), GridIndex{i, j}) != pile.end();
}

SurfacePoint nb_extract_min(MarchState& state) { return state.narrow_band.extract_min(); }

}  // namespace frontweave
