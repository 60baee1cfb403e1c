#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <ostream>
#include <queue>
#include <vector>

#include "hyposym/error.hpp"
#include "hyposym/parallel.hpp"
#include "hyposym/vec.hpp"

namespace hyposym {

using Indicator = std::function<bool(Vec2)>;

struct Box {
  Vec2 lo;
  Vec2 hi;
};

// Cell-centred uniform grid. For dim == 1 only the x axis is used (ny == 1)
// and every cell centre has y == 0.
struct GridSpec {
  Vec2 origin;
  double h = 0.0;
  int nx = 0;
  int ny = 0;
  int dim = 2;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  int col(std::size_t k) const { return static_cast<int>(k % nx); }
  int row(std::size_t k) const { return static_cast<int>(k / nx); }

  Vec2 center(int i, int j) const {
    if (dim == 1) return {origin.x + (i + 0.5) * h, 0.0};
    return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h};
  }
  Vec2 center(std::size_t k) const { return center(col(k), row(k)); }

  double cell_measure() const { return dim == 1 ? h : h * h; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

// One bit per cell on a fixed grid.
struct CellMask {
  GridSpec grid;
  std::vector<std::uint8_t> bits;

  bool operator[](std::size_t k) const { return bits[k] != 0; }
  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
  }
  bool empty() const { return count() == 0; }
};

inline double measure(const CellMask& m) { return static_cast<double>(m.count()) * m.grid.cell_measure(); }

// a \ b on a shared grid.
inline CellMask difference(const CellMask& a, const CellMask& b) {
  if (!(a.grid == b.grid)) throw Error("grid-mismatch", "masks live on different grids");
  CellMask out{a.grid, std::vector<std::uint8_t>(a.bits.size(), 0)};
  for (std::size_t k = 0; k < a.bits.size(); ++k) out.bits[k] = (a.bits[k] && !b.bits[k]) ? 1 : 0;
  return out;
}

inline double measure_difference(const CellMask& a, const CellMask& b) { return measure(difference(a, b)); }

// Exact nearest-point queries against a fixed point set, bucketed on a
// coarse grid and searched ring by ring.
class SeedIndex {
public:
  SeedIndex() = default;

  SeedIndex(std::vector<Vec2> points, double bucket) : points_(std::move(points)), bucket_(bucket) {
    if (points_.empty()) return;
    lo_ = hi_ = points_.front();
    for (const auto& p : points_) {
      lo_.x = std::min(lo_.x, p.x);
      lo_.y = std::min(lo_.y, p.y);
      hi_.x = std::max(hi_.x, p.x);
      hi_.y = std::max(hi_.y, p.y);
    }
    bx_ = static_cast<int>((hi_.x - lo_.x) / bucket_) + 1;
    by_ = static_cast<int>((hi_.y - lo_.y) / bucket_) + 1;
    start_.assign(static_cast<std::size_t>(bx_) * by_ + 1, 0);
    std::vector<std::size_t> cell_of(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      cell_of[i] = bucket_index(points_[i]);
      ++start_[cell_of[i] + 1];
    }
    for (std::size_t c = 1; c < start_.size(); ++c) start_[c] += start_[c - 1];
    order_.resize(points_.size());
    std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < points_.size(); ++i) order_[fill[cell_of[i]]++] = i;
  }

  bool empty() const { return points_.empty(); }
  const std::vector<Vec2>& points() const { return points_; }

  struct Hit {
    double distance = std::numeric_limits<double>::infinity();
    std::size_t index = 0;
  };

  Hit nearest(const Vec2& q) const {
    Hit best;
    if (points_.empty()) return best;
    const int qx = static_cast<int>(std::floor((q.x - lo_.x) / bucket_));
    const int qy = static_cast<int>(std::floor((q.y - lo_.y) / bucket_));
    // Chebyshev distance from the query bucket to the populated range.
    const int off_x = std::max({0, -qx, qx - (bx_ - 1)});
    const int off_y = std::max({0, -qy, qy - (by_ - 1)});
    const int max_ring = std::max(off_x, off_y) + std::max(bx_, by_) + 1;
    double best2 = std::numeric_limits<double>::infinity();
    for (int ring = std::max(off_x, off_y); ring <= max_ring; ++ring) {
      if (std::isfinite(best2)) {
        const double reach = (ring - 1) * bucket_;
        if (reach > 0.0 && reach * reach > best2) break;
      }
      for (int j = qy - ring; j <= qy + ring; ++j) {
        if (j < 0 || j >= by_) continue;
        const bool edge_row = (j == qy - ring || j == qy + ring);
        for (int i = qx - ring; i <= qx + ring; i += (edge_row ? 1 : 2 * ring)) {
          if (i >= 0 && i < bx_) scan(static_cast<std::size_t>(j) * bx_ + i, q, best2, best.index);
          if (ring == 0) break;
        }
      }
    }
    best.distance = std::sqrt(best2);
    return best;
  }

  // Appends every point within `radius` of q.
  void within(const Vec2& q, double radius, std::vector<Vec2>& out) const {
    if (points_.empty()) return;
    const int i0 = std::max(0, static_cast<int>(std::floor((q.x - radius - lo_.x) / bucket_)));
    const int i1 = std::min(bx_ - 1, static_cast<int>(std::floor((q.x + radius - lo_.x) / bucket_)));
    const int j0 = std::max(0, static_cast<int>(std::floor((q.y - radius - lo_.y) / bucket_)));
    const int j1 = std::min(by_ - 1, static_cast<int>(std::floor((q.y + radius - lo_.y) / bucket_)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) {
        const std::size_t cell = static_cast<std::size_t>(j) * bx_ + i;
        for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
          const Vec2& p = points_[order_[k]];
          if (norm2(p - q) <= radius * radius) out.push_back(p);
        }
      }
  }

private:
  std::size_t bucket_index(const Vec2& p) const {
    const int i = std::clamp(static_cast<int>((p.x - lo_.x) / bucket_), 0, bx_ - 1);
    const int j = std::clamp(static_cast<int>((p.y - lo_.y) / bucket_), 0, by_ - 1);
    return static_cast<std::size_t>(j) * bx_ + i;
  }

  void scan(std::size_t cell, const Vec2& q, double& best2, std::size_t& best_index) const {
    for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
      const std::size_t idx = order_[k];
      const double d2 = norm2(points_[idx] - q);
      if (d2 < best2) {
        best2 = d2;
        best_index = idx;
      }
    }
  }

  std::vector<Vec2> points_;
  double bucket_ = 1.0;
  Vec2 lo_, hi_;
  int bx_ = 0, by_ = 0;
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

// A point on the boundary of R with its outward unit normal.
struct BoundarySample {
  Vec2 point;
  Vec2 outward;
};

// Discretised projection R: inside mask, signed boundary distance
// (positive inside), and sub-cell boundary samples.
class GridRegion {
public:
  const GridSpec& grid() const { return grid_; }
  double h() const { return grid_.h; }
  int dim() const { return grid_.dim; }
  const Indicator& indicator() const { return indicator_; }

  bool inside(std::size_t k) const { return inside_[k] != 0; }
  double dist(std::size_t k) const { return dist_[k]; }
  const std::vector<double>& dist_field() const { return dist_; }
  const std::vector<BoundarySample>& boundary() const { return boundary_; }
  const std::vector<std::size_t>& boundary_cells() const { return boundary_cells_; }

  CellMask mask() const { return {grid_, inside_}; }

  // Membership of an arbitrary point in the open region.
  bool contains(const Vec2& p) const { return indicator_(p); }

  double distance_to_boundary(const Vec2& p) const { return seeds_.nearest(p).distance; }

  double signed_distance(const Vec2& p) const {
    const double d = distance_to_boundary(p);
    return contains(p) ? d : -d;
  }

  // Outward normal of the boundary sample closest to p.
  const BoundarySample& nearest_boundary(const Vec2& p) const { return boundary_[seeds_.nearest(p).index]; }

  double inradius() const { return *std::max_element(dist_.begin(), dist_.end()); }

  // Largest distance between two inside cell centres, bounded via the
  // bounding box of the inside cells.
  double diameter() const {
    Vec2 lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 hi = -lo;
    for (std::size_t k = 0; k < grid_.size(); ++k) {
      if (!inside_[k]) continue;
      const Vec2 c = grid_.center(k);
      lo = {std::min(lo.x, c.x), std::min(lo.y, c.y)};
      hi = {std::max(hi.x, c.x), std::max(hi.y, c.y)};
    }
    return norm(hi - lo) + grid_.h;
  }

  friend GridRegion build_region(Indicator indicator, const Box& bounds, double h, int dim);

private:
  GridSpec grid_;
  Indicator indicator_;
  std::vector<std::uint8_t> inside_;
  std::vector<double> dist_;
  std::vector<BoundarySample> boundary_;
  std::vector<std::size_t> boundary_cells_;
  SeedIndex seeds_;
};

namespace detail {

inline Vec2 bisect_boundary(const Indicator& f, Vec2 in, Vec2 out) {
  for (int it = 0; it < 48; ++it) {
    const Vec2 mid = 0.5 * (in + out);
    if (f(mid)) in = mid;
    else out = mid;
  }
  return 0.5 * (in + out);
}

// Unit normal at p from a principal-axis fit of the neighbouring boundary
// samples, oriented so that it points out of the region.
inline Vec2 fit_outward_normal(const Vec2& p, const std::vector<Vec2>& near, const Indicator& f, double h) {
  Vec2 mean{};
  for (const auto& q : near) mean += q;
  mean = mean / static_cast<double>(near.size());
  Mat2 cov;
  for (const auto& q : near) {
    const Vec2 d = q - mean;
    cov = cov + Mat2{d.x * d.x, d.x * d.y, d.y * d.y};
  }
  const double lmin = eigenvalues(cov).first;
  Vec2 n = std::abs(cov.xy) > 1e-300 ? Vec2{cov.xy, lmin - cov.xx} : (cov.xx < cov.yy ? Vec2{1, 0} : Vec2{0, 1});
  n = normalized(n);
  const double step = 1.5 * h;
  if (f(p + step * n) && !f(p - step * n)) n = -n;
  return n;
}

} // namespace detail

// Discretises R = {indicator} on a cell-centred grid covering `bounds`.
inline GridRegion build_region(Indicator indicator, const Box& bounds, double h, int dim = 2) {
  if (!(h > 0.0)) throw Error("invalid-spacing", "h must be positive");
  if (dim != 1 && dim != 2) throw Error("unsupported-dimension", "only n = 1 and n = 2 grids are supported");

  GridRegion r;
  r.indicator_ = std::move(indicator);
  GridSpec& g = r.grid_;
  g.h = h;
  g.dim = dim;
  g.nx = static_cast<int>(std::ceil((bounds.hi.x - bounds.lo.x) / h - 1e-9));
  g.ny = dim == 1 ? 1 : static_cast<int>(std::ceil((bounds.hi.y - bounds.lo.y) / h - 1e-9));
  const Vec2 mid = 0.5 * (bounds.lo + bounds.hi);
  g.origin = {mid.x - 0.5 * g.nx * h, dim == 1 ? 0.0 : mid.y - 0.5 * g.ny * h};

  const std::size_t n = g.size();
  r.inside_.assign(n, 0);
  parallel_for(n, [&](std::size_t k) { r.inside_[k] = r.indicator_(g.center(k)) ? 1 : 0; });

  std::size_t inside_count = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!r.inside_[k]) continue;
    ++inside_count;
    const int i = g.col(k), j = g.row(k);
    if (i == 0 || i == g.nx - 1 || (dim == 2 && (j == 0 || j == g.ny - 1)))
      throw Error("bounds", "region touches the bounding box; enlarge bounds");
  }
  if (inside_count == 0) throw Error("empty-region", "indicator selects no cell");

  // Connectivity (4-neighbourhood).
  {
    std::vector<std::uint8_t> seen(n, 0);
    std::queue<std::size_t> q;
    const auto first = static_cast<std::size_t>(std::find(r.inside_.begin(), r.inside_.end(), 1) - r.inside_.begin());
    q.push(first);
    seen[first] = 1;
    std::size_t reached = 0;
    while (!q.empty()) {
      const std::size_t k = q.front();
      q.pop();
      ++reached;
      const int i = g.col(k), j = g.row(k);
      const int di[4] = {1, -1, 0, 0};
      const int dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < (dim == 1 ? 2 : 4); ++d) {
        const int ii = i + di[d], jj = j + dj[d];
        if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
        const std::size_t kk = g.index(ii, jj);
        if (r.inside_[kk] && !seen[kk]) {
          seen[kk] = 1;
          q.push(kk);
        }
      }
    }
    if (reached != inside_count) throw Error("disconnected-region", "inside cells form more than one component");
  }

  // Boundary samples on every axis edge whose end cells disagree.
  std::vector<Vec2> seeds;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = g.index(i, j);
      bool is_boundary_cell = false;
      if (i + 1 < g.nx) {
        const std::size_t kr = g.index(i + 1, j);
        if (r.inside_[k] != r.inside_[kr]) {
          const Vec2 a = g.center(i, j), b = g.center(i + 1, j);
          seeds.push_back(r.inside_[k] ? detail::bisect_boundary(r.indicator_, a, b)
                                       : detail::bisect_boundary(r.indicator_, b, a));
        }
      }
      if (dim == 2 && j + 1 < g.ny) {
        const std::size_t ku = g.index(i, j + 1);
        if (r.inside_[k] != r.inside_[ku]) {
          const Vec2 a = g.center(i, j), b = g.center(i, j + 1);
          seeds.push_back(r.inside_[k] ? detail::bisect_boundary(r.indicator_, a, b)
                                       : detail::bisect_boundary(r.indicator_, b, a));
        }
      }
      if (r.inside_[k]) {
        const int di[4] = {1, -1, 0, 0};
        const int dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < (dim == 1 ? 2 : 4); ++d) {
          const int ii = i + di[d], jj = j + dj[d];
          if (!r.inside_[g.index(ii, jj)]) is_boundary_cell = true;
        }
        if (is_boundary_cell) r.boundary_cells_.push_back(k);
      }
    }
  }
  r.seeds_ = SeedIndex(seeds, 8.0 * h);

  r.dist_.assign(n, 0.0);
  parallel_for(n, [&](std::size_t k) {
    const double d = r.seeds_.nearest(g.center(k)).distance;
    r.dist_[k] = r.inside_[k] ? d : -d;
  });

  r.boundary_.resize(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t s) {
    const Vec2 p = seeds[s];
    Vec2 normal;
    if (dim == 1) {
      normal = r.indicator_(p + Vec2{0.5 * h, 0.0}) ? Vec2{-1.0, 0.0} : Vec2{1.0, 0.0};
    } else {
      std::vector<Vec2> near;
      r.seeds_.within(p, 3.0 * h, near);
      normal = detail::fit_outward_normal(p, near, r.indicator_, h);
    }
    r.boundary_[s] = {p, normal};
  });
  return r;
}

// R_delta = {x in R : dist(x, boundary) > delta}, on the parent grid.
struct ErodedRegion {
  double delta = 0.0;
  CellMask mask;
};

inline ErodedRegion erode(const GridRegion& region, double delta) {
  if (!(delta > 0.0)) throw Error("invalid-delta", "delta must be positive");
  ErodedRegion e{delta, {region.grid(), std::vector<std::uint8_t>(region.grid().size(), 0)}};
  for (std::size_t k = 0; k < region.grid().size(); ++k) e.mask.bits[k] = region.dist(k) > delta ? 1 : 0;
  return e;
}

inline double measure(const GridRegion& region) { return measure(region.mask()); }
inline double measure(const ErodedRegion& e) { return measure(e.mask); }

enum class BallSide { interior, exterior };

struct BallRadius {
  double radius = 0.0;
  bool capped = false;       // every tested radius passed; radius is the cap
  bool no_c11 = false;       // radius below 4h: boundary has no usable ball condition
  Vec2 witness;              // boundary sample that limited the radius
};

// Largest grid radius rho = k h for which every boundary sample admits a
// tangent ball of that radius on the requested side. A ball of radius rho
// centred at c misses the opposite side iff the signed distance at c is at
// least rho (up to half a cell).
inline BallRadius ball_condition_radius(const GridRegion& region, BallSide side, double cap = -1.0) {
  const double h = region.h();
  const std::size_t min_samples = region.dim() == 1 ? 2 : 3;
  if (region.boundary().size() < min_samples) throw Error("resolution", "too few boundary samples");
  if (region.inradius() < 4.0 * h) throw Error("resolution", "inradius below 4h");
  if (cap <= 0.0) cap = region.diameter();
  const double tol = 0.5 * h;
  const double sign = side == BallSide::interior ? 1.0 : -1.0;

  Vec2 witness;
  auto passes = [&](double rho, bool record) {
    for (const auto& b : region.boundary()) {
      const Vec2 c = b.point - sign * rho * b.outward;
      if (sign * region.signed_distance(c) < rho - tol) {
        if (record) witness = b.point;
        return false;
      }
    }
    return true;
  };

  const int kmax = std::max(1, static_cast<int>(std::floor(cap / h)));
  BallRadius out;
  if (passes(kmax * h, false)) {
    out.radius = kmax * h;
    out.capped = true;
    return out;
  }
  int lo = 0, hi = kmax;  // passes(lo*h) (or lo == 0), fails at hi
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (passes(mid * h, false)) lo = mid;
    else hi = mid;
  }
  passes(hi * h, true);
  out.radius = lo * h;
  out.witness = witness;
  out.no_c11 = out.radius < 4.0 * h;
  return out;
}

inline void write_region_csv(std::ostream& os, const GridRegion& region) {
  os << "x1,x2,inside,dist\n";
  const auto& g = region.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 c = g.center(k);
    os << c.x << ',' << c.y << ',' << (region.inside(k) ? 1 : 0) << ',' << region.dist(k) << '\n';
  }
}

} // namespace hyposym
