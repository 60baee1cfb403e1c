#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hyposym/error.hpp"
#include "hyposym/grid_region.hpp"
#include "hyposym/vec.hpp"

namespace hyposym {

// A height function on R with optional analytic derivative suppliers.
// Missing suppliers fall back to second-order central differences.
struct HeightFunction {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  std::function<Mat2(Vec2)> hessian;
};

enum class Side { upper, lower, boundary };

inline const char* to_string(Side s) {
  switch (s) {
    case Side::upper: return "upper";
    case Side::lower: return "lower";
    case Side::boundary: return "boundary";
  }
  return "?";
}

// Closed hypersurface M = M1 u M2 u M^ with M1, M2 the graphs of f1 > f2
// over the interior of R and M^ the part over the boundary of R.
class DoubleGraphSurface {
public:
  std::shared_ptr<const GridRegion> region;
  HeightFunction f1;
  HeightFunction f2;
  double hat_area = 0.0;  // area of M^, constant under shear deformations
  std::string label;
  // Area of both sheets over R \ R_delta, when known in closed form or by
  // one-dimensional quadrature.
  std::function<double(double)> collar_area;
  // Interior-ball radius of M in R^{n+1}, for surfaces where it is known.
  std::optional<double> interior_ball_radius;
  // Step of the central differences used when a supplier is missing. Capped
  // below the grid spacing: near the boundary the O(step^2) error of the
  // Hessian would otherwise dominate the curvature.
  double fd_step() const { return std::min(h(), 1e-3); }

  const HeightFunction& sheet(Side s) const { return s == Side::lower ? f2 : f1; }
  int dim() const { return region->dim(); }
  double h() const { return region->h(); }

  double height(Side s, Vec2 x) const { return sheet(s).value(x); }

  Vec2 gradient(Side s, Vec2 x) const {
    const auto& f = sheet(s);
    if (f.gradient) return f.gradient(x);
    const double e = fd_step();
    Vec2 g{(f.value(x + Vec2{e, 0}) - f.value(x - Vec2{e, 0})) / (2 * e), 0.0};
    if (dim() == 2) g.y = (f.value(x + Vec2{0, e}) - f.value(x - Vec2{0, e})) / (2 * e);
    return g;
  }

  Mat2 hessian(Side s, Vec2 x) const {
    const auto& f = sheet(s);
    if (f.hessian) return f.hessian(x);
    const double e = fd_step();
    const double c = f.value(x);
    Mat2 m;
    m.xx = (f.value(x + Vec2{e, 0}) - 2 * c + f.value(x - Vec2{e, 0})) / (e * e);
    if (dim() == 2) {
      m.yy = (f.value(x + Vec2{0, e}) - 2 * c + f.value(x - Vec2{0, e})) / (e * e);
      m.xy = (f.value(x + Vec2{e, e}) - f.value(x + Vec2{e, -e}) - f.value(x + Vec2{-e, e}) +
              f.value(x + Vec2{-e, -e})) /
             (4 * e * e);
    }
    return m;
  }

  // (x', y) lies in the open set G enclosed by M.
  bool in_enclosed(Vec2 xp, double y) const {
    return region->contains(xp) && f2.value(xp) < y && y < f1.value(xp);
  }

  // Same surface with the derivative suppliers dropped.
  DoubleGraphSurface without_derivatives() const {
    DoubleGraphSurface s = *this;
    s.f1.gradient = nullptr;
    s.f1.hessian = nullptr;
    s.f2.gradient = nullptr;
    s.f2.hessian = nullptr;
    return s;
  }
};

namespace detail {

inline bool close_rel(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

inline void spot_check_derivatives(const GridRegion& region, const HeightFunction& f, const char* name) {
  if (!f.gradient && !f.hessian) return;
  const auto& g = region.grid();
  std::vector<std::size_t> candidates;
  const double margin = std::max(10.0 * g.h, 0.05);
  for (std::size_t k = 0; k < g.size(); ++k)
    if (region.dist(k) > margin) candidates.push_back(k);
  if (candidates.empty()) return;
  std::mt19937_64 rng(0x5eed);
  std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
  const double e = 1e-5;
  for (int trial = 0; trial < 100; ++trial) {
    const Vec2 x = g.center(candidates[pick(rng)]);
    const Vec2 ex{e, 0}, ey{0, e};
    if (f.gradient) {
      const Vec2 ga = f.gradient(x);
      const double gx = (f.value(x + ex) - f.value(x - ex)) / (2 * e);
      const double gy = g.dim == 2 ? (f.value(x + ey) - f.value(x - ey)) / (2 * e) : 0.0;
      if (!close_rel(ga.x, gx, 1e-3) || !close_rel(ga.y, gy, 1e-3))
        throw Error("bad-derivatives", std::string(name) + " gradient disagrees with finite differences");
    }
    if (f.hessian && f.gradient) {
      const Mat2 ha = f.hessian(x);
      const Vec2 dx = (f.gradient(x + ex) - f.gradient(x - ex)) / (2 * e);
      bool ok = close_rel(ha.xx, dx.x, 1e-3) && close_rel(ha.xy, dx.y, 1e-3);
      if (g.dim == 2) {
        const Vec2 dy = (f.gradient(x + ey) - f.gradient(x - ey)) / (2 * e);
        ok = ok && close_rel(ha.yy, dy.y, 1e-3);
      }
      if (!ok) throw Error("bad-derivatives", std::string(name) + " Hessian disagrees with finite differences");
    }
  }
}

} // namespace detail

// Validates f1 > f2 on every cell of R and spot-checks analytic derivative
// suppliers against finite differences at 100 random cells.
inline DoubleGraphSurface make_double_graph(std::shared_ptr<const GridRegion> region, HeightFunction f1,
                                            HeightFunction f2, double hat_area = 0.0, std::string label = {}) {
  if (!region) throw Error("invalid-region", "null region");
  if (hat_area < 0.0) throw Error("invalid-hat-area", "hat area must be non-negative");
  const auto& g = region->grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!region->inside(k)) continue;
    const Vec2 x = g.center(k);
    if (!(f1.value(x) > f2.value(x)))
      throw Error("graphs-cross", "f1 <= f2 at (" + std::to_string(x.x) + ", " + std::to_string(x.y) + ")");
  }
  detail::spot_check_derivatives(*region, f1, "f1");
  detail::spot_check_derivatives(*region, f2, "f2");
  DoubleGraphSurface s;
  s.region = std::move(region);
  s.f1 = std::move(f1);
  s.f2 = std::move(f2);
  s.hat_area = hat_area;
  s.label = std::move(label);
  return s;
}

// Unit outer normal nu = (nu', nu_last) at a point of M.
struct NormalSample {
  Vec2 base_prime;
  double base_height = 0.0;
  Vec2 nu_prime;
  double nu_last = 0.0;
  Side side = Side::upper;

  double norm() const { return std::sqrt(norm2(nu_prime) + nu_last * nu_last); }
};

// Upper sheet: (-grad f1, 1)/W1; lower sheet: (grad f2, -1)/W2.
inline NormalSample outer_normal(const DoubleGraphSurface& s, Vec2 x, Side side) {
  if (side == Side::boundary) throw Error("invalid-side", "use boundary_normal for points over the boundary");
  if (!s.region->contains(x)) throw Error("outside-region", "point is not in the interior of R");
  const Vec2 g = s.gradient(side, x);
  const double w = std::sqrt(1.0 + norm2(g));
  NormalSample n;
  n.base_prime = x;
  n.base_height = s.height(side, x);
  n.side = side;
  if (side == Side::upper) {
    n.nu_prime = -g / w;
    n.nu_last = 1.0 / w;
  } else {
    n.nu_prime = g / w;
    n.nu_last = -1.0 / w;
  }
  return n;
}

// Horizontal outer normal (nu0', 0) at a point within h of the boundary.
inline NormalSample boundary_normal(const DoubleGraphSurface& s, Vec2 x0) {
  const double d = s.region->signed_distance(x0);
  if (std::abs(d) > s.h()) throw Error("not-boundary", "point is farther than h from the boundary of R");
  const auto& b = s.region->nearest_boundary(x0);
  NormalSample n;
  n.base_prime = x0;
  n.nu_prime = b.outward;
  n.nu_last = 0.0;
  n.side = Side::boundary;
  // M^ height is estimated from the sheets just inside the boundary.
  const Vec2 probe = b.point - 2.0 * s.h() * b.outward;
  if (s.region->contains(probe)) n.base_height = 0.5 * (s.f1.value(probe) + s.f2.value(probe));
  return n;
}

struct AreaResult {
  double core = 0.0;    // both sheets over R_{delta_cut}
  double collar = 0.0;  // both sheets over R \ R_{delta_cut}
  double hat = 0.0;     // area of M^
  bool extrapolated = false;
  double total() const { return core + collar + hat; }
};

// Midpoint quadrature of sum_i sqrt(1 + |grad f_i|^2) over the cells of a mask.
inline double sheet_area(const DoubleGraphSurface& s, const CellMask& mask) {
  const auto& g = mask.grid;
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!mask[k]) continue;
    const Vec2 x = g.center(k);
    sum += std::sqrt(1.0 + norm2(s.gradient(Side::upper, x))) + std::sqrt(1.0 + norm2(s.gradient(Side::lower, x)));
  }
  return sum * g.cell_measure();
}

// Surface area S = sum_i int_R sqrt(1 + |grad f_i|^2) + S^. The gradient blows
// up at the boundary of R, so only R_{delta_cut} is integrated on the grid. The
// collar comes from the surface's collar supplier when present. Otherwise the
// band delta_cut < d < 4 delta_cut (d = boundary distance) is used to fit the
// area integrand as a d^{-1/2} + b + c d^{1/2} and the level-set length as
// p0 + p1 d, and their product is integrated over 0 < d < delta_cut.
inline AreaResult area(const DoubleGraphSurface& s, double delta_cut) {
  if (delta_cut < 2.0 * s.h() * (1.0 - 1e-12)) throw Error("invalid-delta", "delta_cut must be >= 2h");
  AreaResult r;
  r.hat = s.hat_area;
  r.core = sheet_area(s, erode(*s.region, delta_cut).mask);
  if (s.collar_area) {
    r.collar = s.collar_area(delta_cut);
    return r;
  }
  const auto& g = s.region->grid();
  const double top = 4.0 * delta_cut;
  std::vector<double> ds, ws;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double d = s.region->dist(c);
    if (!s.region->inside(c) || d <= delta_cut || d > top) continue;
    const Vec2 x = g.center(c);
    ds.push_back(d);
    ws.push_back(std::sqrt(1.0 + norm2(s.gradient(Side::upper, x))) +
                 std::sqrt(1.0 + norm2(s.gradient(Side::lower, x))));
  }
  if (ds.size() < 8) throw Error("collar-resolution", "too few cells to extrapolate the boundary collar");
  Eigen::MatrixXd A(ds.size(), 3);
  Eigen::VectorXd y(ds.size());
  for (std::size_t k = 0; k < ds.size(); ++k) {
    const double t = ds[k] / delta_cut;
    A.row(k) << 1.0 / std::sqrt(t), 1.0, std::sqrt(t);
    y(k) = ws[k];
  }
  const Eigen::Vector3d w = A.colPivHouseholderQr().solve(y);

  // Measure of {d <= delta} on a ladder, fitted by p0 delta + p1 delta^2 / 2.
  constexpr int steps = 12;
  Eigen::Matrix<double, steps, 2> B;
  Eigen::Matrix<double, steps, 1> m;
  for (int k = 0; k < steps; ++k) {
    const double t = 1.0 + 3.0 * (k + 1) / steps;
    B.row(k) << t, 0.5 * t * t;
    m(k) = measure(s.region->mask()) - measure(erode(*s.region, t * delta_cut).mask);
  }
  const Eigen::Vector2d p = B.colPivHouseholderQr().solve(m);
  // Integral over t in (0, 1) of (p0 + p1 t)(a t^{-1/2} + b + c t^{1/2}), scaled by delta_cut.
  r.collar = (p(0) * (2.0 * w(0) + w(1) + 2.0 / 3.0 * w(2)) + p(1) * (2.0 / 3.0 * w(0) + 0.5 * w(1) + 0.4 * w(2)));
  r.extrapolated = true;
  return r;
}

} // namespace hyposym
