#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hyposym/curvature.hpp"
#include "hyposym/curve.hpp"
#include "hyposym/error.hpp"
#include "hyposym/grid_region.hpp"
#include "hyposym/parallel.hpp"
#include "hyposym/surface.hpp"

namespace hyposym {

// ---- mollifier ----

// eta(z) = exp(-1 / (1 - |z|^2)) on the unit ball, unnormalised.
inline double bump(double z2) { return z2 < 1.0 ? std::exp(-1.0 / (1.0 - z2)) : 0.0; }

// Discrete eta_a(x) = a^{-n} eta(x / a) on the grid stencil |offset| < a,
// normalised so that sum(values) * h^n = 1.
struct MollifierKernel {
  int dim = 2;
  double a = 0.0;
  double h = 0.0;
  double scale = 0.0;  // normalising constant applied to eta(z / a)
  std::vector<int> di, dj;
  std::vector<double> value;
  std::vector<Vec2> grad;

  double cell() const { return dim == 1 ? h : h * h; }
  double mass() const {
    double m = 0.0;
    for (double v : value) m += v;
    return m * cell();
  }
  double grad_l1() const {
    double m = 0.0;
    for (const Vec2& g : grad) m += norm(g);
    return m * cell();
  }
  double eval(Vec2 z) const { return scale * bump(norm2(z) / (a * a)); }
  Vec2 eval_grad(Vec2 z) const {
    const Vec2 u = z / a;
    const double q = norm2(u);
    if (q >= 1.0) return {};
    const double w = 1.0 - q;
    return scale * bump(q) * (-2.0 / (w * w)) / a * u;
  }
};

inline MollifierKernel mollifier_kernel(int dim, double a, double h) {
  if (dim != 1 && dim != 2) throw Error("unsupported-dimension", "n must be 1 or 2");
  if (!(h > 0)) throw Error("invalid-spacing", "h must be positive");
  if (a < 3.0 * h * (1 - 1e-12)) throw Error("kernel-underresolved", "kernel radius must be at least 3h");
  MollifierKernel k;
  k.dim = dim;
  k.a = a;
  k.h = h;
  const int R = static_cast<int>(std::ceil(a / h));
  double sum = 0.0;
  for (int j = dim == 2 ? -R : 0; j <= (dim == 2 ? R : 0); ++j)
    for (int i = -R; i <= R; ++i) {
      const Vec2 z{i * h, j * h};
      const double e = bump(norm2(z) / (a * a));
      if (e <= 0.0) continue;
      k.di.push_back(i);
      k.dj.push_back(j);
      sum += e;
    }
  k.scale = 1.0 / (sum * k.cell());
  for (std::size_t m = 0; m < k.di.size(); ++m) {
    const Vec2 z{k.di[m] * h, k.dj[m] * h};
    k.value.push_back(k.eval(z));
    k.grad.push_back(k.eval_grad(z));
  }
  return k;
}

// ---- cutoff ----

// phi_delta = 1_{R_{2 delta / 3}} * eta_{delta / 3}, evaluated as a discrete
// convolution over cell centres (zero outside the grid). Values are exactly 1
// where the whole stencil lies in R_{2 delta / 3} and exactly 0 where none of
// it does.
class CutoffField {
public:
  double delta() const { return delta_; }
  const GridSpec& grid() const { return grid_; }
  const MollifierKernel& kernel() const { return kernel_; }
  double phi(std::size_t k) const { return phi_[k]; }
  Vec2 grad(std::size_t k) const { return grad_[k]; }
  const std::vector<double>& phi_field() const { return phi_; }
  double sup_grad() const { return sup_grad_; }
  bool degenerate() const { return degenerate_; }  // R_{2 delta / 3} empty

  // Cell index when p is a cell centre.
  std::optional<std::size_t> cell_of(Vec2 p) const {
    const double fi = (p.x - grid_.origin.x) / grid_.h - 0.5;
    const double fj = grid_.dim == 2 ? (p.y - grid_.origin.y) / grid_.h - 0.5 : 0.0;
    const long i = std::lround(fi), j = std::lround(fj);
    if (i < 0 || j < 0 || i >= grid_.nx || j >= grid_.ny) return std::nullopt;
    if (std::abs(fi - i) > 1e-9 || std::abs(fj - j) > 1e-9) return std::nullopt;
    if (grid_.dim == 1 && p.y != 0.0) return std::nullopt;
    return grid_.index(static_cast<int>(i), static_cast<int>(j));
  }

  double value_at(Vec2 p) const {
    if (auto k = cell_of(p)) return phi_[*k];
    double s = 0.0;
    visit(p, [&](Vec2 y) { s += kernel_.eval(p - y); });
    return s * kernel_.cell();
  }
  Vec2 gradient_at(Vec2 p) const {
    if (auto k = cell_of(p)) return grad_[*k];
    Vec2 s;
    visit(p, [&](Vec2 y) { s += kernel_.eval_grad(p - y); });
    return s * kernel_.cell();
  }

  friend CutoffField build_cutoff(const GridRegion& region, double delta);

private:
  template <class Fn>
  void visit(Vec2 p, Fn&& fn) const {
    const int R = static_cast<int>(std::ceil(kernel_.a / grid_.h)) + 1;
    const int ci = static_cast<int>(std::floor((p.x - grid_.origin.x) / grid_.h));
    const int cj = grid_.dim == 2 ? static_cast<int>(std::floor((p.y - grid_.origin.y) / grid_.h)) : 0;
    for (int j = grid_.dim == 2 ? cj - R : 0; j <= (grid_.dim == 2 ? cj + R : 0); ++j)
      for (int i = ci - R; i <= ci + R; ++i) {
        if (i < 0 || j < 0 || i >= grid_.nx || j >= grid_.ny) continue;
        const std::size_t k = grid_.index(i, j);
        if (in_core_[k]) fn(grid_.center(k));
      }
  }

  double delta_ = 0.0;
  GridSpec grid_;
  MollifierKernel kernel_;
  std::vector<std::uint8_t> in_core_;
  std::vector<double> phi_;
  std::vector<Vec2> grad_;
  double sup_grad_ = 0.0;
  bool degenerate_ = false;
};

inline CutoffField build_cutoff(const GridRegion& region, double delta) {
  const double h = region.h();
  if (delta < 9.0 * h * (1 - 1e-12)) throw Error("delta-too-small", "delta must be >= 9h");
  CutoffField c;
  c.delta_ = delta;
  c.grid_ = region.grid();
  c.kernel_ = mollifier_kernel(region.dim(), delta / 3.0, h);
  const auto& g = c.grid_;
  const auto& K = c.kernel_;
  c.in_core_.assign(g.size(), 0);
  bool any = false;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (region.inside(k) && region.dist(k) > 2.0 * delta / 3.0) c.in_core_[k] = 1, any = true;
  c.degenerate_ = !any;
  c.phi_.assign(g.size(), 0.0);
  c.grad_.assign(g.size(), Vec2{});
  parallel_for(g.size(), [&](std::size_t k) {
    const int i0 = g.col(k), j0 = g.row(k);
    std::size_t hits = 0;
    double s = 0.0;
    Vec2 gs;
    for (std::size_t m = 0; m < K.di.size(); ++m) {
      const int i = i0 + K.di[m], j = j0 + K.dj[m];
      if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) continue;
      if (!c.in_core_[g.index(i, j)]) continue;
      ++hits;
      // phi(x) = sum_y 1(y) eta(x - y); the stencil offset is y - x.
      s += K.value[m];
      gs -= K.grad[m];
    }
    if (hits == K.di.size()) {
      c.phi_[k] = 1.0;
    } else if (hits > 0) {
      c.phi_[k] = std::clamp(s * K.cell(), 0.0, 1.0);
      c.grad_[k] = gs * K.cell();
    }
  });
  for (const Vec2& v : c.grad_) c.sup_grad_ = std::max(c.sup_grad_, norm(v));
  return c;
}

// ---- vertical fields and deformations ----

// Scalar v of a vertical field V = v e_{n+1} with its gradient.
struct VerticalField {
  std::function<double(Vec2)> value;
  std::function<Vec2(Vec2)> gradient;
  std::string label;
};

inline VerticalField translation_field() {
  return {[](Vec2) { return 1.0; }, [](Vec2) { return Vec2{}; }, "translation"};
}

// v = (f1 + f2) phi_delta.
struct ShearField {
  std::shared_ptr<const CutoffField> cutoff;
  VerticalField field;
  double delta = 0.0;
};

inline ShearField build_shear(const DoubleGraphSurface& s, double delta) {
  auto cut = std::make_shared<const CutoffField>(build_cutoff(*s.region, delta));
  ShearField out;
  out.cutoff = cut;
  out.delta = delta;
  auto surf = std::make_shared<const DoubleGraphSurface>(s);
  out.field.value = [cut, surf](Vec2 x) {
    const double p = cut->value_at(x);
    return p == 0.0 ? 0.0 : (surf->f1.value(x) + surf->f2.value(x)) * p;
  };
  out.field.gradient = [cut, surf](Vec2 x) {
    const double p = cut->value_at(x);
    if (p == 0.0) return Vec2{};
    const Vec2 gp = cut->gradient_at(x);
    const Vec2 gs = surf->gradient(Side::upper, x) + surf->gradient(Side::lower, x);
    return p * gs + (surf->f1.value(x) + surf->f2.value(x)) * gp;
  };
  out.field.label = "shear";
  return out;
}

// Sum of bumps exp(-1/(1-q)) with random centres, radii and weights, each ball
// inside R_delta. Deterministic for a given seed.
inline VerticalField random_smooth_field(const GridRegion& region, double delta, unsigned seed, int bumps = 3) {
  std::mt19937_64 rng(seed);
  const auto& g = region.grid();
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (region.inside(k) && region.dist(k) > delta + 4 * g.h) cells.push_back(k);
  if (cells.empty()) throw Error("empty-region", "no room for a test field");
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Bump {
    Vec2 c;
    double r, w;
  };
  std::vector<Bump> bs;
  for (int b = 0; b < bumps; ++b) {
    const std::size_t k = cells[pick(rng)];
    const Vec2 c = g.center(k);
    const double room = region.dist(k) - delta;
    const double r = std::max(4 * g.h, room * (0.4 + 0.6 * unit(rng)));
    bs.push_back({c, std::min(r, room), unit(rng) * 2.0 - 1.0});
  }
  VerticalField f;
  f.value = [bs](Vec2 x) {
    double s = 0.0;
    for (const auto& b : bs) s += b.w * bump(norm2(x - b.c) / (b.r * b.r));
    return s;
  };
  f.gradient = [bs](Vec2 x) {
    Vec2 s;
    for (const auto& b : bs) {
      const Vec2 u = (x - b.c) / b.r;
      const double q = norm2(u);
      if (q >= 1) continue;
      s += b.w * bump(q) * (-2.0 / ((1 - q) * (1 - q))) / b.r * u;
    }
    return s;
  };
  f.label = "random-bumps-" + std::to_string(seed);
  return f;
}

// M(t) = {x + t V(x)}: both sheets shifted by t v. The collar supplier and S^
// carry over, which is exact when v is constant on the collar.
inline DoubleGraphSurface deform(const DoubleGraphSurface& s, const VerticalField& v, double t) {
  if (t == 0.0) return s;
  auto lift = [&v, t](const HeightFunction& f) {
    HeightFunction out;
    out.value = [f, v, t](Vec2 x) { return f.value(x) + t * v.value(x); };
    if (f.gradient) out.gradient = [f, v, t](Vec2 x) { return f.gradient(x) + t * v.gradient(x); };
    return out;
  };
  DoubleGraphSurface d = s;
  d.f1 = lift(s.f1);
  d.f2 = lift(s.f2);
  // Sheets move together, so f1 - f2 is unchanged; confirm anyway.
  const auto& g = s.region->grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.region->inside(k)) continue;
    const Vec2 x = g.center(k);
    if (!(d.f1.value(x) > d.f2.value(x))) throw Error("graphs-cross", "deformation made the sheets cross");
  }
  return d;
}

// ---- first variation ----

struct FirstVariationFD {
  double h_t = 0.0;
  double delta_cut = 0.0;
  std::vector<std::pair<double, double>> samples;  // (t, S(t)) for t in {0, +-h_t/2, +-h_t, +-2h_t}
  double rate = 0.0;        // (S(h_t) - S(-h_t)) / (2 h_t)
  double rate_half = 0.0;   // same with h_t / 2
  double richardson = 0.0;  // (4 rate_half - rate) / 3
};

namespace detail {

inline void require_flat_collar(const DoubleGraphSurface& s, const VerticalField& v, double delta_cut) {
  const auto& g = s.region->grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.region->inside(k) || s.region->dist(k) > delta_cut) continue;
    if (norm(v.gradient(g.center(k))) > 1e-12)
      throw Error("support-violation", "field gradient does not vanish on the boundary collar");
  }
}

} // namespace detail

// Central differences of the area functional along the deformation. The
// collar R \ R_{delta_cut} must be untouched by grad v.
inline FirstVariationFD first_variation_fd(const DoubleGraphSurface& s, const VerticalField& v, double h_t = 1e-3,
                                           double delta_cut = -1.0) {
  if (!(h_t > 0)) throw Error("invalid-step", "h_t must be positive");
  if (delta_cut <= 0) delta_cut = 2.0 * s.h();
  detail::require_flat_collar(s, v, delta_cut);
  FirstVariationFD r;
  r.h_t = h_t;
  r.delta_cut = delta_cut;
  // The core integrand is evaluated directly from cached gradients: S(t) is
  // sum_cells sum_i sqrt(1 + |grad f_i + t grad v|^2) h^n + collar + S^.
  const auto mask = erode(*s.region, delta_cut).mask;
  const auto& g = mask.grid;
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (mask[k]) cells.push_back(k);
  std::vector<Vec2> g1(cells.size()), g2(cells.size()), gv(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Vec2 x = g.center(cells[i]);
    g1[i] = s.gradient(Side::upper, x);
    g2[i] = s.gradient(Side::lower, x);
    gv[i] = v.gradient(x);
  });
  const double fixed = area(s, delta_cut).collar + s.hat_area;
  auto S = [&](double t) {
    double sum = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i)
      sum += std::sqrt(1.0 + norm2(g1[i] + t * gv[i])) + std::sqrt(1.0 + norm2(g2[i] + t * gv[i]));
    return sum * g.cell_measure() + fixed;
  };
  for (double t : {-2 * h_t, -h_t, -0.5 * h_t, 0.0, 0.5 * h_t, h_t, 2 * h_t}) r.samples.push_back({t, S(t)});
  r.rate = (r.samples[5].second - r.samples[1].second) / (2 * h_t);
  r.rate_half = (r.samples[4].second - r.samples[2].second) / h_t;
  r.richardson = (4 * r.rate_half - r.rate) / 3;
  return r;
}

// int v (H_sum_upper - H_sum_lower) dx' over cells with boundary distance > 2h.
// This equals dS/dt for the artifact's sphere-positive convention.
inline double first_variation_analytic(const DoubleGraphSurface& s, const VerticalField& v) {
  const auto& g = s.region->grid();
  const double rim = 2.0 * s.h();
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.region->inside(k)) continue;
    const double val = v.value(g.center(k));
    if (s.region->dist(k) <= rim) {
      if (std::abs(val) > 1e-12) throw Error("support-violation", "field does not vanish within 2h of the boundary");
      continue;
    }
    if (val != 0.0) cells.push_back(k);
  }
  std::vector<double> terms(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const Vec2 x = g.center(cells[i]);
    const auto c = mean_curvature_pair(s, x);
    terms[i] = v.value(x) * (c.H_sum_upper - c.H_sum_lower);
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum * g.cell_measure();
}

// ---- the I = I1 + I2 split ----

struct FValue {
  double F = 0.0;
  double lower_bound = 0.0;  // (1 + (|q1| + |q2|)^2)^{-3/2} |q1 - q2|^2
  Vec2 q1, q2;
};

// F = sum_i grad f_i . grad(f1 + f2) / W_i with q1 = grad f1, q2 = -grad f2.
inline FValue F_field(const DoubleGraphSurface& s, Vec2 x) {
  const Vec2 g1 = s.gradient(Side::upper, x), g2 = s.gradient(Side::lower, x);
  const Vec2 gs = g1 + g2;
  FValue out;
  out.F = dot(g1, gs) / std::sqrt(1 + norm2(g1)) + dot(g2, gs) / std::sqrt(1 + norm2(g2));
  out.q1 = g1;
  out.q2 = -1.0 * g2;
  const double b = norm(out.q1) + norm(out.q2);
  out.lower_bound = std::pow(1 + b * b, -1.5) * norm2(out.q1 - out.q2);
  return out;
}

struct HessianA {
  Mat2 H;
  double lambda_min = 0.0;
  double bound = 0.0;  // (1 + |q|^2)^{-3/2}
};

// Hessian of A(q) = sqrt(1 + |q|^2).
inline HessianA hessian_A(Vec2 q) {
  const double w = 1 + norm2(q);
  const double c = std::pow(w, -1.5);
  HessianA r;
  r.H = {c * (w - q.x * q.x), -c * q.x * q.y, c * (w - q.y * q.y)};
  r.lambda_min = eigenvalues(r.H).first;
  r.bound = c;
  return r;
}

struct Decomposition {
  double delta = 0.0;
  double I = 0.0;       // direct quadrature of sum_i grad f_i . grad v / W_i
  double I1 = 0.0;      // int F phi
  double I2 = 0.0;      // collar term
  double split_error = 0.0;
  double F_min = 0.0;
  double F_integral = 0.0;
  std::size_t support_cells = 0;
  std::size_t collar_cells = 0;
};

inline Decomposition decompose_I(const DoubleGraphSurface& s, const CutoffField& cut) {
  const double delta = cut.delta();
  const double h = s.h();
  if ((delta - delta / 3.0) / h < 3.0) throw Error("collar-resolution", "collar is fewer than 3 cells across");
  const auto& g = s.region->grid();
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (s.region->inside(k) && s.region->dist(k) > delta / 3.0) cells.push_back(k);
  struct Terms {
    double I = 0, I1 = 0, I2 = 0, F = 0, Fphi = 0;
    bool collar = false;
  };
  std::vector<Terms> terms(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    const std::size_t k = cells[i];
    const Vec2 x = g.center(k);
    const Vec2 g1 = s.gradient(Side::upper, x), g2 = s.gradient(Side::lower, x);
    const double w1 = std::sqrt(1 + norm2(g1)), w2 = std::sqrt(1 + norm2(g2));
    const double sum = s.f1.value(x) + s.f2.value(x);
    const double phi = cut.phi(k);
    const Vec2 gphi = cut.grad(k);
    const Vec2 gs = g1 + g2;
    const Vec2 gv = phi * gs + sum * gphi;
    auto& t = terms[i];
    t.F = dot(g1, gs) / w1 + dot(g2, gs) / w2;
    t.I = dot(g1, gv) / w1 + dot(g2, gv) / w2;
    t.I1 = t.F * phi;
    t.I2 = (dot(g1, gphi) / w1 + dot(g2, gphi) / w2) * sum;
    t.collar = s.region->dist(k) <= delta;
  });
  Decomposition d;
  d.delta = delta;
  d.support_cells = cells.size();
  d.F_min = std::numeric_limits<double>::infinity();
  const double cm = g.cell_measure();
  for (const auto& t : terms) {
    d.I += t.I * cm;
    d.I1 += t.I1 * cm;
    if (t.collar) {
      d.I2 += t.I2 * cm;
      ++d.collar_cells;
    }
    d.F_min = std::min(d.F_min, t.F);
    d.F_integral += t.F * cm;
  }
  if (cells.empty()) d.F_min = 0.0;
  d.split_error = std::abs(d.I - (d.I1 + d.I2));
  return d;
}

inline Decomposition decompose_I(const DoubleGraphSurface& s, double delta) {
  return decompose_I(s, build_cutoff(*s.region, delta));
}

// ---- Claim 1 ----

struct Claim1 {
  double a0 = 0.0;
  Vec2 xbar;
  double eps = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double ball_measure = 0.0;  // cell count times h^n
  std::size_t ball_cells = 0;
  double delta = 0.0;
  double I1 = 0.0;  // direct quadrature of int F phi_delta
  bool holds = false;
};

// xbar maximises |grad(f1 + f2)| over R_0.2; b1 is half that maximum; eps is
// the largest multiple of h for which the closed ball B_eps(xbar) lies in
// R_delta and keeps |grad(f1 + f2)| >= b1; b2 bounds |grad f1| + |grad f2| on it.
inline Claim1 claim1_bound(const DoubleGraphSurface& s, double delta) {
  const auto& g = s.region->grid();
  const double h = s.h();
  double best = -1.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.region->inside(k) || s.region->dist(k) <= 0.2) continue;
    const Vec2 x = g.center(k);
    const double m = norm(s.gradient(Side::upper, x) + s.gradient(Side::lower, x));
    if (m > best) best = m, arg = k;
  }
  if (best <= 10.0 * h) throw Error("symmetric-surface", "f1 + f2 is constant at grid resolution");
  Claim1 c;
  c.delta = delta;
  c.xbar = g.center(arg);
  c.b1 = 0.5 * best;
  // Grow the ball one cell at a time until a cell breaks a bound.
  const int i0 = g.col(arg), j0 = g.row(arg);
  const int maxr = std::max(g.nx, g.ny);
  int good = -1;
  for (int rr = 0; rr <= maxr; ++rr) {
    bool ok = true;
    double b2 = 0.0;
    std::size_t count = 0;
    for (int j = g.dim == 2 ? j0 - rr : 0; ok && j <= (g.dim == 2 ? j0 + rr : 0); ++j)
      for (int i = i0 - rr; i <= i0 + rr; ++i) {
        const double d2 = double(i - i0) * (i - i0) + double(j - j0) * (j - j0);
        if (d2 > double(rr) * rr) continue;
        if (i < 0 || j < 0 || i >= g.nx || j >= g.ny) { ok = false; break; }
        const std::size_t k = g.index(i, j);
        if (!s.region->inside(k) || s.region->dist(k) <= delta) { ok = false; break; }
        const Vec2 x = g.center(k);
        const Vec2 g1 = s.gradient(Side::upper, x), g2 = s.gradient(Side::lower, x);
        if (norm(g1 + g2) < c.b1) { ok = false; break; }
        b2 = std::max(b2, norm(g1) + norm(g2));
        ++count;
      }
    if (!ok) break;
    good = rr;
    c.b2 = b2;
    c.ball_cells = count;
  }
  if (good < 0) throw Error("claim1-empty-ball", "xbar is not inside R_delta");
  c.eps = good * h;
  c.ball_measure = c.ball_cells * g.cell_measure();
  c.a0 = std::pow(1 + c.b2 * c.b2, -1.5) * c.b1 * c.b1 * c.ball_measure;
  c.I1 = decompose_I(s, delta).I1;
  c.holds = c.I1 >= c.a0 && c.a0 > 0;
  return c;
}

// ---- Claim 2 ----

struct Claim2Row {
  double delta = 0.0;
  double max_T3 = 0.0;          // max |grad f1 / W1 + grad f2 / W2| over R \ R_delta
  double max_T3_normals = 0.0;  // same via |nu1' - nu2'|
  double max_form_gap = 0.0;
  double bound = 0.0;           // 2 sqrt(2 (rho + r) delta / (rho r))
  Vec2 argmax;
  std::size_t cells = 0;
  bool pass = false;
};

inline double claim2_bound(double rho, double r, double delta) {
  return 2.0 * std::sqrt(2.0 * (rho + r) * delta / (rho * r));
}

inline std::vector<Claim2Row> claim2_check(const DoubleGraphSurface& s, double rho, double r,
                                           const std::vector<double>& deltas) {
  if (!(rho > 0)) throw Error("invalid-parameter", "rho must be positive");
  if (!(r > 0)) throw Error("invalid-parameter", "r must be positive");
  const auto& g = s.region->grid();
  std::vector<Claim2Row> rows;
  for (double delta : deltas) {
    if (!(delta > 0)) throw Error("invalid-delta", "delta must be positive");
    Claim2Row row;
    row.delta = delta;
    row.bound = claim2_bound(rho, r, delta);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!s.region->inside(k) || s.region->dist(k) > delta) continue;
      const Vec2 x = g.center(k);
      const Vec2 g1 = s.gradient(Side::upper, x), g2 = s.gradient(Side::lower, x);
      const double t_sum = norm(g1 / std::sqrt(1 + norm2(g1)) + g2 / std::sqrt(1 + norm2(g2)));
      const auto n1 = outer_normal(s, x, Side::upper), n2 = outer_normal(s, x, Side::lower);
      const double t_nu = norm(n1.nu_prime - n2.nu_prime);
      if (row.cells == 0 || t_sum > row.max_T3) row.max_T3 = t_sum, row.argmax = x;
      row.max_T3_normals = std::max(row.max_T3_normals, t_nu);
      row.max_form_gap = std::max(row.max_form_gap, std::abs(t_sum - t_nu));
      ++row.cells;
    }
    row.pass = row.max_T3 <= row.bound;
    rows.push_back(row);
  }
  return rows;
}

// ---- symmetry ----

struct SymmetryResult {
  bool symmetric = false;
  double midplane = 0.0;  // c0 / 2 when symmetric (mean of (f1 + f2) / 2 otherwise)
  double max_deviation = 0.0;
  Vec2 witness;
  double witness_value = 0.0;  // f1 + f2 at the witness
};

// Symmetric about x_{n+1} = c0 / 2 iff f1 + f2 is constant (within tol) on R_{2h}.
inline SymmetryResult detect_symmetry(const DoubleGraphSurface& s, double tol) {
  const auto& g = s.region->grid();
  std::vector<std::pair<Vec2, double>> vals;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.region->inside(k) || s.region->dist(k) <= 2 * s.h()) continue;
    const Vec2 x = g.center(k);
    vals.push_back({x, s.f1.value(x) + s.f2.value(x)});
  }
  SymmetryResult r;
  if (vals.empty()) throw Error("empty-region", "R_2h is empty");
  double mean = 0.0;
  for (const auto& v : vals) mean += v.second;
  mean /= static_cast<double>(vals.size());
  r.max_deviation = -1.0;
  for (const auto& v : vals) {
    const double d = std::abs(v.second - mean);
    if (d > r.max_deviation) r.max_deviation = d, r.witness = v.first, r.witness_value = v.second;
  }
  r.symmetric = r.max_deviation <= tol;
  r.midplane = 0.5 * mean;
  return r;
}

// A closed curve is symmetric about y = c iff on every vertical line the
// sorted crossings satisfy y_k + y_{m-1-k} = 2c. Lines with tangential
// crossings are skipped.
inline SymmetryResult detect_symmetry(const ClosedCurve& c, double tol, int lines = 401) {
  const auto [lo, hi] = x_extent(c);
  std::vector<std::pair<Vec2, double>> sums;  // (x, y_k), y_k + y_{m-1-k}
  for (int i = 0; i < lines; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / lines;
    const auto L = vertical_crossings(c, x);
    if (!L.tangential.empty()) continue;
    const auto& T = L.transversal;
    for (std::size_t k = 0; k < T.size() / 2; ++k)
      sums.push_back({{x, T[k].y}, T[k].y + T[T.size() - 1 - k].y});
  }
  SymmetryResult r;
  if (sums.empty()) throw Error("empty-region", "no transversal crossings");
  double mean = 0.0;
  for (const auto& v : sums) mean += v.second;
  mean /= static_cast<double>(sums.size());
  r.max_deviation = -1.0;
  for (const auto& v : sums) {
    const double d = 0.5 * std::abs(v.second - mean);
    if (d > r.max_deviation) r.max_deviation = d, r.witness = v.first, r.witness_value = v.second;
  }
  r.symmetric = r.max_deviation <= tol;
  r.midplane = 0.5 * mean;
  return r;
}

} // namespace hyposym
