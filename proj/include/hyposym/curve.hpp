#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hyposym/error.hpp"
#include "hyposym/vec.hpp"

namespace hyposym {

// Smooth arc on a local parameter interval [0, span].
struct CurvePiece {
  double span = 1.0;
  std::function<Vec2(double)> p;
  std::function<Vec2(double)> d1;
  std::function<Vec2(double)> d2;
};

struct CurvePoint {
  Vec2 p;
  Vec2 d1;
  Vec2 d2;
};

// Closed plane curve traversed counter-clockwise, parameter t in [0, period).
// The parameter is not arc length; length() integrates the speed.
class ClosedCurve {
public:
  ClosedCurve() = default;
  ClosedCurve(std::vector<CurvePiece> pieces, std::string label) : pieces_(std::move(pieces)), label_(std::move(label)) {
    double t = 0.0;
    for (const auto& pc : pieces_) {
      starts_.push_back(t);
      t += pc.span;
    }
    period_ = t;
  }

  double period() const { return period_; }
  const std::string& label() const { return label_; }
  const std::vector<CurvePiece>& pieces() const { return pieces_; }
  double piece_start(std::size_t i) const { return starts_[i]; }

  CurvePoint eval(double t) const {
    t = std::fmod(t, period_);
    if (t < 0) t += period_;
    std::size_t i = std::upper_bound(starts_.begin(), starts_.end(), t) - starts_.begin() - 1;
    const double s = std::min(t - starts_[i], pieces_[i].span);
    return {pieces_[i].p(s), pieces_[i].d1(s), pieces_[i].d2(s)};
  }
  Vec2 point(double t) const { return eval(t).p; }

  double length() const {
    using boost::math::quadrature::gauss_kronrod;
    double L = 0.0;
    for (const auto& pc : pieces_)
      L += gauss_kronrod<double, 31>::integrate([&](double s) { return norm(pc.d1(s)); }, 0.0, pc.span, 10, 1e-12);
    return L;
  }

  // Outer unit normal (y', -x') / |v| for a counter-clockwise curve.
  Vec2 outer_normal(double t) const {
    const auto c = eval(t);
    return normalized(Vec2{c.d1.y, -c.d1.x});
  }

  // Vertices sampled uniformly in parameter, per piece, without duplicates.
  std::vector<Vec2> polyline(int per_piece = 400) const {
    std::vector<Vec2> out;
    for (const auto& pc : pieces_)
      for (int k = 0; k < per_piece; ++k) out.push_back(pc.p(pc.span * k / per_piece));
    return out;
  }

private:
  std::vector<CurvePiece> pieces_;
  std::vector<double> starts_;
  double period_ = 0.0;
  std::string label_;
};

// Signed curvature (x'y'' - y'x'') / |v|^3, positive on a convex
// counter-clockwise curve.
inline double curve_curvature(const ClosedCurve& c, double t) {
  const auto e = c.eval(t);
  const double sp = norm(e.d1);
  return (e.d1.x * e.d2.y - e.d1.y * e.d2.x) / (sp * sp * sp);
}

inline ClosedCurve make_ellipse_curve(double a, double c, std::string label = "ellipse") {
  if (!(a > 0) || !(c > 0)) throw Error("invalid-parameter", "ellipse semi-axes must be positive");
  CurvePiece pc;
  pc.span = 2 * std::numbers::pi;
  pc.p = [a, c](double s) { return Vec2{a * std::cos(s), c * std::sin(s)}; };
  pc.d1 = [a, c](double s) { return Vec2{-a * std::sin(s), c * std::cos(s)}; };
  pc.d2 = [a, c](double s) { return Vec2{-a * std::cos(s), -c * std::sin(s)}; };
  return ClosedCurve({pc}, std::move(label));
}

inline ClosedCurve make_circle_curve(double r) { return make_ellipse_curve(r, r, "circle"); }

// One lobe of the stepped tube: the arc v in [-1, 1] ->
//   (x_cap + extent * psi(v^2), mid + Y(v)),  psi(w) = 1 - (1-w)^4 (1 + a w),
// with Y odd. v < 0 is the lower sheet, v > 0 the upper one, v = 0 the cap tip.
// Mirror symmetry about y = mid gives equal curvature at equal x on the two
// sheets. At v = +-1 the tangent is vertical and x - x_cap - extent vanishes to
// fourth order, so lobes glue with a flat inflection.
struct LobeSpec {
  double x_cap = 0.0;
  double extent = 1.0;  // signed: x at the far end is x_cap + extent
  double a = 2.0;       // 0 <= a < 4 keeps x monotone in |v|
  double mid = 0.0;
  std::vector<double> y_odd;  // Y(v) = sum_k y_odd[k] v^(2k+1)
  // Optional horizontal segments of this length inserted on both sheets at
  // |v| = u_flat, where Y' and Y'' must vanish. The cap side is pushed away
  // from the far end.
  double u_flat = 0.0;
  double flat_length = 0.0;
};

namespace detail {

struct Lobe {
  LobeSpec s;

  double Y(double v, int der) const {
    double r = 0.0;
    for (std::size_t k = 0; k < s.y_odd.size(); ++k) {
      const int p = 2 * static_cast<int>(k) + 1;
      if (der == 0) r += s.y_odd[k] * std::pow(v, p);
      else if (der == 1) r += s.y_odd[k] * p * std::pow(v, p - 1);
      else if (p >= 2) r += s.y_odd[k] * p * (p - 1) * std::pow(v, p - 2);
    }
    return r;
  }
  double psi(double w, int der) const {
    const double a = s.a, q = 1 - w;
    if (der == 0) return 1 - q * q * q * q * (1 + a * w);
    if (der == 1) return q * q * q * (4 - a + 5 * a * w);
    return q * q * (8 * a - 12 - 20 * a * w);
  }
  double shift(double v) const {
    if (s.flat_length <= 0 || std::abs(v) >= s.u_flat) return 0.0;
    return s.extent > 0 ? -s.flat_length : s.flat_length;
  }
  Vec2 p(double v) const { return {s.x_cap + shift(v) + s.extent * psi(v * v, 0), s.mid + Y(v, 0)}; }
  Vec2 d1(double v) const { return {s.extent * psi(v * v, 1) * 2 * v, Y(v, 1)}; }
  Vec2 d2(double v) const {
    return {s.extent * (psi(v * v, 2) * 4 * v * v + 2 * psi(v * v, 1)), Y(v, 2)};
  }
};

inline CurvePiece lobe_arc(const Lobe& L, double v0, double v1, double shift) {
  // v1 may be less than v0; the piece then runs backwards.
  const double dir = v1 > v0 ? 1.0 : -1.0;
  CurvePiece pc;
  pc.span = std::abs(v1 - v0);
  pc.p = [L, v0, dir, shift](double s) { return L.p(v0 + dir * s) + Vec2{shift, 0} - Vec2{L.shift(v0 + dir * s), 0}; };
  pc.d1 = [L, v0, dir](double s) { return dir * L.d1(v0 + dir * s); };
  pc.d2 = [L, v0, dir](double s) { return L.d2(v0 + dir * s); };
  return pc;
}

inline CurvePiece segment(Vec2 from, Vec2 to) {
  CurvePiece pc;
  pc.span = 1.0;
  pc.p = [from, to](double s) { return from + s * (to - from); };
  pc.d1 = [from, to](double) { return to - from; };
  pc.d2 = [](double) { return Vec2{}; };
  return pc;
}

// Pieces of a lobe from v = v_from to v = -v_from (v_from = -1 or +1).
inline std::vector<CurvePiece> lobe_pieces(const LobeSpec& spec, double v_from) {
  Lobe L{spec};
  std::vector<CurvePiece> out;
  if (spec.flat_length <= 0) {
    out.push_back(lobe_arc(L, v_from, -v_from, 0.0));
    return out;
  }
  const double u = spec.u_flat, sh = spec.extent > 0 ? -spec.flat_length : spec.flat_length;
  const double sgn = v_from < 0 ? 1.0 : -1.0;  // direction of travel in v
  const double b0 = -sgn * u, b1 = sgn * u;     // breakpoints in travel order
  const Vec2 q0 = L.p(b0) - Vec2{L.shift(b0), 0}, q1 = L.p(b1) - Vec2{L.shift(b1), 0};
  out.push_back(lobe_arc(L, v_from, b0, 0.0));
  out.push_back(segment(q0, q0 + Vec2{sh, 0}));
  out.push_back(lobe_arc(L, b0, b1, sh));
  out.push_back(segment(q1 + Vec2{sh, 0}, q1));
  out.push_back(lobe_arc(L, b1, -v_from, 0.0));
  return out;
}

} // namespace detail

// Parameters of the stepped tube. Three mirror-symmetric lobes share the line
// x = 0: a left lobe about y = 0 and two right arms about y = -0.3 and y = 0.7
// that meet at (0, 0.4). Every vertical segment inside the enclosed region
// joins the two sheets of one lobe, so curvatures agree pairwise, yet the
// lobes have different midlines and no horizontal line is an axis of symmetry.
inline std::vector<LobeSpec> slanted_tube_lobes(bool straight_stretch = true) {
  LobeSpec left{-1.0, 1.0, 2.0, 0.0, {2.0, -1.0}};
  LobeSpec bottom{2.5, -2.5, 3.4, -0.3, {1.0, -0.3}};
  if (straight_stretch) {
    const double u0 = 0.5, u2 = u0 * u0;
    // Y' = c (v^2 - u0^2)^2, scaled so that Y(1) = 0.7.
    const double c = 0.7 / (0.2 - 2.0 * u2 / 3.0 + u2 * u2);
    bottom.y_odd = {c * u2 * u2, -2.0 * c * u2 / 3.0, c / 5.0};
    bottom.u_flat = u0;
    bottom.flat_length = 1.0;
  }
  LobeSpec top{1.5, -1.5, 3.8, 0.7, {0.35, -0.05}};
  return {left, bottom, top};
}

inline ClosedCurve make_slanted_tube(bool straight_stretch = true) {
  const auto lobes = slanted_tube_lobes(straight_stretch);
  std::vector<CurvePiece> pieces;
  auto add = [&](const std::vector<CurvePiece>& ps) { pieces.insert(pieces.end(), ps.begin(), ps.end()); };
  add(detail::lobe_pieces(lobes[1], -1.0));  // bottom arm: (0,-1) -> right cap -> (0,0.4)
  add(detail::lobe_pieces(lobes[2], -1.0));  // top arm: (0,0.4) -> right cap -> (0,1)
  add(detail::lobe_pieces(lobes[0], +1.0));  // left lobe: (0,1) -> left cap -> (0,-1)
  return ClosedCurve(std::move(pieces), "slanted_tube");
}

// Winding number of the polyline about q.
inline int winding_number(const std::vector<Vec2>& poly, Vec2 q) {
  int w = 0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i], b = poly[(i + 1) % n];
    const double cross = (b.x - a.x) * (q.y - a.y) - (q.x - a.x) * (b.y - a.y);
    if (a.y <= q.y) {
      if (b.y > q.y && cross > 0) ++w;
    } else if (b.y <= q.y && cross < 0) {
      --w;
    }
  }
  return w;
}

struct LineCrossing {
  double t = 0.0;  // curve parameter
  double y = 0.0;
};

struct LineCrossings {
  std::vector<LineCrossing> transversal;  // sorted by y
  std::vector<LineCrossing> tangential;   // sorted by y
};

// Intersections of the curve with the vertical line x = x0. Sign changes of
// x(t) - x0 on a fine parameter sample are bisected on the analytic curve.
// Roots where the unit tangent is within 1e-6 of vertical are reported
// separately as tangential. Touching points without a sign change are not
// reported.
inline LineCrossings vertical_crossings(const ClosedCurve& c, double x0, int per_piece = 400) {
  LineCrossings out;
  const double span_tol = 1e-9;
  for (std::size_t i = 0; i < c.pieces().size(); ++i) {
    const auto& pc = c.pieces()[i];
    const double t0 = c.piece_start(i);
    auto g = [&](double s) { return pc.p(s).x - x0; };
    double sa = 0.0, ga = g(0.0);
    for (int k = 1; k <= per_piece; ++k) {
      const double sb = pc.span * k / per_piece;
      const double gb = g(sb);
      // Sign convention sign(0) = +, so a root exactly at a sample belongs to
      // one interval only.
      if ((ga < 0) != (gb < 0)) {
        double lo = sa, hi = sb, glo = ga;
        for (int it = 0; it < 100 && hi - lo > span_tol * pc.span; ++it) {
          const double mid = 0.5 * (lo + hi), gm = g(mid);
          if ((gm < 0) == (glo < 0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        const double s = gb == 0.0 ? sb : 0.5 * (lo + hi);
        const Vec2 d = pc.d1(s);
        if (std::abs(d.x) <= 1e-6 * norm(d)) {
          out.tangential.push_back({t0 + s, pc.p(s).y});
        } else {
          out.transversal.push_back({t0 + s, pc.p(s).y});
        }
      }
      sa = sb;
      ga = gb;
    }
  }
  auto by_y = [](const LineCrossing& a, const LineCrossing& b) { return a.y < b.y; };
  std::sort(out.transversal.begin(), out.transversal.end(), by_y);
  std::sort(out.tangential.begin(), out.tangential.end(), by_y);
  return out;
}

// Range of x over the curve, from a dense sample.
inline std::pair<double, double> x_extent(const ClosedCurve& c) {
  double lo = 1e300, hi = -1e300;
  for (const Vec2& p : c.polyline(2000)) {
    lo = std::min(lo, p.x);
    hi = std::max(hi, p.x);
  }
  return {lo, hi};
}

// Points where the tangent is vertical (horizontal outer normal), found as
// local minima of |x'| / |v| refined by golden-section search.
inline std::vector<double> vertical_tangent_params(const ClosedCurve& c, int per_piece = 400) {
  std::vector<double> out;
  for (std::size_t i = 0; i < c.pieces().size(); ++i) {
    const auto& pc = c.pieces()[i];
    auto q = [&](double s) {
      const Vec2 d = pc.d1(s);
      return std::abs(d.x) / norm(d);
    };
    std::vector<double> vals(per_piece + 1);
    for (int k = 0; k <= per_piece; ++k) vals[k] = q(pc.span * k / per_piece);
    for (int k = 0; k <= per_piece; ++k) {
      const bool left_ok = k == 0 || vals[k] < vals[k - 1];
      const bool right_ok = k == per_piece || vals[k] <= vals[k + 1];
      if (!(left_ok && right_ok)) continue;
      double lo = pc.span * std::max(0, k - 1) / per_piece, hi = pc.span * std::min(per_piece, k + 1) / per_piece;
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      for (int it = 0; it < 80; ++it) {
        const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
        if (q(m1) < q(m2)) hi = m2;
        else lo = m1;
      }
      const double s = 0.5 * (lo + hi);
      if (q(s) > 1e-6) continue;
      const double t = c.piece_start(i) + s;
      const bool dup = std::any_of(out.begin(), out.end(), [&](double u) {
        const double d = std::abs(u - t);
        return std::min(d, c.period() - d) < 1e-6;
      });
      if (!dup) out.push_back(t);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace hyposym
