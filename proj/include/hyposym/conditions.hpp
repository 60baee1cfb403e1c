#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "hyposym/curvature.hpp"
#include "hyposym/curve.hpp"
#include "hyposym/error.hpp"
#include "hyposym/grid_region.hpp"
#include "hyposym/parallel.hpp"
#include "hyposym/surface.hpp"

namespace hyposym {

struct Witness {
  std::vector<double> point;   // x' (and y for curves)
  double margin = 0.0;
  std::vector<double> values;  // measured quantities behind the margin
};

// pass <=> worst_margin >= -tolerance. Witnesses are the ten smallest margins,
// ascending.
struct ConditionVerdict {
  std::string id;
  bool pass = false;
  double worst_margin = 0.0;
  double tolerance = 0.0;
  std::vector<Witness> witnesses;
  std::map<std::string, double> params;
  std::vector<std::string> notes;
};

enum class MainAssumptionMode { inequality, equality };

namespace detail {

inline ConditionVerdict make_verdict(std::string id, std::vector<Witness> all, double tol) {
  ConditionVerdict v;
  v.id = std::move(id);
  v.tolerance = tol;
  std::sort(all.begin(), all.end(), [](const Witness& a, const Witness& b) {
    if (a.margin != b.margin) return a.margin < b.margin;
    return a.point < b.point;
  });
  v.worst_margin = all.empty() ? 0.0 : all.front().margin;
  v.pass = v.worst_margin >= -tol;
  all.resize(std::min<std::size_t>(all.size(), 10));
  v.witnesses = std::move(all);
  return v;
}

// Vertices of the convex hull of the inside cell centres (monotone chain).
inline std::vector<Vec2> inside_hull(const GridRegion& region) {
  const auto& g = region.grid();
  std::vector<Vec2> pts;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (region.inside(k)) pts.push_back(g.center(k));
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
  if (pts.size() < 3) return pts;
  auto cross = [](Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); };
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

} // namespace detail

// Double-graph form of the Main Assumption: for x' in R_{delta_eval} the
// vertical segment from (x', f2) to (x', f1) lies in G, so the requirement is
// H_upper <= H_lower. margin = H_lower - H_upper. Equality mode checks
// |margin| <= tol instead. Only the two-sheet configuration is examined.
inline ConditionVerdict check_main_assumption(const DoubleGraphSurface& s, double delta_eval, double tol,
                                              MainAssumptionMode mode = MainAssumptionMode::inequality) {
  if (delta_eval < 2.0 * s.h() * (1 - 1e-12)) throw Error("invalid-delta", "delta_eval must be >= 2h");
  const auto samples = curvature_samples(s, delta_eval);
  std::vector<Witness> all;
  all.reserve(samples.size());
  for (const auto& c : samples) {
    const double m = c.H_lower - c.H_upper;
    const double margin = mode == MainAssumptionMode::equality ? -std::abs(m) : m;
    all.push_back({{c.x.x, c.x.y}, margin, {c.H_upper, c.H_lower}});
  }
  auto v = detail::make_verdict(mode == MainAssumptionMode::equality ? "main_assumption_equality" : "main_assumption",
                                std::move(all), tol);
  v.params = {{"delta_eval", delta_eval}, {"h", s.h()}, {"samples", static_cast<double>(samples.size())}};
  if (s.dim() == 2) v.notes.push_back("two-sheet specialization: only segments from f2 to f1 are compared");
  return v;
}

inline double default_S_tolerance(const GridRegion& region) { return 2.0 * region.h(); }

// For each boundary sample x0 with outward normal nu0:
// margin = -max_{y in R} nu0 . (y - x0).
inline ConditionVerdict check_condition_S(const GridRegion& region, double tol) {
  const auto hull = detail::inside_hull(region);
  const auto& bs = region.boundary();
  std::vector<Witness> all(bs.size());
  parallel_for(bs.size(), [&](std::size_t i) {
    double best = -std::numeric_limits<double>::infinity();
    Vec2 arg;
    for (const Vec2& y : hull) {
      const double d = dot(bs[i].outward, y - bs[i].point);
      if (d > best) {
        best = d;
        arg = y;
      }
    }
    all[i] = {{bs[i].point.x, bs[i].point.y}, -best, {bs[i].outward.x, bs[i].outward.y, arg.x, arg.y}};
  });
  auto v = detail::make_verdict("condition_S", std::move(all), tol);
  v.params = {{"h", region.h()}, {"boundary_samples", static_cast<double>(bs.size())}};
  return v;
}

inline ConditionVerdict check_condition_S(const DoubleGraphSurface& s, double tol) {
  return check_condition_S(*s.region, tol);
}

inline double default_Sprime_tolerance(const GridRegion& region) { return 2.0 * region.h(); }

// The vertical cylinder of radius r through (x0, y) with axis at x0 + r nu0
// misses G iff the open ball B(x0 + r nu0, r) misses R. margin = dist(c, R) - r.
inline ConditionVerdict check_condition_Sprime(const GridRegion& region, double r, double tol) {
  if (!(r > 0)) throw Error("invalid-radius", "r must be positive");
  const auto& bs = region.boundary();
  std::vector<Witness> all(bs.size());
  parallel_for(bs.size(), [&](std::size_t i) {
    const Vec2 c = bs[i].point + r * bs[i].outward;
    const double dist_to_R = -region.signed_distance(c);
    all[i] = {{bs[i].point.x, bs[i].point.y}, dist_to_R - r, {c.x, c.y, dist_to_R}};
  });
  auto v = detail::make_verdict("condition_Sprime", std::move(all), tol);
  v.params = {{"r", r}, {"h", region.h()}};
  return v;
}

inline ConditionVerdict check_condition_Sprime(const DoubleGraphSurface& s, double r, double tol) {
  return check_condition_Sprime(*s.region, r, tol);
}

struct SprimeRadius {
  double radius = 0.0;
  bool capped = false;  // passes at the cap: the S limit
  double cap = 0.0;
};

namespace detail {

template <class Check>
SprimeRadius bisect_Sprime(Check&& passes, double lo, double cap, double accuracy) {
  if (!passes(lo)) throw Error("no-Sprime-radius", "Condition S' fails already at the smallest radius");
  SprimeRadius out;
  out.cap = cap;
  if (passes(cap)) {
    out.radius = cap;
    out.capped = true;
    return out;
  }
  double hi = cap;
  while (hi - lo > accuracy) {
    const double mid = 0.5 * (lo + hi);
    if (passes(mid)) lo = mid;
    else hi = mid;
  }
  out.radius = lo;
  return out;
}

} // namespace detail

// Largest passing r by bisection on [h, diameter], valid because the
// condition only tightens as r grows.
inline SprimeRadius max_Sprime_radius(const GridRegion& region, double tol, double accuracy = -1.0) {
  if (accuracy <= 0) accuracy = 0.25 * region.h();
  return detail::bisect_Sprime([&](double r) { return check_condition_Sprime(region, r, tol).pass; }, region.h(),
                               region.diameter(), accuracy);
}

inline SprimeRadius max_Sprime_radius(const DoubleGraphSurface& s, double tol, double accuracy = -1.0) {
  return max_Sprime_radius(*s.region, tol, accuracy);
}

// ---- plane curves ----

inline std::vector<double> sample_lines(const ClosedCurve& c, int lines) {
  const auto [lo, hi] = x_extent(c);
  std::vector<double> xs(lines);
  for (int i = 0; i < lines; ++i) xs[i] = lo + (hi - lo) * (i + 0.5) / lines;
  return xs;
}

// Pairs of consecutive transversal crossings on each sampled vertical line
// whose midpoint is enclosed (winding number != 0). Lower point a, upper b;
// the requirement kappa(b) <= kappa(a) gives margin kappa(a) - kappa(b).
inline ConditionVerdict check_pairwise_main_assumption(const ClosedCurve& c, double tol,
                                                       MainAssumptionMode mode = MainAssumptionMode::equality,
                                                       int lines = 401) {
  const auto poly = c.polyline(2000);
  const auto xs = sample_lines(c, lines);
  std::vector<std::vector<Witness>> per_line(xs.size());
  std::vector<int> tangential(xs.size(), 0);
  parallel_for(xs.size(), [&](std::size_t i) {
    const auto L = vertical_crossings(c, xs[i]);
    tangential[i] = static_cast<int>(L.tangential.size());
    const auto& T = L.transversal;
    for (std::size_t k = 0; k + 1 < T.size(); ++k) {
      const Vec2 mid{xs[i], 0.5 * (T[k].y + T[k + 1].y)};
      if (winding_number(poly, mid) == 0) continue;
      const double ka = curve_curvature(c, T[k].t), kb = curve_curvature(c, T[k + 1].t);
      const double margin = mode == MainAssumptionMode::equality ? -std::abs(ka - kb) : ka - kb;
      per_line[i].push_back({{xs[i], T[k].y, T[k + 1].y}, margin, {ka, kb}});
    }
  });
  std::vector<Witness> all;
  int pairs = 0, skipped = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pairs += static_cast<int>(per_line[i].size());
    skipped += tangential[i];
    all.insert(all.end(), per_line[i].begin(), per_line[i].end());
  }
  auto v = detail::make_verdict(
      mode == MainAssumptionMode::equality ? "pairwise_main_assumption_equality" : "pairwise_main_assumption",
      std::move(all), tol);
  v.params = {{"lines", static_cast<double>(lines)},
              {"pairs", static_cast<double>(pairs)},
              {"tangential_skipped", static_cast<double>(skipped)}};
  return v;
}

// At each vertical tangent point x0 with horizontal outer normal nu0:
// margin = -max over the curve of nu0_x (x - x0).
inline ConditionVerdict check_condition_S(const ClosedCurve& c, double tol) {
  const auto poly = c.polyline(2000);
  std::vector<Witness> all;
  for (double t : vertical_tangent_params(c)) {
    const Vec2 p = c.point(t);
    const double nx = c.outer_normal(t).x > 0 ? 1.0 : -1.0;
    double best = -std::numeric_limits<double>::infinity();
    for (const Vec2& q : poly) best = std::max(best, nx * (q.x - p.x));
    all.push_back({{p.x, p.y}, -best, {nx}});
  }
  auto v = detail::make_verdict("condition_S", std::move(all), tol);
  v.params = {{"tangent_points", static_cast<double>(v.witnesses.size())}};
  return v;
}

// Longest enclosed stretch of the vertical line x = x0: the line is cut at
// every crossing (tangential ones included) and each gap is tested at its
// midpoint by winding number.
inline double enclosed_run(const ClosedCurve& c, const std::vector<Vec2>& poly, double x0) {
  const auto L = vertical_crossings(c, x0);
  std::vector<double> ys;
  for (const auto& e : L.transversal) ys.push_back(e.y);
  for (const auto& e : L.tangential) ys.push_back(e.y);
  std::sort(ys.begin(), ys.end());
  double longest = 0.0;
  for (std::size_t k = 0; k + 1 < ys.size(); ++k)
    if (winding_number(poly, {x0, 0.5 * (ys[k] + ys[k + 1])}) != 0) longest = std::max(longest, ys[k + 1] - ys[k]);
  return longest;
}

// n = 1 cylinder: the two lines x = x0 and x = x0 + 2 r nu0_x. margin is minus
// the longest enclosed stretch of either line; gaps shorter than tol count as
// empty.
inline ConditionVerdict check_condition_Sprime(const ClosedCurve& c, double r, double tol) {
  if (!(r > 0)) throw Error("invalid-radius", "r must be positive");
  const auto poly = c.polyline(2000);
  std::vector<Witness> all;
  for (double t : vertical_tangent_params(c)) {
    const Vec2 p = c.point(t);
    const double nx = c.outer_normal(t).x > 0 ? 1.0 : -1.0;
    const double run = std::max(enclosed_run(c, poly, p.x), enclosed_run(c, poly, p.x + 2 * r * nx));
    all.push_back({{p.x, p.y}, -run, {nx, p.x + 2 * r * nx}});
  }
  auto v = detail::make_verdict("condition_Sprime", std::move(all), tol);
  v.params = {{"r", r}};
  return v;
}

inline SprimeRadius max_Sprime_radius(const ClosedCurve& c, double tol, double min_radius, double accuracy) {
  const auto [lo, hi] = x_extent(c);
  return detail::bisect_Sprime([&](double r) { return check_condition_Sprime(c, r, tol).pass; }, min_radius, hi - lo,
                               accuracy);
}

} // namespace hyposym
