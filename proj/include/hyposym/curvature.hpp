#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "hyposym/error.hpp"
#include "hyposym/parallel.hpp"
#include "hyposym/surface.hpp"

namespace hyposym {

// Mean curvature at (x', f1(x')) and (x', f2(x')) with respect to the outer
// normal; the unit sphere has H = +1 on both sheets. H_sum is the sum of
// principal curvatures, H = H_sum / n.
struct CurvatureSample {
  Vec2 x;
  double H_upper = 0.0;
  double H_lower = 0.0;
  double H_sum_upper = 0.0;
  double H_sum_lower = 0.0;
};

// div(grad f / W), W = sqrt(1 + |grad f|^2), from the gradient g and Hessian.
inline double graph_divergence(Vec2 g, const Mat2& hs) {
  const double w2 = 1.0 + norm2(g);
  const double w = std::sqrt(w2);
  return trace(hs) / w - dot(g, hs * g) / (w2 * w);
}

inline CurvatureSample mean_curvature_pair(const DoubleGraphSurface& s, Vec2 x) {
  if (!s.region->contains(x)) throw Error("outside-region", "mean curvature requested outside R");
  CurvatureSample c;
  c.x = x;
  c.H_sum_upper = -graph_divergence(s.gradient(Side::upper, x), s.hessian(Side::upper, x));
  c.H_sum_lower = graph_divergence(s.gradient(Side::lower, x), s.hessian(Side::lower, x));
  if (!std::isfinite(c.H_sum_upper) || !std::isfinite(c.H_sum_lower))
    throw Error("derivative-failure", "non-finite curvature");
  const double n = s.dim();
  c.H_upper = c.H_sum_upper / n;
  c.H_lower = c.H_sum_lower / n;
  return c;
}

// Samples at every cell centre with boundary distance > delta.
inline std::vector<CurvatureSample> curvature_samples(const DoubleGraphSurface& s, double delta) {
  const auto& g = s.region->grid();
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (s.region->inside(k) && s.region->dist(k) > delta) cells.push_back(k);
  std::vector<CurvatureSample> out(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) { out[i] = mean_curvature_pair(s, g.center(cells[i])); });
  return out;
}

inline void write_curvature_csv(std::ostream& os, const DoubleGraphSurface& s, double delta) {
  os << "# surface=" << s.label << " h=" << s.h() << " convention=sphere-positive\n";
  os << "x1,x2,f1,f2,nu1_upper,nu2_upper,nu3_upper,nu1_lower,nu2_lower,nu3_lower,H_upper,H_lower\n";
  os.precision(12);
  for (const auto& c : curvature_samples(s, delta)) {
    const Vec2 g1 = s.gradient(Side::upper, c.x), g2 = s.gradient(Side::lower, c.x);
    const double w1 = std::sqrt(1 + norm2(g1)), w2 = std::sqrt(1 + norm2(g2));
    os << c.x.x << ',' << c.x.y << ',' << s.f1.value(c.x) << ',' << s.f2.value(c.x) << ',' << -g1.x / w1 << ','
       << -g1.y / w1 << ',' << 1 / w1 << ',' << g2.x / w2 << ',' << g2.y / w2 << ',' << -1 / w2 << ',' << c.H_upper
       << ',' << c.H_lower << '\n';
  }
}

} // namespace hyposym
