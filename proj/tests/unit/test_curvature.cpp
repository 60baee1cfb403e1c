#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "hyposym/corpus.hpp"
#include "hyposym/curvature.hpp"

using namespace hyposym;
using Catch::Approx;

TEST_CASE("unit sphere has H = 1 on both sheets") {
  const auto s = make_sphere(1.0, 0.01);
  double worst = 0.0;
  for (const auto& c : curvature_samples(s, 0.1))
    worst = std::max({worst, std::abs(c.H_upper - 1), std::abs(c.H_lower - 1)});
  CHECK(worst <= 1e-6);

  const auto fd = s.without_derivatives();
  double worst_fd = 0.0;
  for (const auto& c : curvature_samples(fd, 0.1))
    worst_fd = std::max({worst_fd, std::abs(c.H_upper - 1), std::abs(c.H_lower - 1)});
  CHECK(worst_fd <= 1e-3);
}

TEST_CASE("finite-difference H within 10 h^2 relative of the analytic H") {
  const auto s = make_sphere(1.0, 0.01);
  const auto fd = s.without_derivatives();
  const auto& g = s.region->grid();
  double worst = 0.0;
  for (std::size_t k = 0; k < g.size(); k += 7) {
    if (s.region->dist(k) <= 0.1) continue;
    const auto a = mean_curvature_pair(s, g.center(k)), b = mean_curvature_pair(fd, g.center(k));
    worst = std::max({worst, std::abs(a.H_upper - b.H_upper) / std::abs(a.H_upper),
                      std::abs(a.H_lower - b.H_lower) / std::abs(a.H_lower)});
  }
  CHECK(worst <= 10 * 0.01 * 0.01);
}

TEST_CASE("torus and ellipsoid reference curvatures") {
  const auto torus = make_torus(2.0, 0.5, 0.01);
  const auto c = mean_curvature_pair(torus, {2.5 - 1e-3, 0});
  CHECK(c.H_upper == Approx(1.2).margin(0.05));
  CHECK(c.H_lower == Approx(1.2).margin(0.05));
  // Top circle: principal curvatures 1/rho and 0.
  CHECK(mean_curvature_pair(torus, {2, 0}).H_upper == Approx(1.0).margin(1e-9));

  const auto e = make_ellipsoid(1.0, 0.5, 0.01);
  CHECK(mean_curvature_pair(e, {0, 0}).H_upper == Approx(0.5).margin(1e-3));
  CHECK(mean_curvature_pair(e, {0, 0}).H_lower == Approx(0.5).margin(1e-3));
}

TEST_CASE("reflection swaps the sheets and translation changes nothing") {
  const auto s = make_perturbed_sphere(0.1, 0.02);
  auto r = s;
  r.f1 = {[f = s.f2](Vec2 x) { return -f.value(x); }, [f = s.f2](Vec2 x) { return -f.gradient(x); },
          [f = s.f2](Vec2 x) { return -1.0 * f.hessian(x); }};
  r.f2 = {[f = s.f1](Vec2 x) { return -f.value(x); }, [f = s.f1](Vec2 x) { return -f.gradient(x); },
          [f = s.f1](Vec2 x) { return -1.0 * f.hessian(x); }};
  const auto t = make_perturbed_sphere(0.1, 0.02, 3.0);
  for (Vec2 x : {Vec2{0, 0}, Vec2{0.4, 0.2}, Vec2{-0.1, 0.8}}) {
    const auto a = mean_curvature_pair(s, x), b = mean_curvature_pair(r, x), c = mean_curvature_pair(t, x);
    CHECK(a.H_upper == b.H_lower);
    CHECK(a.H_lower == b.H_upper);
    CHECK(a.H_upper == c.H_upper);
    CHECK(a.H_lower == c.H_lower);
  }
}

TEST_CASE("divergence identity fixes the signs") {
  // v = bump of radius 0.4 centred at (0.2, -0.1), inside R_0.3 of the unit disk.
  const Vec2 c0{0.2, -0.1};
  const double rad = 0.4;
  auto v = [&](Vec2 x) {
    const double q = norm2(x - c0) / (rad * rad);
    return q < 1 ? std::pow(1 - q, 4) : 0.0;
  };
  auto gv = [&](Vec2 x) {
    const double q = norm2(x - c0) / (rad * rad);
    return q < 1 ? -4 * std::pow(1 - q, 3) * 2.0 / (rad * rad) * (x - c0) : Vec2{};
  };
  const auto s = make_perturbed_sphere(0.1, 0.005);
  const auto& g = s.region->grid();
  double l1 = 0, r1 = 0, l2 = 0, r2 = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec2 x = g.center(k);
    if (!s.region->inside(k) || norm(x - c0) >= rad) continue;
    const Vec2 g1 = s.gradient(Side::upper, x), g2 = s.gradient(Side::lower, x);
    const auto cs = mean_curvature_pair(s, x);
    l1 += dot(g1, gv(x)) / std::sqrt(1 + norm2(g1));
    r1 += v(x) * cs.H_sum_upper;
    l2 += dot(g2, gv(x)) / std::sqrt(1 + norm2(g2));
    r2 += -v(x) * cs.H_sum_lower;
  }
  CHECK(l1 == Approx(r1).epsilon(1e-4));
  CHECK(l2 == Approx(r2).epsilon(1e-4));
}

TEST_CASE("outside points are rejected and CSV dumps carry a header") {
  const auto s = make_sphere(1.0, 0.05);
  CHECK_THROWS_WITH(mean_curvature_pair(s, {2, 0}), Catch::Matchers::StartsWith("outside-region"));
  std::ostringstream os;
  write_curvature_csv(os, s, 0.2);
  CHECK(os.str().rfind("# surface=sphere h=0.05", 0) == 0);
  CHECK(os.str().find("x1,x2,f1,f2") != std::string::npos);
}
