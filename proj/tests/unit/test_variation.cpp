#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hyposym/corpus.hpp"
#include "hyposym/variation.hpp"

using namespace hyposym;
using Catch::Approx;

TEST_CASE("mollifier kernel") {
  const auto k = mollifier_kernel(2, 0.1, 0.01);
  CHECK(k.mass() == Approx(1.0).margin(1e-9));
  CHECK(k.eval({0.1, 0.0}) == 0.0);
  CHECK(k.eval({0.08, 0.07}) == 0.0);
  for (std::size_t m = 0; m < k.di.size(); ++m) CHECK(std::hypot(k.di[m], k.dj[m]) * 0.01 < 0.1);
  const auto k2 = mollifier_kernel(2, 0.05, 0.01);
  CHECK(k2.grad_l1() / k.grad_l1() == Approx(2.0).epsilon(0.05));
  CHECK(mollifier_kernel(1, 0.05, 0.01).mass() == Approx(1.0).margin(1e-9));
  CHECK_THROWS_WITH(mollifier_kernel(2, 0.02, 0.01), Catch::Matchers::StartsWith("kernel-underresolved"));
}

TEST_CASE("cutoff contract on the unit disk") {
  const auto s = make_sphere(1, 0.01);
  const auto& R = *s.region;
  double scaled[2];
  int idx = 0;
  for (double delta : {0.3, 0.15}) {
    const auto c = build_cutoff(R, delta);
    const auto& g = R.grid();
    bool ones = true, zeros = true, range = true, grad_support = true;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double d = R.inside(k) ? R.dist(k) : -1.0;
      if (d > delta) ones = ones && c.phi(k) == 1.0 && c.grad(k).x == 0.0 && c.grad(k).y == 0.0;
      if (d <= delta / 3) zeros = zeros && c.phi(k) == 0.0 && norm(c.grad(k)) == 0.0;
      range = range && c.phi(k) >= 0.0 && c.phi(k) <= 1.0;
      if (norm(c.grad(k)) > 0) grad_support = grad_support && d > delta / 3 && d <= delta;
    }
    CHECK(ones);
    CHECK(zeros);
    CHECK(range);
    CHECK(grad_support);
    CHECK_FALSE(c.degenerate());
    scaled[idx++] = c.sup_grad() * delta;
  }
  CHECK(std::abs(scaled[0] - scaled[1]) / scaled[0] < 0.10);
  CHECK_THROWS_WITH(build_cutoff(R, 0.05), Catch::Matchers::StartsWith("delta-too-small"));
  // R_{2 delta / 3} empty: the cutoff vanishes identically.
  const auto empty = build_cutoff(R, 1.6);
  CHECK(empty.degenerate());
  CHECK(empty.sup_grad() == 0.0);
}

TEST_CASE("cutoff values off the grid agree with the cached centres") {
  const auto s = make_sphere(1, 0.01);
  const auto c = build_cutoff(*s.region, 0.3);
  const auto& g = s.region->grid();
  for (std::size_t k = 0; k < g.size(); k += 97) {
    if (!s.region->inside(k)) continue;
    const Vec2 x = g.center(k);
    const Vec2 off{1e-7, 0};
    // A point next to a centre goes through the direct stencil sum.
    CHECK(c.value_at(x + off) == Approx(c.phi(k)).margin(1e-5));
  }
}

TEST_CASE("deformation") {
  const auto s = make_sphere(1, 0.01);
  const auto t0 = deform(s, translation_field(), 0.0);
  CHECK(t0.f1.value({0.3, 0.1}) == s.f1.value({0.3, 0.1}));
  const auto up = deform(s, translation_field(), 0.5);
  CHECK(up.f1.value({0.3, 0.1}) == Approx(s.f1.value({0.3, 0.1}) + 0.5));
  CHECK(area(up, 0.05).total() == Approx(area(s, 0.05).total()).margin(1e-9));

  const auto torus = make_torus(2, 0.5, 0.01);
  const auto sh = build_shear(torus, 0.3);
  const auto d = deform(torus, sh.field, 1e-2);
  for (Vec2 x : {Vec2{2, 0}, Vec2{0, 1.7}, Vec2{-2.3, 0.2}})
    CHECK(d.f1.value(x) - d.f2.value(x) == Approx(torus.f1.value(x) - torus.f2.value(x)).margin(1e-14));
}

TEST_CASE("translation leaves the area unchanged") {
  for (const auto& s : {make_sphere(1, 0.01), make_ellipsoid(1, 0.5, 0.01), make_torus(2, 0.5, 0.01)}) {
    const auto fd = first_variation_fd(s, translation_field());
    INFO(s.label);
    CHECK(std::abs(fd.rate) <= 1e-6 * fd.samples[3].second);
  }
}

TEST_CASE("analytic first variation matches finite differences") {
  const double h = 0.01;
  for (const auto& s : {make_sphere(1, h), make_torus(2, 0.5, h), make_perturbed_sphere(0.1, h)}) {
    for (unsigned seed = 1; seed <= 7; ++seed) {
      const auto v = random_smooth_field(*s.region, 0.1, seed);
      const double fd = first_variation_fd(s, v).rate;
      const double an = first_variation_analytic(s, v);
      INFO(s.label << " seed " << seed << " fd " << fd << " analytic " << an);
      CHECK(std::abs(fd - an) <= std::max(1e-3 * std::abs(fd), 1e-5));
    }
  }
}

TEST_CASE("symmetric surfaces have zero first variation") {
  const auto s = make_sphere(1, 0.01);
  const auto c = build_cutoff(*s.region, 0.3);
  auto cp = std::make_shared<const CutoffField>(c);
  VerticalField v{[cp](Vec2 x) { return cp->value_at(x); }, [cp](Vec2 x) { return cp->gradient_at(x); }, "cutoff"};
  CHECK(first_variation_analytic(s, v) == Approx(0).margin(1e-4));
  CHECK(first_variation_fd(s, v).rate == Approx(0).margin(1e-4));
  CHECK_THROWS_WITH(first_variation_analytic(s, translation_field()), Catch::Matchers::StartsWith("support-violation"));
}

TEST_CASE("shear variation on the perturbed sphere") {
  const auto s = make_perturbed_sphere(0.1, 0.01);
  const auto sh = build_shear(s, 0.3);
  const auto fd = first_variation_fd(s, sh.field);
  CHECK(fd.rate > 0);
  CHECK(fd.richardson == Approx(fd.rate).epsilon(1e-6));
  const auto d = decompose_I(s, *sh.cutoff);
  CHECK(d.I == Approx(fd.rate).epsilon(1e-3));
  CHECK(first_variation_analytic(s, sh.field) == Approx(fd.rate).epsilon(1e-3));
  CHECK(d.split_error <= 1e-8 * (std::abs(d.I1) + std::abs(d.I2) + 1));
  CHECK(d.F_min >= -1e-9);
}

TEST_CASE("decomposition on the sphere vanishes") {
  const auto d = decompose_I(make_sphere(1, 0.01), 0.3);
  CHECK(d.I == Approx(0).margin(1e-4));
  CHECK(d.I1 == Approx(0).margin(1e-4));
}

TEST_CASE("collar term shrinks like sqrt(delta)") {
  // h = 0.008 so that 0.075 >= 9h.
  const auto s = make_perturbed_sphere(0.1, 0.008);
  double worst = 0.0;
  for (double delta : {0.3, 0.15, 0.075}) {
    const auto d = decompose_I(s, delta);
    CHECK(d.I1 > 0);
    worst = std::max(worst, std::abs(d.I2) / std::sqrt(delta));
  }
  CHECK(std::isfinite(worst));
  CHECK(worst < 0.01);
}

TEST_CASE("F and its lower bound") {
  const auto s = make_perturbed_sphere(0.1, 0.01);
  const auto f = F_field(s, {0.5, 0});
  CHECK(f.F >= f.lower_bound);
  CHECK(f.lower_bound > 0);
  CHECK(F_field(s, {0, 0}).F == Approx(0).margin(1e-12));
  const auto sp = make_sphere(1, 0.01);
  CHECK(F_field(sp, {0.3, 0.5}).F == Approx(0).margin(1e-9));

  const auto& g = s.region->grid();
  bool nonneg = true, equality = true;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!s.region->inside(k) || s.region->dist(k) <= 0.02) continue;
    const Vec2 x = g.center(k);
    const auto v = F_field(s, x);
    nonneg = nonneg && v.F >= -1e-9 && v.F >= v.lower_bound - 1e-12;
    if (norm(v.q1 - v.q2) <= 1e-3) equality = equality && v.F <= 1e-6;
  }
  CHECK(nonneg);
  CHECK(equality);
}

TEST_CASE("Hessian of the area integrand") {
  auto h0 = hessian_A({0, 0});
  CHECK(h0.lambda_min == Approx(1.0));
  CHECK(h0.bound == Approx(1.0));
  auto h1 = hessian_A({1, 0});
  CHECK(h1.lambda_min == Approx(std::pow(2.0, -1.5)));
  CHECK(h1.lambda_min == Approx(h1.bound));
  // Eigenvector along q: H q = bound * q.
  const Vec2 hq = h1.H * Vec2{1, 0};
  CHECK(hq.x == Approx(h1.bound));
  CHECK(hq.y == Approx(0).margin(1e-15));

  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> ang(0, 2 * M_PI), rad(0, 10);
  bool ok = true;
  for (int i = 0; i < 1000; ++i) {
    const double a = ang(rng), r = rad(rng);
    const auto hh = hessian_A({r * std::cos(a), r * std::sin(a)});
    ok = ok && hh.lambda_min >= hh.bound - 1e-12 && hh.lambda_min > 0;
  }
  CHECK(ok);
}

TEST_CASE("Claim 1 lower bound") {
  const auto s = make_perturbed_sphere(0.1, 0.01);
  for (double delta : {0.3, 0.15}) {
    const auto c = claim1_bound(s, delta);
    CHECK(c.a0 > 0);
    CHECK(c.I1 >= c.a0);
    CHECK(c.holds);
    CHECK(c.b1 > 0);
    CHECK(c.eps > 0);
  }
  CHECK_THROWS_WITH(claim1_bound(make_sphere(1, 0.02), 0.3), Catch::Matchers::StartsWith("symmetric-surface"));
  CHECK_THROWS_WITH(claim1_bound(make_ellipsoid(1, 0.5, 0.02), 0.3),
                    Catch::Matchers::StartsWith("symmetric-surface"));
}

TEST_CASE("Claim 2 bound") {
  CHECK(claim2_bound(0.5, 1.5, 0.1) == Approx(1.4606).epsilon(1e-4));
  CHECK(claim2_bound(1, 1, 0.01) == Approx(0.4));
  const auto torus = make_torus(2, 0.5, 0.01);
  for (const auto& row : claim2_check(torus, 0.5, 1.5, {0.2, 0.1, 0.05})) {
    CHECK(row.pass);
    CHECK(row.max_form_gap <= 1e-9);
    CHECK(row.cells > 0);
  }
  const auto sphere = make_sphere(1, 0.01);
  const auto rows = claim2_check(sphere, 1, 1, {0.01});
  CHECK(rows[0].max_T3 <= rows[0].bound);
  CHECK(rows[0].max_T3 == Approx(0).margin(1e-12));
  CHECK_THROWS_WITH(claim2_check(sphere, 0, 1, {0.1}), Catch::Matchers::StartsWith("invalid-parameter"));
}

TEST_CASE("Claim 2 quantity decays at least like sqrt(delta) on an asymmetric surface") {
  const auto s = make_perturbed_sphere(0.1, 0.005);
  const auto rows = claim2_check(s, 0.5, 1.0, {0.2, 0.1, 0.05});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].max_T3 <= rows[i - 1].max_T3);
    CHECK(rows[i].max_T3 / rows[i - 1].max_T3 <= 1 / std::sqrt(2.0) + 0.1);
  }
}

TEST_CASE("symmetry detection") {
  auto r = detect_symmetry(make_sphere(1, 0.01), 1e-6);
  CHECK(r.symmetric);
  CHECK(r.midplane == Approx(0).margin(1e-12));
  r = detect_symmetry(make_sphere(1, 0.01, 3.0), 1e-6);
  CHECK(r.symmetric);
  CHECK(r.midplane == Approx(3.0));
  r = detect_symmetry(make_perturbed_sphere(0.1, 0.01), 1e-6);
  CHECK_FALSE(r.symmetric);
  CHECK(norm(r.witness) <= 0.01);
  CHECK(r.witness_value == Approx(0.1).margin(1e-4));

  CHECK(detect_symmetry(make_ellipse_curve(1.5, 0.7), 1e-9).symmetric);
  const auto tube = detect_symmetry(make_slanted_tube(), 1e-3);
  CHECK_FALSE(tube.symmetric);
  CHECK(tube.max_deviation > 0.1);
}
