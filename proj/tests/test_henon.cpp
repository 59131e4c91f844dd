#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "henlab/henon.hpp"

using namespace henlab;

namespace {
const double kPi = std::numbers::pi;

// P(y) = y^2, delta = 1: the standing small fixture. Self-inverse in the
// sense that inverse_form() has the same coefficients.
HenonMap quad() { return HenonMap({0.0, 0.0, 1.0}, 1.0); }

HenonMap random_map(SplitMix64& rng) {
  const int d = 2 + static_cast<int>(rng.next_below(2));
  std::vector<Complex> c(d + 1);
  for (auto& ci : c) ci = Complex(rng.next_in(-2, 2), rng.next_in(-2, 2));
  if (std::abs(c.back()) < 0.25) c.back() += Complex(1.0);
  const double arg = rng.next_in(0, 2 * kPi);
  const double mod = rng.next_in(0.1, 2.0);
  return HenonMap(std::move(c), std::polar(mod, arg));
}

Point2 random_bidisk_point(SplitMix64& rng, double r) {
  return {Complex(rng.next_in(-r, r), rng.next_in(-r, r)),
          Complex(rng.next_in(-r, r), rng.next_in(-r, r))};
}
}  // namespace

TEST_CASE("constructor rejects degenerate data") {
  CHECK_THROWS_AS(HenonMap({0.0, 1.0}, 1.0), std::invalid_argument);        // degree 1
  CHECK_THROWS_AS(HenonMap({1.0, 1.0, 0.0}, 1.0), std::invalid_argument);   // leading zero
  CHECK_THROWS_AS(HenonMap({0.0, 0.0, 1.0}, 0.0), std::invalid_argument);   // delta zero
}

TEST_CASE("forward and inverse formulas on hand values") {
  const HenonMap m = quad();
  const Point2 a = apply(m, {0.0, 5.0});
  CHECK(a.x == Complex(5.0));
  CHECK(a.y == Complex(25.0));

  const Point2 b = apply_inverse(m, {5.0, 0.0});
  CHECK(b.x == Complex(25.0));
  CHECK(b.y == Complex(5.0));

  // (0,0) is a fixed point of h and of h^{-1}.
  CHECK(norm(apply(m, {0.0, 0.0})) == 0.0);
  CHECK(norm(apply_inverse(m, {0.0, 0.0})) == 0.0);
}

TEST_CASE("h^{-1} h = id to 1e-9 over random maps and points") {
  SplitMix64 rng(21);
  for (int k = 0; k < 10; ++k) {
    const HenonMap m = random_map(rng);
    for (int i = 0; i < 10000; ++i) {
      const Point2 z = random_bidisk_point(rng, 10.0);
      const Point2 back = apply_inverse(m, apply(m, z));
      const Point2 fwd = apply(m, apply_inverse(m, z));
      CHECK(norm({back.x - z.x, back.y - z.y}) < 1e-9);
      CHECK(norm({fwd.x - z.x, fwd.y - z.y}) < 1e-9);
    }
  }
}

TEST_CASE("inverse_form conjugated by the swap is the inverse") {
  SplitMix64 rng(22);
  const HenonMap m = random_map(rng);
  const HenonMap k = m.inverse_form();
  for (int i = 0; i < 1000; ++i) {
    const Point2 z = random_bidisk_point(rng, 5.0);
    const Point2 direct = apply_inverse(m, z);
    const Point2 sw = apply(k, {z.y, z.x});
    CHECK(std::abs(Complex(sw.y - direct.x)) < 1e-9);
    CHECK(std::abs(Complex(sw.x - direct.y)) < 1e-9);
  }
}

TEST_CASE("overflow raises instead of propagating non-finite values") {
  const HenonMap m = quad();
  CHECK_THROWS_AS(apply(m, {0.0, 1e200}), EscapeOverflow);
}

TEST_CASE("projective extension agrees with the affine map") {
  SplitMix64 rng(23);
  for (int k = 0; k < 5; ++k) {
    const HenonMap m = random_map(rng);
    for (int i = 0; i < 2000; ++i) {
      const Point2 z = random_bidisk_point(rng, 1000.0);
      const auto img = apply_projective(m, make_proj(z.x, z.y, 1.0));
      REQUIRE(img.has_value());
      REQUIRE(std::abs(img->c[2]) > 0.0);
      const Complex ix = img->c[0] / img->c[2], iy = img->c[1] / img->c[2];
      const Point2 direct = apply(m, z);
      const double scale = 1.0 + norm(direct);
      CHECK(std::abs(ix - direct.x) < 1e-9 * scale);
      CHECK(std::abs(iy - direct.y) < 1e-9 * scale);
    }
  }
}

TEST_CASE("the line at infinity collapses to [0:1:0], which is fixed") {
  SplitMix64 rng(24);
  const ProjPoint q = infinity_attractor();
  for (int k = 0; k < 5; ++k) {
    const HenonMap m = random_map(rng);
    for (int i = 0; i < 1000; ++i) {
      // Points [x0 : x1 : 0] away from the indeterminacy point [1:0:0].
      const Complex x1(rng.next_gaussian(), rng.next_gaussian());
      if (std::abs(x1) < 1e-3) continue;
      const auto img =
          apply_projective(m, make_proj(Complex(rng.next_gaussian(), rng.next_gaussian()), x1, 0.0));
      REQUIRE(img.has_value());
      CHECK(*img == q);  // exact: canonical form of (0, c, 0)
    }
    const auto fixed = apply_projective(m, q);
    REQUIRE(fixed.has_value());
    CHECK(*fixed == q);
  }
}

TEST_CASE("indeterminacy point detection") {
  const HenonMap m = quad();
  CHECK(!apply_projective(m, indeterminacy_point()).has_value());
  // A canonical point within 1e-15 of [1:0:0] is still flagged.
  CHECK(!apply_projective(m, make_proj(1.0, 1e-15, 1e-15)).has_value());
  // Far from it: a genuine image.
  CHECK(apply_projective(m, make_proj(1.0, 0.5, 0.25)).has_value());
}

TEST_CASE("filtration radius oracle values") {
  // P(y)=y^2, delta=1, lambda=2: t^2 - 3t >= 0 exactly from t = 3.
  CHECK(std::abs(filtration_radius(quad(), 2.0).radius - 3.0) < 1e-9);
  // delta = 2 shifts the root to 4.
  CHECK(std::abs(filtration_radius(HenonMap({0.0, 0.0, 1.0}, 2.0), 2.0).radius - 4.0) < 1e-9);
  // lambda = 0 keeps only the delta drag: root at 1.
  CHECK(std::abs(filtration_radius(quad(), 0.0).radius - 1.0) < 1e-9);
  CHECK_THROWS_AS(filtration_radius(quad(), -1.0), std::invalid_argument);

  // The defining inequality holds at R and fails slightly below it.
  SplitMix64 rng(25);
  for (int k = 0; k < 20; ++k) {
    const HenonMap m = random_map(rng);
    const double lambda = rng.next_in(0.0, 4.0);
    const double r = filtration_radius(m, lambda).radius;
    const auto& c = m.coefficients();
    const auto value = [&](double t) {
      double v = std::abs(c.back());
      for (int i = m.degree() - 1; i >= 0; --i) v = v * t - std::abs(c[i]);
      return v - (std::abs(m.delta()) + lambda) * t;
    };
    CHECK(value(r) >= -1e-7 * (1.0 + std::abs(value(r))));
    CHECK(value(r * (1.0 - 1e-6)) < value(r));
    for (int j = 0; j < 50; ++j) CHECK(value(r * rng.next_in(1.0, 100.0)) >= -1e-9);
  }
}

TEST_CASE("region classification and the tie rule") {
  const Filtration f = filtration_radius(quad(), 2.0);
  CHECK(classify_region(f, {0.0, 5.0}) == Region::VMinus);
  CHECK(classify_region(f, {5.0, 0.0}) == Region::VPlus);
  CHECK(classify_region(f, {1.0, 1.0}) == Region::V);
  CHECK(classify_region(f, {3.0, 3.0}) == Region::V);       // boundary belongs to V
  CHECK(classify_region(f, {4.0, 4.0}) == Region::VMinus);  // tie goes to VMinus
}

TEST_CASE("VMinus is forward invariant with doubling; VPlus backward") {
  SplitMix64 rng(26);
  for (int k = 0; k < 10; ++k) {
    const HenonMap m = random_map(rng);
    const Filtration f = certified_filtration(m, 2.0);
    const double r = f.radius;
    for (int i = 0; i < 1000; ++i) {
      // VMinus sample: |y| > R, |x| <= |y|.
      const double ay = r * std::exp(rng.next_in(1e-6, std::log(1e4)));
      const Complex y = std::polar(ay, rng.next_in(0, 2 * kPi));
      const Complex x = std::polar(ay * rng.next_double(), rng.next_in(0, 2 * kPi));
      const Point2 img = apply(m, {x, y});
      CHECK(classify_region(f, img) == Region::VMinus);
      CHECK(std::abs(img.y) >= 2.0 * ay * (1.0 - 1e-12));

      // VPlus sample under the inverse.
      const Point2 bimg = apply_inverse(m, {y, x});
      CHECK(classify_region(f, bimg) == Region::VPlus);
      CHECK(std::abs(bimg.x) >= 2.0 * ay * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("diagonal translation conjugates the dynamics") {
  const HenonMap m = quad();
  const HenonMap t = translate_diagonal(m, 100.0);
  // Q(y) = (y - 100)^2 + 200 = y^2 - 200 y + 10200, same delta.
  REQUIRE(t.degree() == 2);
  CHECK(t.coefficients()[0] == Complex(10200.0));
  CHECK(t.coefficients()[1] == Complex(-200.0));
  CHECK(t.coefficients()[2] == Complex(1.0));
  CHECK(t.delta() == Complex(1.0));

  SplitMix64 rng(27);
  const Complex a(3.0, -2.0);
  const HenonMap g = translate_diagonal(random_map(rng), a);
  const HenonMap base = translate_diagonal(g, -a);  // translate back
  for (int i = 0; i < 1000; ++i) {
    const Point2 z = random_bidisk_point(rng, 10.0);
    // tau h tau^{-1} evaluated two ways.
    const Point2 lhs = apply(g, z);
    const Point2 inner = apply(base, {z.x - a, z.y - a});
    CHECK(std::abs(lhs.x - (inner.x + a)) < 1e-8 * (1.0 + std::abs(inner.x)));
    CHECK(std::abs(lhs.y - (inner.y + a)) < 1e-8 * (1.0 + std::abs(inner.y)));
  }
  // The translated fixture fixes (100, 100).
  const Point2 fp = apply(t, {100.0, 100.0});
  CHECK(std::abs(fp.x - Complex(100.0)) < 1e-12);
  CHECK(std::abs(fp.y - Complex(100.0)) < 1e-12);
}

TEST_CASE("directions at infinity for the rotated pair") {
  const IndeterminacySet s = indeterminacy_set(kPi / 4);
  CHECK(s.p == make_direction(1.0, 0.0));
  CHECK(s.q == make_direction(0.0, 1.0));
  CHECK(chordal_distance(s.ptilde, make_direction(1.0, -1.0)) < 1e-12);
  CHECK(chordal_distance(s.qtilde, make_direction(1.0, 1.0)) < 1e-12);
  CHECK(s.min_pairwise == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  // Rotations that send one axis onto another are rejected.
  CHECK_THROWS_AS(indeterminacy_set(kPi / 2), std::invalid_argument);
  CHECK_THROWS_AS(indeterminacy_set(kPi), std::invalid_argument);
  CHECK_THROWS_AS(indeterminacy_set(3 * kPi / 2), std::invalid_argument);
  CHECK_THROWS_AS(indeterminacy_set(1e-12), std::invalid_argument);
}

TEST_CASE("group preset validates and h2 is the rotated conjugate") {
  CHECK_THROWS_AS(GroupPreset(quad(), kPi / 2), std::invalid_argument);
  CHECK_THROWS_AS(GroupPreset(quad(), 0.0), std::invalid_argument);
  CHECK_THROWS_AS(GroupPreset(quad(), 7.0), std::invalid_argument);

  const GroupPreset g(quad(), kPi / 4);
  SplitMix64 rng(28);
  for (int i = 0; i < 1000; ++i) {
    const Point2 z = random_bidisk_point(rng, 10.0);
    // h2 h2^{-1} = id.
    const Point2 round = apply_h2(g, apply_h2_inverse(g, z));
    CHECK(norm({round.x - z.x, round.y - z.y}) < 1e-9);
    // Conjugacy: R h2 = h1 R.
    const Point2 lhs = rotate(g.theta, apply_h2(g, z));
    const Point2 rhs = apply(g.map, rotate(g.theta, z));
    CHECK(norm({lhs.x - rhs.x, lhs.y - rhs.y}) < 1e-9 * (1.0 + norm(rhs)));
  }
}
