#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "henlab/measure.hpp"

using namespace henlab;

namespace {
const double kPi = std::numbers::pi;

HenonMap quad() { return HenonMap({0.0, 0.0, 1.0}, 1.0); }
GeneratorSystem fixture_system() { return GeneratorSystem::rotation(GroupPreset(quad(), kPi / 4)); }

// nu concentrated on h1 up to a vanishing remainder, for chains that should
// reproduce deterministic h1 orbits.
WalkMeasure nearly_h1() {
  const double eps = 1e-9;
  return WalkMeasure({1.0 - 3.0 * eps, eps, eps, eps});
}

HistogramBox origin_box(double half_width) { return {{0.0, 0.0}, half_width}; }
}  // namespace

TEST_CASE("simulate_chain: zero steps, and the degenerate-weight orbit") {
  const GeneratorSystem sys = fixture_system();

  const Trajectory still = simulate_chain(sys, WalkMeasure::uniform(), {1.0, -2.0}, 0, 99);
  CHECK(still.points.size() == 1);
  CHECK(still.points[0].x == Complex(1.0));
  CHECK(still.points[0].y == Complex(-2.0));
  CHECK(still.letters.empty());
  CHECK(still.escaped_at == -1);

  // Weights nearly a point mass on h1: the chain retraces the h1 orbit of
  // (0,5) and certifies escape at step 4 with guard 1e6.
  const Trajectory chain = simulate_chain(sys, nearly_h1(), {0.0, 5.0}, 10, 7, 1e6);
  const std::vector<Generator> all_h1(10, Generator::H1);
  const Trajectory direct = orbit(sys, all_h1, {0.0, 5.0}, 1e6);
  REQUIRE(chain.points.size() == direct.points.size());
  for (std::size_t i = 0; i < chain.points.size(); ++i) {
    CHECK(chain.points[i].x == direct.points[i].x);
    CHECK(chain.points[i].y == direct.points[i].y);
  }
  CHECK(chain.escaped_at == 4);
  CHECK(chain.escape_certified);

  CHECK_THROWS_AS(simulate_chain(sys, WalkMeasure::uniform(), {0.0, 0.0}, -1, 0),
                  std::invalid_argument);
}

TEST_CASE("chains started on the collar escape in at least 99% of runs") {
  const GeneratorSystem sys = fixture_system();
  const IndeterminacySet dirs = indeterminacy_set(kPi / 4);
  const CollarParams cp{100.0, 0.2};
  const WalkMeasure nu = WalkMeasure::uniform();

  const int chains = 10000;
  int escaped = 0;
  for (int t = 0; t < chains; ++t) {
    SplitMix64 rng = substream(4242, static_cast<std::uint64_t>(t));
    const Point2 start = sample_in_collar(dirs, cp, rng);
    const Trajectory traj = simulate_chain(sys, nu, start, 200, 777 + static_cast<std::uint64_t>(t));
    if (traj.escaped_at >= 0) ++escaped;
  }
  CHECK(escaped >= static_cast<int>(0.99 * chains));
}

TEST_CASE("grid histogram: cells, boundaries, and the escaped bucket") {
  const HistogramBox box{{Complex(0.5, -1.0), Complex(2.0, 0.25)}, 2.0};
  GridHistogram h(box, 4);

  // Low corner is inside (half-open cells), the high corner is not.
  const Point2 low{{-1.5, -3.0}, {0.0, -1.75}};
  const Point2 high{{2.5, 1.0}, {4.0, 2.25}};
  REQUIRE(h.cell_index(low).has_value());
  CHECK(*h.cell_index(low) == 0);
  CHECK(!h.cell_index(high).has_value());

  // Center-of-cell round trip on every cell.
  for (std::size_t idx = 0; idx < h.counts().size(); ++idx) {
    auto back = h.cell_index(h.cell_center(idx));
    REQUIRE(back.has_value());
    CHECK(*back == idx);
  }

  h.add(low);
  h.add(high);
  CHECK(h.counts()[0] == 1);
  CHECK(h.escaped() == 1);
  CHECK(h.total() == 2);
  h.add_escaped(3);
  CHECK(h.escaped() == 4);
  CHECK(h.total() == 5);

  CHECK_THROWS_AS(GridHistogram(box, 0), std::invalid_argument);
  CHECK_THROWS_AS(GridHistogram(box, 33), std::invalid_argument);
  CHECK_THROWS_AS(GridHistogram({{0.0, 0.0}, -1.0}, 4), std::invalid_argument);
}

TEST_CASE("empirical_measure: occupation counts") {
  const HistogramBox box = origin_box(2.0);

  // A single repeated point puts all mass in one bin.
  const std::vector<Point2> rep(5, Point2{0.25, -0.25});
  GridHistogram one = empirical_measure(std::span<const Point2>(rep), box, 8);
  CHECK(one.total() == 5);
  CHECK(one.escaped() == 0);
  CHECK(one.counts()[*one.cell_index({0.25, -0.25})] == 5);

  // Two points in different bins give two equal bins.
  const std::vector<Point2> two{{-1.0, -1.0}, {1.0, 1.0}};
  GridHistogram pair_h = empirical_measure(std::span<const Point2>(two), box, 8);
  const auto c0 = pair_h.cell_index(two[0]);
  const auto c1 = pair_h.cell_index(two[1]);
  REQUIRE(c0.has_value());
  REQUIRE(c1.has_value());
  CHECK(*c0 != *c1);
  CHECK(pair_h.counts()[*c0] == 1);
  CHECK(pair_h.counts()[*c1] == 1);

  // Everything outside the box lands in the escaped bucket.
  const std::vector<Point2> out{{10.0, 0.0}, {0.0, -30.0}, {100.0, 100.0}};
  GridHistogram esc = empirical_measure(std::span<const Point2>(out), box, 8);
  CHECK(esc.escaped() == esc.total());

  // The trajectory overload counts every visited point and rejects an
  // empty set.
  const GeneratorSystem sys = fixture_system();
  std::vector<Trajectory> trajs;
  trajs.push_back(simulate_chain(sys, WalkMeasure::uniform(), {0.1, 0.1}, 10, 3));
  trajs.push_back(simulate_chain(sys, WalkMeasure::uniform(), {0.2, -0.1}, 10, 4));
  GridHistogram occ = empirical_measure(std::span<const Trajectory>(trajs), box, 8);
  CHECK(occ.total() == trajs[0].points.size() + trajs[1].points.size());
  CHECK_THROWS_AS(empirical_measure(std::span<const Trajectory>(), box, 8),
                  std::invalid_argument);
}

TEST_CASE("stationarity defect: hand-computable histograms") {
  const GeneratorSystem sys = fixture_system();
  const WalkMeasure nu = WalkMeasure::uniform();

  // All mass escaped: absorbing bucket is exactly stationary.
  GridHistogram gone(origin_box(2.0), 4);
  gone.add_escaped(10);
  CHECK(stationarity_defect(sys, nu, gone, 0, 1) == 0.0);

  // Point mass at a cell center fixed by every letter: defect zero. With 5
  // bins of width 1 on [-2.5, 2.5]^4 the middle cell is centered at the
  // origin, which all four letters fix.
  GridHistogram fixed(origin_box(2.5), 5);
  fixed.add({0.0, 0.0});
  CHECK(stationarity_defect(sys, nu, fixed, 0, 1) == 0.0);

  // Point mass at a cell center whose four images land in four other cells:
  // the defect formula gives 1/2 (1 + 4/4) = 1, total variation maximum.
  GridHistogram spread(origin_box(4.0), 16);
  spread.add({1.25, 0.75});
  CHECK(stationarity_defect(sys, nu, spread, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));

  // Occupation measure of an escaping chain: strictly positive defect,
  // never above 1, and extra pushforward samples keep it in range.
  const Trajectory chain = simulate_chain(sys, nu, {0.0, 5.0}, 60, 11);
  std::vector<Trajectory> trajs{chain};
  GridHistogram occ = empirical_measure(std::span<const Trajectory>(trajs), origin_box(30.0), 8);
  const double d = stationarity_defect(sys, nu, occ, 200, 17);
  CHECK(d > 0.0);
  CHECK(d <= 1.0 + 1e-12);

  GridHistogram empty(origin_box(2.0), 4);
  CHECK_THROWS_AS(stationarity_defect(sys, nu, empty, 0, 1), std::invalid_argument);
}

TEST_CASE("mass escape series") {
  const GeneratorSystem sys = fixture_system();
  const WalkMeasure nu = WalkMeasure::uniform();

  // (0,0) is fixed by both letters of the rotation preset: nothing leaves.
  const auto stay = mass_escape(sys, nu, fixed_starts({{0.0, 0.0}}), 20, 10.0, 50, 1);
  REQUIRE(stay.size() == 21);
  for (double f : stay) CHECK(f == 1.0);

  // steps = 0 reports the fraction of starts inside the ball.
  const auto half = mass_escape(sys, nu, fixed_starts({{0.0, 0.0}, {0.0, 50.0}}), 0, 10.0, 2, 1);
  REQUIRE(half.size() == 1);
  CHECK(half[0] == 0.5);

  // Chains from the collar start outside the ball and essentially never
  // come back.
  const IndeterminacySet dirs = indeterminacy_set(kPi / 4);
  const auto drain =
      mass_escape(sys, nu, collar_starts(dirs, {100.0, 0.2}), 200, 10.0, 1000, 2026);
  REQUIRE(drain.size() == 201);
  CHECK(drain[0] == 0.0);
  CHECK(drain[200] < 0.01);
  for (double f : drain) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }

  CHECK_THROWS_AS(mass_escape(sys, nu, fixed_starts({{0.0, 0.0}}), 5, 10.0, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(mass_escape(sys, nu, fixed_starts({{0.0, 0.0}}), 5, 1e13, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fixed_starts({}), std::invalid_argument);
}

TEST_CASE("word-average mass identity: counts and the degenerate case") {
  const GeneratorSystem sys = fixture_system();
  const WalkMeasure nu = WalkMeasure::uniform();
  const IndeterminacySet dirs = indeterminacy_set(kPi / 4);
  const CollarParams cp{100.0, 0.2};

  // 30 collar points and 10 interior points, unit weights: mass(U) = 0.75.
  std::vector<WeightedPoint> sample;
  SplitMix64 rng(5);
  for (int i = 0; i < 30; ++i) sample.push_back({sample_in_collar(dirs, cp, rng), 1.0});
  for (int i = 0; i < 10; ++i)
    sample.push_back({{0.05 * i, 0.1}, 1.0});

  const auto span = std::span<const WeightedPoint>(sample);
  const MassIdentity id0 = word_average_mass(sys, nu, span, cp, 0);
  CHECK(id0.omega_count == 1);
  CHECK(id0.lhs == 0.75);
  CHECK(id0.gap == 0.0);  // omega = identity reproduces lhs bit for bit

  const MassIdentity id1 = word_average_mass(sys, nu, span, cp, 1);
  CHECK(id1.omega_count == 4);
  CHECK(id1.lhs == 0.75);
  CHECK(id1.gap >= 0.0);
  CHECK(id1.gap <= 1.0);

  const MassIdentity id2 = word_average_mass(sys, nu, span, cp, 2);
  CHECK(id2.omega_count == 12);

  CHECK_THROWS_AS(word_average_mass(sys, WalkMeasure({0.4, 0.2, 0.2, 0.2}), span, cp, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(word_average_mass(sys, nu, span, cp, 9), std::invalid_argument);
  CHECK_THROWS_AS(word_average_mass(sys, nu, std::span<const WeightedPoint>(), cp, 1),
                  std::invalid_argument);
  const GeneratorSystem general = GeneratorSystem::pair(quad(), translate_diagonal(quad(), 3.0));
  CHECK_THROWS_AS(word_average_mass(general, nu, span, cp, 1), std::invalid_argument);
}

TEST_CASE("ergodic running averages") {
  const GeneratorSystem sys = fixture_system();

  // Constant test function: every running average is exactly 1.
  const auto ones = ergodic_average(sys, WalkMeasure::uniform(), "one", 0.0, {0.3, -0.4}, 50, 9);
  REQUIRE(ones.size() == 50);
  for (double a : ones) CHECK(a == 1.0);

  // Nearly deterministic h1 chain from (0,5): x_1 = (5,25) is the only
  // point of the orbit inside the radius-100 ball, so the running average
  // of the ball indicator is 1/N, including after overflow.
  const auto decay = ergodic_average(sys, nearly_h1(), "ball", 100.0, {0.0, 5.0}, 20, 7);
  REQUIRE(decay.size() == 20);
  for (int n = 1; n <= 20; ++n)
    CHECK(decay[static_cast<std::size_t>(n - 1)] == doctest::Approx(1.0 / n).epsilon(1e-12));

  // Same chain under the norm clamp: every orbit point (and the overflow
  // tail) clamps to the cap, so every average equals the cap exactly.
  const auto clamped = ergodic_average(sys, nearly_h1(), "normclamp", 10.0, {0.0, 5.0}, 40, 7);
  for (double a : clamped) CHECK(a == 10.0);

  // N = 1 is f at the first chain point.
  const std::uint64_t seed = 31;
  const auto first = ergodic_average(sys, WalkMeasure::uniform(), "ball", 10.0, {0.2, 0.2}, 1, seed);
  const Trajectory one_step = simulate_chain(sys, WalkMeasure::uniform(), {0.2, 0.2}, 1, seed);
  REQUIRE(first.size() == 1);
  REQUIRE(one_step.points.size() == 2);
  CHECK(first[0] == (norm(one_step.points[1]) <= 10.0 ? 1.0 : 0.0));

  // Escape dominates from the collar: the ball indicator averages to
  // nearly zero by N = 500.
  const IndeterminacySet dirs = indeterminacy_set(kPi / 4);
  SplitMix64 rng(12);
  const Point2 start = sample_in_collar(dirs, {100.0, 0.2}, rng);
  const auto fade = ergodic_average(sys, WalkMeasure::uniform(), "ball", 10.0, start, 500, 13);
  CHECK(fade[499] < 0.05);

  CHECK_THROWS_AS(ergodic_average(sys, WalkMeasure::uniform(), "sin", 1.0, {0.0, 0.0}, 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(ergodic_average(sys, WalkMeasure::uniform(), "ball", 0.0, {0.0, 0.0}, 5, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(ergodic_average(sys, WalkMeasure::uniform(), "one", 0.0, {0.0, 0.0}, 0, 1),
                  std::invalid_argument);
}

TEST_CASE("filled Julia classification: fixed point and one-step escapes") {
  const HenonMap m = quad();
  const Filtration f = certified_filtration(m, 2.0);

  for (int budget : {1, 7, 200}) {
    const JuliaVerdict v = classify_filled_julia(m, {0.0, 0.0}, budget, f);
    CHECK(v.kind == JuliaVerdict::Kind::InK);
    CHECK(v.step == budget);
  }

  const JuliaVerdict fwd = classify_filled_julia(m, {0.0, 5.0}, 10, f);
  CHECK(fwd.kind == JuliaVerdict::Kind::EscapesForward);
  CHECK(fwd.step == 1);

  const JuliaVerdict bwd = classify_filled_julia(m, {5.0, 0.0}, 10, f);
  CHECK(bwd.kind == JuliaVerdict::Kind::EscapesBackward);
  CHECK(bwd.step == 1);

  CHECK_THROWS_AS(classify_filled_julia(m, {0.0, 0.0}, 0, f), std::invalid_argument);
}

TEST_CASE("filled Julia verdicts are monotone in the budget") {
  const HenonMap m = quad();
  const Filtration f = certified_filtration(m, 2.0);
  const std::vector<Point2> pts{
      {0.1, 0.2},          {1.4, 1.4},           {0.0, 5.0},
      {5.0, 0.0},          {2.0, 2.0},           {-1.0, 2.5},
      {Complex(0.0, 1.0), Complex(1.0, -1.0)},   {Complex(0.0, 0.0), Complex(2.9, 0.0)},
      {3.5, -3.5},         {0.5, -2.0}};

  for (const Point2& z : pts) {
    JuliaVerdict prev = classify_filled_julia(m, z, 1, f);
    for (int budget = 2; budget <= 8; ++budget) {
      const JuliaVerdict cur = classify_filled_julia(m, z, budget, f);
      const bool prev_escapes = prev.kind == JuliaVerdict::Kind::EscapesForward ||
                                prev.kind == JuliaVerdict::Kind::EscapesBackward;
      if (prev_escapes) {
        CHECK(cur.kind == prev.kind);
        CHECK(cur.step == prev.step);
      }
      prev = cur;
    }
  }
}

TEST_CASE("escape certificates are sound: the witness keeps doubling") {
  const HenonMap m = quad();
  const Filtration f = certified_filtration(m, 2.0);
  const std::vector<Point2> pts{{0.0, 5.0}, {5.0, 0.0}, {0.0, -5.0}, {0.5, 4.0},
                                {Complex(0.0, 4.0), Complex(3.0, 3.0)}};

  for (const Point2& z : pts) {
    const JuliaVerdict v = classify_filled_julia(m, z, 10, f);
    if (v.kind == JuliaVerdict::Kind::EscapesForward) {
      Point2 w = z;
      for (int s = 0; s < v.step; ++s) w = apply(m, w);
      double prev = std::abs(w.y);
      for (int i = 0; i < 10; ++i) {
        try {
          w = apply(m, w);
        } catch (const EscapeOverflow&) {
          break;  // grew past double range, certainly doubling
        }
        CHECK(std::abs(w.y) >= 2.0 * prev);
        prev = std::abs(w.y);
      }
    } else if (v.kind == JuliaVerdict::Kind::EscapesBackward) {
      Point2 w = z;
      for (int s = 0; s < v.step; ++s) w = apply_inverse(m, w);
      double prev = std::abs(w.x);
      for (int i = 0; i < 10; ++i) {
        try {
          w = apply_inverse(m, w);
        } catch (const EscapeOverflow&) {
          break;
        }
        CHECK(std::abs(w.x) >= 2.0 * prev);
        prev = std::abs(w.x);
      }
    } else {
      FAIL("expected an escape verdict for these starts");
    }
  }
}

TEST_CASE("disjointness report: translate-apart vs identical") {
  const HenonMap m1 = quad();
  const HenonMap apart = translate_diagonal(m1, 100.0);
  const HistogramBox box = origin_box(0.1);

  const DisjointnessReport far = disjointness_report(m1, apart, box, 200, 200, 5);
  CHECK(far.total == 200);
  CHECK(far.overlap_count == 0);
  CHECK(far.disjoint_heuristic);
  CHECK(far.sampling_only);
  // The experiment is meaningful: the box does meet K(m1).
  bool some_in_k = false;
  for (const auto& row : far.rows)
    if (row.first.kind == JuliaVerdict::Kind::InK) some_in_k = true;
  CHECK(some_in_k);

  const DisjointnessReport same = disjointness_report(m1, m1, box, 200, 200, 5);
  CHECK(same.overlap_count > 0);
  CHECK(!same.disjoint_heuristic);
  CHECK(same.sampling_only);

  CHECK_THROWS_AS(disjointness_report(m1, apart, box, 0, 10, 1), std::invalid_argument);
}
