#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>

#include "henlab/dynamics.hpp"

namespace henlab {

// Markov chain x_{n+1} = g_{n+1} x_n with letters drawn i.i.d. from nu.
// Halts early once the norm exceeds `guard`, recording the certificate like
// orbit() does. Letters come from SplitMix64(seed).
Trajectory simulate_chain(const GeneratorSystem& sys, const WalkMeasure& nu,
                          const Point2& start, int steps, std::uint64_t seed,
                          double guard = 1e12);

// Axis-aligned box of C^2 = R^4, one half-width for all four real axes.
struct HistogramBox {
  Point2 center;
  double half_width;
};

// Counts over a bins^4 grid on the box plus one absorbing bucket for
// everything outside. Cell order: ((re x * bins + im x) * bins + re y) *
// bins + im y, half-open cells [low, low + width).
class GridHistogram {
 public:
  GridHistogram(HistogramBox box, int bins_per_axis);  // bins in [1, 32]

  void add(const Point2& z);
  void add_escaped(std::uint64_t n = 1);

  std::optional<std::size_t> cell_index(const Point2& z) const;
  Point2 cell_low(std::size_t index) const;   // low corner
  Point2 cell_center(std::size_t index) const;
  double cell_width() const { return 2.0 * box_.half_width / bins_; }

  const HistogramBox& box() const { return box_; }
  int bins() const { return bins_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  std::uint64_t escaped() const { return escaped_; }
  std::uint64_t total() const { return total_; }

 private:
  HistogramBox box_;
  int bins_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t escaped_ = 0;
  std::uint64_t total_ = 0;
};

// Occupation histogram of every visited point. The trajectory overload
// rejects an empty set; the point overload is the raw building block.
GridHistogram empirical_measure(std::span<const Point2> points, const HistogramBox& box,
                                int bins_per_axis);
GridHistogram empirical_measure(std::span<const Trajectory> trajectories,
                                const HistogramBox& box, int bins_per_axis);

// Total-variation defect of the empirical measure against its average
// pushforward under the four letters:
//   D = 1/2 ( sum_cells |mu(c) - sum_i a_i (g_i)_* mu (c)| + |mu(esc) - P(esc)| ).
// Pushforwards map the cell center plus up to 15 stratified extra samples
// per cell (proportional to cell mass). The escaped bucket is absorbing
// under every letter: the far exterior maps into itself in each letter's
// frame, so no mass returns. Zero for an exactly stationary histogram.
double stationarity_defect(const GeneratorSystem& sys, const WalkMeasure& nu,
                           const GridHistogram& h, int pushforward_samples,
                           std::uint64_t seed);

// Start-point source for mass_escape: called once per trial with that
// trial's private stream.
using StartSampler = std::function<Point2(int trial, SplitMix64& rng)>;

StartSampler fixed_starts(std::vector<Point2> points);  // cycles through the list
StartSampler collar_starts(const IndeterminacySet& dirs, const CollarParams& cp);
StartSampler box_starts(const HistogramBox& box);

// Fraction of chains inside the closed origin ball of the given radius at
// each step 0..steps. Chains that overflow or pass the guard stay outside
// for the remaining steps.
std::vector<double> mass_escape(const GeneratorSystem& sys, const WalkMeasure& nu,
                                const StartSampler& starts, int steps, double ball_radius,
                                int trials, std::uint64_t seed, double guard = 1e12);

// One point of an empirical measure.
struct WeightedPoint {
  Point2 z;
  double w;
};

// Empirical test of the word-average identity for symmetric step weights:
//   lhs = mass(U),  rhs = (1 / |Omega_n|) sum_{omega in Omega_n} mass(omega U),
// each omega-term evaluated as the mass of {z : omega^{-1} z in U}. A word
// evaluation that overflows counts as outside U (the orbit runs off along an
// excluded axis direction). n = 0 gives rhs = lhs exactly. Rotation systems
// only: the collar needs the system's excluded directions.
struct MassIdentity {
  double lhs;
  double rhs;
  double gap;
  std::uint64_t omega_count;
};

MassIdentity word_average_mass(const GeneratorSystem& sys, const WalkMeasure& nu,
                               std::span<const WeightedPoint> sample,
                               const CollarParams& cp, int n);

// Running averages (1/N) sum_{n<=N} f(x_n), N = 1..n, along one chain.
// Registered test functions:
//   "one"        constant 1 (param ignored)
//   "ball"       indicator of norm <= param
//   "normclamp"  min(norm, param)
// A chain that overflows continues at infinity: 1, 0, param respectively.
std::vector<double> ergodic_average(const GeneratorSystem& sys, const WalkMeasure& nu,
                                    const std::string& f_name, double f_param,
                                    const Point2& start, int n, std::uint64_t seed);

// Membership verdict for the filled Julia set K(m) = {bounded full orbits}.
// EscapesForward/EscapesBackward carry the certification step (entering
// VMinus forward resp. VPlus backward, checked after each application);
// InK means both orbits stayed inside the bidisk of the filtration radius
// for the whole budget (heuristic, budget-stamped); Undecided is everything
// else. When both directions certify, the earlier step wins (keeps verdicts
// stable under budget increases); at equal steps the start's own region
// decides, VPlus reporting backward and anything else forward. The
// filtration should certify both directions (certified_filtration).
struct JuliaVerdict {
  enum class Kind { InK, EscapesForward, EscapesBackward, Undecided } kind;
  int step;  // certification step, or the budget for InK/Undecided

  bool bounded_like() const { return kind == Kind::InK || kind == Kind::Undecided; }
};

JuliaVerdict classify_filled_julia(const HenonMap& m, const Point2& z, int budget,
                                   const Filtration& f);

const char* to_string(JuliaVerdict::Kind k);

// Samples the box uniformly and classifies every point under both maps.
// overlap_count = points whose verdict is InK or Undecided for both: the
// empirical obstruction to K(m1) and K(m2) being disjoint. sampling_only
// is always true: absence of overlap among samples proves nothing.
struct DisjointnessReport {
  struct Row {
    Point2 z;
    JuliaVerdict first;
    JuliaVerdict second;
  };
  std::vector<Row> rows;
  int overlap_count = 0;
  int total = 0;
  bool disjoint_heuristic = false;
  bool sampling_only = true;
};

DisjointnessReport disjointness_report(const HenonMap& m1, const HenonMap& m2,
                                       const HistogramBox& box, int samples, int budget,
                                       std::uint64_t seed);

}  // namespace henlab
