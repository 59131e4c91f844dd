#include "henlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace henlab {

Trajectory simulate_chain(const GeneratorSystem& sys, const WalkMeasure& nu,
                          const Point2& start, int steps, std::uint64_t seed, double guard) {
  if (steps < 0) throw std::invalid_argument("simulate_chain: steps must be >= 0");
  if (!(guard > 0.0)) throw std::invalid_argument("simulate_chain: guard must be positive");
  SplitMix64 rng(seed);
  std::vector<Generator> letters = sample_walk(nu, steps, rng);
  return orbit(sys, letters, start, guard);
}

GridHistogram::GridHistogram(HistogramBox box, int bins_per_axis)
    : box_(box), bins_(bins_per_axis) {
  if (!is_finite(box.center) || !(box.half_width > 0.0))
    throw std::invalid_argument("GridHistogram: box must be finite with positive half_width");
  if (bins_ < 1 || bins_ > 32)
    throw std::invalid_argument("GridHistogram: bins_per_axis must be in [1, 32]");
  std::size_t n = static_cast<std::size_t>(bins_);
  counts_.assign(n * n * n * n, 0);
}

std::optional<std::size_t> GridHistogram::cell_index(const Point2& z) const {
  if (!is_finite(z)) return std::nullopt;
  const double coords[4] = {z.x.real(), z.x.imag(), z.y.real(), z.y.imag()};
  const double centers[4] = {box_.center.x.real(), box_.center.x.imag(),
                             box_.center.y.real(), box_.center.y.imag()};
  std::size_t index = 0;
  for (int a = 0; a < 4; ++a) {
    double u = (coords[a] - (centers[a] - box_.half_width)) / (2.0 * box_.half_width);
    if (!(u >= 0.0) || !(u < 1.0)) return std::nullopt;
    auto b = static_cast<std::size_t>(u * bins_);
    if (b >= static_cast<std::size_t>(bins_)) b = bins_ - 1;  // u*bins rounding up to the edge
    index = index * bins_ + b;
  }
  return index;
}

void GridHistogram::add(const Point2& z) {
  if (auto c = cell_index(z))
    ++counts_[*c];
  else
    ++escaped_;
  ++total_;
}

void GridHistogram::add_escaped(std::uint64_t n) {
  escaped_ += n;
  total_ += n;
}

Point2 GridHistogram::cell_low(std::size_t index) const {
  if (index >= counts_.size()) throw std::out_of_range("GridHistogram: cell index");
  std::size_t b[4];
  for (int a = 3; a >= 0; --a) {
    b[a] = index % bins_;
    index /= bins_;
  }
  const double centers[4] = {box_.center.x.real(), box_.center.x.imag(),
                             box_.center.y.real(), box_.center.y.imag()};
  double w = cell_width();
  double lo[4];
  for (int a = 0; a < 4; ++a) lo[a] = centers[a] - box_.half_width + w * b[a];
  return {{lo[0], lo[1]}, {lo[2], lo[3]}};
}

Point2 GridHistogram::cell_center(std::size_t index) const {
  Point2 lo = cell_low(index);
  double h = 0.5 * cell_width();
  return {{lo.x.real() + h, lo.x.imag() + h}, {lo.y.real() + h, lo.y.imag() + h}};
}

GridHistogram empirical_measure(std::span<const Point2> points, const HistogramBox& box,
                                int bins_per_axis) {
  GridHistogram h(box, bins_per_axis);
  for (const Point2& z : points) h.add(z);
  return h;
}

GridHistogram empirical_measure(std::span<const Trajectory> trajectories,
                                const HistogramBox& box, int bins_per_axis) {
  if (trajectories.empty())
    throw std::invalid_argument("empirical_measure: empty trajectory set");
  GridHistogram h(box, bins_per_axis);
  for (const Trajectory& t : trajectories)
    for (const Point2& z : t.points) h.add(z);
  return h;
}

namespace {

Point2 uniform_in_cell(const GridHistogram& h, std::size_t cell, SplitMix64& rng) {
  Point2 lo = h.cell_low(cell);
  double w = h.cell_width();
  return {{lo.x.real() + w * rng.next_double(), lo.x.imag() + w * rng.next_double()},
          {lo.y.real() + w * rng.next_double(), lo.y.imag() + w * rng.next_double()}};
}

}  // namespace

double stationarity_defect(const GeneratorSystem& sys, const WalkMeasure& nu,
                           const GridHistogram& h, int pushforward_samples,
                           std::uint64_t seed) {
  if (h.total() == 0) throw std::invalid_argument("stationarity_defect: empty histogram");
  if (pushforward_samples < 0)
    throw std::invalid_argument("stationarity_defect: pushforward_samples must be >= 0");

  const double total = static_cast<double>(h.total());
  const double mu_esc = static_cast<double>(h.escaped()) / total;

  std::unordered_map<std::size_t, double> push;  // pushforward mass per cell
  double push_esc = mu_esc;                      // escaped bucket is absorbing

  const auto& counts = h.counts();
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    const double mass = static_cast<double>(counts[c]) / total;
    const int extra = std::min(15, static_cast<int>(pushforward_samples * mass));
    const int reps = 1 + extra;
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(c));
    for (int r = 0; r < reps; ++r) {
      Point2 rep = (r == 0) ? h.cell_center(c) : uniform_in_cell(h, c, rng);
      for (int li = 0; li < 4; ++li) {
        const double weight = nu.weights()[static_cast<std::size_t>(li)] * mass / reps;
        if (weight == 0.0) continue;
        bool escaped = false;
        Point2 img{};
        try {
          img = sys.apply(static_cast<Generator>(li), rep);
        } catch (const EscapeOverflow&) {
          escaped = true;
        }
        if (escaped) {
          push_esc += weight;
        } else if (auto target = h.cell_index(img)) {
          push[*target] += weight;
        } else {
          push_esc += weight;
        }
      }
    }
  }

  double defect = std::abs(mu_esc - push_esc);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const double mu_c = static_cast<double>(counts[c]) / total;
    auto it = push.find(c);
    const double p_c = (it == push.end()) ? 0.0 : it->second;
    if (mu_c != 0.0 || p_c != 0.0) defect += std::abs(mu_c - p_c);
  }
  return 0.5 * defect;
}

StartSampler fixed_starts(std::vector<Point2> points) {
  if (points.empty()) throw std::invalid_argument("fixed_starts: empty point list");
  for (const Point2& z : points)
    if (!is_finite(z)) throw std::invalid_argument("fixed_starts: non-finite point");
  return [points = std::move(points)](int trial, SplitMix64&) {
    return points[static_cast<std::size_t>(trial) % points.size()];
  };
}

StartSampler collar_starts(const IndeterminacySet& dirs, const CollarParams& cp) {
  return [dirs, cp](int, SplitMix64& rng) { return sample_in_collar(dirs, cp, rng); };
}

StartSampler box_starts(const HistogramBox& box) {
  if (!is_finite(box.center) || !(box.half_width > 0.0))
    throw std::invalid_argument("box_starts: box must be finite with positive half_width");
  return [box](int, SplitMix64& rng) {
    auto coord = [&](double c) { return c + box.half_width * (2.0 * rng.next_double() - 1.0); };
    return Point2{{coord(box.center.x.real()), coord(box.center.x.imag())},
                  {coord(box.center.y.real()), coord(box.center.y.imag())}};
  };
}

std::vector<double> mass_escape(const GeneratorSystem& sys, const WalkMeasure& nu,
                                const StartSampler& starts, int steps, double ball_radius,
                                int trials, std::uint64_t seed, double guard) {
  if (steps < 0) throw std::invalid_argument("mass_escape: steps must be >= 0");
  if (trials < 1) throw std::invalid_argument("mass_escape: trials must be >= 1");
  if (!(ball_radius > 0.0) || !(guard > ball_radius))
    throw std::invalid_argument("mass_escape: need 0 < ball_radius < guard");

  std::vector<std::uint64_t> inside(static_cast<std::size_t>(steps) + 1, 0);
  for (int t = 0; t < trials; ++t) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(t));
    Point2 z = starts(t, rng);
    if (!is_finite(z)) throw std::invalid_argument("mass_escape: start sampler gave non-finite point");
    if (norm(z) <= ball_radius) ++inside[0];
    for (int n = 1; n <= steps; ++n) {
      Generator g = nu.sample(rng);
      try {
        z = sys.apply(g, z);
      } catch (const EscapeOverflow&) {
        break;  // outside the ball from here on
      }
      if (norm(z) <= ball_radius) ++inside[n];
      if (norm(z) > guard) break;
    }
  }

  std::vector<double> fractions(inside.size());
  for (std::size_t n = 0; n < inside.size(); ++n)
    fractions[n] = static_cast<double>(inside[n]) / trials;
  return fractions;
}

MassIdentity word_average_mass(const GeneratorSystem& sys, const WalkMeasure& nu,
                               std::span<const WeightedPoint> sample,
                               const CollarParams& cp, int n) {
  if (!sys.is_rotation())
    throw std::invalid_argument("word_average_mass: needs a rotation system");
  if (!nu.is_symmetric(1e-12))
    throw std::invalid_argument("word_average_mass: step weights must be symmetric");
  if (n < 0 || n > 8)
    throw std::invalid_argument("word_average_mass: word length must be in [0, 8]");
  if (sample.empty()) throw std::invalid_argument("word_average_mass: empty sample");
  const IndeterminacySet dirs = indeterminacy_set(sys.theta());

  double total_w = 0.0;
  for (const WeightedPoint& p : sample) {
    if (!(p.w >= 0.0) || !std::isfinite(p.w) || !is_finite(p.z))
      throw std::invalid_argument("word_average_mass: weights must be finite and >= 0");
    total_w += p.w;
  }
  if (!(total_w > 0.0)) throw std::invalid_argument("word_average_mass: zero total weight");

  auto mass_in_preimage = [&](const Word& w) {
    // mass of { z : w^{-1} z in U }; overflow along the way counts as outside
    Word winv = inverse(w);
    double m = 0.0;
    for (const WeightedPoint& p : sample) {
      bool in_u = false;
      try {
        in_u = in_collar(dirs, cp, sys.apply_word(winv, p.z));
      } catch (const EscapeOverflow&) {
        in_u = false;
      }
      if (in_u) m += p.w;
    }
    return m / total_w;
  };

  MassIdentity out{};
  out.lhs = mass_in_preimage(Word{});
  std::vector<Word> omegas = enumerate_reduced(n);
  out.omega_count = omegas.size();
  double sum = 0.0;
  for (const Word& w : omegas) sum += mass_in_preimage(w);
  out.rhs = sum / static_cast<double>(omegas.size());
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

std::vector<double> ergodic_average(const GeneratorSystem& sys, const WalkMeasure& nu,
                                    const std::string& f_name, double f_param,
                                    const Point2& start, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("ergodic_average: need at least one step");
  if (!is_finite(start)) throw std::invalid_argument("ergodic_average: non-finite start");

  // f(point) plus its value at infinity for chains that overflow.
  std::function<double(const Point2&)> f;
  double f_at_infinity;
  if (f_name == "one") {
    f = [](const Point2&) { return 1.0; };
    f_at_infinity = 1.0;
  } else if (f_name == "ball") {
    if (!(f_param > 0.0)) throw std::invalid_argument("ergodic_average: ball needs radius > 0");
    f = [f_param](const Point2& z) { return norm(z) <= f_param ? 1.0 : 0.0; };
    f_at_infinity = 0.0;
  } else if (f_name == "normclamp") {
    if (!(f_param > 0.0)) throw std::invalid_argument("ergodic_average: normclamp needs clamp > 0");
    f = [f_param](const Point2& z) { return std::min(norm(z), f_param); };
    f_at_infinity = f_param;
  } else {
    throw std::invalid_argument("ergodic_average: unknown test function '" + f_name + "'");
  }

  SplitMix64 rng(seed);
  std::vector<double> averages(static_cast<std::size_t>(n));
  Point2 z = start;
  bool at_infinity = false;
  double sum = 0.0;
  for (int k = 1; k <= n; ++k) {
    if (!at_infinity) {
      Generator g = nu.sample(rng);
      try {
        z = sys.apply(g, z);
      } catch (const EscapeOverflow&) {
        at_infinity = true;
      }
    }
    sum += at_infinity ? f_at_infinity : f(z);
    averages[static_cast<std::size_t>(k - 1)] = sum / k;
  }
  return averages;
}

JuliaVerdict classify_filled_julia(const HenonMap& m, const Point2& z, int budget,
                                   const Filtration& f) {
  if (budget < 1) throw std::invalid_argument("classify_filled_julia: budget must be >= 1");
  if (!is_finite(z)) throw std::invalid_argument("classify_filled_julia: non-finite point");

  bool left_bidisk = max_norm(z) > f.radius;

  std::optional<int> forward, backward;
  Point2 cur = z;
  for (int s = 1; s <= budget && !forward; ++s) {
    try {
      cur = apply(m, cur);
    } catch (const EscapeOverflow&) {
      left_bidisk = true;
      forward = s;  // beyond overflow is far outside the bidisk, firmly in VMinus
      break;
    }
    if (max_norm(cur) > f.radius) left_bidisk = true;
    if (classify_region(f, cur) == Region::VMinus) forward = s;
  }

  cur = z;
  for (int s = 1; s <= budget && !backward; ++s) {
    try {
      cur = apply_inverse(m, cur);
    } catch (const EscapeOverflow&) {
      left_bidisk = true;
      backward = s;
      break;
    }
    if (max_norm(cur) > f.radius) left_bidisk = true;
    if (classify_region(f, cur) == Region::VPlus) backward = s;
  }

  // The earlier certificate wins so the verdict is stable under budget
  // increases. On a tie the start's own region decides: a start in VPlus is
  // certified backward immediately (VPlus is backward invariant), anything
  // else reports forward.
  if (forward && backward) {
    if (*backward < *forward ||
        (*backward == *forward && classify_region(f, z) == Region::VPlus))
      return {JuliaVerdict::Kind::EscapesBackward, *backward};
    return {JuliaVerdict::Kind::EscapesForward, *forward};
  }
  if (forward) return {JuliaVerdict::Kind::EscapesForward, *forward};
  if (backward) return {JuliaVerdict::Kind::EscapesBackward, *backward};
  if (!left_bidisk) return {JuliaVerdict::Kind::InK, budget};
  return {JuliaVerdict::Kind::Undecided, budget};
}

const char* to_string(JuliaVerdict::Kind k) {
  switch (k) {
    case JuliaVerdict::Kind::InK: return "in_k";
    case JuliaVerdict::Kind::EscapesForward: return "escapes_forward";
    case JuliaVerdict::Kind::EscapesBackward: return "escapes_backward";
    case JuliaVerdict::Kind::Undecided: return "undecided";
  }
  return "unknown";
}

DisjointnessReport disjointness_report(const HenonMap& m1, const HenonMap& m2,
                                       const HistogramBox& box, int samples, int budget,
                                       std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("disjointness_report: samples must be >= 1");

  const Filtration f1 = certified_filtration(m1, 2.0);
  const Filtration f2 = certified_filtration(m2, 2.0);
  StartSampler draw = box_starts(box);

  DisjointnessReport rep;
  rep.total = samples;
  rep.rows.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(i));
    Point2 z = draw(i, rng);
    JuliaVerdict v1 = classify_filled_julia(m1, z, budget, f1);
    JuliaVerdict v2 = classify_filled_julia(m2, z, budget, f2);
    if (v1.bounded_like() && v2.bounded_like()) ++rep.overlap_count;
    rep.rows.push_back({z, v1, v2});
  }
  rep.disjoint_heuristic = (rep.overlap_count == 0);
  return rep;
}

}  // namespace henlab
