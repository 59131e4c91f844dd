#include "henlab/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace henlab {

GeneratorSystem::GeneratorSystem(HenonMap m1, std::optional<HenonMap> m2, bool rotated,
                                 double theta, double lambda)
    : h1_(std::move(m1)),
      h2_(std::move(m2)),
      rotated_(rotated),
      theta_(theta),
      f1_(certified_filtration(h1_, lambda)),
      f2_(h2_ ? certified_filtration(*h2_, lambda) : f1_) {}

GeneratorSystem GeneratorSystem::rotation(const GroupPreset& g, double lambda) {
  return GeneratorSystem(g.map, std::nullopt, true, g.theta, lambda);
}

GeneratorSystem GeneratorSystem::pair(HenonMap m1, HenonMap m2, double lambda) {
  return GeneratorSystem(std::move(m1), std::move(m2), false, 0.0, lambda);
}

const HenonMap& GeneratorSystem::h2() const {
  if (!h2_) throw std::logic_error("GeneratorSystem: rotation system has no second map");
  return *h2_;
}

Point2 GeneratorSystem::apply(Generator g, const Point2& z) const {
  switch (g) {
    case Generator::H1:
      return henlab::apply(h1_, z);
    case Generator::H1Inv:
      return apply_inverse(h1_, z);
    case Generator::H2:
      return rotated_ ? rotate(-theta_, henlab::apply(h1_, rotate(theta_, z)))
                      : henlab::apply(*h2_, z);
    case Generator::H2Inv:
      return rotated_ ? rotate(-theta_, apply_inverse(h1_, rotate(theta_, z)))
                      : apply_inverse(*h2_, z);
  }
  throw std::logic_error("GeneratorSystem: bad generator");
}

Point2 GeneratorSystem::apply_word(const Word& w, const Point2& z) const {
  Point2 cur = z;
  for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) cur = apply(*it, cur);
  return cur;
}

bool GeneratorSystem::certifies(Generator g, const Point2& z) const {
  switch (g) {
    case Generator::H1:
      return classify_region(f1_, z) == Region::VMinus;
    case Generator::H1Inv:
      return classify_region(f1_, z) == Region::VPlus;
    case Generator::H2:
      return classify_region(f2_, rotated_ ? rotate(theta_, z) : z) == Region::VMinus;
    case Generator::H2Inv:
      return classify_region(f2_, rotated_ ? rotate(theta_, z) : z) == Region::VPlus;
  }
  throw std::logic_error("GeneratorSystem: bad generator");
}

Trajectory orbit(const GeneratorSystem& sys, std::span<const Generator> letters,
                 const Point2& start, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("orbit: max_norm must be positive");
  if (!is_finite(start)) throw std::invalid_argument("orbit: start not finite");

  Trajectory t;
  t.points.push_back(start);
  if (norm(start) > max_norm) {
    t.escaped_at = 0;
    return t;
  }
  for (const Generator g : letters) {
    Point2 next;
    try {
      next = sys.apply(g, t.points.back());
    } catch (const EscapeOverflow&) {
      t.overflowed = true;
      t.escaped_at = static_cast<int>(t.points.size()) - 1;
      t.escape_certified = sys.certifies(g, t.points.back());
      t.letters.push_back(g);
      return t;
    }
    t.points.push_back(next);
    t.letters.push_back(g);
    if (norm(next) > max_norm) {
      t.escaped_at = static_cast<int>(t.points.size()) - 1;
      t.escape_certified = sys.certifies(g, next);
      return t;
    }
  }
  return t;
}

bool in_cone(const Cone& c, const Point2& z) {
  if (!(norm(z) >= c.inner_radius)) return false;
  return chordal_distance(direction_of(z), c.axis) <= c.aperture;
}

std::array<Generator, 3> doubling_letters(int cone_index) {
  const Generator skip = inverse(own_letter(cone_index));
  std::array<Generator, 3> out{};
  int k = 0;
  for (unsigned i = 0; i < 4; ++i)
    if (static_cast<Generator>(i) != skip) out[k++] = static_cast<Generator>(i);
  return out;
}

Point2 sample_in_cone(const Cone& c, SplitMix64& rng) {
  if (!(c.aperture > 0.0) || !(c.aperture < 1.0) || !(c.inner_radius > 0.0))
    throw std::invalid_argument("sample_in_cone: need aperture in (0,1) and inner_radius > 0");
  // Orthonormal frame (u, perp) of C^2 with u along the axis; then
  // w = sqrt(1 - s^2) u + s e^{i phi} perp has chordal distance exactly s
  // from the axis and unit norm.
  const Complex a = c.axis.c[0], b = c.axis.c[1];
  const double n = std::hypot(std::abs(a), std::abs(b));
  const Complex ua = a / n, ub = b / n;
  const Complex pa = -std::conj(b) / n, pb = std::conj(a) / n;

  const double s = c.aperture * std::sqrt(rng.next_double());
  const double phi = rng.next_in(0.0, 2 * std::numbers::pi);
  const double psi = rng.next_in(0.0, 2 * std::numbers::pi);
  const double r = c.inner_radius * std::exp(rng.next_double() * std::log(1000.0));

  const Complex along = std::sqrt(1.0 - s * s) * std::polar(1.0, psi);
  const Complex across = s * std::polar(1.0, phi + psi);
  return {r * (along * ua + across * pa), r * (along * ub + across * pb)};
}

namespace {

ConeCheck verify_cones(const GeneratorSystem& sys, const ConeSystem& cs, int samples_per_pair,
                       std::uint64_t seed, bool check_transition) {
  ConeCheck res;
  res.samples_per_pair = samples_per_pair;
  res.min_ratio = std::numeric_limits<double>::infinity();
  res.pass = true;
  res.no_evidence = samples_per_pair <= 0;
  for (int ci = 0; ci < 4; ++ci) {
    const auto letters = doubling_letters(ci);
    for (int li = 0; li < 3; ++li) {
      const Generator g = letters[li];
      SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(ci * 4 + li));
      for (int s = 0; s < samples_per_pair; ++s) {
        const Point2 z = sample_in_cone(cs.cones[ci], rng);
        double ratio;
        bool in_target;
        try {
          const Point2 img = sys.apply(g, z);
          ratio = norm(img) / norm(z);
          in_target = in_cone(cs.cones[target_cone(g)], img);
        } catch (const EscapeOverflow&) {
          ratio = std::numeric_limits<double>::infinity();
          in_target = true;  // direction query impossible; growth is beyond doubt
        }
        res.min_ratio = std::min(res.min_ratio, ratio);
        const bool ok = check_transition ? in_target : ratio > 2.0;
        if (!ok && !res.failure) {
          res.pass = false;
          res.failure = ConeCheck::Failure{ci, g, z, ratio, check_transition && !in_target};
        }
      }
    }
  }
  return res;
}

}  // namespace

ConeCheck verify_cone_doubling(const GeneratorSystem& sys, const ConeSystem& cs,
                               int samples_per_pair, std::uint64_t seed) {
  return verify_cones(sys, cs, samples_per_pair, seed, false);
}

ConeCheck verify_cone_transitions(const GeneratorSystem& sys, const ConeSystem& cs,
                                  int samples_per_pair, std::uint64_t seed) {
  return verify_cones(sys, cs, samples_per_pair, seed, true);
}

ConeSearchResult build_cone_system(const GroupPreset& g, const Filtration& f,
                                   const ConeSearch& search) {
  const IndeterminacySet dirs = indeterminacy_set(g.theta);
  const GeneratorSystem sys = GeneratorSystem::rotation(g, f.lambda);
  const Direction axes[4] = {dirs.qtilde, dirs.ptilde, dirs.q, dirs.p};

  ConeSearchResult result;
  double aperture = search.aperture_start;
  for (int ai = 0; ai < search.aperture_steps; ++ai, aperture *= search.aperture_factor) {
    // Disjointness: cones of equal aperture stay apart exactly when every
    // axis separation exceeds twice the aperture.
    if (dirs.min_pairwise <= 2.0 * aperture) {
      result.log += "aperture " + std::to_string(aperture) + ": cones overlap\n";
      continue;
    }
    for (double r0 = f.radius; r0 <= search.radius_cap; r0 *= 2.0) {
      ConeSystem cs;
      for (int i = 0; i < 4; ++i) cs.cones[i] = Cone{axes[i], aperture, r0};
      const ConeCheck d = verify_cone_doubling(sys, cs, search.samples, search.seed);
      if (!d.pass) {
        result.log += "aperture " + std::to_string(aperture) + " r0 " + std::to_string(r0) +
                      ": doubling failed (min ratio " + std::to_string(d.min_ratio) + ")\n";
        continue;
      }
      const ConeCheck t = verify_cone_transitions(sys, cs, search.samples, search.seed + 1);
      if (!t.pass) {
        result.log += "aperture " + std::to_string(aperture) + " r0 " + std::to_string(r0) +
                      ": transition failed\n";
        continue;
      }
      result.system = cs;
      return result;
    }
    if (f.radius > search.radius_cap)
      result.log += "radius ladder empty: cap " + std::to_string(search.radius_cap) +
                    " below filtration radius " + std::to_string(f.radius) + "\n";
  }
  return result;
}

bool in_collar(const IndeterminacySet& dirs, const CollarParams& cp, const Point2& z) {
  if (!(norm(z) >= cp.r_u)) return false;
  const Direction d = direction_of(z);
  return chordal_distance(d, dirs.p) >= cp.beta && chordal_distance(d, dirs.q) >= cp.beta &&
         chordal_distance(d, dirs.ptilde) >= cp.beta &&
         chordal_distance(d, dirs.qtilde) >= cp.beta;
}

Point2 sample_in_collar(const IndeterminacySet& dirs, const CollarParams& cp, SplitMix64& rng) {
  if (!(cp.beta > 0.0) || !(cp.beta < 0.5 * dirs.min_pairwise))
    throw std::invalid_argument("sample_in_collar: beta must lie in (0, min_pairwise / 2)");
  for (int tries = 0; tries < 1000000; ++tries) {
    const Direction d = random_direction(rng);
    if (chordal_distance(d, dirs.p) < cp.beta || chordal_distance(d, dirs.q) < cp.beta ||
        chordal_distance(d, dirs.ptilde) < cp.beta ||
        chordal_distance(d, dirs.qtilde) < cp.beta)
      continue;
    const double r = cp.r_u * std::exp(rng.next_double() * std::log(1000.0));
    const double n = std::hypot(std::abs(d.c[0]), std::abs(d.c[1]));
    return {r * d.c[0] / n, r * d.c[1] / n};
  }
  throw std::logic_error("sample_in_collar: rejection sampling starved");
}

CollarCheck verify_collar_escape(const GeneratorSystem& sys, const IndeterminacySet& dirs,
                                 const CollarParams& cp, int k, int samples,
                                 std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("verify_collar_escape: word length must be >= 1");
  CollarCheck res;
  res.samples = samples;
  res.word_length = k;
  res.required_ratio = std::ldexp(1.0, k - 1);
  res.min_ratio = std::numeric_limits<double>::infinity();
  res.pass = true;

  std::vector<Generator> word(k);
  for (int s = 0; s < samples; ++s) {
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(s));
    const Point2 z = sample_in_collar(dirs, cp, rng);
    // Uniform reduced word: free choice first, then 3 non-cancelling letters.
    word[0] = static_cast<Generator>(rng.next_below(4));
    for (int i = 1; i < k; ++i) {
      const unsigned step = rng.next_below(3);
      unsigned pick = 0, seen = 0;
      for (unsigned c = 0; c < 4; ++c) {
        if (static_cast<Generator>(c) == inverse(word[i - 1])) continue;
        if (seen++ == step) {
          pick = c;
          break;
        }
      }
      word[i] = static_cast<Generator>(pick);
    }
    double ratio;
    try {
      Point2 cur = z;
      for (const Generator g : word) cur = sys.apply(g, cur);
      ratio = norm(cur) / norm(z);
    } catch (const EscapeOverflow&) {
      ratio = std::numeric_limits<double>::infinity();
    }
    res.min_ratio = std::min(res.min_ratio, ratio);
    if (!(ratio > res.required_ratio) && !res.witness) {
      res.pass = false;
      res.witness = z;
      Word w;
      w.letters.assign(word.rbegin(), word.rend());
      res.witness_word = to_string(w);
    }
  }
  return res;
}

}  // namespace henlab
