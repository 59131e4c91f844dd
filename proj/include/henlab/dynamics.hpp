#pragma once

#include <optional>
#include <span>
#include <string>

#include "henlab/group.hpp"
#include "henlab/henon.hpp"

namespace henlab {

// Action of the four letters on C^2, with an escape certificate per letter.
// Two constructions:
//   rotation(preset):  H2 acts as R_theta^{-1} h1 R_theta; certificates read
//                      h1's filtration in the rotated frame, so both
//                      generators share one radius.
//   pair(m1, m2):      an arbitrary second Henon map with its own radius.
// Certificates use certified_filtration, so they are valid for the inverse
// letters as well.
class GeneratorSystem {
 public:
  static GeneratorSystem rotation(const GroupPreset& g, double lambda = 2.0);
  static GeneratorSystem pair(HenonMap m1, HenonMap m2, double lambda = 2.0);

  Point2 apply(Generator g, const Point2& z) const;

  // Word action: letters apply right to left (index back() first), matching
  // the composition order stored in Word.
  Point2 apply_word(const Word& w, const Point2& z) const;

  // True when z lies in the acting letter's outgoing region (VMinus for the
  // forward letters, VPlus for the inverses, in the letter's own frame).
  // From such a point, repeating that letter at least doubles the relevant
  // coordinate forever, so the orbit provably diverges.
  bool certifies(Generator g, const Point2& z) const;

  bool is_rotation() const { return rotated_; }
  double theta() const { return theta_; }
  const HenonMap& h1() const { return h1_; }
  const HenonMap& h2() const;  // pair systems only
  const Filtration& filtration1() const { return f1_; }
  const Filtration& filtration2() const { return f2_; }

 private:
  GeneratorSystem(HenonMap m1, std::optional<HenonMap> m2, bool rotated, double theta,
                  double lambda);

  HenonMap h1_;
  std::optional<HenonMap> h2_;
  bool rotated_;
  double theta_;
  Filtration f1_;
  Filtration f2_;
};

struct Trajectory {
  std::vector<Point2> points;       // points[0] is the start
  std::vector<Generator> letters;   // letters actually applied
  int escaped_at = -1;              // index of the first point with norm > max_norm
  bool escape_certified = false;    // that point passed certifies() for its letter
  bool overflowed = false;          // a coordinate left double range; escaped_at
                                    // then names the last finite point
};

// Applies the letters in order (letters[0] first) until they run out or the
// Euclidean norm exceeds max_norm. A start already beyond max_norm reports
// escaped_at = 0 without a certificate.
Trajectory orbit(const GeneratorSystem& sys, std::span<const Generator> letters,
                 const Point2& start, double max_norm);

// Truncated cone at infinity: membership means norm(z) >= inner_radius and
// chordal_distance(direction_of(z), axis) <= aperture.
struct Cone {
  Direction axis;
  double aperture;
  double inner_radius;
};

bool in_cone(const Cone& c, const Point2& z);

// W1..W4 with axes (qtilde, ptilde, q, p): the target cones of H2, H2Inv,
// H1, H1Inv in that order.
struct ConeSystem {
  std::array<Cone, 4> cones;
};

// Index of the cone a letter maps into.
constexpr int target_cone(Generator g) {
  constexpr int t[4] = {2, 0, 3, 1};  // H1->W3, H2->W1, H1Inv->W4, H2Inv->W2
  return t[static_cast<unsigned>(g)];
}

// The letter whose target W_i is.
constexpr Generator own_letter(int cone_index) {
  constexpr Generator o[4] = {Generator::H2, Generator::H2Inv, Generator::H1,
                              Generator::H1Inv};
  return o[cone_index];
}

// Letters required to at least double the norm on W_i and land in their
// target cone: every letter except the inverse of W_i's own letter (that one
// walks back toward the bounded region).
std::array<Generator, 3> doubling_letters(int cone_index);

// Radius log-uniform in [inner_radius, 1e3 * inner_radius], direction
// uniform over the chordal disk of the aperture, random global phase.
Point2 sample_in_cone(const Cone& c, SplitMix64& rng);

struct ConeCheck {
  bool pass = false;
  bool no_evidence = false;  // zero samples: vacuous pass
  int samples_per_pair = 0;
  double min_ratio = 0.0;  // smallest norm growth factor seen
  struct Failure {
    int cone;
    Generator letter;
    Point2 point;
    double ratio;
    bool left_target;  // transition check: image fell outside the target cone
  };
  std::optional<Failure> failure;
};

// Norm at least doubles: ||g z|| > 2 ||z|| for all z in W_i, g in
// doubling_letters(i).
ConeCheck verify_cone_doubling(const GeneratorSystem& sys, const ConeSystem& cs,
                               int samples_per_pair, std::uint64_t seed);

// Ping-pong transitions: g(W_i) lands inside W_{target_cone(g)}.
ConeCheck verify_cone_transitions(const GeneratorSystem& sys, const ConeSystem& cs,
                                  int samples_per_pair, std::uint64_t seed);

struct ConeSearch {
  double aperture_start = 0.3;
  double aperture_factor = 0.7;
  int aperture_steps = 6;
  double radius_cap = 1e6;
  int samples = 10000;
  std::uint64_t seed = 2024;
};

struct ConeSearchResult {
  std::optional<ConeSystem> system;
  std::string log;  // one line per rejected candidate, for NotFound reports
};

// Tries apertures descending from aperture_start (keeping the four cones
// pairwise disjoint) and inner radii doubling up from f.radius, and returns
// the first candidate passing both verifications on `samples` points per
// (cone, letter) pair.
ConeSearchResult build_cone_system(const GroupPreset& g, const Filtration& f,
                                   const ConeSearch& search);

// Collar at infinity avoiding the four axis directions: membership means
// norm(z) >= r_u and chordal distance at least beta to each of p, q, ptilde,
// qtilde. Every reduced word of length k grows norms by a factor beyond
// 2^{k-1} on it.
struct CollarParams {
  double r_u;
  double beta;
};

bool in_collar(const IndeterminacySet& dirs, const CollarParams& cp, const Point2& z);

// Uniform direction conditioned beta-away from the four axes, radius
// log-uniform in [r_u, 1e3 * r_u].
Point2 sample_in_collar(const IndeterminacySet& dirs, const CollarParams& cp, SplitMix64& rng);

struct CollarCheck {
  bool pass = false;
  int samples = 0;
  int word_length = 0;
  double required_ratio = 0.0;  // 2^{k-1}
  double min_ratio = 0.0;
  std::optional<Point2> witness;
  std::string witness_word;
};

// Draws (point, uniform reduced word of length k) pairs and checks
// ||S_k z|| / ||z|| > 2^{k-1} for every one of them.
CollarCheck verify_collar_escape(const GeneratorSystem& sys, const IndeterminacySet& dirs,
                                 const CollarParams& cp, int k, int samples,
                                 std::uint64_t seed);

}  // namespace henlab
