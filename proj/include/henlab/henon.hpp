#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "henlab/geometry.hpp"

namespace henlab {

// Thrown when an image coordinate leaves the range of double. Iterating
// callers catch it and treat the orbit as escaped to infinity.
struct EscapeOverflow : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Generalized Henon map
//   h(x, y) = (y, P(y) - delta * x),   deg P = d >= 2,  delta != 0,
// a polynomial automorphism of C^2 with inverse
//   h^{-1}(x, y) = ((P(x) - y) / delta, x).
// Coefficients are stored low to high; the leading one must be nonzero.
class HenonMap {
 public:
  HenonMap(std::vector<Complex> coefficients, Complex delta);

  int degree() const { return static_cast<int>(coefficients_.size()) - 1; }
  const std::vector<Complex>& coefficients() const { return coefficients_; }
  Complex delta() const { return delta_; }

  Complex eval_poly(Complex t) const;

  // The map k(x, y) = (y, P(y)/delta - x/delta). Conjugating k by the
  // coordinate swap gives h^{-1}, so k's filtration radius bounds the region
  // where backward orbits of h provably grow.
  HenonMap inverse_form() const;

 private:
  std::vector<Complex> coefficients_;
  Complex delta_;
};

// Throw EscapeOverflow when the image is not finite.
Point2 apply(const HenonMap& m, const Point2& z);
Point2 apply_inverse(const HenonMap& m, const Point2& z);

// tau h tau^{-1} for the diagonal translation tau(x, y) = (x + a, y + a).
// Keeps the Henon form, the degree and delta; moves every bounded orbit by
// (a, a).
HenonMap translate_diagonal(const HenonMap& m, Complex a);

// Birational extension of h to CP^2 in the chart [x : y : t]:
//   [x0 : x1 : x2] -> [x1 x2^{d-1} : Pt(x1, x2) - delta x0 x2^{d-1} : x2^d],
// Pt the homogenization of P. The empty result marks the indeterminacy point
// [1:0:0]: all three output components have modulus below 1e-14 once the
// input is in canonical form. Every other point of the line at infinity maps
// to [0:1:0].
std::optional<ProjPoint> apply_projective(const HenonMap& m, const ProjPoint& p);

ProjPoint indeterminacy_point();  // [1:0:0]
ProjPoint infinity_attractor();   // [0:1:0]

// Escape filtration at radius R:
//   V      = {max(|x|, |y|) <= R}
//   VMinus = {|y| > R and |y| >= |x|}   (forward escape region)
//   VPlus  = {|x| > R and |x| > |y|}    (backward escape region)
struct Filtration {
  double radius;
  double lambda;
};

enum class Region { V, VPlus, VMinus };

Region classify_region(const Filtration& f, const Point2& z);

// Smallest R (to within 1e-9) such that for all t >= R
//   |p_d| t^d - sum_{i<d} |p_i| t^i - |delta| t >= lambda * t.
// On VMinus this inequality gives |y'| >= lambda |y| for the image
// (x', y') = h(x, y), so with lambda >= 2 the second coordinate at least
// doubles per step and VMinus is forward invariant. Requires lambda >= 0.
Filtration filtration_radius(const HenonMap& m, double lambda = 2.0);

// max of the radii of m and m.inverse_form(): one radius that certifies
// forward growth on VMinus and backward growth on VPlus simultaneously.
Filtration certified_filtration(const HenonMap& m, double lambda = 2.0);

// The four directions at infinity attached to the pair (h1, h2):
// p = [1:0] and q = [0:1] (indeterminacy points of h1^{-1} resp. h1) and
// their rotated copies ptilde = R_theta^{-1} p, qtilde = R_theta^{-1} q.
struct IndeterminacySet {
  Direction p, q, ptilde, qtilde;
  double min_pairwise;
};

// Validates pairwise distinctness (chordal distance > 1e-9), which rejects
// theta in {0, pi/2, pi, 3pi/2} where the rotated directions collide with
// the originals.
IndeterminacySet indeterminacy_set(double theta);

// Two-generator preset: h1 as given, h2 = R_theta^{-1} h1 R_theta.
// Constructor validates the map, theta in (0, 2pi) and the distinctness of
// the four directions at infinity.
struct GroupPreset {
  HenonMap map;
  double theta;

  GroupPreset(HenonMap m, double t);
};

Point2 apply_h2(const GroupPreset& g, const Point2& z);
Point2 apply_h2_inverse(const GroupPreset& g, const Point2& z);

}  // namespace henlab
