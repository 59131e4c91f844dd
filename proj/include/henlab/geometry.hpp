#pragma once

#include <array>
#include <complex>

#include "henlab/rng.hpp"

namespace henlab {

using Complex = std::complex<double>;

// Point of C^2.
struct Point2 {
  Complex x{};
  Complex y{};
};

bool is_finite(const Point2& z);

// Euclidean norm of (x, y) viewed as a vector of R^4.
double norm(const Point2& z);
double norm_sq(const Point2& z);

// max(|x|, |y|); the filtration and bidisk tests use this one.
double max_norm(const Point2& z);

// R_theta(x, y) = (x cos t - y sin t, x sin t + y cos t), a rotation of C^2
// that commutes with |.| and with the chordal metric on directions.
Point2 rotate(double theta, const Point2& z);

// Point of CP^2 in canonical form: the entry of largest modulus (ties broken
// by lowest index) equals exactly (1, 0). Canonical reps of the same
// projective point compare equal bit for bit, so the coordinate axes and the
// line at infinity can be tested with ==.
struct ProjPoint {
  std::array<Complex, 3> c{};
};

bool operator==(const ProjPoint& a, const ProjPoint& b);

// Direction at infinity, a point of CP^1 in the same canonical form.
struct Direction {
  std::array<Complex, 2> c{};
};

bool operator==(const Direction& a, const Direction& b);

// Build canonical representatives. Throw std::invalid_argument when every
// coordinate is zero or any is non-finite.
ProjPoint make_proj(Complex c0, Complex c1, Complex c2);
Direction make_direction(Complex a, Complex b);

// Direction [x : y] of a nonzero point; throws on the origin.
Direction direction_of(const Point2& z);

Direction rotate(double theta, const Direction& d);

// Chordal metric d([a:b], [c:d]) = |ad - bc| / (|(a,b)| |(c,d)|), values in
// [0, 1]; 0 iff equal, 1 iff orthogonal. Invariant under rotate().
double chordal_distance(const Direction& u, const Direction& v);

// Uniform direction on CP^1 (Fubini-Study uniform): two complex Gaussians.
Direction random_direction(SplitMix64& rng);

}  // namespace henlab
