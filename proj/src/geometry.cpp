#include "henlab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace henlab {

double SplitMix64::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_double() - 1.0;
    v = 2.0 * next_double() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double m = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * m;
  has_spare_ = true;
  return u * m;
}

bool is_finite(const Point2& z) {
  return std::isfinite(z.x.real()) && std::isfinite(z.x.imag()) &&
         std::isfinite(z.y.real()) && std::isfinite(z.y.imag());
}

double norm_sq(const Point2& z) { return std::norm(z.x) + std::norm(z.y); }

double norm(const Point2& z) { return std::sqrt(norm_sq(z)); }

double max_norm(const Point2& z) { return std::max(std::abs(z.x), std::abs(z.y)); }

Point2 rotate(double theta, const Point2& z) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {z.x * c - z.y * s, z.x * s + z.y * c};
}

namespace {

// Canonicalize in place: divide by the largest-modulus entry (ties -> lowest
// index) and pin that entry to exactly (1, 0). Division can bump another
// entry's modulus a hair above 1, which would move the pivot, so repeat until
// the pivot entry already is exactly (1, 0). Each pass pins one entry, hence
// the loop terminates in a couple of iterations.
template <std::size_t N>
void canonicalize(std::array<Complex, N>& v, const char* what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (!std::isfinite(v[i].real()) || !std::isfinite(v[i].imag()))
      throw std::invalid_argument(std::string(what) + ": non-finite coordinate");
  }
  for (int pass = 0; pass < 8; ++pass) {
    std::size_t pivot = 0;
    double best = std::abs(v[0]);
    for (std::size_t i = 1; i < N; ++i) {
      const double m = std::abs(v[i]);
      if (m > best) {
        best = m;
        pivot = i;
      }
    }
    if (best == 0.0) throw std::invalid_argument(std::string(what) + ": zero vector");
    if (v[pivot] == Complex(1.0, 0.0)) return;
    const Complex p = v[pivot];
    for (std::size_t i = 0; i < N; ++i) v[i] /= p;
    v[pivot] = Complex(1.0, 0.0);
  }
  // Unreachable: each pass strictly reduces the set of non-pinned maxima.
  throw std::logic_error(std::string(what) + ": canonical form did not settle");
}

}  // namespace

bool operator==(const ProjPoint& a, const ProjPoint& b) { return a.c == b.c; }
bool operator==(const Direction& a, const Direction& b) { return a.c == b.c; }

ProjPoint make_proj(Complex c0, Complex c1, Complex c2) {
  ProjPoint p{{c0, c1, c2}};
  canonicalize(p.c, "ProjPoint");
  return p;
}

Direction make_direction(Complex a, Complex b) {
  Direction d{{a, b}};
  canonicalize(d.c, "Direction");
  return d;
}

Direction direction_of(const Point2& z) { return make_direction(z.x, z.y); }

Direction rotate(double theta, const Direction& d) {
  const double c = std::cos(theta), s = std::sin(theta);
  return make_direction(d.c[0] * c - d.c[1] * s, d.c[0] * s + d.c[1] * c);
}

double chordal_distance(const Direction& u, const Direction& v) {
  const double num = std::abs(u.c[0] * v.c[1] - u.c[1] * v.c[0]);
  const double nu = std::hypot(std::abs(u.c[0]), std::abs(u.c[1]));
  const double nv = std::hypot(std::abs(v.c[0]), std::abs(v.c[1]));
  const double d = num / (nu * nv);
  return d > 1.0 ? 1.0 : d;
}

Direction random_direction(SplitMix64& rng) {
  for (;;) {
    const Complex a(rng.next_gaussian(), rng.next_gaussian());
    const Complex b(rng.next_gaussian(), rng.next_gaussian());
    if (std::norm(a) + std::norm(b) > 1e-12) return make_direction(a, b);
  }
}

}  // namespace henlab
