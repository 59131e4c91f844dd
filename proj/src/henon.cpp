#include "henlab/henon.hpp"

#include <cmath>
#include <numbers>

namespace henlab {

namespace {

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

Point2 checked(Point2 z) {
  if (!is_finite(z)) throw EscapeOverflow("henon image left the range of double");
  return z;
}

}  // namespace

HenonMap::HenonMap(std::vector<Complex> coefficients, Complex delta)
    : coefficients_(std::move(coefficients)), delta_(delta) {
  if (coefficients_.size() < 3)
    throw std::invalid_argument("HenonMap: deg P must be at least 2");
  for (const Complex& c : coefficients_)
    if (!finite(c)) throw std::invalid_argument("HenonMap: non-finite coefficient");
  if (coefficients_.back() == Complex(0.0))
    throw std::invalid_argument("HenonMap: leading coefficient must be nonzero");
  if (!finite(delta_) || delta_ == Complex(0.0))
    throw std::invalid_argument("HenonMap: delta must be finite and nonzero");
}

Complex HenonMap::eval_poly(Complex t) const {
  Complex acc = coefficients_.back();
  for (std::size_t i = coefficients_.size() - 1; i-- > 0;) acc = acc * t + coefficients_[i];
  return acc;
}

HenonMap HenonMap::inverse_form() const {
  std::vector<Complex> c(coefficients_);
  for (Complex& ci : c) ci /= delta_;
  return HenonMap(std::move(c), Complex(1.0) / delta_);
}

Point2 apply(const HenonMap& m, const Point2& z) {
  return checked({z.y, m.eval_poly(z.y) - m.delta() * z.x});
}

Point2 apply_inverse(const HenonMap& m, const Point2& z) {
  return checked({(m.eval_poly(z.x) - z.y) / m.delta(), z.x});
}

HenonMap translate_diagonal(const HenonMap& m, Complex a) {
  // Q(t) = P(t - a) + (delta + 1) a gives tau h tau^{-1} (x, y) = (y, Q(y) - delta x).
  const int d = m.degree();
  std::vector<Complex> q(d + 1, Complex(0.0));
  std::vector<double> binom(d + 1);
  for (int j = 0; j <= d; ++j) {
    binom[0] = 1.0;
    for (int i = 1; i <= j; ++i) binom[i] = binom[i - 1] * (j - i + 1) / i;
    Complex pw(1.0);  // (-a)^{j-i}, built from i = j downward
    for (int i = j; i >= 0; --i) {
      q[i] += m.coefficients()[j] * binom[i] * pw;
      pw *= -a;
    }
  }
  q[0] += (m.delta() + Complex(1.0)) * a;
  return HenonMap(std::move(q), m.delta());
}

std::optional<ProjPoint> apply_projective(const HenonMap& m, const ProjPoint& p) {
  const int d = m.degree();
  const Complex x0 = p.c[0], x1 = p.c[1], x2 = p.c[2];

  std::vector<Complex> pow1(d + 1), pow2(d + 1);
  pow1[0] = pow2[0] = Complex(1.0);
  for (int k = 1; k <= d; ++k) {
    pow1[k] = pow1[k - 1] * x1;
    pow2[k] = pow2[k - 1] * x2;
  }
  Complex pt(0.0);
  for (int i = 0; i <= d; ++i) pt += m.coefficients()[i] * pow1[i] * pow2[d - i];

  const Complex o0 = x1 * pow2[d - 1];
  const Complex o1 = pt - m.delta() * x0 * pow2[d - 1];
  const Complex o2 = pow2[d];

  // Canonical input coordinates are bounded by 1, so vanishing of all three
  // components to this tolerance happens only at [1:0:0].
  constexpr double kIndeterminate = 1e-14;
  if (std::abs(o0) < kIndeterminate && std::abs(o1) < kIndeterminate &&
      std::abs(o2) < kIndeterminate)
    return std::nullopt;
  return make_proj(o0, o1, o2);
}

ProjPoint indeterminacy_point() { return make_proj(1.0, 0.0, 0.0); }
ProjPoint infinity_attractor() { return make_proj(0.0, 1.0, 0.0); }

Region classify_region(const Filtration& f, const Point2& z) {
  const double ax = std::abs(z.x), ay = std::abs(z.y);
  if (ax <= f.radius && ay <= f.radius) return Region::V;
  return ay >= ax ? Region::VMinus : Region::VPlus;
}

Filtration filtration_radius(const HenonMap& m, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("filtration_radius: lambda must be >= 0");

  const auto& c = m.coefficients();
  const int d = m.degree();
  const double drag = std::abs(m.delta()) + lambda;
  // value(t) = |p_d| t^d - sum_{i<d} |p_i| t^i - (|delta| + lambda) t.
  // One sign change in the coefficient sequence, hence a single positive
  // root; value >= 0 exactly on [root, infinity).
  const auto value = [&](double t) {
    double v = std::abs(c[d]);
    for (int i = d - 1; i >= 0; --i) v = v * t - std::abs(c[i]);
    return v - drag * t;
  };

  double hi = 1.0;
  while (value(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e300) throw std::invalid_argument("filtration_radius: no finite radius");
  }
  double lo = hi * 0.5;
  while (lo > 1e-12 && value(lo) >= 0.0) {
    hi = lo;
    lo *= 0.5;
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) >= 0.0 ? hi : lo) = mid;
  }
  return {hi, lambda};
}

Filtration certified_filtration(const HenonMap& m, double lambda) {
  const double fwd = filtration_radius(m, lambda).radius;
  const double bwd = filtration_radius(m.inverse_form(), lambda).radius;
  return {std::max(fwd, bwd), lambda};
}

IndeterminacySet indeterminacy_set(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("indeterminacy_set: theta not finite");
  IndeterminacySet s{make_direction(1.0, 0.0), make_direction(0.0, 1.0),
                     rotate(-theta, make_direction(1.0, 0.0)),
                     rotate(-theta, make_direction(0.0, 1.0)), 0.0};
  const Direction all[4] = {s.p, s.q, s.ptilde, s.qtilde};
  double min_d = 1.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) min_d = std::min(min_d, chordal_distance(all[i], all[j]));
  s.min_pairwise = min_d;
  if (min_d <= 1e-9)
    throw std::invalid_argument(
        "indeterminacy_set: directions at infinity collide (theta too close to a multiple of pi/2)");
  return s;
}

GroupPreset::GroupPreset(HenonMap m, double t) : map(std::move(m)), theta(t) {
  if (!(t > 0.0) || !(t < 2 * std::numbers::pi))
    throw std::invalid_argument("GroupPreset: theta must lie in (0, 2 pi)");
  indeterminacy_set(t);
}

Point2 apply_h2(const GroupPreset& g, const Point2& z) {
  return rotate(-g.theta, apply(g.map, rotate(g.theta, z)));
}

Point2 apply_h2_inverse(const GroupPreset& g, const Point2& z) {
  return rotate(-g.theta, apply_inverse(g.map, rotate(g.theta, z)));
}

}  // namespace henlab
