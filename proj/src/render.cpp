#include "henlab/render.hpp"

#include <algorithm>
#include <stdexcept>

namespace henlab {

SliceSpec real_plane_slice(double extent) {
  if (!(extent > 0.0)) throw std::invalid_argument("slice: extent must be positive");
  return {{0.0, 0.0}, {extent, 0.0}, {0.0, extent}};
}

SliceSpec y_plane_slice(Complex x0, double extent) {
  if (!(extent > 0.0)) throw std::invalid_argument("slice: extent must be positive");
  return {{x0, 0.0}, {0.0, Complex(extent, 0.0)}, {0.0, Complex(0.0, extent)}};
}

Point2 slice_point(const SliceSpec& s, int width, int height, int ix, int iy) {
  const double a = 2.0 * (ix + 0.5) / width - 1.0;
  const double b = 2.0 * (iy + 0.5) / height - 1.0;
  return {s.anchor.x + a * s.u.x + b * s.v.x, s.anchor.y + a * s.u.y + b * s.v.y};
}

namespace {

bool degenerate(const Point2& d) { return norm(d) == 0.0 || !is_finite(d); }

// First step whose image leaves the radius, 0 for a start already outside,
// cap when the budget is exhausted. Overflow counts as having left.
template <typename Step>
int escape_steps(Point2 z, double radius, int cap, Step step) {
  if (norm(z) > radius) return 0;
  for (int s = 1; s <= cap; ++s) {
    try {
      z = step(z);
    } catch (const EscapeOverflow&) {
      return s;
    }
    if (norm(z) > radius) return s;
  }
  return cap;
}

}  // namespace

PgmImage Raster::to_pgm() const {
  PgmImage img;
  img.width = width;
  img.height = height;
  img.maxval = cap <= 255 ? 255 : 65535;
  img.pixels = values;
  return img;
}

Raster render_escape_slice(const GeneratorSystem& sys, const RenderSpec& spec) {
  if (spec.width < 1 || spec.height < 1)
    throw std::invalid_argument("render: raster dimensions must be positive");
  if (degenerate(spec.slice.u) || degenerate(spec.slice.v) || !is_finite(spec.slice.anchor))
    throw std::invalid_argument("render: degenerate slice");
  const int cap = spec.mode == RenderMode::Group ? spec.word_length : spec.budget;
  if (cap < 1 || cap > 65535)
    throw std::invalid_argument("render: step cap must be in [1, 65535]");
  if (spec.mode == RenderMode::Group && spec.words < 1)
    throw std::invalid_argument("render: group mode needs at least one word");
  const double radius =
      spec.escape_radius > 0.0 ? spec.escape_radius : sys.filtration1().radius;

  const HenonMap& m = sys.h1();
  Raster r;
  r.width = spec.width;
  r.height = spec.height;
  r.cap = cap;
  r.values.resize(static_cast<std::size_t>(spec.width) * spec.height);

  for (int iy = 0; iy < spec.height; ++iy) {
    for (int ix = 0; ix < spec.width; ++ix) {
      const Point2 z = slice_point(spec.slice, spec.width, spec.height, ix, iy);
      const std::size_t pixel = static_cast<std::size_t>(iy) * spec.width + ix;
      int value = cap;
      switch (spec.mode) {
        case RenderMode::Forward:
          value = escape_steps(z, radius, cap, [&](const Point2& p) { return apply(m, p); });
          break;
        case RenderMode::Biorbit: {
          const int fwd =
              escape_steps(z, radius, cap, [&](const Point2& p) { return apply(m, p); });
          const int bwd = escape_steps(z, radius, cap,
                                       [&](const Point2& p) { return apply_inverse(m, p); });
          value = std::min(fwd, bwd);
          break;
        }
        case RenderMode::Group: {
          SplitMix64 rng = substream(spec.seed, static_cast<std::uint64_t>(pixel));
          value = cap;
          for (int w = 0; w < spec.words && value > 0; ++w) {
            // Reduced word in application order: never step back.
            Generator prev{};
            bool first = true;
            Point2 p = z;
            int steps = cap;
            if (norm(p) > radius) {
              value = 0;
              break;
            }
            for (int s = 1; s <= spec.word_length; ++s) {
              Generator g;
              if (first) {
                g = static_cast<Generator>(rng.next_below(4));
                first = false;
              } else {
                auto pick = rng.next_below(3);
                g = static_cast<Generator>((static_cast<unsigned>(inverse(prev)) + 1 + pick) & 3u);
              }
              prev = g;
              bool gone = false;
              try {
                p = sys.apply(g, p);
              } catch (const EscapeOverflow&) {
                gone = true;
              }
              if (gone || norm(p) > radius) {
                steps = s;
                break;
              }
            }
            value = std::min(value, steps);
          }
          break;
        }
      }
      r.values[pixel] = static_cast<std::uint16_t>(value);
    }
  }
  return r;
}

}  // namespace henlab
