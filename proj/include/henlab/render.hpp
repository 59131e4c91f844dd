#pragma once

#include <cstdint>
#include <vector>

#include "henlab/dynamics.hpp"
#include "henlab/io.hpp"

namespace henlab {

// Two-real-parameter affine slice of C^2: point(s, t) = anchor + s u + t v
// with s, t running over (-1, 1) across the raster (pixel centers), so u
// and v are the half-extent vectors.
struct SliceSpec {
  Point2 anchor;
  Point2 u;
  Point2 v;
};

SliceSpec real_plane_slice(double extent);           // (Re x, Re y) plane
SliceSpec y_plane_slice(Complex x0, double extent);  // complex y-line at fixed x

Point2 slice_point(const SliceSpec& s, int width, int height, int ix, int iy);

// forward:  steps of h1 until the Euclidean norm exceeds escape_radius
// biorbit:  min of the forward and backward step counts (filled-Julia view)
// group:    min escape step over `words` sampled reduced words of length
//           word_length, an explicitly heuristic escape picture; per-pixel
//           letters come from substream(seed, pixel index)
enum class RenderMode { Forward, Biorbit, Group };

struct RenderSpec {
  SliceSpec slice;
  int width = 256;
  int height = 256;
  RenderMode mode = RenderMode::Forward;
  int budget = 60;             // step cap for forward/biorbit
  int word_length = 8;         // group word length, also the cap
  int words = 12;              // sampled words per pixel in group mode
  double escape_radius = 0.0;  // <= 0 means the system's certified radius
  std::uint64_t seed = 0;      // used by group mode only
};

// Escape steps per pixel: 0 for a start already beyond the radius, the cap
// when the budget runs out without escape.
struct Raster {
  int width = 0;
  int height = 0;
  int cap = 0;
  std::vector<std::uint16_t> values;  // row-major

  // maxval 255 when cap fits a byte, else 65535; raw step counts as samples.
  PgmImage to_pgm() const;
};

Raster render_escape_slice(const GeneratorSystem& sys, const RenderSpec& spec);

}  // namespace henlab
