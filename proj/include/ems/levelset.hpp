#pragma once

#include "ems/core.hpp"

#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace ems {

// One shape of an initial-front specification. The front is the union of
// all primitives; interior pixels carry phi < 0.
struct InitPrimitive {
  enum class Kind { Circle, Rect, CircleGrid, MaskFile };
  Kind kind = Kind::Circle;
  double cx = 0, cy = 0, r = 0;          // Circle
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0; // Rect corners, inclusive bounds
  int rows = 0, cols = 0;                // CircleGrid layout
  double spacing = 0;                    // CircleGrid centre spacing
  std::string mask_path;                 // MaskFile (non-zero = interior)
};

struct InitSpec {
  std::vector<InitPrimitive> primitives;

  // Mini-language: comma-joined primitives
  //   circle:cx,cy,r | rect:x0,y0,x1,y1 | grid:rows,cols,r,spacing | mask:PATH
  // e.g. "circle:40,40,12,circle:90,90,12". Throws Error on bad syntax.
  static InitSpec parse(const std::string& text);
};

// Exact signed distance to a centred circle, negative inside.
Grid circle_sdf(int width, int height, double cx, double cy, double r);

// Signed distance of the union of primitives (pointwise min), negative
// inside. Throws Error if the spec is empty or a primitive misses the
// domain entirely.
Grid init_from_spec(const InitSpec& spec, int width, int height);

// Interior predicate: phi < 0.
Mask interior_mask(const Grid& phi);

// Pixels 4-adjacent to a sign change of phi (both sides of the crossing).
std::vector<std::pair<int, int>> front_pixels(const Grid& phi);

// Rebuilds phi as the exact Euclidean distance to the linearly-interpolated
// zero-crossing point set of the input, keeping each pixel's input sign.
// Values beyond `clamp` are saturated to +/- clamp. Throws FrontVanished if
// the input has no zero crossing.
Grid redistance(const Grid& phi,
                double clamp = std::numeric_limits<double>::infinity());

// Pixels with |phi| <= beta as linear indices (y * width + x), ascending.
struct NarrowBand {
  std::vector<int> indices;
  double beta = 0;
};
NarrowBand narrow_band(const Grid& phi, double beta);

}  // namespace ems
