#pragma once

#include "ems/core.hpp"

namespace ems {

// Overlap scores between binary masks. Empty-vs-empty counts as perfect
// agreement so runs whose front vanished stay scoreable.

struct MaskScore {
  double dice = 0.0;
  double jaccard = 0.0;
  long long flipped_pixels = 0;  // symmetric difference
};

double dice(const Mask& a, const Mask& b);
double jaccard(const Mask& a, const Mask& b);
MaskScore score_masks(const Mask& result, const Mask& truth);

}  // namespace ems
