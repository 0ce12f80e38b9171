#include "ems/metrics.hpp"

namespace ems {

namespace {

struct Overlap {
  long long na = 0, nb = 0, both = 0;
};

Overlap overlap(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error("mask dimensions do not match");
  Overlap o;
  for (int y = 0; y < a.rows(); ++y)
    for (int x = 0; x < a.cols(); ++x) {
      const bool ia = a(y, x) != 0, ib = b(y, x) != 0;
      o.na += ia;
      o.nb += ib;
      o.both += ia && ib;
    }
  return o;
}

}  // namespace

double dice(const Mask& a, const Mask& b) {
  const Overlap o = overlap(a, b);
  if (o.na + o.nb == 0) return 1.0;
  return 2.0 * static_cast<double>(o.both) /
         static_cast<double>(o.na + o.nb);
}

double jaccard(const Mask& a, const Mask& b) {
  const Overlap o = overlap(a, b);
  const long long uni = o.na + o.nb - o.both;
  if (uni == 0) return 1.0;
  return static_cast<double>(o.both) / static_cast<double>(uni);
}

MaskScore score_masks(const Mask& result, const Mask& truth) {
  const Overlap o = overlap(result, truth);
  MaskScore s;
  const long long uni = o.na + o.nb - o.both;
  s.dice = (o.na + o.nb == 0)
               ? 1.0
               : 2.0 * static_cast<double>(o.both) /
                     static_cast<double>(o.na + o.nb);
  s.jaccard = (uni == 0) ? 1.0
                         : static_cast<double>(o.both) /
                               static_cast<double>(uni);
  s.flipped_pixels = o.na + o.nb - 2 * o.both;
  return s;
}

}  // namespace ems
