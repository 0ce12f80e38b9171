#include <cmath>

#include "doctest.h"
#include "ems/core.hpp"
#include "ems/metrics.hpp"

namespace {

ems::Mask random_mask(int w, int h, std::uint64_t seed, double fill) {
  ems::Mask m(h, w);
  ems::Rng rng(seed);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      m(y, x) = rng.uniform01() < fill ? 1 : 0;
  return m;
}

}  // namespace

TEST_CASE("dice and jaccard agree on the textbook identity") {
  const ems::Mask a = random_mask(64, 48, 3, 0.4);
  const ems::Mask b = random_mask(64, 48, 4, 0.6);
  const double d = ems::dice(a, b);
  const double j = ems::jaccard(a, b);
  CHECK(d == doctest::Approx(2.0 * j / (1.0 + j)).epsilon(1e-14));
}

TEST_CASE("overlap scores are symmetric and bounded") {
  const ems::Mask a = random_mask(32, 32, 5, 0.3);
  const ems::Mask b = random_mask(32, 32, 6, 0.7);
  CHECK(ems::dice(a, b) == ems::dice(b, a));
  CHECK(ems::jaccard(a, b) == ems::jaccard(b, a));
  CHECK(ems::dice(a, b) >= 0.0);
  CHECK(ems::dice(a, b) <= 1.0);
}

TEST_CASE("identical masks score 1, disjoint masks score 0") {
  const ems::Mask a = random_mask(20, 20, 8, 0.5);
  CHECK(ems::dice(a, a) == 1.0);
  CHECK(ems::jaccard(a, a) == 1.0);

  ems::Mask left(10, 10), right(10, 10);
  left.setZero();
  right.setZero();
  left(3, 2) = 1;
  right(7, 8) = 1;
  CHECK(ems::dice(left, right) == 0.0);
  CHECK(ems::jaccard(left, right) == 0.0);
}

TEST_CASE("two empty masks are perfectly matched") {
  ems::Mask a(8, 8), b(8, 8);
  a.setZero();
  b.setZero();
  CHECK(ems::dice(a, b) == 1.0);
  CHECK(ems::jaccard(a, b) == 1.0);
}

TEST_CASE("score_masks reports the exact symmetric difference") {
  const ems::Mask a = random_mask(40, 30, 11, 0.45);
  const ems::Mask b = random_mask(40, 30, 12, 0.55);
  const ems::MaskScore s = ems::score_masks(a, b);

  long long na = 0, nb = 0, both = 0, sym = 0;
  for (int y = 0; y < 30; ++y) {
    for (int x = 0; x < 40; ++x) {
      const bool ia = a(y, x) != 0, ib = b(y, x) != 0;
      na += ia;
      nb += ib;
      both += ia && ib;
      sym += ia != ib;
    }
  }
  CHECK(s.flipped_pixels == sym);
  CHECK(s.dice == doctest::Approx(2.0 * both / double(na + nb)).epsilon(1e-14));
  CHECK(s.jaccard ==
        doctest::Approx(double(both) / double(na + nb - both)).epsilon(1e-14));
}

TEST_CASE("mismatched shapes are rejected") {
  ems::Mask a(8, 8), b(8, 9);
  a.setZero();
  b.setZero();
  CHECK_THROWS_AS(ems::dice(a, b), ems::Error);
  CHECK_THROWS_AS(ems::score_masks(a, b), ems::Error);
}
