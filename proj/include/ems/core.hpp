#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace ems {

inline constexpr const char* kVersion = "0.1.0";

// Dense 2D fields are Eigen arrays in row-major order so that (row, col)
// indexing matches image (y, x) layout, with x = column and y = row.
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Grid = Plane<double>;
using Mask = Plane<std::uint8_t>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : Error {
  using Error::Error;
};

// Raised when a level-set state has an empty interior or exterior; callers
// treat it as a result state of the evolution, not as a crash.
struct FrontVanished : Error {
  using Error::Error;
};

// Order-insensitive accumulator: Neumaier compensation in long double keeps
// the rounded double result independent of traversal order, so mirrored
// grids reduce to bit-identical statistics.
class StableSum {
 public:
  void add(double x) {
    const long double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(static_cast<long double>(x))) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (static_cast<long double>(x) - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return static_cast<double>(sum_ + comp_); }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// Seeded generator with a pinned algorithm so noise fields replay across
// platforms. std::mt19937_64 output is fully specified by the standard; the
// uniform/normal transforms are implemented here because the standard
// library distributions are not.
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64/box-muller";

  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

  // Standard normal via Box-Muller; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Reflect-101 index mirroring: -1 -> 1, n -> n-2. Matches the Neumann
// boundary treatment used for all stencil evaluations.
inline int mirror_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * (n - 1);
  i = std::abs(i) % period;
  return i < n ? i : period - i;
}

}  // namespace ems
