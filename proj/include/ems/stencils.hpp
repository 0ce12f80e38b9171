#pragma once

#include "ems/core.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace ems {

// Shared stencil settings: grid spacing and the curvature regularizer that
// keeps the denominator bounded away from zero at critical points.
struct StencilContext {
  double epsilon = 1e-8;
  double h = 1.0;
};

namespace detail {
template <typename Derived>
void require_interior(const Eigen::ArrayBase<Derived>& v, int x, int y) {
  if (x < 1 || y < 1 || x > static_cast<int>(v.cols()) - 2 ||
      y > static_cast<int>(v.rows()) - 2) {
    throw std::invalid_argument(
        "stencil evaluated at a border pixel; mirror-extend first");
  }
}
}  // namespace detail

// Second differences at interior pixels, h from ctx. Callers needing border
// values must mirror-extend (see curvature, which does so internally).
// Sums are grouped as (left + right) - 2 * centre: IEEE addition is
// commutative, so mirrored fields yield bit-identical second differences.
template <typename Derived>
double d2x(const Eigen::ArrayBase<Derived>& v, int x, int y,
           const StencilContext& ctx = {}) {
  detail::require_interior(v, x, y);
  return ((v(y, x + 1) + v(y, x - 1)) - 2.0 * v(y, x)) / (ctx.h * ctx.h);
}

template <typename Derived>
double d2y(const Eigen::ArrayBase<Derived>& v, int x, int y,
           const StencilContext& ctx = {}) {
  detail::require_interior(v, x, y);
  return ((v(y + 1, x) + v(y - 1, x)) - 2.0 * v(y, x)) / (ctx.h * ctx.h);
}

// Mixed derivative from the four diagonal neighbours, grouped as a sum of
// antisymmetric pairs so mirroring negates it exactly.
template <typename Derived>
double dxy(const Eigen::ArrayBase<Derived>& v, int x, int y,
           const StencilContext& ctx = {}) {
  detail::require_interior(v, x, y);
  return ((v(y + 1, x + 1) - v(y - 1, x + 1)) +
          (v(y - 1, x - 1) - v(y + 1, x - 1))) /
         (4.0 * ctx.h * ctx.h);
}

// Central first derivatives on the mirror-extended (reflect-101) grid, so
// the normal derivative vanishes at the border as the Neumann condition
// requires. Defined at every pixel.
template <typename Derived>
std::pair<double, double> central_gradient(const Eigen::ArrayBase<Derived>& v,
                                           int x, int y,
                                           const StencilContext& ctx = {}) {
  const int cols = static_cast<int>(v.cols());
  const int rows = static_cast<int>(v.rows());
  const double gx = (v(y, mirror_index(x + 1, cols)) -
                     v(y, mirror_index(x - 1, cols))) /
                    (2.0 * ctx.h);
  const double gy = (v(mirror_index(y + 1, rows), x) -
                     v(mirror_index(y - 1, rows), x)) /
                    (2.0 * ctx.h);
  return {gx, gy};
}

template <typename Derived>
double central_gradient_magnitude(const Eigen::ArrayBase<Derived>& v, int x,
                                  int y, const StencilContext& ctx = {}) {
  const auto [gx, gy] = central_gradient(v, x, y, ctx);
  return std::sqrt(gx * gx + gy * gy);
}

// Mean curvature of the level set through (x, y):
//   (vxx vy^2 - 2 vxy vx vy + vyy vx^2) / (vx^2 + vy^2 + eps^2)^(3/2).
// Samples mirror-extend across the border, so every pixel has a value.
// Positive for the signed-distance field of a disk interior (phi < 0
// inside), i.e. curve shortening shrinks such a front.
template <typename Derived>
double curvature(const Eigen::ArrayBase<Derived>& v, int x, int y,
                 const StencilContext& ctx = {}) {
  const int cols = static_cast<int>(v.cols());
  const int rows = static_cast<int>(v.rows());
  const int xm = mirror_index(x - 1, cols), xp = mirror_index(x + 1, cols);
  const int ym = mirror_index(y - 1, rows), yp = mirror_index(y + 1, rows);
  const double h2 = ctx.h * ctx.h;

  const double vx = (v(y, xp) - v(y, xm)) / (2.0 * ctx.h);
  const double vy = (v(yp, x) - v(ym, x)) / (2.0 * ctx.h);
  const double vxx = ((v(y, xp) + v(y, xm)) - 2.0 * v(y, x)) / h2;
  const double vyy = ((v(yp, x) + v(ym, x)) - 2.0 * v(y, x)) / h2;
  const double vxy = ((v(yp, xp) - v(ym, xp)) + (v(ym, xm) - v(yp, xm))) / (4.0 * h2);

  const double num = vxx * vy * vy - 2.0 * vxy * vx * vy + vyy * vx * vx;
  const double den = std::pow(vx * vx + vy * vy + ctx.epsilon * ctx.epsilon, 1.5);
  return num / den;
}

inline Grid curvature_field(const Grid& v, const StencilContext& ctx = {}) {
  Grid out(v.rows(), v.cols());
  for (int y = 0; y < static_cast<int>(v.rows()); ++y) {
    for (int x = 0; x < static_cast<int>(v.cols()); ++x) {
      out(y, x) = curvature(v, x, y, ctx);
    }
  }
  return out;
}

inline Grid central_gradient_magnitude_field(const Grid& v,
                                             const StencilContext& ctx = {}) {
  Grid out(v.rows(), v.cols());
  for (int y = 0; y < static_cast<int>(v.rows()); ++y) {
    for (int x = 0; x < static_cast<int>(v.cols()); ++x) {
      out(y, x) = central_gradient_magnitude(v, x, y, ctx);
    }
  }
  return out;
}

}  // namespace ems
