#include "ems/verify.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "ems/levelset.hpp"
#include "ems/model.hpp"

namespace ems {

namespace {

struct Domain {
  std::vector<std::pair<int, int>> pixels;  // (x, y), row-major
  int x0 = 0, y0 = 0, x1 = -1, y1 = -1;     // bounding box
};

Domain collect_domain(const Mask& mask) {
  Domain d;
  d.x0 = static_cast<int>(mask.cols());
  d.y0 = static_cast<int>(mask.rows());
  for (int y = 0; y < mask.rows(); ++y)
    for (int x = 0; x < mask.cols(); ++x)
      if (mask(y, x) != 0) {
        d.pixels.emplace_back(x, y);
        d.x0 = std::min(d.x0, x);
        d.y0 = std::min(d.y0, y);
        d.x1 = std::max(d.x1, x);
        d.y1 = std::max(d.y1, y);
      }
  return d;
}

constexpr int kOffsets[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};

bool inside(const Mask& mask, int x, int y) {
  return x >= 0 && x < mask.cols() && y >= 0 && y < mask.rows() &&
         mask(y, x) != 0;
}

}  // namespace

Grid solve_poisson(const Mask& domain, const Grid& f, double tol,
                   int max_sweeps) {
  if (f.rows() != domain.rows() || f.cols() != domain.cols())
    throw Error("solve_poisson: source does not match the domain");
  if (tol <= 0.0) throw Error("solve_poisson: tol must be positive");
  const Domain d = collect_domain(domain);
  if (d.pixels.empty()) throw Error("solve_poisson: empty domain");

  bool has_interior = false;
  for (const auto& [x, y] : d.pixels) {
    bool all = true;
    for (const auto& o : kOffsets)
      all = all && inside(domain, x + o[0], y + o[1]);
    if (all) {
      has_interior = true;
      break;
    }
  }
  if (!has_interior) throw Error("solve_poisson: domain has no interior pixel");

  const int n = std::max(d.x1 - d.x0, d.y1 - d.y0) + 1;
  const double omega = 2.0 / (1.0 + std::sin(M_PI / (n + 1)));

  Grid u = Grid::Zero(domain.rows(), domain.cols());
  auto neighbor_sum = [&](int x, int y) {
    double s = 0.0;
    for (const auto& o : kOffsets) {
      const int X = x + o[0], Y = y + o[1];
      if (X >= 0 && X < u.cols() && Y >= 0 && Y < u.rows()) s += u(Y, X);
    }
    return s;
  };
  auto residual = [&]() {
    double r = 0.0;
    for (const auto& [x, y] : d.pixels)
      r = std::max(r, std::abs(f(y, x) + neighbor_sum(x, y) - 4.0 * u(y, x)));
    return r;
  };

  if (residual() <= tol) return u;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (const auto& [x, y] : d.pixels) {
      u(y, x) = (1.0 - omega) * u(y, x) +
                omega * (f(y, x) + neighbor_sum(x, y)) / 4.0;
    }
    if (residual() <= tol) return u;
  }
  throw Error("solve_poisson: no convergence within max_sweeps");
}

double Lemma1Result::relative_gap() const {
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
}

Lemma1Result lemma1_check(const Mask& domain, const Grid& f, double tol) {
  const Grid u = solve_poisson(domain, f, tol);
  StableSum lhs, rhs;
  for (int y = 0; y < domain.rows(); ++y)
    for (int x = 0; x < domain.cols(); ++x) {
      if (domain(y, x) == 0) continue;
      lhs.add(f(y, x));
      for (const auto& o : kOffsets) {
        if (inside(domain, x + o[0], y + o[1])) continue;
        // boundary face toward (x,y)+o; estimate the inward normal
        // derivative centered at the boundary pixel, falling back to the
        // plain face difference where the domain is one pixel thin
        const int xi = x - o[0], yi = y - o[1];
        if (inside(domain, xi, yi))
          rhs.add(u(yi, xi) / 2.0);
        else
          rhs.add(u(y, x));
      }
    }
  return Lemma1Result{lhs.value(), rhs.value()};
}

double DerivativePair::relative_error() const {
  return std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-300);
}

namespace {

double bilinear(const Grid& I, double x, double y) {
  const int w = static_cast<int>(I.cols()), h = static_cast<int>(I.rows());
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = std::min(static_cast<int>(x), w - 2);
  const int y0 = std::min(static_cast<int>(y), h - 2);
  const double fx = x - x0, fy = y - y0;
  return (1.0 - fy) * ((1.0 - fx) * I(y0, x0) + fx * I(y0, x0 + 1)) +
         fy * ((1.0 - fx) * I(y0 + 1, x0) + fx * I(y0 + 1, x0 + 1));
}

double circle_mean(const Grid& I, double cx, double cy, double r) {
  constexpr int kSamples = 4096;
  StableSum acc;
  for (int k = 0; k < kSamples; ++k) {
    const double th = 2.0 * M_PI * (k + 0.5) / kSamples;
    acc.add(bilinear(I, cx + r * std::cos(th), cy + r * std::sin(th)));
  }
  return acc.value() / kSamples;
}

}  // namespace

GateauxReport radial_gateaux_check(const GrayImage& img, double cx, double cy,
                                   double r, double delta, double lambda) {
  if (delta <= 0.0) throw Error("gateaux check: delta must be positive");
  if (r - delta <= 1.0) throw Error("gateaux check: inner circle too small");
  if (cx - r - delta < 0.0 || cx + r + delta > img.width() - 1 ||
      cy - r - delta < 0.0 || cy + r + delta > img.height() - 1)
    throw Error("gateaux check: circle leaves the image");

  const EdgeMap unit = uniform_edge_map(img.width(), img.height());
  const ModelKind kind{SegKind::MS, lambda, 1.0};

  auto at = [&](double rho) {
    const Grid phi = circle_sdf(img.width(), img.height(), cx, cy, rho);
    struct {
      RegionStats stats;
      double energy;
    } out{region_stats(img, phi),
          scalar_energy(img, phi, unit, kind)};
    return out;
  };

  const auto lo = at(r - delta), mid = at(r), hi = at(r + delta);

  GateauxReport rep;
  rep.r = r;
  rep.delta = delta;
  rep.energy.fd = (hi.energy - lo.energy) / (2.0 * delta);
  rep.mu1.fd = (hi.stats.mu1 - lo.stats.mu1) / (2.0 * delta);
  rep.mu2.fd = (hi.stats.mu2 - lo.stats.mu2) / (2.0 * delta);

  const double a = static_cast<double>(mid.stats.area_in);
  const double b = static_cast<double>(mid.stats.area_out);
  const double ibar = circle_mean(img.plane(), cx, cy, r);
  const double f_region =
      (mid.stats.mu2 - mid.stats.mu1) *
      ((ibar - mid.stats.mu1) / a + (ibar - mid.stats.mu2) / b);
  const double ring = 2.0 * M_PI * r;
  // growing r moves the curve against the inward normal, so d/dr of each
  // functional is +(its normal-speed density) integrated over the circle;
  // the curvature of the circle is 1/r
  rep.energy.analytic = ring * (f_region + lambda / r);
  rep.mu1.analytic = ring * (ibar - mid.stats.mu1) / a;
  rep.mu2.analytic = -ring * (ibar - mid.stats.mu2) / b;
  return rep;
}

}  // namespace ems
