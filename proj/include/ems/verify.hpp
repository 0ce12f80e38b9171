#pragma once

#include "ems/core.hpp"
#include "ems/raster.hpp"

namespace ems {

// Numerical oracles for the model's derivative calculus: a Poisson-based
// divergence identity and radial directional-derivative checks of the
// energy and the region means.

// Solves -laplace(u) = f on {mask != 0} with u = 0 elsewhere (5-point
// stencil, SOR relaxation) to max-residual <= tol. Requires at least one
// pixel whose 4 neighbours all lie inside the domain.
Grid solve_poisson(const Mask& domain, const Grid& f, double tol = 1e-8,
                   int max_sweeps = 50000);

struct Lemma1Result {
  double lhs = 0.0;  // sum of f over the domain
  double rhs = 0.0;  // boundary flux of u
  double relative_gap() const;
};

// lhs = sum_domain f; rhs = sum over boundary faces of a one-sided estimate
// of the inward normal derivative of u. First-order boundary quadrature:
// the gap shrinks as the domain grows.
Lemma1Result lemma1_check(const Mask& domain, const Grid& f,
                          double tol = 1e-8);

struct DerivativePair {
  double fd = 0.0;
  double analytic = 0.0;
  double relative_error() const;
};

struct GateauxReport {
  DerivativePair energy;  // d/dr of the scalar energy (g == 1)
  DerivativePair mu1;     // d/dr of the interior mean
  DerivativePair mu2;     // d/dr of the exterior mean
  double r = 0.0;
  double delta = 0.0;
};

// Probe-circle center for the radial checks. Off-lattice so the pixel
// counts entering the finite differences don't jump in resonance with
// half-integer radii.
inline constexpr double kProbeCx = 64.2137;
inline constexpr double kProbeCy = 63.7383;

// Central finite differences of energy/mu1/mu2 over exact circle SDFs of
// radius r +- delta versus the analytic normal-speed quadrature at radius r:
//   dE/dr   = 2*pi*r * (F_region(r) + lambda/r)
//   dmu1/dr = 2*pi*r * (Ibar - mu1) / |in|
//   dmu2/dr = -2*pi*r * (Ibar - mu2) / |out|
// with Ibar the mean of I on the circle (bilinear samples) and F_region the
// region term of the normal speed built from brute-force pixel statistics.
GateauxReport radial_gateaux_check(const GrayImage& img, double cx, double cy,
                                   double r, double delta, double lambda);

}  // namespace ems
