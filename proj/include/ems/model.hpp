#pragma once

#include <string>

#include "ems/core.hpp"
#include "ems/levelset.hpp"
#include "ems/raster.hpp"
#include "ems/stencils.hpp"

namespace ems {

// Region statistics, edge function, the monitored scalar energy and the
// normal-speed field of the evolution PDE. Intensities live in [0,1] with
// phi < 0 inside the front.

enum class SegKind { MS, EMS };

SegKind parse_seg_kind(const std::string& name);
std::string seg_kind_name(SegKind kind);

struct ModelKind {
  SegKind kind = SegKind::EMS;
  double lambda = 1e-4;  // length weight; see edge_map note on scaling
  double sigma = 1.0;    // edge-smoothing scale (EMS only)

  void validate() const;
};

struct RegionStats {
  double mu1 = 0.0;  // mean intensity over {phi < 0}
  double mu2 = 0.0;  // mean intensity over {phi >= 0}
  long long area_in = 0;
  long long area_out = 0;
};

struct EdgeMap {
  Grid g;  // in (0,1]; identically 1 for MS
};

// Gradient magnitude of I is measured on the conventional 0..255 gray
// scale (intensities here are I/255), so the denominator uses a 255 gain;
// without it g never drops low enough to act as an edge barrier.
inline constexpr double kEdgeGain = 255.0;

// g = 1 / (1 + kEdgeGain * |G_sigma * grad I|); differentiation commutes
// with the convolution, and taking the gradient first keeps g exactly
// invariant under constant intensity shifts.
EdgeMap edge_map(const GrayImage& img, double sigma);
EdgeMap uniform_edge_map(int width, int height);

// Means/areas of the two phases. Throws FrontVanished when a phase is empty.
RegionStats region_stats(const GrayImage& img, const Grid& phi);

// Support half-width of the smoothed delta used by curve_length.
inline constexpr double kLenEpsilon = 1.5;

// Sum of delta_eps(phi)*|grad phi|; approximates the front length when phi
// is close to a signed distance function.
double curve_length(const Grid& phi);

// Mean of g over pixels adjacent to a sign change of phi. Throws
// FrontVanished when there is no front.
double mean_front_edge(const EdgeMap& edge, const Grid& phi);

// Monitored scalar: -1/2 * gbar * (mu1-mu2)^2 + lambda * curve_length.
// gbar is mean_front_edge for EMS and exactly 1 for MS.
double scalar_energy(const GrayImage& img, const Grid& phi,
                     const EdgeMap& edge, const ModelKind& kind);
double scalar_energy_from(const RegionStats& stats, double front_edge_mean,
                          double length, double lambda);

struct VelocityField {
  Grid speed;     // normal speed F; zero outside the band
  Grid grad_mag;  // |grad phi| by central differences; zero outside the band
};

// F = g*(mu2-mu1)*((I-mu1)/|in| + (I-mu2)/|out|) + lambda*curvature at each
// band pixel (g == 1 for MS). Positive F moves the front inward.
VelocityField velocity_field(const GrayImage& img, const Grid& phi,
                             const EdgeMap& edge, const RegionStats& stats,
                             const ModelKind& kind, const NarrowBand& band,
                             const StencilContext& ctx = {});

}  // namespace ems
