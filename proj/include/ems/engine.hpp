#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ems/core.hpp"
#include "ems/levelset.hpp"
#include "ems/model.hpp"
#include "ems/raster.hpp"

namespace ems {

// Explicit narrowband evolution of phi_t = F * |grad phi| with adaptive time
// step, periodic redistancing and a mask-stability stopping rule.

struct EvolveParams {
  ModelKind kind;
  double dt_safety = 0.45;       // fraction of a pixel the front may move per step
  double band_beta = 6.0;        // narrowband half-width
  int reinit_every = 25;         // redistance cadence (iterations)
  int max_iters = 2000;
  double stop_flip_fraction = 1e-4;  // of total pixels, per iteration
  int stop_window = 10;              // consecutive quiet iterations to stop
  int snapshot_every = 0;            // 0 = no snapshots
  std::uint64_t seed = 0;            // echoed into run summaries

  void validate() const;
};

enum class Termination { Converged, MaxIters, FrontVanished };

std::string termination_name(Termination t);

struct TraceRow {
  int iter = 0;
  double energy = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  long long area_in = 0;
};

struct SegmentationResult {
  Mask final_mask;
  Grid final_phi;
  int iterations = 0;
  Termination termination = Termination::MaxIters;
  std::vector<TraceRow> trace;      // one row per completed iteration
  std::vector<Mask> snapshots;      // when snapshot_every > 0
  std::vector<int> reinit_iters;    // iterations after which phi was rebuilt
};

// phi + dt * speed * grad_mag; both fields are zero outside the band, so
// pixels away from the front are untouched.
Grid step(const Grid& phi, const VelocityField& vel, double dt);

SegmentationResult evolve(const GrayImage& img, const Grid& phi0,
                          const EvolveParams& params);
SegmentationResult evolve(const GrayImage& img, const InitSpec& init,
                          const EvolveParams& params);

}  // namespace ems
