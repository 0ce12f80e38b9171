#include "ems/engine.hpp"

#include <algorithm>
#include <cmath>

namespace ems {

void EvolveParams::validate() const {
  kind.validate();
  if (dt_safety <= 0.0 || dt_safety > 1.0)
    throw Error("evolve: dt_safety must lie in (0,1]");
  if (band_beta < 2.0) throw Error("evolve: band_beta must be at least 2");
  if (reinit_every <= 0) throw Error("evolve: reinit_every must be positive");
  if (max_iters < 0) throw Error("evolve: max_iters must be nonnegative");
  if (stop_flip_fraction <= 0.0)
    throw Error("evolve: stop_flip_fraction must be positive");
  if (stop_window < 1) throw Error("evolve: stop_window must be at least 1");
  if (snapshot_every < 0)
    throw Error("evolve: snapshot_every must be nonnegative");
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::Converged: return "converged";
    case Termination::MaxIters: return "max_iters";
    case Termination::FrontVanished: return "front_vanished";
  }
  return "?";
}

Grid step(const Grid& phi, const VelocityField& vel, double dt) {
  if (dt <= 0.0) throw Error("step: dt must be positive");
  return phi + dt * (vel.speed * vel.grad_mag);
}

namespace {

long long count_flips(const Mask& a, const Mask& b) {
  long long n = 0;
  for (int y = 0; y < a.rows(); ++y)
    for (int x = 0; x < a.cols(); ++x)
      if ((a(y, x) != 0) != (b(y, x) != 0)) ++n;
  return n;
}

}  // namespace

SegmentationResult evolve(const GrayImage& img, const Grid& phi0,
                          const EvolveParams& params) {
  params.validate();
  if (phi0.rows() != img.height() || phi0.cols() != img.width())
    throw Error("evolve: init field does not match the image");

  const double clamp = params.band_beta + 1.0;
  SegmentationResult res;

  Grid phi;
  try {
    phi = redistance(phi0, clamp);
  } catch (const FrontVanished&) {
    res.final_phi = phi0;
    res.final_mask = interior_mask(phi0);
    res.termination = Termination::FrontVanished;
    return res;
  }

  const EdgeMap edge = params.kind.kind == SegKind::EMS
                           ? edge_map(img, params.kind.sigma)
                           : uniform_edge_map(img.width(), img.height());

  NarrowBand band = narrow_band(phi, params.band_beta);
  Mask prev_mask = interior_mask(phi);
  const double total = static_cast<double>(img.width()) * img.height();
  const StencilContext ctx;

  int quiet_streak = 0;
  double drift = 0.0;  // pixels the front may have moved since last reinit
  res.termination = Termination::MaxIters;

  for (int iter = 0; iter < params.max_iters; ++iter) {
    RegionStats stats;
    double gbar = 1.0;
    try {
      stats = region_stats(img, phi);
      if (params.kind.kind == SegKind::EMS)
        gbar = mean_front_edge(edge, phi);
    } catch (const FrontVanished&) {
      res.termination = Termination::FrontVanished;
      break;
    }
    res.trace.push_back({iter,
                         scalar_energy_from(stats, gbar, curve_length(phi),
                                            params.kind.lambda),
                         stats.mu1, stats.mu2, stats.area_in});

    const VelocityField vel =
        velocity_field(img, phi, edge, stats, params.kind, band, ctx);
    double rate_max = 0.0;
    for (int idx : band.indices) {
      const int y = idx / img.width(), x = idx % img.width();
      rate_max =
          std::max(rate_max, std::abs(vel.speed(y, x) * vel.grad_mag(y, x)));
    }
    const double dt = params.dt_safety / (rate_max + 1e-12);
    phi = step(phi, vel, dt);
    res.iterations = iter + 1;
    drift += std::min(dt * rate_max, params.dt_safety);

    // Redistance on cadence, and early whenever the accumulated motion could
    // bring the front near the band edge where the stencils see clamped data.
    if ((iter + 1) % params.reinit_every == 0 ||
        drift >= params.band_beta - 2.0) {
      try {
        phi = redistance(phi, clamp);
      } catch (const FrontVanished&) {
        res.termination = Termination::FrontVanished;
        break;
      }
      band = narrow_band(phi, params.band_beta);
      drift = 0.0;
      res.reinit_iters.push_back(iter);
    }

    if (params.snapshot_every > 0 && (iter + 1) % params.snapshot_every == 0)
      res.snapshots.push_back(interior_mask(phi));

    Mask cur_mask = interior_mask(phi);
    const long long flips = count_flips(cur_mask, prev_mask);
    prev_mask = std::move(cur_mask);
    if (static_cast<double>(flips) < params.stop_flip_fraction * total) {
      if (++quiet_streak >= params.stop_window) {
        res.termination = Termination::Converged;
        break;
      }
    } else {
      quiet_streak = 0;
    }
  }

  res.final_phi = std::move(phi);
  res.final_mask = interior_mask(res.final_phi);
  return res;
}

SegmentationResult evolve(const GrayImage& img, const InitSpec& init,
                          const EvolveParams& params) {
  return evolve(img, init_from_spec(init, img.width(), img.height()), params);
}

}  // namespace ems
