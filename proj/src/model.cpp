#include "ems/model.hpp"

#include <cmath>

namespace ems {

SegKind parse_seg_kind(const std::string& name) {
  if (name == "ms") return SegKind::MS;
  if (name == "ems") return SegKind::EMS;
  throw Error("unknown model kind: " + name);
}

std::string seg_kind_name(SegKind kind) {
  return kind == SegKind::MS ? "ms" : "ems";
}

void ModelKind::validate() const {
  if (lambda < 0.0) throw Error("model: lambda must be nonnegative");
  if (kind == SegKind::EMS && sigma <= 0.0)
    throw Error("model: sigma must be positive");
}

EdgeMap edge_map(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) throw Error("edge_map: sigma must be positive");
  auto [gx, gy] = gradient(img.plane());
  const Grid sx = gaussian_convolve_field(gx, sigma);
  const Grid sy = gaussian_convolve_field(gy, sigma);
  Grid g(img.height(), img.width());
  for (int y = 0; y < g.rows(); ++y)
    for (int x = 0; x < g.cols(); ++x) {
      const double m = std::sqrt(sx(y, x) * sx(y, x) + sy(y, x) * sy(y, x));
      g(y, x) = 1.0 / (1.0 + kEdgeGain * m);
    }
  return EdgeMap{std::move(g)};
}

EdgeMap uniform_edge_map(int width, int height) {
  return EdgeMap{Grid::Ones(height, width)};
}

RegionStats region_stats(const GrayImage& img, const Grid& phi) {
  if (phi.rows() != img.height() || phi.cols() != img.width())
    throw Error("region_stats: phi does not match the image");
  StableSum in_sum, out_sum;
  long long in_n = 0, out_n = 0;
  const Grid& I = img.plane();
  for (int y = 0; y < phi.rows(); ++y)
    for (int x = 0; x < phi.cols(); ++x) {
      if (phi(y, x) < 0.0) {
        in_sum.add(I(y, x));
        ++in_n;
      } else {
        out_sum.add(I(y, x));
        ++out_n;
      }
    }
  if (in_n == 0 || out_n == 0)
    throw FrontVanished(in_n == 0 ? "interior is empty" : "exterior is empty");
  RegionStats s;
  s.area_in = in_n;
  s.area_out = out_n;
  s.mu1 = in_sum.value() / static_cast<double>(in_n);
  s.mu2 = out_sum.value() / static_cast<double>(out_n);
  return s;
}

double curve_length(const Grid& phi) {
  StableSum acc;
  StencilContext ctx;
  const double eps = kLenEpsilon;
  for (int y = 0; y < phi.rows(); ++y)
    for (int x = 0; x < phi.cols(); ++x) {
      const double t = phi(y, x);
      if (t <= -eps || t >= eps) continue;
      const double delta =
          (1.0 + std::cos(M_PI * t / eps)) / (2.0 * eps);
      acc.add(delta * central_gradient_magnitude(phi, x, y, ctx));
    }
  return acc.value();
}

double mean_front_edge(const EdgeMap& edge, const Grid& phi) {
  const auto front = front_pixels(phi);
  if (front.empty()) throw FrontVanished("no zero crossing");
  StableSum acc;
  for (const auto& [x, y] : front) acc.add(edge.g(y, x));
  return acc.value() / static_cast<double>(front.size());
}

double scalar_energy_from(const RegionStats& stats, double front_edge_mean,
                          double length, double lambda) {
  const double d = stats.mu1 - stats.mu2;
  return -0.5 * front_edge_mean * d * d + lambda * length;
}

double scalar_energy(const GrayImage& img, const Grid& phi,
                     const EdgeMap& edge, const ModelKind& kind) {
  kind.validate();
  const RegionStats stats = region_stats(img, phi);
  const double gbar =
      kind.kind == SegKind::MS ? 1.0 : mean_front_edge(edge, phi);
  return scalar_energy_from(stats, gbar, curve_length(phi), kind.lambda);
}

VelocityField velocity_field(const GrayImage& img, const Grid& phi,
                             const EdgeMap& edge, const RegionStats& stats,
                             const ModelKind& kind, const NarrowBand& band,
                             const StencilContext& ctx) {
  kind.validate();
  if (band.indices.empty()) throw FrontVanished("narrow band is empty");
  const int w = static_cast<int>(phi.cols());
  const Grid& I = img.plane();
  const double a = static_cast<double>(stats.area_in);
  const double b = static_cast<double>(stats.area_out);
  const double dmu = stats.mu2 - stats.mu1;
  VelocityField out;
  out.speed = Grid::Zero(phi.rows(), phi.cols());
  out.grad_mag = Grid::Zero(phi.rows(), phi.cols());
  for (int idx : band.indices) {
    const int y = idx / w, x = idx % w;
    const double gv = kind.kind == SegKind::MS ? 1.0 : edge.g(y, x);
    const double pull =
        (I(y, x) - stats.mu1) / a + (I(y, x) - stats.mu2) / b;
    const double kappa = curvature(phi, x, y, ctx);
    out.speed(y, x) = gv * dmu * pull + kind.lambda * kappa;
    out.grad_mag(y, x) = central_gradient_magnitude(phi, x, y, ctx);
  }
  return out;
}

}  // namespace ems
