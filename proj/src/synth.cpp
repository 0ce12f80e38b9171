#include "ems/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ems {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(what);
}

void check_rect(const RectShape& rc, int w, int h, const std::string& name) {
  require(rc.x0 <= rc.x1 && rc.y0 <= rc.y1, name + ": corners out of order");
  require(rc.x0 >= 0 && rc.y0 >= 0 && rc.x1 < w && rc.y1 < h,
          name + ": rectangle outside image bounds");
}

void check_disk(const DiskShape& d, int w, int h, const std::string& name) {
  require(d.r > 0.0, name + ": radius must be positive");
  require(d.cx - d.r >= 0.0 && d.cx + d.r <= w - 1 && d.cy - d.r >= 0.0 &&
              d.cy + d.r <= h - 1,
          name + ": disk outside image bounds");
}

void check_intensity(double v, const std::string& name) {
  require(v >= 0.0 && v <= 1.0, name + ": intensity outside [0,1]");
}

void check_distinct(const std::vector<double>& vals) {
  std::set<double> uniq(vals.begin(), vals.end());
  require(uniq.size() == vals.size(), "scene: duplicate region intensities");
}

Mask paint_rect(Grid& img, const RectShape& rc, double value) {
  Mask m = Mask::Zero(img.rows(), img.cols());
  for (int y = rc.y0; y <= rc.y1; ++y)
    for (int x = rc.x0; x <= rc.x1; ++x) {
      img(y, x) = value;
      m(y, x) = 1;
    }
  return m;
}

Mask paint_disk(Grid& img, const DiskShape& d, double value) {
  Mask m = Mask::Zero(img.rows(), img.cols());
  for (int y = 0; y < img.rows(); ++y)
    for (int x = 0; x < img.cols(); ++x) {
      const double dx = x - d.cx, dy = y - d.cy;
      if (dx * dx + dy * dy <= d.r * d.r) {
        img(y, x) = value;
        m(y, x) = 1;
      }
    }
  return m;
}

void require_populated(const Mask& m, const std::string& name) {
  require(m.cast<int>().sum() > 0, name + ": ground-truth mask is empty");
}

}  // namespace

SceneKind parse_scene_kind(const std::string& name) {
  if (name == "bimodal" || name == "bimodal_disk") return SceneKind::BimodalDisk;
  if (name == "triple_junction") return SceneKind::TripleJunction;
  if (name == "four_region") return SceneKind::FourRegion;
  if (name == "custom") return SceneKind::Custom;
  throw Error("unknown scene kind: " + name);
}

std::string scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::BimodalDisk: return "bimodal_disk";
    case SceneKind::TripleJunction: return "triple_junction";
    case SceneKind::FourRegion: return "four_region";
    case SceneKind::Custom: return "custom";
  }
  return "?";
}

bool Scene::has_truth(const std::string& name) const {
  for (const auto& t : truths)
    if (t.name == name) return true;
  return false;
}

const Mask& Scene::truth(const std::string& name) const {
  for (const auto& t : truths)
    if (t.name == name) return t.mask;
  throw Error("scene has no ground truth named '" + name + "'");
}

Scene make_scene(const SceneSpec& spec) {
  require(spec.width >= 3 && spec.height >= 3, "scene: image too small");
  Grid img(spec.height, spec.width);
  std::vector<NamedMask> truths;

  switch (spec.kind) {
    case SceneKind::BimodalDisk: {
      check_disk(spec.disk, spec.width, spec.height, "bimodal_disk");
      check_intensity(spec.iota1, "iota1");
      check_intensity(spec.iota2, "iota2");
      check_distinct({spec.iota1, spec.iota2});
      img.setConstant(spec.iota2);
      Mask disk = paint_disk(img, spec.disk, spec.iota1);
      require_populated(disk, "disk");
      truths.push_back({"disk", std::move(disk)});
      break;
    }
    case SceneKind::TripleJunction: {
      check_rect(spec.square, spec.width, spec.height, "triple_junction");
      require(spec.split_x > spec.square.x0 && spec.split_x <= spec.square.x1,
              "triple_junction: split must leave both parts nonempty");
      img.setConstant(spec.background);
      RectShape black = spec.square;
      black.x1 = spec.split_x - 1;
      RectShape white = spec.square;
      white.x0 = spec.split_x;
      Mask bm = paint_rect(img, black, 0.0);
      Mask wm = paint_rect(img, white, 1.0);
      check_distinct({spec.background, 0.0, 1.0});
      Mask sq = Mask::Zero(spec.height, spec.width);
      sq = (bm + wm).eval();
      require_populated(sq, "square");
      truths.push_back({"square", std::move(sq)});
      truths.push_back({"black", std::move(bm)});
      truths.push_back({"white", std::move(wm)});
      break;
    }
    case SceneKind::FourRegion: {
      check_rect(spec.black_rect, spec.width, spec.height, "four_region");
      check_rect(spec.white_rect, spec.width, spec.height, "four_region");
      require(spec.black_rect.x1 < spec.white_rect.x0 ||
                  spec.white_rect.x1 < spec.black_rect.x0 ||
                  spec.black_rect.y1 < spec.white_rect.y0 ||
                  spec.white_rect.y1 < spec.black_rect.y0,
              "four_region: rectangles must be separated");
      check_distinct({spec.background, 0.0, 1.0});
      img.setConstant(spec.background);
      Mask bm = paint_rect(img, spec.black_rect, 0.0);
      Mask wm = paint_rect(img, spec.white_rect, 1.0);
      require_populated(bm, "black");
      require_populated(wm, "white");
      truths.push_back({"black", std::move(bm)});
      truths.push_back({"white", std::move(wm)});
      break;
    }
    case SceneKind::Custom: {
      require(!spec.shapes.empty(), "custom scene: no shapes");
      check_intensity(spec.background, "background");
      std::vector<double> vals{spec.background};
      img.setConstant(spec.background);
      int k = 0;
      for (const auto& sh : spec.shapes) {
        ++k;
        std::string name =
            sh.name.empty() ? "object_" + std::to_string(k) : sh.name;
        check_intensity(sh.intensity, name);
        vals.push_back(sh.intensity);
        Mask m;
        if (sh.kind == CustomShape::Kind::Disk) {
          check_disk(sh.disk, spec.width, spec.height, name);
          m = paint_disk(img, sh.disk, sh.intensity);
        } else {
          check_rect(sh.rect, spec.width, spec.height, name);
          m = paint_rect(img, sh.rect, sh.intensity);
        }
        require_populated(m, name);
        truths.push_back({std::move(name), std::move(m)});
      }
      check_distinct(vals);
      break;
    }
  }

  return Scene{GrayImage(std::move(img)), std::move(truths)};
}

GrayImage add_gaussian_noise(const GrayImage& img, double stddev,
                             std::uint64_t seed) {
  require(stddev >= 0.0, "gaussian noise: stddev must be nonnegative");
  if (stddev == 0.0) return img;
  Grid out = img.plane();
  Rng rng(seed);
  for (int y = 0; y < out.rows(); ++y)
    for (int x = 0; x < out.cols(); ++x) {
      out(y, x) =
          std::clamp(out(y, x) + stddev * rng.normal(), 0.0, 1.0);
    }
  return GrayImage(std::move(out));
}

GrayImage add_salt_pepper(const GrayImage& img, double fraction,
                          std::uint64_t seed) {
  require(fraction >= 0.0 && fraction <= 1.0,
          "salt-pepper noise: fraction must lie in [0,1]");
  const long long n = static_cast<long long>(img.width()) * img.height();
  const long long k = std::llround(fraction * static_cast<double>(n));
  Grid out = img.plane();
  if (k == 0) return GrayImage(std::move(out));
  Rng rng(seed);
  // partial Fisher-Yates: the first k entries end up a uniform k-subset
  std::vector<long long> idx(static_cast<size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (long long i = 0; i < k; ++i) {
    const long long j =
        i + static_cast<long long>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<size_t>(i)], idx[static_cast<size_t>(j)]);
    const long long p = idx[static_cast<size_t>(i)];
    const int y = static_cast<int>(p / img.width());
    const int x = static_cast<int>(p % img.width());
    double target = (rng.next() & 1u) ? 1.0 : 0.0;
    if (out(y, x) == target) target = 1.0 - target;
    out(y, x) = target;
  }
  return GrayImage(std::move(out));
}

}  // namespace ems
