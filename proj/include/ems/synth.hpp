#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ems/core.hpp"
#include "ems/raster.hpp"

namespace ems {

// Piecewise-constant test scenes with per-object ground-truth masks.
// Membership is by pixel center: a pixel belongs to a shape iff its center
// lies inside (disks use <=, rects use inclusive corners).

enum class SceneKind { BimodalDisk, TripleJunction, FourRegion, Custom };

SceneKind parse_scene_kind(const std::string& name);
std::string scene_kind_name(SceneKind kind);

struct DiskShape {
  double cx = 64.0;
  double cy = 64.0;
  double r = 30.0;
};

struct RectShape {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;  // inclusive corners
};

struct CustomShape {
  enum class Kind { Disk, Rect };
  Kind kind = Kind::Disk;
  DiskShape disk;
  RectShape rect;
  double intensity = 1.0;
  std::string name;  // truth mask name; defaults to object_<k>
};

struct SceneSpec {
  SceneKind kind = SceneKind::BimodalDisk;
  int width = 128;
  int height = 128;

  // bimodal_disk
  DiskShape disk;
  double iota1 = 1.0;  // disk intensity
  double iota2 = 0.0;  // background intensity

  // triple_junction: gray square split into a black and a white rectangle
  // sharing the vertical edge at split_x (first white column). The split is
  // deliberately uneven so the two parts have different areas.
  RectShape square{32, 32, 95, 95};
  int split_x = 56;
  double background = 0.5;

  // four_region: gray background plus two separated rectangles
  RectShape black_rect{24, 24, 55, 103};
  RectShape white_rect{72, 24, 103, 103};

  // custom: shapes painted over `background` in order
  std::vector<CustomShape> shapes;
};

struct NamedMask {
  std::string name;
  Mask mask;
};

struct Scene {
  GrayImage image;
  std::vector<NamedMask> truths;  // first entry is the primary object

  bool has_truth(const std::string& name) const;
  const Mask& truth(const std::string& name) const;
};

Scene make_scene(const SceneSpec& spec);

// Additive Gaussian noise, clamped to [0,1]. stddev = 0 returns the input
// unchanged. Deterministic for a given seed (generator: Rng::kAlgorithm).
GrayImage add_gaussian_noise(const GrayImage& img, double stddev,
                             std::uint64_t seed);

// Flips exactly llround(fraction * N) distinct pixels to 0 or 1. The extreme
// is a fair coin except when the pixel already sits at the drawn value, in
// which case the other one is used so every selected pixel really changes.
GrayImage add_salt_pepper(const GrayImage& img, double fraction,
                          std::uint64_t seed);

}  // namespace ems
