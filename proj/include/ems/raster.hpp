#pragma once

#include "ems/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace ems {

// Grayscale raster with intensities normalized to [0, 1] and both
// dimensions at least 3. <0.5 displays dark, >=0.5 light.
class GrayImage {
 public:
  GrayImage() = default;
  explicit GrayImage(Grid values);

  int width() const { return static_cast<int>(I_.cols()); }
  int height() const { return static_cast<int>(I_.rows()); }
  double operator()(int x, int y) const { return I_(y, x); }
  const Grid& plane() const { return I_; }

 private:
  Grid I_;
};

// Loads a PGM (P2/P5, maxval <= 65535) or an 8-bit grayscale PNG, chosen by
// file content. Throws IoError on unreadable files, malformed headers,
// unsupported formats, or dimensions below 3x3.
GrayImage load_image(const std::string& path);

// Writers pick the container from the file extension (.pgm or .png).
// PGM output is binary P5 with maxval 255.
void save_image(const GrayImage& img, const std::string& path);
void save_mask(const Mask& mask, const std::string& path);

// Draws the given front pixels over the image with locally inverted
// intensity so the contour stays visible on both dark and light regions.
void save_overlay(const GrayImage& img,
                  const std::vector<std::pair<int, int>>& front,
                  const std::string& path);

// Separable convolution with the kernel w(i) ~ exp(-i^2 / (4 sigma)),
// renormalized to unit sum over a window of radius ceil(3 sqrt(2 sigma)).
// Borders are mirror-extended (reflect-101). Per-axis taps accumulate as
// w_k * (left + right) pairs so a mirrored input yields the bit-identical
// mirrored output.
Grid gaussian_convolve_field(const Grid& f, double sigma);
GrayImage gaussian_convolve(const GrayImage& img, double sigma);

// Central differences in the interior, one-sided at the borders, h = 1.
// Returns (d/dx, d/dy).
std::pair<Grid, Grid> gradient(const Grid& f);
Grid gradient_magnitude(const Grid& f);

inline std::pair<Grid, Grid> gradient(const GrayImage& img) {
  return gradient(img.plane());
}
inline Grid gradient_magnitude(const GrayImage& img) {
  return gradient_magnitude(img.plane());
}

}  // namespace ems
