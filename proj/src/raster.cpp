#include "ems/raster.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace ems {

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return tail == suffix;
}

void check_dims(int width, int height, const std::string& path) {
  if (width < 3 || height < 3) {
    throw IoError(path + ": image dimensions must be at least 3x3, got " +
                  std::to_string(width) + "x" + std::to_string(height));
  }
}

// Reads the next header token of a PGM, skipping whitespace and # comments.
std::string next_pgm_token(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  std::string tok;
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

long parse_pgm_int(std::istream& in, const std::string& path,
                   const char* what) {
  const std::string tok = next_pgm_token(in);
  if (tok.empty()) throw IoError(path + ": malformed PGM header, missing " + what);
  for (char c : tok) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw IoError(path + ": malformed PGM header, bad " + std::string(what) +
                    " '" + tok + "'");
    }
  }
  return std::stol(tok);
}

GrayImage load_pgm(std::ifstream& in, const std::string& path) {
  char magic[2];
  in.read(magic, 2);
  const bool ascii = magic[1] == '2';
  const long width = parse_pgm_int(in, path, "width");
  const long height = parse_pgm_int(in, path, "height");
  const long maxval = parse_pgm_int(in, path, "maxval");
  check_dims(static_cast<int>(width), static_cast<int>(height), path);
  if (maxval <= 0 || maxval > 65535) {
    throw IoError(path + ": unsupported PGM maxval " + std::to_string(maxval));
  }

  Grid g(height, width);
  if (ascii) {
    for (long y = 0; y < height; ++y) {
      for (long x = 0; x < width; ++x) {
        const long v = parse_pgm_int(in, path, "sample");
        if (v > maxval) throw IoError(path + ": PGM sample exceeds maxval");
        g(y, x) = static_cast<double>(v) / static_cast<double>(maxval);
      }
    }
  } else {
    // Binary P5: exactly one whitespace byte after maxval, already consumed
    // by the token reader. Samples are 1 byte, or 2 bytes big-endian when
    // maxval > 255.
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> row(static_cast<size_t>(width) * bytes);
    for (long y = 0; y < height; ++y) {
      in.read(reinterpret_cast<char*>(row.data()),
              static_cast<std::streamsize>(row.size()));
      if (!in) throw IoError(path + ": truncated PGM pixel data");
      for (long x = 0; x < width; ++x) {
        long v = bytes == 1 ? row[x] : (row[2 * x] << 8 | row[2 * x + 1]);
        if (v > maxval) throw IoError(path + ": PGM sample exceeds maxval");
        g(y, x) = static_cast<double>(v) / static_cast<double>(maxval);
      }
    }
  }
  return GrayImage(std::move(g));
}

struct PngReadCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngReadCloser() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

GrayImage load_png(const std::string& path) {
  PngReadCloser ctx;
  ctx.fp = std::fopen(path.c_str(), "rb");
  if (!ctx.fp) throw IoError(path + ": cannot open file");
  ctx.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw IoError(path + ": png init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw IoError(path + ": png init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw IoError(path + ": malformed PNG");

  png_init_io(ctx.png, ctx.fp);
  png_read_info(ctx.png, ctx.info);

  const png_uint_32 width = png_get_image_width(ctx.png, ctx.info);
  const png_uint_32 height = png_get_image_height(ctx.png, ctx.info);
  const int color = png_get_color_type(ctx.png, ctx.info);
  const int depth = png_get_bit_depth(ctx.png, ctx.info);
  if (color != PNG_COLOR_TYPE_GRAY || depth > 8) {
    throw IoError(path + ": only 8-bit grayscale PNG is supported");
  }
  if (depth < 8) png_set_expand_gray_1_2_4_to_8(ctx.png);
  check_dims(static_cast<int>(width), static_cast<int>(height), path);
  png_read_update_info(ctx.png, ctx.info);

  std::vector<unsigned char> row(width);
  Grid g(height, width);
  for (png_uint_32 y = 0; y < height; ++y) {
    png_read_row(ctx.png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < width; ++x) g(y, x) = row[x] / 255.0;
  }
  png_read_end(ctx.png, nullptr);
  return GrayImage(std::move(g));
}

void save_pgm_bytes(const std::vector<unsigned char>& bytes, int width,
                    int height, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path + ": cannot open file for writing");
  out << "P5\n" << width << " " << height << "\n255\n";
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path + ": write failed");
}

struct PngWriteCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  std::FILE* fp = nullptr;
  ~PngWriteCloser() {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    if (fp) std::fclose(fp);
  }
};

void save_png_bytes(const std::vector<unsigned char>& bytes, int width,
                    int height, const std::string& path) {
  PngWriteCloser ctx;
  ctx.fp = std::fopen(path.c_str(), "wb");
  if (!ctx.fp) throw IoError(path + ": cannot open file for writing");
  ctx.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!ctx.png) throw IoError(path + ": png init failed");
  ctx.info = png_create_info_struct(ctx.png);
  if (!ctx.info) throw IoError(path + ": png init failed");
  if (setjmp(png_jmpbuf(ctx.png))) throw IoError(path + ": png write failed");

  png_init_io(ctx.png, ctx.fp);
  png_set_IHDR(ctx.png, ctx.info, width, height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(ctx.png, ctx.info);
  for (int y = 0; y < height; ++y) {
    png_write_row(ctx.png, const_cast<png_bytep>(&bytes[static_cast<size_t>(y) * width]));
  }
  png_write_end(ctx.png, nullptr);
}

void save_bytes(const std::vector<unsigned char>& bytes, int width, int height,
                const std::string& path) {
  if (has_suffix(path, ".png")) {
    save_png_bytes(bytes, width, height, path);
  } else if (has_suffix(path, ".pgm")) {
    save_pgm_bytes(bytes, width, height, path);
  } else {
    throw IoError(path + ": unsupported output extension (use .pgm or .png)");
  }
}

// One separable pass along x (dir = 0) or y (dir = 1). Taps are applied as
// w_k * (v[p-k] + v[p+k]): IEEE addition is commutative, so a mirrored
// input produces the exact mirrored output.
Grid convolve_axis(const Grid& f, const std::vector<double>& w, int dir) {
  const int rows = static_cast<int>(f.rows());
  const int cols = static_cast<int>(f.cols());
  const int radius = static_cast<int>(w.size()) - 1;
  Grid out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      double acc = w[0] * f(y, x);
      for (int k = 1; k <= radius; ++k) {
        double a, b;
        if (dir == 0) {
          a = f(y, mirror_index(x - k, cols));
          b = f(y, mirror_index(x + k, cols));
        } else {
          a = f(mirror_index(y - k, rows), x);
          b = f(mirror_index(y + k, rows), x);
        }
        acc += w[k] * (a + b);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

}  // namespace

GrayImage::GrayImage(Grid values) : I_(std::move(values)) {
  if (I_.rows() < 3 || I_.cols() < 3) {
    throw Error("GrayImage dimensions must be at least 3x3");
  }
  if (!I_.isFinite().all() || (I_ < 0.0).any() || (I_ > 1.0).any()) {
    throw Error("GrayImage intensities must lie in [0, 1]");
  }
}

GrayImage load_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path + ": cannot open file");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in) throw IoError(path + ": file too short");
  if (magic[0] == 'P' && (magic[1] == '2' || magic[1] == '5')) {
    in.seekg(0);
    return load_pgm(in, path);
  }
  if (magic[0] == '\x89' && magic[1] == 'P') {
    in.close();
    return load_png(path);
  }
  throw IoError(path + ": unsupported image format (expect PGM P2/P5 or PNG)");
}

void save_image(const GrayImage& img, const std::string& path) {
  const int w = img.width(), h = img.height();
  std::vector<unsigned char> bytes(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bytes[static_cast<size_t>(y) * w + x] =
          static_cast<unsigned char>(std::lround(img(x, y) * 255.0));
    }
  }
  save_bytes(bytes, w, h, path);
}

void save_mask(const Mask& mask, const std::string& path) {
  const int w = static_cast<int>(mask.cols()), h = static_cast<int>(mask.rows());
  std::vector<unsigned char> bytes(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bytes[static_cast<size_t>(y) * w + x] = mask(y, x) ? 255 : 0;
    }
  }
  save_bytes(bytes, w, h, path);
}

void save_overlay(const GrayImage& img,
                  const std::vector<std::pair<int, int>>& front,
                  const std::string& path) {
  const int w = img.width(), h = img.height();
  std::vector<unsigned char> bytes(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bytes[static_cast<size_t>(y) * w + x] =
          static_cast<unsigned char>(std::lround(img(x, y) * 255.0));
    }
  }
  for (const auto& [x, y] : front) {
    if (x < 0 || x >= w || y < 0 || y >= h) continue;
    bytes[static_cast<size_t>(y) * w + x] = img(x, y) < 0.5 ? 255 : 0;
  }
  save_bytes(bytes, w, h, path);
}

Grid gaussian_convolve_field(const Grid& f, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_convolve: sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * std::sqrt(2.0 * sigma)));
  std::vector<double> w(static_cast<size_t>(radius) + 1);
  double total = 0.0;
  for (int k = 0; k <= radius; ++k) {
    w[k] = std::exp(-static_cast<double>(k) * k / (4.0 * sigma));
    total += (k == 0 ? 1.0 : 2.0) * w[k];
  }
  for (double& v : w) v /= total;
  return convolve_axis(convolve_axis(f, w, 0), w, 1);
}

GrayImage gaussian_convolve(const GrayImage& img, double sigma) {
  Grid g = gaussian_convolve_field(img.plane(), sigma);
  // The kernel has unit mass, so values stay in range up to rounding.
  return GrayImage(g.min(1.0).max(0.0));
}

std::pair<Grid, Grid> gradient(const Grid& f) {
  const int rows = static_cast<int>(f.rows());
  const int cols = static_cast<int>(f.cols());
  if (rows < 3 || cols < 3) throw std::invalid_argument("gradient: field must be at least 3x3");
  Grid gx(rows, cols), gy(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (x == 0) {
        gx(y, x) = f(y, 1) - f(y, 0);
      } else if (x == cols - 1) {
        gx(y, x) = f(y, cols - 1) - f(y, cols - 2);
      } else {
        gx(y, x) = (f(y, x + 1) - f(y, x - 1)) / 2.0;
      }
      if (y == 0) {
        gy(y, x) = f(1, x) - f(0, x);
      } else if (y == rows - 1) {
        gy(y, x) = f(rows - 1, x) - f(rows - 2, x);
      } else {
        gy(y, x) = (f(y + 1, x) - f(y - 1, x)) / 2.0;
      }
    }
  }
  return {std::move(gx), std::move(gy)};
}

Grid gradient_magnitude(const Grid& f) {
  auto [gx, gy] = gradient(f);
  return (gx * gx + gy * gy).sqrt();
}

}  // namespace ems
