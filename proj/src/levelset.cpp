#include "ems/levelset.hpp"

#include "ems/raster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ems {

namespace {

double circle_distance(double x, double y, const InitPrimitive& p) {
  const double dx = x - p.cx, dy = y - p.cy;
  return std::sqrt(dx * dx + dy * dy) - p.r;
}

// Standard box signed distance: negative inside, exact Euclidean outside.
double rect_distance(double x, double y, const InitPrimitive& p) {
  const double qx = std::max(p.x0 - x, x - p.x1);
  const double qy = std::max(p.y0 - y, y - p.y1);
  if (qx > 0.0 || qy > 0.0) {
    const double ox = std::max(qx, 0.0), oy = std::max(qy, 0.0);
    return std::sqrt(ox * ox + oy * oy);
  }
  return std::max(qx, qy);
}

std::vector<double> parse_numbers(const std::vector<std::string>& args,
                                  const std::string& what, size_t expect) {
  if (args.size() != expect) {
    throw Error("init spec: " + what + " expects " + std::to_string(expect) +
                " arguments, got " + std::to_string(args.size()));
  }
  std::vector<double> out;
  for (const auto& a : args) {
    try {
      size_t used = 0;
      out.push_back(std::stod(a, &used));
      if (used != a.size()) throw std::invalid_argument(a);
    } catch (const std::exception&) {
      throw Error("init spec: bad number '" + a + "' in " + what);
    }
  }
  return out;
}

// A zero crossing of phi: the point base + t * dir with integer base pixel,
// axis direction dir in {(+-1,0),(0,+-1),(0,0)} and offset t in [0,1]. The
// base is always the negative endpoint, so mirrored fields produce the same
// (t, |dir|) pairs and distances mirror bit-exactly.
struct FrontPoint {
  int px, py;
  int ex, ey;
  double t;
};

struct FrontSet {
  std::vector<FrontPoint> points;
  // Bucket index of points whose coordinates fall into each unit cell.
  std::vector<std::vector<int>> cells;
  int width = 0, height = 0;

  int cell_of(int cx, int cy) const { return cy * width + cx; }

  void build(int w, int h) {
    width = w;
    height = h;
    cells.assign(static_cast<size_t>(w) * h, {});
    for (int i = 0; i < static_cast<int>(points.size()); ++i) {
      const FrontPoint& f = points[i];
      const double cx = f.px + f.t * f.ex;
      const double cy = f.py + f.t * f.ey;
      const int bx = std::clamp(static_cast<int>(std::floor(cx)), 0, w - 1);
      const int by = std::clamp(static_cast<int>(std::floor(cy)), 0, h - 1);
      cells[static_cast<size_t>(cell_of(bx, by))].push_back(i);
    }
  }

  double squared_distance(int X, int Y, const FrontPoint& f) const {
    // (X - px) and (Y - py) are exact small integers; the subtraction of t
    // then rounds once, so mirrored queries negate dx exactly.
    const double dx = static_cast<double>(X - f.px) - f.t * f.ex;
    const double dy = static_cast<double>(Y - f.py) - f.t * f.ey;
    return dx * dx + dy * dy;
  }

  void scan_cell(int cx, int cy, int X, int Y, double& best) const {
    if (cx < 0 || cx >= width || cy < 0 || cy >= height) return;
    for (int idx : cells[static_cast<size_t>(cell_of(cx, cy))]) {
      best = std::min(best, squared_distance(X, Y, points[idx]));
    }
  }

  // Nearest squared distance from pixel (X, Y), searched by expanding
  // Chebyshev rings of cells; any point in a ring-rho cell is at least
  // rho-1 away, which bounds the search. Once every remaining candidate is
  // farther than `clamp`, the search stops (the caller saturates there).
  double nearest_squared(int X, int Y, double clamp) const {
    double best = std::numeric_limits<double>::infinity();
    const int rho_max = width + height;
    for (int rho = 0; rho <= rho_max; ++rho) {
      const double reach = static_cast<double>(rho - 1);
      if (reach > 0.0 && reach * reach > best) break;
      if (best > clamp * clamp && reach > clamp) break;
      if (rho == 0) {
        scan_cell(X, Y, X, Y, best);
        continue;
      }
      for (int cx = X - rho; cx <= X + rho; ++cx) {
        scan_cell(cx, Y - rho, X, Y, best);
        scan_cell(cx, Y + rho, X, Y, best);
      }
      for (int cy = Y - rho + 1; cy <= Y + rho - 1; ++cy) {
        scan_cell(X - rho, cy, X, Y, best);
        scan_cell(X + rho, cy, X, Y, best);
      }
    }
    return best;
  }
};

FrontSet collect_front(const Grid& phi) {
  const int rows = static_cast<int>(phi.rows());
  const int cols = static_cast<int>(phi.cols());
  FrontSet fs;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const double a = phi(y, x);
      if (a == 0.0) {
        fs.points.push_back({x, y, 0, 0, 0.0});
        continue;
      }
      // Crossings on the two forward edges; the negative endpoint is the
      // base so t = |phi_neg| / (|phi_neg| + |phi_pos|).
      if (x + 1 < cols) {
        const double b = phi(y, x + 1);
        if (a * b < 0.0) {
          if (a < 0.0) {
            fs.points.push_back({x, y, +1, 0, -a / (-a + b)});
          } else {
            fs.points.push_back({x + 1, y, -1, 0, -b / (-b + a)});
          }
        }
      }
      if (y + 1 < rows) {
        const double b = phi(y + 1, x);
        if (a * b < 0.0) {
          if (a < 0.0) {
            fs.points.push_back({x, y, 0, +1, -a / (-a + b)});
          } else {
            fs.points.push_back({x, y + 1, 0, -1, -b / (-b + a)});
          }
        }
      }
    }
  }
  return fs;
}

}  // namespace

InitSpec InitSpec::parse(const std::string& text) {
  std::vector<std::pair<std::string, std::vector<std::string>>> groups;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon != std::string::npos) {
      groups.push_back({tok.substr(0, colon), {}});
      const std::string rest = tok.substr(colon + 1);
      if (!rest.empty()) groups.back().second.push_back(rest);
    } else if (!groups.empty()) {
      groups.back().second.push_back(tok);
    } else {
      throw Error("init spec: expected 'shape:args', got '" + tok + "'");
    }
  }
  if (groups.empty()) throw Error("init spec: empty specification");

  InitSpec spec;
  for (auto& [kind, args] : groups) {
    InitPrimitive p;
    if (kind == "circle") {
      const auto v = parse_numbers(args, "circle", 3);
      p.kind = InitPrimitive::Kind::Circle;
      p.cx = v[0];
      p.cy = v[1];
      p.r = v[2];
      if (p.r <= 0) throw Error("init spec: circle radius must be positive");
    } else if (kind == "rect") {
      const auto v = parse_numbers(args, "rect", 4);
      p.kind = InitPrimitive::Kind::Rect;
      p.x0 = v[0];
      p.y0 = v[1];
      p.x1 = v[2];
      p.y1 = v[3];
      if (p.x0 > p.x1 || p.y0 > p.y1) {
        throw Error("init spec: rect corners must satisfy x0<=x1, y0<=y1");
      }
    } else if (kind == "grid") {
      const auto v = parse_numbers(args, "grid", 4);
      p.kind = InitPrimitive::Kind::CircleGrid;
      p.rows = static_cast<int>(v[0]);
      p.cols = static_cast<int>(v[1]);
      p.r = v[2];
      p.spacing = v[3];
      if (p.rows < 1 || p.cols < 1 || p.r <= 0 || p.spacing <= 0) {
        throw Error("init spec: grid needs rows,cols >= 1 and r,spacing > 0");
      }
    } else if (kind == "mask") {
      if (args.size() != 1 || args[0].empty()) {
        throw Error("init spec: mask expects a file path");
      }
      p.kind = InitPrimitive::Kind::MaskFile;
      p.mask_path = args[0];
    } else {
      throw Error("init spec: unknown shape '" + kind + "'");
    }
    spec.primitives.push_back(std::move(p));
  }
  return spec;
}

Grid circle_sdf(int width, int height, double cx, double cy, double r) {
  Grid phi(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx, dy = y - cy;
      phi(y, x) = std::sqrt(dx * dx + dy * dy) - r;
    }
  }
  return phi;
}

Grid init_from_spec(const InitSpec& spec, int width, int height) {
  if (spec.primitives.empty()) throw Error("init spec: empty specification");
  constexpr double kInf = std::numeric_limits<double>::infinity();
  Grid phi = Grid::Constant(height, width, kInf);

  auto blend_circle = [&](double cx, double cy, double r) {
    if (cx + r < 0 || cx - r > width - 1 || cy + r < 0 || cy - r > height - 1) {
      throw Error("init spec: circle lies outside the image domain");
    }
    InitPrimitive c;
    c.cx = cx;
    c.cy = cy;
    c.r = r;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        phi(y, x) = std::min(phi(y, x), circle_distance(x, y, c));
      }
    }
  };

  for (const auto& p : spec.primitives) {
    switch (p.kind) {
      case InitPrimitive::Kind::Circle:
        blend_circle(p.cx, p.cy, p.r);
        break;
      case InitPrimitive::Kind::Rect: {
        if (p.x1 < 0 || p.x0 > width - 1 || p.y1 < 0 || p.y0 > height - 1) {
          throw Error("init spec: rect lies outside the image domain");
        }
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) {
            phi(y, x) = std::min(phi(y, x), rect_distance(x, y, p));
          }
        }
        break;
      }
      case InitPrimitive::Kind::CircleGrid: {
        const double cx0 = (width - 1) / 2.0 - (p.cols - 1) * p.spacing / 2.0;
        const double cy0 = (height - 1) / 2.0 - (p.rows - 1) * p.spacing / 2.0;
        for (int j = 0; j < p.rows; ++j) {
          for (int i = 0; i < p.cols; ++i) {
            blend_circle(cx0 + i * p.spacing, cy0 + j * p.spacing, p.r);
          }
        }
        break;
      }
      case InitPrimitive::Kind::MaskFile: {
        const GrayImage m = load_image(p.mask_path);
        if (m.width() != width || m.height() != height) {
          throw Error("init spec: mask dimensions do not match the image");
        }
        // Non-zero pixels are interior. Seed a half-pixel staircase field
        // and redistance to the exact distance of its midpoint front.
        Grid seed(height, width);
        bool any_inside = false;
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) {
            const bool inside = m(x, y) > 0.0;
            any_inside = any_inside || inside;
            seed(y, x) = inside ? -0.5 : 0.5;
          }
        }
        if (!any_inside) throw Error("init spec: mask has no interior pixels");
        const Grid d = redistance(seed);
        for (int y = 0; y < height; ++y) {
          for (int x = 0; x < width; ++x) {
            phi(y, x) = std::min(phi(y, x), d(y, x));
          }
        }
        break;
      }
    }
  }
  return phi;
}

Mask interior_mask(const Grid& phi) {
  return (phi < 0.0).cast<std::uint8_t>();
}

std::vector<std::pair<int, int>> front_pixels(const Grid& phi) {
  const int rows = static_cast<int>(phi.rows());
  const int cols = static_cast<int>(phi.cols());
  std::vector<std::pair<int, int>> out;
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const bool inside = phi(y, x) < 0.0;
      const bool edge =
          (x > 0 && (phi(y, x - 1) < 0.0) != inside) ||
          (x + 1 < cols && (phi(y, x + 1) < 0.0) != inside) ||
          (y > 0 && (phi(y - 1, x) < 0.0) != inside) ||
          (y + 1 < rows && (phi(y + 1, x) < 0.0) != inside);
      if (edge) out.push_back({x, y});
    }
  }
  return out;
}

Grid redistance(const Grid& phi, double clamp) {
  if (!(clamp > 0.0)) throw std::invalid_argument("redistance: clamp must be positive");
  FrontSet fs = collect_front(phi);
  if (fs.points.empty()) {
    throw FrontVanished("redistance: field is uniformly signed, no front");
  }
  const int rows = static_cast<int>(phi.rows());
  const int cols = static_cast<int>(phi.cols());
  fs.build(cols, rows);

  Grid out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const double d =
          std::min(std::sqrt(fs.nearest_squared(x, y, clamp)), clamp);
      out(y, x) = phi(y, x) < 0.0 ? -d : d;
    }
  }
  return out;
}

NarrowBand narrow_band(const Grid& phi, double beta) {
  if (!(beta >= 2.0)) {
    throw std::invalid_argument("narrow_band: beta must be at least 2");
  }
  NarrowBand band;
  band.beta = beta;
  const int rows = static_cast<int>(phi.rows());
  const int cols = static_cast<int>(phi.cols());
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (std::abs(phi(y, x)) <= beta) band.indices.push_back(y * cols + x);
    }
  }
  return band;
}

}  // namespace ems
