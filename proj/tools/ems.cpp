// Command-line front end: segment / synth / verify / metrics.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ems/core.hpp"
#include "ems/engine.hpp"
#include "ems/levelset.hpp"
#include "ems/metrics.hpp"
#include "ems/model.hpp"
#include "ems/raster.hpp"
#include "ems/stencils.hpp"
#include "ems/synth.hpp"
#include "ems/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVanished = 2;

struct NoiseSpec {
  std::string type;  // "gaussian" | "saltpepper"
  double param = 0.0;
  std::uint64_t seed = 0;
};

// TYPE:PARAM:SEED, e.g. "saltpepper:0.02:7" or "gaussian:0.05:1"; "none" ok
std::optional<NoiseSpec> parse_noise(const std::string& text) {
  if (text.empty() || text == "none") return std::nullopt;
  NoiseSpec n;
  const auto a = text.find(':');
  const auto b = text.rfind(':');
  if (a == std::string::npos || b == a)
    throw ems::Error("noise: expected TYPE:PARAM:SEED, got '" + text + "'");
  n.type = text.substr(0, a);
  if (n.type != "gaussian" && n.type != "saltpepper")
    throw ems::Error("noise: unknown type '" + n.type + "'");
  try {
    n.param = std::stod(text.substr(a + 1, b - a - 1));
    n.seed = std::stoull(text.substr(b + 1));
  } catch (const std::exception&) {
    throw ems::Error("noise: bad numbers in '" + text + "'");
  }
  return n;
}

ems::GrayImage apply_noise(const ems::GrayImage& img,
                           const std::optional<NoiseSpec>& noise) {
  if (!noise) return img;
  if (noise->type == "gaussian")
    return ems::add_gaussian_noise(img, noise->param, noise->seed);
  return ems::add_salt_pepper(img, noise->param, noise->seed);
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos)
    throw ems::Error("size: expected WxH, got '" + text + "'");
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ems::Error("size: bad numbers in '" + text + "'");
  }
}

ems::Mask load_mask_file(const std::string& path) {
  const ems::GrayImage img = ems::load_image(path);
  ems::Mask m(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) m(y, x) = img(x, y) >= 0.5 ? 1 : 0;
  return m;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ems::IoError("cannot write " + path.string());
  out << text;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json noise_json(const std::optional<NoiseSpec>& noise) {
  if (!noise) return nullptr;
  return json{{"type", noise->type},
              {"param", noise->param},
              {"seed", noise->seed}};
}

// ---------------------------------------------------------------- segment

struct SegmentArgs {
  std::string image, scene, size = "128x128", init, truth, out = "out";
  std::string model = "ems", noise;
  double lambda = 1e-4, sigma = 1.0, presmooth = 0.0;
  ems::EvolveParams params;
};

int run_segment(const SegmentArgs& a) {
  ems::SceneSpec sspec;
  std::optional<ems::Scene> scene;
  ems::GrayImage input = [&] {
    if (!a.image.empty()) return ems::load_image(a.image);
    auto [w, h] = parse_size(a.size);
    sspec.kind = ems::parse_scene_kind(a.scene);
    sspec.width = w;
    sspec.height = h;
    scene = ems::make_scene(sspec);
    return scene->image;
  }();

  const auto noise = parse_noise(a.noise);
  input = apply_noise(input, noise);
  if (a.presmooth < 0.0) throw ems::Error("presmooth: sigma must be >= 0");
  if (a.presmooth > 0.0) input = ems::gaussian_convolve(input, a.presmooth);

  std::optional<ems::Mask> truth;
  if (!a.truth.empty()) {
    if (a.truth == "auto") {
      if (!scene)
        throw ems::Error("--truth auto requires --scene");
      truth = scene->truths.front().mask;
    } else {
      // a scene truth name wins over a file path of the same spelling
      if (scene) {
        for (const auto& t : scene->truths)
          if (t.name == a.truth) { truth = t.mask; break; }
      }
      if (!truth) truth = load_mask_file(a.truth);
    }
  }

  ems::EvolveParams params = a.params;
  params.kind.kind = ems::parse_seg_kind(a.model);
  params.kind.lambda = a.lambda;
  params.kind.sigma = a.sigma;

  const ems::InitSpec init = ems::InitSpec::parse(a.init);
  const ems::SegmentationResult res = ems::evolve(input, init, params);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  ems::save_image(input, (out / "input.pgm").string());
  ems::save_mask(res.final_mask, (out / "final_mask.pgm").string());
  ems::save_overlay(input, ems::front_pixels(res.final_phi),
                    (out / "overlay.png").string());

  std::string csv = "iter,energy,mu1,mu2,area_in\n";
  for (const auto& row : res.trace) {
    csv += std::to_string(row.iter) + "," + fmt(row.energy) + "," +
           fmt(row.mu1) + "," + fmt(row.mu2) + "," +
           std::to_string(row.area_in) + "\n";
  }
  write_text(out / "energy.csv", csv);

  for (size_t i = 0; i < res.snapshots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.pgm", i);
    ems::save_mask(res.snapshots[i], (out / name).string());
  }

  json summary{
      {"version", ems::kVersion},
      {"command", "segment"},
      {"rng_algorithm", ems::Rng::kAlgorithm},
      {"source",
       {{"image", a.image.empty() ? json(nullptr) : json(a.image)},
        {"scene", a.scene.empty() ? json(nullptr) : json(a.scene)},
        {"size", a.size}}},
      {"noise", noise_json(noise)},
      {"presmooth_sigma", a.presmooth},
      {"init", a.init},
      {"model",
       {{"kind", ems::seg_kind_name(params.kind.kind)},
        {"lambda", params.kind.lambda},
        {"sigma", params.kind.sigma}}},
      {"evolve",
       {{"dt_safety", params.dt_safety},
        {"band_beta", params.band_beta},
        {"reinit_every", params.reinit_every},
        {"max_iters", params.max_iters},
        {"stop_flip_fraction", params.stop_flip_fraction},
        {"stop_window", params.stop_window},
        {"snapshot_every", params.snapshot_every},
        {"seed", params.seed}}},
      {"termination", ems::termination_name(res.termination)},
      {"iterations", res.iterations},
      {"reinit_count", res.reinit_iters.size()},
  };
  if (!res.trace.empty()) {
    summary["energy_first"] = res.trace.front().energy;
    summary["energy_last"] = res.trace.back().energy;
    summary["final_area_in"] =
        res.trace.back().area_in;  // area at the last recorded iteration
  }
  long long area = 0;
  for (int y = 0; y < res.final_mask.rows(); ++y)
    for (int x = 0; x < res.final_mask.cols(); ++x)
      area += res.final_mask(y, x) != 0;
  summary["final_area_in"] = area;
  if (truth) {
    const ems::MaskScore score = ems::score_masks(res.final_mask, *truth);
    summary["dice"] = score.dice;
    summary["jaccard"] = score.jaccard;
    summary["flipped_pixels"] = score.flipped_pixels;
  }
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";

  return res.termination == ems::Termination::FrontVanished ? kExitVanished
                                                            : kExitOk;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string kind = "bimodal_disk", size = "128x128", noise, out = "out";
};

int run_synth(const SynthArgs& a) {
  ems::SceneSpec spec;
  spec.kind = ems::parse_scene_kind(a.kind);
  std::tie(spec.width, spec.height) = parse_size(a.size);
  const ems::Scene scene = ems::make_scene(spec);
  const auto noise = parse_noise(a.noise);
  const ems::GrayImage img = apply_noise(scene.image, noise);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  ems::save_image(img, (out / "image.pgm").string());
  json truth_files = json::array();
  for (const auto& t : scene.truths) {
    const std::string name = "truth_" + t.name + ".pgm";
    ems::save_mask(t.mask, (out / name).string());
    truth_files.push_back(name);
  }
  json summary{{"version", ems::kVersion},
               {"command", "synth"},
               {"rng_algorithm", ems::Rng::kAlgorithm},
               {"kind", ems::scene_kind_name(spec.kind)},
               {"size", a.size},
               {"noise", noise_json(noise)},
               {"image", "image.pgm"},
               {"truths", truth_files}};
  write_text(out / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- verify

json check_row(const std::string& name, double lhs, double rhs,
               double tolerance, bool pass) {
  return json{{"check", name},
              {"lhs", lhs},
              {"rhs", rhs},
              {"tolerance", tolerance},
              {"pass", pass}};
}

// exactness of the second-difference stencils on dyadic polynomials
void verify_stencils(json& checks) {
  const int n = 33;
  const ems::StencilContext ctx;
  ems::Grid q(n, n), xy(n, n), x2y2(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      q(y, x) = 1.25 * x * x - 0.5 * y * y + 0.75 * x * y + 2.0 * x - y + 3.0;
      xy(y, x) = static_cast<double>(x) * y;
      x2y2(y, x) = static_cast<double>(x) * x * y * y;
    }
  double exx = 0.0, eyy = 0.0, exy1 = 0.0, exy2 = 0.0;
  for (int y = 1; y < n - 1; ++y)
    for (int x = 1; x < n - 1; ++x) {
      exx = std::max(exx, std::abs(ems::d2x(q, x, y, ctx) - 2.5));
      eyy = std::max(eyy, std::abs(ems::d2y(q, x, y, ctx) + 1.0));
      exy1 = std::max(exy1, std::abs(ems::dxy(xy, x, y, ctx) - 1.0));
      exy2 = std::max(
          exy2, std::abs(ems::dxy(x2y2, x, y, ctx) - 4.0 * x * y));
    }
  checks.push_back(check_row("stencil_d2x_quadratic", exx, 0.0, 0.0, exx == 0.0));
  checks.push_back(check_row("stencil_d2y_quadratic", eyy, 0.0, 0.0, eyy == 0.0));
  checks.push_back(check_row("stencil_dxy_xy", exy1, 0.0, 0.0, exy1 == 0.0));
  checks.push_back(
      check_row("stencil_dxy_x2y2", exy2, 0.0, 0.0, exy2 == 0.0));

  // curvature of a circle SDF: 1/r at the front; the level set through a
  // pixel at signed distance t is the concentric circle of radius r + t
  auto curv_err = [&](int grid, double r, bool concentric) {
    const ems::Grid phi =
        ems::circle_sdf(grid, grid, (grid - 1) / 2.0, (grid - 1) / 2.0, r);
    const ems::NarrowBand band = ems::narrow_band(phi, 2.0);
    double worst = 0.0;
    for (int idx : band.indices) {
      const int y = idx / grid, x = idx % grid;
      if (!concentric && std::abs(phi(y, x)) > 0.5) continue;
      const double k = ems::curvature(phi, x, y, ctx);
      const double rho = concentric ? r + phi(y, x) : r;
      worst = std::max(worst, std::abs(k * rho - 1.0));
    }
    return worst;
  };
  const double e128 = curv_err(128, 20.0, false);
  const double e128small = curv_err(128, 10.0, false);
  const double e256 = curv_err(256, 20.0, false);
  checks.push_back(
      check_row("curvature_circle_r20", e128, 0.0, 0.05, e128 <= 0.05));
  const double ec = curv_err(128, 20.0, true);
  checks.push_back(
      check_row("curvature_concentric_band", ec, 0.0, 0.01, ec <= 0.01));
  checks.push_back(check_row("curvature_refinement_trend", e256, e128small,
                             0.0, e256 < e128small));
}

void verify_lemma1(json& checks) {
  auto run = [&](double r, const std::string& fname) {
    const int n = 2 * static_cast<int>(r) + 9;
    // off-center so the ramp's odd part doesn't cancel by symmetry
    const double cx = (n - 1) / 2.0 + 1.3, cy = (n - 1) / 2.0 - 0.7;
    ems::Mask mask(n, n);
    ems::Grid f(n, n);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        mask(y, x) = d2 <= r * r ? 1 : 0;
        if (fname == "one")
          f(y, x) = 1.0;
        else if (fname == "ramp")
          f(y, x) = static_cast<double>(x) / (n - 1) + 0.5;
        else
          f(y, x) = std::exp(-d2 / (2.0 * (r / 2.0) * (r / 2.0)));
      }
    return ems::lemma1_check(mask, f);
  };
  for (const std::string fname : {"one", "ramp", "bump"}) {
    double gap8 = 0.0, gap16 = 0.0;
    for (const double r : {8.0, 12.0, 16.0}) {
      const ems::Lemma1Result res = run(r, fname);
      const double gap = res.relative_gap();
      if (r == 8.0) gap8 = gap;
      if (r == 16.0) gap16 = gap;
      checks.push_back(check_row(
          "lemma1_" + fname + "_r" + std::to_string(static_cast<int>(r)),
          res.lhs, res.rhs, 0.1, gap <= 0.1));
    }
    checks.push_back(check_row("lemma1_" + fname + "_trend", gap16, gap8, 0.0,
                               gap16 < gap8));
  }
}

void verify_gateaux(json& checks) {
  ems::SceneSpec spec;  // bimodal disk defaults
  const ems::Scene scene = ems::make_scene(spec);
  const double cx = ems::kProbeCx, cy = ems::kProbeCy;
  for (const double r : {15.0, 20.0, 25.0}) {
    for (const double d : {0.5, 1.0}) {
      const ems::GateauxReport rep =
          ems::radial_gateaux_check(scene.image, cx, cy, r, d, 0.0);
      const std::string tag = "_r" + std::to_string(static_cast<int>(r)) +
                              "_d" + (d == 0.5 ? std::string("05")
                                               : std::string("10"));
      checks.push_back(check_row("gateaux_energy" + tag, rep.energy.fd,
                                 rep.energy.analytic, 0.05,
                                 rep.energy.relative_error() <= 0.05));
      checks.push_back(check_row("gateaux_mu2" + tag, rep.mu2.fd,
                                 rep.mu2.analytic, 0.05,
                                 rep.mu2.relative_error() <= 0.05));
      // inside the disk both sides of the mu1 derivative vanish identically
      checks.push_back(check_row(
          "gateaux_mu1_zero" + tag, rep.mu1.fd, rep.mu1.analytic, 1e-12,
          std::abs(rep.mu1.fd) <= 1e-12 && std::abs(rep.mu1.analytic) <= 1e-12));
    }
  }
  // nontrivial mu1 check with the circle outside the disk
  for (const double d : {0.5, 1.0}) {
    const ems::GateauxReport rep =
        ems::radial_gateaux_check(scene.image, cx, cy, 45.0, d, 0.0);
    checks.push_back(check_row(
        "gateaux_mu1_r45_d" + std::string(d == 0.5 ? "05" : "10"), rep.mu1.fd,
        rep.mu1.analytic, 0.05, rep.mu1.relative_error() <= 0.05));
  }
  // pure length term on a constant image: dE/dr = 2*pi
  {
    ems::Grid flat = ems::Grid::Constant(128, 128, 0.5);
    const ems::GrayImage img(std::move(flat));
    const ems::GateauxReport rep =
        ems::radial_gateaux_check(img, cx, cy, 20.0, 0.5, 1.0);
    const double expect = 2.0 * M_PI;
    checks.push_back(check_row("gateaux_length_term", rep.energy.fd, expect,
                               0.05,
                               std::abs(rep.energy.fd - expect) / expect <=
                                   0.05));
  }
}

struct VerifyArgs {
  std::string suite = "all", report;
};

int run_verify(const VerifyArgs& a) {
  if (a.suite != "all" && a.suite != "stencils" && a.suite != "lemma1" &&
      a.suite != "gateaux")
    throw ems::Error("verify: unknown suite '" + a.suite + "'");
  json checks = json::array();
  if (a.suite == "all" || a.suite == "stencils") verify_stencils(checks);
  if (a.suite == "all" || a.suite == "lemma1") verify_lemma1(checks);
  if (a.suite == "all" || a.suite == "gateaux") verify_gateaux(checks);
  bool all = true;
  for (const auto& c : checks) all = all && c.at("pass").get<bool>();
  json report{{"version", ems::kVersion},
              {"command", "verify"},
              {"suite", a.suite},
              {"all_pass", all},
              {"checks", checks}};
  const std::string text = report.dump(2) + "\n";
  if (!a.report.empty()) {
    fs::create_directories(fs::path(a.report).parent_path().empty()
                               ? "."
                               : fs::path(a.report).parent_path().string());
    write_text(a.report, text);
  }
  std::cout << text;
  return all ? kExitOk : kExitUsage;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string a, b, report;
};

int run_metrics(const MetricsArgs& m) {
  const ems::Mask a = load_mask_file(m.a);
  const ems::Mask b = load_mask_file(m.b);
  const ems::MaskScore score = ems::score_masks(a, b);
  json out{{"version", ems::kVersion},
           {"command", "metrics"},
           {"dice", score.dice},
           {"jaccard", score.jaccard},
           {"flipped_pixels", score.flipped_pixels}};
  const std::string text = out.dump(2) + "\n";
  if (!m.report.empty()) write_text(m.report, text);
  std::cout << text;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EMS/MS level-set segmentation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file; flags win");

  SegmentArgs seg;
  CLI::App* s = app.add_subcommand("segment", "evolve a front on an image");
  auto* src = s->add_option_group("source", "exactly one image source");
  src->add_option("--image", seg.image, "input image (PGM or PNG)");
  src->add_option("--scene", seg.scene,
                  "synthetic scene kind (bimodal|triple_junction|four_region)");
  src->require_option(1);
  s->add_option("--size", seg.size, "scene size WxH")->capture_default_str();
  s->add_option("--init", seg.init,
                "initial front, e.g. 'circle:64,64,50' or "
                "'rect:...,circle:...' or 'grid:rows,cols,r,spacing' or "
                "'mask:PATH'")
      ->required();
  s->add_option("--model", seg.model, "ms|ems")->capture_default_str();
  s->add_option("--lambda", seg.lambda, "length weight")
      ->capture_default_str();
  s->add_option("--sigma", seg.sigma, "edge smoothing scale")
      ->capture_default_str();
  s->add_option("--noise", seg.noise, "TYPE:PARAM:SEED applied to the input");
  s->add_option("--presmooth", seg.presmooth,
                "Gaussian presmoothing sigma (0 = off)")
      ->capture_default_str();
  s->add_option("--truth", seg.truth, "truth mask path, or 'auto'");
  s->add_option("--out", seg.out, "output directory")->capture_default_str();
  s->add_option("--dt-safety", seg.params.dt_safety)->capture_default_str();
  s->add_option("--band-beta", seg.params.band_beta)->capture_default_str();
  s->add_option("--reinit-every", seg.params.reinit_every)
      ->capture_default_str();
  s->add_option("--max-iters", seg.params.max_iters)->capture_default_str();
  s->add_option("--stop-flip-fraction", seg.params.stop_flip_fraction)
      ->capture_default_str();
  s->add_option("--stop-window", seg.params.stop_window)
      ->capture_default_str();
  s->add_option("--snapshot-every", seg.params.snapshot_every)
      ->capture_default_str();
  s->add_option("--seed", seg.params.seed)->capture_default_str();

  SynthArgs syn;
  CLI::App* y = app.add_subcommand("synth", "write a scene and its truths");
  y->add_option("--kind", syn.kind,
                "bimodal|triple_junction|four_region")
      ->capture_default_str();
  y->add_option("--size", syn.size, "WxH")->capture_default_str();
  y->add_option("--noise", syn.noise, "TYPE:PARAM:SEED");
  y->add_option("--out", syn.out, "output directory")->capture_default_str();

  VerifyArgs ver;
  CLI::App* v = app.add_subcommand("verify", "run the numerical oracles");
  v->add_option("--suite", ver.suite, "stencils|lemma1|gateaux|all")
      ->capture_default_str();
  v->add_option("--report", ver.report, "also write the JSON report here");

  MetricsArgs met;
  CLI::App* m = app.add_subcommand("metrics", "score two mask files");
  m->add_option("a", met.a, "mask file")->required();
  m->add_option("b", met.b, "mask file")->required();
  m->add_option("--report", met.report, "also write the JSON score here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return run_segment(seg);
    if (y->parsed()) return run_synth(syn);
    if (v->parsed()) return run_verify(ver);
    return run_metrics(met);
  } catch (const ems::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
