// End-to-end checks that drive the installed binary as a subprocess.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string kCli = EMS_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

int decode_status(int status) {
  if (status == -1) return -1;
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return 128;
}

RunResult run(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() /
                       ("ems_cli_log_" + std::to_string(counter++) + ".txt");
  const std::string cmd = kCli + " " + args + " > " + log.string() + " 2>&1";
  RunResult r;
  r.exit_code = decode_status(std::system(cmd.c_str()));
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  fs::remove(log);
  return r;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("ems_cli_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_summary(const fs::path& dir) {
  return json::parse(slurp(dir / "summary.json"));
}

}  // namespace

TEST_CASE("synth writes a scene, its truths and a replayable image") {
  const fs::path d1 = fresh_dir("synth1");
  const fs::path d2 = fresh_dir("synth2");
  const std::string args =
      "synth --kind four_region --noise gaussian:0.05:9 --out ";
  CHECK(run(args + d1.string()).exit_code == 0);
  CHECK(run(args + d2.string()).exit_code == 0);

  const json s = read_summary(d1);
  CHECK(s.at("command") == "synth");
  CHECK(s.at("kind") == "four_region");
  CHECK(s.at("truths") == json::array({"truth_black.pgm", "truth_white.pgm"}));
  for (const auto& t : s.at("truths"))
    CHECK(fs::exists(d1 / t.get<std::string>()));
  CHECK(slurp(d1 / "image.pgm") == slurp(d2 / "image.pgm"));
}

TEST_CASE("segment on the bimodal scene finds the disk and replays bitwise") {
  const fs::path d1 = fresh_dir("seg1");
  const fs::path d2 = fresh_dir("seg2");
  const std::string args =
      "segment --scene bimodal --init circle:64,64,50 --model ems "
      "--noise saltpepper:0.01:5 --truth auto --out ";
  const RunResult r1 = run(args + d1.string());
  CHECK(r1.exit_code == 0);
  CHECK(run(args + d2.string()).exit_code == 0);

  const json s = read_summary(d1);
  CHECK(s.at("command") == "segment");
  CHECK(s.at("termination") == "converged");
  CHECK(s.at("model").at("kind") == "ems");
  CHECK(s.at("dice").get<double>() >= 0.9);
  CHECK(s.at("iterations").get<int>() > 0);
  CHECK(s.at("final_area_in").get<long long>() > 0);
  for (const char* f :
       {"input.pgm", "final_mask.pgm", "overlay.png", "energy.csv"})
    CHECK(fs::exists(d1 / f));

  CHECK(slurp(d1 / "final_mask.pgm") == slurp(d2 / "final_mask.pgm"));
  CHECK(slurp(d1 / "energy.csv") == slurp(d2 / "energy.csv"));
  CHECK(read_summary(d2).at("dice") == s.at("dice"));

  // the trace has a header plus one row per iteration
  std::istringstream csv(slurp(d1 / "energy.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line))
    if (!line.empty()) ++rows;
  CHECK(rows == s.at("iterations").get<int>());
}

TEST_CASE("named scene truths are accepted by --truth") {
  const fs::path d = fresh_dir("truthname");
  const RunResult r = run(
      "segment --scene four_region --init circle:40,64,20 --model ems "
      "--lambda 1e-5 --max-iters 120 --truth black --out " + d.string());
  CHECK(r.exit_code == 0);
  CHECK(read_summary(d).contains("dice"));
}

TEST_CASE("config files feed defaults and explicit flags beat them") {
  const fs::path d = fresh_dir("config");
  const fs::path cfg = d / "run.ini";
  {
    std::ofstream out(cfg);
    out << "[segment]\nlambda=0.0005\nmax-iters=7\n";
  }
  const std::string base =
      "--config " + cfg.string() +
      " segment --scene bimodal --init circle:64,64,40 --out " + d.string();
  CHECK(run(base).exit_code == 0);
  json s = read_summary(d);
  CHECK(s.at("model").at("lambda").get<double>() == 0.0005);
  CHECK(s.at("evolve").at("max_iters").get<int>() == 7);

  CHECK(run(base + " --lambda 1e-4").exit_code == 0);
  s = read_summary(d);
  CHECK(s.at("model").at("lambda").get<double>() == 1e-4);
  CHECK(s.at("evolve").at("max_iters").get<int>() == 7);
}

TEST_CASE("a constant image starves the front and exits with code 2") {
  const fs::path d = fresh_dir("vanish");
  const fs::path img = d / "flat.pgm";
  {
    std::ofstream out(img);
    out << "P2\n64 64\n255\n";
    for (int i = 0; i < 64 * 64; ++i) out << "128\n";
  }
  // off-lattice centre so the shrinking front can't park on a symmetric
  // single-pixel island (zero gradient there stalls the motion)
  const RunResult r = run(
      "segment --image " + img.string() +
      " --init circle:32.37,31.61,10 --model ms --lambda 1e-3 "
      "--stop-flip-fraction 1e-9 --out " + d.string());
  CHECK(r.exit_code == 2);
  CHECK(read_summary(d).at("termination") == "front_vanished");
}

TEST_CASE("usage errors exit with code 1") {
  const fs::path d = fresh_dir("usage");
  CHECK(run("segment --scene bimodal --out " + d.string()).exit_code == 1);
  CHECK(run("segment --scene pentagon --init circle:1,1,1 --out " +
            d.string()).exit_code == 1);
  CHECK(run("segment --scene bimodal --init circle:64,64 --out " + d.string())
            .exit_code == 1);
  CHECK(run("segment --scene bimodal --size 2x2 --init circle:1,1,1 --out " +
            d.string()).exit_code == 1);
  CHECK(run("segment --scene bimodal --image a.pgm --init circle:64,64,40")
            .exit_code == 1);  // two sources
  CHECK(run("metrics /nonexistent_a.pgm /nonexistent_b.pgm").exit_code == 1);
  CHECK(run("verify --suite nonsense").exit_code == 1);
}

TEST_CASE("metrics scores a mask against itself as a perfect match") {
  const fs::path d = fresh_dir("metrics");
  REQUIRE(run("synth --kind bimodal --out " + d.string()).exit_code == 0);
  const fs::path mask = d / "truth_disk.pgm";
  const fs::path report = d / "score.json";
  const RunResult r =
      run("metrics " + mask.string() + " " + mask.string() + " --report " +
          report.string());
  CHECK(r.exit_code == 0);
  const json s = json::parse(slurp(report));
  CHECK(s.at("dice") == 1.0);
  CHECK(s.at("jaccard") == 1.0);
  CHECK(s.at("flipped_pixels") == 0);
}

TEST_CASE("the stencil oracle suite passes end to end") {
  const fs::path d = fresh_dir("verify");
  const fs::path report = d / "report.json";
  const RunResult r =
      run("verify --suite stencils --report " + report.string());
  CHECK(r.exit_code == 0);
  const json s = json::parse(slurp(report));
  CHECK(s.at("all_pass") == true);
  CHECK(!s.at("checks").empty());
}
