// harness: config parsing, CSV round trips, matrix runs, resume, heatmaps.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "doctest.h"
#include "inrbench/errors.hpp"
#include "inrbench/harness.hpp"

using namespace inrb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

// CSV text with the wall-time columns blanked, for run-to-run comparison.
std::string mask_timings(const std::string& csv) {
  std::istringstream is(csv);
  std::ostringstream os;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() == 15) {
      f[12] = "";
      f[13] = "";
    }
    for (size_t i = 0; i < f.size(); ++i) os << (i ? "," : "") << f[i];
    os << "\n";
  }
  return os.str();
}

const char* kTinyConfig =
    "models = grid, siren\n"
    "budgets = 400\n"
    "bandwidths = 0.8\n"
    "resolution = 16\n"
    "iterations = 10\n"
    "seeds = 1\n";

}  // namespace

TEST_CASE("empty config yields the full default matrix") {
  ExperimentMatrix m = parse_config_text("");
  CHECK(m.models.size() == 8);
  CHECK(m.budgets == std::vector<int64_t>{10000, 30000, 100000, 300000, 1000000, 3000000});
  CHECK(m.bandwidths.size() == 9);
  CHECK(m.bandwidths.front() == doctest::Approx(0.1));
  CHECK(m.bandwidths.back() == doctest::Approx(0.9));
  CHECK(m.seeds == std::vector<uint64_t>{1234});
  CHECK(m.family == "bandlimited");
  CHECK(m.dim == 2);
  CHECK(m.task == TaskKind::overfit);
  CHECK(m.baseline == ModelKind::grid);
}

TEST_CASE("config overrides every axis and tolerates comments") {
  ExperimentMatrix m = parse_config_text(
      "# comment\n"
      "models = hashgrid , bacon\n"
      "budgets = 500, 1000\n"
      "bandwidths = 0.3\n"
      "family = spheres\n"
      "dim = 3\n"
      "resolution = 32\n"
      "seeds = 7, 8, 9\n"
      "task = denoise\n"
      "baseline = siren\n"
      "iterations = 123\n"
      "eps = 0.02\n");
  CHECK(m.models == std::vector<ModelKind>{ModelKind::hashgrid, ModelKind::bacon});
  CHECK(m.budgets == std::vector<int64_t>{500, 1000});
  CHECK(m.bandwidths == std::vector<double>{0.3});
  CHECK(m.family == "spheres");
  CHECK(m.dim == 3);
  CHECK(m.resolution == 32);
  CHECK(m.seeds == std::vector<uint64_t>{7, 8, 9});
  CHECK(m.task == TaskKind::denoise);
  CHECK(m.baseline == ModelKind::siren);
  CHECK(m.iterations == 123);
  CHECK(m.eps == doctest::Approx(0.02));
}

TEST_CASE("config errors name the offending key") {
  CHECK_THROWS_WITH_AS(parse_config_text("bandwidths = 0.95\n"),
                       doctest::Contains("bandwidths"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("wavelength = 3\n"),
                       doctest::Contains("wavelength"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("models = gridlock\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("family = noise\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("dim = 4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("budgets = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("/tmp/inrb_no_such_config"), ConfigError);
}

TEST_CASE("result rows survive a CSV round trip") {
  CellResult c;
  c.model = ModelKind::wire;
  c.task = TaskKind::superres;
  c.family = "bandlimited";
  c.dim = 2;
  c.resolution = 128;
  c.budget = 30000;
  c.bandwidth = 0.4;
  c.seed = 77;
  c.param_count = 29986;
  c.psnr_db = 31.25;
  c.ssim_v = 0.912345;
  c.train_s = 12.5;
  c.infer_s = 0.25;
  CellResult r = cell_from_csv_row(cell_csv_row(c));
  CHECK(r.model == c.model);
  CHECK(r.task == c.task);
  CHECK(r.family == c.family);
  CHECK(r.resolution == 128);
  CHECK(r.budget == 30000);
  CHECK(r.bandwidth == doctest::Approx(0.4));
  CHECK(r.seed == 77);
  CHECK(r.param_count == 29986);
  CHECK(r.psnr_db == doctest::Approx(31.25));
  CHECK(r.ssim_v == doctest::Approx(0.912345));
  CHECK(r.status == "ok");

  c.psnr_db = std::numeric_limits<double>::infinity();
  CHECK(std::isinf(cell_from_csv_row(cell_csv_row(c)).psnr_db));

  c.status = "skipped";
  CellResult s = cell_from_csv_row(cell_csv_row(c));
  CHECK(s.status == "skipped");
  CHECK(s.param_count == 0);

  CHECK_THROWS_AS(cell_from_csv_row("too,few,fields"), IoError);
}

TEST_CASE("canonical order sorts by model, task, budget, bandwidth, seed") {
  auto mk = [](ModelKind m, int64_t budget, double b, uint64_t seed) {
    CellResult c;
    c.model = m;
    c.budget = budget;
    c.bandwidth = b;
    c.seed = seed;
    return c;
  };
  std::vector<CellResult> rows = {mk(ModelKind::siren, 100, 0.2, 1),
                                  mk(ModelKind::grid, 200, 0.1, 2),
                                  mk(ModelKind::grid, 100, 0.3, 1),
                                  mk(ModelKind::grid, 100, 0.1, 2),
                                  mk(ModelKind::grid, 100, 0.1, 1)};
  sort_canonical(rows);
  CHECK(rows[0].model == ModelKind::grid);
  CHECK(rows[0].budget == 100);
  CHECK(rows[0].bandwidth == doctest::Approx(0.1));
  CHECK(rows[0].seed == 1);
  CHECK(rows[1].seed == 2);
  CHECK(rows[2].bandwidth == doctest::Approx(0.3));
  CHECK(rows[3].budget == 200);
  CHECK(rows[4].model == ModelKind::siren);
}

TEST_CASE("tiny matrix runs, resumes from the ledger, and reruns identically") {
  ExperimentMatrix m = parse_config_text(kTinyConfig);
  const std::string dir_a = "/tmp/inrb_test_run_a";
  const std::string dir_b = "/tmp/inrb_test_run_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);

  std::vector<CellResult> rows = run_matrix(m, dir_a);
  REQUIRE(rows.size() == 2);
  for (const CellResult& r : rows) {
    CHECK(r.status == "ok");
    CHECK(r.psnr_db > 0.0);
    CHECK(r.param_count > 0);
  }
  CHECK(fs::exists(fs::path(dir_a) / "ledger.csv"));
  const std::string results_a = slurp((fs::path(dir_a) / "results.csv").string());

  // resume: results.csv is rebuilt byte-identically from the ledger alone
  fs::remove(fs::path(dir_a) / "results.csv");
  std::vector<CellResult> again = run_matrix(m, dir_a);
  CHECK(again.size() == 2);
  CHECK(slurp((fs::path(dir_a) / "results.csv").string()) == results_a);

  // a fresh run reproduces everything except wall times
  run_matrix(m, dir_b);
  const std::string results_b = slurp((fs::path(dir_b) / "results.csv").string());
  CHECK(mask_timings(results_b) == mask_timings(results_a));
  CHECK(mask_timings(results_a) != "");
}

TEST_CASE("partial ledgers are completed, not recomputed") {
  ExperimentMatrix m = parse_config_text(kTinyConfig);
  const std::string src = "/tmp/inrb_test_run_a";   // produced above
  const std::string dir = "/tmp/inrb_test_run_c";
  fs::remove_all(dir);
  fs::create_directories(dir);
  // seed the ledger with only the grid row, tagged with a sentinel time
  std::ifstream is(fs::path(src) / "ledger.csv");
  REQUIRE(is);
  std::ofstream os(fs::path(dir) / "ledger.csv");
  std::string line;
  int copied = 0;
  while (std::getline(is, line))
    if (line.rfind("grid,", 0) == 0) {
      CellResult c = cell_from_csv_row(line);
      c.train_s = 123456.0;
      os << cell_csv_row(c) << "\n";
      ++copied;
    }
  os.close();
  REQUIRE(copied == 1);
  std::vector<CellResult> rows = run_matrix(m, dir);
  CHECK(rows.size() == 2);
  bool saw_sentinel = false;
  for (const CellResult& r : rows)
    if (r.model == ModelKind::grid) saw_sentinel = r.train_s == 123456.0;
  CHECK(saw_sentinel);  // the preexisting cell was trusted, not rerun
}

TEST_CASE("heatmaps are written as PPM with one cell per matrix entry") {
  ExperimentMatrix m = parse_config_text(
      "models = grid, siren\nbudgets = 400, 900\nbandwidths = 0.7, 0.8\n"
      "resolution = 16\niterations = 5\nseeds = 1\n");
  const std::string dir = "/tmp/inrb_test_run_heat";
  fs::remove_all(dir);
  run_matrix(m, dir);
  for (const char* stem : {"heat_grid_overfit", "heat_siren_overfit"}) {
    for (const char* kind : {"_abs.ppm", "_delta.ppm"}) {
      const std::string path = (fs::path(dir) / (std::string(stem) + kind)).string();
      REQUIRE_MESSAGE(fs::exists(path), path);
      std::ifstream is(path, std::ios::binary);
      std::string magic;
      int w = 0, h = 0, maxv = 0;
      is >> magic >> w >> h >> maxv;
      CHECK(magic == "P6");
      CHECK(w == 2 * 24);   // two bandwidths
      CHECK(h == 2 * 24);   // two budgets
      CHECK(maxv == 255);
    }
  }
  // the baseline's gap to itself is zero: its delta map is all white
  std::ifstream is((fs::path(dir) / "heat_grid_overfit_delta.ppm").string(),
                   std::ios::binary);
  std::string header;
  std::getline(is, header);
  std::getline(is, header);
  std::getline(is, header);
  unsigned char px[3];
  is.read(reinterpret_cast<char*>(px), 3);
  CHECK(static_cast<int>(px[0]) == 255);
  CHECK(static_cast<int>(px[1]) == 255);
  CHECK(static_cast<int>(px[2]) == 255);
}
