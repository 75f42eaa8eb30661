#pragma once

#include <string>
#include <vector>

#include "inrbench/model.hpp"
#include "inrbench/task.hpp"

namespace inrb {

// TV weight applied to grid models on the CT task, tuned once on the
// desk-scale phantom by a log sweep and frozen.
inline constexpr double kDefaultCtTvWeight = 1.0;

struct ExperimentMatrix {
  std::vector<ModelKind> models;      // default: all eight
  std::vector<int64_t> budgets;       // default: {1e4,3e4,1e5,3e5,1e6,3e6}
  std::vector<double> bandwidths;     // default: {0.1,...,0.9}
  std::string family = "bandlimited"; // bandlimited|spheres|sierpinski|star
  int dim = 2;
  int64_t resolution = 128;
  std::vector<uint64_t> seeds = {1234};
  TaskKind task = TaskKind::overfit;
  ModelKind baseline = ModelKind::grid;
  int iterations = 2000;
  double eps = 0.05;
  int factor = 4;
  int n_angles = 60;
};

struct CellResult {
  ModelKind model = ModelKind::grid;
  TaskKind task = TaskKind::overfit;
  std::string family;
  int dim = 2;
  int64_t resolution = 0;
  int64_t budget = 0;
  double bandwidth = 0.0;
  uint64_t seed = 0;
  int64_t param_count = 0;
  double psnr_db = 0.0, ssim_v = 0.0, iou_v = 0.0;
  double train_s = 0.0, infer_s = 0.0;
  std::string status = "ok";  // ok|diverged|skipped
};

ExperimentMatrix parse_config_text(const std::string& text);
ExperimentMatrix parse_config(const std::string& path);

// Runs every cell not already present in the on-disk ledger at
// out_dir/ledger.csv, appending each finished cell to it, then rewrites
// out_dir/results.csv in canonical order and returns all rows. Worker count
// comes from `workers`, overridable by the INRB_WORKERS env var.
std::vector<CellResult> run_matrix(const ExperimentMatrix& m,
                                   const std::string& out_dir, int workers = 1);

std::string cell_csv_row(const CellResult& c);
CellResult cell_from_csv_row(const std::string& line);  // IoError on malformed

void sort_canonical(std::vector<CellResult>& rows);
void emit_csv(std::vector<CellResult> rows, const std::string& path);

// One absolute heatmap and one baseline-gap heatmap per model
// (budget rows in log order, bandwidth columns), written as PPM.
void emit_heatmaps(const std::vector<CellResult>& rows, const ExperimentMatrix& m,
                   const std::string& out_dir);

}  // namespace inrb
