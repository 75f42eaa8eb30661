#pragma once

#include <memory>
#include <string>
#include <vector>

#include "inrbench/model.hpp"
#include "inrbench/radon.hpp"
#include "inrbench/signal.hpp"
#include "inrbench/tensor.hpp"

namespace inrb {

enum class TaskKind { overfit, denoise, superres, ct };

const char* task_name(TaskKind k);
TaskKind task_from_name(const std::string& name);  // ConfigError on unknown

struct TaskDataset {
  TaskKind kind = TaskKind::overfit;
  Tensor coords;   // [B, d] training coordinates in [-1,1)^d
  Tensor targets;  // [B, C], or the flattened sinogram for ct
  // ct only: per-ray sample ranges into coords
  std::shared_ptr<std::vector<int64_t>> ray_offsets;
  int n_angles = 0;
  int64_t n_det = 0;
  SampledSignal eval_signal;             // clean ground truth
  std::vector<int64_t> eval_resolution;  // lattice for rendering
};

// Row-major lattice-center coordinates in [-1,1)^d, one row per cell.
Tensor lattice_coords(const std::vector<int64_t>& resolution);

struct CorruptionArgs {
  double eps = 0.05;   // denoise noise level
  int factor = 4;      // superres downsampling factor (2D; 3D halves voxels)
  int n_angles = 60;   // ct
  uint64_t seed = 1234;
};

TaskDataset build_dataset(const SampledSignal& signal, TaskKind kind,
                          const CorruptionArgs& args = {});

// One model evaluation per lattice center, clamped to [0,1].
SampledSignal render_field(const FieldModel& model,
                           const std::vector<int64_t>& eval_resolution);

}  // namespace inrb
