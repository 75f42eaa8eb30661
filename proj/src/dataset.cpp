#include <algorithm>

#include "inrbench/errors.hpp"
#include "inrbench/generators.hpp"
#include "inrbench/task.hpp"

namespace inrb {

const char* task_name(TaskKind k) {
  switch (k) {
    case TaskKind::overfit: return "overfit";
    case TaskKind::denoise: return "denoise";
    case TaskKind::superres: return "superres";
    case TaskKind::ct: return "ct";
  }
  return "?";
}

TaskKind task_from_name(const std::string& name) {
  if (name == "overfit") return TaskKind::overfit;
  if (name == "denoise") return TaskKind::denoise;
  if (name == "superres") return TaskKind::superres;
  if (name == "ct") return TaskKind::ct;
  throw ConfigError("unknown task kind: " + name);
}

Tensor lattice_coords(const std::vector<int64_t>& resolution) {
  const int d = static_cast<int>(resolution.size());
  const int64_t n = Tensor::numel_of(resolution);
  Tensor coords({n, d});
  std::vector<int64_t> idx(static_cast<size_t>(d), 0);
  for (int64_t row = 0; row < n; ++row) {
    for (int a = 0; a < d; ++a)
      coords.at2(row, a) = -1.0 + 2.0 * (static_cast<double>(idx[static_cast<size_t>(a)]) + 0.5) /
                                      static_cast<double>(resolution[static_cast<size_t>(a)]);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[static_cast<size_t>(a)] < resolution[static_cast<size_t>(a)]) break;
      idx[static_cast<size_t>(a)] = 0;
    }
  }
  return coords;
}

namespace {

Tensor signal_targets(const SampledSignal& s) {
  return Tensor({s.spatial_count(), s.channels}, s.values);
}

}  // namespace

TaskDataset build_dataset(const SampledSignal& signal, TaskKind kind,
                          const CorruptionArgs& args) {
  TaskDataset ds;
  ds.kind = kind;
  ds.eval_signal = signal;
  ds.eval_resolution = signal.resolution;
  switch (kind) {
    case TaskKind::overfit: {
      ds.coords = lattice_coords(signal.resolution);
      ds.targets = signal_targets(signal);
      break;
    }
    case TaskKind::denoise: {
      ds.coords = lattice_coords(signal.resolution);
      ds.targets = signal_targets(add_gaussian_noise(signal, args.eps, args.seed));
      break;
    }
    case TaskKind::superres: {
      const SampledSignal low = downsample(signal, args.factor);
      ds.coords = lattice_coords(low.resolution);
      ds.targets = signal_targets(low);
      break;
    }
    case TaskKind::ct: {
      if (signal.dim != 2) throw Unsupported("ct task requires a 2D signal");
      const int64_t n = signal.resolution[0];
      RadonSamples rs = radon_samples(n, args.n_angles);
      Tensor sino = radon_forward(signal, args.n_angles);
      ds.coords = std::move(rs.coords);
      ds.targets = Tensor({sino.numel(), 1}, sino.data);
      ds.ray_offsets = rs.ray_offsets;
      ds.n_angles = rs.n_angles;
      ds.n_det = rs.n_det;
      break;
    }
  }
  return ds;
}

SampledSignal render_field(const FieldModel& model,
                           const std::vector<int64_t>& eval_resolution) {
  Tensor coords = lattice_coords(eval_resolution);
  Tensor vals = model.evaluate(coords);
  SampledSignal out;
  out.dim = static_cast<int>(eval_resolution.size());
  out.resolution = eval_resolution;
  out.channels = model.d_out();
  out.values.resize(vals.data.size());
  for (size_t i = 0; i < vals.data.size(); ++i)
    out.values[i] = std::clamp(vals.data[i], 0.0, 1.0);
  return out;
}

}  // namespace inrb
