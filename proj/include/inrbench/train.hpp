#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "inrbench/model.hpp"
#include "inrbench/task.hpp"

namespace inrb {

struct TrainConfig {
  double lr = 0.0;            // <= 0 picks the model's default
  int iterations = 2000;
  int64_t batch_size = 1 << 16;  // full batch below this, minibatches above
  double tv_weight = 0.0;        // grid models on inverse tasks
  uint64_t seed = 1234;
  bool cosine_decay = true;      // anneal lr to 0 over the run
  int log_every = 50;
};

struct TrainingTrace {
  std::vector<std::pair<int, double>> loss_log;  // (step, loss)
  double final_loss = 0.0;
  double train_s = 0.0;   // wall time around the optimization loop
  double infer_s = 0.0;   // wall time of one full-lattice render
  SampledSignal render;   // the timed render, clamped to [0,1]
};

// Fits the model to the dataset with Adam. Throws TrainingDiverged with the
// step index when the loss goes non-finite.
TrainingTrace train(FieldModel& model, const TaskDataset& ds, const TrainConfig& cfg);

}  // namespace inrb
