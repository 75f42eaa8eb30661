#include "inrbench/train.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "inrbench/adam.hpp"
#include "inrbench/autodiff.hpp"
#include "inrbench/errors.hpp"
#include "inrbench/rng.hpp"

namespace inrb {

namespace {

constexpr double kPi = 3.14159265358979323846;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TrainingTrace train(FieldModel& model, const TaskDataset& ds, const TrainConfig& cfg) {
  if (static_cast<int>(ds.coords.cols()) != model.d_in())
    throw BuildError("dataset dimensionality does not match the model");
  const bool is_ct = ds.kind == TaskKind::ct;
  if (!is_ct && ds.targets.cols() != model.d_out())
    throw BuildError("dataset channels do not match the model");

  TrainingTrace trace;
  const double base_lr = cfg.lr > 0.0 ? cfg.lr : model.default_lr();
  std::vector<Tensor*> prm;
  std::vector<Tensor> vals;
  prm.reserve(model.params.size());
  for (NamedTensor& p : model.params) {
    prm.push_back(&p.value);
    vals.push_back(p.value);
  }
  AdamState st = AdamState::init(vals, base_lr);
  const std::vector<int64_t> lattice = model.tv_lattice();
  const bool use_tv = cfg.tv_weight > 0.0 && !lattice.empty();

  const int64_t rows = ds.coords.rows();
  const bool minibatch = !is_ct && rows > cfg.batch_size;
  Rng batch_rng(derive_seed(cfg.seed, 0xba7c));
  auto full_targets = std::make_shared<Tensor>(ds.targets);

  const auto t0 = std::chrono::steady_clock::now();
  for (int step = 0; step < cfg.iterations; ++step) {
    Tensor batch_coords;
    std::shared_ptr<const Tensor> batch_targets;
    if (minibatch) {
      const int64_t b = cfg.batch_size;
      const int d = model.d_in(), c = model.d_out();
      Tensor bc({b, d});
      auto bt = std::make_shared<Tensor>(std::vector<int64_t>{b, c});
      for (int64_t i = 0; i < b; ++i) {
        const int64_t r = batch_rng.uniform_int(rows);
        for (int a = 0; a < d; ++a) bc.at2(i, a) = ds.coords.at2(r, a);
        for (int a = 0; a < c; ++a) bt->at2(i, a) = ds.targets.at2(r, a);
      }
      batch_coords = std::move(bc);
      batch_targets = std::move(bt);
    } else {
      batch_coords = ds.coords;
      batch_targets = full_targets;
    }

    ad::Tape t;
    std::vector<ad::Var> vars;
    vars.reserve(model.params.size());
    for (NamedTensor& p : model.params) vars.push_back(t.leaf(p.value, true));
    ad::Var pred = model.forward(t, vars, batch_coords);
    if (is_ct) pred = t.segment_sum(pred, ds.ray_offsets);
    ad::Var loss = t.mse(pred, batch_targets);
    if (use_tv)
      loss = t.add(loss, t.mul_scalar(t.tv(vars[0], lattice), cfg.tv_weight));

    const double lv = t.value(loss).data[0];
    if (!std::isfinite(lv)) throw TrainingDiverged(step, "non-finite training loss");
    if (step % cfg.log_every == 0) trace.loss_log.emplace_back(step, lv);
    trace.final_loss = lv;

    t.backward(loss);
    std::vector<Tensor> zero_store;
    std::vector<const Tensor*> grads(prm.size());
    zero_store.reserve(prm.size());
    for (size_t i = 0; i < prm.size(); ++i) {
      const Tensor& g = t.grad(vars[i]);
      if (g.data.empty()) {
        zero_store.push_back(Tensor::zeros(prm[i]->shape));
        grads[i] = &zero_store.back();
      } else {
        grads[i] = &g;
      }
    }
    st.lr = base_lr *
            (cfg.cosine_decay
                 ? 0.5 * (1.0 + std::cos(kPi * static_cast<double>(step) /
                                         static_cast<double>(cfg.iterations)))
                 : 1.0);
    adam_step(prm, grads, st);
  }
  trace.train_s = seconds_since(t0);

  const auto t1 = std::chrono::steady_clock::now();
  trace.render = render_field(model, ds.eval_resolution);
  trace.infer_s = seconds_since(t1);
  return trace;
}

}  // namespace inrb
