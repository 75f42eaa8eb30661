#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "inrbench/autodiff.hpp"
#include "inrbench/tensor.hpp"

namespace inrb {

enum class ModelKind { grid, ffn, siren, wire, gaplanes, hashgrid, gsplat2d, bacon };

const char* kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);  // ConfigError on unknown

struct NamedTensor {
  std::string name;
  Tensor value;
};

// A continuous field over [-1,1)^d_in. `forward` builds the differentiable
// graph mapping a [B, d_in] coordinate batch to [B, d_out] values; `vars`
// arrive in the same order as `params`.
class FieldModel {
 public:
  virtual ~FieldModel() = default;

  ModelKind kind() const { return kind_; }
  int d_in() const { return d_in_; }
  int d_out() const { return d_out_; }

  std::vector<NamedTensor> params;   // trainable
  std::vector<NamedTensor> frozen;   // fixed at init (encoders, filters)

  int64_t count_params() const;

  // Parameters charged against the budget; defaults to count_params().
  // Models whose published budget accounting includes frozen or phantom
  // entries override this.
  virtual int64_t budget_charge() const { return count_params(); }

  virtual ad::Var forward(ad::Tape& t, const std::vector<ad::Var>& vars,
                          const Tensor& coords) const = 0;

  // No-grad evaluation of a [B, d_in] batch -> [B, d_out].
  Tensor evaluate(const Tensor& coords) const;

  virtual double default_lr() const = 0;

  // Lattice shape of params[0] when a TV penalty applies; empty otherwise.
  virtual std::vector<int64_t> tv_lattice() const { return {}; }

  // (key, value) pairs persisted in the checkpoint manifest.
  virtual std::vector<std::pair<std::string, std::string>> knobs() const { return {}; }

 protected:
  FieldModel(ModelKind k, int d_in, int d_out) : kind_(k), d_in_(d_in), d_out_(d_out) {}

 private:
  ModelKind kind_;
  int d_in_;
  int d_out_;
};

// Sizes and initializes a model of the given kind for a parameter budget.
// `signal_res` is the per-axis resolution of the signal being fit (drives
// grid/hash/filter resolutions).
std::unique_ptr<FieldModel> make_model(ModelKind kind, int64_t budget, int d_in,
                                       int d_out, int64_t signal_res, uint64_t seed);

// Checkpointing: one container file per named tensor plus a manifest.
void save_checkpoint(const FieldModel& m, int64_t budget, int64_t signal_res,
                     uint64_t seed, const std::string& dir);
std::unique_ptr<FieldModel> load_checkpoint(const std::string& dir);

}  // namespace inrb
