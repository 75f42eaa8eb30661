#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "inrbench/errors.hpp"
#include "inrbench/generators.hpp"
#include "inrbench/harness.hpp"
#include "inrbench/metrics.hpp"
#include "inrbench/rng.hpp"
#include "inrbench/train.hpp"

namespace fs = std::filesystem;
using namespace inrb;

namespace {

SampledSignal generate(const std::string& family, int dim, int64_t res, double b,
                       uint64_t seed) {
  if (family == "bandlimited") return gen_bandlimited(dim, res, b, seed);
  if (family == "spheres") return gen_spheres(dim, res, b, seed);
  if (family == "sierpinski") return gen_sierpinski(res, b);
  if (family == "star") return gen_star_target(res).signal;
  throw ConfigError("unknown signal family: " + family);
}

int cmd_gen(const std::string& family, int dim, int64_t res, double b,
            uint64_t seed, const std::string& out) {
  save_signal(generate(family, dim, res, b, seed), out);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_fit(const std::string& model_name, int64_t budget, const std::string& task,
            const std::string& signal_path, double eps, int factor, int n_angles,
            uint64_t seed, int iterations, const std::string& out_dir) {
  SampledSignal sig = signal_path.ends_with(".inrb") ? load_signal(signal_path)
                                                     : load_raster(signal_path);
  CorruptionArgs args;
  args.eps = eps;
  args.factor = factor;
  args.n_angles = n_angles;
  args.seed = derive_seed(seed, 0xc0);
  const TaskKind kind = task_from_name(task);
  TaskDataset ds = build_dataset(sig, kind, args);
  const ModelKind mk = kind_from_name(model_name);
  auto model = make_model(mk, budget, sig.dim, sig.channels, sig.resolution[0],
                          derive_seed(seed, static_cast<uint64_t>(mk)));
  TrainConfig cfg;
  cfg.seed = seed;
  cfg.iterations = iterations;
  if (kind == TaskKind::ct && mk == ModelKind::grid) cfg.tv_weight = kDefaultCtTvWeight;
  TrainingTrace trace = train(*model, ds, cfg);

  fs::create_directories(out_dir);
  save_checkpoint(*model, budget, sig.resolution[0], seed,
                  (fs::path(out_dir) / "checkpoint").string());
  save_signal(trace.render, (fs::path(out_dir) / "render.inrb").string());
  if (sig.dim == 2 && sig.channels == 1)
    save_pgm(trace.render, (fs::path(out_dir) / "render.pgm").string());
  std::ofstream tr(fs::path(out_dir) / "trace.csv");
  tr << "step,loss\n";
  for (const auto& [s, l] : trace.loss_log) tr << s << "," << l << "\n";

  const double p = psnr(trace.render, ds.eval_signal);
  std::cout << "params=" << model->count_params() << " psnr=" << p
            << " train_s=" << trace.train_s << " infer_s=" << trace.infer_s << "\n";
  return 0;
}

int cmd_bench_run(const std::string& config, const std::string& out, int workers) {
  ExperimentMatrix m = parse_config(config);
  const std::vector<CellResult> rows = run_matrix(m, out, workers);
  int ok = 0;
  for (const CellResult& r : rows) ok += r.status == "ok";
  std::cout << rows.size() << " cells (" << ok << " ok), results in " << out
            << "/results.csv\n";
  return 0;
}

int cmd_bench_report(const std::string& in_dir, const std::string& metric) {
  std::ifstream is(fs::path(in_dir) / "results.csv");
  if (!is) throw IoError("missing results.csv in " + in_dir);
  std::string line;
  std::getline(is, line);  // header
  std::map<std::tuple<std::string, std::string, int64_t, double>,
           std::vector<double>>
      groups;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    CellResult c = cell_from_csv_row(line);
    if (c.status != "ok") continue;
    const double v = metric == "ssim" ? c.ssim_v : metric == "iou" ? c.iou_v
                                                                   : c.psnr_db;
    groups[{kind_name(c.model), task_name(c.task), c.budget, c.bandwidth}].push_back(v);
  }
  std::cout << "model,task,budget,bandwidth," << metric << "_mean," << metric
            << "_std\n";
  for (const auto& [k, vs] : groups) {
    double mean = 0.0;
    for (double v : vs) mean += v;
    mean /= static_cast<double>(vs.size());
    double var = 0.0;
    for (double v : vs) var += (v - mean) * (v - mean);
    const double sd = vs.size() > 1 ? std::sqrt(var / (static_cast<double>(vs.size()) - 1)) : 0.0;
    std::cout << std::get<0>(k) << ',' << std::get<1>(k) << ',' << std::get<2>(k)
              << ',' << std::get<3>(k) << ',' << mean << ',' << sd << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-signal representation benchmark"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a synthetic signal");
  std::string g_family = "bandlimited", g_out = "signal.inrb";
  int g_dim = 2;
  int64_t g_res = 128;
  double g_b = 0.5;
  uint64_t g_seed = 1234;
  gen->add_option("--family", g_family, "bandlimited|spheres|sierpinski|star");
  gen->add_option("--dim", g_dim)->check(CLI::IsMember({2, 3}));
  gen->add_option("--res", g_res);
  gen->add_option("--bandwidth", g_b);
  gen->add_option("--seed", g_seed);
  gen->add_option("--out", g_out);

  auto* fit = app.add_subcommand("fit", "fit one model to one signal");
  std::string f_model = "grid", f_task = "overfit", f_signal, f_out = "fit_out";
  int64_t f_budget = 10000;
  double f_eps = 0.05;
  int f_factor = 4, f_angles = 60, f_iters = 2000;
  uint64_t f_seed = 1234;
  fit->add_option("--model", f_model)->required();
  fit->add_option("--budget", f_budget)->required();
  fit->add_option("--task", f_task);
  fit->add_option("--signal", f_signal, "signal container or PGM/PPM")->required();
  fit->add_option("--eps", f_eps);
  fit->add_option("--factor", f_factor);
  fit->add_option("--angles", f_angles);
  fit->add_option("--iterations", f_iters);
  fit->add_option("--seed", f_seed);
  fit->add_option("--out", f_out);

  auto* bench = app.add_subcommand("bench", "experiment matrix runner");
  bench->require_subcommand(1);
  auto* brun = bench->add_subcommand("run", "run a matrix");
  std::string b_config, b_out = "bench_out";
  int b_workers = 1;
  brun->add_option("--config", b_config, "key=value config file (empty = defaults)");
  brun->add_option("--out", b_out);
  brun->add_option("--workers", b_workers);
  auto* brep = bench->add_subcommand("report", "summarize results.csv");
  std::string r_in = "bench_out", r_metric = "psnr";
  brep->add_option("--in", r_in);
  brep->add_option("--metric", r_metric)->check(CLI::IsMember({"psnr", "ssim", "iou"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (gen->parsed()) return cmd_gen(g_family, g_dim, g_res, g_b, g_seed, g_out);
    if (fit->parsed())
      return cmd_fit(f_model, f_budget, f_task, f_signal, f_eps, f_factor, f_angles,
                     f_seed, f_iters, f_out);
    if (brun->parsed()) return cmd_bench_run(b_config, b_out, b_workers);
    if (brep->parsed()) return cmd_bench_report(r_in, r_metric);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
