#include "inrbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "inrbench/errors.hpp"
#include "inrbench/generators.hpp"
#include "inrbench/metrics.hpp"
#include "inrbench/rng.hpp"
#include "inrbench/train.hpp"

namespace inrb {

namespace {

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_bandwidth(const std::string& v) {
  const double b = std::stod(v);
  const int k = static_cast<int>(std::lround(b * 10.0));
  if (k < 1 || k > 9 || std::fabs(b - k / 10.0) > 1e-9)
    throw ConfigError("bandwidths: " + v + " is not one of {0.1,...,0.9}");
  return k / 10.0;
}

std::string fmt(double v, int prec) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

}  // namespace

ExperimentMatrix parse_config_text(const std::string& text) {
  ExperimentMatrix m;
  m.models = {ModelKind::grid,     ModelKind::ffn,      ModelKind::siren,
              ModelKind::wire,     ModelKind::gaplanes, ModelKind::hashgrid,
              ModelKind::gsplat2d, ModelKind::bacon};
  m.budgets = {10000, 30000, 100000, 300000, 1000000, 3000000};
  for (int k = 1; k <= 9; ++k) m.bandwidths.push_back(k / 10.0);

  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "models") {
        m.models.clear();
        for (const std::string& v : split(val, ','))
          m.models.push_back(kind_from_name(trim(v)));
      } else if (key == "budgets") {
        m.budgets.clear();
        for (const std::string& v : split(val, ','))
          m.budgets.push_back(std::stoll(trim(v)));
      } else if (key == "bandwidths") {
        m.bandwidths.clear();
        for (const std::string& v : split(val, ','))
          m.bandwidths.push_back(parse_bandwidth(trim(v)));
      } else if (key == "family") {
        if (val != "bandlimited" && val != "spheres" && val != "sierpinski" &&
            val != "star")
          throw ConfigError("family: unknown signal family " + val);
        m.family = val;
      } else if (key == "dim") {
        m.dim = std::stoi(val);
        if (m.dim != 2 && m.dim != 3) throw ConfigError("dim: must be 2 or 3");
      } else if (key == "resolution") {
        m.resolution = std::stoll(val);
      } else if (key == "seeds") {
        m.seeds.clear();
        for (const std::string& v : split(val, ','))
          m.seeds.push_back(std::stoull(trim(v)));
      } else if (key == "task") {
        m.task = task_from_name(val);
      } else if (key == "baseline") {
        m.baseline = kind_from_name(val);
      } else if (key == "iterations") {
        m.iterations = std::stoi(val);
      } else if (key == "eps") {
        m.eps = std::stod(val);
      } else if (key == "factor") {
        m.factor = std::stoi(val);
      } else if (key == "n_angles") {
        m.n_angles = std::stoi(val);
      } else {
        throw ConfigError("unknown config key: " + key);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": cannot parse value '" + val + "'");
    }
  }
  if (m.models.empty() || m.budgets.empty() || m.bandwidths.empty() || m.seeds.empty())
    throw ConfigError("config: empty matrix axis");
  return m;
}

ExperimentMatrix parse_config(const std::string& path) {
  if (path.empty()) return parse_config_text("");
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return parse_config_text(os.str());
}

std::string cell_csv_row(const CellResult& c) {
  std::ostringstream os;
  os << kind_name(c.model) << ',' << task_name(c.task) << ',' << c.family << ','
     << c.dim << ',' << c.resolution << ',' << c.budget << ',' << fmt(c.bandwidth, 1)
     << ',' << c.seed << ',';
  if (c.status == "ok") {
    os << c.param_count << ',' << fmt(c.psnr_db, 4) << ','
       << (c.dim == 2 ? fmt(c.ssim_v, 6) : std::string()) << ','
       << (c.dim == 3 ? fmt(c.iou_v, 6) : std::string()) << ',' << fmt(c.train_s, 6)
       << ',' << fmt(c.infer_s, 6);
  } else {
    os << ",,,,,";
  }
  os << ',' << c.status;
  return os.str();
}

CellResult cell_from_csv_row(const std::string& line) {
  const std::vector<std::string> f = split(line, ',');
  if (f.size() != 15) throw IoError("malformed results row: " + line);
  CellResult c;
  c.model = kind_from_name(f[0]);
  c.task = task_from_name(f[1]);
  c.family = f[2];
  c.dim = std::stoi(f[3]);
  c.resolution = std::stoll(f[4]);
  c.budget = std::stoll(f[5]);
  c.bandwidth = std::stod(f[6]);
  c.seed = std::stoull(f[7]);
  c.status = f[14];
  if (c.status == "ok") {
    c.param_count = std::stoll(f[8]);
    c.psnr_db = f[9] == "inf" ? std::numeric_limits<double>::infinity() : std::stod(f[9]);
    if (!f[10].empty()) c.ssim_v = std::stod(f[10]);
    if (!f[11].empty()) c.iou_v = std::stod(f[11]);
    c.train_s = std::stod(f[12]);
    c.infer_s = std::stod(f[13]);
  }
  return c;
}

void sort_canonical(std::vector<CellResult>& rows) {
  std::sort(rows.begin(), rows.end(), [](const CellResult& a, const CellResult& b) {
    const std::string ma = kind_name(a.model), mb = kind_name(b.model);
    if (ma != mb) return ma < mb;
    const std::string ta = task_name(a.task), tb = task_name(b.task);
    if (ta != tb) return ta < tb;
    if (a.budget != b.budget) return a.budget < b.budget;
    if (a.bandwidth != b.bandwidth) return a.bandwidth < b.bandwidth;
    return a.seed < b.seed;
  });
}

void emit_csv(std::vector<CellResult> rows, const std::string& path) {
  sort_canonical(rows);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write CSV: " + path);
  os << "model,task,family,dim,resolution,budget,bandwidth,seed,param_count,"
        "psnr_db,ssim,iou,train_s,infer_s,status\n";
  for (const CellResult& c : rows) os << cell_csv_row(c) << "\n";
}

namespace {

struct CellKey {
  std::string model, task;
  int64_t budget;
  double bandwidth;
  uint64_t seed;
  bool operator<(const CellKey& o) const {
    return std::tie(model, task, budget, bandwidth, seed) <
           std::tie(o.model, o.task, o.budget, o.bandwidth, o.seed);
  }
};

CellKey key_of(const CellResult& c) {
  return {kind_name(c.model), task_name(c.task), c.budget, c.bandwidth, c.seed};
}

class SignalCache {
 public:
  SignalCache(const ExperimentMatrix& m) : m_(m) {}

  // Datasets are shared across models and budgets of one (bandwidth, seed).
  std::shared_ptr<const TaskDataset> dataset(double b, uint64_t seed) {
    const std::pair<double, uint64_t> key{b, seed};
    std::lock_guard<std::mutex> lk(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    SampledSignal sig = make_signal(b, seed);
    CorruptionArgs args;
    args.eps = m_.eps;
    args.factor = m_.factor;
    args.n_angles = m_.n_angles;
    args.seed = derive_seed(seed, 0xc0);
    auto ds = std::make_shared<TaskDataset>(build_dataset(sig, m_.task, args));
    cache_.emplace(key, ds);
    return ds;
  }

 private:
  SampledSignal make_signal(double b, uint64_t seed) const {
    if (m_.family == "bandlimited")
      return gen_bandlimited(m_.dim, m_.resolution, b, seed);
    if (m_.family == "spheres") return gen_spheres(m_.dim, m_.resolution, b, seed);
    if (m_.family == "sierpinski") return gen_sierpinski(m_.resolution, b);
    return gen_star_target(m_.resolution).signal;
  }

  const ExperimentMatrix& m_;
  std::mutex mu_;
  std::map<std::pair<double, uint64_t>, std::shared_ptr<const TaskDataset>> cache_;
};

CellResult run_cell(const ExperimentMatrix& m, SignalCache& cache, ModelKind kind,
                    int64_t budget, double bandwidth, uint64_t seed) {
  CellResult c;
  c.model = kind;
  c.task = m.task;
  c.family = m.family;
  c.dim = m.dim;
  c.resolution = m.resolution;
  c.budget = budget;
  c.bandwidth = bandwidth;
  c.seed = seed;
  if (kind == ModelKind::gsplat2d && m.dim == 3) {
    c.status = "skipped";
    return c;
  }
  if (m.task == TaskKind::ct && m.dim == 3) {
    c.status = "skipped";
    return c;
  }
  try {
    std::shared_ptr<const TaskDataset> ds = cache.dataset(bandwidth, seed);
    auto model = make_model(kind, budget, m.dim, ds->eval_signal.channels,
                            m.resolution,
                            derive_seed(derive_seed(seed, static_cast<uint64_t>(kind)),
                                        static_cast<uint64_t>(budget)));
    TrainConfig cfg;
    cfg.iterations = m.iterations;
    cfg.seed = seed;
    if (m.task == TaskKind::ct && kind == ModelKind::grid)
      cfg.tv_weight = kDefaultCtTvWeight;
    TrainingTrace trace = train(*model, *ds, cfg);
    c.param_count = model->count_params();
    c.psnr_db = psnr(trace.render, ds->eval_signal);
    if (m.dim == 2) c.ssim_v = ssim(trace.render, ds->eval_signal);
    if (m.dim == 3) c.iou_v = iou(trace.render, ds->eval_signal);
    c.train_s = trace.train_s;
    c.infer_s = trace.infer_s;
    c.status = "ok";
  } catch (const TrainingDiverged&) {
    c.status = "diverged";
  } catch (const Unsupported&) {
    c.status = "skipped";
  } catch (const BudgetInfeasible&) {
    c.status = "skipped";
  } catch (const DegenerateSignal&) {
    c.status = "skipped";
  }
  return c;
}

}  // namespace

std::vector<CellResult> run_matrix(const ExperimentMatrix& m,
                                   const std::string& out_dir, int workers) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string ledger_path = (fs::path(out_dir) / "ledger.csv").string();

  std::map<CellKey, CellResult> done;
  {
    std::ifstream is(ledger_path);
    std::string line;
    while (is && std::getline(is, line)) {
      line = trim(line);
      if (line.empty()) continue;
      CellResult c = cell_from_csv_row(line);
      done.emplace(key_of(c), c);
    }
  }

  struct Cell {
    ModelKind model;
    int64_t budget;
    double bandwidth;
    uint64_t seed;
  };
  std::vector<Cell> todo;
  for (ModelKind kind : m.models)
    for (int64_t budget : m.budgets)
      for (double b : m.bandwidths)
        for (uint64_t seed : m.seeds) {
          const CellKey k{kind_name(kind), task_name(m.task), budget, b, seed};
          if (!done.count(k)) todo.push_back({kind, budget, b, seed});
        }

  if (const char* env = std::getenv("INRB_WORKERS")) workers = std::atoi(env);
  workers = std::max(1, std::min<int>(workers, static_cast<int>(todo.size()) + 1));

  SignalCache cache(m);
  std::ofstream ledger(ledger_path, std::ios::app);
  if (!ledger) throw IoError("cannot append to ledger: " + ledger_path);
  std::mutex write_mu;
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      const Cell& cell = todo[i];
      CellResult r = run_cell(m, cache, cell.model, cell.budget, cell.bandwidth, cell.seed);
      std::lock_guard<std::mutex> lk(write_mu);
      done.emplace(key_of(r), r);
      ledger << cell_csv_row(r) << "\n";
      ledger.flush();
    }
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::vector<CellResult> rows;
  rows.reserve(done.size());
  for (const auto& [k, v] : done) rows.push_back(v);
  sort_canonical(rows);
  emit_csv(rows, (fs::path(out_dir) / "results.csv").string());
  emit_heatmaps(rows, m, out_dir);
  return rows;
}

}  // namespace inrb
