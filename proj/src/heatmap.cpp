#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "inrbench/harness.hpp"
#include "inrbench/signal.hpp"

namespace inrb {

namespace {

struct Rgb {
  double r, g, b;
};

Rgb lerp(const Rgb& a, const Rgb& b, double t) {
  return {a.r + (b.r - a.r) * t, a.g + (b.g - a.g) * t, a.b + (b.b - a.b) * t};
}

// Sequential palette for absolute values (dark violet to yellow).
Rgb viridis(double t) {
  static const Rgb anchors[] = {
      {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
      {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
      {0.135, 0.659, 0.518}, {0.267, 0.749, 0.441}, {0.478, 0.821, 0.318},
      {0.741, 0.873, 0.150}, {0.993, 0.906, 0.144}};
  constexpr int n = 10;
  t = std::clamp(t, 0.0, 1.0) * n;
  const int i = std::min(n - 1, static_cast<int>(t));
  return lerp(anchors[i], anchors[i + 1], t - i);
}

// Diverging palette centered at 0; red above the baseline, blue below.
Rgb blue_white_red(double t) {  // t in [-1, 1]
  t = std::clamp(t, -1.0, 1.0);
  const Rgb blue{0.13, 0.30, 0.75}, white{1.0, 1.0, 1.0}, red{0.80, 0.12, 0.12};
  return t < 0.0 ? lerp(white, blue, -t) : lerp(white, red, t);
}

constexpr int kCell = 24;

void write_map(const std::vector<std::vector<double>>& grid, bool diverging,
               const std::string& path) {
  const int64_t rows = static_cast<int64_t>(grid.size());
  const int64_t cols = rows ? static_cast<int64_t>(grid[0].size()) : 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, amax = 0.0;
  for (const auto& r : grid)
    for (double v : r) {
      if (!std::isfinite(v)) continue;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      amax = std::max(amax, std::fabs(v));
    }
  if (!(hi > lo)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (amax == 0.0) amax = 1.0;
  const int64_t w = cols * kCell, h = rows * kCell;
  std::vector<uint8_t> img(static_cast<size_t>(w * h * 3), 0);
  for (int64_t y = 0; y < h; ++y)
    for (int64_t x = 0; x < w; ++x) {
      const double v = grid[static_cast<size_t>(y / kCell)][static_cast<size_t>(x / kCell)];
      Rgb c{0.5, 0.5, 0.5};  // gray for missing cells
      if (std::isfinite(v))
        c = diverging ? blue_white_red(v / amax) : viridis((v - lo) / (hi - lo));
      else if (std::isinf(v))
        c = diverging ? blue_white_red(v > 0 ? 1.0 : -1.0) : viridis(1.0);
      const size_t o = static_cast<size_t>((y * w + x) * 3);
      img[o] = static_cast<uint8_t>(std::lround(c.r * 255.0));
      img[o + 1] = static_cast<uint8_t>(std::lround(c.g * 255.0));
      img[o + 2] = static_cast<uint8_t>(std::lround(c.b * 255.0));
    }
  save_ppm_rgb(img, w, h, path);
}

}  // namespace

void emit_heatmaps(const std::vector<CellResult>& rows, const ExperimentMatrix& m,
                   const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<int64_t> budgets = m.budgets;
  std::sort(budgets.begin(), budgets.end(), std::greater<>());  // largest on top
  std::vector<double> bands = m.bandwidths;
  std::sort(bands.begin(), bands.end());

  // mean PSNR over seeds per (model, budget, bandwidth)
  std::map<std::tuple<std::string, int64_t, double>, std::pair<double, int>> agg;
  for (const CellResult& c : rows) {
    if (c.status != "ok" || c.task != m.task) continue;
    auto& [sum, n] = agg[{kind_name(c.model), c.budget, c.bandwidth}];
    sum += c.psnr_db;
    n += 1;
  }
  auto mean_at = [&](ModelKind kind, int64_t budget, double b) {
    auto it = agg.find({kind_name(kind), budget, b});
    if (it == agg.end() || it->second.second == 0)
      return std::numeric_limits<double>::quiet_NaN();
    return it->second.first / it->second.second;
  };

  for (ModelKind kind : m.models) {
    std::vector<std::vector<double>> abs_map, delta_map;
    for (int64_t budget : budgets) {
      std::vector<double> arow, drow;
      for (double b : bands) {
        const double v = mean_at(kind, budget, b);
        const double base = mean_at(m.baseline, budget, b);
        arow.push_back(v);
        drow.push_back(v - base);
      }
      abs_map.push_back(std::move(arow));
      delta_map.push_back(std::move(drow));
    }
    const std::string stem =
        std::string("heat_") + kind_name(kind) + "_" + task_name(m.task);
    write_map(abs_map, false, (fs::path(out_dir) / (stem + "_abs.ppm")).string());
    write_map(delta_map, true, (fs::path(out_dir) / (stem + "_delta.ppm")).string());
  }
}

}  // namespace inrb
