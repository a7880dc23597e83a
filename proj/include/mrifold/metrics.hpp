#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrifold/reconstruction.hpp"

namespace mrifold {

/// Mean over pixels of the squared difference.
inline double mse(const Image& a, const Image& b) {
  require_same_size(a.size(), b.size(), "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < a.raw().size(); ++i) {
    const double d = a.raw()[i] - b.raw()[i];
    s += d * d;
  }
  return s / static_cast<double>(a.raw().size());
}

namespace detail {

/// 11x11 Gaussian window, sigma 1.5, normalized to unit sum.
inline const std::array<double, 121>& ssim_window() {
  static const std::array<double, 121> w = [] {
    std::array<double, 121> out{};
    std::array<double, 11> g{};
    double gs = 0.0;
    for (int i = 0; i < 11; ++i) {
      const double d = i - 5;
      g[i] = std::exp(-d * d / (2.0 * 1.5 * 1.5));
      gs += g[i];
    }
    for (auto& v : g) v /= gs;
    for (int y = 0; y < 11; ++y)
      for (int x = 0; x < 11; ++x) out[y * 11 + x] = g[y] * g[x];
    return out;
  }();
  return w;
}

}  // namespace detail

/// Mean structural similarity over all fully-interior 11x11 windows
/// (Gaussian weighted, sigma 1.5; K1 = 0.01, K2 = 0.03, data range 1.0).
inline double ssim(const Image& a, const Image& b) {
  require_same_size(a.size(), b.size(), "ssim");
  const int n = a.size();
  constexpr int win = 11;
  if (n < win) throw std::invalid_argument("ssim: image smaller than the 11x11 window");
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  const auto& w = detail::ssim_window();

  double total = 0.0;
  const int positions = n - win + 1;
  for (int y0 = 0; y0 < positions; ++y0) {
    for (int x0 = 0; x0 < positions; ++x0) {
      double mu1 = 0.0, mu2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
      for (int dy = 0; dy < win; ++dy) {
        for (int dx = 0; dx < win; ++dx) {
          const double wv = w[dy * win + dx];
          const double va = a(y0 + dy, x0 + dx);
          const double vb = b(y0 + dy, x0 + dx);
          mu1 += wv * va;
          mu2 += wv * vb;
          s11 += wv * (va * va);
          s22 += wv * (vb * vb);
          // The parenthesised product keeps ssim(a,b) == ssim(b,a) bitwise:
          // va*vb commutes exactly, (wv*va)*vb would not.
          s12 += wv * (va * vb);
        }
      }
      const double var1 = s11 - mu1 * mu1;
      const double var2 = s22 - mu2 * mu2;
      const double cov = s12 - mu1 * mu2;
      total += ((2.0 * mu1 * mu2 + c1) * (2.0 * cov + c2)) /
               ((mu1 * mu1 + mu2 * mu2 + c1) * (var1 + var2 + c2));
    }
  }
  return total / (static_cast<double>(positions) * positions);
}

inline constexpr std::array<const char*, 3> kStageNames = {"aliased", "unet", "corrected"};

struct MetricRow {
  int image_id = 0;
  std::string stage;
  double mse = 0.0;
  double ssim = 0.0;
};

/// Mean and sample standard deviation (n-1 denominator; 0 when a single
/// image leaves the spread degenerate).
struct StageAggregate {
  int count = 0;
  double mse_mean = 0.0;
  double mse_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
};

struct MetricsReport {
  std::vector<MetricRow> rows;               // three per image, stage-major in image order
  std::array<StageAggregate, 3> aggregates;  // indexed like kStageNames

  bool has_aggregates() const { return !rows.empty(); }
};

/// Score the three reconstruction stages of each result against its truth.
inline MetricsReport evaluate(const std::vector<ReconResult>& results,
                              const std::vector<Image>& truths) {
  if (results.size() != truths.size())
    throw std::invalid_argument("evaluate: results/truths length mismatch");
  MetricsReport report;
  std::array<std::vector<double>, 3> mses, ssims;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::array<const Image*, 3> stages = {&results[i].aliased, &results[i].unet_output,
                                                &results[i].final};
    for (int s = 0; s < 3; ++s) {
      MetricRow row;
      row.image_id = static_cast<int>(i);
      row.stage = kStageNames[s];
      row.mse = mse(*stages[s], truths[i]);
      row.ssim = ssim(*stages[s], truths[i]);
      report.rows.push_back(row);
      mses[s].push_back(row.mse);
      ssims[s].push_back(row.ssim);
    }
  }
  for (int s = 0; s < 3; ++s) {
    auto& agg = report.aggregates[s];
    agg.count = static_cast<int>(mses[s].size());
    if (agg.count == 0) continue;
    auto mean_std = [](const std::vector<double>& v) {
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0.0;
      if (v.size() > 1) {
        for (double x : v) var += (x - mean) * (x - mean);
        var /= static_cast<double>(v.size() - 1);
      }
      return std::pair<double, double>(mean, std::sqrt(var));
    };
    std::tie(agg.mse_mean, agg.mse_std) = mean_std(mses[s]);
    std::tie(agg.ssim_mean, agg.ssim_std) = mean_std(ssims[s]);
  }
  return report;
}

}  // namespace mrifold
