#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bayes.hpp"
#include "errors.hpp"

namespace bpielm {

struct MetricsReport {
  double mae = 0.0;
  double max_ae = 0.0;
  /// Fraction of points with |mean - exact| <= 2 sqrt(variance).
  double two_sigma_coverage = 0.0;
  std::vector<double> parameter_errors;
  std::size_t n_eval_points = 0;
  double wall_time_seconds = 0.0;
};

inline MetricsReport evaluate(std::span<const Prediction> predictions,
                              std::span<const double> exact) {
  if (predictions.empty()) throw InvalidArgument("evaluate: no points");
  if (predictions.size() != exact.size())
    throw InvalidArgument("evaluate: predictions and exact values differ in length");
  MetricsReport report;
  report.n_eval_points = predictions.size();
  double sum = 0.0;
  std::size_t covered = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double err = std::abs(predictions[i].mean - exact[i]);
    sum += err;
    report.max_ae = std::max(report.max_ae, err);
    if (err <= 2.0 * std::sqrt(std::max(0.0, predictions[i].variance))) ++covered;
  }
  report.mae = std::min(sum / static_cast<double>(predictions.size()), report.max_ae);
  report.two_sigma_coverage =
      static_cast<double>(covered) / static_cast<double>(predictions.size());
  return report;
}

}  // namespace bpielm
