#pragma once

#include <span>

namespace vybench {

struct ClassificationReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double roc_auc = 0.0;
};

struct RegressionReport {
  double mse = 0.0;
  double rmse = 0.0;
  double mae = 0.0;
  double max_error = 0.0;
  double r2 = 0.0;
};

// Positive class is 1. Precision/recall/f1 are reported as 0 with a WARN
// diagnostic when their denominator is 0, so aggregate tables never hold
// undefined entries. roc_auc falls back to 0.5 (with a diagnostic) when only
// one class is present in labels_true.
ClassificationReport classification_metrics(std::span<const int> labels_true,
                                            std::span<const int> labels_pred,
                                            std::span<const double> scores);

// Probability that a random positive outscores a random negative; ties count
// one half (Mann-Whitney rank formulation). Requires both classes.
double roc_auc(std::span<const int> labels_true, std::span<const double> scores);

// r2 = 1 - SS_res/SS_tot; constant y_true is an error (SS_tot = 0).
RegressionReport regression_metrics(std::span<const double> y_true,
                                    std::span<const double> y_pred);

struct Ci95 {
  double low = 0.0;   // empirical 2.5th percentile
  double high = 0.0;  // empirical 97.5th percentile
  double mean = 0.0;
  double parametric_low = 0.0;   // mean - 1.96*sd/sqrt(n)
  double parametric_high = 0.0;  // mean + 1.96*sd/sqrt(n)
};

// Empirical percentiles with linear interpolation between order statistics;
// the parametric pair is reported alongside for comparison.
Ci95 ci95(std::span<const double> values);

}  // namespace vybench
