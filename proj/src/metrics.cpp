#include "vybench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "vybench/common.hpp"

namespace vybench {

namespace {

void require_binary(std::span<const int> labels, const char* what) {
  for (const int y : labels) {
    if (y != 0 && y != 1) throw DataError(std::string(what) + ": labels must be 0/1");
  }
}

}  // namespace

ClassificationReport classification_metrics(std::span<const int> labels_true,
                                            std::span<const int> labels_pred,
                                            std::span<const double> scores) {
  const std::size_t n = labels_true.size();
  if (n == 0 || labels_pred.size() != n || scores.size() != n) {
    throw DataError("classification_metrics: length mismatch");
  }
  require_binary(labels_true, "classification_metrics");
  require_binary(labels_pred, "classification_metrics");

  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels_true[i] == 1) {
      (labels_pred[i] == 1 ? tp : fn)++;
    } else {
      (labels_pred[i] == 1 ? fp : tn)++;
    }
  }

  ClassificationReport rep;
  rep.accuracy = static_cast<double>(tp + tn) / static_cast<double>(n);
  if (tp + fp > 0) {
    rep.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    diag::warn("precision undefined (no positive predictions), reporting 0");
  }
  if (tp + fn > 0) {
    rep.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    diag::warn("recall undefined (no positive labels), reporting 0");
  }
  if (rep.precision + rep.recall > 0.0) {
    rep.f1 = 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall);
  } else {
    diag::warn("f1 undefined (precision + recall = 0), reporting 0");
  }

  const bool has_pos = (tp + fn) > 0;
  const bool has_neg = (fp + tn) > 0;
  if (has_pos && has_neg) {
    rep.roc_auc = roc_auc(labels_true, scores);
  } else {
    rep.roc_auc = 0.5;
    diag::warn("roc_auc undefined (single-class labels), reporting 0.5");
  }
  return rep;
}

double roc_auc(std::span<const int> labels_true, std::span<const double> scores) {
  const std::size_t n = labels_true.size();
  if (n == 0 || scores.size() != n) throw DataError("roc_auc: length mismatch");
  require_binary(labels_true, "roc_auc");

  std::int64_t n_pos = 0;
  for (const int y : labels_true) n_pos += y;
  const std::int64_t n_neg = static_cast<std::int64_t>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw DataError("roc_auc: needs both classes");

  // Mann-Whitney U via average ranks over tied scores.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k) {
      if (labels_true[idx[k]] == 1) rank_sum_pos += avg_rank;
    }
    i = j + 1;
  }

  const double u = rank_sum_pos - static_cast<double>(n_pos) *
                                      (static_cast<double>(n_pos) + 1.0) / 2.0;
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

RegressionReport regression_metrics(std::span<const double> y_true,
                                    std::span<const double> y_pred) {
  const std::size_t n = y_true.size();
  if (n < 2 || y_pred.size() != n) throw DataError("regression_metrics: length mismatch");

  double sum_sq = 0.0, sum_abs = 0.0, max_err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y_pred[i] - y_true[i];
    sum_sq += e * e;
    sum_abs += std::abs(e);
    max_err = std::max(max_err, std::abs(e));
  }

  const double mean = std::accumulate(y_true.begin(), y_true.end(), 0.0) /
                      static_cast<double>(n);
  double ss_tot = 0.0;
  for (const double y : y_true) ss_tot += (y - mean) * (y - mean);
  if (ss_tot == 0.0) {
    throw DataError("regression_metrics: constant y_true, r2 undefined");
  }

  RegressionReport rep;
  rep.mse = sum_sq / static_cast<double>(n);
  rep.rmse = std::sqrt(rep.mse);
  rep.mae = sum_abs / static_cast<double>(n);
  rep.max_error = max_err;
  rep.r2 = 1.0 - sum_sq / ss_tot;
  return rep;
}

Ci95 ci95(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) throw DataError("ci95: empty input");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  const auto percentile = [&](double p) {
    const double pos = p / 100.0 * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  };

  Ci95 ci;
  ci.low = percentile(2.5);
  ci.high = percentile(97.5);
  ci.mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  double sd = 0.0;
  if (n > 1) {
    double ss = 0.0;
    for (const double v : sorted) ss += (v - ci.mean) * (v - ci.mean);
    sd = std::sqrt(ss / static_cast<double>(n - 1));
  }
  const double half = 1.96 * sd / std::sqrt(static_cast<double>(n));
  ci.parametric_low = ci.mean - half;
  ci.parametric_high = ci.mean + half;
  return ci;
}

}  // namespace vybench
