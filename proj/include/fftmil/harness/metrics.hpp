#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fftmil::harness {

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  int support = 0;
};

struct MetricsReport {
  int classes = 0;
  double accuracy = 0;
  double macro_f1 = 0;
  double weighted_f1 = 0;
  double macro_auc = 0;
  std::vector<ClassMetrics> per_class;
  std::vector<std::optional<double>> per_class_auc;
  std::vector<std::vector<int>> confusion;  // [true][predicted]
  std::size_t param_count = 0;
  double seconds = 0;
  std::vector<std::string> warnings;
};

struct AucResult {
  double macro = 0;  // mean over classes with a defined AUC; NaN if none
  std::vector<std::optional<double>> per_class;
  std::vector<std::string> warnings;
};

/// One-vs-rest ROC AUC per class by the trapezoid rule over thresholds at
/// the distinct scores (equal scores move together, so ties count one
/// half). Classes without positives or negatives are skipped with a
/// warning, or rejected when `strict`.
AucResult roc_auc_ovr(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels,
                      int classes, bool strict = false);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;
};
/// ROC of class k against the rest, starting at (0,0).
std::vector<RocPoint> roc_curve(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels,
                                int k);

/// `scores` rows are K-wide probability vectors. Labels and predictions must
/// lie in [0, K).
MetricsReport evaluate_metrics(const std::vector<int>& predictions, const std::vector<std::vector<double>>& scores,
                               const std::vector<int>& labels, int classes);

}  // namespace fftmil::harness
