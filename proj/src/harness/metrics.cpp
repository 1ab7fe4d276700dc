#include "fftmil/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fftmil/error.hpp"

namespace fftmil::harness {

namespace {

void check_inputs(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels, int K) {
  if (K < 1) throw InvalidArgument("metrics: need at least one class");
  if (scores.size() != labels.size()) throw InvalidArgument("metrics: scores and labels differ in length");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= K)
      throw InvalidArgument("metrics: label " + std::to_string(labels[i]) + " at row " + std::to_string(i) +
                            " outside [0," + std::to_string(K) + ")");
    if (static_cast<int>(scores[i].size()) != K)
      throw InvalidArgument("metrics: score row " + std::to_string(i) + " is not " + std::to_string(K) + " wide");
  }
}

}  // namespace

std::vector<RocPoint> roc_curve(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels,
                                int k) {
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a][k] > scores[b][k]; });
  std::size_t P = 0;
  for (int y : labels) P += y == k;
  const std::size_t N = labels.size() - P;
  std::vector<RocPoint> pts{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]][k];
    while (i < order.size() && scores[order[i]][k] == s) {
      (labels[order[i]] == k ? tp : fp)++;
      ++i;
    }
    pts.push_back({N ? static_cast<double>(fp) / N : 0.0, P ? static_cast<double>(tp) / P : 0.0, s});
  }
  return pts;
}

AucResult roc_auc_ovr(const std::vector<std::vector<double>>& scores, const std::vector<int>& labels, int K,
                      bool strict) {
  check_inputs(scores, labels, K);
  AucResult res;
  res.per_class.resize(K);
  double sum = 0;
  int defined = 0;
  for (int k = 0; k < K; ++k) {
    std::size_t P = 0;
    for (int y : labels) P += y == k;
    const std::size_t N = labels.size() - P;
    if (P == 0 || N == 0) {
      const std::string msg = "class " + std::to_string(k) + " has no " + (P == 0 ? "positives" : "negatives") +
                              "; its AUC is undefined and left out of the mean";
      if (strict) throw InvalidArgument(msg);
      res.warnings.push_back(msg);
      continue;
    }
    const auto pts = roc_curve(scores, labels, k);
    double area = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      area += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) / 2;
    res.per_class[k] = area;
    sum += area;
    ++defined;
  }
  res.macro = defined ? sum / defined : std::numeric_limits<double>::quiet_NaN();
  return res;
}

MetricsReport evaluate_metrics(const std::vector<int>& predictions, const std::vector<std::vector<double>>& scores,
                               const std::vector<int>& labels, int K) {
  check_inputs(scores, labels, K);
  if (predictions.size() != labels.size()) throw InvalidArgument("metrics: predictions and labels differ in length");
  MetricsReport r;
  r.classes = K;
  r.confusion.assign(K, std::vector<int>(K, 0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] < 0 || predictions[i] >= K)
      throw InvalidArgument("metrics: prediction " + std::to_string(predictions[i]) + " outside [0," +
                            std::to_string(K) + ")");
    r.confusion[labels[i]][predictions[i]]++;
  }
  const int n = static_cast<int>(labels.size());
  int correct = 0;
  for (int k = 0; k < K; ++k) correct += r.confusion[k][k];
  r.accuracy = n ? static_cast<double>(correct) / n : 0.0;

  r.per_class.resize(K);
  double f1_sum = 0, weighted = 0;
  for (int k = 0; k < K; ++k) {
    int predicted = 0, support = 0;
    for (int j = 0; j < K; ++j) {
      predicted += r.confusion[j][k];
      support += r.confusion[k][j];
    }
    const int tp = r.confusion[k][k];
    ClassMetrics& m = r.per_class[k];
    m.support = support;
    m.precision = predicted ? static_cast<double>(tp) / predicted : 0.0;
    m.recall = support ? static_cast<double>(tp) / support : 0.0;
    // integer form keeps the brute-force comparison exact
    m.f1 = (predicted + support) ? 2.0 * tp / (predicted + support) : 0.0;
    if (predicted + support == 0)
      r.warnings.push_back("class " + std::to_string(k) + " has no predictions and no samples; F1 set to 0");
    f1_sum += m.f1;
    weighted += m.f1 * support;
  }
  r.macro_f1 = f1_sum / K;
  r.weighted_f1 = n ? weighted / n : 0.0;

  auto auc = roc_auc_ovr(scores, labels, K);
  r.macro_auc = auc.macro;
  r.per_class_auc = auc.per_class;
  r.warnings.insert(r.warnings.end(), auc.warnings.begin(), auc.warnings.end());
  return r;
}

}  // namespace fftmil::harness
