#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fftmil/autodiff/checkpoint.hpp"
#include "fftmil/harness/config.hpp"
#include "fftmil/harness/metrics.hpp"
#include "fftmil/harness/pipeline.hpp"
#include "fftmil/mil/model.hpp"

namespace fftmil::harness {

struct EpochRecord {
  int epoch = 0;  // 0 = the initialized model
  double train_loss = 0;
  double accuracy = 0;
  double macro_f1 = 0;
  double weighted_f1 = 0;
  double macro_auc = 0;
};

struct Evaluation {
  MetricsReport report;
  std::vector<std::vector<double>> scores;  // softmax rows
  std::vector<int> labels;
  std::vector<int> predictions;
  std::vector<std::string> ids;
};

struct TrainResult {
  std::uint64_t seed = 0;
  int best_epoch = 0;
  Evaluation best;
  std::vector<EpochRecord> log;
  ad::Checkpoint checkpoint;  // state at best_epoch
  std::size_t param_count = 0;
  double seconds = 0;
};

std::size_t count_params(mil::MilModel<float>& model);

/// Forward-only pass over `samples` (evaluation mode).
Evaluation evaluate_model(mil::MilModel<float>& model, const std::vector<PreparedSample>& samples, int crop,
                          int classes);

double selection_value(const EpochRecord& r, Selection s);

/// Trains one model (one bag per Adam step, shuffled each epoch from `seed`),
/// evaluates on the test split after every epoch and keeps the state with
/// the best selection metric; ties keep the earliest epoch. A non-finite
/// loss raises NumericalError naming the epoch and step.
TrainResult run_train(const ExperimentConfig& cfg, const PreparedData& data, std::uint64_t seed,
                      const std::function<void(const EpochRecord&)>& on_epoch = {});

std::string epoch_log_csv(const std::vector<EpochRecord>& log);

}  // namespace fftmil::harness
