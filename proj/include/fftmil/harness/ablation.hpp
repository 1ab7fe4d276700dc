#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "fftmil/data/dataset.hpp"
#include "fftmil/harness/config.hpp"
#include "fftmil/harness/train.hpp"

namespace fftmil::harness {

enum class Axis { spectra, region, crop, downsample, normalization, design, fusion, transform };

Axis parse_axis(std::string_view name);
const char* to_string(Axis a);

/// Values swept for `axis`, in table order. Crop and downsample come from
/// the config lists; the rest are the full enum.
std::vector<std::string> axis_values(Axis axis, const ExperimentConfig& base);
/// Row the delta columns are measured against: None for normalization,
/// otherwise the base config's own value (or the first value if the base
/// value is not swept).
std::string axis_baseline(Axis axis, const ExperimentConfig& base);
ExperimentConfig apply_axis_value(const ExperimentConfig& base, Axis axis, const std::string& value);

struct AblationRun {
  std::string value;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsReport report;
  int best_epoch = 0;
  std::size_t param_count = 0;
  double seconds = 0;
};

struct AblationRow {
  std::string value;
  int runs = 0;
  int failures = 0;
  double accuracy = 0, macro_f1 = 0, weighted_f1 = 0, macro_auc = 0;
  std::size_t param_count = 0;
  // Relative change against the baseline row, in percent. NaN when either
  // side is missing or the baseline is zero.
  double d_accuracy = 0, d_macro_f1 = 0, d_weighted_f1 = 0, d_macro_auc = 0;
};

struct AblationResult {
  Axis axis = Axis::normalization;
  std::string baseline;
  std::vector<AblationRun> runs;  // sorted by (value order, seed)
  std::vector<AblationRow> rows;  // one per value
  bool any_failed() const;
};

/// Called after every run; `train` is null when the run failed.
using AblationCallback = std::function<void(const AblationRun&, const ExperimentConfig&, const TrainResult*)>;

/// run_train for every (value, seed). Patch bags are encoded once and shared.
/// A failing run is recorded and the sweep moves on.
AblationResult run_ablation(const ExperimentConfig& base, Axis axis, const data::Dataset& ds,
                            const AblationCallback& on_run = {});

/// Mean metrics per value plus the delta columns, from the runs alone.
std::vector<AblationRow> aggregate_runs(const std::vector<AblationRun>& runs, const std::vector<std::string>& values,
                                        const std::string& baseline);

std::string ablation_runs_csv(const AblationResult& r);
std::string ablation_summary_csv(const AblationResult& r);

}  // namespace fftmil::harness
