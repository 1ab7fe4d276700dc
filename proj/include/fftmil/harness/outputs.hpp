#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fftmil/data/dataset.hpp"
#include "fftmil/harness/config.hpp"
#include "fftmil/harness/train.hpp"
#include "fftmil/spectral/energy.hpp"

namespace fftmil::harness {

/// Write failures carry the path and the cause.
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_text(const std::filesystem::path& path, const std::string& text);

std::string metrics_json(const MetricsReport& r, int best_epoch, std::uint64_t seed);
/// K rows of K integers, no header: row = true class, column = predicted.
std::string confusion_csv(const MetricsReport& r);
/// `class,fpr,tpr,threshold` for every one-vs-rest curve.
std::string roc_points_csv(const Evaluation& ev, int classes);
/// Wall clock only. Kept apart so the other files are byte-identical across reruns.
std::string timing_json(double seconds, int epochs);

/// Mean cumulative radial energy over every image of `ds` after the
/// configured downsampling. The DC bin is left out.
spectral::RadialEnergyProfile dataset_energy_profile(const data::Dataset& ds, const ExperimentConfig& cfg);

/// Writes metrics.json, confusion.csv, roc_points.csv, energy_profile.csv,
/// epoch_log.csv, config_resolved.json (seeds narrowed to this run),
/// timing.json and model.ckpt into `dir`, creating it if needed.
void emit_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg, const TrainResult& run,
                  const spectral::RadialEnergyProfile& energy);

}  // namespace fftmil::harness
