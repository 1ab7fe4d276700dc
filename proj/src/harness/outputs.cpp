#include "fftmil/harness/outputs.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "fftmil/autodiff/checkpoint.hpp"
#include "fftmil/error.hpp"
#include "fftmil/spectral/transforms.hpp"

namespace fftmil::harness {

using json = nlohmann::ordered_json;

namespace {

// NaN has no JSON spelling; undefined values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw OutputError("cannot open " + path.string() + ": " + std::strerror(errno));
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw OutputError("write failed for " + path.string() + ": " + std::strerror(errno));
}

std::string metrics_json(const MetricsReport& r, int best_epoch, std::uint64_t seed) {
  json j;
  j["seed"] = seed;
  j["best_epoch"] = best_epoch;
  j["classes"] = r.classes;
  j["accuracy"] = number(r.accuracy);
  j["macro_f1"] = number(r.macro_f1);
  j["weighted_f1"] = number(r.weighted_f1);
  j["macro_auc"] = number(r.macro_auc);
  j["param_count"] = r.param_count;
  j["param_count_millions"] = static_cast<double>(r.param_count) / 1e6;
  json per = json::array();
  for (std::size_t k = 0; k < r.per_class.size(); ++k) {
    const auto& c = r.per_class[k];
    json row;
    row["class"] = k;
    row["precision"] = number(c.precision);
    row["recall"] = number(c.recall);
    row["f1"] = number(c.f1);
    row["support"] = c.support;
    const auto& auc = k < r.per_class_auc.size() ? r.per_class_auc[k] : std::nullopt;
    row["auc"] = auc ? number(*auc) : json(nullptr);
    per.push_back(row);
  }
  j["per_class"] = per;
  j["confusion"] = r.confusion;
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

std::string confusion_csv(const MetricsReport& r) {
  std::string out;
  for (const auto& row : r.confusion) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += std::to_string(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string roc_points_csv(const Evaluation& ev, int classes) {
  std::string out = "class,fpr,tpr,threshold\n";
  char line[128];
  for (int k = 0; k < classes; ++k) {
    bool pos = false, neg = false;
    for (int y : ev.labels) (y == k ? pos : neg) = true;
    if (!pos || !neg) continue;  // curve undefined
    for (const auto& p : roc_curve(ev.scores, ev.labels, k)) {
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", k, p.fpr, p.tpr, p.threshold);
      out += line;
    }
  }
  return out;
}

std::string timing_json(double seconds, int epochs) {
  json j;
  j["seconds"] = seconds;
  j["epochs"] = epochs;
  j["seconds_per_epoch"] = epochs > 0 ? seconds / epochs : seconds;
  return j.dump(2) + "\n";
}

spectral::RadialEnergyProfile dataset_energy_profile(const data::Dataset& ds, const ExperimentConfig& cfg) {
  spectral::RadialEnergyProfile mean;
  int n = 0;
  for (const auto& li : ds.images) {
    const auto img = cfg.downsample > 1 ? spectral::downsample(li.image, cfg.downsample) : li.image;
    const auto spec = spectral::fftshift(spectral::fft2d(img), spectral::ShiftDirection::forward);
    const auto p = spectral::radial_energy_profile(spec, {.exclude_dc = true});
    if (n == 0) {
      mean = p;
    } else {
      if (p.radii != mean.radii) throw InvalidArgument("energy profile: images of different sizes in one dataset");
      for (std::size_t i = 0; i < p.cumulative_energy.size(); ++i) mean.cumulative_energy[i] += p.cumulative_energy[i];
    }
    ++n;
  }
  if (n == 0) throw InvalidArgument("energy profile: empty dataset");
  for (auto& v : mean.cumulative_energy) v /= n;
  mean.cumulative_energy.back() = 1.0;
  return mean;
}

void emit_outputs(const std::filesystem::path& dir, const ExperimentConfig& cfg, const TrainResult& run,
                  const spectral::RadialEnergyProfile& energy) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create " + dir.string() + ": " + ec.message());

  ExperimentConfig resolved = cfg;
  resolved.seeds = {run.seed};
  write_text(dir / "metrics.json", metrics_json(run.best.report, run.best_epoch, run.seed));
  write_text(dir / "confusion.csv", confusion_csv(run.best.report));
  write_text(dir / "roc_points.csv", roc_points_csv(run.best, run.best.report.classes));
  write_text(dir / "energy_profile.csv", spectral::profile_to_csv(energy));
  write_text(dir / "epoch_log.csv", epoch_log_csv(run.log));
  write_text(dir / "config_resolved.json", to_json(resolved));
  write_text(dir / "timing.json", timing_json(run.seconds, cfg.epochs));
  try {
    ad::save_checkpoint(dir / "model.ckpt", run.checkpoint);
  } catch (const std::exception& e) {
    throw OutputError((dir / "model.ckpt").string() + ": " + e.what());
  }
}

}  // namespace fftmil::harness
