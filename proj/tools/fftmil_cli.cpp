#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fftmil/autodiff/checkpoint.hpp"
#include "fftmil/data/dataset.hpp"
#include "fftmil/error.hpp"
#include "fftmil/harness/ablation.hpp"
#include "fftmil/harness/config.hpp"
#include "fftmil/harness/energy_study.hpp"
#include "fftmil/harness/outputs.hpp"
#include "fftmil/harness/pipeline.hpp"
#include "fftmil/harness/train.hpp"
#include "fftmil/spectral/energy.hpp"
#include "fftmil/spectral/tensor_io.hpp"
#include "fftmil/spectral/transforms.hpp"

namespace fs = std::filesystem;
using namespace fftmil;

namespace {

constexpr int kOk = 0;
constexpr int kRunFailure = 1;
constexpr int kConfigError = 2;

std::string dashed(std::string key) {
  for (auto& c : key)
    if (c == '_') c = '-';
  return key;
}

std::string read_file(const fs::path& p) {
  std::FILE* f = std::fopen(p.string().c_str(), "rb");
  if (!f) throw harness::ConfigError("cannot read " + p.string());
  std::string s;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) s.append(buf, n);
  std::fclose(f);
  return s;
}

// Experiment settings: an optional config file (key=value, or a
// config_resolved.json) and one flag per key on top.
struct ExperimentFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value file or config_resolved.json");
    for (const auto& [key, def] : harness::to_key_values(harness::ExperimentConfig{}))
      app->add_option("--" + dashed(key), values[key], key + " (default " + (def.empty() ? "\"\"" : def) + ")");
  }

  harness::ExperimentConfig resolve(const CLI::App* app) const {
    harness::ExperimentConfig cfg;
    if (!config_path.empty()) {
      if (fs::path(config_path).extension() == ".json")
        cfg = harness::config_from_json(read_file(config_path));
      else
        cfg = harness::load_config_file(config_path);
    }
    for (const auto& [key, v] : values)
      if (app->count("--" + dashed(key)) > 0) harness::set_option(cfg, key, v);
    harness::validate(cfg);
    return cfg;
  }
};

data::Dataset load_dataset_for(const harness::ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw harness::ConfigError("no dataset given (set dataset= or --dataset)");
  return data::load_dataset(cfg.dataset);
}

void print_report(const char* tag, const harness::MetricsReport& r) {
  std::printf("%s accuracy %.4f macro_f1 %.4f weighted_f1 %.4f macro_auc %.4f params %zu\n", tag, r.accuracy,
              r.macro_f1, r.weighted_f1, r.macro_auc, r.param_count);
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

// ------------------------------------------------------------------ generate

struct GenerateFlags {
  std::string config_path;
  std::string out;
  std::map<std::string, std::string> values;
  const std::vector<std::string> keys{"image_side", "channels",          "classes",        "per_class",
                                      "alpha",      "shape_kind",        "signal",         "grating_amplitude",
                                      "motif_strength", "seed"};

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "key=value file with generator settings");
    app->add_option("--out", out, "dataset directory")->required();
    for (const auto& k : keys) app->add_option("--" + dashed(k), values[k], k);
  }
};

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw harness::ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw harness::ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

void set_synthetic(data::SyntheticConfig& c, const std::string& k, const std::string& v) {
  try {
    if (k == "image_side") c.image_side = to_int(k, v);
    else if (k == "channels") c.channels = to_int(k, v);
    else if (k == "classes") c.classes = to_int(k, v);
    else if (k == "per_class") c.per_class = to_int(k, v);
    else if (k == "alpha") c.alpha = to_double(k, v);
    else if (k == "shape_kind") c.shape_kind = data::parse_shape_kind(v);
    else if (k == "signal") c.signal = data::parse_signal(v);
    else if (k == "grating_amplitude") c.grating_amplitude = to_double(k, v);
    else if (k == "motif_strength") c.motif_strength = to_double(k, v);
    else if (k == "seed") c.seed = static_cast<std::uint64_t>(to_int(k, v));
    else throw harness::ConfigError("unknown generator key '" + k + "'");
  } catch (const InvalidArgument& e) {
    throw harness::ConfigError(e.what());
  }
}

int cmd_generate(const GenerateFlags& f, const CLI::App* app) {
  data::SyntheticConfig sc;
  if (!f.config_path.empty())
    for (const auto& [k, v] : harness::parse_key_values(read_file(f.config_path))) set_synthetic(sc, k, v);
  for (const auto& [k, v] : f.values)
    if (app->count("--" + dashed(k)) > 0) set_synthetic(sc, k, v);
  try {
    data::validate(sc);
  } catch (const InvalidArgument& e) {
    throw harness::ConfigError(e.what());
  }
  const auto ds = data::make_dataset(sc);
  data::persist_dataset(ds, f.out);
  std::printf("wrote %zu images (%zu train, %zu test) to %s\n", ds.images.size(), ds.split.train.size(),
              ds.split.test.size(), f.out.c_str());
  return kOk;
}

// ---------------------------------------------------------------- preprocess

int cmd_preprocess(const harness::ExperimentConfig& cfg) {
  const auto ds = load_dataset_for(cfg);
  const fs::path out = fs::path(cfg.out_dir);
  fs::create_directories(out / "crops");
  for (const auto& li : ds.images) spectral::save_crop(out / "crops" / (li.id + ".fmt"), harness::frequency_input(li.image, cfg));
  harness::write_text(out / "energy_profile.csv", spectral::profile_to_csv(harness::dataset_energy_profile(ds, cfg)));
  harness::ExperimentConfig resolved = cfg;
  harness::write_text(out / "config_resolved.json", harness::to_json(resolved));
  std::printf("wrote %zu crops to %s\n", ds.images.size(), (out / "crops").string().c_str());
  return kOk;
}

// --------------------------------------------------------------------- train

int cmd_train(const harness::ExperimentConfig& cfg) {
  const auto ds = load_dataset_for(cfg);
  const auto data = harness::prepare_data(ds, cfg);
  const auto energy = harness::dataset_energy_profile(ds, cfg);
  const fs::path out(cfg.out_dir);
  std::string summary = "seed,best_epoch,accuracy,macro_f1,weighted_f1,macro_auc,param_count\n";
  double acc = 0, mf1 = 0, wf1 = 0, auc = 0;
  for (auto seed : cfg.seeds) {
    auto res = harness::run_train(cfg, data, seed, [&](const harness::EpochRecord& e) {
      std::printf("seed %llu epoch %d loss %.5f accuracy %.4f macro_f1 %.4f\n", static_cast<unsigned long long>(seed),
                  e.epoch, e.train_loss, e.accuracy, e.macro_f1);
      std::fflush(stdout);
    });
    harness::emit_outputs(out / ("seed_" + std::to_string(seed)), cfg, res, energy);
    const auto& r = res.best.report;
    print_report(("seed " + std::to_string(seed) + " best epoch " + std::to_string(res.best_epoch)).c_str(), r);
    char line[256];
    std::snprintf(line, sizeof line, "%llu,%d,%.10g,%.10g,%.10g,%.10g,%zu\n", static_cast<unsigned long long>(seed),
                  res.best_epoch, r.accuracy, r.macro_f1, r.weighted_f1, r.macro_auc, r.param_count);
    summary += line;
    acc += r.accuracy;
    mf1 += r.macro_f1;
    wf1 += r.weighted_f1;
    auc += r.macro_auc;
  }
  const double n = static_cast<double>(cfg.seeds.size());
  char line[256];
  std::snprintf(line, sizeof line, "mean,,%.10g,%.10g,%.10g,%.10g,\n", acc / n, mf1 / n, wf1 / n, auc / n);
  summary += line;
  harness::write_text(out / "summary.csv", summary);
  std::printf("mean over %zu seed(s): accuracy %.4f macro_f1 %.4f\n", cfg.seeds.size(), acc / n, mf1 / n);
  return kOk;
}

// ------------------------------------------------------------------ evaluate

int cmd_evaluate(const harness::ExperimentConfig& cfg, const std::string& checkpoint) {
  const auto ds = load_dataset_for(cfg);
  const auto data = harness::prepare_data(ds, cfg);
  const std::uint64_t seed = cfg.seeds.front();
  mil::MilModel<float> model(harness::model_config(cfg, data.image_channels, data.classes, seed));
  const auto ck = ad::load_checkpoint(checkpoint, harness::config_hash(cfg, data.image_channels, data.classes));
  model.load_state(ck.records);
  auto ev = harness::evaluate_model(model, data.test, data.crop, data.classes);
  ev.report.param_count = harness::count_params(model);
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  harness::write_text(out / "metrics.json", harness::metrics_json(ev.report, -1, seed));
  harness::write_text(out / "confusion.csv", harness::confusion_csv(ev.report));
  harness::write_text(out / "roc_points.csv", harness::roc_points_csv(ev, data.classes));
  print_report("test", ev.report);
  return kOk;
}

// -------------------------------------------------------------------- ablate

int cmd_ablate(const harness::ExperimentConfig& cfg, const std::string& axis_name) {
  const auto axis = harness::parse_axis(axis_name);
  const auto ds = load_dataset_for(cfg);
  const fs::path out = fs::path(cfg.out_dir) / axis_name;
  const auto energy = harness::dataset_energy_profile(ds, cfg);
  const auto res = harness::run_ablation(
      cfg, axis, ds,
      [&](const harness::AblationRun& run, const harness::ExperimentConfig& one, const harness::TrainResult* tr) {
        if (tr) {
          harness::emit_outputs(out / run.value / ("seed_" + std::to_string(run.seed)), one, *tr, energy);
          std::printf("%s=%s seed %llu macro_f1 %.4f accuracy %.4f\n", axis_name.c_str(), run.value.c_str(),
                      static_cast<unsigned long long>(run.seed), run.report.macro_f1, run.report.accuracy);
        } else {
          std::fprintf(stderr, "%s=%s seed %llu failed: %s\n", axis_name.c_str(), run.value.c_str(),
                       static_cast<unsigned long long>(run.seed), run.error.c_str());
        }
        std::fflush(stdout);
      });
  fs::create_directories(out);
  harness::write_text(out / "runs.csv", harness::ablation_runs_csv(res));
  const auto summary = harness::ablation_summary_csv(res);
  harness::write_text(out / "summary.csv", summary);
  std::fputs(summary.c_str(), stdout);
  return res.any_failed() ? kRunFailure : kOk;
}

// -------------------------------------------------------------------- energy

int cmd_energy(const std::string& dataset, const std::string& out_dir, harness::EnergyScalingConfig ec) {
  const fs::path out(out_dir);
  fs::create_directories(out);
  if (!dataset.empty()) {
    harness::ExperimentConfig cfg;
    const auto ds = data::load_dataset(dataset);
    const auto prof = harness::dataset_energy_profile(ds, cfg);
    harness::write_text(out / "energy_profile.csv", spectral::profile_to_csv(prof));
    std::printf("mean r_%.2g over %zu images: %d\n", ec.fraction, ds.images.size(),
                spectral::energy_radius(prof, ec.fraction));
    return kOk;
  }
  const auto r = harness::energy_scaling(ec);
  harness::write_text(out / "energy_scaling.csv", harness::energy_scaling_csv(r));
  for (std::size_t s = 0; s < r.slope.size(); ++s) {
    std::printf("seed %zu radii", s);
    for (int v : r.radius[s]) std::printf(" %d", v);
    std::printf(" slope %.4f\n", r.slope[s]);
  }
  std::printf("mean log-log slope %.4f\n", r.mean_slope);
  return kOk;
}

// --------------------------------------------------------------- reconstruct

int cmd_reconstruct(const std::string& image, const std::vector<int>& crops, const std::string& out_dir) {
  const auto img = spectral::load_image(image);
  const auto spec = spectral::fftshift(spectral::fft2d(img), spectral::ShiftDirection::forward);
  const fs::path out(out_dir);
  fs::create_directories(out);
  std::string csv = "crop,mse\n";
  for (int c : crops) {
    if (c <= 0 || c % 2) throw harness::ConfigError("crop sizes must be positive and even, got " + std::to_string(c));
    const auto rec = spectral::reconstruct_lowpass(spectral::center_crop_pad(spec, c), img.dims());
    double mse = 0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      const double d = rec.data()[i] - img.data()[i];
      mse += d * d;
    }
    mse /= static_cast<double>(img.size());
    spectral::save_image(out / ("recon_" + std::to_string(c) + ".fmt"), rec);
    char line[64];
    std::snprintf(line, sizeof line, "%d,%.10g\n", c, mse);
    csv += line;
    std::printf("crop %d mse %.6g\n", c, mse);
  }
  harness::write_text(out / "reconstruct.csv", csv);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequency-augmented multiple-instance learning on synthetic slides"};
  app.require_subcommand(1);

  GenerateFlags gen;
  auto* generate = app.add_subcommand("generate", "write a synthetic dead-leaves dataset");
  gen.attach(generate);

  ExperimentFlags pre_f, train_f, eval_f, abl_f;
  auto* preprocess = app.add_subcommand("preprocess", "write the frequency crops of a dataset");
  pre_f.attach(preprocess);
  auto* train = app.add_subcommand("train", "train one model per seed and write reports");
  train_f.attach(train);
  auto* evaluate = app.add_subcommand("evaluate", "score a saved checkpoint on the test split");
  eval_f.attach(evaluate);
  std::string checkpoint;
  evaluate->add_option("--checkpoint", checkpoint, "model.ckpt written by train")->required();
  auto* ablate = app.add_subcommand("ablate", "sweep one axis over all seeds");
  abl_f.attach(ablate);
  std::string axis;
  ablate->add_option("--axis", axis, "spectra|region|crop|downsample|normalization|design|fusion|transform")
      ->required();

  auto* energy = app.add_subcommand("energy", "radial energy profile of a dataset, or the scaling study");
  std::string energy_dataset, energy_out = "out/energy";
  harness::EnergyScalingConfig ec;
  energy->add_option("--dataset", energy_dataset, "dataset directory (omit for the scaling study)");
  energy->add_option("--out", energy_out, "output directory");
  energy->add_option("--sides", ec.sides, "image sides for the scaling study")->delimiter(',');
  energy->add_option("--seeds", ec.seeds, "images per side");
  energy->add_option("--alpha", ec.alpha, "power-law exponent of the leaf radii");
  energy->add_option("--fraction", ec.fraction, "energy fraction for the radius")->check(CLI::Range(1e-9, 1.0));

  auto* reconstruct = app.add_subcommand("reconstruct", "low-pass reconstructions of one image");
  std::string recon_image, recon_out = "out/reconstruct";
  std::vector<int> recon_crops{8, 16, 32, 64};
  reconstruct->add_option("--image", recon_image, "image file (.fmt)")->required();
  reconstruct->add_option("--crops", recon_crops, "crop sizes")->delimiter(',');
  reconstruct->add_option("--out", recon_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, generate);
    if (preprocess->parsed()) return cmd_preprocess(pre_f.resolve(preprocess));
    if (train->parsed()) return cmd_train(train_f.resolve(train));
    if (evaluate->parsed()) return cmd_evaluate(eval_f.resolve(evaluate), checkpoint);
    if (ablate->parsed()) return cmd_ablate(abl_f.resolve(ablate), axis);
    if (energy->parsed()) return cmd_energy(energy_dataset, energy_out, ec);
    if (reconstruct->parsed()) return cmd_reconstruct(recon_image, recon_crops, recon_out);
  } catch (const harness::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRunFailure;
  }
  return kRunFailure;
}
