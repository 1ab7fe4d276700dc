#include "fftmil/harness/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "fftmil/harness/pipeline.hpp"

namespace fftmil::harness {

Axis parse_axis(std::string_view s) {
  for (Axis a : {Axis::spectra, Axis::region, Axis::crop, Axis::downsample, Axis::normalization, Axis::design,
                 Axis::fusion, Axis::transform})
    if (s == to_string(a)) return a;
  throw ConfigError("unknown ablation axis '" + std::string(s) +
                    "' (expected spectra, region, crop, downsample, normalization, design, fusion, transform)");
}

const char* to_string(Axis a) {
  switch (a) {
    case Axis::spectra: return "spectra";
    case Axis::region: return "region";
    case Axis::crop: return "crop";
    case Axis::downsample: return "downsample";
    case Axis::normalization: return "normalization";
    case Axis::design: return "design";
    case Axis::fusion: return "fusion";
    case Axis::transform: return "transform";
  }
  return "?";
}

std::vector<std::string> axis_values(Axis axis, const ExperimentConfig& base) {
  std::vector<std::string> v;
  switch (axis) {
    case Axis::spectra: return {"magnitude", "phase", "both"};
    case Axis::region: return {"low", "high", "both"};
    case Axis::crop:
      for (int c : base.crop_values) v.push_back(std::to_string(c));
      return v;
    case Axis::downsample:
      for (int d : base.downsample_values) v.push_back(std::to_string(d));
      return v;
    case Axis::normalization: return {"minmax", "zscore", "l2", "none"};
    case Axis::design:
      for (auto d : fft_block::all_designs()) v.push_back(fft_block::to_string(d));
      return v;
    case Axis::fusion:
      for (auto f : mil::all_fusions()) v.push_back(mil::to_string(f));
      return v;
    case Axis::transform: return {"fft", "rfft", "dct", "dct_abs", "dwt"};
  }
  return v;
}

std::string axis_baseline(Axis axis, const ExperimentConfig& base) {
  if (axis == Axis::normalization) return "none";
  std::string own;
  for (const auto& [k, val] : to_key_values(base)) {
    const bool hit = (axis == Axis::spectra && k == "spectra") || (axis == Axis::region && k == "region") ||
                     (axis == Axis::crop && k == "crop_size") || (axis == Axis::downsample && k == "downsample") ||
                     (axis == Axis::design && k == "fft_design") || (axis == Axis::fusion && k == "fusion") ||
                     (axis == Axis::transform && k == "transform");
    if (hit) own = val;
  }
  const auto values = axis_values(axis, base);
  if (std::find(values.begin(), values.end(), own) != values.end()) return own;
  return values.empty() ? own : values.front();
}

ExperimentConfig apply_axis_value(const ExperimentConfig& base, Axis axis, const std::string& value) {
  ExperimentConfig c = base;
  switch (axis) {
    case Axis::crop: set_option(c, "crop_size", value); break;
    case Axis::design: set_option(c, "fft_design", value); break;
    default: set_option(c, to_string(axis), value); break;
  }
  validate(c);
  return c;
}

bool AblationResult::any_failed() const {
  return std::any_of(runs.begin(), runs.end(), [](const AblationRun& r) { return !r.ok; });
}

AblationResult run_ablation(const ExperimentConfig& base, Axis axis, const data::Dataset& ds,
                            const AblationCallback& on_run) {
  AblationResult res;
  res.axis = axis;
  res.baseline = axis_baseline(axis, base);
  const auto values = axis_values(axis, base);
  const bool need_bags = base.branch != mil::Branch::frequency;
  const auto bags = need_bags ? encode_bags(ds, base) : std::vector<mil::PatchBag>{};

  for (const auto& value : values) {
    ExperimentConfig cfg;
    PreparedData data;
    std::string setup_error;
    try {
      cfg = apply_axis_value(base, axis, value);
      data = prepare_data(ds, cfg, bags);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (auto seed : base.seeds) {
      AblationRun run;
      run.value = value;
      run.seed = seed;
      if (!setup_error.empty()) {
        run.error = setup_error;
        res.runs.push_back(run);
        if (on_run) on_run(run, cfg, nullptr);
        continue;
      }
      try {
        ExperimentConfig one = cfg;
        one.seeds = {seed};
        TrainResult tr = run_train(one, data, seed);
        run.ok = true;
        run.report = tr.best.report;
        run.best_epoch = tr.best_epoch;
        run.param_count = tr.param_count;
        run.seconds = tr.seconds;
        res.runs.push_back(run);
        if (on_run) on_run(run, one, &tr);
      } catch (const std::exception& e) {
        run.error = e.what();
        res.runs.push_back(run);
        if (on_run) on_run(run, cfg, nullptr);
      }
    }
  }
  res.rows = aggregate_runs(res.runs, values, res.baseline);
  return res;
}

std::vector<AblationRow> aggregate_runs(const std::vector<AblationRun>& runs, const std::vector<std::string>& values,
                                        const std::string& baseline) {
  auto order = [&](const std::string& v) {
    return std::find(values.begin(), values.end(), v) - values.begin();
  };
  std::vector<const AblationRun*> sorted;
  for (const auto& r : runs) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(), [&](const AblationRun* a, const AblationRun* b) {
    const auto oa = order(a->value), ob = order(b->value);
    return oa != ob ? oa < ob : a->seed < b->seed;
  });

  std::vector<AblationRow> rows;
  for (const auto& v : values) {
    AblationRow row;
    row.value = v;
    int ok = 0;
    for (const auto* r : sorted) {
      if (r->value != v) continue;
      ++row.runs;
      if (!r->ok) {
        ++row.failures;
        continue;
      }
      ++ok;
      row.accuracy += r->report.accuracy;
      row.macro_f1 += r->report.macro_f1;
      row.weighted_f1 += r->report.weighted_f1;
      row.macro_auc += r->report.macro_auc;
      row.param_count = r->param_count;
    }
    const double nan = std::nan("");
    for (double* m : {&row.accuracy, &row.macro_f1, &row.weighted_f1, &row.macro_auc}) *m = ok ? *m / ok : nan;
    rows.push_back(row);
  }

  const AblationRow* base = nullptr;
  for (const auto& r : rows)
    if (r.value == baseline) base = &r;
  auto delta = [](double v, double b) { return (std::isfinite(v) && std::isfinite(b) && b != 0) ? 100.0 * (v - b) / b : std::nan(""); };
  for (auto& r : rows) {
    const double nan = std::nan("");
    r.d_accuracy = base ? delta(r.accuracy, base->accuracy) : nan;
    r.d_macro_f1 = base ? delta(r.macro_f1, base->macro_f1) : nan;
    r.d_weighted_f1 = base ? delta(r.weighted_f1, base->weighted_f1) : nan;
    r.d_macro_auc = base ? delta(r.macro_auc, base->macro_auc) : nan;
  }
  return rows;
}

namespace {

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  char b[40];
  std::snprintf(b, sizeof b, "%.10g", v);
  return b;
}

std::string pct(double v) {
  if (!std::isfinite(v)) return "nan";
  char b[40];
  std::snprintf(b, sizeof b, "%+.2f", v);
  return b;
}

}  // namespace

std::string ablation_runs_csv(const AblationResult& r) {
  std::string out = std::string(to_string(r.axis)) +
                    ",seed,status,accuracy,macro_f1,weighted_f1,macro_auc,best_epoch,param_count,error\n";
  for (const auto& run : r.runs) {
    out += csv_field(run.value) + ',' + std::to_string(run.seed) + ',' + (run.ok ? "ok" : "failed") + ',';
    if (run.ok) {
      out += num(run.report.accuracy) + ',' + num(run.report.macro_f1) + ',' + num(run.report.weighted_f1) + ',' +
             num(run.report.macro_auc) + ',' + std::to_string(run.best_epoch) + ',' + std::to_string(run.param_count) +
             ",\n";
    } else {
      out += ",,,,,," + csv_field(run.error) + '\n';
    }
  }
  return out;
}

std::string ablation_summary_csv(const AblationResult& r) {
  std::string out = std::string(to_string(r.axis)) +
                    ",runs,failures,accuracy,macro_f1,weighted_f1,macro_auc,param_count,"
                    "d_accuracy_pct,d_macro_f1_pct,d_weighted_f1_pct,d_macro_auc_pct,baseline\n";
  for (const auto& row : r.rows) {
    out += csv_field(row.value) + ',' + std::to_string(row.runs) + ',' + std::to_string(row.failures) + ',' +
           num(row.accuracy) + ',' + num(row.macro_f1) + ',' + num(row.weighted_f1) + ',' + num(row.macro_auc) + ',' +
           std::to_string(row.param_count) + ',' + pct(row.d_accuracy) + ',' + pct(row.d_macro_f1) + ',' +
           pct(row.d_weighted_f1) + ',' + pct(row.d_macro_auc) + ',' + (row.value == r.baseline ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace fftmil::harness
