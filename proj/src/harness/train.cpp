#include "fftmil/harness/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "fftmil/autodiff/optim.hpp"
#include "fftmil/error.hpp"

namespace fftmil::harness {

std::size_t count_params(mil::MilModel<float>& model) { return model.params().count(); }

Evaluation evaluate_model(mil::MilModel<float>& model, const std::vector<PreparedSample>& samples, int crop,
                          int classes) {
  Evaluation ev;
  const bool complex_in = fft_block::uses_complex_input(model.config().block.design);
  const bool need_freq = model.config().branch != mil::Branch::spatial;
  for (const auto& s : samples) {
    const auto bag = model.config().branch == mil::Branch::frequency ? ad::Var<float>() : mil::bag_tensor<float>(s.bag);
    const auto in = need_freq ? block_input<float>(s, crop, complex_in) : fft_block::BlockInput<float>{};
    const auto out = model.forward(bag, in, false);
    const auto logits = out.logits.value();
    const double mx = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double z = 0;
    for (std::size_t k = 0; k < p.size(); ++k) z += (p[k] = std::exp(logits[k] - mx));
    for (auto& v : p) v /= z;
    ev.predictions.push_back(static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin()));
    ev.scores.push_back(std::move(p));
    ev.labels.push_back(s.label);
    ev.ids.push_back(s.id);
  }
  ev.report = evaluate_metrics(ev.predictions, ev.scores, ev.labels, classes);
  return ev;
}

double selection_value(const EpochRecord& r, Selection s) {
  return s == Selection::macro_f1 ? r.macro_f1 : r.weighted_f1;
}

TrainResult run_train(const ExperimentConfig& cfg, const PreparedData& data, std::uint64_t seed,
                      const std::function<void(const EpochRecord&)>& on_epoch) {
  validate(cfg);
  if (data.train.empty()) throw InvalidArgument("training split is empty");
  const auto t0 = std::chrono::steady_clock::now();
  mil::MilModel<float> model(model_config(cfg, data.image_channels, data.classes, seed));
  ad::Adam<float> opt(model.params(), ad::AdamConfig{cfg.lr});
  const bool complex_in = fft_block::uses_complex_input(cfg.design);
  const bool need_freq = cfg.branch != mil::Branch::spatial;
  const std::uint64_t hash = config_hash(cfg, data.image_channels, data.classes);
  const std::string design = need_freq ? fft_block::to_string(cfg.design) : "-";

  TrainResult res;
  res.seed = seed;
  res.param_count = count_params(model);

  auto record = [&](int epoch, double loss) {
    Evaluation ev = evaluate_model(model, data.test, data.crop, data.classes);
    EpochRecord r{epoch, loss, ev.report.accuracy, ev.report.macro_f1, ev.report.weighted_f1, ev.report.macro_auc};
    res.log.push_back(r);
    if (on_epoch) on_epoch(r);
    if (epoch == 0 || selection_value(r, cfg.selection) > selection_value(res.log[res.best_epoch], cfg.selection)) {
      res.best_epoch = epoch;
      res.best = std::move(ev);
      res.checkpoint = {hash, design, model.state()};
    }
  };

  record(0, std::nan(""));
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 3);
  std::vector<std::size_t> order(data.train.size());
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0;
    for (std::size_t step = 0; step < order.size(); ++step) {
      const auto& s = data.train[order[step]];
      model.params().zero_grad();
      const auto bag = cfg.branch == mil::Branch::frequency ? ad::Var<float>() : mil::bag_tensor<float>(s.bag);
      const auto in = need_freq ? block_input<float>(s, data.crop, complex_in) : fft_block::BlockInput<float>{};
      auto out = model.forward(bag, in, true);
      auto loss = ad::cross_entropy(out.logits, s.label);
      const double l = loss.value()[0];
      if (!std::isfinite(l))
        throw NumericalError("non-finite loss at epoch " + std::to_string(epoch) + ", step " + std::to_string(step) +
                             " (slide " + s.id + ")");
      ad::backward(loss);
      try {
        opt.step();
      } catch (const NumericalError& e) {
        throw NumericalError("epoch " + std::to_string(epoch) + ", step " + std::to_string(step) + ": " + e.what());
      }
      loss_sum += l;
    }
    record(epoch, loss_sum / static_cast<double>(order.size()));
  }
  res.best.report.param_count = res.param_count;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.best.report.seconds = res.seconds;
  return res;
}

std::string epoch_log_csv(const std::vector<EpochRecord>& log) {
  std::string out = "epoch,train_loss,accuracy,macro_f1,weighted_f1,macro_auc\n";
  char buf[256];
  for (const auto& r : log) {
    std::snprintf(buf, sizeof buf, "%d,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.epoch, r.train_loss, r.accuracy,
                  r.macro_f1, r.weighted_f1, r.macro_auc);
    out += buf;
  }
  return out;
}

}  // namespace fftmil::harness
