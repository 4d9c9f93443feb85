#include "vain/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "vain/adam.hpp"
#include "vain/losses.hpp"
#include "vain/rng.hpp"

namespace vain {

double lr_at_epoch(double lr0, int epoch, int halving_period) {
  return lr0 * std::pow(2.0, -static_cast<double>(epoch / halving_period));
}

double example_loss(Model& model, const Example& ex, ForwardCache* cache, Mat* grad_out) {
  ModelOutput out = model.forward(ex.frame, cache);
  if (model.spec().head == Head::Regression) {
    LossGrad lg = mse_loss_masked(out.per_agent, ex.targets, ex.frame.mask);
    if (grad_out) *grad_out = std::move(lg.grad);
    return lg.loss;
  }
  const int n = ex.frame.n_slots();
  std::vector<double> logits(n);
  for (int s = 0; s < n; ++s) logits[s] = out.per_agent(s, 0);
  const bool index_head = model.spec().arch == Arch::Fc || model.spec().arch == Arch::OneHopFc;
  CeGrad ce = cross_entropy_loss(logits, ex.label, index_head ? nullptr : &ex.frame.mask);
  if (grad_out) {
    *grad_out = Mat(n, 1);
    for (int s = 0; s < n; ++s) (*grad_out)(s, 0) = ce.grad[s];
  }
  return ce.loss;
}

namespace {

double evaluate_loss(Model& model, const Dataset& data) {
  if (data.ex.empty()) return 0.0;
  double total = 0.0;
  for (const Example& ex : data.ex) total += example_loss(model, ex, nullptr, nullptr);
  return total / static_cast<double>(data.ex.size());
}

double task_metric(Model& model, const Dataset& data) {
  if (data.ex.empty()) return 0.0;
  if (model.spec().head == Head::PerAgentSoftmax) return evaluate_classification(model, data);
  if (data.kind == TaskKind::Soccer) return mean_of(evaluate_horizons(model, data));
  return evaluate_rms(model, data);
}

void check_leakage(const Dataset& train, const Dataset& test) {
  std::unordered_set<std::string> ids;
  ids.reserve(train.ex.size());
  for (const Example& e : train.ex) ids.insert(e.id);
  for (const Example& e : test.ex) {
    if (ids.count(e.id)) {
      throw std::invalid_argument("train/test leakage: shared example id " + e.id);
    }
  }
}

}  // namespace

TrainResult train_model(Model& model, const Dataset& train, const Dataset& test,
                        const TrainConfig& cfg) {
  if (train.ex.empty()) throw std::invalid_argument("train_model: empty training set");
  check_leakage(train, test);

  TrainResult result;
  AdamState adam;
  adam.init(model.param_count());
  adam.alpha = cfg.lr;
  const std::vector<ParamRef> params = model.params();
  Rng shuffle_rng(cfg.seed);

  auto eval_epoch = [&](int epoch, double lr, double train_loss) {
    model.set_training(false);
    EpochStats st;
    st.epoch = epoch;
    st.lr = lr;
    st.train_loss = train_loss;
    st.test_loss = evaluate_loss(model, test);
    st.test_metric = task_metric(model, test);
    result.epochs.push_back(st);
    const bool better = result.best_epoch < 0 ||
                        (cfg.higher_is_better ? st.test_metric > result.best_metric
                                              : st.test_metric < result.best_metric);
    if (better) {
      result.best_epoch = epoch;
      result.best_metric = st.test_metric;
      result.best_params = model.save_flat();
    }
    result.final_metric = st.test_metric;
  };

  if (cfg.epochs == 0) {
    eval_epoch(0, cfg.lr, evaluate_loss(model, train));
    return result;
  }

  std::vector<size_t> order(train.ex.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = lr_at_epoch(cfg.lr, epoch, cfg.lr_halving_period);
    adam.alpha = lr;
    shuffle_inplace(order, shuffle_rng);
    model.set_training(true);
    double epoch_loss = 0.0;
    size_t pos = 0;
    while (pos < order.size()) {
      const size_t batch = std::min<size_t>(cfg.batch_size, order.size() - pos);
      model.zero_grad();
      double batch_loss = 0.0;
      for (size_t k = 0; k < batch; ++k) {
        const Example& ex = train.ex[order[pos + k]];
        ForwardCache cache;
        Mat grad;
        batch_loss += example_loss(model, ex, &cache, &grad);
        const double scale = 1.0 / static_cast<double>(batch);
        for (double& g : grad.data) g *= scale;
        model.backward(cache, grad);
      }
      batch_loss /= static_cast<double>(batch);
      if (!std::isfinite(batch_loss)) {
        throw TrainDivergence("non-finite loss at epoch " + std::to_string(epoch));
      }
      adam_step(params, adam);
      epoch_loss += batch_loss * static_cast<double>(batch);
      pos += batch;
    }
    epoch_loss /= static_cast<double>(order.size());
    eval_epoch(epoch, lr, epoch_loss);
    if (cfg.verbose) {
      const EpochStats& st = result.epochs.back();
      std::fprintf(stderr, "epoch %3d lr %.2e train %.6f test %.6f metric %.6f\n", epoch, lr,
                   st.train_loss, st.test_loss, st.test_metric);
    }
    model.set_training(true);
  }
  model.set_training(false);
  result.comm_evals = model.comm_evals();
  result.pair_evals = model.pair_evals();
  return result;
}

double evaluate_classification(Model& model, const Dataset& data) {
  if (data.ex.empty()) return 0.0;
  model.set_training(false);
  int correct = 0;
  for (const Example& ex : data.ex) {
    ModelOutput out = model.forward(ex.frame, nullptr);
    const std::vector<double>& probs = *out.probs;
    int arg = 0;
    for (size_t i = 1; i < probs.size(); ++i) {
      if (probs[i] > probs[arg]) arg = static_cast<int>(i);  // ties: lowest index
    }
    if (arg == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.ex.size());
}

double evaluate_rms(Model& model, const Dataset& data) {
  model.set_training(false);
  double acc = 0.0;
  int64_t count = 0;
  for (const Example& ex : data.ex) {
    ModelOutput out = model.forward(ex.frame, nullptr);
    for (int r = 0; r < ex.targets.rows; ++r) {
      if (!ex.frame.mask[r]) continue;
      for (int c = 0; c < ex.targets.cols; ++c) {
        const double d = out.per_agent(r, c) - ex.targets(r, c);
        acc += d * d;
        ++count;
      }
    }
  }
  return count ? std::sqrt(acc / static_cast<double>(count)) : 0.0;
}

std::vector<double> evaluate_horizons(Model& model, const Dataset& data) {
  model.set_training(false);
  const int horizons = data.out_dim / 2;
  std::vector<double> sums(horizons, 0.0);
  int64_t count = 0;
  for (const Example& ex : data.ex) {
    ModelOutput out = model.forward(ex.frame, nullptr);
    for (int r = 0; r < ex.targets.rows; ++r) {
      if (!ex.frame.mask[r]) continue;
      ++count;
      for (int h = 0; h < horizons; ++h) {
        const double dx = out.per_agent(r, 2 * h) - ex.targets(r, 2 * h);
        const double dy = out.per_agent(r, 2 * h + 1) - ex.targets(r, 2 * h + 1);
        sums[h] += std::hypot(dx, dy);
      }
    }
  }
  if (count) {
    for (double& s : sums) s /= static_cast<double>(count);
  }
  return sums;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

double balls_baseline_rms(const std::vector<balls::BallRecord>& records,
                          const balls::BallConfig& config, BallBaseline kind) {
  double acc = 0.0;
  int64_t count = 0;
  for (const auto& rec : records) {
    for (const auto& b : rec.balls) {
      double pred[4] = {0, 0, 0, 0};
      if (kind == BallBaseline::VelConst) {
        pred[0] = b.vx * config.dt;
        pred[1] = b.vy * config.dt;
      }
      const double t[4] = {b.dx, b.dy, b.dvx, b.dvy};
      for (int c = 0; c < 4; ++c) {
        const double d = pred[c] - t[c];
        acc += d * d;
        ++count;
      }
    }
  }
  return count ? std::sqrt(acc / static_cast<double>(count)) : 0.0;
}

std::vector<double> soccer_prediction_horizons(const std::vector<soccer::SoccerExample>& examples,
                                               const std::vector<Mat>& preds) {
  std::vector<double> sums(soccer::kHorizons, 0.0);
  int64_t count = 0;
  for (size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const Mat& pred = preds[i];
    for (int p = 0; p < ex.features.rows; ++p) {
      ++count;
      for (int h = 0; h < soccer::kHorizons; ++h) {
        const double dx = pred(p, 2 * h) - ex.targets(p, 2 * h);
        const double dy = pred(p, 2 * h + 1) - ex.targets(p, 2 * h + 1);
        sums[h] += std::hypot(dx, dy);
      }
    }
  }
  if (count) {
    for (double& s : sums) s /= static_cast<double>(count);
  }
  return sums;
}

}  // namespace vain
