#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vain/dataset_io.hpp"
#include "vain/model.hpp"

namespace vain {

struct TrainConfig {
  int epochs = 30;
  int batch_size = 64;
  double lr = 1e-3;
  int lr_halving_period = 10;  // epochs per halving
  uint64_t seed = 0;
  bool higher_is_better = false;  // metric direction (accuracy vs error)
  bool verbose = false;
};

struct EpochStats {
  int epoch = 0;
  double lr = 0;
  double train_loss = 0;
  double test_loss = 0;
  double test_metric = 0;
};

struct TrainResult {
  std::vector<EpochStats> epochs;
  int best_epoch = -1;
  double best_metric = 0;
  double final_metric = 0;
  std::vector<double> best_params;
  int64_t comm_evals = 0;
  int64_t pair_evals = 0;
};

struct TrainDivergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double lr_at_epoch(double lr0, int epoch, int halving_period);

// Forward plus task loss; fills *grad_out (dL/d per_agent) when requested.
double example_loss(Model& model, const Example& ex, ForwardCache* cache, Mat* grad_out);

// Deterministic mini-batch ADAM with the halving schedule. Keeps the
// best-test-metric parameters in the result and restores them onto the model
// only via load_flat by the caller if desired; the model itself ends at the
// final epoch. Throws TrainDivergence on a non-finite loss. Asserts that the
// train and test example ids are disjoint.
TrainResult train_model(Model& model, const Dataset& train, const Dataset& test,
                        const TrainConfig& cfg);

double evaluate_classification(Model& model, const Dataset& data);
// RMS over all target components of active agents.
double evaluate_rms(Model& model, const Dataset& data);
// Per-horizon mean Euclidean error (meters) for 2*k-dim displacement targets.
std::vector<double> evaluate_horizons(Model& model, const Dataset& data);
double mean_of(const std::vector<double>& v);

// Closed-form bouncing-ball baselines (raw records, not scaled features).
enum class BallBaseline { Vel0, VelConst };
double balls_baseline_rms(const std::vector<balls::BallRecord>& records,
                          const balls::BallConfig& config, BallBaseline kind);

// Per-horizon means for precomputed soccer baseline predictions.
std::vector<double> soccer_prediction_horizons(const std::vector<soccer::SoccerExample>& examples,
                                               const std::vector<Mat>& preds);

}  // namespace vain
