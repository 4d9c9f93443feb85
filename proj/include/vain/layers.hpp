#pragma once

#include <cstdint>
#include <vector>

#include "vain/mat.hpp"
#include "vain/rng.hpp"

namespace vain {

// A view onto one parameter tensor and its gradient buffer. The optimizer and
// the gradient checker both walk models through flat lists of these.
struct ParamRef {
  double* value = nullptr;
  double* grad = nullptr;
  size_t n = 0;
};

struct LinearLayer {
  Mat weight;  // out x in
  std::vector<double> bias;
  Mat grad_weight;
  std::vector<double> grad_bias;

  LinearLayer() = default;
  LinearLayer(int in, int out);

  int in_dim() const { return weight.cols; }
  int out_dim() const { return weight.rows; }
  void init_uniform(Rng& rng);  // +-sqrt(1/fan_in)
  void zero_grad();
  void collect_params(std::vector<ParamRef>& out);
};

// y = x W^T + b, row per batch element.
Mat linear_forward(const Mat& x, const LinearLayer& layer);
// Accumulates grad_weight / grad_bias, returns grad wrt x.
Mat linear_backward(const Mat& x, LinearLayer& layer, const Mat& grad_out);

Mat relu(const Mat& x);
Mat relu_backward(const Mat& x, const Mat& grad_out);

struct BatchNormCache {
  Mat xhat;
  std::vector<double> inv_std;
  bool training = false;
};

struct BatchNormLayer {
  std::vector<double> gamma, beta;
  std::vector<double> running_mean, running_var;
  std::vector<double> grad_gamma, grad_beta;
  double momentum = 0.1;
  double eps = 1e-5;
  bool training = true;

  BatchNormLayer() = default;
  explicit BatchNormLayer(int dim);

  int dim() const { return static_cast<int>(gamma.size()); }
  void zero_grad();
  void collect_params(std::vector<ParamRef>& out);
};

// Train mode: normalize with batch statistics (biased variance) and update the
// running estimates (unbiased variance). Eval mode: use running statistics.
// Batch statistics are computed with exact column sums so they are invariant
// under row permutations. Throws on a train-mode batch of one row.
Mat batchnorm_forward(const Mat& x, BatchNormLayer& layer, BatchNormCache* cache);
Mat batchnorm_backward(const BatchNormCache& cache, BatchNormLayer& layer, const Mat& grad_out);

// Fully connected stack: Linear -> [BatchNorm] -> ReLU on hidden layers, plain
// Linear on the output.
struct MlpSpec {
  int in = 0;
  std::vector<int> hidden;
  int out = 0;
  bool batchnorm = false;
};

struct MlpCache {
  std::vector<Mat> lin_in;   // input to each linear
  std::vector<Mat> pre_act;  // post-linear (post-bn) pre-relu, hidden layers only
  std::vector<BatchNormCache> bn;
};

class Mlp {
 public:
  Mlp() = default;
  Mlp(const MlpSpec& spec, Rng& rng);

  Mat forward(const Mat& x, MlpCache* cache = nullptr);
  Mat backward(const MlpCache& cache, const Mat& grad_out);

  void set_training(bool training);
  void zero_grad();
  void collect_params(std::vector<ParamRef>& out);

  int in_dim() const { return spec_.in; }
  int out_dim() const { return spec_.out; }
  const MlpSpec& spec() const { return spec_; }
  size_t param_count() const;
  // Multiply-accumulate count for one input row; used to balance compute
  // budgets between architectures.
  size_t macs_per_row() const;

  std::vector<LinearLayer> linears;
  std::vector<BatchNormLayer> bns;

 private:
  MlpSpec spec_;
};

}  // namespace vain
