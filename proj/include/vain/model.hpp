#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vain/attention.hpp"
#include "vain/frame.hpp"
#include "vain/layers.hpp"

namespace vain {

enum class Arch { Vain, CommNet, InteractionNet, Fc, SMax, OneHopFc, Linear, Mlp };
enum class Head { Regression, PerAgentSoftmax };
enum class Agg { Sum, Mean };

std::string to_string(Arch a);
std::string to_string(Head h);
std::string to_string(Kernel k);
std::string to_string(Agg a);
Arch arch_from_string(const std::string& s);
Head head_from_string(const std::string& s);
Kernel kernel_from_string(const std::string& s);
Agg agg_from_string(const std::string& s);

struct ModelSpec {
  Arch arch = Arch::Vain;
  int feature_dim = 0;
  int n_slots = 0;  // used by Fc / OneHopFc classifier widths
  std::vector<int> es_hidden;
  int es_out = 32;
  std::vector<int> ec_hidden;
  int comm_dim = 32;
  int attn_dim = 10;
  std::vector<int> psi_hidden;
  std::vector<int> dec_hidden;
  int out_dim = 1;
  Head head = Head::Regression;
  Kernel kernel = Kernel::Softmax;
  Agg aggregation = Agg::Mean;
  bool batchnorm = false;
  // Index of the "absent" indicator inside a feature row. Fc flattens the
  // whole frame, so masked slots are filled with this one-hot instead of
  // zeros. Negative = plain zeros.
  int absent_flag_index = -1;
  uint64_t seed = 0;

  void validate() const;
};

struct ModelOutput {
  Mat per_agent;  // n_slots x out_dim, masked rows zero
  std::optional<std::vector<double>> probs;
  std::optional<Mat> attention;  // n_slots x n_slots, Vain only
};

struct ForwardCache {
  std::vector<int> act;
  int n_act = 0;
  Mat x;  // compact active features
  MlpCache es_cache, ec_cache, psi_cache, dec_cache;
  Mat es_out, ecomm, attn, pooled, concat, w;
  Mat pair_in;   // InteractionNet
  Mat flat_in;   // Fc
  Mat pooled_g;  // OneHopFc global mean
};

// Expected per-forward encoder evaluation counts for n active agents:
// comm-encoder applications and pairwise-net applications.
struct EvalCounts {
  int64_t comm = 0;
  int64_t pair = 0;
};
EvalCounts count_encoder_evals(const ModelSpec& spec, int n);

class Model {
 public:
  Model() = default;
  explicit Model(const ModelSpec& spec);

  ModelOutput forward(const AgentFrame& frame, ForwardCache* cache = nullptr);
  // grad_per_agent must match forward().per_agent in shape; masked rows are
  // ignored (Fc and OneHopFc read every slot).
  void backward(const ForwardCache& cache, const Mat& grad_per_agent);

  void set_training(bool training);
  void zero_grad();
  std::vector<ParamRef> params();

  const ModelSpec& spec() const { return spec_; }
  int64_t comm_evals() const { return comm_evals_; }
  int64_t pair_evals() const { return pair_evals_; }
  void reset_counters() { comm_evals_ = pair_evals_ = 0; }

  std::vector<double> save_flat() const;
  void load_flat(std::span<const double> values);
  size_t param_count() const;
  size_t macs_per_frame(int n_active) const;

  Mlp es, ec, psi, dec;

 private:
  ModelSpec spec_;
  bool has_es_ = false, has_ec_ = false, has_psi_ = false;
  int64_t comm_evals_ = 0;
  int64_t pair_evals_ = 0;
};

}  // namespace vain
