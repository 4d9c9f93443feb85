#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "vain/attention.hpp"
#include "vain/checkpoint.hpp"
#include "vain/gradcheck.hpp"
#include "vain/losses.hpp"
#include "vain/model.hpp"
#include "vain/rng.hpp"
#include "vain/trainer.hpp"

using namespace vain;

namespace {

Mat random_mat(int r, int c, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (double& v : m.data) v = next_uniform(rng, lo, hi);
  return m;
}

AgentFrame random_frame(int n, int f, Rng& rng) {
  return AgentFrame::dense(random_mat(n, f, rng));
}

ModelSpec tiny_spec(Arch arch, Head head = Head::Regression, bool batchnorm = false) {
  ModelSpec s;
  s.arch = arch;
  s.feature_dim = 6;
  s.n_slots = 5;
  s.es_hidden = {12};
  s.es_out = 8;
  s.ec_hidden = {12};
  s.comm_dim = 8;
  s.attn_dim = 4;
  s.psi_hidden = {10};
  s.dec_hidden = {12};
  s.out_dim = head == Head::PerAgentSoftmax ? 1 : 3;
  s.head = head;
  s.batchnorm = batchnorm;
  s.seed = 99;
  return s;
}

// Direct elementwise evaluation of the kernel definitions, kept independent
// of attention_pool.
Mat brute_force_weights(const Mat& attn, Kernel kernel) {
  const int n = attn.rows;
  Mat w(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(n);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      double d2 = 0.0;
      for (int k = 0; k < attn.cols; ++k) {
        const double d = attn(i, k) - attn(j, k);
        d2 += d * d;
      }
      e[j] = std::exp(-d2);
      total += e[j];
    }
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      w(i, j) = kernel == Kernel::Softmax ? e[j] / total : e[j];
    }
  }
  return w;
}

double frame_loss(Model& model, const AgentFrame& frame, const Mat& targets, int label,
                  ForwardCache* cache, Mat* grad) {
  Example ex;
  ex.frame = frame;
  ex.targets = targets;
  ex.label = label;
  return example_loss(model, ex, cache, grad);
}

}  // namespace

TEST_CASE("attention_pool symmetric two-agent case") {
  // a_1 = a_2: softmax over {self, other} gives 1/2 each, self zeroed.
  Mat ecomm(2, 3);
  ecomm(0, 0) = 1;
  ecomm(0, 1) = 2;
  ecomm(0, 2) = 3;
  ecomm(1, 0) = -1;
  ecomm(1, 1) = 0.5;
  ecomm(1, 2) = 4;
  Mat attn(2, 2);
  attn(0, 0) = attn(1, 0) = 0.7;
  attn(0, 1) = attn(1, 1) = -0.2;
  std::vector<uint8_t> mask = {1, 1};
  PoolResult r = attention_pool(ecomm, attn, mask, Kernel::Softmax);
  CHECK(r.w(0, 1) == 0.5);
  CHECK(r.w(1, 0) == 0.5);
  CHECK(r.w(0, 0) == 0.0);
  CHECK(r.w(1, 1) == 0.0);
  for (int k = 0; k < 3; ++k) {
    CHECK(r.pooled(0, k) == doctest::Approx(0.5 * ecomm(1, k)).epsilon(1e-15));
    CHECK(r.pooled(1, k) == doctest::Approx(0.5 * ecomm(0, k)).epsilon(1e-15));
  }
}

TEST_CASE("attention_pool with equal vectors gives 1/n (softmax) or 1 (unnormalized)") {
  Rng rng(7);
  const int n = 6;
  Mat ecomm = random_mat(n, 4, rng);
  Mat attn(n, 3);
  for (int i = 0; i < n; ++i) {
    attn(i, 0) = 0.3;
    attn(i, 1) = -1.1;
    attn(i, 2) = 0.0;
  }
  std::vector<uint8_t> mask(n, 1);
  PoolResult soft = attention_pool(ecomm, attn, mask, Kernel::Softmax);
  PoolResult unnorm = attention_pool(ecomm, attn, mask, Kernel::Unnormalized);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        CHECK(soft.w(i, j) == 0.0);
        CHECK(unnorm.w(i, j) == 0.0);
      } else {
        CHECK(soft.w(i, j) == 1.0 / n);  // exact: n equal exp(0) terms
        CHECK(unnorm.w(i, j) == 1.0);
      }
    }
  }
}

TEST_CASE("attention_pool single agent pools to zero") {
  Mat ecomm(3, 4);
  Mat attn(3, 2);
  ecomm.fill(2.0);
  attn.fill(1.0);
  std::vector<uint8_t> mask = {0, 1, 0};
  for (int r = 0; r < 3; ++r) {
    if (!mask[r]) {
      for (int c = 0; c < 4; ++c) ecomm(r, c) = 0.0;
      for (int c = 0; c < 2; ++c) attn(r, c) = 0.0;
    }
  }
  PoolResult r = attention_pool(ecomm, attn, mask, Kernel::Softmax);
  for (double v : r.pooled.data) CHECK(v == 0.0);
  for (double v : r.w.data) CHECK(v == 0.0);
}

TEST_CASE("attention_pool matches the brute-force kernel oracle") {
  Rng rng(13);
  for (Kernel kernel : {Kernel::Softmax, Kernel::Unnormalized}) {
    for (int trial = 0; trial < 5; ++trial) {
      const int n = 3 + static_cast<int>(next_below(rng, 6));
      Mat ecomm = random_mat(n, 5, rng);
      Mat attn = random_mat(n, 3, rng);
      std::vector<uint8_t> mask(n, 1);
      PoolResult got = attention_pool(ecomm, attn, mask, kernel);
      Mat want = brute_force_weights(attn, kernel);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          CHECK(got.w(i, j) == doctest::Approx(want(i, j)).epsilon(1e-12));
        }
        for (int k = 0; k < 5; ++k) {
          double acc = 0.0;
          for (int j = 0; j < n; ++j) acc += want(i, j) * ecomm(j, k);
          CHECK(got.pooled(i, k) == doctest::Approx(acc).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("attention weights are translation invariant in the attention space") {
  Rng rng(17);
  const int n = 5;
  Mat ecomm = random_mat(n, 4, rng);
  Mat attn = random_mat(n, 3, rng);
  std::vector<uint8_t> mask(n, 1);
  PoolResult a = attention_pool(ecomm, attn, mask, Kernel::Softmax);
  Mat shifted = attn;
  for (int i = 0; i < n; ++i) {
    shifted(i, 0) += 3.25;
    shifted(i, 1) -= 1.5;
    shifted(i, 2) += 0.125;
  }
  PoolResult b = attention_pool(ecomm, shifted, mask, Kernel::Softmax);
  for (size_t i = 0; i < a.w.data.size(); ++i) {
    CHECK(a.w.data[i] == doctest::Approx(b.w.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("commnet_pool mean semantics") {
  Mat ecomm(2, 3);
  for (int c = 0; c < 3; ++c) {
    ecomm(0, c) = c + 1.0;
    ecomm(1, c) = -2.0 * c;
  }
  std::vector<uint8_t> mask = {1, 1};
  Mat pooled = commnet_pool(ecomm, mask);
  for (int c = 0; c < 3; ++c) {
    CHECK(pooled(0, c) == ecomm(1, c));
    CHECK(pooled(1, c) == ecomm(0, c));
  }

  // Identical agents pool identically.
  Mat same(4, 3);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) same(r, c) = 0.5 * c - 1.0;
  }
  std::vector<uint8_t> mask4(4, 1);
  Mat pooled4 = commnet_pool(same, mask4);
  for (int r = 1; r < 4; ++r) {
    for (int c = 0; c < 3; ++c) CHECK(pooled4(r, c) == pooled4(0, c));
  }
}

TEST_CASE("equal attention vectors reduce attention_pool to scaled commnet_pool") {
  Rng rng(23);
  const int n = 7;
  Mat ecomm = random_mat(n, 6, rng);
  Mat attn(n, 3);
  for (int i = 0; i < n; ++i) attn(i, 0) = 1.0;
  std::vector<uint8_t> mask(n, 1);
  PoolResult soft = attention_pool(ecomm, attn, mask, Kernel::Softmax);
  Mat comm = commnet_pool(ecomm, mask);
  // softmax weights are 1/n vs the mean's 1/(n-1)
  const double factor = static_cast<double>(n - 1) / n;
  for (size_t i = 0; i < comm.data.size(); ++i) {
    CHECK(soft.pooled.data[i] == doctest::Approx(comm.data[i] * factor).epsilon(1e-12));
  }
}

TEST_CASE("encoders are weight shared and mask aware") {
  ModelSpec spec = tiny_spec(Arch::Vain);
  Model model(spec);
  model.set_training(false);
  Mat features(5, 6);
  std::vector<uint8_t> mask = {1, 1, 0, 1, 1};
  Rng rng(29);
  for (int r = 0; r < 5; ++r) {
    if (!mask[r]) continue;
    for (int c = 0; c < 6; ++c) features(r, c) = next_uniform(rng, -1, 1);
  }
  // two identical agents
  for (int c = 0; c < 6; ++c) features(3, c) = features(0, c);
  AgentFrame frame{features, mask};
  ModelOutput out = model.forward(frame, nullptr);
  // masked slot -> zero row
  for (int c = 0; c < out.per_agent.cols; ++c) CHECK(out.per_agent(2, c) == 0.0);
  CHECK(out.attention.has_value());
  for (int j = 0; j < 5; ++j) {
    CHECK((*out.attention)(2, j) == 0.0);
    CHECK((*out.attention)(j, 2) == 0.0);
  }
}

TEST_CASE("in_pairwise two agents equals psi of the ordered pair (sum aggregation)") {
  ModelSpec spec = tiny_spec(Arch::InteractionNet);
  spec.aggregation = Agg::Sum;
  Model model(spec);
  model.set_training(false);
  Rng rng(31);
  AgentFrame frame = random_frame(2, 6, rng);
  ForwardCache cache;
  model.forward(frame, &cache);
  // cache.pooled row 0 must equal psi(x0, x1) exactly under sum aggregation.
  Mat pair(1, 12);
  for (int c = 0; c < 6; ++c) {
    pair(0, c) = frame.features(0, c);
    pair(0, 6 + c) = frame.features(1, c);
  }
  Mat psi_out = model.psi.forward(pair, nullptr);
  for (int k = 0; k < spec.comm_dim; ++k) {
    CHECK(cache.pooled(0, k) == doctest::Approx(psi_out(0, k)).epsilon(1e-15));
  }
}

TEST_CASE("in_pairwise matches a brute-force pair loop") {
  ModelSpec spec = tiny_spec(Arch::InteractionNet);
  spec.aggregation = Agg::Sum;
  Model model(spec);
  model.set_training(false);
  Rng rng(37);
  const int n = 4;
  AgentFrame frame = random_frame(n, 6, rng);
  ForwardCache cache;
  model.forward(frame, &cache);
  for (int i = 0; i < n; ++i) {
    std::vector<double> acc(spec.comm_dim, 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Mat pair(1, 12);
      for (int c = 0; c < 6; ++c) {
        pair(0, c) = frame.features(i, c);
        pair(0, 6 + c) = frame.features(j, c);
      }
      Mat out = model.psi.forward(pair, nullptr);
      for (int k = 0; k < spec.comm_dim; ++k) acc[k] += out(0, k);
    }
    for (int k = 0; k < spec.comm_dim; ++k) {
      CHECK(cache.pooled(i, k) == doctest::Approx(acc[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("classify head: masked softmax over agents") {
  ModelSpec spec = tiny_spec(Arch::SMax, Head::PerAgentSoftmax);
  Model model(spec);
  model.set_training(false);
  Rng rng(41);
  Mat features(5, 6);
  std::vector<uint8_t> mask = {1, 0, 1, 1, 0};
  for (int r = 0; r < 5; ++r) {
    if (!mask[r]) continue;
    for (int c = 0; c < 6; ++c) features(r, c) = next_uniform(rng, -1, 1);
  }
  AgentFrame frame{features, mask};
  ModelOutput out = model.forward(frame, nullptr);
  REQUIRE(out.probs.has_value());
  double total = 0.0;
  for (int s = 0; s < 5; ++s) {
    if (!mask[s]) CHECK((*out.probs)[s] == 0.0);
    total += (*out.probs)[s];
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("permutation equivariance is exact for all architectures") {
  Rng rng(43);
  for (Arch arch : {Arch::Vain, Arch::CommNet, Arch::InteractionNet, Arch::SMax, Arch::Mlp}) {
    for (bool batchnorm : {false, true}) {
      ModelSpec spec = tiny_spec(arch, Head::Regression, batchnorm);
      Model model(spec);
      model.set_training(batchnorm);  // exercise batch statistics too
      for (int trial = 0; trial < 5; ++trial) {
        const int n = 3 + static_cast<int>(next_below(rng, 5));
        AgentFrame frame = random_frame(n, 6, rng);
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        shuffle_inplace(perm, rng);
        AgentFrame permuted;
        permuted.features = Mat(n, 6);
        permuted.mask.assign(n, 1);
        for (int i = 0; i < n; ++i) {
          for (int c = 0; c < 6; ++c) permuted.features(perm[i], c) = frame.features(i, c);
        }
        ModelOutput a = model.forward(frame, nullptr);
        ModelOutput b = model.forward(permuted, nullptr);
        for (int i = 0; i < n; ++i) {
          for (int c = 0; c < a.per_agent.cols; ++c) {
            CHECK(a.per_agent(i, c) == b.per_agent(perm[i], c));  // bitwise
          }
        }
      }
    }
  }
}

TEST_CASE("single-agent frame depends only on the singleton path") {
  ModelSpec spec = tiny_spec(Arch::Vain);
  Model model(spec);
  model.set_training(false);
  Rng rng(47);
  AgentFrame frame = random_frame(1, 6, rng);
  ModelOutput out = model.forward(frame, nullptr);
  // Pooled features are zero, so output must equal dec(concat(0, es(x))).
  Mat es_out = model.es.forward(frame.features, nullptr);
  Mat concat(1, spec.comm_dim + spec.es_out);
  for (int k = 0; k < spec.es_out; ++k) concat(0, spec.comm_dim + k) = es_out(0, k);
  Mat dec_out = model.dec.forward(concat, nullptr);
  for (int c = 0; c < spec.out_dim; ++c) {
    CHECK(out.per_agent(0, c) == doctest::Approx(dec_out(0, c)).epsilon(1e-15));
  }
}

TEST_CASE("encoder evaluation counters obey the complexity claims") {
  for (int n : {2, 8, 32}) {
    for (Arch arch : {Arch::Vain, Arch::CommNet, Arch::InteractionNet}) {
      ModelSpec spec = tiny_spec(arch);
      Model model(spec);
      model.set_training(false);
      Rng rng(53);
      AgentFrame frame = random_frame(n, 6, rng);
      model.forward(frame, nullptr);
      const EvalCounts expected = count_encoder_evals(spec, n);
      CHECK(model.comm_evals() == expected.comm);
      CHECK(model.pair_evals() == expected.pair);
      if (arch == Arch::InteractionNet) {
        CHECK(model.pair_evals() == static_cast<int64_t>(n) * (n - 1));
      } else {
        CHECK(model.comm_evals() == n);
      }
    }
  }
}

TEST_CASE("full-model gradients match finite differences") {
  Rng rng(59);
  for (Arch arch : {Arch::Vain, Arch::CommNet, Arch::InteractionNet}) {
    for (bool batchnorm : {false, true}) {
      ModelSpec spec = tiny_spec(arch, Head::Regression, batchnorm);
      spec.kernel = arch == Arch::Vain ? Kernel::Unnormalized : Kernel::Softmax;
      Model model(spec);
      model.set_training(true);
      AgentFrame frame = random_frame(5, 6, rng);
      Mat targets = random_mat(5, spec.out_dim, rng);
      auto loss = [&] { return frame_loss(model, frame, targets, -1, nullptr, nullptr); };
      model.zero_grad();
      ForwardCache cache;
      Mat grad;
      frame_loss(model, frame, targets, -1, &cache, &grad);
      model.backward(cache, grad);
      GradCheckConfig cfg;
      cfg.max_samples = 150;
      const double err = grad_check(loss, model.params(), cfg);
      INFO(to_string(arch) << " batchnorm=" << batchnorm);
      CHECK(err < 1e-5);
    }
  }
}

TEST_CASE("classification-head gradients match finite differences") {
  Rng rng(61);
  for (Arch arch : {Arch::Vain, Arch::SMax, Arch::Fc, Arch::OneHopFc}) {
    ModelSpec spec = tiny_spec(arch, Head::PerAgentSoftmax);
    Model model(spec);
    model.set_training(true);
    AgentFrame frame = random_frame(5, 6, rng);
    const int label = 2;
    auto loss = [&] { return frame_loss(model, frame, Mat(), label, nullptr, nullptr); };
    model.zero_grad();
    ForwardCache cache;
    Mat grad;
    frame_loss(model, frame, Mat(), label, &cache, &grad);
    model.backward(cache, grad);
    GradCheckConfig cfg;
    cfg.max_samples = 120;
    const double err = grad_check(loss, model.params(), cfg);
    INFO(to_string(arch));
    CHECK(err < 1e-5);
  }
}

TEST_CASE("masked agents receive zero gradient") {
  ModelSpec spec = tiny_spec(Arch::Vain, Head::PerAgentSoftmax);
  Model model(spec);
  model.set_training(false);
  Rng rng(67);
  Mat features(5, 6);
  std::vector<uint8_t> mask = {1, 1, 0, 1, 1};
  for (int r = 0; r < 5; ++r) {
    if (!mask[r]) continue;
    for (int c = 0; c < 6; ++c) features(r, c) = next_uniform(rng, -1, 1);
  }
  AgentFrame frame{features, mask};
  ForwardCache cache;
  Mat grad;
  frame_loss(model, frame, Mat(), 0, &cache, &grad);
  for (int c = 0; c < grad.cols; ++c) CHECK(grad(2, c) == 0.0);
  // And the probability of the masked slot is exactly zero.
  ModelOutput out = model.forward(frame, nullptr);
  CHECK((*out.probs)[2] == 0.0);
}

TEST_CASE("checkpoint round trip preserves spec and outputs") {
  const std::string path = (std::filesystem::temp_directory_path() / "vain_ckpt_test.bin").string();
  ModelSpec spec = tiny_spec(Arch::Vain, Head::Regression, true);
  Model model(spec);
  model.set_training(false);
  Rng rng(71);
  AgentFrame frame = random_frame(4, 6, rng);
  ModelOutput before = model.forward(frame, nullptr);
  save_checkpoint(path, model);
  Model loaded = load_checkpoint(path);
  loaded.set_training(false);
  ModelOutput after = loaded.forward(frame, nullptr);
  CHECK(loaded.spec().arch == Arch::Vain);
  CHECK(loaded.spec().comm_dim == spec.comm_dim);
  for (size_t i = 0; i < before.per_agent.data.size(); ++i) {
    CHECK(before.per_agent.data[i] == after.per_agent.data[i]);
  }
  std::filesystem::remove(path);
}

TEST_CASE("fc baseline fills absent slots with the absent category bit") {
  ModelSpec spec = tiny_spec(Arch::Fc, Head::PerAgentSoftmax);
  spec.absent_flag_index = 3;
  Model model(spec);
  model.set_training(false);
  Rng rng(73);
  Mat features(5, 6);
  std::vector<uint8_t> mask = {1, 0, 1, 1, 1};
  for (int r = 0; r < 5; ++r) {
    if (!mask[r]) continue;
    for (int c = 0; c < 6; ++c) features(r, c) = next_uniform(rng, -1, 1);
  }
  AgentFrame frame{features, mask};
  ForwardCache cache;
  model.forward(frame, &cache);
  CHECK(cache.flat_in(0, 1 * 6 + 3) == 1.0);  // absent slot one-hot
  for (int c = 0; c < 6; ++c) {
    if (c != 3) CHECK(cache.flat_in(0, 1 * 6 + c) == 0.0);
  }
}
