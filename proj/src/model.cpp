#include "vain/model.hpp"

#include <cmath>
#include <stdexcept>

#include "vain/losses.hpp"

namespace vain {

namespace {

const char* kArchNames[] = {"vain", "commnet", "in", "fc", "smax", "1hop-fc", "linear", "mlp"};

Mat compact_rows(const Mat& m, const std::vector<int>& act) {
  Mat out(static_cast<int>(act.size()), m.cols);
  for (size_t r = 0; r < act.size(); ++r) {
    const double* src = m.row(act[r]);
    std::copy(src, src + m.cols, out.row(static_cast<int>(r)));
  }
  return out;
}

void scatter_rows(const Mat& compact, const std::vector<int>& act, Mat& full) {
  for (size_t r = 0; r < act.size(); ++r) {
    const double* src = compact.row(static_cast<int>(r));
    std::copy(src, src + compact.cols, full.row(act[r]));
  }
}

Mat hconcat(const Mat& a, const Mat& b) {
  if (a.rows != b.rows) throw std::invalid_argument("hconcat: row mismatch");
  Mat out(a.rows, a.cols + b.cols);
  for (int r = 0; r < a.rows; ++r) {
    std::copy(a.row(r), a.row(r) + a.cols, out.row(r));
    std::copy(b.row(r), b.row(r) + b.cols, out.row(r) + a.cols);
  }
  return out;
}

void hsplit(const Mat& m, int left_cols, Mat& left, Mat& right) {
  left = Mat(m.rows, left_cols);
  right = Mat(m.rows, m.cols - left_cols);
  for (int r = 0; r < m.rows; ++r) {
    std::copy(m.row(r), m.row(r) + left_cols, left.row(r));
    std::copy(m.row(r) + left_cols, m.row(r) + m.cols, right.row(r));
  }
}

}  // namespace

std::string to_string(Arch a) { return kArchNames[static_cast<int>(a)]; }
std::string to_string(Head h) { return h == Head::Regression ? "regression" : "per_agent_softmax"; }
std::string to_string(Kernel k) { return k == Kernel::Softmax ? "softmax" : "unnormalized"; }
std::string to_string(Agg a) { return a == Agg::Sum ? "sum" : "mean"; }

Arch arch_from_string(const std::string& s) {
  for (int i = 0; i < 8; ++i) {
    if (s == kArchNames[i]) return static_cast<Arch>(i);
  }
  throw std::invalid_argument("unknown arch: " + s);
}

Head head_from_string(const std::string& s) {
  if (s == "regression") return Head::Regression;
  if (s == "per_agent_softmax") return Head::PerAgentSoftmax;
  throw std::invalid_argument("unknown head: " + s);
}

Kernel kernel_from_string(const std::string& s) {
  if (s == "softmax") return Kernel::Softmax;
  if (s == "unnormalized") return Kernel::Unnormalized;
  throw std::invalid_argument("unknown kernel: " + s);
}

Agg agg_from_string(const std::string& s) {
  if (s == "sum") return Agg::Sum;
  if (s == "mean") return Agg::Mean;
  throw std::invalid_argument("unknown aggregation: " + s);
}

void ModelSpec::validate() const {
  if (feature_dim < 1) throw std::invalid_argument("ModelSpec: feature_dim < 1");
  if (arch == Arch::Vain && attn_dim < 1) throw std::invalid_argument("ModelSpec: vain needs attn_dim >= 1");
  if (arch == Arch::Vain || arch == Arch::CommNet || arch == Arch::InteractionNet ||
      arch == Arch::OneHopFc) {
    if (comm_dim < 1) throw std::invalid_argument("ModelSpec: comm_dim < 1");
  }
  if (arch == Arch::Fc || arch == Arch::OneHopFc) {
    if (n_slots < 1) throw std::invalid_argument("ModelSpec: fc archs need n_slots");
    if (head != Head::PerAgentSoftmax) throw std::invalid_argument("ModelSpec: fc archs are classifiers");
    if (arch == Arch::Fc && batchnorm) {
      throw std::invalid_argument("ModelSpec: fc runs on batches of one frame row; no batchnorm");
    }
  }
  if (head == Head::PerAgentSoftmax && out_dim != 1) {
    throw std::invalid_argument("ModelSpec: per-agent softmax head needs out_dim 1");
  }
  if (out_dim < 1) throw std::invalid_argument("ModelSpec: out_dim < 1");
}

EvalCounts count_encoder_evals(const ModelSpec& spec, int n) {
  EvalCounts c;
  switch (spec.arch) {
    case Arch::Vain:
    case Arch::CommNet:
    case Arch::OneHopFc:
      c.comm = n;
      break;
    case Arch::InteractionNet:
      c.pair = static_cast<int64_t>(n) * (n - 1);
      break;
    default:
      break;
  }
  return c;
}

Model::Model(const ModelSpec& spec) : spec_(spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int f = spec.feature_dim;
  const bool dec_bn = spec.batchnorm && spec.arch != Arch::Fc && spec.arch != Arch::OneHopFc;
  switch (spec.arch) {
    case Arch::Vain:
      es = Mlp({f, spec.es_hidden, spec.es_out, spec.batchnorm}, rng);
      ec = Mlp({f, spec.ec_hidden, spec.comm_dim + spec.attn_dim, spec.batchnorm}, rng);
      dec = Mlp({spec.comm_dim + spec.es_out, spec.dec_hidden, spec.out_dim, dec_bn}, rng);
      has_es_ = has_ec_ = true;
      break;
    case Arch::CommNet:
      es = Mlp({f, spec.es_hidden, spec.es_out, spec.batchnorm}, rng);
      ec = Mlp({f, spec.ec_hidden, spec.comm_dim, spec.batchnorm}, rng);
      dec = Mlp({spec.comm_dim + spec.es_out, spec.dec_hidden, spec.out_dim, dec_bn}, rng);
      has_es_ = has_ec_ = true;
      break;
    case Arch::InteractionNet:
      es = Mlp({f, spec.es_hidden, spec.es_out, spec.batchnorm}, rng);
      psi = Mlp({2 * f, spec.psi_hidden, spec.comm_dim, spec.batchnorm}, rng);
      dec = Mlp({spec.comm_dim + spec.es_out, spec.dec_hidden, spec.out_dim, dec_bn}, rng);
      has_es_ = has_psi_ = true;
      break;
    case Arch::SMax:
      es = Mlp({f, spec.es_hidden, spec.es_out, spec.batchnorm}, rng);
      dec = Mlp({spec.es_out, spec.dec_hidden, spec.out_dim, dec_bn}, rng);
      has_es_ = true;
      break;
    case Arch::Fc:
      dec = Mlp({spec.n_slots * f, spec.dec_hidden, spec.n_slots, false}, rng);
      break;
    case Arch::OneHopFc:
      ec = Mlp({f, spec.ec_hidden, spec.comm_dim, spec.batchnorm}, rng);
      dec = Mlp({spec.comm_dim, spec.dec_hidden, spec.n_slots, false}, rng);
      has_ec_ = true;
      break;
    case Arch::Linear:
      dec = Mlp({f, {}, spec.out_dim, false}, rng);
      break;
    case Arch::Mlp:
      dec = Mlp({f, spec.dec_hidden, spec.out_dim, dec_bn}, rng);
      break;
  }
}

ModelOutput Model::forward(const AgentFrame& frame, ForwardCache* cache) {
  frame.validate();
  require_cols(frame.features, spec_.feature_dim, "Model::forward");
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.act = frame.active_indices();
  c.n_act = static_cast<int>(c.act.size());
  const int n_slots = frame.n_slots();
  const int n = c.n_act;

  ModelOutput out;
  out.per_agent = Mat(n_slots, spec_.out_dim);

  switch (spec_.arch) {
    case Arch::Vain: {
      c.x = compact_rows(frame.features, c.act);
      c.es_out = es.forward(c.x, cache ? &c.es_cache : nullptr);
      Mat trunk = ec.forward(c.x, cache ? &c.ec_cache : nullptr);
      comm_evals_ += n;
      hsplit(trunk, spec_.comm_dim, c.ecomm, c.attn);
      std::vector<uint8_t> all(n, 1);
      PoolResult pool = attention_pool(c.ecomm, c.attn, all, spec_.kernel);
      c.pooled = std::move(pool.pooled);
      c.w = std::move(pool.w);
      c.concat = hconcat(c.pooled, c.es_out);
      Mat o = dec.forward(c.concat, cache ? &c.dec_cache : nullptr);
      scatter_rows(o, c.act, out.per_agent);
      Mat wfull(n_slots, n_slots);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) wfull(c.act[i], c.act[j]) = c.w(i, j);
      }
      out.attention = std::move(wfull);
      break;
    }
    case Arch::CommNet: {
      c.x = compact_rows(frame.features, c.act);
      c.es_out = es.forward(c.x, cache ? &c.es_cache : nullptr);
      c.ecomm = ec.forward(c.x, cache ? &c.ec_cache : nullptr);
      comm_evals_ += n;
      std::vector<uint8_t> all(n, 1);
      c.pooled = commnet_pool(c.ecomm, all);
      c.concat = hconcat(c.pooled, c.es_out);
      Mat o = dec.forward(c.concat, cache ? &c.dec_cache : nullptr);
      scatter_rows(o, c.act, out.per_agent);
      break;
    }
    case Arch::InteractionNet: {
      c.x = compact_rows(frame.features, c.act);
      c.es_out = es.forward(c.x, cache ? &c.es_cache : nullptr);
      const int f = spec_.feature_dim;
      c.pooled = Mat(n, spec_.comm_dim);
      if (n >= 2) {
        c.pair_in = Mat(n * (n - 1), 2 * f);
        int row = 0;
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            std::copy(c.x.row(i), c.x.row(i) + f, c.pair_in.row(row));
            std::copy(c.x.row(j), c.x.row(j) + f, c.pair_in.row(row) + f);
            ++row;
          }
        }
        Mat interactions = psi.forward(c.pair_in, cache ? &c.psi_cache : nullptr);
        pair_evals_ += static_cast<int64_t>(n) * (n - 1);
        const double scale = spec_.aggregation == Agg::Mean ? 1.0 / (n - 1) : 1.0;
        for (int i = 0; i < n; ++i) {
          for (int k = 0; k < spec_.comm_dim; ++k) {
            ExactAcc acc;
            for (int j = 0; j < n - 1; ++j) acc.add(interactions(i * (n - 1) + j, k));
            c.pooled(i, k) = acc.result() * scale;
          }
        }
      }
      c.concat = hconcat(c.pooled, c.es_out);
      Mat o = dec.forward(c.concat, cache ? &c.dec_cache : nullptr);
      scatter_rows(o, c.act, out.per_agent);
      break;
    }
    case Arch::SMax: {
      c.x = compact_rows(frame.features, c.act);
      c.es_out = es.forward(c.x, cache ? &c.es_cache : nullptr);
      Mat o = dec.forward(c.es_out, cache ? &c.dec_cache : nullptr);
      scatter_rows(o, c.act, out.per_agent);
      break;
    }
    case Arch::Fc: {
      if (n_slots != spec_.n_slots) throw std::invalid_argument("Fc: frame slot count mismatch");
      const int f = spec_.feature_dim;
      c.flat_in = Mat(1, n_slots * f);
      for (int s = 0; s < n_slots; ++s) {
        if (frame.mask[s]) {
          std::copy(frame.features.row(s), frame.features.row(s) + f, c.flat_in.row(0) + s * f);
        } else if (spec_.absent_flag_index >= 0) {
          c.flat_in(0, s * f + spec_.absent_flag_index) = 1.0;
        }
      }
      Mat o = dec.forward(c.flat_in, cache ? &c.dec_cache : nullptr);
      for (int s = 0; s < n_slots; ++s) out.per_agent(s, 0) = o(0, s);
      break;
    }
    case Arch::OneHopFc: {
      if (n_slots != spec_.n_slots) throw std::invalid_argument("OneHopFc: frame slot count mismatch");
      c.x = compact_rows(frame.features, c.act);
      c.ecomm = ec.forward(c.x, cache ? &c.ec_cache : nullptr);
      comm_evals_ += n;
      c.pooled_g = Mat(1, spec_.comm_dim);
      for (int k = 0; k < spec_.comm_dim; ++k) {
        ExactAcc acc;
        for (int i = 0; i < n; ++i) acc.add(c.ecomm(i, k));
        c.pooled_g(0, k) = acc.result() / n;
      }
      Mat o = dec.forward(c.pooled_g, cache ? &c.dec_cache : nullptr);
      for (int s = 0; s < n_slots; ++s) out.per_agent(s, 0) = o(0, s);
      break;
    }
    case Arch::Linear:
    case Arch::Mlp: {
      c.x = compact_rows(frame.features, c.act);
      Mat o = dec.forward(c.x, cache ? &c.dec_cache : nullptr);
      scatter_rows(o, c.act, out.per_agent);
      break;
    }
  }

  if (spec_.head == Head::PerAgentSoftmax) {
    std::vector<double> logits(n_slots);
    for (int s = 0; s < n_slots; ++s) logits[s] = out.per_agent(s, 0);
    if (spec_.arch == Arch::Fc || spec_.arch == Arch::OneHopFc) {
      out.probs = softmax(logits, nullptr);  // index prediction, no masking
    } else {
      out.probs = softmax(logits, &frame.mask);
    }
  }
  require_finite(out.per_agent, "Model::forward output");
  return out;
}

void Model::backward(const ForwardCache& c, const Mat& grad_per_agent) {
  const int n = c.n_act;
  switch (spec_.arch) {
    case Arch::Vain: {
      Mat g = compact_rows(grad_per_agent, c.act);
      Mat grad_concat = dec.backward(c.dec_cache, g);
      Mat grad_pooled, grad_es;
      hsplit(grad_concat, spec_.comm_dim, grad_pooled, grad_es);
      std::vector<uint8_t> all(n, 1);
      PoolBackward pb =
          attention_pool_backward(c.ecomm, c.attn, all, spec_.kernel, c.w, grad_pooled);
      Mat grad_trunk = hconcat(pb.grad_ecomm, pb.grad_attn);
      ec.backward(c.ec_cache, grad_trunk);
      es.backward(c.es_cache, grad_es);
      break;
    }
    case Arch::CommNet: {
      Mat g = compact_rows(grad_per_agent, c.act);
      Mat grad_concat = dec.backward(c.dec_cache, g);
      Mat grad_pooled, grad_es;
      hsplit(grad_concat, spec_.comm_dim, grad_pooled, grad_es);
      std::vector<uint8_t> all(n, 1);
      Mat grad_ecomm = commnet_pool_backward(all, grad_pooled);
      ec.backward(c.ec_cache, grad_ecomm);
      es.backward(c.es_cache, grad_es);
      break;
    }
    case Arch::InteractionNet: {
      Mat g = compact_rows(grad_per_agent, c.act);
      Mat grad_concat = dec.backward(c.dec_cache, g);
      Mat grad_pooled, grad_es;
      hsplit(grad_concat, spec_.comm_dim, grad_pooled, grad_es);
      if (n >= 2) {
        const double scale = spec_.aggregation == Agg::Mean ? 1.0 / (n - 1) : 1.0;
        Mat grad_inter(n * (n - 1), spec_.comm_dim);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < n - 1; ++j) {
            for (int k = 0; k < spec_.comm_dim; ++k) {
              grad_inter(i * (n - 1) + j, k) = grad_pooled(i, k) * scale;
            }
          }
        }
        psi.backward(c.psi_cache, grad_inter);
      }
      es.backward(c.es_cache, grad_es);
      break;
    }
    case Arch::SMax: {
      Mat g = compact_rows(grad_per_agent, c.act);
      Mat grad_es = dec.backward(c.dec_cache, g);
      es.backward(c.es_cache, grad_es);
      break;
    }
    case Arch::Fc: {
      Mat g(1, spec_.n_slots);
      for (int s = 0; s < spec_.n_slots; ++s) g(0, s) = grad_per_agent(s, 0);
      dec.backward(c.dec_cache, g);
      break;
    }
    case Arch::OneHopFc: {
      Mat g(1, spec_.n_slots);
      for (int s = 0; s < spec_.n_slots; ++s) g(0, s) = grad_per_agent(s, 0);
      Mat grad_g = dec.backward(c.dec_cache, g);
      Mat grad_ecomm(n, spec_.comm_dim);
      for (int i = 0; i < n; ++i) {
        for (int k = 0; k < spec_.comm_dim; ++k) grad_ecomm(i, k) = grad_g(0, k) / n;
      }
      ec.backward(c.ec_cache, grad_ecomm);
      break;
    }
    case Arch::Linear:
    case Arch::Mlp: {
      Mat g = compact_rows(grad_per_agent, c.act);
      dec.backward(c.dec_cache, g);
      break;
    }
  }
}

void Model::set_training(bool training) {
  if (has_es_) es.set_training(training);
  if (has_ec_) ec.set_training(training);
  if (has_psi_) psi.set_training(training);
  dec.set_training(training);
}

void Model::zero_grad() {
  if (has_es_) es.zero_grad();
  if (has_ec_) ec.zero_grad();
  if (has_psi_) psi.zero_grad();
  dec.zero_grad();
}

std::vector<ParamRef> Model::params() {
  std::vector<ParamRef> out;
  if (has_es_) es.collect_params(out);
  if (has_ec_) ec.collect_params(out);
  if (has_psi_) psi.collect_params(out);
  dec.collect_params(out);
  return out;
}

std::vector<double> Model::save_flat() const {
  std::vector<double> out;
  auto& self = const_cast<Model&>(*this);
  for (const auto& p : self.params()) out.insert(out.end(), p.value, p.value + p.n);
  return out;
}

void Model::load_flat(std::span<const double> values) {
  size_t k = 0;
  for (auto& p : params()) {
    if (k + p.n > values.size()) throw std::invalid_argument("load_flat: too few values");
    std::copy(values.begin() + k, values.begin() + k + p.n, p.value);
    k += p.n;
  }
  if (k != values.size()) throw std::invalid_argument("load_flat: size mismatch");
}

size_t Model::param_count() const {
  size_t n = 0;
  auto& self = const_cast<Model&>(*this);
  for (const auto& p : self.params()) n += p.n;
  return n;
}

size_t Model::macs_per_frame(int n_active) const {
  const size_t n = static_cast<size_t>(n_active);
  size_t total = 0;
  if (has_es_) total += n * es.macs_per_row();
  if (has_ec_) total += n * ec.macs_per_row();
  if (has_psi_) total += n * (n - 1) * psi.macs_per_row();
  if (spec_.arch == Arch::Fc || spec_.arch == Arch::OneHopFc) {
    total += dec.macs_per_row();
  } else {
    total += n * dec.macs_per_row();
  }
  return total;
}

}  // namespace vain
