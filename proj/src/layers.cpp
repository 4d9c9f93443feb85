#include "vain/layers.hpp"

#include <cmath>

namespace vain {

LinearLayer::LinearLayer(int in, int out)
    : weight(out, in), bias(out, 0.0), grad_weight(out, in), grad_bias(out, 0.0) {
  if (in <= 0 || out <= 0) throw std::invalid_argument("LinearLayer: non-positive dims");
}

void LinearLayer::init_uniform(Rng& rng) {
  const double bound = std::sqrt(1.0 / in_dim());
  for (double& w : weight.data) w = next_uniform(rng, -bound, bound);
  for (double& b : bias) b = next_uniform(rng, -bound, bound);
}

void LinearLayer::zero_grad() {
  grad_weight.zero();
  std::fill(grad_bias.begin(), grad_bias.end(), 0.0);
}

void LinearLayer::collect_params(std::vector<ParamRef>& out) {
  out.push_back({weight.data.data(), grad_weight.data.data(), weight.size()});
  out.push_back({bias.data(), grad_bias.data(), bias.size()});
}

Mat linear_forward(const Mat& x, const LinearLayer& layer) {
  require_cols(x, layer.in_dim(), "linear_forward");
  const int b = x.rows, in = layer.in_dim(), out = layer.out_dim();
  Mat y(b, out);
  for (int r = 0; r < b; ++r) {
    const double* xr = x.row(r);
    double* yr = y.row(r);
    for (int o = 0; o < out; ++o) {
      const double* wr = layer.weight.row(o);
      double acc = 0.0;
      for (int i = 0; i < in; ++i) acc += xr[i] * wr[i];
      yr[o] = acc + layer.bias[o];
    }
  }
  return y;
}

Mat linear_backward(const Mat& x, LinearLayer& layer, const Mat& grad_out) {
  require_cols(x, layer.in_dim(), "linear_backward");
  if (grad_out.rows != x.rows || grad_out.cols != layer.out_dim()) {
    throw std::invalid_argument("linear_backward: grad_out shape mismatch");
  }
  const int b = x.rows, in = layer.in_dim(), out = layer.out_dim();
  Mat grad_in(b, in);
  for (int r = 0; r < b; ++r) {
    const double* gr = grad_out.row(r);
    const double* xr = x.row(r);
    double* gi = grad_in.row(r);
    for (int o = 0; o < out; ++o) {
      const double g = gr[o];
      if (g == 0.0) continue;
      layer.grad_bias[o] += g;
      double* gw = layer.grad_weight.row(o);
      const double* wr = layer.weight.row(o);
      for (int i = 0; i < in; ++i) {
        gw[i] += g * xr[i];
        gi[i] += g * wr[i];
      }
    }
  }
  return grad_in;
}

Mat relu(const Mat& x) {
  Mat y = x;
  for (double& v : y.data) v = v > 0.0 ? v : 0.0;
  return y;
}

Mat relu_backward(const Mat& x, const Mat& grad_out) {
  require_same_shape(x, grad_out, "relu_backward");
  Mat g = grad_out;
  for (size_t i = 0; i < g.data.size(); ++i) {
    if (x.data[i] <= 0.0) g.data[i] = 0.0;
  }
  return g;
}

BatchNormLayer::BatchNormLayer(int dim)
    : gamma(dim, 1.0),
      beta(dim, 0.0),
      running_mean(dim, 0.0),
      running_var(dim, 1.0),
      grad_gamma(dim, 0.0),
      grad_beta(dim, 0.0) {}

void BatchNormLayer::zero_grad() {
  std::fill(grad_gamma.begin(), grad_gamma.end(), 0.0);
  std::fill(grad_beta.begin(), grad_beta.end(), 0.0);
}

void BatchNormLayer::collect_params(std::vector<ParamRef>& out) {
  out.push_back({gamma.data(), grad_gamma.data(), gamma.size()});
  out.push_back({beta.data(), grad_beta.data(), beta.size()});
}

Mat batchnorm_forward(const Mat& x, BatchNormLayer& layer, BatchNormCache* cache) {
  require_cols(x, layer.dim(), "batchnorm_forward");
  const int m = x.rows, d = x.cols;
  Mat y(m, d);
  if (layer.training) {
    if (m < 2) throw std::invalid_argument("batchnorm_forward: train mode needs batch >= 2");
    Mat xhat(m, d);
    std::vector<double> inv_std(d);
    for (int c = 0; c < d; ++c) {
      ExactAcc sum;
      for (int r = 0; r < m; ++r) sum.add(x(r, c));
      const double mean = sum.result() / m;
      ExactAcc sq;
      for (int r = 0; r < m; ++r) {
        const double dlt = x(r, c) - mean;
        sq.add(dlt * dlt);
      }
      const double ssq = sq.result();
      const double var = ssq / m;  // biased, used for normalization
      const double istd = 1.0 / std::sqrt(var + layer.eps);
      inv_std[c] = istd;
      for (int r = 0; r < m; ++r) {
        const double xh = (x(r, c) - mean) * istd;
        xhat(r, c) = xh;
        y(r, c) = layer.gamma[c] * xh + layer.beta[c];
      }
      const double unbiased = ssq / (m - 1);
      layer.running_mean[c] = (1.0 - layer.momentum) * layer.running_mean[c] + layer.momentum * mean;
      layer.running_var[c] = (1.0 - layer.momentum) * layer.running_var[c] + layer.momentum * unbiased;
    }
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = std::move(inv_std);
      cache->training = true;
    }
  } else {
    std::vector<double> inv_std(d);
    for (int c = 0; c < d; ++c) inv_std[c] = 1.0 / std::sqrt(layer.running_var[c] + layer.eps);
    Mat xhat(m, d);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < d; ++c) {
        const double xh = (x(r, c) - layer.running_mean[c]) * inv_std[c];
        xhat(r, c) = xh;
        y(r, c) = layer.gamma[c] * xh + layer.beta[c];
      }
    }
    if (cache) {
      cache->xhat = std::move(xhat);
      cache->inv_std = std::move(inv_std);
      cache->training = false;
    }
  }
  return y;
}

Mat batchnorm_backward(const BatchNormCache& cache, BatchNormLayer& layer, const Mat& grad_out) {
  const int m = grad_out.rows, d = grad_out.cols;
  require_cols(grad_out, layer.dim(), "batchnorm_backward");
  Mat grad_in(m, d);
  for (int c = 0; c < d; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (int r = 0; r < m; ++r) {
      const double dy = grad_out(r, c);
      sum_dy += dy;
      sum_dy_xhat += dy * cache.xhat(r, c);
    }
    layer.grad_beta[c] += sum_dy;
    layer.grad_gamma[c] += sum_dy_xhat;
    const double g = layer.gamma[c];
    const double istd = cache.inv_std[c];
    if (cache.training) {
      // Batch statistics were functions of x; the usual three-term formula.
      for (int r = 0; r < m; ++r) {
        const double dy = grad_out(r, c);
        grad_in(r, c) = g * istd / m * (m * dy - sum_dy - cache.xhat(r, c) * sum_dy_xhat);
      }
    } else {
      for (int r = 0; r < m; ++r) grad_in(r, c) = grad_out(r, c) * g * istd;
    }
  }
  return grad_in;
}

Mlp::Mlp(const MlpSpec& spec, Rng& rng) : spec_(spec) {
  if (spec.in <= 0 || spec.out <= 0) throw std::invalid_argument("Mlp: non-positive dims");
  int prev = spec.in;
  for (int h : spec.hidden) {
    linears.emplace_back(prev, h);
    if (spec.batchnorm) bns.emplace_back(h);
    prev = h;
  }
  linears.emplace_back(prev, spec.out);
  for (auto& l : linears) l.init_uniform(rng);
}

Mat Mlp::forward(const Mat& x, MlpCache* cache) {
  const size_t nlin = linears.size();
  if (cache) {
    cache->lin_in.assign(nlin, Mat());
    cache->pre_act.assign(nlin - 1, Mat());
    cache->bn.assign(bns.size(), BatchNormCache());
  }
  Mat cur = x;
  for (size_t l = 0; l < nlin; ++l) {
    if (cache) cache->lin_in[l] = cur;
    cur = linear_forward(cur, linears[l]);
    if (l + 1 < nlin) {
      if (spec_.batchnorm) cur = batchnorm_forward(cur, bns[l], cache ? &cache->bn[l] : nullptr);
      if (cache) cache->pre_act[l] = cur;
      cur = relu(cur);
    }
  }
  return cur;
}

Mat Mlp::backward(const MlpCache& cache, const Mat& grad_out) {
  Mat g = grad_out;
  for (size_t l = linears.size(); l-- > 0;) {
    if (l + 1 < linears.size()) {
      g = relu_backward(cache.pre_act[l], g);
      if (spec_.batchnorm) g = batchnorm_backward(cache.bn[l], bns[l], g);
    }
    g = linear_backward(cache.lin_in[l], linears[l], g);
  }
  return g;
}

void Mlp::set_training(bool training) {
  for (auto& bn : bns) bn.training = training;
}

void Mlp::zero_grad() {
  for (auto& l : linears) l.zero_grad();
  for (auto& bn : bns) bn.zero_grad();
}

void Mlp::collect_params(std::vector<ParamRef>& out) {
  for (size_t l = 0; l < linears.size(); ++l) {
    linears[l].collect_params(out);
    if (spec_.batchnorm && l < bns.size()) bns[l].collect_params(out);
  }
}

size_t Mlp::param_count() const {
  size_t n = 0;
  for (const auto& l : linears) n += l.weight.size() + l.bias.size();
  for (const auto& bn : bns) n += bn.gamma.size() + bn.beta.size();
  return n;
}

size_t Mlp::macs_per_row() const {
  size_t n = 0;
  for (const auto& l : linears) n += l.weight.size();
  return n;
}

}  // namespace vain
