#include "slicesim/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace slicesim {

Mlp Mlp::make(const std::vector<int>& sizes, Activation output, Rng& rng) {
  if (sizes.size() < 2) throw std::invalid_argument("mlp: need at least input and output sizes");
  Mlp net;
  net.output_activation = output;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] < 1 || sizes[l + 1] < 1) throw std::invalid_argument("mlp: layer sizes must be >= 1");
    Layer layer;
    layer.in = sizes[l];
    layer.out = sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    layer.w.resize(static_cast<size_t>(layer.out) * layer.in);
    layer.b.resize(layer.out);
    for (auto& v : layer.w) v = dist(rng);
    for (auto& v : layer.b) v = dist(rng);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

std::size_t Mlp::param_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.w.size() + l.b.size();
  return n;
}

namespace {

inline double apply_act(double z, Activation a) {
  switch (a) {
    case Activation::Relu: return z > 0 ? z : 0.0;
    case Activation::Tanh: return std::tanh(z);
    case Activation::Identity: return z;
  }
  return z;
}

// derivative expressed via the activation value where convenient
inline double act_grad(double z, double a_val, Activation a) {
  switch (a) {
    case Activation::Relu: return z > 0 ? 1.0 : 0.0;
    case Activation::Tanh: return 1.0 - a_val * a_val;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

}  // namespace

ForwardPass forward(const Mlp& net, std::span<const double> input) {
  if (static_cast<int>(input.size()) != net.input_size())
    throw std::invalid_argument("forward: input size mismatch");
  ForwardPass fp;
  fp.input.assign(input.begin(), input.end());
  fp.pre.resize(net.layers.size());
  fp.act.resize(net.layers.size());
  const std::vector<double>* prev = &fp.input;
  for (size_t l = 0; l < net.layers.size(); ++l) {
    const Layer& layer = net.layers[l];
    const Activation act =
        l + 1 == net.layers.size() ? net.output_activation : Activation::Relu;
    auto& z = fp.pre[l];
    auto& a = fp.act[l];
    z.resize(layer.out);
    a.resize(layer.out);
    for (int o = 0; o < layer.out; ++o) {
      double s = layer.b[o];
      const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) s += wrow[i] * (*prev)[i];
      z[o] = s;
      a[o] = apply_act(s, act);
    }
    prev = &a;
  }
  return fp;
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients g;
  g.w.resize(net.layers.size());
  g.b.resize(net.layers.size());
  for (size_t l = 0; l < net.layers.size(); ++l) {
    g.w[l].assign(net.layers[l].w.size(), 0.0);
    g.b[l].assign(net.layers[l].b.size(), 0.0);
  }
  g.input.assign(net.input_size(), 0.0);
  return g;
}

void Gradients::accumulate(const Gradients& other) {
  for (size_t l = 0; l < w.size(); ++l) {
    for (size_t i = 0; i < w[l].size(); ++i) w[l][i] += other.w[l][i];
    for (size_t i = 0; i < b[l].size(); ++i) b[l][i] += other.b[l][i];
  }
  for (size_t i = 0; i < input.size(); ++i) input[i] += other.input[i];
}

void Gradients::scale(double s) {
  for (auto& lw : w)
    for (auto& v : lw) v *= s;
  for (auto& lb : b)
    for (auto& v : lb) v *= s;
  for (auto& v : input) v *= s;
}

Gradients backward(const Mlp& net, const ForwardPass& cache, std::span<const double> dl_dout) {
  if (cache.act.size() != net.layers.size())
    throw std::invalid_argument("backward: stale or missing forward cache");
  if (static_cast<int>(dl_dout.size()) != net.output_size())
    throw std::invalid_argument("backward: upstream gradient size mismatch");

  Gradients g = Gradients::zeros_like(net);
  std::vector<double> delta(dl_dout.begin(), dl_dout.end());
  for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
    const Layer& layer = net.layers[l];
    const Activation act =
        l + 1 == static_cast<int>(net.layers.size()) ? net.output_activation : Activation::Relu;
    // delta currently holds dL/da for this layer; fold in activation gradient
    for (int o = 0; o < layer.out; ++o)
      delta[o] *= act_grad(cache.pre[l][o], cache.act[l][o], act);

    const std::vector<double>& below = l == 0 ? cache.input : cache.act[l - 1];
    for (int o = 0; o < layer.out; ++o) {
      double* gw = g.w[l].data() + static_cast<size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) gw[i] = delta[o] * below[i];
      g.b[l][o] = delta[o];
    }
    std::vector<double> next(layer.in, 0.0);
    for (int o = 0; o < layer.out; ++o) {
      const double* wrow = layer.w.data() + static_cast<size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) next[i] += wrow[i] * delta[o];
    }
    delta = std::move(next);
  }
  g.input = std::move(delta);
  return g;
}

AdamState AdamState::zeros_like(const Mlp& net) {
  AdamState s;
  s.mw.resize(net.layers.size());
  s.vw.resize(net.layers.size());
  s.mb.resize(net.layers.size());
  s.vb.resize(net.layers.size());
  for (size_t l = 0; l < net.layers.size(); ++l) {
    s.mw[l].assign(net.layers[l].w.size(), 0.0);
    s.vw[l].assign(net.layers[l].w.size(), 0.0);
    s.mb[l].assign(net.layers[l].b.size(), 0.0);
    s.vb[l].assign(net.layers[l].b.size(), 0.0);
  }
  return s;
}

namespace {

void adam_apply(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                std::vector<double>& v, const AdamState& s, double lr, double bc1, double bc2) {
  for (size_t i = 0; i < p.size(); ++i) {
    m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g[i];
    v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g[i] * g[i];
    const double mhat = m[i] / bc1;
    const double vhat = v[i] / bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + s.eps);
  }
}

}  // namespace

void adam_update(Mlp& net, const Gradients& grads, AdamState& state, double lr) {
  if (grads.w.size() != net.layers.size())
    throw std::invalid_argument("adam_update: gradient shape mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (size_t l = 0; l < net.layers.size(); ++l) {
    adam_apply(net.layers[l].w, grads.w[l], state.mw[l], state.vw[l], state, lr, bc1, bc2);
    adam_apply(net.layers[l].b, grads.b[l], state.mb[l], state.vb[l], state, lr, bc1, bc2);
  }
}

void soft_update(Mlp& target, const Mlp& eval, double tau) {
  if (target.layers.size() != eval.layers.size())
    throw std::invalid_argument("soft_update: network shapes differ");
  for (size_t l = 0; l < target.layers.size(); ++l) {
    auto& t = target.layers[l];
    const auto& e = eval.layers[l];
    for (size_t i = 0; i < t.w.size(); ++i) t.w[i] = tau * e.w[i] + (1.0 - tau) * t.w[i];
    for (size_t i = 0; i < t.b.size(); ++i) t.b[i] = tau * e.b[i] + (1.0 - tau) * t.b[i];
  }
}

}  // namespace slicesim
