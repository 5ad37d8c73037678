#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "slicesim/rng.hpp"

namespace slicesim {

enum class Activation { Relu, Tanh, Identity };

struct Layer {
  int in = 0;
  int out = 0;
  std::vector<double> w;  // row-major, out x in
  std::vector<double> b;  // out
};

// Fully connected net; hidden layers use the rectifier, the output layer uses
// tanh (actor) or identity (critic). Weights start uniform in
// [-1/sqrt(fan_in), 1/sqrt(fan_in)].
struct Mlp {
  std::vector<Layer> layers;
  Activation output_activation = Activation::Identity;

  static Mlp make(const std::vector<int>& sizes, Activation output, Rng& rng);
  int input_size() const { return layers.front().in; }
  int output_size() const { return layers.back().out; }
  std::size_t param_count() const;
};

// Activations cached by forward() for the backward pass.
struct ForwardPass {
  std::vector<double> input;
  std::vector<std::vector<double>> pre;  // z per layer
  std::vector<std::vector<double>> act;  // post-activation per layer
  const std::vector<double>& output() const& { return act.back(); }
  // value overload so output() of a temporary pass never dangles
  std::vector<double> output() && { return std::move(act.back()); }
};

ForwardPass forward(const Mlp& net, std::span<const double> input);

struct Gradients {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;
  std::vector<double> input;  // dL/dinput

  static Gradients zeros_like(const Mlp& net);
  void accumulate(const Gradients& other);
  void scale(double s);
};

// Exact reverse-mode gradients of sum(dl_dout . output) w.r.t. parameters and
// input.
Gradients backward(const Mlp& net, const ForwardPass& cache, std::span<const double> dl_dout);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<std::vector<double>> mw, vw, mb, vb;

  static AdamState zeros_like(const Mlp& net);
};

void adam_update(Mlp& net, const Gradients& grads, AdamState& state, double lr);

// theta_target <- tau*theta_eval + (1-tau)*theta_target
void soft_update(Mlp& target, const Mlp& eval, double tau);

}  // namespace slicesim
