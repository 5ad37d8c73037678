#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "slicesim/mlp.hpp"

using namespace slicesim;

namespace {

// scalar probe loss: L = sum_i coeff_i * out_i
double probe_loss(const Mlp& net, const std::vector<double>& input,
                  const std::vector<double>& coeff) {
  const auto out = forward(net, input).output();
  double l = 0;
  for (size_t i = 0; i < out.size(); ++i) l += coeff[i] * out[i];
  return l;
}

double relative_error(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-10});
  return std::abs(a - b) / scale;
}

// central finite differences over every parameter of the net
void check_gradients_fd(Mlp net, const std::vector<double>& input,
                        const std::vector<double>& coeff, double h, double tol) {
  const ForwardPass fp = forward(net, input);
  const Gradients g = backward(net, fp, coeff);
  for (size_t l = 0; l < net.layers.size(); ++l) {
    for (size_t i = 0; i < net.layers[l].w.size(); ++i) {
      const double saved = net.layers[l].w[i];
      net.layers[l].w[i] = saved + h;
      const double up = probe_loss(net, input, coeff);
      net.layers[l].w[i] = saved - h;
      const double down = probe_loss(net, input, coeff);
      net.layers[l].w[i] = saved;
      const double fd = (up - down) / (2 * h);
      if (std::abs(fd) < 1e-12 && std::abs(g.w[l][i]) < 1e-12) continue;
      CHECK(relative_error(fd, g.w[l][i]) < tol);
    }
    for (size_t i = 0; i < net.layers[l].b.size(); ++i) {
      const double saved = net.layers[l].b[i];
      net.layers[l].b[i] = saved + h;
      const double up = probe_loss(net, input, coeff);
      net.layers[l].b[i] = saved - h;
      const double down = probe_loss(net, input, coeff);
      net.layers[l].b[i] = saved;
      const double fd = (up - down) / (2 * h);
      if (std::abs(fd) < 1e-12 && std::abs(g.b[l][i]) < 1e-12) continue;
      CHECK(relative_error(fd, g.b[l][i]) < tol);
    }
  }
}

}  // namespace

TEST_CASE("forward basics") {
  Rng rng(1);
  SUBCASE("zero weights and biases give zero output through identity head") {
    Mlp net = Mlp::make({3, 4, 2}, Activation::Identity, rng);
    for (auto& l : net.layers) {
      std::fill(l.w.begin(), l.w.end(), 0.0);
      std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    const std::vector<double> in{1.0, -2.0, 3.0};
    CHECK(forward(net, in).output() == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("tanh head stays inside the unit box") {
    Mlp net = Mlp::make({3, 8, 4}, Activation::Tanh, rng);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    for (int t = 0; t < 200; ++t) {
      std::vector<double> in{u(rng), u(rng), u(rng)};
      // saturation can reach exactly +-1.0 in doubles
      for (double v : forward(net, in).output()) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
      }
    }
  }
  SUBCASE("matches a plain re-evaluation") {
    Mlp net = Mlp::make({2, 3, 2}, Activation::Identity, rng);
    const std::vector<double> in{0.7, -1.3};
    // straight-line recomputation
    std::vector<double> h(3);
    for (int o = 0; o < 3; ++o) {
      double s = net.layers[0].b[o];
      for (int i = 0; i < 2; ++i) s += net.layers[0].w[o * 2 + i] * in[i];
      h[o] = std::max(0.0, s);
    }
    std::vector<double> want(2);
    for (int o = 0; o < 2; ++o) {
      double s = net.layers[1].b[o];
      for (int i = 0; i < 3; ++i) s += net.layers[1].w[o * 3 + i] * h[i];
      want[o] = s;
    }
    const auto got = forward(net, in).output();
    CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-15));
    CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-15));
  }
  SUBCASE("input size mismatch throws") {
    Mlp net = Mlp::make({3, 2}, Activation::Identity, rng);
    CHECK_THROWS_AS(forward(net, std::vector<double>{1.0}), std::invalid_argument);
  }
}

TEST_CASE("backward matches finite differences on a 4-8-4-2 net") {
  Rng rng(42);
  const std::vector<double> input{0.3, -0.7, 1.1, 0.25};
  const std::vector<double> coeff{0.8, -1.2};
  SUBCASE("identity head (critic style)") {
    Mlp net = Mlp::make({4, 8, 4, 2}, Activation::Identity, rng);
    check_gradients_fd(net, input, coeff, 1e-5, 1e-4);
  }
  SUBCASE("tanh head (actor style)") {
    Mlp net = Mlp::make({4, 8, 4, 2}, Activation::Tanh, rng);
    check_gradients_fd(net, input, coeff, 1e-5, 1e-4);
  }
  SUBCASE("input gradient matches finite differences") {
    Mlp net = Mlp::make({4, 8, 4, 2}, Activation::Tanh, rng);
    const ForwardPass fp = forward(net, input);
    const Gradients g = backward(net, fp, coeff);
    for (size_t i = 0; i < input.size(); ++i) {
      auto perturbed = input;
      perturbed[i] += 1e-5;
      const double up = probe_loss(net, perturbed, coeff);
      perturbed[i] -= 2e-5;
      const double down = probe_loss(net, perturbed, coeff);
      const double fd = (up - down) / 2e-5;
      CHECK(relative_error(fd, g.input[i]) < 1e-4);
    }
  }
}

TEST_CASE("backward edge cases") {
  Rng rng(7);
  SUBCASE("zero upstream gradient gives zero parameter gradients") {
    Mlp net = Mlp::make({3, 5, 2}, Activation::Tanh, rng);
    const std::vector<double> in{0.1, 0.2, 0.3};
    const auto fp = forward(net, in);
    const auto g = backward(net, fp, std::vector<double>{0.0, 0.0});
    for (const auto& lw : g.w)
      for (double v : lw) CHECK(v == 0.0);
    for (const auto& lb : g.b)
      for (double v : lb) CHECK(v == 0.0);
  }
  SUBCASE("single identity layer: bias gradient equals upstream") {
    Mlp net = Mlp::make({2, 2}, Activation::Identity, rng);
    const std::vector<double> in{0.5, -0.5};
    const auto fp = forward(net, in);
    const auto g = backward(net, fp, std::vector<double>{3.0, -4.0});
    CHECK(g.b[0][0] == 3.0);
    CHECK(g.b[0][1] == -4.0);
  }
  SUBCASE("upstream size mismatch throws") {
    Mlp net = Mlp::make({2, 2}, Activation::Identity, rng);
    const auto fp = forward(net, std::vector<double>{1.0, 1.0});
    CHECK_THROWS_AS(backward(net, fp, std::vector<double>{1.0}), std::invalid_argument);
  }
}

TEST_CASE("adam_update") {
  Rng rng(3);
  SUBCASE("zero gradient from a fresh state leaves parameters alone") {
    Mlp net = Mlp::make({2, 3, 1}, Activation::Identity, rng);
    const Mlp before = net;
    AdamState state = AdamState::zeros_like(net);
    adam_update(net, Gradients::zeros_like(net), state, 0.01);
    for (size_t l = 0; l < net.layers.size(); ++l) {
      CHECK(net.layers[l].w == before.layers[l].w);
      CHECK(net.layers[l].b == before.layers[l].b);
    }
  }
  SUBCASE("constant gradient: step magnitude approaches lr") {
    Mlp net = Mlp::make({1, 1}, Activation::Identity, rng);
    AdamState state = AdamState::zeros_like(net);
    Gradients g = Gradients::zeros_like(net);
    g.w[0][0] = 0.37;  // any constant
    double prev = net.layers[0].w[0];
    double step = 0;
    for (int i = 0; i < 500; ++i) {
      adam_update(net, g, state, 1e-3);
      step = prev - net.layers[0].w[0];
      prev = net.layers[0].w[0];
    }
    CHECK(step == doctest::Approx(1e-3).epsilon(1e-3));
  }
  SUBCASE("two identical runs are bit-identical") {
    Rng rng_a(9), rng_b(9);
    Mlp a = Mlp::make({3, 4, 2}, Activation::Identity, rng_a);
    Mlp b = Mlp::make({3, 4, 2}, Activation::Identity, rng_b);
    AdamState sa = AdamState::zeros_like(a), sb = AdamState::zeros_like(b);
    const std::vector<double> in{0.1, -0.4, 0.9};
    for (int i = 0; i < 25; ++i) {
      const auto fa = forward(a, in);
      const auto fb = forward(b, in);
      const auto ga = backward(a, fa, std::vector<double>{1.0, -1.0});
      const auto gb = backward(b, fb, std::vector<double>{1.0, -1.0});
      adam_update(a, ga, sa, 1e-3);
      adam_update(b, gb, sb, 1e-3);
    }
    for (size_t l = 0; l < a.layers.size(); ++l) CHECK(a.layers[l].w == b.layers[l].w);
  }
}

TEST_CASE("soft_update") {
  Rng rng(4);
  Mlp eval = Mlp::make({2, 3, 1}, Activation::Identity, rng);
  Mlp target = Mlp::make({2, 3, 1}, Activation::Identity, rng);

  SUBCASE("tau = 1 copies, tau = 0 freezes") {
    Mlp t1 = target;
    soft_update(t1, eval, 1.0);
    for (size_t l = 0; l < eval.layers.size(); ++l) CHECK(t1.layers[l].w == eval.layers[l].w);
    Mlp t0 = target;
    soft_update(t0, eval, 0.0);
    for (size_t l = 0; l < eval.layers.size(); ++l) CHECK(t0.layers[l].w == target.layers[l].w);
  }
  SUBCASE("midpoint arithmetic") {
    Mlp t = target;
    for (auto& l : t.layers) {
      std::fill(l.w.begin(), l.w.end(), 0.0);
      std::fill(l.b.begin(), l.b.end(), 0.0);
    }
    Mlp e = eval;
    for (auto& l : e.layers) {
      std::fill(l.w.begin(), l.w.end(), 2.0);
      std::fill(l.b.begin(), l.b.end(), 2.0);
    }
    soft_update(t, e, 0.5);
    for (const auto& l : t.layers)
      for (double v : l.w) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("contraction toward eval weights") {
    const double tau = 0.3;
    Mlp t = target;
    const double before = std::abs(t.layers[0].w[0] - eval.layers[0].w[0]);
    soft_update(t, eval, tau);
    const double after = std::abs(t.layers[0].w[0] - eval.layers[0].w[0]);
    CHECK(after == doctest::Approx((1 - tau) * before).epsilon(1e-12));
  }
}
