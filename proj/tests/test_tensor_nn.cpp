#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "aenet/errors.hpp"
#include "aenet/rng.hpp"
#include "aenet/tensor_nn.hpp"

using namespace aenet;
using Md = Matrix<double>;
using Vd = Vector<double>;

namespace {

Mlp<double> single_layer(double w, double b) {
  Md W(1, 1);
  W << w;
  Vd bias(1);
  bias << b;
  return Mlp<double>({DenseLayer<double>{W, bias}});
}

Md random_matrix(Rng& rng, Index r, Index c) {
  std::normal_distribution<double> n(0, 1);
  Md m(r, c);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

}  // namespace

TEST_CASE("initialization") {
  auto a = Mlp<double>::he_uniform({3, 1}, 17);
  auto b = Mlp<double>::he_uniform({3, 1}, 17);
  CHECK(a == b);
  CHECK(!(a == Mlp<double>::he_uniform({3, 1}, 18)));

  auto enc = Mlp<float>::he_uniform({512, 500, 500, 500, 500, 2}, 1);
  CHECK(enc.depth() == 5);
  CHECK(enc.dims() == std::vector<int>{512, 500, 500, 500, 500, 2});
  const double bound = std::sqrt(6.0 / 512.0);
  CHECK(enc.layers()[0].weight.cwiseAbs().maxCoeff() <= bound);
  CHECK(enc.layers()[0].bias.isZero());

  CHECK_THROWS_AS(Mlp<double>::he_uniform({}, 0), ConfigError);
  CHECK_THROWS_AS(Mlp<double>::he_uniform({4}, 0), ConfigError);
  CHECK_THROWS_AS(Mlp<double>::he_uniform({4, 0, 1}, 0), ConfigError);
}

TEST_CASE("forward examples") {
  auto id = Mlp<double>::he_uniform({2, 2}, 0);
  id.set_layer(0, Md::Identity(2, 2), Vd::Zero(2));
  Vd x(2);
  x << 0.5, 3.0;
  CHECK(id.forward_one(x) == x);

  auto zero = Mlp<double>::he_uniform({3, 4, 2}, 0);
  zero.set_layer(0, Md::Zero(4, 3), Vd::Zero(4));
  Vd last_bias(2);
  last_bias << 1.5, -2.0;
  zero.set_layer(1, Md::Zero(2, 4), last_bias);
  CHECK(zero.forward_one(Vd::Ones(3)) == last_bias);

  Vd three(1);
  three << 3.0;
  CHECK(single_layer(2, 1).forward_one(three)(0) == 7.0);

  // ReLU(x) as a two-layer net.
  auto relu = Mlp<double>::he_uniform({1, 1, 1}, 0);
  relu.set_layer(0, Md::Ones(1, 1), Vd::Zero(1));
  relu.set_layer(1, Md::Ones(1, 1), Vd::Zero(1));
  Vd minus(1);
  minus << -1.0;
  CHECK(relu.forward_one(minus)(0) == 0.0);

  CHECK_THROWS_AS(relu.forward(Md::Zero(2, 3)), DimensionError);
}

TEST_CASE("positive homogeneity with zero biases") {
  Rng rng(2);
  auto net = Mlp<double>::he_uniform({5, 7, 7, 3}, 3);
  Md x = random_matrix(rng, 10, 5);
  for (double alpha : {0.1, 2.0, 37.5}) {
    Md lhs = net.forward(x * alpha);
    Md rhs = net.forward(x) * alpha;
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * (1 + rhs.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("loss examples") {
  auto net = single_layer(2, 0);
  Md x = Md::Ones(1, 1);
  Md y = Md::Zero(1, 1);
  auto r = mse_and_grad(net, x, y);
  CHECK(r.loss == 4.0);
  CHECK(r.grads.layers[0].weight(0, 0) == 4.0);

  Md pred = net.forward(x);
  auto same = mse_and_grad(net, x, pred);
  CHECK(same.loss == 0.0);
  CHECK(same.grads.layers[0].weight.isZero());
  CHECK(same.grads.layers[0].bias.isZero());

  CHECK_THROWS_AS(mse_and_grad(net, Md(0, 1), Md(0, 1)), ConfigError);
}

TEST_CASE("uniform coordinate weights scale the loss exactly") {
  Rng rng(8);
  Md p = random_matrix(rng, 6, 4), t = random_matrix(rng, 6, 4);
  const double w = 0.25;  // power of two keeps the product exact
  std::vector<double> weights(4, w);
  CHECK(weighted_mse<double>(p, t, weights, nullptr) ==
        w * weighted_mse<double>(p, t, {}, nullptr));
}

TEST_CASE("analytic gradients match central differences") {
  Rng rng(123);
  std::uniform_int_distribution<int> width(1, 8), depth(1, 3);
  const double h = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> dims{width(rng)};
    const int layers = depth(rng);
    for (int l = 0; l < layers; ++l) dims.push_back(width(rng));
    auto net = Mlp<double>::he_uniform(std::span<const int>(dims), 1000 + trial);
    // Nonzero biases exercise their gradients too.
    for (std::size_t l = 0; l < net.depth(); ++l) {
      const auto& L = net.layers()[l];
      net.set_layer(l, L.weight, random_matrix(rng, L.bias.size(), 1).col(0) * 0.1);
    }
    Md x = random_matrix(rng, 5, dims.front());
    Md y = random_matrix(rng, 5, dims.back());
    std::vector<double> w(static_cast<std::size_t>(dims.back()));
    std::uniform_real_distribution<double> pos(0.5, 2.0);
    for (auto& v : w) v = pos(rng);

    auto analytic = mse_and_grad(net, x, y, w);
    auto grads = gradient_blocks(analytic.grads);
    auto params = net.parameter_blocks();
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t i = 0; i < params[b].size(); ++i) {
        const double orig = params[b][i];
        params[b][i] = orig + h;
        const double up = weighted_mse<double>(net.forward(x), y, w, nullptr);
        params[b][i] = orig - h;
        const double down = weighted_mse<double>(net.forward(x), y, w, nullptr);
        params[b][i] = orig;
        const double fd = (up - down) / (2 * h);
        const double g = grads[b][i];
        CHECK(std::abs(g - fd) <= std::max(1e-8, 1e-5 * std::max(std::abs(g), std::abs(fd))));
        ++checked;
      }
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("adam examples") {
  std::vector<double> w{1.0};
  std::vector<double> g{2.0};
  std::vector<std::span<double>> p{std::span<double>(w)};
  std::vector<std::span<const double>> gr{std::span<const double>(g)};
  AdamState<double> state;
  adam_step<double>(p, gr, state, 1e-3);
  // m_hat = 2, v_hat = 4: the step is lr * 2 / (2 + eps).
  CHECK(w[0] == doctest::Approx(1.0 - 1e-3 * 2.0 / (2.0 + 1e-8)).epsilon(1e-14));
  CHECK(state.step == 1);
  const double after_one = w[0];
  adam_step<double>(p, gr, state, 1e-3);
  CHECK(w[0] < after_one);

  std::vector<double> z{0.0};
  std::vector<double> w2{3.0};
  std::vector<std::span<double>> p2{std::span<double>(w2)};
  std::vector<std::span<const double>> g2{std::span<const double>(z)};
  AdamState<double> s2;
  adam_step<double>(p2, g2, s2, 1e-3);
  CHECK(w2[0] == 3.0);
  CHECK(s2.step == 1);
}

TEST_CASE("training") {
  Rng rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Md x(100, 1);
  for (Index i = 0; i < 100; ++i) x(i, 0) = u(rng);
  Md y = 2.0 * x;

  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.batch_size = 16;
  cfg.seed = 5;

  SUBCASE("fit y = 2x") {
    auto net = Mlp<double>::he_uniform({1, 16, 1}, 2);
    auto hist = train(net, x, y, cfg);
    CHECK(hist.size() == 300);
    CHECK(weighted_mse<double>(net.forward(x), y, {}, nullptr) < 1e-3);
  }
  SUBCASE("zero epochs leave the net unchanged") {
    auto net = Mlp<double>::he_uniform({1, 16, 1}, 2);
    const auto before = net;
    cfg.epochs = 0;
    CHECK(train(net, x, y, cfg).empty());
    CHECK(net == before);
  }
  SUBCASE("same seed gives identical history and parameters") {
    auto a = Mlp<float>::he_uniform({1, 8, 1}, 4);
    auto b = a;
    cfg.epochs = 20;
    Matrix<float> xf = x.cast<float>(), yf = y.cast<float>();
    CHECK(train(a, xf, yf, cfg) == train(b, xf, yf, cfg));
    CHECK(a == b);
  }
  SUBCASE("linear least squares is eventually nonincreasing") {
    auto net = Mlp<double>::he_uniform({1, 1}, 3);
    Md noisy = y + 0.1 * random_matrix(rng, 100, 1);
    cfg.epochs = 400;
    cfg.batch_size = 100;
    cfg.learning_rate = 1e-2;
    auto hist = train(net, x, noisy, cfg);
    for (std::size_t e = 300; e < hist.size(); ++e) CHECK(hist[e] <= hist[e - 1] + 1e-12);
  }
  SUBCASE("divergence names the epoch") {
    auto net = Mlp<double>::he_uniform({1, 4, 1}, 1);
    Md bad = y;
    bad(7, 0) = std::numeric_limits<double>::infinity();
    cfg.epochs = 2;
    try {
      train(net, x, bad, cfg);
      FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
      CHECK(std::string(e.what()).find("epoch 0") != std::string::npos);
    }
  }
  SUBCASE("invalid configs") {
    auto net = Mlp<double>::he_uniform({1, 1}, 3);
    cfg.learning_rate = 0;
    CHECK_THROWS_AS(train(net, x, y, cfg), ConfigError);
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 0;
    CHECK_THROWS_AS(train(net, x, y, cfg), ConfigError);
  }
}

TEST_CASE("network class stats") {
  auto net = Mlp<double>::he_uniform({2, 3, 1}, 9);
  Md W1(3, 2);
  W1 << 1, -2, 3, 4, 5, 6;
  Vd b1(3);
  b1 << 1, 1, 1;
  Md W2(1, 3);
  W2 << 1, 1, -7;
  Vd b2(1);
  b2 << 0.5;
  net.set_layer(0, W1, b1);
  net.set_layer(1, W2, b2);
  Md probes = Md::Zero(1, 2);
  auto s = network_class_stats(net, probes);
  CHECK(s.depth == 2);
  CHECK(s.width == 3);
  CHECK(s.nonzeros == 13);
  CHECK(s.max_abs_param == 7.0);
  CHECK(s.sup_output == doctest::Approx(std::abs(1 + 1 - 7 + 0.5)));
  CHECK(s.nonzeros <= net.parameter_count());

  net.set_layer(0, Md::Zero(3, 2), Vd::Zero(3));
  net.set_layer(1, Md::Zero(1, 3), Vd::Zero(1));
  auto z = network_class_stats(net, probes);
  CHECK(z.nonzeros == 0);
  CHECK(z.max_abs_param == 0.0);
  CHECK(z.sup_output == 0.0);
}

TEST_CASE("checkpoints round-trip") {
  auto f = Mlp<float>::he_uniform({7, 5, 3}, 2);
  std::stringstream ss;
  write_checkpoint(ss, f);
  CHECK(read_checkpoint<float>(ss) == f);

  auto d = Mlp<double>::he_uniform({4, 9, 9, 1}, 3);
  std::stringstream sd;
  write_checkpoint(sd, d);
  CHECK(read_checkpoint<double>(sd) == d);

  // Reading into another precision converts.
  std::stringstream other;
  write_checkpoint(other, d);
  CHECK(read_checkpoint<float>(other) == d.cast<float>());

  std::stringstream junk("not a checkpoint");
  CHECK_THROWS_AS(read_checkpoint<double>(junk), IoError);

  std::stringstream hist;
  const std::vector<double> h{1.5, 0.25};
  write_loss_history(hist, h);
  CHECK(hist.str() == "epoch,loss\n0,1.5\n1,0.25\n");
}
