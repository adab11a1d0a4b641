#include <doctest.h>

#include <array>
#include <random>

#include "hpvpinn/diffengine.hpp"
#include "hpvpinn/error.hpp"
#include "hpvpinn/network.hpp"

using namespace hpvpinn;

TEST_CASE("parameter counts of typical network shapes") {
  const Mlp net = init_mlp({1, 20, 20, 20, 20, 1}, Activation::sine, 7);
  CHECK(net.hidden_layers() == 4);
  CHECK(net.affine_layers() == 5);
  CHECK(net.parameter_count() == 20 * 1 + 20 + 3 * (20 * 20 + 20) + 20 + 1);
  const Mlp net2 = init_mlp(uniform_layers(2, 3, 5), Activation::tanh, 1);
  CHECK(net2.layer_sizes() == std::vector<int>{2, 5, 5, 5, 1});
  CHECK(net2.input_dim() == 2);
}

TEST_CASE("initialization is deterministic and glorot bounded") {
  const Mlp a = init_mlp({1, 20, 20, 1}, Activation::tanh, 42);
  const Mlp b = init_mlp({1, 20, 20, 1}, Activation::tanh, 42);
  const Mlp c = init_mlp({1, 20, 20, 1}, Activation::tanh, 43);
  CHECK(a.pack() == b.pack());
  CHECK(a.pack() != c.pack());
  for (int l = 0; l < a.affine_layers(); ++l) {
    const double bound = std::sqrt(6.0 / (a.weight(l).rows() + a.weight(l).cols()));
    CHECK(a.weight(l).cwiseAbs().maxCoeff() <= bound);
    CHECK(a.bias(l).isZero());
  }
}

TEST_CASE("invalid shapes are rejected") {
  CHECK_THROWS_AS(init_mlp({1, 1}, Activation::tanh, 0), ContractViolation);
  CHECK_THROWS_AS(init_mlp({1, 5, 2}, Activation::tanh, 0), ContractViolation);
  CHECK_THROWS_AS(init_mlp({1, 0, 1}, Activation::tanh, 0), ContractViolation);
  const Mlp net = init_mlp({2, 3, 1}, Activation::tanh, 0);
  CHECK_THROWS_AS(forward(net, std::array{0.1}), ContractViolation);
}

TEST_CASE("pack and unpack are inverse") {
  Mlp net = init_mlp({2, 4, 3, 1}, Activation::sine, 3);
  const ParamVector p = net.pack();
  CHECK(static_cast<std::size_t>(p.size()) == net.parameter_count());
  // row-major W_1 first
  CHECK(p(1) == net.weight(0)(0, 1));
  CHECK(p(2) == net.weight(0)(1, 0));
  ParamVector q = ParamVector::LinSpaced(p.size(), -1.0, 1.0);
  net.unpack(q);
  CHECK(net.pack() == q);
  CHECK_THROWS_AS(net.unpack(ParamVector::Zero(3)), ContractViolation);
}

TEST_CASE("zero network and identity chain") {
  const Mlp zero({1, 5, 1}, Activation::tanh);
  CHECK(forward(zero, std::array{0.37}) == 0.0);
  Mlp ident({1, 1, 1}, Activation::tanh);
  ident.weight(0)(0, 0) = 1.0;
  ident.weight(1)(0, 0) = 1.0;
  CHECK(forward(ident, std::array{0.0}) == 0.0);
  CHECK(forward(ident, std::array{0.5}) == doctest::Approx(std::tanh(0.5)).epsilon(1e-15));
}

TEST_CASE("forward agrees with the jet value") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto act : {Activation::tanh, Activation::sine, Activation::relu}) {
    const Mlp net = init_mlp({2, 20, 20, 1}, act, 11);
    for (int i = 0; i < 100; ++i) {
      const std::array<double, 2> p{u(rng), u(rng)};
      CHECK(std::abs(forward(net, p) - evaluate_jet(net, p).value) <= 1e-14);
    }
  }
}

TEST_CASE("snapshot round trip") {
  const Mlp net = init_mlp({2, 5, 5, 1}, Activation::sine, 9);
  const std::vector<double> physical{0.25};
  const std::vector<std::string> names{"kappa"};
  const Snapshot s = from_snapshot(to_snapshot(net, physical, names));
  CHECK(s.net.layer_sizes() == net.layer_sizes());
  CHECK(s.net.activation() == Activation::sine);
  CHECK(s.net.pack() == net.pack());
  CHECK(s.physical == physical);
  CHECK(s.physical_names == names);
  CHECK_THROWS(from_snapshot("{\"sizes\": [1]}"));
}

TEST_CASE("relu reports no second derivative") {
  CHECK_FALSE(Mlp({1, 3, 1}, Activation::relu).supports_second_derivative());
  CHECK(Mlp({1, 3, 1}, Activation::tanh).supports_second_derivative());
  CHECK(parse_activation("sine") == Activation::sine);
  CHECK_THROWS(parse_activation("gelu"));
}
