#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>

#include "hpvpinn/error.hpp"
#include "hpvpinn/optimizer.hpp"
#include "test_support.hpp"

using namespace hpvpinn;

namespace {

Objective approx_objective() {
  const ScalarField target = [](std::span<const double> x) { return std::sin(std::numbers::pi * x[0]); };
  return Objective(Mlp({1, 8, 8, 1}, Activation::tanh),
                   vnn_terms(target, uniform_partition(-1, 1, 2), {BasisKind::legendre_raw, 6}, gauss_legendre(12)));
}

ParamVector initial_for(const Objective& obj, std::uint64_t seed) {
  const Mlp& s = obj.network_shape();
  ParamVector p = ParamVector::Zero(obj.parameter_count());
  p.head(s.parameter_count()) = init_mlp(s.layer_sizes(), s.activation(), seed).pack();
  return p;
}

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("first Adam step moves by the learning rate") {
  for (double g : {1.0, -3.0, 1e-4}) {
    ParamVector p(1);
    p << 0.5;
    AdamState s = AdamState::zeros(1);
    adam_step(p, ParamVector::Constant(1, g), s, 1e-3);
    CHECK(p(0) == doctest::Approx(0.5 - 1e-3 * g / (std::abs(g) + 1e-8)).epsilon(1e-12));
    CHECK(s.step == 1);
  }
}

TEST_CASE("zero gradient leaves parameters and decays moments") {
  ParamVector p(2);
  p << 1.0, -2.0;
  AdamState s = AdamState::zeros(2);
  s.m << 0.5, -0.5;
  s.v << 0.25, 0.04;
  s.step = 3;
  const ParamVector before = p;
  adam_step(p, ParamVector::Zero(2), s, 1e-3);
  // the update uses the decayed first moment, which is still nonzero
  CHECK(s.m(0) == doctest::Approx(0.45));
  CHECK(s.v(1) == doctest::Approx(0.04 * 0.999));
  AdamState fresh = AdamState::zeros(2);
  ParamVector q = before;
  for (int i = 0; i < 10; ++i) adam_step(q, ParamVector::Zero(2), fresh, 1e-2);
  CHECK(q == before);
  CHECK(fresh.m.isZero());
}

TEST_CASE("Adam minimizes a quadratic") {
  ParamVector c(3);
  c << 0.7, -1.3, 2.0;
  const Eigen::Vector3d scale(1.0, 10.0, 0.1);
  ParamVector p = ParamVector::Zero(3);
  AdamState s = AdamState::zeros(3);
  for (int i = 0; i < 5000; ++i) adam_step(p, 2.0 * scale.cwiseProduct(p - c), s, 1e-2);
  CHECK((p - c).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("non-finite gradients abort the step") {
  ParamVector p = ParamVector::Zero(2);
  AdamState s = AdamState::zeros(2);
  ParamVector g(2);
  g << 1.0, std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(adam_step(p, g, s, 1e-3), NonFiniteError);
  CHECK(p.isZero());
}

TEST_CASE("training trace") {
  const Objective obj = approx_objective();
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.iterations = 0;
  const auto none = train(obj, initial_for(obj, 1), cfg);
  REQUIRE(none.trace.entries.size() == 1);
  CHECK(none.trace.entries[0].iteration == 0);
  CHECK(none.params == initial_for(obj, 1));

  cfg.iterations = 1005;
  cfg.report_every = 100;
  int observed = 0;
  const auto r = train(obj, initial_for(obj, 1), cfg, [&](const TraceEntry&, const ParamVector&) { ++observed; });
  CHECK_FALSE(r.trace.failed);
  CHECK(r.trace.entries.size() == 12);
  CHECK(observed == 12);
  CHECK(r.trace.entries.back().iteration == 1005);
  for (std::size_t i = 1; i < r.trace.entries.size(); ++i)
    CHECK(r.trace.entries[i].wall_seconds >= r.trace.entries[i - 1].wall_seconds);
  const auto [first, last] = window_means(r.trace);
  CHECK(last < first);
  CHECK(r.trace.entries.back().loss.total == doctest::Approx(obj.evaluate(r.params).total).epsilon(1e-14));
}

TEST_CASE("training is bitwise deterministic") {
  const Objective obj = approx_objective();
  TrainConfig cfg;
  cfg.iterations = 300;
  cfg.report_every = 1;
  const auto a = train(obj, initial_for(obj, 7), cfg);
  const auto b = train(obj, initial_for(obj, 7), cfg);
  REQUIRE(a.trace.entries.size() == b.trace.entries.size());
  for (std::size_t i = 0; i < a.trace.entries.size(); ++i)
    CHECK(bitwise_equal(a.trace.entries[i].loss.total, b.trace.entries[i].loss.total));
  for (Eigen::Index i = 0; i < a.params.size(); ++i) CHECK(bitwise_equal(a.params(i), b.params(i)));
}

TEST_CASE("physical parameters are trained and traced") {
  const auto decomp = rectangular_partition(uniform_partition(0, 1, 2), uniform_partition(-1, 1, 2));
  LossTerms terms = ade_variational_terms(VariationalForm::R2, decomp, {BasisKind::compact_poisson, 3},
                                          {BasisKind::compact_poisson, 3}, gauss_legendre(6), gauss_legendre(6), 1.0,
                                          Coefficient::trainable(0));
  const ScalarField bump = [](std::span<const double> p) { return -std::sin(std::numbers::pi * p[1]); };
  terms.push_back(misfit_term(LossCategory::initial, Eigen::MatrixXd{{0, 0, 0}, {-0.5, 0.0, 0.5}}, bump, 10.0));
  const Objective obj(Mlp({2, 5, 5, 1}, Activation::tanh), std::move(terms), {"kappa"});
  ParamVector p0 = initial_for(obj, 3);
  p0(p0.size() - 1) = 1.0;
  TrainConfig cfg;
  cfg.iterations = 200;
  cfg.report_every = 50;
  const auto r = train(obj, p0, cfg);
  CHECK(r.trace.physical_names == std::vector<std::string>{"kappa"});
  REQUIRE(r.trace.entries.front().physical.size() == 1);
  CHECK(r.trace.entries.front().physical[0] == 1.0);
  CHECK(r.trace.entries.back().physical[0] != 1.0);
  CHECK(r.trace.entries.back().physical[0] == r.params(r.params.size() - 1));
}

TEST_CASE("non-finite losses stop training") {
  const ScalarField bad = [](std::span<const double> x) { return x[0] > 0 ? std::nan("") : 0.0; };
  LossTerms terms;
  terms.push_back(misfit_term(LossCategory::data, testing::row_points({-0.5, 0.5}), bad, 1.0));
  const Objective obj(Mlp({1, 3, 1}, Activation::tanh), std::move(terms));
  TrainConfig cfg;
  cfg.iterations = 10;
  const auto r = train(obj, initial_for(obj, 1), cfg);
  CHECK(r.trace.failed);
  CHECK(r.trace.failure.find("data") != std::string::npos);
  CHECK(r.params == initial_for(obj, 1));
}

TEST_CASE("configuration checks") {
  TrainConfig cfg;
  cfg.learning_rate = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg.learning_rate = 1e-3;
  cfg.iterations = -1;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg.iterations = 0;
  cfg.report_every = 0;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}
