#include "hpvpinn/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "hpvpinn/error.hpp"

namespace hpvpinn {

void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state, double learning_rate) {
  HPVPINN_EXPECTS(params.size() == grad.size(), "gradient size does not match the parameters");
  HPVPINN_EXPECTS(state.m.size() == params.size() && state.v.size() == params.size(),
                  "optimizer state size does not match the parameters");
  HPVPINN_EXPECTS(learning_rate > 0.0, "learning rate must be positive");
  if (!grad.allFinite()) throw NonFiniteError("gradient", "non-finite gradient passed to adam_step");
  ++state.step;
  state.m = kAdamBeta1 * state.m + (1.0 - kAdamBeta1) * grad;
  state.v = kAdamBeta2 * state.v + (1.0 - kAdamBeta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
  params.array() -= learning_rate * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + kAdamEpsilon);
}

void TrainConfig::validate() const {
  HPVPINN_EXPECTS(learning_rate > 0.0 && std::isfinite(learning_rate), "learning rate must be positive");
  HPVPINN_EXPECTS(iterations >= 0, "iteration count must be non-negative");
  HPVPINN_EXPECTS(report_every >= 1, "report_every must be at least 1");
}

TrainResult train(const Objective& objective, ParamVector initial, const TrainConfig& config,
                  const TraceObserver& observer) {
  config.validate();
  HPVPINN_EXPECTS(static_cast<std::size_t>(initial.size()) == objective.parameter_count(),
                  "initial parameters do not match the objective");
  const auto n_net = static_cast<Eigen::Index>(objective.network_parameter_count());
  const auto start = std::chrono::steady_clock::now();

  TrainResult result{std::move(initial), {}};
  result.trace.physical_names = objective.physical_names();
  AdamState state = AdamState::zeros(result.params.size());
  ParamVector grad;

  auto record = [&](long long it, const LossBreakdown& loss, const ParamVector& at) {
    TraceEntry e;
    e.iteration = it;
    e.loss = loss;
    e.physical.assign(at.data() + n_net, at.data() + at.size());
    e.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.trace.entries.push_back(e);
    if (observer) observer(result.trace.entries.back(), at);
  };

  for (long long it = 0;; ++it) {
    LossBreakdown loss;
    try {
      loss = objective.evaluate(result.params, &grad);
    } catch (const NonFiniteError& err) {
      result.trace.failed = true;
      result.trace.failure = "iteration " + std::to_string(it) + ": non-finite " + err.term();
      return result;
    }
    if (it == 0 || it == config.iterations || it % config.report_every == 0) record(it, loss, result.params);
    if (it == config.iterations) break;
    adam_step(result.params, grad, state, config.learning_rate);
  }
  return result;
}

std::pair<double, double> window_means(const TrainingTrace& trace, double fraction) {
  HPVPINN_EXPECTS(!trace.entries.empty(), "empty trace");
  HPVPINN_EXPECTS(fraction > 0.0 && fraction <= 1.0, "window fraction must be in (0, 1]");
  const auto n = trace.entries.size();
  const auto w = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n))));
  double first = 0.0, last = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    first += trace.entries[i].loss.total;
    last += trace.entries[n - 1 - i].loss.total;
  }
  return {first / static_cast<double>(w), last / static_cast<double>(w)};
}

}  // namespace hpvpinn
