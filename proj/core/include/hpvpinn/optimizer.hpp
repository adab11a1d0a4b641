#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hpvpinn/loss.hpp"
#include "hpvpinn/network.hpp"

namespace hpvpinn {

struct AdamState {
  ParamVector m;
  ParamVector v;
  long long step = 0;

  static AdamState zeros(Eigen::Index n) { return {ParamVector::Zero(n), ParamVector::Zero(n), 0}; }
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

/// One bias-corrected Adam update in place. Throws NonFiniteError("gradient") on NaN/Inf.
void adam_step(ParamVector& params, const ParamVector& grad, AdamState& state, double learning_rate);

struct TrainConfig {
  double learning_rate = 1e-3;
  long long iterations = 1000;
  std::uint64_t seed = 0;
  long long report_every = 100;
  /// Named physical scalars appended after the network weights, with initial values.
  std::vector<std::pair<std::string, double>> trainable_physical;

  void validate() const;
};

struct TraceEntry {
  long long iteration = 0;
  LossBreakdown loss;
  std::vector<double> physical;
  double wall_seconds = 0.0;
};

struct TrainingTrace {
  std::vector<std::string> physical_names;
  std::vector<TraceEntry> entries;
  bool failed = false;
  std::string failure;  ///< diagnostic when failed
};

struct TrainResult {
  ParamVector params;
  TrainingTrace trace;
};

/// Called with each trace entry as it is recorded, plus the parameters at that iteration.
using TraceObserver = std::function<void(const TraceEntry&, const ParamVector&)>;

/// Full-batch Adam on `objective` from `initial`. Entries are recorded at iteration 0,
/// every `report_every` iterations and at the last iteration. A non-finite loss stops
/// training; the result then holds the last finite parameters and a trace flagged failed.
TrainResult train(const Objective& objective, ParamVector initial, const TrainConfig& config,
                  const TraceObserver& observer = {});

/// Mean total loss over the first and last `fraction` of the trace entries.
std::pair<double, double> window_means(const TrainingTrace& trace, double fraction = 0.1);

}  // namespace hpvpinn
