#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hpvpinn/loss.hpp"
#include "hpvpinn/optimizer.hpp"
#include "hpvpinn/problems.hpp"

namespace hpvpinn::runner {

/// The config text does not parse, names an unknown key, or holds an invalid value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Method { vpinn, pinn };

/// Keeps the large per-iteration jet buffers on the heap rather than in fresh mmap pages
/// (glibc only; a no-op elsewhere). Call once at program start.
void tune_allocator();

/// Every setting of one training run, after problem defaults have been filled in.
struct RunConfig {
  std::string problem;
  std::uint64_t seed = 0;

  int depth = 4;
  int width = 20;
  Activation activation = Activation::tanh;

  std::vector<double> mesh_x;
  std::vector<double> mesh_y;
  bool lshape_fine = true;

  BasisKind basis = BasisKind::compact_poisson;
  int test_x = 60;
  int test_y = 0;

  QuadratureFamily quadrature = QuadratureFamily::gauss_lobatto;
  int quad_x = 80;
  int quad_y = 0;

  Method method = Method::vpinn;
  VariationalForm form = VariationalForm::R1;

  PenaltyWeights weights;
  int n_b = 0;
  int n_0 = 0;
  int n_r = 500;

  double learning_rate = 1e-3;
  long long iterations = 20000;
  long long report_every = 100;

  std::vector<double> sensors;
  int per_sensor = 0;
  std::uint64_t observation_seed = 0;
  double kappa_initial = 1.0;

  int reference_nx = 2001;
  int reference_nt = 4001;

  int eval_points_1d = 1001;
  int eval_points_2d = 101;
  int spectrum_samples = 1024;
};

/// Problem defaults for `name` (throws UnknownProblemError).
RunConfig default_config(const std::string& name);

/// Resolves a config document: problem defaults first, then every key the document sets.
/// Overrides, when given, replace the problem name / seed of the document.
RunConfig resolve_config(const nlohmann::json& doc, const std::optional<std::string>& problem_override = {},
                         const std::optional<std::uint64_t>& seed_override = {});

/// Reads and resolves a config file. Throws ConfigError when it cannot be parsed.
RunConfig load_config(const std::filesystem::path& path, const std::optional<std::string>& problem_override = {},
                      const std::optional<std::uint64_t>& seed_override = {});

/// The fully resolved config in the input schema, so it can be fed back to resolve_config.
nlohmann::json to_json(const RunConfig& config);

/// Sets `section.key` in a config document from text (JSON scalar, or bare string).
void set_key(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

/// Objective, starting point, and error-evaluation data for one configured run.
struct Experiment {
  RunConfig config;
  ProblemSpec spec;  ///< with `reference` attached where one is needed
  std::unique_ptr<Objective> objective;
  ParamVector initial;
  std::vector<Observation> observations;
};

Experiment build_experiment(const RunConfig& config);

/// Network samples and reference values on the evaluation grid.
struct Evaluation {
  int dim = 1;
  Eigen::MatrixXd points;      ///< dim x n
  Eigen::RowVectorXd predicted;
  Eigen::RowVectorXd reference;
  double linf = 0.0;
  double h1_seminorm = 0.0;   ///< NaN when the reference has no derivatives
};

Evaluation evaluate_solution(const Experiment& experiment, const ParamVector& params);

struct RunResult {
  ParamVector params;
  TrainingTrace trace;
  Evaluation evaluation;
  std::vector<double> physical;  ///< final trainable physical values
};

/// Trains the experiment. When `out` is given, writes run_manifest.json, trace.csv,
/// timing.csv, checkpoint.json, solution.csv, metrics.json and (1D) spectrum.csv there.
RunResult run(const RunConfig& config, const std::optional<std::filesystem::path>& out = {});

/// One axis of a sweep: `section.key` and the values it takes.
struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

SweepAxis parse_axis(const std::string& spec);  ///< "section.key=v1,v2,..."

struct SweepCell {
  std::vector<std::string> values;  ///< one per axis
  std::vector<double> linf;         ///< one per seed
  std::vector<double> h1;
  int failed = 0;
};

/// Cross product of the axes, each cell run once per seed in a pool of `jobs` workers.
/// Every run writes into out/<cell>/seed_<s>/; summary.csv is written to `out`.
std::vector<SweepCell> sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes,
                             const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out, int jobs = 1);

}  // namespace hpvpinn::runner
