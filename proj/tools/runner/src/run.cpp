#include <fstream>
#include <numbers>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "hpvpinn/oracle.hpp"
#include "hpvpinn/runner.hpp"

namespace hpvpinn::runner {

void tune_allocator() {
#if defined(__GLIBC__)
  constexpr int limit = 32 << 20;
  mallopt(M_MMAP_THRESHOLD, limit);
  mallopt(M_TRIM_THRESHOLD, 2 * limit);
  mallopt(M_TOP_PAD, limit);
#endif
}

namespace {

using nlohmann::json;

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os.precision(17);
  os << std::scientific;
  return os;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text << '\n';
}

json manifest(const Experiment& ex) {
  json j = to_json(ex.config);
  json m;
  m["kind"] = to_string(ex.spec.kind);
  m["parameter_count"] = ex.objective->parameter_count();
  m["physical"] = ex.objective->physical_names();
  if (ex.spec.dim == 1) {
    m["evaluation_grid"] = std::to_string(ex.config.eval_points_1d) + " uniform points on [" +
                           std::to_string(ex.spec.evaluation_range[0]) + ", " +
                           std::to_string(ex.spec.evaluation_range[1]) + "]";
  } else {
    m["evaluation_grid"] = std::to_string(ex.config.eval_points_2d) + " x " + std::to_string(ex.config.eval_points_2d) +
                           " uniform points on the bounding box, restricted to the domain";
  }
  m["reference"] = ex.spec.has_exact() ? "closed form" : "Crank-Nicolson finite differences";
  json obs = json::array();
  for (const auto& o : ex.observations) obs.push_back({o.point[0], o.point[1], o.value});
  m["observations"] = obs;
  j["manifest"] = m;
  return j;
}

void write_solution(const std::filesystem::path& dir, const Experiment& ex, const Evaluation& ev) {
  auto os = open_csv(dir / "solution.csv");
  const bool ade = ex.spec.kind == ProblemKind::ade_forward || ex.spec.kind == ProblemKind::ade_inverse;
  if (ev.dim == 1) {
    os << "x,u_nn,u_ref,abs_error\n";
  } else {
    os << (ade ? "t,x" : "x,y") << ",u_nn,u_ref,abs_error\n";
  }
  for (Eigen::Index i = 0; i < ev.points.cols(); ++i) {
    for (int k = 0; k < ev.dim; ++k) os << ev.points(k, i) << ',';
    os << ev.predicted(i) << ',' << ev.reference(i) << ',' << std::abs(ev.predicted(i) - ev.reference(i)) << '\n';
  }
}

void write_spectrum(const std::filesystem::path& dir, const Experiment& ex, const ParamVector& params) {
  if (ex.spec.dim != 1 || !ex.spec.has_exact()) return;
  Mlp net = ex.objective->network_shape();
  net.unpack(std::span<const double>(params.data(), net.parameter_count()));
  const int n = ex.config.spectrum_samples;
  const auto [a, b] = ex.spec.evaluation_range;
  std::vector<double> exact(static_cast<std::size_t>(n)), predicted(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::array<double, 1> x{a + (b - a) * i / n};
    exact[i] = ex.spec.exact_value(x);
    predicted[i] = forward(net, x);
  }
  const auto se = oracle::spectrum(exact), sp = oracle::spectrum(predicted);
  auto os = open_csv(dir / "spectrum.csv");
  os << "index,exact,predicted\n";
  for (std::size_t k = 0; k < se.size(); ++k) os << k << ',' << se[k] << ',' << sp[k] << '\n';
}

}  // namespace

RunResult run(const RunConfig& config, const std::optional<std::filesystem::path>& out) {
  Experiment ex = build_experiment(config);
  std::ofstream trace_csv, timing_csv;
  if (out) {
    std::filesystem::create_directories(*out);
    write_text(*out / "run_manifest.json", manifest(ex).dump(2));
    trace_csv = open_csv(*out / "trace.csv");
    timing_csv = open_csv(*out / "timing.csv");
    trace_csv << "iteration,total,variational,boundary,initial,data";
    for (const auto& name : ex.objective->physical_names()) trace_csv << ',' << name;
    trace_csv << '\n';
    timing_csv << "iteration,wall_seconds\n";
  }

  TraceObserver observer;
  if (out) {
    observer = [&](const TraceEntry& e, const ParamVector& params) {
      trace_csv << e.iteration << ',' << e.loss.total << ',' << e.loss.variational << ',' << e.loss.boundary << ','
                << e.loss.initial << ',' << e.loss.data;
      for (double p : e.physical) trace_csv << ',' << p;
      trace_csv << '\n';
      timing_csv << e.iteration << ',' << e.wall_seconds << '\n';
      Mlp net = ex.objective->network_shape();
      net.unpack(std::span<const double>(params.data(), net.parameter_count()));
      auto snapshot = json::parse(to_snapshot(net, e.physical, ex.objective->physical_names()));
      snapshot["iteration"] = e.iteration;
      write_text(*out / "checkpoint.json", snapshot.dump());
    };
  }

  TrainConfig tc;
  tc.learning_rate = config.learning_rate;
  tc.iterations = config.iterations;
  tc.seed = config.seed;
  tc.report_every = config.report_every;
  const auto n_net = static_cast<Eigen::Index>(ex.objective->network_parameter_count());
  for (std::size_t i = 0; i < ex.objective->physical_names().size(); ++i) {
    tc.trainable_physical.emplace_back(ex.objective->physical_names()[i], ex.initial(n_net + static_cast<Eigen::Index>(i)));
  }

  TrainResult trained = train(*ex.objective, ex.initial, tc, observer);
  RunResult result;
  result.evaluation = evaluate_solution(ex, trained.params);
  result.physical.assign(trained.params.data() + n_net, trained.params.data() + trained.params.size());
  result.params = std::move(trained.params);
  result.trace = std::move(trained.trace);

  if (out) {
    write_solution(*out, ex, result.evaluation);
    write_spectrum(*out, ex, result.params);
    json metrics{{"linf", result.evaluation.linf},
                 {"h1_seminorm", std::isnan(result.evaluation.h1_seminorm) ? json(nullptr) : json(result.evaluation.h1_seminorm)},
                 {"failed", result.trace.failed},
                 {"failure", result.trace.failure}};
    for (std::size_t i = 0; i < result.physical.size(); ++i) metrics[ex.objective->physical_names()[i]] = result.physical[i];
    write_text(*out / "metrics.json", metrics.dump(2));
  }
  return result;
}

}  // namespace hpvpinn::runner
