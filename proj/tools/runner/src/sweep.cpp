#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <thread>

#include "hpvpinn/runner.hpp"

namespace hpvpinn::runner {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string cell_name(const std::vector<SweepAxis>& axes, const std::vector<std::string>& values) {
  std::string name;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!name.empty()) name += "__";
    name += axes[i].key + "=" + values[i];
  }
  for (char& ch : name) {
    if (ch == '/' || ch == ' ' || ch == '"') ch = '_';
  }
  return name.empty() ? "base" : name;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

SweepAxis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    throw ConfigError("sweep axis '" + spec + "' must look like section.key=v1,v2");
  }
  SweepAxis axis{spec.substr(0, eq), split(spec.substr(eq + 1), ',')};
  nlohmann::json probe = nlohmann::json::object();
  set_key(probe, axis.key, axis.values.front());
  return axis;
}

std::vector<SweepCell> sweep(const nlohmann::json& base, const std::vector<SweepAxis>& axes,
                             const std::vector<std::uint64_t>& seeds, const std::filesystem::path& out, int jobs) {
  if (seeds.empty()) throw ConfigError("a sweep needs at least one seed");
  std::vector<SweepCell> cells(1);
  for (const auto& axis : axes) {
    std::vector<SweepCell> next;
    for (const auto& cell : cells) {
      for (const auto& v : axis.values) {
        SweepCell c = cell;
        c.values.push_back(v);
        next.push_back(std::move(c));
      }
    }
    cells = std::move(next);
  }

  // resolve every cell up front so a bad axis value fails before any training starts
  struct Task {
    std::size_t cell;
    RunConfig config;
    std::filesystem::path dir;
  };
  std::vector<Task> tasks;
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    nlohmann::json doc = base;
    for (std::size_t a = 0; a < axes.size(); ++a) set_key(doc, axes[a].key, cells[ci].values[a]);
    for (auto seed : seeds) {
      tasks.push_back({ci, resolve_config(doc, std::nullopt, seed),
                       out / cell_name(axes, cells[ci].values) / ("seed_" + std::to_string(seed))});
    }
  }

  std::mutex mutex;
  std::atomic<std::size_t> next{0};
  std::vector<std::pair<double, double>> metrics(tasks.size(), {std::nan(""), std::nan("")});
  std::vector<bool> failed(tasks.size(), false);
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const RunResult r = run(tasks[i].config, tasks[i].dir);
        metrics[i] = {r.evaluation.linf, r.evaluation.h1_seminorm};
        failed[i] = r.trace.failed;
      } catch (const std::exception& e) {
        failed[i] = true;
        const std::lock_guard lock(mutex);
        std::cerr << tasks[i].dir.string() << ": " << e.what() << '\n';
      }
    }
  };
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    SweepCell& cell = cells[tasks[i].cell];
    if (failed[i]) {
      ++cell.failed;
      continue;
    }
    cell.linf.push_back(metrics[i].first);
    cell.h1.push_back(metrics[i].second);
  }

  std::filesystem::create_directories(out);
  std::ofstream os(out / "summary.csv");
  os.precision(17);
  os << std::scientific;
  for (const auto& axis : axes) os << axis.key << ',';
  os << "runs,failed,mean_linf,std_linf,mean_h1_seminorm,std_h1_seminorm\n";
  for (const auto& cell : cells) {
    for (const auto& v : cell.values) os << v << ',';
    os << cell.linf.size() + static_cast<std::size_t>(cell.failed) << ',' << cell.failed << ',' << mean(cell.linf)
       << ',' << stddev(cell.linf) << ',' << mean(cell.h1) << ',' << stddev(cell.h1) << '\n';
  }
  return cells;
}

}  // namespace hpvpinn::runner
