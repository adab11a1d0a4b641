#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "hpvpinn/error.hpp"
#include "hpvpinn/runner.hpp"

namespace {

namespace runner = hpvpinn::runner;

enum Exit : int {
  ok = 0,
  failure = 1,
  usage = 2,
  malformed_config = 3,
  unknown_problem = 4,
  non_finite = 5,
};

nlohmann::json read_doc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot open config", path, std::make_error_code(std::errc::no_such_file_or_directory));
  try {
    return nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw runner::ConfigError(path + ": " + e.what());
  }
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find(',', start);
    const std::string item = text.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    try {
      std::size_t used = 0;
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--seeds", "'" + item + "' is not a seed");
    }
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  runner::tune_allocator();
  CLI::App app{"Variational physics-informed network experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, problem;
  std::optional<std::uint64_t> seed;

  auto* run_cmd = app.add_subcommand("run", "Train one configuration and write its artifacts");
  run_cmd->add_option("-c,--config", config_path, "JSON config file")->required();
  run_cmd->add_option("-o,--out", out_dir, "Artifact directory")->required();
  run_cmd->add_option("--seed", seed, "Override the network seed");
  run_cmd->add_option("--problem", problem, "Override the problem name");

  std::vector<std::string> axes;
  std::string seeds_text = "0";
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the cross product of config overrides over several seeds");
  sweep_cmd->add_option("-c,--config", config_path, "Base JSON config file")->required();
  sweep_cmd->add_option("-o,--out", out_dir, "Output directory")->required();
  sweep_cmd->add_option("--axis", axes, "section.key=v1,v2,... (repeatable)");
  sweep_cmd->add_option("--seeds", seeds_text, "Comma-separated seeds");
  sweep_cmd->add_option("--problem", problem, "Override the problem name");
  sweep_cmd->add_option("-j,--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Exit::ok : Exit::usage;
  }

  try {
    const std::optional<std::string> problem_override =
        problem.empty() ? std::nullopt : std::optional<std::string>(problem);
    if (run_cmd->parsed()) {
      const runner::RunConfig config = runner::load_config(config_path, problem_override, seed);
      const runner::RunResult result = runner::run(config, std::filesystem::path(out_dir));
      if (result.trace.failed) {
        std::cerr << "training failed: " << result.trace.failure << '\n';
        return Exit::non_finite;
      }
      std::cout.precision(6);
      std::cout << "linf " << result.evaluation.linf << "  h1 " << result.evaluation.h1_seminorm;
      for (std::size_t i = 0; i < result.physical.size(); ++i) {
        std::cout << "  " << result.trace.physical_names[i] << ' ' << result.physical[i];
      }
      std::cout << '\n';
      return Exit::ok;
    }
    nlohmann::json base = read_doc(config_path);
    if (problem_override) runner::set_key(base, "problem.name", '"' + *problem_override + '"');
    std::vector<runner::SweepAxis> parsed;
    for (const auto& a : axes) parsed.push_back(runner::parse_axis(a));
    const auto cells = runner::sweep(base, parsed, parse_seeds(seeds_text), out_dir, jobs);
    int failed = 0;
    for (const auto& c : cells) failed += c.failed;
    std::cout << cells.size() << " cells written to " << (std::filesystem::path(out_dir) / "summary.csv").string() << '\n';
    return failed > 0 ? Exit::non_finite : Exit::ok;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << e.what() << '\n' << app.help();
    return Exit::usage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << '\n';
    return Exit::usage;
  } catch (const hpvpinn::UnknownProblemError& e) {
    std::cerr << e.what() << '\n';
    return Exit::unknown_problem;
  } catch (const runner::ConfigError& e) {
    std::cerr << "malformed config: " << e.what() << '\n';
    return Exit::malformed_config;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return Exit::malformed_config;
  } catch (const hpvpinn::NonFiniteError& e) {
    std::cerr << "non-finite " << e.term() << ": " << e.what() << '\n';
    return Exit::non_finite;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::failure;
  }
}
