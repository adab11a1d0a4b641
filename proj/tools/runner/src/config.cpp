#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "hpvpinn/error.hpp"
#include "hpvpinn/runner.hpp"

namespace hpvpinn::runner {

namespace {

using nlohmann::json;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"problem", {"name"}},
      {"network", {"depth", "width", "activation"}},
      {"mesh", {"x", "y", "elements", "elements_x", "elements_y", "lshape_fine"}},
      {"basis", {"kind", "test", "test_x", "test_y"}},
      {"quadrature", {"family", "q", "q_x", "q_y"}},
      {"residuals", {"method", "form"}},
      {"loss", {"tau_b", "tau_0", "tau_star", "n_b", "n_0", "n_r"}},
      {"optimizer", {"learning_rate", "iterations", "report_every"}},
      {"observations", {"sensors", "per_sensor", "seed", "kappa_initial"}},
      {"reference", {"nx", "nt"}},
      {"evaluation", {"points_1d", "points_2d", "spectrum_samples"}},
  };
  return s;
}

template <class T>
T read(const json& section, const std::string& name, const std::string& key) {
  try {
    return section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(name + "." + key + ": " + e.what());
  }
}

int read_count(const json& section, const std::string& name, const std::string& key, int min) {
  const json& v = section.at(key);
  if (!v.is_number_integer()) throw ConfigError(name + "." + key + " must be an integer");
  const auto n = v.get<long long>();
  if (n < min) throw ConfigError(name + "." + key + " must be at least " + std::to_string(min));
  return static_cast<int>(n);
}

double read_real(const json& section, const std::string& name, const std::string& key) {
  const json& v = section.at(key);
  if (!v.is_number()) throw ConfigError(name + "." + key + " must be a number");
  return v.get<double>();
}

std::vector<double> uniform_mesh(std::array<double, 2> range, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) out[i] = range[0] + (range[1] - range[0]) * i / n;
  out.back() = range[1];
  return out;
}

template <class F>
auto parse_enum(const json& section, const std::string& name, const std::string& key, F parse) {
  const auto text = read<std::string>(section, name, key);
  try {
    return parse(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(name + "." + key + ": " + e.what());
  }
}

std::string method_name(Method m) { return m == Method::vpinn ? "vpinn" : "pinn"; }

}  // namespace

RunConfig default_config(const std::string& name) {
  const ProblemSpec& spec = find_problem(name);
  const ProblemDefaults& d = spec.defaults;
  RunConfig c;
  c.problem = name;
  c.depth = d.depth;
  c.width = d.width;
  c.activation = d.activation;
  c.mesh_x = d.mesh_x;
  c.mesh_y = d.mesh_y;
  c.lshape_fine = d.lshape_fine;
  c.basis = d.basis;
  c.test_x = d.test_x;
  c.test_y = d.test_y;
  c.quadrature = d.quadrature;
  c.quad_x = d.quad_x;
  c.quad_y = d.quad_y;
  c.form = d.form;
  c.weights = d.weights;
  c.n_b = d.n_b;
  c.n_0 = d.n_0;
  c.n_r = d.n_r;
  c.learning_rate = d.learning_rate;
  c.iterations = d.iterations;
  c.sensors = d.sensors;
  c.per_sensor = d.per_sensor;
  c.kappa_initial = d.kappa_initial;
  return c;
}

RunConfig resolve_config(const json& doc, const std::optional<std::string>& problem_override,
                         const std::optional<std::uint64_t>& seed_override) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "seed" || key == "manifest") continue;
    const auto it = schema().find(key);
    if (it == schema().end()) throw ConfigError("unknown config section '" + key + "'");
    if (key == "problem" && value.is_string()) continue;
    if (!value.is_object()) throw ConfigError("config section '" + key + "' must be an object");
    for (const auto& [field, unused] : value.items()) {
      if (!it->second.contains(field)) throw ConfigError("unknown config key '" + key + "." + field + "'");
    }
  }

  std::string name;
  if (problem_override) {
    name = *problem_override;
  } else if (doc.contains("problem")) {
    const json& p = doc["problem"];
    name = p.is_string() ? p.get<std::string>() : read<std::string>(p, "problem", "name");
  } else {
    throw ConfigError("config does not name a problem");
  }
  RunConfig c = default_config(name);
  const ProblemSpec& spec = find_problem(name);

  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned() && !doc["seed"].is_number_integer()) throw ConfigError("seed must be an integer");
    c.seed = doc["seed"].get<std::uint64_t>();
  }
  if (seed_override) c.seed = *seed_override;

  auto section = [&](const char* s) -> const json* { return doc.contains(s) ? &doc[s] : nullptr; };

  if (const json* n = section("network")) {
    if (n->contains("depth")) c.depth = read_count(*n, "network", "depth", 1);
    if (n->contains("width")) c.width = read_count(*n, "network", "width", 1);
    if (n->contains("activation")) c.activation = parse_enum(*n, "network", "activation", parse_activation);
  }
  if (const json* m = section("mesh")) {
    if (m->contains("x") && (m->contains("elements") || m->contains("elements_x"))) {
      throw ConfigError("mesh.x conflicts with an element count");
    }
    if (m->contains("y") && (m->contains("elements") || m->contains("elements_y"))) {
      throw ConfigError("mesh.y conflicts with an element count");
    }
    if (m->contains("elements")) {
      const int e = read_count(*m, "mesh", "elements", 1);
      c.mesh_x = uniform_mesh(spec.range_0, e);
      if (spec.dim == 2) c.mesh_y = uniform_mesh(spec.range_1, e);
    }
    if (m->contains("elements_x")) c.mesh_x = uniform_mesh(spec.range_0, read_count(*m, "mesh", "elements_x", 1));
    if (m->contains("elements_y")) c.mesh_y = uniform_mesh(spec.range_1, read_count(*m, "mesh", "elements_y", 1));
    if (m->contains("x")) c.mesh_x = read<std::vector<double>>(*m, "mesh", "x");
    if (m->contains("y")) c.mesh_y = read<std::vector<double>>(*m, "mesh", "y");
    if (m->contains("lshape_fine")) c.lshape_fine = read<bool>(*m, "mesh", "lshape_fine");
  }
  if (const json* b = section("basis")) {
    if (b->contains("kind")) c.basis = parse_enum(*b, "basis", "kind", parse_basis_kind);
    if (b->contains("test")) c.test_x = c.test_y = read_count(*b, "basis", "test", 1);
    if (b->contains("test_x")) c.test_x = read_count(*b, "basis", "test_x", 1);
    if (b->contains("test_y")) c.test_y = read_count(*b, "basis", "test_y", 1);
  }
  if (const json* q = section("quadrature")) {
    if (q->contains("family")) c.quadrature = parse_enum(*q, "quadrature", "family", parse_quadrature_family);
    if (q->contains("q")) c.quad_x = c.quad_y = read_count(*q, "quadrature", "q", 1);
    if (q->contains("q_x")) c.quad_x = read_count(*q, "quadrature", "q_x", 1);
    if (q->contains("q_y")) c.quad_y = read_count(*q, "quadrature", "q_y", 1);
  }
  if (const json* r = section("residuals")) {
    if (r->contains("method")) {
      const auto m = read<std::string>(*r, "residuals", "method");
      if (m == "vpinn") {
        c.method = Method::vpinn;
      } else if (m == "pinn") {
        c.method = Method::pinn;
      } else {
        throw ConfigError("residuals.method must be 'vpinn' or 'pinn'");
      }
    }
    if (r->contains("form")) c.form = parse_enum(*r, "residuals", "form", parse_form);
  }
  if (const json* l = section("loss")) {
    if (l->contains("tau_b")) c.weights.tau_b = read_real(*l, "loss", "tau_b");
    if (l->contains("tau_0")) c.weights.tau_0 = read_real(*l, "loss", "tau_0");
    if (l->contains("tau_star")) c.weights.tau_star = read_real(*l, "loss", "tau_star");
    if (l->contains("n_b")) c.n_b = read_count(*l, "loss", "n_b", 0);
    if (l->contains("n_0")) c.n_0 = read_count(*l, "loss", "n_0", 0);
    if (l->contains("n_r")) c.n_r = read_count(*l, "loss", "n_r", 1);
  }
  if (const json* o = section("optimizer")) {
    if (o->contains("learning_rate")) c.learning_rate = read_real(*o, "optimizer", "learning_rate");
    if (o->contains("iterations")) c.iterations = read_count(*o, "optimizer", "iterations", 0);
    if (o->contains("report_every")) c.report_every = read_count(*o, "optimizer", "report_every", 1);
  }
  if (const json* o = section("observations")) {
    if (o->contains("sensors")) c.sensors = read<std::vector<double>>(*o, "observations", "sensors");
    if (o->contains("per_sensor")) c.per_sensor = read_count(*o, "observations", "per_sensor", 0);
    if (o->contains("seed")) c.observation_seed = read<std::uint64_t>(*o, "observations", "seed");
    if (o->contains("kappa_initial")) c.kappa_initial = read_real(*o, "observations", "kappa_initial");
  }
  if (const json* r = section("reference")) {
    if (r->contains("nx")) c.reference_nx = read_count(*r, "reference", "nx", 100);
    if (r->contains("nt")) c.reference_nt = read_count(*r, "reference", "nt", 100);
  }
  if (const json* e = section("evaluation")) {
    if (e->contains("points_1d")) c.eval_points_1d = read_count(*e, "evaluation", "points_1d", 2);
    if (e->contains("points_2d")) c.eval_points_2d = read_count(*e, "evaluation", "points_2d", 2);
    if (e->contains("spectrum_samples")) c.spectrum_samples = read_count(*e, "evaluation", "spectrum_samples", 64);
  }

  if (!(c.learning_rate > 0.0)) throw ConfigError("optimizer.learning_rate must be positive");
  try {
    c.weights.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("loss: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const std::optional<std::string>& problem_override,
                      const std::optional<std::uint64_t>& seed_override) {
  std::ifstream in(path);
  if (!in) throw std::filesystem::filesystem_error("cannot open config", path, std::make_error_code(std::errc::no_such_file_or_directory));
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return resolve_config(doc, problem_override, seed_override);
}

json to_json(const RunConfig& c) {
  json j;
  j["problem"] = {{"name", c.problem}};
  j["seed"] = c.seed;
  j["network"] = {{"depth", c.depth}, {"width", c.width}, {"activation", to_string(c.activation)}};
  j["mesh"] = {{"x", c.mesh_x}, {"lshape_fine", c.lshape_fine}};
  j["basis"] = {{"kind", to_string(c.basis)}, {"test_x", c.test_x}};
  j["quadrature"] = {{"family", to_string(c.quadrature)}, {"q_x", c.quad_x}};
  // 1D problems have no second axis
  if (!c.mesh_y.empty()) j["mesh"]["y"] = c.mesh_y;
  if (c.test_y > 0) j["basis"]["test_y"] = c.test_y;
  if (c.quad_y > 0) j["quadrature"]["q_y"] = c.quad_y;
  j["residuals"] = {{"method", method_name(c.method)}, {"form", to_string(c.form)}};
  j["loss"] = {{"tau_b", c.weights.tau_b}, {"tau_0", c.weights.tau_0}, {"tau_star", c.weights.tau_star},
               {"n_b", c.n_b},           {"n_0", c.n_0},           {"n_r", c.n_r}};
  j["optimizer"] = {{"learning_rate", c.learning_rate}, {"iterations", c.iterations}, {"report_every", c.report_every}};
  j["observations"] = {{"sensors", c.sensors},
                       {"per_sensor", c.per_sensor},
                       {"seed", c.observation_seed},
                       {"kappa_initial", c.kappa_initial}};
  j["reference"] = {{"nx", c.reference_nx}, {"nt", c.reference_nt}};
  j["evaluation"] = {
      {"points_1d", c.eval_points_1d}, {"points_2d", c.eval_points_2d}, {"spectrum_samples", c.spectrum_samples}};
  return j;
}

void set_key(json& doc, const std::string& dotted_key, const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::parse_error&) {
    v = value;
  }
  if (dotted_key == "seed") {
    doc["seed"] = v;
    return;
  }
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) throw ConfigError("sweep key '" + dotted_key + "' must look like section.key");
  const std::string section = dotted_key.substr(0, dot), key = dotted_key.substr(dot + 1);
  const auto it = schema().find(section);
  if (it == schema().end() || !it->second.contains(key)) throw ConfigError("unknown config key '" + dotted_key + "'");
  if (section == "problem" && doc.contains("problem") && doc["problem"].is_string()) doc["problem"] = json::object();
  doc[section][key] = v;
}

}  // namespace hpvpinn::runner
