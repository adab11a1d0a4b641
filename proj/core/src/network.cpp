#include "hpvpinn/network.hpp"

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "hpvpinn/error.hpp"

namespace hpvpinn {

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::tanh: return "tanh";
    case Activation::sine: return "sine";
    case Activation::relu: return "relu";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "sine" || name == "sin") return Activation::sine;
  if (name == "relu") return Activation::relu;
  throw ContractViolation("unknown activation '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<int> layer_sizes, Activation activation)
    : sizes_(std::move(layer_sizes)), activation_(activation) {
  HPVPINN_EXPECTS(sizes_.size() >= 3, "network needs an input, at least one hidden layer and an output");
  HPVPINN_EXPECTS(sizes_.back() == 1, "network output must be scalar");
  for (int s : sizes_) HPVPINN_EXPECTS(s >= 1, "layer sizes must be positive");
  for (std::size_t i = 1; i < sizes_.size(); ++i) {
    weights_.emplace_back(Eigen::MatrixXd::Zero(sizes_[i], sizes_[i - 1]));
    biases_.emplace_back(Eigen::VectorXd::Zero(sizes_[i]));
    parameter_count_ += static_cast<std::size_t>(sizes_[i]) * (sizes_[i - 1] + 1);
  }
}

ParamVector Mlp::pack() const {
  ParamVector out(static_cast<Eigen::Index>(parameter_count_));
  Eigen::Index pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) out[pos++] = w(r, c);
    out.segment(pos, biases_[l].size()) = biases_[l];
    pos += biases_[l].size();
  }
  return out;
}

void Mlp::unpack(std::span<const double> params) {
  HPVPINN_EXPECTS(params.size() >= parameter_count_, "parameter vector too short for network");
  std::size_t pos = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    auto& w = weights_[l];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = params[pos++];
    for (Eigen::Index i = 0; i < biases_[l].size(); ++i) biases_[l][i] = params[pos++];
  }
}

Mlp init_mlp(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed) {
  Mlp net(std::move(layer_sizes), activation);
  std::mt19937_64 rng(seed);
  for (int l = 0; l < net.affine_layers(); ++l) {
    auto& w = net.weight(l);
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
  }
  return net;
}

namespace {

double activate(Activation act, double z) {
  switch (act) {
    case Activation::tanh: return std::tanh(z);
    case Activation::sine: return std::sin(z);
    case Activation::relu: return z > 0.0 ? z : 0.0;
  }
  return z;
}

}  // namespace

double forward(const Mlp& net, std::span<const double> point) {
  HPVPINN_EXPECTS(static_cast<int>(point.size()) == net.input_dim(),
                  "point dimension does not match network input dimension");
  Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(point.size()));
  const int last = net.affine_layers() - 1;
  for (int l = 0; l < last; ++l) {
    Eigen::VectorXd z = net.weight(l) * a + net.bias(l);
    a = z.unaryExpr([act = net.activation()](double v) { return activate(act, v); });
  }
  return (net.weight(last) * a + net.bias(last))(0);
}

std::vector<int> uniform_layers(int input_dim, int depth, int width) {
  HPVPINN_EXPECTS(depth >= 1 && width >= 1 && input_dim >= 1, "depth, width and input dimension must be positive");
  std::vector<int> sizes{input_dim};
  sizes.insert(sizes.end(), static_cast<std::size_t>(depth), width);
  sizes.push_back(1);
  return sizes;
}

std::string to_snapshot(const Mlp& net, std::span<const double> physical,
                        std::span<const std::string> physical_names) {
  HPVPINN_EXPECTS(physical.size() == physical_names.size(), "physical values and names differ in length");
  nlohmann::json j;
  j["layer_sizes"] = net.layer_sizes();
  j["activation"] = std::string(to_string(net.activation()));
  const ParamVector p = net.pack();
  j["params"] = std::vector<double>(p.data(), p.data() + p.size());
  nlohmann::json phys = nlohmann::json::object();
  for (std::size_t i = 0; i < physical.size(); ++i) phys[physical_names[i]] = physical[i];
  j["physical"] = phys;
  // nlohmann emits the shortest round-tripping representation for doubles.
  return j.dump(1);
}

Snapshot from_snapshot(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("malformed network snapshot: ") + e.what());
  }
  try {
    Mlp net(j.at("layer_sizes").get<std::vector<int>>(),
            parse_activation(j.at("activation").get<std::string>()));
    const auto params = j.at("params").get<std::vector<double>>();
    HPVPINN_EXPECTS(params.size() == net.parameter_count(), "snapshot parameter count does not match layer sizes");
    net.unpack(params);
    Snapshot snap{std::move(net), {}, {}};
    if (j.contains("physical")) {
      for (const auto& [name, value] : j["physical"].items()) {
        snap.physical_names.push_back(name);
        snap.physical.push_back(value.get<double>());
      }
    }
    return snap;
  } catch (const nlohmann::json::exception& e) {
    throw ContractViolation(std::string("malformed network snapshot: ") + e.what());
  }
}

}  // namespace hpvpinn
