#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hpvpinn {

/// Flat trainable parameter vector.
///
/// Layout: for each layer i = 1..L (hidden layers then the linear output layer), the
/// weight matrix W_i in row-major order (N_i x N_{i-1}) followed by the bias b_i.
/// Trainable physical parameters (e.g. a diffusivity) are appended after the last bias,
/// in the order the objective declares them.
using ParamVector = Eigen::VectorXd;

enum class Activation { tanh, sine, relu };

std::string_view to_string(Activation act);
Activation parse_activation(std::string_view name);

/// Fully connected network u(x) = g o T_L o ... o T_1 (x) with T_i(z) = act(W_i z + b_i)
/// and a linear output layer g.
class Mlp {
 public:
  /// All weights and biases zero. layer_sizes = [d, N_1, ..., N_L, 1] with L >= 1.
  Mlp(std::vector<int> layer_sizes, Activation activation);

  const std::vector<int>& layer_sizes() const noexcept { return sizes_; }
  int input_dim() const noexcept { return sizes_.front(); }
  int hidden_layers() const noexcept { return static_cast<int>(sizes_.size()) - 2; }
  /// Number of affine maps (hidden layers + output layer).
  int affine_layers() const noexcept { return static_cast<int>(weights_.size()); }
  Activation activation() const noexcept { return activation_; }

  /// ReLU has a zero second derivative almost everywhere and cannot feed forms needing u''.
  bool supports_second_derivative() const noexcept { return activation_ != Activation::relu; }

  const Eigen::MatrixXd& weight(int layer) const { return weights_.at(layer); }
  const Eigen::VectorXd& bias(int layer) const { return biases_.at(layer); }
  Eigen::MatrixXd& weight(int layer) { return weights_.at(layer); }
  Eigen::VectorXd& bias(int layer) { return biases_.at(layer); }

  std::size_t parameter_count() const noexcept { return parameter_count_; }

  ParamVector pack() const;
  /// Reads the first parameter_count() entries; trailing physical parameters are ignored.
  void unpack(std::span<const double> params);
  void unpack(const ParamVector& params) { unpack(std::span<const double>(params.data(), params.size())); }

 private:
  std::vector<int> sizes_;
  Activation activation_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
  std::size_t parameter_count_ = 0;
};

/// Glorot-uniform weights, zero biases; deterministic in `seed`.
Mlp init_mlp(std::vector<int> layer_sizes, Activation activation, std::uint64_t seed);

/// Plain forward evaluation at one point.
double forward(const Mlp& net, std::span<const double> point);

/// Layer sizes for `depth` hidden layers of `width` neurons.
std::vector<int> uniform_layers(int input_dim, int depth, int width);

/// JSON text holding sizes, activation and the flat parameters (17 significant digits).
std::string to_snapshot(const Mlp& net, std::span<const double> physical = {},
                        std::span<const std::string> physical_names = {});

struct Snapshot {
  Mlp net;
  std::vector<std::string> physical_names;
  std::vector<double> physical;
};

Snapshot from_snapshot(std::string_view text);

}  // namespace hpvpinn
