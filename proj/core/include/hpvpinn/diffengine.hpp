#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hpvpinn/dual.hpp"
#include "hpvpinn/error.hpp"
#include "hpvpinn/network.hpp"
#include "hpvpinn/tape.hpp"

namespace hpvpinn {

/// Value plus first and pure second derivatives along every input axis.
struct JetValue {
  double value = 0.0;
  std::vector<double> d_dx;
  std::vector<double> d2_dx2;
};

using ScalarField = std::function<double(std::span<const double>)>;
using JetField = std::function<JetValue(std::span<const double>)>;

/// u(point) with exact first and pure second input derivatives.
JetValue evaluate_jet(const Mlp& net, std::span<const double> point);

/// Jets at a batch of points stored column-wise.
struct JetBatch {
  Eigen::RowVectorXd value;  // 1 x n
  Eigen::MatrixXd d1;        // dim x n, empty when order < 1
  Eigen::MatrixXd d2;        // dim x n, empty when order < 2

  Eigen::Index size() const noexcept { return value.size(); }
  static JetBatch zeros(int dim, Eigen::Index n, int order);
  /// Columns [begin, begin + count).
  JetBatch slice(Eigen::Index begin, Eigen::Index count) const;
};

/// Intermediate layer states kept by forward_jets for the reverse sweep.
struct ForwardCache {
  int order = 0;
  int dim = 0;
  Eigen::Index points = 0;
  // Per affine layer: the stacked input streams [a | d1 a_0 .. | d2 a_0 ..] (N_{l-1} x n*S)
  // and, for hidden layers, the stacked pre-activation streams (N_l x n*S).
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<Eigen::MatrixXd> preacts;
  // First to third activation derivatives at each hidden layer's value stream.
  std::vector<std::array<Eigen::ArrayXXd, 3>> slopes;
};

/// Batched forward-mode jets through the network. `points` is dim x n; `order` in {0,1,2}.
/// When `cache` is given, layer states are stored for backward_jets.
JetBatch forward_jets(const Mlp& net, const Eigen::MatrixXd& points, int order, ForwardCache* cache = nullptr);

/// Reverse accumulation: given adjoints of every jet slot (same shape as the forward
/// result), adds d(loss)/d(theta) for all network parameters into `grad`
/// (first net.parameter_count() entries, layout of ParamVector).
void backward_jets(const Mlp& net, const ForwardCache& cache, const JetBatch& seeds, Eigen::Ref<Eigen::VectorXd> grad);

/// Scalar objective of a ParamVector with an exact gradient.
class DifferentiableObjective {
 public:
  virtual ~DifferentiableObjective() = default;
  virtual std::size_t parameter_count() const = 0;
  /// Returns the loss; fills `grad` (resized) when non-null. Throws NonFiniteError.
  virtual double value_and_gradient(const ParamVector& params, ParamVector* grad) const = 0;
};

ParamVector loss_gradient(const DifferentiableObjective& loss, const ParamVector& params);

/// Gradient of an arbitrary scalar program recorded on a tape.
using TapedLoss = std::function<ad::Var(std::span<const ad::Var>)>;
ParamVector loss_gradient(const TapedLoss& loss, const ParamVector& params);

// --- generic-scalar network jets (used to cross-check the batched engine) ---------------

inline double value_of_scalar(double x) { return x; }
inline double value_of_scalar(const ad::Var& x) { return x.value(); }

template <class T>
struct GenericJet {
  T value{};
  std::vector<T> d1;
  std::vector<T> d2;
};

/// Same computation as evaluate_jet, written over an arbitrary scalar type so it can be
/// recorded on an ad::Tape. `params` follows the ParamVector layout.
template <class T>
GenericJet<T> evaluate_jet_generic(const std::vector<int>& sizes, Activation act, std::span<const T> params,
                                   std::span<const double> point) {
  using std::cos;
  using std::sin;
  using std::tanh;
  const int dim = sizes.front();
  HPVPINN_EXPECTS(static_cast<int>(point.size()) == dim, "point dimension mismatch");
  std::vector<T> a(point.begin(), point.end());
  std::vector<std::vector<T>> da(static_cast<std::size_t>(dim)), dda(static_cast<std::size_t>(dim));
  for (int r = 0; r < dim; ++r) {
    da[r].assign(static_cast<std::size_t>(dim), T(0.0));
    da[r][static_cast<std::size_t>(r)] = T(1.0);
    dda[r].assign(static_cast<std::size_t>(dim), T(0.0));
  }
  std::size_t pos = 0;
  const std::size_t layers = sizes.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const int rows = sizes[l + 1], cols = sizes[l];
    std::vector<T> z(static_cast<std::size_t>(rows), T(0.0));
    std::vector<std::vector<T>> dz(static_cast<std::size_t>(dim), z), ddz(static_cast<std::size_t>(dim), z);
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const T& w = params[pos++];
        z[i] = z[i] + w * a[j];
        for (int r = 0; r < dim; ++r) {
          dz[r][i] = dz[r][i] + w * da[r][j];
          ddz[r][i] = ddz[r][i] + w * dda[r][j];
        }
      }
    }
    for (int i = 0; i < rows; ++i) z[i] = z[i] + params[pos++];
    if (l + 1 == layers) {
      GenericJet<T> out;
      out.value = z[0];
      for (int r = 0; r < dim; ++r) {
        out.d1.push_back(dz[r][0]);
        out.d2.push_back(ddz[r][0]);
      }
      return out;
    }
    a.assign(static_cast<std::size_t>(rows), T(0.0));
    for (int r = 0; r < dim; ++r) {
      da[r].assign(static_cast<std::size_t>(rows), T(0.0));
      dda[r].assign(static_cast<std::size_t>(rows), T(0.0));
    }
    for (int i = 0; i < rows; ++i) {
      T s, ds, dds;
      switch (act) {
        case Activation::tanh: {
          s = tanh(z[i]);
          ds = T(1.0) - s * s;
          dds = T(-2.0) * s * ds;
          break;
        }
        case Activation::sine: {
          s = sin(z[i]);
          ds = cos(z[i]);
          dds = -s;
          break;
        }
        case Activation::relu: {
          const bool on = value_of_scalar(z[i]) > 0.0;
          s = on ? z[i] : T(0.0);
          ds = T(on ? 1.0 : 0.0);
          dds = T(0.0);
          break;
        }
      }
      a[i] = s;
      for (int r = 0; r < dim; ++r) {
        da[r][i] = ds * dz[r][i];
        dda[r][i] = dds * dz[r][i] * dz[r][i] + ds * ddz[r][i];
      }
    }
  }
  return {};
}

/// Wraps a closed-form function `f(std::array<T, Dim>)` (generic over double/Dual2) as a
/// JetField; derivatives come from one Dual2 sweep per axis.
template <int Dim, class F>
JetField make_jet_field(F f) {
  return [f](std::span<const double> p) {
    HPVPINN_EXPECTS(static_cast<int>(p.size()) == Dim, "point dimension mismatch");
    JetValue jet;
    jet.d_dx.resize(Dim);
    jet.d2_dx2.resize(Dim);
    for (int axis = 0; axis < Dim; ++axis) {
      std::array<Dual2, Dim> x;
      for (int i = 0; i < Dim; ++i) x[i] = Dual2(p[i], i == axis ? 1.0 : 0.0, 0.0);
      const Dual2 r = f(x);
      jet.value = r.v;
      jet.d_dx[axis] = r.d;
      jet.d2_dx2[axis] = r.dd;
    }
    return jet;
  };
}

/// Plain value of a closed-form function usable with make_jet_field.
template <int Dim, class F>
ScalarField make_scalar_field(F f) {
  return [f](std::span<const double> p) {
    HPVPINN_EXPECTS(static_cast<int>(p.size()) == Dim, "point dimension mismatch");
    std::array<double, Dim> x;
    for (int i = 0; i < Dim; ++i) x[i] = p[i];
    return f(x);
  };
}

}  // namespace hpvpinn
