#include "hpvpinn/diffengine.hpp"

#include <string>

namespace hpvpinn {

namespace {

using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

int stream_count(int order, int dim) { return order == 0 ? 1 : (order == 1 ? 1 + dim : 1 + 2 * dim); }

// Elementwise activation derivatives up to third order, evaluated at z.
struct ActivationDerivatives {
  Eigen::ArrayXXd s0, s1, s2, s3;
};

ActivationDerivatives activation_derivatives(Activation act, const Eigen::ArrayXXd& z, int max_order) {
  ActivationDerivatives d;
  switch (act) {
    case Activation::tanh: {
      // tanh through the vectorized exp; absolute error stays at a few ulp
      const Eigen::ArrayXXd e = (-2.0 * z.abs()).exp();
      d.s0 = ((1.0 - e) / (1.0 + e)) * z.sign();
      d.s1 = 1.0 - d.s0.square();
      if (max_order >= 2) d.s2 = -2.0 * d.s0 * d.s1;
      if (max_order >= 3) d.s3 = d.s1 * (6.0 * d.s0.square() - 2.0);
      break;
    }
    case Activation::sine: {
      d.s0 = z.sin();
      d.s1 = z.cos();
      if (max_order >= 2) d.s2 = -d.s0;
      if (max_order >= 3) d.s3 = -d.s1;
      break;
    }
    case Activation::relu: {
      d.s0 = z.max(0.0);
      d.s1 = (z > 0.0).cast<double>();
      if (max_order >= 2) d.s2 = Eigen::ArrayXXd::Zero(z.rows(), z.cols());
      if (max_order >= 3) d.s3 = Eigen::ArrayXXd::Zero(z.rows(), z.cols());
      break;
    }
  }
  return d;
}

}  // namespace

JetBatch JetBatch::zeros(int dim, Eigen::Index n, int order) {
  JetBatch b;
  b.value = Eigen::RowVectorXd::Zero(n);
  if (order >= 1) b.d1 = Eigen::MatrixXd::Zero(dim, n);
  if (order >= 2) b.d2 = Eigen::MatrixXd::Zero(dim, n);
  return b;
}

JetBatch JetBatch::slice(Eigen::Index begin, Eigen::Index count) const {
  JetBatch b;
  b.value = value.segment(begin, count);
  if (d1.size() > 0) b.d1 = d1.middleCols(begin, count);
  if (d2.size() > 0) b.d2 = d2.middleCols(begin, count);
  return b;
}

JetBatch forward_jets(const Mlp& net, const Eigen::MatrixXd& points, int order, ForwardCache* cache) {
  HPVPINN_EXPECTS(order >= 0 && order <= 2, "jet order must be 0, 1 or 2");
  const int dim = net.input_dim();
  HPVPINN_EXPECTS(points.rows() == dim, "point dimension does not match network input dimension");
  const Eigen::Index n = points.cols();
  const int streams = stream_count(order, dim);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, n * streams);
  a.leftCols(n) = points;
  if (order >= 1)
    for (int r = 0; r < dim; ++r) a.block(r, (1 + r) * n, 1, n).setOnes();

  if (cache != nullptr) {
    cache->order = order;
    cache->dim = dim;
    cache->points = n;
    cache->inputs.clear();
    cache->preacts.clear();
    cache->slopes.clear();
  }

  const int last = net.affine_layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Eigen::MatrixXd z = net.weight(l) * a;
    z.leftCols(n).colwise() += net.bias(l);
    if (l == last) {
      if (cache != nullptr) cache->inputs.push_back(std::move(a));
      JetBatch out;
      out.value = z.leftCols(n);
      if (order >= 1) {
        out.d1.resize(dim, n);
        for (int r = 0; r < dim; ++r) out.d1.row(r) = z.block(0, (1 + r) * n, 1, n);
      }
      if (order >= 2) {
        out.d2.resize(dim, n);
        for (int r = 0; r < dim; ++r) out.d2.row(r) = z.block(0, (1 + dim + r) * n, 1, n);
      }
      return out;
    }
    const Eigen::Index rows = z.rows();
    auto act = activation_derivatives(net.activation(), z.leftCols(n).array(), cache != nullptr ? order + 1 : order);
    if (cache != nullptr) cache->inputs.push_back(std::move(a));
    a.resize(rows, n * streams);
    a.leftCols(n) = act.s0.matrix();
    for (int r = 0; r < dim && order >= 1; ++r) {
      const auto dz = z.middleCols((1 + r) * n, n).array();
      a.middleCols((1 + r) * n, n) = (act.s1 * dz).matrix();
      if (order >= 2) {
        const auto ddz = z.middleCols((1 + dim + r) * n, n).array();
        a.middleCols((1 + dim + r) * n, n) = (act.s2 * dz.square() + act.s1 * ddz).matrix();
      }
    }
    if (cache != nullptr) {
      cache->preacts.push_back(std::move(z));
      cache->slopes.push_back({std::move(act.s1), std::move(act.s2), std::move(act.s3)});
    }
  }
  return {};
}

void backward_jets(const Mlp& net, const ForwardCache& cache, const JetBatch& seeds, Eigen::Ref<Eigen::VectorXd> grad) {
  const int order = cache.order;
  const int dim = cache.dim;
  const Eigen::Index n = cache.points;
  const int streams = stream_count(order, dim);
  HPVPINN_EXPECTS(seeds.size() == n, "seed batch size does not match the forward pass");
  HPVPINN_EXPECTS(static_cast<std::size_t>(grad.size()) >= net.parameter_count(), "gradient buffer too short");
  HPVPINN_EXPECTS(static_cast<int>(cache.inputs.size()) == net.affine_layers(), "cache does not match network");

  Eigen::MatrixXd zbar(1, n * streams);
  zbar.leftCols(n) = seeds.value;
  for (int r = 0; r < dim && order >= 1; ++r) {
    zbar.block(0, (1 + r) * n, 1, n) = seeds.d1.row(r);
    if (order >= 2) zbar.block(0, (1 + dim + r) * n, 1, n) = seeds.d2.row(r);
  }

  // Offsets of each layer's block inside the flat parameter vector.
  std::vector<Eigen::Index> offsets;
  Eigen::Index pos = 0;
  for (int l = 0; l < net.affine_layers(); ++l) {
    offsets.push_back(pos);
    pos += net.weight(l).size() + net.bias(l).size();
  }

  for (int l = net.affine_layers() - 1; l >= 0; --l) {
    const auto& w = net.weight(l);
    const Eigen::MatrixXd& a = cache.inputs[static_cast<std::size_t>(l)];
    RowMajorMap gw(grad.data() + offsets[static_cast<std::size_t>(l)], w.rows(), w.cols());
    gw.noalias() += zbar * a.transpose();
    grad.segment(offsets[static_cast<std::size_t>(l)] + w.size(), w.rows()) += zbar.leftCols(n).rowwise().sum();
    if (l == 0) break;

    const Eigen::MatrixXd abar = w.transpose() * zbar;
    const Eigen::MatrixXd& z = cache.preacts[static_cast<std::size_t>(l - 1)];
    const auto& [s1, s2, s3] = cache.slopes[static_cast<std::size_t>(l - 1)];
    zbar.resize(z.rows(), n * streams);
    Eigen::ArrayXXd zbar0 = abar.leftCols(n).array() * s1;
    for (int r = 0; r < dim && order >= 1; ++r) {
      const auto dz = z.middleCols((1 + r) * n, n).array();
      const auto abar1 = abar.middleCols((1 + r) * n, n).array();
      Eigen::ArrayXXd zbar1 = abar1 * s1;
      zbar0 += abar1 * s2 * dz;
      if (order >= 2) {
        const auto ddz = z.middleCols((1 + dim + r) * n, n).array();
        const auto abar2 = abar.middleCols((1 + dim + r) * n, n).array();
        zbar0 += abar2 * (s3 * dz.square() + s2 * ddz);
        zbar1 += 2.0 * abar2 * s2 * dz;
        zbar.middleCols((1 + dim + r) * n, n) = (abar2 * s1).matrix();
      }
      zbar.middleCols((1 + r) * n, n) = zbar1.matrix();
    }
    zbar.leftCols(n) = zbar0.matrix();
  }
}

JetValue evaluate_jet(const Mlp& net, std::span<const double> point) {
  HPVPINN_EXPECTS(static_cast<int>(point.size()) == net.input_dim(),
                  "point dimension does not match network input dimension");
  const Eigen::MatrixXd p =
      Eigen::Map<const Eigen::VectorXd>(point.data(), static_cast<Eigen::Index>(point.size()));
  const JetBatch b = forward_jets(net, p, 2);
  JetValue jet;
  jet.value = b.value(0);
  for (int r = 0; r < net.input_dim(); ++r) {
    jet.d_dx.push_back(b.d1(r, 0));
    jet.d2_dx2.push_back(b.d2(r, 0));
  }
  return jet;
}

ParamVector loss_gradient(const DifferentiableObjective& loss, const ParamVector& params) {
  HPVPINN_EXPECTS(static_cast<std::size_t>(params.size()) == loss.parameter_count(),
                  "parameter vector length does not match the objective");
  ParamVector grad;
  const double value = loss.value_and_gradient(params, &grad);
  if (!std::isfinite(value)) throw NonFiniteError("total", "loss is not finite");
  for (Eigen::Index i = 0; i < grad.size(); ++i)
    if (!std::isfinite(grad[i]))
      throw NonFiniteError("gradient", "gradient component " + std::to_string(i) + " is not finite");
  return grad;
}

ParamVector loss_gradient(const TapedLoss& loss, const ParamVector& params) {
  ad::Tape tape;
  std::vector<ad::Var> vars;
  vars.reserve(static_cast<std::size_t>(params.size()));
  for (Eigen::Index i = 0; i < params.size(); ++i) vars.emplace_back(params[i], tape.new_variable(), &tape);
  const ad::Var out = loss(vars);
  if (!std::isfinite(out.value())) throw NonFiniteError("loss", "taped loss is not finite");
  const auto adj = tape.adjoints(out.id());
  ParamVector grad(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) grad[i] = adj[static_cast<std::size_t>(vars[i].id())];
  return grad;
}

}  // namespace hpvpinn
