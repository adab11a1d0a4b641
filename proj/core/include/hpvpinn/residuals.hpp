#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hpvpinn/basis.hpp"
#include "hpvpinn/diffengine.hpp"
#include "hpvpinn/mesh.hpp"
#include "hpvpinn/network.hpp"
#include "hpvpinn/quadrature.hpp"

namespace hpvpinn {

/// How many times the operator term is integrated by parts onto the test function.
/// R1: none (needs u''), R2: once (needs u'), R3: twice (needs u and endpoint values).
enum class VariationalForm { R1, R2, R3 };

std::string_view to_string(VariationalForm form);
VariationalForm parse_form(std::string_view name);
int required_order(VariationalForm form);

/// Something whose jets can be sampled: the network, or a closed-form evaluator.
class TrialFunction {
 public:
  virtual ~TrialFunction() = default;
  virtual int input_dim() const = 0;
  virtual JetBatch jets(const Eigen::MatrixXd& points, int order) const = 0;
};

class NetworkTrial final : public TrialFunction {
 public:
  explicit NetworkTrial(const Mlp& net) : net_(net) {}
  int input_dim() const override { return net_.input_dim(); }
  /// Throws CapabilityError for order 2 on a ReLU network.
  JetBatch jets(const Eigen::MatrixXd& points, int order) const override;

 private:
  const Mlp& net_;
};

class FieldTrial final : public TrialFunction {
 public:
  FieldTrial(JetField field, int dim) : field_(std::move(field)), dim_(dim) {}
  int input_dim() const override { return dim_; }
  JetBatch jets(const Eigen::MatrixXd& points, int order) const override;

 private:
  JetField field_;
  int dim_;
};

/// A scalar coefficient: either the constant `value`, or `value * physical[parameter]` when it
/// reads a trainable physical parameter.
struct Coefficient {
  double value = 0.0;
  int parameter = -1;

  double resolve(std::span<const double> physical) const;
  Coefficient scaled(double s) const { return {value * s, parameter}; }
  static Coefficient constant(double v) { return {v, -1}; }
  static Coefficient trainable(int index, double scale = 1.0) { return {scale, index}; }
};

/// coefficient * matrix * (jet channel `order`/`axis` sampled at the operator's points).
struct ChannelTerm {
  int order = 0;
  int axis = 0;
  Eigen::MatrixXd matrix;  ///< K x n
  Coefficient coefficient = Coefficient::constant(1.0);
};

/// Elemental residual as a linear map of the trial jets:  R = sum_t c_t M_t u_t - F.
struct ResidualOperator {
  Eigen::MatrixXd points;   ///< dim x n
  std::vector<ChannelTerm> terms;
  Eigen::VectorXd forcing;  ///< F_k

  Eigen::Index size() const noexcept { return forcing.size(); }
  int required_order() const;
};

/// Row of a jet batch: order 0 -> values, 1 -> d/dx_axis, 2 -> d2/dx_axis^2.
using ConstChannel = Eigen::Ref<const Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;
using Channel = Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>>;

ConstChannel channel(const JetBatch& jets, int order, int axis);

Eigen::VectorXd apply(const ResidualOperator& op, const JetBatch& jets, std::span<const double> physical = {});

/// Reverse of apply: with rbar = dL/dR, accumulates dL/d(jets) into `seeds` and dL/d(physical)
/// into `physical_grad`.
void apply_adjoint(const ResidualOperator& op, const JetBatch& jets, const Eigen::VectorXd& rbar,
                   std::span<const double> physical, JetBatch& seeds, std::span<double> physical_grad);

/// Reference rule mapped to `element`, split at any interior `breakpoints`. Nodes that fall
/// exactly on a breakpoint are nudged one ulp into their own piece so that one-sided limits
/// of a discontinuous integrand are sampled.
QuadratureRule split_rule(const QuadratureRule& reference, Interval element, std::span<const double> breakpoints);

// --- operator builders; every rule argument is already mapped to the element ---------------

/// R_k = int (u - target) v_k.
ResidualOperator vnn_operator(const ScalarField& target, Interval element, const TestBasis& basis,
                              const QuadratureRule& rule);

/// -u'' = f on one element; compact test functions, boundary flux u' v dropped.
ResidualOperator poisson1d_operator(VariationalForm form, Interval element, const TestBasis& basis,
                                    const QuadratureRule& rule, const ScalarField& f);

/// u_xx + u_yy = f on one rectangle; residual index k = k1 * K2 + k2.
ResidualOperator poisson2d_operator(VariationalForm form, const Rect& element, const TestBasis& basis_x,
                                    const TestBasis& basis_y, const QuadratureRule& rule_x,
                                    const QuadratureRule& rule_y, const ScalarField& f);

/// u_t + v u_x - kappa u_xx = 0 on a (t, x) rectangle; input axis 0 is t, axis 1 is x.
/// Residual index k = k_t * K_x + k_x. Only R1 and R2 are defined.
ResidualOperator ade_operator(VariationalForm form, const Rect& element, const TestBasis& basis_t,
                              const TestBasis& basis_x, const QuadratureRule& rule_t, const QuadratureRule& rule_x,
                              double velocity, Coefficient kappa);

// --- direct residual evaluation ----------------------------------------------------------

Eigen::VectorXd vnn_residual(const TrialFunction& trial, const ScalarField& target, Interval element,
                             const TestBasis& basis, const QuadratureRule& rule);
Eigen::VectorXd vnn_residual(const Mlp& net, const ScalarField& target, Interval element, const TestBasis& basis,
                             const QuadratureRule& rule);

Eigen::VectorXd poisson1d_residual(VariationalForm form, const TrialFunction& trial, Interval element,
                                   const TestBasis& basis, const QuadratureRule& rule, const ScalarField& f);
Eigen::VectorXd poisson1d_residual(VariationalForm form, const Mlp& net, Interval element, const TestBasis& basis,
                                   const QuadratureRule& rule, const ScalarField& f);

Eigen::VectorXd poisson2d_residual(VariationalForm form, const TrialFunction& trial, const Rect& element,
                                   const TestBasis& basis_x, const TestBasis& basis_y, const QuadratureRule& rule_x,
                                   const QuadratureRule& rule_y, const ScalarField& f);
Eigen::VectorXd poisson2d_residual(VariationalForm form, const Mlp& net, const Rect& element,
                                   const TestBasis& basis_x, const TestBasis& basis_y, const QuadratureRule& rule_x,
                                   const QuadratureRule& rule_y, const ScalarField& f);

Eigen::VectorXd ade_residual(VariationalForm form, const TrialFunction& trial, const Rect& element,
                             const TestBasis& basis_t, const TestBasis& basis_x, const QuadratureRule& rule_t,
                             const QuadratureRule& rule_x, double velocity, double kappa);
Eigen::VectorXd ade_residual(VariationalForm form, const Mlp& net, const Rect& element, const TestBasis& basis_t,
                             const TestBasis& basis_x, const QuadratureRule& rule_t, const QuadratureRule& rule_x,
                             double velocity, double kappa);

// --- strong form (collocation) ----------------------------------------------------------

struct StrongTerm {
  int order = 0;
  int axis = 0;
  Coefficient coefficient = Coefficient::constant(1.0);
};

/// Pointwise operator L u = sum_t c_t d^{order} u / dx_axis^{order}; residual r = L u - f.
struct StrongOperator {
  int dim = 1;
  std::vector<StrongTerm> terms;
  ScalarField forcing;  ///< empty means f = 0

  int required_order() const;
};

StrongOperator poisson1d_strong(ScalarField f);
StrongOperator poisson2d_strong(ScalarField f);
StrongOperator ade_strong(double velocity, Coefficient kappa);

/// r_i = (L u)(x_i) - f(x_i) given jets at the points and the precomputed forcing values.
Eigen::RowVectorXd strong_residual(const StrongOperator& op, const JetBatch& jets, const Eigen::RowVectorXd& forcing,
                                   std::span<const double> physical = {});

}  // namespace hpvpinn
