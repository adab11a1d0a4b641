#pragma once

#include <array>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hpvpinn/diffengine.hpp"
#include "hpvpinn/mesh.hpp"
#include "hpvpinn/network.hpp"
#include "hpvpinn/residuals.hpp"

namespace hpvpinn {

/// Multipliers of the constraint terms.
struct PenaltyWeights {
  double tau_b = 1.0;     ///< boundary
  double tau_0 = 0.0;     ///< initial condition
  double tau_star = 0.0;  ///< observations

  void validate() const;
};

/// Components of a loss. `variational` holds the residual term, whether it comes from
/// projected residuals (VPINN/VNN) or collocation (PINN).
struct LossBreakdown {
  double total = 0.0;
  double variational = 0.0;
  double boundary = 0.0;
  double initial = 0.0;
  double data = 0.0;
};

enum class LossCategory { variational, boundary, initial, data };
std::string_view to_string(LossCategory c);

/// One additive piece of a loss, sampling the trial function at its own points.
class LossTerm {
 public:
  virtual ~LossTerm() = default;
  virtual LossCategory category() const = 0;
  virtual const Eigen::MatrixXd& points() const = 0;
  virtual int required_order() const = 0;
  /// Returns the term value. When `seeds` is non-null, adds dL/d(jets) to it and
  /// dL/d(physical) to `physical_grad`.
  virtual double evaluate(const JetBatch& jets, std::span<const double> physical, JetBatch* seeds,
                          std::span<double> physical_grad) const = 0;
};

/// sum_e (1/K_e) sum_k |R_k^(e)|^2 over a list of elemental residual operators.
class VariationalTerm final : public LossTerm {
 public:
  explicit VariationalTerm(std::vector<ResidualOperator> elements);
  LossCategory category() const override { return LossCategory::variational; }
  const Eigen::MatrixXd& points() const override { return points_; }
  int required_order() const override { return order_; }
  double evaluate(const JetBatch& jets, std::span<const double> physical, JetBatch* seeds,
                  std::span<double> physical_grad) const override;

  const std::vector<ResidualOperator>& elements() const noexcept { return elements_; }

 private:
  std::vector<ResidualOperator> elements_;
  std::vector<Eigen::Index> offsets_;
  Eigen::MatrixXd points_;
  int order_ = 0;
};

/// (1/N) sum_i |(L u)(x_i) - f(x_i)|^2 at collocation points.
class StrongResidualTerm final : public LossTerm {
 public:
  StrongResidualTerm(StrongOperator op, Eigen::MatrixXd points);
  LossCategory category() const override { return LossCategory::variational; }
  const Eigen::MatrixXd& points() const override { return points_; }
  int required_order() const override { return op_.required_order(); }
  double evaluate(const JetBatch& jets, std::span<const double> physical, JetBatch* seeds,
                  std::span<double> physical_grad) const override;

 private:
  StrongOperator op_;
  Eigen::MatrixXd points_;
  Eigen::RowVectorXd forcing_;
};

/// weight * (1/N) sum_i |u(x_i) - target_i|^2.
class PointMisfitTerm final : public LossTerm {
 public:
  PointMisfitTerm(LossCategory category, Eigen::MatrixXd points, Eigen::RowVectorXd targets, double weight);
  LossCategory category() const override { return category_; }
  const Eigen::MatrixXd& points() const override { return points_; }
  int required_order() const override { return 0; }
  double evaluate(const JetBatch& jets, std::span<const double> physical, JetBatch* seeds,
                  std::span<double> physical_grad) const override;

 private:
  LossCategory category_;
  Eigen::MatrixXd points_;
  Eigen::RowVectorXd targets_;
  double weight_;
};

using LossTerms = std::vector<std::unique_ptr<LossTerm>>;

/// Total loss over (network parameters, trainable physical parameters).
///
/// Points of all terms needing the same jet order share one batched forward/backward pass.
class Objective final : public DifferentiableObjective {
 public:
  Objective(Mlp network_shape, LossTerms terms, std::vector<std::string> physical_names = {});

  std::size_t parameter_count() const override { return shape_.parameter_count() + physical_names_.size(); }
  std::size_t network_parameter_count() const { return shape_.parameter_count(); }
  const Mlp& network_shape() const noexcept { return shape_; }
  const std::vector<std::string>& physical_names() const noexcept { return physical_names_; }
  const LossTerms& terms() const noexcept { return terms_; }

  /// Loss at `params`; fills the exact gradient when `grad` is non-null.
  /// Throws NonFiniteError naming the first non-finite component.
  LossBreakdown evaluate(const ParamVector& params, ParamVector* grad = nullptr) const;

  /// Loss with the trial function replaced by an arbitrary evaluator (no gradient).
  LossBreakdown evaluate(const TrialFunction& trial, std::span<const double> physical = {}) const;

  double value_and_gradient(const ParamVector& params, ParamVector* grad) const override;

 private:
  struct Group {
    int order = 0;
    Eigen::MatrixXd points;
    std::vector<std::size_t> terms;
    std::vector<Eigen::Index> offsets;
  };

  LossBreakdown accumulate(const std::vector<JetBatch>& jets, std::span<const double> physical,
                           std::vector<JetBatch>* seeds, std::span<double> physical_grad) const;

  Mlp shape_;
  LossTerms terms_;
  std::vector<std::string> physical_names_;
  std::vector<Group> groups_;
};

// --- term builders ------------------------------------------------------------------------

/// Function-approximation residuals on every element (rules split at `breakpoints`).
LossTerms vnn_terms(const ScalarField& target, const Decomposition1D& decomposition, const TestBasis& basis,
                    const QuadratureRule& reference_rule, std::span<const double> breakpoints = {});

/// 1D Poisson: variational term + (tau_b / 2)(|u(a) - g|^2 + |u(b) - h|^2).
LossTerms vpinn_1d_terms(VariationalForm form, const Decomposition1D& decomposition, const TestBasis& basis,
                         const QuadratureRule& reference_rule, const ScalarField& f, double g, double h,
                         const PenaltyWeights& weights);

/// 2D Poisson: variational term + tau_b * mean |u - h|^2 over n_b points evenly spaced on the boundary.
LossTerms vpinn_2d_terms(VariationalForm form, const Decomposition2D& decomposition, const TestBasis& basis_x,
                         const TestBasis& basis_y, const QuadratureRule& reference_x,
                         const QuadratureRule& reference_y, const ScalarField& f, const ScalarField& boundary,
                         const PenaltyWeights& weights, int n_b);

/// Advection-diffusion on a (t, x) decomposition: variational residual only.
LossTerms ade_variational_terms(VariationalForm form, const Decomposition2D& decomposition, const TestBasis& basis_t,
                                const TestBasis& basis_x, const QuadratureRule& reference_t,
                                const QuadratureRule& reference_x, double velocity, Coefficient kappa);

/// Misfit term at explicit points; an empty point set is rejected when weight > 0.
std::unique_ptr<LossTerm> misfit_term(LossCategory category, const Eigen::MatrixXd& points, const ScalarField& data,
                                      double weight);

struct Observation {
  std::array<double, 2> point;  ///< (t, x)
  double value = 0.0;
};

std::unique_ptr<LossTerm> observation_term(std::span<const Observation> observations, double weight);

// --- direct loss evaluation ---------------------------------------------------------------

LossBreakdown vpinn_loss_1d(const TrialFunction& trial, VariationalForm form, const Decomposition1D& decomposition,
                            const TestBasis& basis, const QuadratureRule& reference_rule, const ScalarField& f,
                            double g, double h, const PenaltyWeights& weights);

LossBreakdown vpinn_loss_2d(const TrialFunction& trial, VariationalForm form, const Decomposition2D& decomposition,
                            const TestBasis& basis_x, const TestBasis& basis_y, const QuadratureRule& reference_x,
                            const QuadratureRule& reference_y, const ScalarField& f, const ScalarField& boundary,
                            const PenaltyWeights& weights, int n_b);

/// Data for a collocation loss. Empty point sets are allowed only when their weight is zero.
struct CollocationProblem {
  StrongOperator op;
  ScalarField boundary;  ///< h on boundary points
  ScalarField initial;   ///< g on initial points
};

LossBreakdown pinn_loss(const TrialFunction& trial, const Eigen::MatrixXd& residual_points,
                        const Eigen::MatrixXd& boundary_points, const Eigen::MatrixXd& initial_points,
                        const CollocationProblem& problem, const PenaltyWeights& weights,
                        std::span<const double> physical = {});

LossTerms pinn_terms(const Eigen::MatrixXd& residual_points, const Eigen::MatrixXd& boundary_points,
                     const Eigen::MatrixXd& initial_points, const CollocationProblem& problem,
                     const PenaltyWeights& weights);

/// (1/N) sum |u(t_i, x_i) - u*_i|^2; throws ContractViolation for an empty list.
double data_misfit(const TrialFunction& trial, std::span<const Observation> observations);
double data_misfit(const Mlp& net, std::span<const Observation> observations);

}  // namespace hpvpinn
