#include "hpvpinn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "hpvpinn/error.hpp"

namespace hpvpinn {

namespace {

Eigen::MatrixXd concat_columns(const std::vector<const Eigen::MatrixXd*>& blocks, int dim) {
  Eigen::Index n = 0;
  for (const auto* b : blocks) n += b->cols();
  Eigen::MatrixXd out(dim, n);
  Eigen::Index at = 0;
  for (const auto* b : blocks) {
    out.middleCols(at, b->cols()) = *b;
    at += b->cols();
  }
  return out;
}

void add_slice(JetBatch& into, const JetBatch& from, Eigen::Index begin) {
  const Eigen::Index n = from.size();
  into.value.segment(begin, n) += from.value;
  if (from.d1.size() > 0) into.d1.middleCols(begin, n) += from.d1;
  if (from.d2.size() > 0) into.d2.middleCols(begin, n) += from.d2;
}

int jet_order(const JetBatch& jets) {
  if (jets.d2.size() > 0) return 2;
  if (jets.d1.size() > 0) return 1;
  return 0;
}

bool all_finite(const JetBatch& jets) {
  return jets.value.allFinite() && jets.d1.allFinite() && jets.d2.allFinite();
}

Eigen::MatrixXd points_matrix(const std::vector<std::array<double, 2>>& pts) {
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(0, static_cast<Eigen::Index>(i)) = pts[i][0];
    m(1, static_cast<Eigen::Index>(i)) = pts[i][1];
  }
  return m;
}

LossBreakdown evaluate_terms(const LossTerms& terms, const TrialFunction& trial, std::span<const double> physical) {
  LossBreakdown out;
  for (const auto& term : terms) {
    const JetBatch jets = trial.jets(term->points(), term->required_order());
    const double v = term->evaluate(jets, physical, nullptr, {});
    if (!std::isfinite(v)) throw NonFiniteError(std::string(to_string(term->category())), "loss term is not finite");
    switch (term->category()) {
      case LossCategory::variational: out.variational += v; break;
      case LossCategory::boundary: out.boundary += v; break;
      case LossCategory::initial: out.initial += v; break;
      case LossCategory::data: out.data += v; break;
    }
  }
  out.total = out.variational + out.boundary + out.initial + out.data;
  return out;
}

}  // namespace

void PenaltyWeights::validate() const {
  HPVPINN_EXPECTS(tau_b >= 0.0 && tau_0 >= 0.0 && tau_star >= 0.0, "penalty weights must be non-negative");
  HPVPINN_EXPECTS(std::isfinite(tau_b) && std::isfinite(tau_0) && std::isfinite(tau_star),
                  "penalty weights must be finite");
}

std::string_view to_string(LossCategory c) {
  switch (c) {
    case LossCategory::variational: return "variational";
    case LossCategory::boundary: return "boundary";
    case LossCategory::initial: return "initial";
    case LossCategory::data: return "data";
  }
  return "?";
}

// --- VariationalTerm ----------------------------------------------------------------------

VariationalTerm::VariationalTerm(std::vector<ResidualOperator> elements) : elements_(std::move(elements)) {
  HPVPINN_EXPECTS(!elements_.empty(), "variational term needs at least one element");
  const int dim = static_cast<int>(elements_.front().points.rows());
  std::vector<const Eigen::MatrixXd*> blocks;
  Eigen::Index at = 0;
  for (const auto& op : elements_) {
    HPVPINN_EXPECTS(op.points.rows() == dim, "elements disagree on input dimension");
    HPVPINN_EXPECTS(op.size() > 0, "element with no test functions");
    offsets_.push_back(at);
    at += op.points.cols();
    blocks.push_back(&op.points);
    order_ = std::max(order_, op.required_order());
  }
  points_ = concat_columns(blocks, dim);
}

double VariationalTerm::evaluate(const JetBatch& jets, std::span<const double> physical, JetBatch* seeds,
                                 std::span<double> physical_grad) const {
  double total = 0.0;
  for (std::size_t e = 0; e < elements_.size(); ++e) {
    const auto& op = elements_[e];
    const JetBatch local = jets.slice(offsets_[e], op.points.cols());
    const Eigen::VectorXd r = apply(op, local, physical);
    const double inv_k = 1.0 / static_cast<double>(op.size());
    total += r.squaredNorm() * inv_k;
    if (seeds != nullptr) {
      JetBatch local_seeds = JetBatch::zeros(static_cast<int>(op.points.rows()), op.points.cols(), jet_order(local));
      apply_adjoint(op, local, (2.0 * inv_k) * r, physical, local_seeds, physical_grad);
      add_slice(*seeds, local_seeds, offsets_[e]);
    }
  }
  return total;
}

// --- StrongResidualTerm -------------------------------------------------------------------

StrongResidualTerm::StrongResidualTerm(StrongOperator op, Eigen::MatrixXd points)
    : op_(std::move(op)), points_(std::move(points)) {
  HPVPINN_EXPECTS(points_.rows() == op_.dim, "collocation points have the wrong dimension");
  HPVPINN_EXPECTS(points_.cols() > 0, "collocation term needs at least one point");
  forcing_ = Eigen::RowVectorXd::Zero(points_.cols());
  if (op_.forcing) {
    for (Eigen::Index i = 0; i < points_.cols(); ++i) {
      forcing_(i) = op_.forcing(std::span<const double>(points_.col(i).data(), points_.rows()));
    }
  }
}

double StrongResidualTerm::evaluate(const JetBatch& jets, std::span<const double> physical, JetBatch* seeds,
                                    std::span<double> physical_grad) const {
  const Eigen::RowVectorXd r = strong_residual(op_, jets, forcing_, physical);
  const double inv_n = 1.0 / static_cast<double>(r.size());
  if (seeds != nullptr) {
    const Eigen::RowVectorXd rbar = (2.0 * inv_n) * r;
    for (const auto& t : op_.terms) {
      const double c = t.coefficient.resolve(physical);
      switch (t.order) {
        case 0: seeds->value += c * rbar; break;
        case 1: seeds->d1.row(t.axis) += c * rbar; break;
        default: seeds->d2.row(t.axis) += c * rbar; break;
      }
      if (t.coefficient.parameter >= 0) {
        physical_grad[static_cast<std::size_t>(t.coefficient.parameter)] +=
            t.coefficient.value * rbar.dot(channel(jets, t.order, t.axis));
      }
    }
  }
  return r.squaredNorm() * inv_n;
}

// --- PointMisfitTerm ----------------------------------------------------------------------

PointMisfitTerm::PointMisfitTerm(LossCategory category, Eigen::MatrixXd points, Eigen::RowVectorXd targets,
                                 double weight)
    : category_(category), points_(std::move(points)), targets_(std::move(targets)), weight_(weight) {
  HPVPINN_EXPECTS(points_.cols() > 0, "misfit term needs at least one point");
  HPVPINN_EXPECTS(points_.cols() == targets_.size(), "one target per point is required");
  HPVPINN_EXPECTS(weight_ >= 0.0 && std::isfinite(weight_), "misfit weight must be finite and non-negative");
}

double PointMisfitTerm::evaluate(const JetBatch& jets, std::span<const double>, JetBatch* seeds,
                                 std::span<double>) const {
  const Eigen::RowVectorXd diff = jets.value - targets_;
  const double scale = weight_ / static_cast<double>(diff.size());
  if (seeds != nullptr) seeds->value += (2.0 * scale) * diff;
  return scale * diff.squaredNorm();
}

// --- Objective ----------------------------------------------------------------------------

Objective::Objective(Mlp network_shape, LossTerms terms, std::vector<std::string> physical_names)
    : shape_(std::move(network_shape)), terms_(std::move(terms)), physical_names_(std::move(physical_names)) {
  HPVPINN_EXPECTS(!terms_.empty(), "objective needs at least one term");
  const int dim = shape_.input_dim();
  for (int order = 0; order <= 2; ++order) {
    Group g;
    g.order = order;
    std::vector<const Eigen::MatrixXd*> blocks;
    Eigen::Index at = 0;
    for (std::size_t t = 0; t < terms_.size(); ++t) {
      HPVPINN_EXPECTS(terms_[t] != nullptr, "null loss term");
      if (terms_[t]->required_order() != order) continue;
      HPVPINN_EXPECTS(terms_[t]->points().rows() == dim, "loss term points do not match the network input");
      g.terms.push_back(t);
      g.offsets.push_back(at);
      at += terms_[t]->points().cols();
      blocks.push_back(&terms_[t]->points());
    }
    if (g.terms.empty()) continue;
    if (order == 2 && !shape_.supports_second_derivative()) {
      throw CapabilityError("a loss term needs second derivatives, which the activation does not provide");
    }
    g.points = concat_columns(blocks, dim);
    groups_.push_back(std::move(g));
  }
}

LossBreakdown Objective::accumulate(const std::vector<JetBatch>& jets, std::span<const double> physical,
                                    std::vector<JetBatch>* seeds, std::span<double> physical_grad) const {
  LossBreakdown out;
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    const Group& g = groups_[gi];
    for (std::size_t j = 0; j < g.terms.size(); ++j) {
      const LossTerm& term = *terms_[g.terms[j]];
      const Eigen::Index n = term.points().cols();
      const JetBatch local = jets[gi].slice(g.offsets[j], n);
      double v = 0.0;
      if (seeds != nullptr) {
        JetBatch local_seeds = JetBatch::zeros(shape_.input_dim(), n, g.order);
        v = term.evaluate(local, physical, &local_seeds, physical_grad);
        add_slice((*seeds)[gi], local_seeds, g.offsets[j]);
      } else {
        v = term.evaluate(local, physical, nullptr, {});
      }
      if (!std::isfinite(v)) throw NonFiniteError(std::string(to_string(term.category())), "loss term is not finite");
      switch (term.category()) {
        case LossCategory::variational: out.variational += v; break;
        case LossCategory::boundary: out.boundary += v; break;
        case LossCategory::initial: out.initial += v; break;
        case LossCategory::data: out.data += v; break;
      }
    }
  }
  out.total = out.variational + out.boundary + out.initial + out.data;
  return out;
}

LossBreakdown Objective::evaluate(const ParamVector& params, ParamVector* grad) const {
  HPVPINN_EXPECTS(static_cast<std::size_t>(params.size()) == parameter_count(), "parameter vector has the wrong size");
  const auto n_net = static_cast<Eigen::Index>(shape_.parameter_count());
  Mlp net = shape_;
  net.unpack(std::span<const double>(params.data(), static_cast<std::size_t>(n_net)));
  std::span<const double> physical(params.data() + n_net, physical_names_.size());

  std::vector<JetBatch> jets;
  std::vector<ForwardCache> caches(groups_.size());
  jets.reserve(groups_.size());
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) {
    jets.push_back(forward_jets(net, groups_[gi].points, groups_[gi].order, grad ? &caches[gi] : nullptr));
    if (!all_finite(jets.back())) throw NonFiniteError("network output", "network produced non-finite values");
  }

  if (grad == nullptr) return accumulate(jets, physical, nullptr, {});

  grad->setZero(params.size());
  std::vector<JetBatch> seeds;
  for (const auto& g : groups_) seeds.push_back(JetBatch::zeros(shape_.input_dim(), g.points.cols(), g.order));
  std::span<double> physical_grad(grad->data() + n_net, physical_names_.size());
  const LossBreakdown out = accumulate(jets, physical, &seeds, physical_grad);
  for (std::size_t gi = 0; gi < groups_.size(); ++gi) backward_jets(net, caches[gi], seeds[gi], grad->head(n_net));
  if (!grad->allFinite()) throw NonFiniteError("gradient", "loss gradient is not finite");
  return out;
}

LossBreakdown Objective::evaluate(const TrialFunction& trial, std::span<const double> physical) const {
  HPVPINN_EXPECTS(physical.size() == physical_names_.size(), "physical parameter count mismatch");
  return evaluate_terms(terms_, trial, physical);
}

double Objective::value_and_gradient(const ParamVector& params, ParamVector* grad) const {
  return evaluate(params, grad).total;
}

// --- builders -----------------------------------------------------------------------------

LossTerms vnn_terms(const ScalarField& target, const Decomposition1D& decomposition, const TestBasis& basis,
                    const QuadratureRule& reference_rule, std::span<const double> breakpoints) {
  std::vector<ResidualOperator> ops;
  for (int e = 0; e < decomposition.elements(); ++e) {
    const Interval el = decomposition.element(e);
    ops.push_back(vnn_operator(target, el, basis, split_rule(reference_rule, el, breakpoints)));
  }
  LossTerms terms;
  terms.push_back(std::make_unique<VariationalTerm>(std::move(ops)));
  return terms;
}

LossTerms vpinn_1d_terms(VariationalForm form, const Decomposition1D& decomposition, const TestBasis& basis,
                         const QuadratureRule& reference_rule, const ScalarField& f, double g, double h,
                         const PenaltyWeights& weights) {
  weights.validate();
  std::vector<ResidualOperator> ops;
  for (int e = 0; e < decomposition.elements(); ++e) {
    const Interval el = decomposition.element(e);
    ops.push_back(poisson1d_operator(form, el, basis, map_to_element(reference_rule, el.a, el.b), f));
  }
  LossTerms terms;
  terms.push_back(std::make_unique<VariationalTerm>(std::move(ops)));
  if (weights.tau_b > 0.0) {
    const Interval d = decomposition.domain();
    Eigen::MatrixXd pts(1, 2);
    pts << d.a, d.b;
    Eigen::RowVectorXd targets(2);
    targets << g, h;
    terms.push_back(std::make_unique<PointMisfitTerm>(LossCategory::boundary, pts, targets, weights.tau_b));
  }
  return terms;
}

LossTerms vpinn_2d_terms(VariationalForm form, const Decomposition2D& decomposition, const TestBasis& basis_x,
                         const TestBasis& basis_y, const QuadratureRule& reference_x,
                         const QuadratureRule& reference_y, const ScalarField& f, const ScalarField& boundary,
                         const PenaltyWeights& weights, int n_b) {
  weights.validate();
  HPVPINN_EXPECTS(n_b >= 0, "boundary point count must be non-negative");
  std::vector<ResidualOperator> ops;
  for (int i = 0; i < decomposition.elements(); ++i) {
    const Rect r = decomposition.element(i);
    ops.push_back(poisson2d_operator(form, r, basis_x, basis_y, map_to_element(reference_x, r.x.a, r.x.b),
                                     map_to_element(reference_y, r.y.a, r.y.b), f));
  }
  LossTerms terms;
  terms.push_back(std::make_unique<VariationalTerm>(std::move(ops)));
  if (weights.tau_b > 0.0) {
    if (n_b == 0) throw ConfigurationError("boundary penalty is positive but no boundary points were requested");
    if (!boundary) throw ConfigurationError("boundary penalty is positive but no boundary data was given");
    const Eigen::MatrixXd pts = points_matrix(sample_boundary(decomposition.outer_boundary(), n_b));
    terms.push_back(misfit_term(LossCategory::boundary, pts, boundary, weights.tau_b));
  }
  return terms;
}

LossTerms ade_variational_terms(VariationalForm form, const Decomposition2D& decomposition, const TestBasis& basis_t,
                                const TestBasis& basis_x, const QuadratureRule& reference_t,
                                const QuadratureRule& reference_x, double velocity, Coefficient kappa) {
  std::vector<ResidualOperator> ops;
  for (int i = 0; i < decomposition.elements(); ++i) {
    const Rect r = decomposition.element(i);
    ops.push_back(ade_operator(form, r, basis_t, basis_x, map_to_element(reference_t, r.x.a, r.x.b),
                               map_to_element(reference_x, r.y.a, r.y.b), velocity, kappa));
  }
  LossTerms terms;
  terms.push_back(std::make_unique<VariationalTerm>(std::move(ops)));
  return terms;
}

std::unique_ptr<LossTerm> misfit_term(LossCategory category, const Eigen::MatrixXd& points, const ScalarField& data,
                                      double weight) {
  HPVPINN_EXPECTS(static_cast<bool>(data), "misfit term needs data");
  if (points.cols() == 0) {
    throw ConfigurationError(std::string(to_string(category)) + " weight is positive but there are no points");
  }
  Eigen::RowVectorXd targets(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    targets(i) = data(std::span<const double>(points.col(i).data(), points.rows()));
  }
  return std::make_unique<PointMisfitTerm>(category, points, targets, weight);
}

std::unique_ptr<LossTerm> observation_term(std::span<const Observation> observations, double weight) {
  HPVPINN_EXPECTS(!observations.empty(), "observation list is empty");
  Eigen::MatrixXd pts(2, static_cast<Eigen::Index>(observations.size()));
  Eigen::RowVectorXd targets(pts.cols());
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    pts(0, c) = observations[i].point[0];
    pts(1, c) = observations[i].point[1];
    targets(c) = observations[i].value;
  }
  return std::make_unique<PointMisfitTerm>(LossCategory::data, pts, targets, weight);
}

LossTerms pinn_terms(const Eigen::MatrixXd& residual_points, const Eigen::MatrixXd& boundary_points,
                     const Eigen::MatrixXd& initial_points, const CollocationProblem& problem,
                     const PenaltyWeights& weights) {
  weights.validate();
  LossTerms terms;
  terms.push_back(std::make_unique<StrongResidualTerm>(problem.op, residual_points));
  if (weights.tau_b > 0.0) {
    if (!problem.boundary) throw ConfigurationError("boundary penalty is positive but no boundary data was given");
    terms.push_back(misfit_term(LossCategory::boundary, boundary_points, problem.boundary, weights.tau_b));
  }
  if (weights.tau_0 > 0.0) {
    if (!problem.initial) throw ConfigurationError("initial penalty is positive but no initial data was given");
    terms.push_back(misfit_term(LossCategory::initial, initial_points, problem.initial, weights.tau_0));
  }
  return terms;
}

LossBreakdown vpinn_loss_1d(const TrialFunction& trial, VariationalForm form, const Decomposition1D& decomposition,
                            const TestBasis& basis, const QuadratureRule& reference_rule, const ScalarField& f,
                            double g, double h, const PenaltyWeights& weights) {
  return evaluate_terms(vpinn_1d_terms(form, decomposition, basis, reference_rule, f, g, h, weights), trial, {});
}

LossBreakdown vpinn_loss_2d(const TrialFunction& trial, VariationalForm form, const Decomposition2D& decomposition,
                            const TestBasis& basis_x, const TestBasis& basis_y, const QuadratureRule& reference_x,
                            const QuadratureRule& reference_y, const ScalarField& f, const ScalarField& boundary,
                            const PenaltyWeights& weights, int n_b) {
  return evaluate_terms(vpinn_2d_terms(form, decomposition, basis_x, basis_y, reference_x, reference_y, f, boundary,
                                       weights, n_b),
                        trial, {});
}

LossBreakdown pinn_loss(const TrialFunction& trial, const Eigen::MatrixXd& residual_points,
                        const Eigen::MatrixXd& boundary_points, const Eigen::MatrixXd& initial_points,
                        const CollocationProblem& problem, const PenaltyWeights& weights,
                        std::span<const double> physical) {
  return evaluate_terms(pinn_terms(residual_points, boundary_points, initial_points, problem, weights), trial,
                        physical);
}

double data_misfit(const TrialFunction& trial, std::span<const Observation> observations) {
  const auto term = observation_term(observations, 1.0);
  return term->evaluate(trial.jets(term->points(), 0), {}, nullptr, {});
}

double data_misfit(const Mlp& net, std::span<const Observation> observations) {
  return data_misfit(NetworkTrial(net), observations);
}

}  // namespace hpvpinn
