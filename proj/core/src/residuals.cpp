#include "hpvpinn/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "hpvpinn/error.hpp"

namespace hpvpinn {

std::string_view to_string(VariationalForm form) {
  switch (form) {
    case VariationalForm::R1: return "R1";
    case VariationalForm::R2: return "R2";
    case VariationalForm::R3: return "R3";
  }
  return "?";
}

VariationalForm parse_form(std::string_view name) {
  if (name == "R1" || name == "r1" || name == "1") return VariationalForm::R1;
  if (name == "R2" || name == "r2" || name == "2") return VariationalForm::R2;
  if (name == "R3" || name == "r3" || name == "3") return VariationalForm::R3;
  throw ContractViolation("unknown variational form '" + std::string(name) + "'");
}

int required_order(VariationalForm form) {
  return form == VariationalForm::R1 ? 2 : (form == VariationalForm::R2 ? 1 : 0);
}

JetBatch NetworkTrial::jets(const Eigen::MatrixXd& points, int order) const {
  if (order >= 2 && !net_.supports_second_derivative())
    throw CapabilityError("ReLU networks have no usable second derivative; use a smooth activation or form R2/R3");
  return forward_jets(net_, points, order);
}

JetBatch FieldTrial::jets(const Eigen::MatrixXd& points, int order) const {
  HPVPINN_EXPECTS(points.rows() == dim_, "point dimension mismatch");
  JetBatch out = JetBatch::zeros(dim_, points.cols(), order);
  std::vector<double> p(static_cast<std::size_t>(dim_));
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    for (int r = 0; r < dim_; ++r) p[static_cast<std::size_t>(r)] = points(r, j);
    const JetValue jet = field_(p);
    out.value(j) = jet.value;
    for (int r = 0; r < dim_; ++r) {
      if (order >= 1) out.d1(r, j) = jet.d_dx[static_cast<std::size_t>(r)];
      if (order >= 2) out.d2(r, j) = jet.d2_dx2[static_cast<std::size_t>(r)];
    }
  }
  return out;
}

double Coefficient::resolve(std::span<const double> physical) const {
  if (parameter < 0) return value;
  HPVPINN_EXPECTS(static_cast<std::size_t>(parameter) < physical.size(), "physical parameter index out of range");
  return value * physical[static_cast<std::size_t>(parameter)];
}

int ResidualOperator::required_order() const {
  int o = 0;
  for (const auto& t : terms) o = std::max(o, t.order);
  return o;
}

ConstChannel channel(const JetBatch& jets, int order, int axis) {
  if (order == 0) return jets.value;
  const Eigen::MatrixXd& m = order == 1 ? jets.d1 : jets.d2;
  HPVPINN_EXPECTS(axis >= 0 && axis < m.rows(), "jet channel not available at this order/axis");
  return m.row(axis);
}

namespace {

Channel channel_mut(JetBatch& jets, int order, int axis) {
  if (order == 0) return jets.value;
  Eigen::MatrixXd& m = order == 1 ? jets.d1 : jets.d2;
  HPVPINN_EXPECTS(axis >= 0 && axis < m.rows(), "jet seed channel not available at this order/axis");
  return m.row(axis);
}

std::string describe_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

double checked(const ScalarField& f, std::span<const double> p, const char* what) {
  const double v = f(p);
  if (!std::isfinite(v)) throw EvaluationError(std::string(what) + " is not finite at node " + describe_point(p));
  return v;
}

// Reference coordinate of physical nodes on [a, b].
std::vector<double> to_reference(const std::vector<double>& x, Interval e) {
  std::vector<double> xi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    xi[i] = std::clamp(2.0 * (x[i] - e.a) / e.width() - 1.0, -1.0, 1.0);
  return xi;
}

void check_rule_in(const QuadratureRule& rule, Interval e) {
  HPVPINN_EXPECTS(rule.size() >= 1, "quadrature rule is empty");
  const double tol = 1e-12 * std::max(1.0, e.width());
  for (double x : rule.nodes)
    HPVPINN_EXPECTS(x >= e.a - tol && x <= e.b + tol, "quadrature rule is not mapped to the element");
}

// Tables for one axis, derivatives already scaled to physical coordinates.
struct AxisTables {
  Eigen::MatrixXd v, dv, ddv;  // K x Q
  Eigen::RowVectorXd w;        // 1 x Q
  Eigen::VectorXd dv_a, dv_b;  // K, first derivative at the element ends
};

AxisTables axis_tables(const TestBasis& basis, Interval e, const QuadratureRule& rule) {
  check_rule_in(rule, e);
  const auto xi = to_reference(rule.nodes, e);
  BasisTable t = tabulate(basis, xi);
  const double jac = 2.0 / e.width();
  AxisTables a;
  a.v = std::move(t.v);
  a.dv = t.dv * jac;
  a.ddv = t.ddv * (jac * jac);
  a.w = Eigen::Map<const Eigen::RowVectorXd>(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
  const double ends[2] = {-1.0, 1.0};
  const BasisTable te = tabulate(basis, ends);
  a.dv_a = te.dv.col(0) * jac;
  a.dv_b = te.dv.col(1) * jac;
  return a;
}

Eigen::MatrixXd weighted(const Eigen::MatrixXd& m, const Eigen::RowVectorXd& w) {
  return m.array().rowwise() * w.array();
}

// out((k1*K2 + k2), (i*Q2 + j)) = a(k1, i) * b(k2, j)
Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index k1 = 0; k1 < a.rows(); ++k1)
    for (Eigen::Index i = 0; i < a.cols(); ++i)
      out.block(k1 * b.rows(), i * b.cols(), b.rows(), b.cols()) = a(k1, i) * b;
  return out;
}

void require_compact(const TestBasis& b) {
  HPVPINN_EXPECTS(b.kind == BasisKind::compact_poisson,
                  "PDE residual forms require test functions vanishing at element ends (compact_poisson)");
}

// Tensor-product points (i outer) plus optional extra columns.
Eigen::MatrixXd tensor_points(const QuadratureRule& rx, const QuadratureRule& ry) {
  const auto nx = static_cast<Eigen::Index>(rx.size()), ny = static_cast<Eigen::Index>(ry.size());
  Eigen::MatrixXd p(2, nx * ny);
  for (Eigen::Index i = 0; i < nx; ++i)
    for (Eigen::Index j = 0; j < ny; ++j) {
      p(0, i * ny + j) = rx.nodes[static_cast<std::size_t>(i)];
      p(1, i * ny + j) = ry.nodes[static_cast<std::size_t>(j)];
    }
  return p;
}

Eigen::VectorXd tensor_forcing(const ScalarField& f, const Eigen::MatrixXd& pts, const Eigen::MatrixXd& test_w) {
  Eigen::VectorXd fv(pts.cols());
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    const double p[2] = {pts(0, j), pts(1, j)};
    fv[j] = f ? checked(f, p, "forcing") : 0.0;
  }
  return test_w * fv;
}

}  // namespace

Eigen::VectorXd apply(const ResidualOperator& op, const JetBatch& jets, std::span<const double> physical) {
  HPVPINN_EXPECTS(jets.size() == op.points.cols(), "jet batch does not match operator points");
  Eigen::VectorXd r = -op.forcing;
  for (const auto& t : op.terms)
    r.noalias() += t.coefficient.resolve(physical) * (t.matrix * channel(jets, t.order, t.axis).transpose());
  return r;
}

void apply_adjoint(const ResidualOperator& op, const JetBatch& jets, const Eigen::VectorXd& rbar,
                   std::span<const double> physical, JetBatch& seeds, std::span<double> physical_grad) {
  for (const auto& t : op.terms) {
    const double c = t.coefficient.resolve(physical);
    channel_mut(seeds, t.order, t.axis).noalias() += c * (rbar.transpose() * t.matrix);
    if (t.coefficient.parameter >= 0) {
      HPVPINN_EXPECTS(static_cast<std::size_t>(t.coefficient.parameter) < physical_grad.size(),
                      "physical gradient buffer too short");
      physical_grad[static_cast<std::size_t>(t.coefficient.parameter)] +=
          t.coefficient.value * rbar.dot(t.matrix * channel(jets, t.order, t.axis).transpose());
    }
  }
}

QuadratureRule split_rule(const QuadratureRule& reference, Interval element, std::span<const double> breakpoints) {
  std::vector<double> cuts{element.a};
  for (double b : breakpoints)
    if (b > element.a && b < element.b) cuts.push_back(b);
  cuts.push_back(element.b);
  std::sort(cuts.begin(), cuts.end());
  if (cuts.size() == 2) return map_to_element(reference, element.a, element.b);

  QuadratureRule out;
  out.family = reference.family;
  for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
    const double a = cuts[piece], b = cuts[piece + 1];
    QuadratureRule m = map_to_element(reference, a, b);
    for (std::size_t i = 0; i < m.size(); ++i) {
      double x = m.nodes[i];
      if (piece > 0 && x <= a) x = std::nextafter(a, b);
      if (piece + 2 < cuts.size() && x >= b) x = std::nextafter(b, a);
      out.nodes.push_back(x);
      out.weights.push_back(m.weights[i]);
    }
  }
  return out;
}

ResidualOperator vnn_operator(const ScalarField& target, Interval element, const TestBasis& basis,
                              const QuadratureRule& rule) {
  const AxisTables ax = axis_tables(basis, element, rule);
  const auto n = static_cast<Eigen::Index>(rule.size());
  ResidualOperator op;
  op.points = Eigen::Map<const Eigen::RowVectorXd>(rule.nodes.data(), n);
  const Eigen::MatrixXd vw = weighted(ax.v, ax.w);
  Eigen::VectorXd tv(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double p[1] = {rule.nodes[static_cast<std::size_t>(j)]};
    tv[j] = checked(target, p, "target");
  }
  op.forcing = vw * tv;
  op.terms.push_back({0, 0, vw, Coefficient::constant(1.0)});
  return op;
}

ResidualOperator poisson1d_operator(VariationalForm form, Interval element, const TestBasis& basis,
                                    const QuadratureRule& rule, const ScalarField& f) {
  require_compact(basis);
  const AxisTables ax = axis_tables(basis, element, rule);
  const auto n = static_cast<Eigen::Index>(rule.size());
  const Eigen::MatrixXd vw = weighted(ax.v, ax.w);

  ResidualOperator op;
  const Eigen::RowVectorXd nodes = Eigen::Map<const Eigen::RowVectorXd>(rule.nodes.data(), n);
  Eigen::VectorXd fv(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double p[1] = {nodes[j]};
    fv[j] = f ? checked(f, p, "forcing") : 0.0;
  }
  op.forcing = vw * fv;

  switch (form) {
    case VariationalForm::R1:
      // -int u'' v
      op.points = nodes;
      op.terms.push_back({2, 0, -vw, Coefficient::constant(1.0)});
      break;
    case VariationalForm::R2:
      // int u' v'   (the flux u' v vanishes at both ends)
      op.points = nodes;
      op.terms.push_back({1, 0, weighted(ax.dv, ax.w), Coefficient::constant(1.0)});
      break;
    case VariationalForm::R3: {
      // -int u v'' + [u v']_a^b
      op.points.resize(1, n + 2);
      op.points << nodes, element.a, element.b;
      Eigen::MatrixXd m(basis.count, n + 2);
      m.leftCols(n) = -weighted(ax.ddv, ax.w);
      m.col(n) = -ax.dv_a;
      m.col(n + 1) = ax.dv_b;
      op.terms.push_back({0, 0, std::move(m), Coefficient::constant(1.0)});
      break;
    }
  }
  return op;
}

ResidualOperator poisson2d_operator(VariationalForm form, const Rect& element, const TestBasis& basis_x,
                                    const TestBasis& basis_y, const QuadratureRule& rule_x,
                                    const QuadratureRule& rule_y, const ScalarField& f) {
  require_compact(basis_x);
  require_compact(basis_y);
  const AxisTables ax = axis_tables(basis_x, element.x, rule_x);
  const AxisTables ay = axis_tables(basis_y, element.y, rule_y);
  const Eigen::MatrixXd vx = weighted(ax.v, ax.w), vy = weighted(ay.v, ay.w);
  const Eigen::MatrixXd mass = kron(vx, vy);
  const Eigen::Index nq = mass.cols();

  ResidualOperator op;
  const Eigen::MatrixXd interior = tensor_points(rule_x, rule_y);
  op.forcing = tensor_forcing(f, interior, mass);

  switch (form) {
    case VariationalForm::R1:
      op.points = interior;
      op.terms.push_back({2, 0, mass, Coefficient::constant(1.0)});
      op.terms.push_back({2, 1, mass, Coefficient::constant(1.0)});
      break;
    case VariationalForm::R2:
      op.points = interior;
      op.terms.push_back({1, 0, -kron(weighted(ax.dv, ax.w), vy), Coefficient::constant(1.0)});
      op.terms.push_back({1, 1, -kron(vx, weighted(ay.dv, ay.w)), Coefficient::constant(1.0)});
      break;
    case VariationalForm::R3: {
      // int u (phi'' psi + phi psi'') - int [u phi']_x psi dy - int [u psi']_y phi dx
      const auto qx = static_cast<Eigen::Index>(rule_x.size()), qy = static_cast<Eigen::Index>(rule_y.size());
      const Eigen::Index k1n = basis_x.count, k2n = basis_y.count;
      op.points.resize(2, nq + 2 * qy + 2 * qx);
      op.points.leftCols(nq) = interior;
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k1n * k2n, op.points.cols());
      m.leftCols(nq) = kron(weighted(ax.ddv, ax.w), vy) + kron(vx, weighted(ay.ddv, ay.w));
      Eigen::Index col = nq;
      // x = b and x = a edges, sampled at the y nodes.
      for (int side = 0; side < 2; ++side) {
        const double xe = side == 0 ? element.x.b : element.x.a;
        const Eigen::VectorXd& dphi = side == 0 ? ax.dv_b : ax.dv_a;
        const double sign = side == 0 ? -1.0 : 1.0;
        for (Eigen::Index j = 0; j < qy; ++j, ++col) {
          op.points(0, col) = xe;
          op.points(1, col) = rule_y.nodes[static_cast<std::size_t>(j)];
          for (Eigen::Index k1 = 0; k1 < k1n; ++k1)
            m.block(k1 * k2n, col, k2n, 1) = sign * dphi[k1] * vy.col(j);
        }
      }
      // y = b and y = a edges, sampled at the x nodes.
      for (int side = 0; side < 2; ++side) {
        const double ye = side == 0 ? element.y.b : element.y.a;
        const Eigen::VectorXd& dpsi = side == 0 ? ay.dv_b : ay.dv_a;
        const double sign = side == 0 ? -1.0 : 1.0;
        for (Eigen::Index i = 0; i < qx; ++i, ++col) {
          op.points(0, col) = rule_x.nodes[static_cast<std::size_t>(i)];
          op.points(1, col) = ye;
          for (Eigen::Index k1 = 0; k1 < k1n; ++k1)
            m.block(k1 * k2n, col, k2n, 1) = sign * vx(k1, i) * dpsi;
        }
      }
      op.terms.push_back({0, 0, std::move(m), Coefficient::constant(1.0)});
      break;
    }
  }
  return op;
}

ResidualOperator ade_operator(VariationalForm form, const Rect& element, const TestBasis& basis_t,
                              const TestBasis& basis_x, const QuadratureRule& rule_t, const QuadratureRule& rule_x,
                              double velocity, Coefficient kappa) {
  HPVPINN_EXPECTS(form != VariationalForm::R3, "the advection-diffusion residual supports forms R1 and R2 only");
  require_compact(basis_t);
  require_compact(basis_x);
  const AxisTables at = axis_tables(basis_t, element.x, rule_t);
  const AxisTables ax = axis_tables(basis_x, element.y, rule_x);
  const Eigen::MatrixXd vt = weighted(at.v, at.w), vx = weighted(ax.v, ax.w);
  const Eigen::MatrixXd mass = kron(vt, vx);

  ResidualOperator op;
  op.points = tensor_points(rule_t, rule_x);
  op.forcing = Eigen::VectorXd::Zero(mass.rows());
  op.terms.push_back({1, 0, mass, Coefficient::constant(1.0)});
  op.terms.push_back({1, 1, mass, Coefficient::constant(velocity)});
  if (form == VariationalForm::R1) {
    // -kappa int u_xx phi psi
    op.terms.push_back({2, 1, mass, kappa.scaled(-1.0)});
  } else {
    // kappa int u_x phi psi'   (the flux vanishes at the x ends of the element)
    op.terms.push_back({1, 1, kron(vt, weighted(ax.dv, ax.w)), kappa});
  }
  return op;
}

Eigen::VectorXd vnn_residual(const TrialFunction& trial, const ScalarField& target, Interval element,
                             const TestBasis& basis, const QuadratureRule& rule) {
  const auto op = vnn_operator(target, element, basis, rule);
  return apply(op, trial.jets(op.points, op.required_order()));
}

Eigen::VectorXd vnn_residual(const Mlp& net, const ScalarField& target, Interval element, const TestBasis& basis,
                             const QuadratureRule& rule) {
  return vnn_residual(NetworkTrial(net), target, element, basis, rule);
}

Eigen::VectorXd poisson1d_residual(VariationalForm form, const TrialFunction& trial, Interval element,
                                   const TestBasis& basis, const QuadratureRule& rule, const ScalarField& f) {
  const auto op = poisson1d_operator(form, element, basis, rule, f);
  return apply(op, trial.jets(op.points, op.required_order()));
}

Eigen::VectorXd poisson1d_residual(VariationalForm form, const Mlp& net, Interval element, const TestBasis& basis,
                                   const QuadratureRule& rule, const ScalarField& f) {
  return poisson1d_residual(form, NetworkTrial(net), element, basis, rule, f);
}

Eigen::VectorXd poisson2d_residual(VariationalForm form, const TrialFunction& trial, const Rect& element,
                                   const TestBasis& basis_x, const TestBasis& basis_y, const QuadratureRule& rule_x,
                                   const QuadratureRule& rule_y, const ScalarField& f) {
  const auto op = poisson2d_operator(form, element, basis_x, basis_y, rule_x, rule_y, f);
  return apply(op, trial.jets(op.points, op.required_order()));
}

Eigen::VectorXd poisson2d_residual(VariationalForm form, const Mlp& net, const Rect& element,
                                   const TestBasis& basis_x, const TestBasis& basis_y, const QuadratureRule& rule_x,
                                   const QuadratureRule& rule_y, const ScalarField& f) {
  return poisson2d_residual(form, NetworkTrial(net), element, basis_x, basis_y, rule_x, rule_y, f);
}

Eigen::VectorXd ade_residual(VariationalForm form, const TrialFunction& trial, const Rect& element,
                             const TestBasis& basis_t, const TestBasis& basis_x, const QuadratureRule& rule_t,
                             const QuadratureRule& rule_x, double velocity, double kappa) {
  const auto op = ade_operator(form, element, basis_t, basis_x, rule_t, rule_x, velocity, Coefficient::constant(kappa));
  return apply(op, trial.jets(op.points, op.required_order()));
}

Eigen::VectorXd ade_residual(VariationalForm form, const Mlp& net, const Rect& element, const TestBasis& basis_t,
                             const TestBasis& basis_x, const QuadratureRule& rule_t, const QuadratureRule& rule_x,
                             double velocity, double kappa) {
  return ade_residual(form, NetworkTrial(net), element, basis_t, basis_x, rule_t, rule_x, velocity, kappa);
}

int StrongOperator::required_order() const {
  int o = 0;
  for (const auto& t : terms) o = std::max(o, t.order);
  return o;
}

StrongOperator poisson1d_strong(ScalarField f) {
  return {1, {{2, 0, Coefficient::constant(-1.0)}}, std::move(f)};
}

StrongOperator poisson2d_strong(ScalarField f) {
  return {2, {{2, 0, Coefficient::constant(1.0)}, {2, 1, Coefficient::constant(1.0)}}, std::move(f)};
}

StrongOperator ade_strong(double velocity, Coefficient kappa) {
  return {2,
          {{1, 0, Coefficient::constant(1.0)}, {1, 1, Coefficient::constant(velocity)}, {2, 1, kappa.scaled(-1.0)}},
          {}};
}

Eigen::RowVectorXd strong_residual(const StrongOperator& op, const JetBatch& jets, const Eigen::RowVectorXd& forcing,
                                   std::span<const double> physical) {
  HPVPINN_EXPECTS(forcing.size() == jets.size(), "forcing values do not match the jet batch");
  Eigen::RowVectorXd r = -forcing;
  for (const auto& t : op.terms) r.noalias() += t.coefficient.resolve(physical) * channel(jets, t.order, t.axis);
  return r;
}

}  // namespace hpvpinn
