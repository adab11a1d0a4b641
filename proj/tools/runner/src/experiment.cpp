#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

#include "hpvpinn/error.hpp"
#include "hpvpinn/oracle.hpp"
#include "hpvpinn/runner.hpp"

namespace hpvpinn::runner {

namespace {

using nlohmann::json;

std::shared_ptr<const oracle::SpaceTimeGrid> cached_ade_reference(double v, double kappa, int nx, int nt) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, int, int>, std::shared_ptr<const oracle::SpaceTimeGrid>> cache;
  const std::lock_guard lock(mutex);
  auto& slot = cache[{v, kappa, nx, nt}];
  if (!slot) slot = std::make_shared<const oracle::SpaceTimeGrid>(oracle::ade_reference(v, kappa, nx, nt));
  return slot;
}

bool is_ade(const ProblemSpec& spec) {
  return spec.kind == ProblemKind::ade_forward || spec.kind == ProblemKind::ade_inverse;
}

Eigen::MatrixXd to_matrix(const std::vector<std::array<double, 2>>& pts) {
  Eigen::MatrixXd m(2, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(0, static_cast<Eigen::Index>(i)) = pts[i][0];
    m(1, static_cast<Eigen::Index>(i)) = pts[i][1];
  }
  return m;
}

Eigen::MatrixXd random_in_box(std::mt19937_64& rng, std::array<double, 2> r0, std::array<double, 2> r1, int n,
                              const Decomposition2D* domain) {
  std::uniform_real_distribution<double> u0(r0[0], r0[1]), u1(r1[0], r1[1]);
  Eigen::MatrixXd m(2, n);
  for (int i = 0; i < n;) {
    const double a = u0(rng), b = u1(rng);
    if (domain != nullptr && !domain->contains(a, b)) continue;
    m(0, i) = a;
    m(1, i) = b;
    ++i;
  }
  return m;
}

Eigen::MatrixXd random_on_segments(std::mt19937_64& rng, const std::vector<Segment>& segments, int n) {
  double total = 0.0;
  for (const auto& s : segments) total += s.length();
  std::uniform_real_distribution<double> u(0.0, total);
  Eigen::MatrixXd m(2, n);
  for (int i = 0; i < n; ++i) {
    double s = u(rng);
    for (const auto& seg : segments) {
      if (s <= seg.length() || &seg == &segments.back()) {
        const double r = std::min(1.0, s / seg.length());
        m(0, i) = seg.from[0] + r * (seg.to[0] - seg.from[0]);
        m(1, i) = seg.from[1] + r * (seg.to[1] - seg.from[1]);
        break;
      }
      s -= seg.length();
    }
  }
  return m;
}

double trapezoid_weight(int i, int n, double h) { return (i == 0 || i == n - 1) ? 0.5 * h : h; }

}  // namespace

Experiment build_experiment(const RunConfig& c) {
  Experiment ex;
  ex.config = c;
  ex.spec = find_problem(c.problem);
  ProblemSpec& spec = ex.spec;
  spec.defaults.lshape_fine = c.lshape_fine;
  if (is_ade(spec) && !spec.reference) {
    auto grid = cached_ade_reference(spec.velocity, spec.kappa, c.reference_nx, c.reference_nt);
    spec.reference = [grid](std::span<const double> p) { return (*grid)(p[0], p[1]); };
  }

  Mlp net = init_mlp(uniform_layers(spec.dim, c.depth, c.width), c.activation, c.seed);
  std::vector<std::string> physical_names;
  std::vector<double> physical_init;
  Coefficient kappa = Coefficient::constant(spec.kappa);
  if (spec.kind == ProblemKind::ade_inverse) {
    physical_names = {"kappa"};
    physical_init = {c.kappa_initial};
    kappa = Coefficient::trainable(0);
  }

  // collocation points draw from their own stream so they do not depend on the network size
  std::mt19937_64 rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
  const TestBasis basis_0{c.basis, c.test_x};
  const TestBasis basis_1{c.basis, c.test_y};
  LossTerms terms;

  switch (spec.kind) {
    case ProblemKind::approx: {
      if (c.method != Method::vpinn) throw ConfigError("function approximation only supports residuals.method = vpinn");
      terms = vnn_terms(spec.target, explicit_partition(c.mesh_x), basis_0, make_rule(c.quadrature, c.quad_x),
                        spec.breakpoints);
      break;
    }
    case ProblemKind::poisson1d: {
      const Decomposition1D d = explicit_partition(c.mesh_x);
      const Interval dom = d.domain();
      const double g = spec.boundary(std::array{dom.a}), h = spec.boundary(std::array{dom.b});
      if (c.method == Method::vpinn) {
        terms = vpinn_1d_terms(c.form, d, basis_0, make_rule(c.quadrature, c.quad_x), spec.forcing, g, h, c.weights);
      } else {
        std::uniform_real_distribution<double> u(dom.a, dom.b);
        Eigen::MatrixXd residual(1, c.n_r);
        for (int i = 0; i < c.n_r; ++i) residual(0, i) = u(rng);
        Eigen::MatrixXd boundary(1, 2);
        boundary << dom.a, dom.b;
        terms = pinn_terms(residual, boundary, Eigen::MatrixXd(1, 0), collocation_problem(spec, kappa), c.weights);
      }
      break;
    }
    case ProblemKind::poisson2d: {
      const Decomposition2D d = decomposition_2d(spec, c.mesh_x, c.mesh_y);
      if (c.method == Method::vpinn) {
        terms = vpinn_2d_terms(c.form, d, basis_0, basis_1, make_rule(c.quadrature, c.quad_x),
                               make_rule(c.quadrature, c.quad_y), spec.forcing, spec.boundary, c.weights, c.n_b);
      } else {
        const Eigen::MatrixXd residual = random_in_box(rng, spec.range_0, spec.range_1, c.n_r, &d);
        const Eigen::MatrixXd boundary = random_on_segments(rng, d.outer_boundary(), c.n_b);
        terms = pinn_terms(residual, boundary, Eigen::MatrixXd(2, 0), collocation_problem(spec, kappa), c.weights);
      }
      break;
    }
    case ProblemKind::ade_forward:
    case ProblemKind::ade_inverse: {
      const auto [t0, t1] = spec.range_0;
      const auto [x0, x1] = spec.range_1;
      const std::vector<Segment> walls{{{t0, x0}, {t1, x0}}, {{t0, x1}, {t1, x1}}};
      const std::vector<Segment> start{{{t0, x0}, {t0, x1}}};
      if (c.method == Method::vpinn) {
        const Decomposition2D d = rectangular_partition(explicit_partition(c.mesh_x), explicit_partition(c.mesh_y));
        terms = ade_variational_terms(c.form, d, basis_0, basis_1, make_rule(c.quadrature, c.quad_x),
                                      make_rule(c.quadrature, c.quad_y), spec.velocity, kappa);
        if (c.weights.tau_b > 0.0) {
          terms.push_back(misfit_term(LossCategory::boundary, to_matrix(sample_boundary(walls, c.n_b)), spec.boundary,
                                      c.weights.tau_b));
        }
        if (c.weights.tau_0 > 0.0) {
          terms.push_back(misfit_term(LossCategory::initial, to_matrix(sample_boundary(start, c.n_0)), spec.initial,
                                      c.weights.tau_0));
        }
      } else {
        const Eigen::MatrixXd residual = random_in_box(rng, spec.range_0, spec.range_1, c.n_r, nullptr);
        const Eigen::MatrixXd boundary = random_on_segments(rng, walls, c.n_b);
        const Eigen::MatrixXd initial = random_on_segments(rng, start, c.n_0);
        terms = pinn_terms(residual, boundary, initial, collocation_problem(spec, kappa), c.weights);
      }
      if (spec.kind == ProblemKind::ade_inverse) {
        ex.observations = observations_for_inverse(spec, c.sensors, c.per_sensor, c.observation_seed);
        if (c.weights.tau_star > 0.0) terms.push_back(observation_term(ex.observations, c.weights.tau_star));
      }
      break;
    }
  }

  const ParamVector weights = net.pack();
  ex.initial.resize(weights.size() + static_cast<Eigen::Index>(physical_init.size()));
  ex.initial.head(weights.size()) = weights;
  for (std::size_t i = 0; i < physical_init.size(); ++i) ex.initial(weights.size() + static_cast<Eigen::Index>(i)) = physical_init[i];
  ex.objective = std::make_unique<Objective>(std::move(net), std::move(terms), physical_names);
  return ex;
}

Evaluation evaluate_solution(const Experiment& ex, const ParamVector& params) {
  const ProblemSpec& spec = ex.spec;
  const RunConfig& c = ex.config;
  Mlp net = ex.objective->network_shape();
  net.unpack(std::span<const double>(params.data(), net.parameter_count()));

  Evaluation ev;
  ev.dim = spec.dim;
  std::vector<double> weights;
  if (spec.dim == 1) {
    const int n = c.eval_points_1d;
    const auto [a, b] = spec.evaluation_range;
    const double h = (b - a) / (n - 1);
    ev.points.resize(1, n);
    for (int i = 0; i < n; ++i) {
      ev.points(0, i) = a + h * i;
      weights.push_back(trapezoid_weight(i, n, h));
    }
    ev.points(0, n - 1) = b;
  } else {
    const int n = c.eval_points_2d;
    const double h0 = (spec.range_0[1] - spec.range_0[0]) / (n - 1);
    const double h1 = (spec.range_1[1] - spec.range_1[0]) / (n - 1);
    std::unique_ptr<Decomposition2D> domain;
    if (spec.lshape) domain = std::make_unique<Decomposition2D>(lshape_partition(true));
    std::vector<std::array<double, 2>> pts;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double p0 = i == n - 1 ? spec.range_0[1] : spec.range_0[0] + h0 * i;
        const double p1 = j == n - 1 ? spec.range_1[1] : spec.range_1[0] + h1 * j;
        if (domain && !domain->contains(p0, p1)) continue;
        pts.push_back({p0, p1});
        weights.push_back(trapezoid_weight(i, n, h0) * trapezoid_weight(j, n, h1));
      }
    }
    ev.points = to_matrix(pts);
  }

  const Eigen::Index n = ev.points.cols();
  const JetBatch nn = forward_jets(net, ev.points, 1);
  ev.predicted = nn.value;
  ev.reference.resize(n);
  double h1_sq = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::span<const double> p(ev.points.col(i).data(), static_cast<std::size_t>(spec.dim));
    if (spec.has_exact()) {
      const JetValue jet = spec.exact(p);
      ev.reference(i) = jet.value;
      for (int k = 0; k < spec.dim; ++k) {
        const double de = nn.d1(k, i) - jet.d_dx[static_cast<std::size_t>(k)];
        h1_sq += weights[static_cast<std::size_t>(i)] * de * de;
      }
    } else {
      ev.reference(i) = spec.reference(p);
    }
  }
  ev.linf = (ev.predicted - ev.reference).cwiseAbs().maxCoeff();
  ev.h1_seminorm = spec.has_exact() ? std::sqrt(h1_sq) : std::numeric_limits<double>::quiet_NaN();
  return ev;
}

}  // namespace hpvpinn::runner
