#include "hpvpinn/problems.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "hpvpinn/dual.hpp"
#include "hpvpinn/error.hpp"

namespace hpvpinn {

namespace {

using std::numbers::pi;

inline double primal(double x) { return x; }
inline double primal(const Dual2& x) { return x.v; }

template <class T>
T sech2(const T& z) {
  const T t = tanh(z);
  return 1.0 - t * t;
}

// --- closed forms over double / Dual2 ---------------------------------------------------

struct Smooth {
  template <class T>
  T operator()(const std::array<T, 1>& p) const { return 0.1 * sin(4.0 * pi * p[0]) + tanh(20.0 * p[0]); }
};

struct Jump {
  template <class T>
  T operator()(const std::array<T, 1>& p) const {
    const T& x = p[0];
    if (primal(x) < 0.0) return 2.0 * sin(4.0 * pi * x);
    return 6.0 + exp(1.2 * x) * sin(12.0 * pi * x);
  }
};

struct Tone {
  template <class T>
  T operator()(const std::array<T, 1>& p) const { return sin(8.0 * pi * p[0]); }
};

struct Steep {
  double shift = 0.0;
  template <class T>
  T operator()(const std::array<T, 1>& p) const { return 0.1 * sin(8.0 * pi * p[0]) + tanh(80.0 * (p[0] + shift)); }
};

struct BoundaryLayer {
  template <class T>
  T operator()(const std::array<T, 1>& p) const {
    return 0.1 * sin(5.0 * pi * p[0]) + exp((0.01 - (p[0] + 1.0)) / 0.01);
  }
};

struct Harmonic {
  template <class T>
  T operator()(const std::array<T, 2>& p) const {
    const T a = 3.0 + p[0], b = 1.0 + p[1];
    return 2.0 * b / (a * a + b * b);
  }
};

struct Steep2D {
  template <class T>
  T operator()(const std::array<T, 2>& p) const {
    return (0.1 * sin(2.0 * pi * p[0]) + tanh(10.0 * p[0])) * sin(2.0 * pi * p[1]);
  }
};

// Re(z^{2/3}) with arg z taken in [0, 2 pi), so the branch cut runs along the positive
// x axis, outside the open L-shaped domain.
struct CornerHarmonic {
  template <class T>
  T operator()(const std::array<T, 2>& p) const {
    const T r2 = p[0] * p[0] + p[1] * p[1];
    if (primal(r2) == 0.0) return T(0.0);
    T theta = atan2(p[1], p[0]);
    if (primal(theta) < 0.0) theta = theta + 2.0 * pi;
    return pow(r2, 1.0 / 3.0) * cos((2.0 / 3.0) * theta);
  }
};

// --- hand-derived forcings ---------------------------------------------------------------

// -u'' for 0.1 sin(8 pi x) + tanh(80 (x + s)).
double steep_forcing(double x, double s) {
  const double z = 80.0 * (x + s);
  const double t = std::tanh(z);
  return 0.1 * 64.0 * pi * pi * std::sin(8.0 * pi * x) + 2.0 * 6400.0 * t * (1.0 - t * t);
}

// -u'' for the boundary-layer solution.
double bl_forcing(double x) {
  return 2.5 * pi * pi * std::sin(5.0 * pi * x) - 1e4 * std::exp((0.01 - (x + 1.0)) / 0.01);
}

// u_xx + u_yy for (0.1 sin(2 pi x) + tanh(10 x)) sin(2 pi y).
double steep2d_forcing(double x, double y) {
  const double t = std::tanh(10.0 * x);
  const double g = 0.1 * std::sin(2.0 * pi * x) + t;
  const double g2 = -0.4 * pi * pi * std::sin(2.0 * pi * x) - 200.0 * t * (1.0 - t * t);
  return (g2 - 4.0 * pi * pi * g) * std::sin(2.0 * pi * y);
}

ScalarField zero_field() {
  return [](std::span<const double>) { return 0.0; };
}

ProblemSpec approx(std::string name, JetField exact, ScalarField target) {
  ProblemSpec s;
  s.name = std::move(name);
  s.kind = ProblemKind::approx;
  s.exact = std::move(exact);
  s.target = std::move(target);
  s.defaults.activation = Activation::tanh;
  s.defaults.basis = BasisKind::legendre_raw;
  s.defaults.quadrature = QuadratureFamily::gauss_legendre;
  s.defaults.iterations = 50000;
  return s;
}

ProblemSpec poisson1d(std::string name, JetField exact, ScalarField forcing) {
  ProblemSpec s;
  s.name = std::move(name);
  s.kind = ProblemKind::poisson1d;
  s.exact = exact;
  s.forcing = std::move(forcing);
  s.boundary = [exact](std::span<const double> p) { return exact(p).value; };
  s.defaults.activation = Activation::sine;
  s.defaults.weights = {1.0, 0.0, 0.0};
  return s;
}

ProblemSpec poisson2d(std::string name) {
  ProblemSpec s;
  s.name = std::move(name);
  s.kind = ProblemKind::poisson2d;
  s.dim = 2;
  auto& d = s.defaults;
  d.depth = 3;
  d.width = 5;
  d.activation = Activation::tanh;
  d.mesh_y = {-1.0, 1.0};
  d.test_x = d.test_y = 5;
  d.quad_x = d.quad_y = 10;
  d.quadrature = QuadratureFamily::gauss_legendre;
  d.weights = {10.0, 0.0, 0.0};
  d.n_b = 80;
  d.n_r = 100;
  return s;
}

ProblemSpec ade(std::string name, ProblemKind kind) {
  ProblemSpec s;
  s.name = std::move(name);
  s.kind = kind;
  s.dim = 2;
  s.range_0 = {0.0, 1.0};
  s.range_1 = {-1.0, 1.0};
  s.evaluation_range = s.range_1;
  s.velocity = 1.0;
  s.kappa = 0.1 / pi;
  s.forcing = zero_field();
  s.boundary = zero_field();
  s.initial = [](std::span<const double> p) { return -std::sin(pi * p[1]); };
  auto& d = s.defaults;
  d.depth = 3;
  d.width = 5;
  d.activation = Activation::tanh;
  d.mesh_x = {0.0, 1.0};
  d.mesh_y = {-1.0, 1.0};
  d.test_x = d.test_y = 5;
  d.quad_x = d.quad_y = 10;
  d.quadrature = QuadratureFamily::gauss_legendre;
  d.weights = {10.0, 10.0, 0.0};
  d.n_b = 80;
  d.n_0 = 80;
  d.n_r = 1000;
  if (kind == ProblemKind::ade_inverse) {
    d.weights.tau_star = 10.0;
    d.n_b = 160;
    d.sensors = {-0.5, 0.0, 0.5};
    d.per_sensor = 5;
    d.kappa_initial = 1.0;
    d.iterations = 500000;
  }
  return s;
}

std::vector<ProblemSpec> build_registry() {
  std::vector<ProblemSpec> out;

  out.push_back(approx("approx_smooth", make_jet_field<1>(Smooth{}), make_scalar_field<1>(Smooth{})));

  auto jump = approx("approx_jump", make_jet_field<1>(Jump{}), make_scalar_field<1>(Jump{}));
  jump.breakpoints = {0.0};
  out.push_back(std::move(jump));

  auto oob = approx("approx_oob", make_jet_field<1>(Tone{}), make_scalar_field<1>(Tone{}));
  oob.range_0 = {-0.2, 0.2};
  oob.defaults.mesh_x = {-0.2, 0.2};
  oob.defaults.iterations = 200000;
  out.push_back(std::move(oob));

  auto steep = poisson1d("poisson1d_steep", make_jet_field<1>(Steep{}),
                         [](std::span<const double> p) { return steep_forcing(p[0], 0.0); });
  steep.defaults.mesh_x = {-1.0, -0.1, 0.1, 1.0};
  out.push_back(std::move(steep));

  out.push_back(poisson1d("poisson1d_bl", make_jet_field<1>(BoundaryLayer{}),
                          [](std::span<const double> p) { return bl_forcing(p[0]); }));

  auto asym = poisson1d("poisson1d_asym", make_jet_field<1>(Steep{0.1}),
                        [](std::span<const double> p) { return steep_forcing(p[0], 0.1); });
  asym.defaults.mesh_x = {-1.0, -0.5, 0.0, 0.5, 1.0};
  out.push_back(std::move(asym));

  auto harmonic = poisson2d("poisson2d_harmonic");
  harmonic.exact = make_jet_field<2>(Harmonic{});
  harmonic.forcing = zero_field();
  harmonic.boundary = make_scalar_field<2>(Harmonic{});
  out.push_back(std::move(harmonic));

  auto steep2d = poisson2d("poisson2d_steep");
  steep2d.exact = make_jet_field<2>(Steep2D{});
  steep2d.forcing = [](std::span<const double> p) { return steep2d_forcing(p[0], p[1]); };
  steep2d.boundary = make_scalar_field<2>(Steep2D{});
  steep2d.defaults.width = 20;
  steep2d.defaults.n_r = 1000;
  out.push_back(std::move(steep2d));

  auto lshape = poisson2d("poisson2d_lshape");
  lshape.lshape = true;
  lshape.exact = make_jet_field<2>(CornerHarmonic{});
  lshape.forcing = zero_field();
  lshape.boundary = make_scalar_field<2>(CornerHarmonic{});
  out.push_back(std::move(lshape));

  out.push_back(ade("ade_forward", ProblemKind::ade_forward));
  out.push_back(ade("ade_inverse", ProblemKind::ade_inverse));
  return out;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::approx: return "approx";
    case ProblemKind::poisson1d: return "poisson1d";
    case ProblemKind::poisson2d: return "poisson2d";
    case ProblemKind::ade_forward: return "ade_forward";
    case ProblemKind::ade_inverse: return "ade_inverse";
  }
  return "?";
}

double ProblemSpec::exact_value(std::span<const double> point) const {
  HPVPINN_EXPECTS(has_exact(), "problem " + name + " has no closed-form solution");
  return exact(point).value;
}

const std::vector<ProblemSpec>& registry() {
  static const std::vector<ProblemSpec> problems = build_registry();
  return problems;
}

const ProblemSpec& find_problem(std::string_view name) {
  for (const auto& p : registry()) {
    if (p.name == name) return p;
  }
  throw UnknownProblemError("unknown problem '" + std::string(name) + "'");
}

double lshape_harmonic(double x, double y) { return CornerHarmonic{}(std::array<double, 2>{x, y}); }

Decomposition2D decomposition_2d(const ProblemSpec& spec, const std::vector<double>& mesh_0,
                                 const std::vector<double>& mesh_1) {
  HPVPINN_EXPECTS(spec.dim == 2, "problem " + spec.name + " is not two-dimensional");
  if (spec.lshape) return lshape_partition(spec.defaults.lshape_fine);
  return rectangular_partition(explicit_partition(mesh_0), explicit_partition(mesh_1));
}

CollocationProblem collocation_problem(const ProblemSpec& spec, Coefficient kappa) {
  switch (spec.kind) {
    case ProblemKind::poisson1d: return {poisson1d_strong(spec.forcing), spec.boundary, {}};
    case ProblemKind::poisson2d: return {poisson2d_strong(spec.forcing), spec.boundary, {}};
    case ProblemKind::ade_forward:
    case ProblemKind::ade_inverse: return {ade_strong(spec.velocity, kappa), spec.boundary, spec.initial};
    case ProblemKind::approx: break;
  }
  throw ContractViolation("problem " + spec.name + " has no differential operator");
}

std::vector<Observation> observations_for_inverse(const ProblemSpec& spec, std::span<const double> sensors,
                                                  int per_sensor, std::uint64_t seed) {
  HPVPINN_EXPECTS(static_cast<bool>(spec.reference), "problem " + spec.name + " has no reference solution");
  HPVPINN_EXPECTS(per_sensor >= 0, "observation count must be non-negative");
  for (double x : sensors) {
    HPVPINN_EXPECTS(x >= spec.range_1[0] && x <= spec.range_1[1], "sensor lies outside the spatial domain");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> time(spec.range_0[0], spec.range_0[1]);
  std::vector<Observation> out;
  for (double x : sensors) {
    for (int i = 0; i < per_sensor; ++i) {
      // map [t0, t1) onto (t0, t1] so the initial line is never observed
      const double t = spec.range_0[0] + spec.range_0[1] - time(rng);
      const std::array<double, 2> p{t, x};
      out.push_back({p, spec.reference(p)});
    }
  }
  return out;
}

}  // namespace hpvpinn
