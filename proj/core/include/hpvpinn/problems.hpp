#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpvpinn/basis.hpp"
#include "hpvpinn/diffengine.hpp"
#include "hpvpinn/loss.hpp"
#include "hpvpinn/mesh.hpp"
#include "hpvpinn/network.hpp"
#include "hpvpinn/quadrature.hpp"
#include "hpvpinn/residuals.hpp"

namespace hpvpinn {

enum class ProblemKind { approx, poisson1d, poisson2d, ade_forward, ade_inverse };
std::string_view to_string(ProblemKind kind);

/// Out-of-the-box settings of an experiment; every field can be overridden by a run config.
struct ProblemDefaults {
  int depth = 4;
  int width = 20;
  Activation activation = Activation::sine;
  std::vector<double> mesh_x{-1.0, 1.0};  ///< element boundaries along input axis 0
  std::vector<double> mesh_y;             ///< along axis 1 (2D problems)
  bool lshape_fine = true;                ///< L-shape layout when the domain is L-shaped
  int test_x = 60;
  int test_y = 0;
  BasisKind basis = BasisKind::compact_poisson;
  int quad_x = 80;
  int quad_y = 0;
  QuadratureFamily quadrature = QuadratureFamily::gauss_lobatto;
  VariationalForm form = VariationalForm::R1;
  PenaltyWeights weights;
  int n_b = 0;  ///< boundary points (2D / space-time)
  int n_0 = 0;  ///< initial points
  int n_r = 500;  ///< collocation points for the PINN baseline
  double learning_rate = 1e-3;
  long long iterations = 20000;
  std::vector<double> sensors;  ///< inverse problem sensor locations
  int per_sensor = 0;
  double kappa_initial = 1.0;
};

struct ProblemSpec {
  std::string name;
  ProblemKind kind = ProblemKind::approx;
  int dim = 1;
  std::array<double, 2> range_0{-1.0, 1.0};  ///< axis 0 (x, or t for ADE)
  std::array<double, 2> range_1{-1.0, 1.0};  ///< axis 1 (y, or x for ADE)
  bool lshape = false;
  std::array<double, 2> evaluation_range{-1.0, 1.0};  ///< 1D error-evaluation interval
  JetField exact;         ///< empty when no closed form is known
  ScalarField target;     ///< function to approximate (approx problems)
  ScalarField forcing;    ///< PDE right-hand side
  ScalarField boundary;   ///< Dirichlet data on the (spatial) boundary
  ScalarField initial;    ///< initial data, evaluated at (0, x)
  std::vector<double> breakpoints;  ///< discontinuities of the target
  double velocity = 0.0;
  double kappa = 0.0;
  ScalarField reference;  ///< optional externally computed solution (set by the caller)
  ProblemDefaults defaults;

  bool has_exact() const { return static_cast<bool>(exact); }
  double exact_value(std::span<const double> point) const;
};

/// All built-in experiments. Immutable.
const std::vector<ProblemSpec>& registry();

/// Throws UnknownProblemError.
const ProblemSpec& find_problem(std::string_view name);

/// Decomposition used by 2D / space-time problems from their mesh settings.
Decomposition2D decomposition_2d(const ProblemSpec& spec, const std::vector<double>& mesh_0,
                                 const std::vector<double>& mesh_1);

/// Pointwise operator and side data for the collocation baseline.
CollocationProblem collocation_problem(const ProblemSpec& spec, Coefficient kappa);

/// (t, x, u*) triples sampled from `spec.reference` at `per_sensor` uniformly random times
/// in (0, 1] at every sensor location.
std::vector<Observation> observations_for_inverse(const ProblemSpec& spec, std::span<const double> sensors,
                                                  int per_sensor, std::uint64_t seed);

// closed forms used by the registry (exposed for tests)
double lshape_harmonic(double x, double y);

}  // namespace hpvpinn
