#pragma once

#include <array>
#include <string_view>
#include <vector>

namespace hpvpinn {

enum class QuadratureFamily { gauss_legendre, gauss_lobatto };

std::string_view to_string(QuadratureFamily family);
QuadratureFamily parse_quadrature_family(std::string_view name);

/// Nodes in increasing order with matching positive weights.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureFamily family = QuadratureFamily::gauss_legendre;

  std::size_t size() const noexcept { return nodes.size(); }
};

/// Q-point Gauss-Legendre rule on [-1, 1], exact to degree 2Q-1. Memoized.
const QuadratureRule& gauss_legendre(int q);

/// Q-point Gauss-Lobatto rule on [-1, 1] (endpoints included), exact to degree 2Q-3. Memoized.
const QuadratureRule& gauss_lobatto(int q);

const QuadratureRule& make_rule(QuadratureFamily family, int q);

/// Affine map of a reference rule onto [a, b].
QuadratureRule map_to_element(const QuadratureRule& rule, double a, double b);

/// Tensor-product rule. Node (i, j) is stored at index i * ry.size() + j (x index outer).
struct QuadratureRule2D {
  std::vector<std::array<double, 2>> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
};

QuadratureRule2D tensor_product(const QuadratureRule& rx, const QuadratureRule& ry);

}  // namespace hpvpinn
