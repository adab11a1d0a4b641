#include "hpvpinn/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <string>
#include <utility>

#include "hpvpinn/basis.hpp"
#include "hpvpinn/error.hpp"

namespace hpvpinn {

std::string_view to_string(QuadratureFamily family) {
  return family == QuadratureFamily::gauss_legendre ? "gauss_legendre" : "gauss_lobatto";
}

QuadratureFamily parse_quadrature_family(std::string_view name) {
  if (name == "gauss_legendre") return QuadratureFamily::gauss_legendre;
  if (name == "gauss_lobatto") return QuadratureFamily::gauss_lobatto;
  throw ContractViolation("unknown quadrature family '" + std::string(name) + "'");
}

namespace {

constexpr double kNewtonTol = 1e-15;
constexpr int kNewtonMaxIter = 100;

// Newton iteration on g(x) = 0 where `eval` returns (g, g').
template <class F>
double newton(double x, F eval) {
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const auto [g, dg] = eval(x);
    const double dx = g / dg;
    x -= dx;
    if (std::abs(dx) <= kNewtonTol) break;
  }
  return x;
}

// Fills node i and its mirror so the rule is exactly symmetric.
void mirror(QuadratureRule& rule, std::size_t i, double x, double w) {
  const std::size_t q = rule.nodes.size();
  rule.nodes[i] = -x;
  rule.weights[i] = w;
  rule.nodes[q - 1 - i] = x;
  rule.weights[q - 1 - i] = w;
}

QuadratureRule compute_gauss_legendre(int q) {
  QuadratureRule rule{std::vector<double>(q), std::vector<double>(q), QuadratureFamily::gauss_legendre};
  const auto uq = static_cast<std::size_t>(q);
  for (std::size_t i = 0; i < (uq + 1) / 2; ++i) {
    // Root i counted from x = 1 downwards.
    const double guess = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (q + 0.5));
    const double x = newton(guess, [q](double t) {
      const auto lv = legendre_upto(q, t);
      return std::pair{lv.p[q], lv.dp[q]};
    });
    const double dp = legendre_upto(q, x).dp[q];
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    mirror(rule, i, x, w);
  }
  if (q % 2 == 1) rule.nodes[uq / 2] = 0.0;
  return rule;
}

QuadratureRule compute_gauss_lobatto(int q) {
  QuadratureRule rule{std::vector<double>(q), std::vector<double>(q), QuadratureFamily::gauss_lobatto};
  const int n = q - 1;  // interior nodes are roots of P'_n
  const auto uq = static_cast<std::size_t>(q);
  const double end_weight = 2.0 / (static_cast<double>(n) * (n + 1));
  mirror(rule, 0, 1.0, end_weight);
  for (std::size_t i = 1; i < (uq + 1) / 2; ++i) {
    const double guess = std::cos(std::numbers::pi * static_cast<double>(i) / n);
    const double x = newton(guess, [n](double t) {
      const auto lv = legendre_upto(n, t);
      return std::pair{lv.dp[n], lv.ddp[n]};
    });
    const double p = legendre_upto(n, x).p[n];
    mirror(rule, i, x, end_weight / (p * p));
  }
  if (q % 2 == 1) rule.nodes[uq / 2] = 0.0;
  return rule;
}

struct RuleCache {
  std::shared_mutex mutex;
  std::map<std::pair<QuadratureFamily, int>, QuadratureRule> rules;
};

RuleCache& cache() {
  static RuleCache c;
  return c;
}

const QuadratureRule& cached(QuadratureFamily family, int q) {
  auto& c = cache();
  const auto key = std::pair{family, q};
  {
    std::shared_lock lock(c.mutex);
    if (auto it = c.rules.find(key); it != c.rules.end()) return it->second;
  }
  QuadratureRule rule = family == QuadratureFamily::gauss_legendre ? compute_gauss_legendre(q)
                                                                    : compute_gauss_lobatto(q);
  std::unique_lock lock(c.mutex);
  return c.rules.try_emplace(key, std::move(rule)).first->second;
}

}  // namespace

const QuadratureRule& gauss_legendre(int q) {
  HPVPINN_EXPECTS(q >= 1, "Gauss-Legendre rule needs at least one point");
  return cached(QuadratureFamily::gauss_legendre, q);
}

const QuadratureRule& gauss_lobatto(int q) {
  HPVPINN_EXPECTS(q >= 2, "Gauss-Lobatto rule needs at least two points");
  return cached(QuadratureFamily::gauss_lobatto, q);
}

const QuadratureRule& make_rule(QuadratureFamily family, int q) {
  return family == QuadratureFamily::gauss_legendre ? gauss_legendre(q) : gauss_lobatto(q);
}

QuadratureRule map_to_element(const QuadratureRule& rule, double a, double b) {
  HPVPINN_EXPECTS(a < b, "element must satisfy a < b");
  QuadratureRule out = rule;
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    out.nodes[i] = a + half * (rule.nodes[i] + 1.0);
    out.weights[i] = half * rule.weights[i];
  }
  return out;
}

QuadratureRule2D tensor_product(const QuadratureRule& rx, const QuadratureRule& ry) {
  QuadratureRule2D out;
  out.nodes.reserve(rx.size() * ry.size());
  out.weights.reserve(rx.size() * ry.size());
  for (std::size_t i = 0; i < rx.size(); ++i)
    for (std::size_t j = 0; j < ry.size(); ++j) {
      out.nodes.push_back({rx.nodes[i], ry.nodes[j]});
      out.weights.push_back(rx.weights[i] * ry.weights[j]);
    }
  return out;
}

}  // namespace hpvpinn
