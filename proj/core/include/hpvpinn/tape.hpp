#pragma once

#include <cmath>
#include <vector>

namespace hpvpinn::ad {

/// Reverse-mode tape for scalar programs. Each node records up to two parents and the
/// local partial derivatives with respect to them.
class Tape {
 public:
  struct Node {
    int lhs;
    int rhs;
    double d_lhs;
    double d_rhs;
  };

  int push(int lhs, double d_lhs, int rhs = -1, double d_rhs = 0.0) {
    nodes_.push_back({lhs, rhs, d_lhs, d_rhs});
    return static_cast<int>(nodes_.size()) - 1;
  }

  int new_variable() { return push(-1, 0.0); }

  /// Adjoints of every node with respect to node `output`.
  std::vector<double> adjoints(int output) const {
    std::vector<double> adj(nodes_.size(), 0.0);
    if (output < 0) return adj;
    adj[static_cast<std::size_t>(output)] = 1.0;
    for (int i = output; i >= 0; --i) {
      const Node& n = nodes_[static_cast<std::size_t>(i)];
      const double a = adj[static_cast<std::size_t>(i)];
      if (a == 0.0) continue;
      if (n.lhs >= 0) adj[static_cast<std::size_t>(n.lhs)] += a * n.d_lhs;
      if (n.rhs >= 0) adj[static_cast<std::size_t>(n.rhs)] += a * n.d_rhs;
    }
    return adj;
  }

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
};

/// Scalar recorded on a tape. Constants carry id -1 and no tape.
class Var {
 public:
  Var() = default;
  Var(double value) : value_(value) {}  // NOLINT(google-explicit-constructor)
  Var(double value, int id, Tape* tape) : value_(value), id_(id), tape_(tape) {}

  double value() const noexcept { return value_; }
  int id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }

 private:
  double value_ = 0.0;
  int id_ = -1;
  Tape* tape_ = nullptr;
};

namespace detail {

inline Var unary(const Var& a, double value, double da) {
  if (a.tape() == nullptr) return Var(value);
  return {value, a.tape()->push(a.id(), da), a.tape()};
}

inline Var binary(const Var& a, const Var& b, double value, double da, double db) {
  Tape* t = a.tape() != nullptr ? a.tape() : b.tape();
  if (t == nullptr) return Var(value);
  return {value, t->push(a.id(), da, b.id(), db), t};
}

}  // namespace detail

inline Var operator+(const Var& a, const Var& b) { return detail::binary(a, b, a.value() + b.value(), 1.0, 1.0); }
inline Var operator-(const Var& a, const Var& b) { return detail::binary(a, b, a.value() - b.value(), 1.0, -1.0); }
inline Var operator*(const Var& a, const Var& b) {
  return detail::binary(a, b, a.value() * b.value(), b.value(), a.value());
}
inline Var operator/(const Var& a, const Var& b) {
  const double q = a.value() / b.value();
  return detail::binary(a, b, q, 1.0 / b.value(), -q / b.value());
}
inline Var operator-(const Var& a) { return detail::unary(a, -a.value(), -1.0); }
inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }

inline Var sin(const Var& a) { return detail::unary(a, std::sin(a.value()), std::cos(a.value())); }
inline Var cos(const Var& a) { return detail::unary(a, std::cos(a.value()), -std::sin(a.value())); }
inline Var tanh(const Var& a) {
  const double t = std::tanh(a.value());
  return detail::unary(a, t, 1.0 - t * t);
}
inline Var exp(const Var& a) {
  const double e = std::exp(a.value());
  return detail::unary(a, e, e);
}
inline Var log(const Var& a) { return detail::unary(a, std::log(a.value()), 1.0 / a.value()); }
inline Var sqrt(const Var& a) {
  const double s = std::sqrt(a.value());
  return detail::unary(a, s, 0.5 / s);
}
inline Var square(const Var& a) { return a * a; }

inline double value_of(const Var& a) { return a.value(); }

}  // namespace hpvpinn::ad
