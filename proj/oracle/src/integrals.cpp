#include <cmath>
#include <complex>
#include <numbers>

#include "hpvpinn/error.hpp"
#include "hpvpinn/oracle.hpp"

namespace hpvpinn::oracle {

double dense_integral(const std::function<double(double)>& f, double a, double b, int n) {
  HPVPINN_EXPECTS(n >= 10, "dense_integral needs at least 10 panels");
  const double h = (b - a) / n;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) sum += f(a + h * i);
  return sum * h;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& loss, const Eigen::VectorXd& params,
                            double h) {
  HPVPINN_EXPECTS(h >= 1e-7 && h <= 1e-3, "finite-difference step must lie in [1e-7, 1e-3]");
  Eigen::VectorXd g(params.size());
  Eigen::VectorXd p = params;
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    p(i) = params(i) + h;
    const double up = loss(p);
    p(i) = params(i) - h;
    const double down = loss(p);
    p(i) = params(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

std::vector<double> spectrum(const std::vector<double>& samples) {
  HPVPINN_EXPECTS(samples.size() >= 64, "spectrum needs at least 64 samples");
  const auto n = samples.size();
  std::vector<double> mag(n / 2 + 1);
  for (std::size_t k = 0; k < mag.size(); ++k) {
    std::complex<double> c = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
      c += samples[j] * std::polar(1.0, phase);
    }
    mag[k] = std::abs(c) / static_cast<double>(n);
  }
  return mag;
}

}  // namespace hpvpinn::oracle
