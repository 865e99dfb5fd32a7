#include "transq/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include "transq/errors.hpp"
#include "transq/linalg.hpp"

namespace transq {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Golub-Welsch for the initial nodes, then Newton on the three-term recurrence
// and Christoffel weights 1 / sum_k p_k(x)^2 with orthonormal p_k.
template <class Recur>
GaussRule golub_welsch(std::size_t q, const std::vector<double>& offdiag, Recur&& orthonormal) {
  const auto n = static_cast<Eigen::Index>(q);
  Matrix jacobi = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    jacobi(k, k + 1) = jacobi(k + 1, k) = offdiag[static_cast<std::size_t>(k)];
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(jacobi, Eigen::EigenvaluesOnly);
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  std::vector<double> p(q + 1);
  for (std::size_t i = 0; i < q; ++i) {
    double x = eig.eigenvalues()[static_cast<Eigen::Index>(i)];
    for (int it = 0; it < 4; ++it) {
      double deriv = 0.0;
      orthonormal(x, p, deriv);
      const double step = p[q] / deriv;
      x -= step;
      if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) {
        break;
      }
    }
    double deriv = 0.0;
    orthonormal(x, p, deriv);
    double s = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      s += p[k] * p[k];
    }
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / s;
  }
  return rule;
}

}  // namespace

GaussRule gauss_hermite(std::size_t q) {
  if (q < 2) {
    throw UsageError("Gauss-Hermite order must be at least 2");
  }
  std::vector<double> off(q - 1);
  for (std::size_t k = 1; k < q; ++k) {
    off[k - 1] = std::sqrt(static_cast<double>(k) / 2.0);
  }
  return golub_welsch(q, off, [q](double x, std::vector<double>& p, double& deriv) {
    p[0] = std::pow(kPi, -0.25);
    p[1] = kSqrt2 * x * p[0];
    for (std::size_t k = 1; k < q; ++k) {
      const auto kd = static_cast<double>(k);
      p[k + 1] = std::sqrt(2.0 / (kd + 1.0)) * x * p[k] - std::sqrt(kd / (kd + 1.0)) * p[k - 1];
    }
    deriv = std::sqrt(2.0 * static_cast<double>(q)) * p[q - 1];
  });
}

GaussRule gauss_legendre(std::size_t q) {
  if (q < 2) {
    throw UsageError("Gauss-Legendre order must be at least 2");
  }
  std::vector<double> off(q - 1);
  for (std::size_t k = 1; k < q; ++k) {
    const auto kd = static_cast<double>(k);
    off[k - 1] = kd / std::sqrt(4.0 * kd * kd - 1.0);
  }
  return golub_welsch(q, off, [q](double x, std::vector<double>& p, double& deriv) {
    // Plain Legendre recurrence, normalised afterwards.
    std::vector<double> raw(q + 1);
    raw[0] = 1.0;
    raw[1] = x;
    for (std::size_t k = 1; k < q; ++k) {
      const auto kd = static_cast<double>(k);
      raw[k + 1] = ((2.0 * kd + 1.0) * x * raw[k] - kd * raw[k - 1]) / (kd + 1.0);
    }
    for (std::size_t k = 0; k <= q; ++k) {
      p[k] = std::sqrt((2.0 * static_cast<double>(k) + 1.0) / 2.0) * raw[k];
    }
    const auto qd = static_cast<double>(q);
    const double raw_deriv = qd * (x * raw[q] - raw[q - 1]) / (x * x - 1.0);
    deriv = std::sqrt((2.0 * qd + 1.0) / 2.0) * raw_deriv;
  });
}

QuadratureRule::QuadratureRule(std::size_t q) : hermite_(gauss_hermite(q)), legendre_(gauss_legendre(q)) {}

}  // namespace transq
