#pragma once

#include <cstddef>
#include <vector>

#include "transq/linalg.hpp"
#include "transq/model.hpp"
#include "transq/quadrature.hpp"

namespace transq {

/// Mean vector and covariance matrix of a Gaussian surrogate for X(t).
struct MomentPoint {
  Vector mean;
  Matrix cov;
};

/// Marginal standard deviations below this are treated as a point mass.
inline constexpr double kDegenerateSigma = 1e-9;

/// Everything the moment ODEs need from the closed rates at one (t, mean, cov).
struct ClosedSystem {
  std::vector<double> rates;  // g_i
  Vector drift;               // G = sum_i jump_i g_i
  Matrix jacobian;            // dG / dmean
  Matrix noise;               // column i = jump_i sqrt(max(g_i, 0))
};

/// Gaussian moment closure: g_i(t, m, S) = E[rate_i(t, X)], X ~ N(m, S).
///
/// Constant and linear kernels pass through unchanged. min(x_j, n) and
/// (x_j - n)^+ use their normal-integral closed forms, min(x_j, x_k) the
/// closed form in the spread of x_j - x_k. min(x_j, (n - x_k)^+) is
/// integrated over x_k with the inner expectation in closed form; `quad_order`
/// sets the Legendre order used for that outer integral.
class GaussianClosure {
 public:
  static constexpr std::size_t kDefaultQuadOrder = 32;

  explicit GaussianClosure(std::size_t quad_order = kDefaultQuadOrder);

  [[nodiscard]] double expected_kernel(const RateTerm& term, double t, const MomentPoint& p) const;

  /// d g / d mean, length d.
  [[nodiscard]] Vector expected_kernel_grad_mean(const RateTerm& term, double t,
                                                 const MomentPoint& p) const;

  [[nodiscard]] Vector closed_drift(const NetworkModel& m, double t, const MomentPoint& p) const;
  [[nodiscard]] Matrix closed_drift_jacobian(const NetworkModel& m, double t,
                                             const MomentPoint& p) const;
  [[nodiscard]] Matrix noise_matrix(const NetworkModel& m, double t, const MomentPoint& p) const;

  /// All of the above in one pass over the transitions.
  [[nodiscard]] ClosedSystem evaluate(const NetworkModel& m, double t, const MomentPoint& p) const;

  [[nodiscard]] const QuadratureRule& rule() const noexcept { return rule_; }

 private:
  // Returns the value and writes the gradient into grad (length d, zeroed by caller).
  double kernel_moments(const RateTerm& term, double t, const MomentPoint& p, Vector* grad) const;

  QuadratureRule rule_;
};

/// Fully numerical E[coefficient(t) * kernel(X)] over the 1- or 2-D marginal
/// the kernel reads. Used as an independent check of the closed forms. Throws
/// UsageError for q < 16 and NumericalError on a non-finite result.
[[nodiscard]] double quad_expected_kernel(const RateTerm& term, double t, const MomentPoint& p,
                                          const QuadratureRule& rule);

}  // namespace transq
