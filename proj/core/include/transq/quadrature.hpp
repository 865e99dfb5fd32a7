#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

#include "transq/normal.hpp"

namespace transq {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Physicists' Gauss-Hermite rule, weight exp(-x^2); weights sum to sqrt(pi).
[[nodiscard]] GaussRule gauss_hermite(std::size_t q);

/// Gauss-Legendre rule on [-1, 1]; weights sum to 2.
[[nodiscard]] GaussRule gauss_legendre(std::size_t q);

/// Quadrature for expectations under a Gaussian.
///
/// Smooth directions use the Gauss-Hermite rule. Directions in which the
/// integrand has a kink are split at the kink and each piece is covered by
/// Gauss-Legendre panels, since a Hermite rule straddling a kink converges only
/// algebraically.
class QuadratureRule {
 public:
  /// Throws UsageError for q < 2.
  explicit QuadratureRule(std::size_t q);

  [[nodiscard]] std::size_t order() const noexcept { return hermite_.nodes.size(); }
  [[nodiscard]] const GaussRule& hermite() const noexcept { return hermite_; }
  [[nodiscard]] const GaussRule& legendre() const noexcept { return legendre_; }

  /// E[h(Z)], Z ~ N(0,1), for h smooth. Exact for polynomials of degree < 2q.
  template <class F>
  [[nodiscard]] double expect_smooth(F&& h) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < hermite_.nodes.size(); ++i) {
      acc += hermite_.weights[i] * h(kSqrt2 * hermite_.nodes[i]);
    }
    return acc * kInvSqrtPi;
  }

  /// int_a^b h(z) phi(z) dz for h smooth on (a, b). Either end may be infinite;
  /// the Gaussian tail beyond |z| = kTail is dropped.
  ///
  /// h may return double or a fixed-size Eigen vector.
  template <class F>
  [[nodiscard]] std::decay_t<std::invoke_result_t<F&, double>> integrate_normal(double a, double b, F&& h) const {
    using R = std::decay_t<decltype(h(0.0))>;
    a = std::max(a, -kTail);
    b = std::min(b, kTail);
    R acc = zero<R>();
    if (!(b > a)) {
      return acc;
    }
    const auto panels = static_cast<std::size_t>(std::ceil((b - a) / kPanelWidth));
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = a + width * static_cast<double>(p);
      const double half = 0.5 * width;
      const double mid = lo + half;
      R panel = zero<R>();
      for (std::size_t i = 0; i < legendre_.nodes.size(); ++i) {
        const double z = mid + half * legendre_.nodes[i];
        panel += legendre_.weights[i] * h(z) * normal_pdf(z);
      }
      acc += half * panel;
    }
    return acc;
  }

  /// E[h(Z)], Z ~ N(0,1), for h smooth between consecutive `cuts`.
  template <class F>
  [[nodiscard]] std::decay_t<std::invoke_result_t<F&, double>> expect_piecewise(std::vector<double> cuts, F&& h) const {
    using R = std::decay_t<decltype(h(0.0))>;
    std::sort(cuts.begin(), cuts.end());
    R acc = zero<R>();
    double lo = -kTail;
    for (double c : cuts) {
      if (c > lo && c < kTail) {
        acc += integrate_normal(lo, c, h);
        lo = c;
      }
    }
    acc += integrate_normal(lo, kTail, h);
    return acc;
  }

  static constexpr double kTail = 10.0;
  static constexpr double kPanelWidth = 2.0;
  static constexpr double kInvSqrtPi = 0.56418958354775628695;

 private:
  template <class R>
  static R zero() {
    if constexpr (std::is_arithmetic_v<R>) {
      return R{0};
    } else {
      return R::Zero();
    }
  }

  GaussRule hermite_;
  GaussRule legendre_;
};

}  // namespace transq
