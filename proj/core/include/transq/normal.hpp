#pragma once

namespace transq {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kSqrt2 = 1.41421356237309504880;

/// Standard normal density.
[[nodiscard]] double normal_pdf(double z) noexcept;

/// Standard normal distribution function, erfc-based (absolute error well below 1e-15).
[[nodiscard]] double normal_cdf(double z) noexcept;

}  // namespace transq
