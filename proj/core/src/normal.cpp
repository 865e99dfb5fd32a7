#include "transq/normal.hpp"

#include <cmath>

namespace transq {

double normal_pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// erfc keeps full relative precision in the lower tail, where 0.5 * (1 + erf)
// would cancel.
double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / kSqrt2); }

}  // namespace transq
