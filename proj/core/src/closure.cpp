#include "transq/closure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "transq/errors.hpp"
#include "transq/normal.hpp"

namespace transq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Eigen::Index ix(std::size_t j) { return static_cast<Eigen::Index>(j); }

double variance(const MomentPoint& p, std::size_t j) {
  const double v = p.cov(ix(j), ix(j));
  if (!std::isfinite(v)) {
    throw NumericalError("moment point: variance of component " + std::to_string(j) +
                         " is not finite");
  }
  return std::max(v, 0.0);
}

double mean_of(const MomentPoint& p, std::size_t j) {
  const double m = p.mean[ix(j)];
  if (!std::isfinite(m)) {
    throw NumericalError("moment point: mean of component " + std::to_string(j) + " is not finite");
  }
  return m;
}

// E[min(Y, r)] and its derivative in the mean, Y ~ N(mu, s^2).
struct Scalar1 {
  double value;
  double dmean;
};

// Limit of Phi((r - mu) / s) as s -> 0.
double step_limit(double mu, double r) { return mu < r ? 1.0 : (mu > r ? 0.0 : 0.5); }

Scalar1 min_threshold(double mu, double s, double r) {
  if (s < kDegenerateSigma) {
    return {std::min(mu, r), step_limit(mu, r)};
  }
  const double z = (r - mu) / s;
  const double cdf = normal_cdf(z);
  return {r + (mu - r) * cdf - s * normal_pdf(z), cdf};
}

// E[(Y - r)^+] and its derivative in the mean.
Scalar1 pos_part(double mu, double s, double r) {
  if (s < kDegenerateSigma) {
    return {std::max(mu - r, 0.0), 1.0 - step_limit(mu, r)};
  }
  const double z = (r - mu) / s;
  const double upper = normal_cdf(-z);
  return {s * normal_pdf(z) + (mu - r) * upper, upper};
}

// Spread of x_j - x_k under the Gaussian; throws when the covariance block is
// far from positive semidefinite.
double pair_spread(const MomentPoint& p, std::size_t j, std::size_t k) {
  const double vj = variance(p, j);
  const double vk = variance(p, k);
  const double cjk = p.cov(ix(j), ix(k));
  const double theta2 = vj + vk - 2.0 * cjk;
  if (!std::isfinite(theta2) || theta2 < -1e-9 * std::max(1.0, vj + vk)) {
    throw NumericalError("moment point: Var(x_" + std::to_string(j) + " - x_" +
                         std::to_string(k) + ") = " + std::to_string(theta2) + " is negative");
  }
  return std::sqrt(std::max(theta2, 0.0));
}

// Conditional structure of (x_j, x_k): x_k = m_k + sk v, x_j | v ~ N(m_j + b v, c^2).
struct Conditional {
  double sk;
  double b;
  double c;
};

Conditional conditional_on(const MomentPoint& p, std::size_t j, std::size_t k) {
  const double sk = std::sqrt(variance(p, k));
  const double vj = variance(p, j);
  if (sk < kDegenerateSigma) {
    return {0.0, 0.0, std::sqrt(vj)};
  }
  const double b = p.cov(ix(j), ix(k)) / sk;
  return {sk, b, std::sqrt(std::max(vj - b * b, 0.0))};
}

// Extra cuts around a corner the inner expectation rounds off over a width
// c / |slope|; narrow corners get graded panels.
void add_corner(std::vector<double>& cuts, double v, double slope, double c) {
  cuts.push_back(v);
  const double w = c / std::abs(slope);
  if (w < 1.0) {
    for (double k : {0.25, 1.0, 3.0, 8.0}) {
      cuts.push_back(v - k * w);
      cuts.push_back(v + k * w);
    }
  }
}

// Points in v where min(x_j, (n - x_k)^+) changes branch given the conditional
// mean of x_j: x_k = n, and the two places where m_j + b v meets the residual.
std::vector<double> capped_residual_cuts(double mj, double mk, double n, const Conditional& cd) {
  const double vstar = (n - mk) / cd.sk;
  std::vector<double> cuts{vstar};
  if (cd.b + cd.sk != 0.0) {
    const double v1 = (n - mk - mj) / (cd.b + cd.sk);
    if (v1 < vstar) {
      add_corner(cuts, v1, cd.b + cd.sk, cd.c);
    }
  }
  if (cd.b != 0.0) {
    const double v2 = -mj / cd.b;
    if (v2 > vstar) {
      add_corner(cuts, v2, cd.b, cd.c);
    }
  }
  return cuts;
}

}  // namespace

GaussianClosure::GaussianClosure(std::size_t quad_order) : rule_(quad_order) {}

double GaussianClosure::kernel_moments(const RateTerm& term, double t, const MomentPoint& p,
                                       Vector* grad) const {
  const double coeff = term.coefficient.at(t);
  const double n = kernel_threshold(term.kernel, t);
  auto set_grad = [&](std::size_t j, double v) {
    if (grad != nullptr) {
      (*grad)[ix(j)] = coeff * v;
    }
  };

  const double value = std::visit(
      Overloaded{
          [&](const kernel::Constant&) { return 1.0; },
          [&](const kernel::Linear& v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < v.coeffs.size(); ++j) {
              acc += v.coeffs[j] * mean_of(p, j);
              set_grad(j, v.coeffs[j]);
            }
            return acc;
          },
          [&](const kernel::MinThreshold& v) {
            const Scalar1 r = min_threshold(mean_of(p, v.index), std::sqrt(variance(p, v.index)), n);
            set_grad(v.index, r.dmean);
            return r.value;
          },
          [&](const kernel::PosPart& v) {
            const Scalar1 r = pos_part(mean_of(p, v.index), std::sqrt(variance(p, v.index)), n);
            set_grad(v.index, r.dmean);
            return r.value;
          },
          [&](const kernel::MinPair& v) {
            const double mj = mean_of(p, v.first);
            const double mk = mean_of(p, v.second);
            const double theta = pair_spread(p, v.first, v.second);
            if (theta < kDegenerateSigma) {
              const double wj = step_limit(mj, mk);
              set_grad(v.first, wj);
              set_grad(v.second, 1.0 - wj);
              return std::min(mj, mk);
            }
            const double upper = normal_cdf((mk - mj) / theta);
            const double lower = normal_cdf((mj - mk) / theta);
            set_grad(v.first, upper);
            set_grad(v.second, lower);
            return mj * upper + mk * lower - theta * normal_pdf((mj - mk) / theta);
          },
          [&](const kernel::CappedResidual& v) {
            const double mj = mean_of(p, v.index);
            const double mk = mean_of(p, v.residual_index);
            const Conditional cd = conditional_on(p, v.index, v.residual_index);
            if (cd.sk < kDegenerateSigma) {
              const Scalar1 r = min_threshold(mj, cd.c, std::max(n - mk, 0.0));
              set_grad(v.index, r.dmean);
              set_grad(v.residual_index, mk < n ? -(1.0 - r.dmean) : 0.0);
              return r.value;
            }
            const double vstar = (n - mk) / cd.sk;
            // (value, d/dm_j, d/dm_k) integrated together over the x_k direction.
            const Eigen::Vector3d acc = rule_.expect_piecewise(
                capped_residual_cuts(mj, mk, n, cd), [&](double z) {
                  const double residual = std::max(n - mk - cd.sk * z, 0.0);
                  const Scalar1 in = min_threshold(mj + cd.b * z, cd.c, residual);
                  return Eigen::Vector3d(in.value, in.dmean, z < vstar ? -(1.0 - in.dmean) : 0.0);
                });
            set_grad(v.index, acc[1]);
            set_grad(v.residual_index, acc[2]);
            return acc[0];
          },
      },
      term.kernel);
  return coeff * value;
}

double GaussianClosure::expected_kernel(const RateTerm& term, double t, const MomentPoint& p) const {
  return kernel_moments(term, t, p, nullptr);
}

Vector GaussianClosure::expected_kernel_grad_mean(const RateTerm& term, double t,
                                                  const MomentPoint& p) const {
  Vector g = Vector::Zero(p.mean.size());
  (void)kernel_moments(term, t, p, &g);
  return g;
}

ClosedSystem GaussianClosure::evaluate(const NetworkModel& m, double t, const MomentPoint& p) const {
  const auto d = static_cast<Eigen::Index>(m.dimension);
  const auto k = static_cast<Eigen::Index>(m.transitions.size());
  ClosedSystem sys{std::vector<double>(m.transitions.size()), Vector::Zero(d), Matrix::Zero(d, d),
                   Matrix::Zero(d, k)};
  Vector grad(d);
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const Transition& tr = m.transitions[i];
    grad.setZero();
    const double g = kernel_moments(tr.rate, t, p, &grad);
    sys.rates[i] = g;
    const double root = std::sqrt(std::max(g, 0.0));
    for (std::size_t r = 0; r < tr.jump.size(); ++r) {
      const int l = tr.jump[r];
      if (l == 0) {
        continue;
      }
      sys.drift[ix(r)] += l * g;
      sys.jacobian.row(ix(r)) += l * grad.transpose();
      sys.noise(ix(r), ix(i)) = l * root;
    }
  }
  return sys;
}

Vector GaussianClosure::closed_drift(const NetworkModel& m, double t, const MomentPoint& p) const {
  Vector f = Vector::Zero(static_cast<Eigen::Index>(m.dimension));
  for (const Transition& tr : m.transitions) {
    const double g = expected_kernel(tr.rate, t, p);
    for (std::size_t r = 0; r < tr.jump.size(); ++r) {
      f[ix(r)] += tr.jump[r] * g;
    }
  }
  return f;
}

Matrix GaussianClosure::closed_drift_jacobian(const NetworkModel& m, double t,
                                              const MomentPoint& p) const {
  return evaluate(m, t, p).jacobian;
}

Matrix GaussianClosure::noise_matrix(const NetworkModel& m, double t, const MomentPoint& p) const {
  return evaluate(m, t, p).noise;
}

double quad_expected_kernel(const RateTerm& term, double t, const MomentPoint& p,
                            const QuadratureRule& rule) {
  if (rule.order() < 16) {
    throw UsageError("quadrature order must be at least 16, got " + std::to_string(rule.order()));
  }
  const double coeff = term.coefficient.at(t);
  const double n = kernel_threshold(term.kernel, t);

  const double value = std::visit(
      Overloaded{
          [&](const kernel::Constant&) { return 1.0; },
          [&](const kernel::Linear& v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < v.coeffs.size(); ++j) {
              const double mj = mean_of(p, j);
              const double sj = std::sqrt(variance(p, j));
              acc += v.coeffs[j] * rule.expect_smooth([&](double z) { return mj + sj * z; });
            }
            return acc;
          },
          [&](const kernel::MinThreshold& v) {
            const double m = mean_of(p, v.index);
            const double s = std::sqrt(variance(p, v.index));
            if (s < kDegenerateSigma) {
              return std::min(m, n);
            }
            return rule.expect_piecewise({(n - m) / s},
                                         [&](double z) { return std::min(m + s * z, n); });
          },
          [&](const kernel::PosPart& v) {
            const double m = mean_of(p, v.index);
            const double s = std::sqrt(variance(p, v.index));
            if (s < kDegenerateSigma) {
              return std::max(m - n, 0.0);
            }
            return rule.expect_piecewise({(n - m) / s},
                                         [&](double z) { return std::max(m + s * z - n, 0.0); });
          },
          [&](const kernel::MinPair& v) {
            // min(x_j, x_k) = x_k + min(D, 0) with D = x_j - x_k; integrate D
            // piecewise and x_k given D with the Hermite rule.
            const double mj = mean_of(p, v.first);
            const double mk = mean_of(p, v.second);
            const double theta = pair_spread(p, v.first, v.second);
            if (theta < kDegenerateSigma) {
              return std::min(mj, mk);
            }
            const double vk = variance(p, v.second);
            const double gamma = p.cov(ix(v.first), ix(v.second)) - vk;
            const double slope = gamma / theta;
            const double resid = std::sqrt(std::max(vk - slope * slope, 0.0));
            const double delta = mj - mk;
            return rule.expect_piecewise({-delta / theta}, [&](double u) {
              const double diff = delta + theta * u;
              return rule.expect_smooth([&](double w) {
                return mk + slope * u + resid * w + std::min(diff, 0.0);
              });
            });
          },
          [&](const kernel::CappedResidual& v) {
            const double mj = mean_of(p, v.index);
            const double mk = mean_of(p, v.residual_index);
            const Conditional cd = conditional_on(p, v.index, v.residual_index);
            auto inner = [&](double mu, double residual) {
              if (cd.c < kDegenerateSigma) {
                return std::min(mu, residual);
              }
              const double kink = (residual - mu) / cd.c;
              // Kink beyond the truncated range: one branch is linear throughout.
              if (std::abs(kink) >= QuadratureRule::kTail) {
                return rule.expect_smooth([&](double w) { return kink > 0 ? mu + cd.c * w : residual; });
              }
              return rule.expect_piecewise({kink}, [&](double w) {
                return std::min(mu + cd.c * w, residual);
              });
            };
            if (cd.sk < kDegenerateSigma) {
              return inner(mj, std::max(n - mk, 0.0));
            }
            return rule.expect_piecewise(capped_residual_cuts(mj, mk, n, cd), [&](double z) {
              return inner(mj + cd.b * z, std::max(n - mk - cd.sk * z, 0.0));
            });
          },
      },
      term.kernel);

  const double result = coeff * value;
  if (!std::isfinite(result)) {
    throw NumericalError("quadrature produced a non-finite expectation");
  }
  return result;
}

}  // namespace transq
