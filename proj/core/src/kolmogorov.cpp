#include "transq/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "transq/errors.hpp"

namespace transq {

namespace {

// Uniformization substep bound on Lambda * h. Keeps exp(-Lambda h) far from
// underflow and the Poisson series short.
constexpr double kMaxPoissonMean = 20.0;
constexpr double kSeriesTail = 1e-15;
constexpr double kMassTolerance = 1e-8;

}  // namespace

TruncatedChain::TruncatedChain(const NetworkModel& m, std::vector<std::int64_t> caps)
    : model_(m), caps_(std::move(caps)) {
  require_valid(model_);
  if (caps_.size() != model_.dimension) {
    throw UsageError("caps has " + std::to_string(caps_.size()) + " entries, expected " +
                     std::to_string(model_.dimension));
  }
  stride_.resize(caps_.size());
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    if (caps_[j] < 0) {
      throw UsageError("caps[" + std::to_string(j) + "] is negative");
    }
    stride_[j] = size_;
    const auto extent = static_cast<std::size_t>(caps_[j]) + 1;
    if (extent > kMaxStates || size_ > kMaxStates / extent) {
      throw UsageError("truncation box exceeds " + std::to_string(kMaxStates) + " states");
    }
    size_ *= extent;
  }
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    if (model_.initial_state[j] > caps_[j]) {
      throw UsageError("initial_state[" + std::to_string(j) + "] lies outside the truncation box");
    }
  }
}

State TruncatedChain::state(std::size_t index) const {
  State x(caps_.size());
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    x[j] = static_cast<std::int64_t>(index % static_cast<std::size_t>(caps_[j] + 1));
    index /= static_cast<std::size_t>(caps_[j] + 1);
  }
  return x;
}

std::size_t TruncatedChain::index_of(std::span<const std::int64_t> x) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    if (x[j] < 0 || x[j] > caps_[j]) {
      throw UsageError("state outside the truncation box");
    }
    idx += static_cast<std::size_t>(x[j]) * stride_[j];
  }
  return idx;
}

void TruncatedChain::advance(std::vector<double>& p, double from, double to) const {
  const std::size_t k = model_.transitions.size();
  const std::size_t d = model_.dimension;

  // Rates are frozen on [from, to). Flat per-(state, transition) tables.
  std::vector<double> rate(size_ * k, 0.0);
  std::vector<std::size_t> target(size_ * k, 0);
  std::vector<double> out_rate(size_, 0.0);
  std::vector<double> coeff(k), thresh(k);
  for (std::size_t i = 0; i < k; ++i) {
    coeff[i] = model_.transitions[i].rate.coefficient.at(from);
    thresh[i] = kernel_threshold(model_.transitions[i].rate.kernel, from);
  }
  std::vector<std::int64_t> x(d, 0);
  std::vector<double> xd(d, 0.0);
  double lambda = 0.0;
  for (std::size_t s = 0; s < size_; ++s) {
    for (std::size_t j = 0; j < d; ++j) {
      xd[j] = static_cast<double>(x[j]);
    }
    for (std::size_t i = 0; i < k; ++i) {
      const auto& jump = model_.transitions[i].jump;
      bool inside = true;
      std::ptrdiff_t shift = 0;
      for (std::size_t j = 0; j < d && inside; ++j) {
        const std::int64_t y = x[j] + jump[j];
        inside = y >= 0 && y <= caps_[j];
        shift += static_cast<std::ptrdiff_t>(jump[j]) * static_cast<std::ptrdiff_t>(stride_[j]);
      }
      if (!inside) {
        continue;
      }
      const double r = coeff[i] * kernel_value(model_.transitions[i].rate.kernel, thresh[i], xd);
      if (!std::isfinite(r) || r < 0.0) {
        throw ModelError("transition " + std::to_string(i) + " has rate " + std::to_string(r));
      }
      rate[s * k + i] = r;
      target[s * k + i] = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(s) + shift);
      out_rate[s] += r;
    }
    lambda = std::max(lambda, out_rate[s]);
    for (std::size_t j = 0; j < d; ++j) {  // odometer increment
      if (++x[j] <= caps_[j]) {
        break;
      }
      x[j] = 0;
    }
  }
  if (lambda <= 0.0 || to <= from) {
    return;
  }

  const double span = to - from;
  const auto substeps = static_cast<std::size_t>(std::ceil(lambda * span / kMaxPoissonMean));
  const double h = span / static_cast<double>(substeps);
  const double a = lambda * h;

  std::vector<double> stay(size_);
  for (std::size_t s = 0; s < size_; ++s) {
    stay[s] = 1.0 - out_rate[s] / lambda;
  }
  std::vector<double> v(size_), next(size_), acc(size_);
  for (std::size_t step = 0; step < substeps; ++step) {
    v = p;
    double w = std::exp(-a);
    double cum = w;
    for (std::size_t s = 0; s < size_; ++s) {
      acc[s] = w * v[s];
    }
    for (std::size_t n = 1;; ++n) {
      for (std::size_t s = 0; s < size_; ++s) {
        next[s] = v[s] * stay[s];
      }
      for (std::size_t s = 0; s < size_; ++s) {
        if (v[s] == 0.0) {
          continue;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const double r = rate[s * k + i];
          if (r > 0.0) {
            next[target[s * k + i]] += v[s] * (r / lambda);
          }
        }
      }
      v.swap(next);
      w *= a / static_cast<double>(n);
      cum += w;
      for (std::size_t s = 0; s < size_; ++s) {
        acc[s] += w * v[s];
      }
      if (static_cast<double>(n) > a && (1.0 - cum < kSeriesTail || w < kSeriesTail * 1e-3)) {
        break;
      }
    }
    p.swap(acc);
  }
}

std::vector<std::vector<double>> TruncatedChain::transient(std::span<const double> grid) const {
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] >= 0.0) || grid[g] > model_.horizon || (g > 0 && grid[g] < grid[g - 1])) {
      throw UsageError("grid times must be ascending within [0, horizon]");
    }
  }
  std::vector<double> knots = breakpoints_between(model_, 0.0, grid.empty() ? 0.0 : grid.back());
  knots.insert(knots.end(), grid.begin(), grid.end());
  knots.push_back(0.0);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  std::vector<double> p(size_, 0.0);
  p[index_of(model_.initial_state)] = 1.0;
  std::vector<std::vector<double>> out;
  out.reserve(grid.size());
  std::size_t g = 0;
  double t = 0.0;
  for (double knot : knots) {
    advance(p, t, knot);
    t = knot;
    while (g < grid.size() && grid[g] == t) {
      double mass = 0.0;
      for (double q : p) {
        mass += q;
      }
      if (std::abs(1.0 - mass) > kMassTolerance) {
        throw NumericalError("probability mass drifted to " + std::to_string(mass) + " at t = " +
                             std::to_string(t));
      }
      out.push_back(p);
      ++g;
    }
  }
  return out;
}

MomentPoint TruncatedChain::moments(std::span<const double> p) const {
  const auto d = static_cast<Eigen::Index>(model_.dimension);
  Vector mean = Vector::Zero(d);
  Vector x = Vector::Zero(d);
  auto decode = [&](std::size_t s) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const auto extent = static_cast<std::size_t>(caps_[static_cast<std::size_t>(j)] + 1);
      x[j] = static_cast<double>(s % extent);
      s /= extent;
    }
  };
  for (std::size_t s = 0; s < size_; ++s) {
    if (p[s] != 0.0) {
      decode(s);
      mean += p[s] * x;
    }
  }
  Matrix cov = Matrix::Zero(d, d);
  for (std::size_t s = 0; s < size_; ++s) {
    if (p[s] != 0.0) {
      decode(s);
      const Vector c = x - mean;
      cov.noalias() += p[s] * c * c.transpose();
    }
  }
  return {mean, 0.5 * (cov + cov.transpose())};
}

MomentTrajectory exact_transient_moments(const NetworkModel& m, std::span<const std::int64_t> caps,
                                         std::span<const double> grid) {
  const TruncatedChain chain(m, std::vector<std::int64_t>(caps.begin(), caps.end()));
  MomentTrajectory out;
  out.method = "exact";
  const auto dists = chain.transient(grid);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    MomentPoint mp = chain.moments(dists[g]);
    out.samples.push_back({grid[g], std::move(mp.mean), std::move(mp.cov)});
  }
  return out;
}

}  // namespace transq
