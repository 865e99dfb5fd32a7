#include "transq/ensemble.hpp"

#include "transq/errors.hpp"

namespace transq {

MomentAccumulator::MomentAccumulator(Eigen::Index dimension)
    : mean_(Vector::Zero(dimension)), comoment_(Matrix::Zero(dimension, dimension)) {}

void MomentAccumulator::add(const Vector& x) {
  ++count_;
  const Vector delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  comoment_.noalias() += delta * (x - mean_).transpose();
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count_ == 0) {
    return;
  }
  if (count_ == 0) {
    *this = other;
    return;
  }
  const auto na = static_cast<double>(count_);
  const auto nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Vector delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  comoment_ += other.comoment_ + delta * delta.transpose() * (na * nb / n);
  count_ += other.count_;
}

Matrix MomentAccumulator::covariance() const {
  if (count_ < 2) {
    throw UsageError("covariance needs at least two observations");
  }
  const Matrix c = comoment_ / static_cast<double>(count_ - 1);
  return 0.5 * (c + c.transpose());
}

MomentTrajectory EnsembleStats::to_trajectory() const {
  MomentTrajectory out;
  out.method = "simulate";
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    out.samples.push_back({sample_times[i], mean[i], cov ? (*cov)[i] : Matrix()});
  }
  return out;
}

}  // namespace transq
