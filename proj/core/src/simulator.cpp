#include "transq/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "transq/errors.hpp"

namespace transq {

namespace {

void check_times(const NetworkModel& m, std::span<const double> times) {
  for (std::size_t s = 0; s < times.size(); ++s) {
    if (!(times[s] >= 0.0) || times[s] > m.horizon) {
      throw UsageError("sample time " + std::to_string(times[s]) + " outside [0, horizon]");
    }
    if (s > 0 && times[s] < times[s - 1]) {
      throw UsageError("sample times must be ascending");
    }
  }
}

}  // namespace

PathSimulator::PathSimulator(const NetworkModel& m) : model_(m) {
  require_valid(model_);
  breakpoints_ = breakpoints_between(model_, 0.0, std::numeric_limits<double>::infinity());
}

std::vector<State> PathSimulator::sample(RngStream& rng, std::span<const double> sample_times) const {
  const std::size_t d = model_.dimension;
  std::vector<double> flat(sample_times.size() * d);
  sample_into(rng, sample_times, flat);
  std::vector<State> out(sample_times.size(), State(d));
  for (std::size_t s = 0; s < sample_times.size(); ++s) {
    for (std::size_t j = 0; j < d; ++j) {
      out[s][j] = std::llround(flat[s * d + j]);
    }
  }
  return out;
}

void PathSimulator::sample_into(RngStream& rng, std::span<const double> sample_times,
                                std::span<double> out) const {
  check_times(model_, sample_times);
  const std::size_t d = model_.dimension;
  const std::size_t k = model_.transitions.size();
  if (out.size() != sample_times.size() * d) {
    throw UsageError("output buffer has the wrong size");
  }

  std::vector<double> x(model_.initial_state.begin(), model_.initial_state.end());
  std::vector<double> coeff(k), thresh(k), rate(k);
  auto load_segment = [&](double t) {
    for (std::size_t i = 0; i < k; ++i) {
      const RateTerm& term = model_.transitions[i].rate;
      coeff[i] = term.coefficient.at(t);
      thresh[i] = kernel_threshold(term.kernel, t);
    }
  };

  double t = 0.0;
  std::size_t next_bp = 0;
  load_segment(t);
  std::size_t next_sample = 0;
  const std::size_t n_samples = sample_times.size();
  auto record_before = [&](double limit) {
    while (next_sample < n_samples && sample_times[next_sample] < limit) {
      std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(next_sample * d));
      ++next_sample;
    }
  };

  while (next_sample < n_samples) {
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double r = coeff[i] * kernel_value(model_.transitions[i].rate.kernel, thresh[i], x);
      if (!std::isfinite(r) || r < 0.0) {
        throw ModelError("transition " + std::to_string(i) + " has rate " + std::to_string(r) +
                         " at t = " + std::to_string(t));
      }
      rate[i] = r;
      total += r;
    }
    const double seg_end =
        next_bp < breakpoints_.size() ? breakpoints_[next_bp] : std::numeric_limits<double>::infinity();
    const double t_event = total > 0.0 ? t + rng.exponential(total) : std::numeric_limits<double>::infinity();

    if (t_event >= seg_end) {
      record_before(seg_end);
      if (!std::isfinite(seg_end)) {
        break;
      }
      t = seg_end;
      ++next_bp;
      load_segment(t);
      continue;
    }
    record_before(t_event);
    if (next_sample == n_samples) {
      break;
    }

    double u = rng.uniform() * total;
    std::size_t pick = k;
    for (std::size_t i = 0; i < k; ++i) {
      if (rate[i] <= 0.0) {
        continue;
      }
      pick = i;
      u -= rate[i];
      if (u < 0.0) {
        break;
      }
    }
    const auto& jump = model_.transitions[pick].jump;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] += jump[j];
    }
    t = t_event;
  }
}

std::vector<State> simulate_path(const NetworkModel& m, RngStream& rng, std::span<const double> sample_times) {
  return PathSimulator(m).sample(rng, sample_times);
}

EnsembleStats simulate_ensemble(const NetworkModel& m, std::uint64_t replications, std::uint64_t seed,
                                std::span<const double> sample_times, unsigned workers) {
  if (replications < 1) {
    throw UsageError("replications must be at least 1");
  }
  const PathSimulator sim(m);
  check_times(m, sample_times);
  const auto d = static_cast<Eigen::Index>(m.dimension);
  const std::size_t n_times = sample_times.size();
  const std::uint64_t n_blocks = (replications + kEnsembleBlock - 1) / kEnsembleBlock;

  using BlockStats = std::vector<MomentAccumulator>;
  std::vector<BlockStats> blocks(n_blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&] {
    std::vector<double> buf(n_times * m.dimension);
    while (true) {
      const std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) {
        return;
      }
      try {
        BlockStats acc(n_times, MomentAccumulator(d));
        const std::uint64_t first = b * kEnsembleBlock;
        const std::uint64_t last = std::min(replications, first + kEnsembleBlock);
        for (std::uint64_t r = first; r < last; ++r) {
          RngStream rng(seed, r);
          sim.sample_into(rng, sample_times, buf);
          for (std::size_t s = 0; s < n_times; ++s) {
            acc[s].add(Eigen::Map<const Vector>(buf.data() + s * m.dimension, d));
          }
        }
        blocks[b] = std::move(acc);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        next.store(n_blocks);
        return;
      }
    }
  };

  if (workers == 0) {
    workers = std::max(1u, std::thread::hardware_concurrency());
  }
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back(work);
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  std::vector<MomentAccumulator> total(n_times, MomentAccumulator(d));
  for (const BlockStats& block : blocks) {
    for (std::size_t s = 0; s < n_times; ++s) {
      total[s].merge(block[s]);
    }
  }

  EnsembleStats stats;
  stats.sample_times.assign(sample_times.begin(), sample_times.end());
  stats.replications = replications;
  for (const auto& acc : total) {
    stats.mean.push_back(acc.mean());
  }
  if (replications >= 2) {
    std::vector<Matrix> cov;
    for (const auto& acc : total) {
      cov.push_back(acc.covariance());
    }
    stats.cov = std::move(cov);
  }
  return stats;
}

}  // namespace transq
