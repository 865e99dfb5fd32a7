#include "transq/moment_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "transq/errors.hpp"

namespace transq {

namespace {

struct OdeState {
  Vector mean;
  Matrix cov;
};

OdeState axpy(const OdeState& y, double h, const OdeState& k) {
  return {y.mean + h * k.mean, y.cov + h * k.cov};
}

Matrix lyapunov_rhs(const Matrix& a, const Matrix& cov, const Matrix& b) {
  return a * cov + cov * a.transpose() + b * b.transpose();
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Matrix pointwise_noise(const NetworkModel& m, double t, const Vector& x) {
  const auto d = static_cast<Eigen::Index>(m.dimension);
  Matrix b = Matrix::Zero(d, static_cast<Eigen::Index>(m.transitions.size()));
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const double root = std::sqrt(std::max(eval_rate(m, i, t, as_span(x)), 0.0));
    const auto& jump = m.transitions[i].jump;
    for (std::size_t r = 0; r < jump.size(); ++r) {
      b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = jump[r] * root;
    }
  }
  return b;
}

bool finite(const OdeState& y) { return y.mean.allFinite() && y.cov.allFinite(); }

void check_config(const NetworkModel& m, const SolverConfig& cfg) {
  require_valid(m);
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw UsageError("solver: dt must be positive");
  }
  if (cfg.sample_times.empty()) {
    throw UsageError("solver: no sample times");
  }
  for (std::size_t i = 0; i < cfg.sample_times.size(); ++i) {
    const double t = cfg.sample_times[i];
    if (!(t >= 0.0) || t > m.horizon) {
      throw UsageError("solver: sample time " + std::to_string(t) + " outside [0, horizon]");
    }
    if (i > 0 && !(t > cfg.sample_times[i - 1])) {
      throw UsageError("solver: sample times must be strictly increasing");
    }
  }
  if (cfg.initial) {
    const auto d = static_cast<Eigen::Index>(m.dimension);
    if (cfg.initial->mean.size() != d || cfg.initial->cov.rows() != d || cfg.initial->cov.cols() != d) {
      throw UsageError("solver: initial moment point has the wrong dimension");
    }
  }
}

void check_conditioning(const OdeState& y, double t, MomentTrajectory& out) {
  if (y.cov.rows() == 0) {
    return;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(y.cov, Eigen::EigenvaluesOnly);
  const double lowest = eig.eigenvalues().minCoeff();
  const double trace = y.cov.trace();
  if (lowest < -1e-4 * std::abs(trace) && lowest < -1e-12) {
    std::ostringstream os;
    os << "t=" << t << ": covariance eigenvalue " << lowest << " below -1e-4 * trace";
    out.warnings.push_back(os.str());
  }
}

template <class Rhs>
MomentTrajectory integrate(const NetworkModel& m, const SolverConfig& cfg, Rhs&& rhs) {
  check_config(m, cfg);
  const auto d = static_cast<Eigen::Index>(m.dimension);
  OdeState y;
  if (cfg.initial) {
    y = {cfg.initial->mean, cfg.initial->cov};
  } else {
    y.mean.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      y.mean[j] = static_cast<double>(m.initial_state[static_cast<std::size_t>(j)]);
    }
    y.cov = Matrix::Zero(d, d);
  }

  const double t_end = cfg.sample_times.back();
  std::vector<double> knots = breakpoints_between(m, 0.0, t_end);
  knots.insert(knots.end(), cfg.sample_times.begin(), cfg.sample_times.end());
  knots.push_back(0.0);
  knots.push_back(t_end);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  MomentTrajectory out;
  out.method = std::string(method_name(cfg.method));
  std::size_t next_sample = 0;
  auto record = [&](double t) {
    while (next_sample < cfg.sample_times.size() && cfg.sample_times[next_sample] <= t) {
      check_conditioning(y, t, out);
      out.samples.push_back({cfg.sample_times[next_sample], y.mean, y.cov});
      ++next_sample;
    }
  };
  record(0.0);

  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double a = knots[s];
    const double b = knots[s + 1];
    const auto steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((b - a) / cfg.dt - 1e-9)));
    const double h = (b - a) / static_cast<double>(steps);
    // Parameters are constant on [a, b); evaluate them at the left end.
    auto f = [&](const OdeState& state) { return rhs(a, state); };
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = a + h * static_cast<double>(k);
      const OdeState k1 = f(y);
      const OdeState k2 = f(axpy(y, 0.5 * h, k1));
      const OdeState k3 = f(axpy(y, 0.5 * h, k2));
      const OdeState k4 = f(axpy(y, h, k3));
      OdeState next{y.mean + (h / 6.0) * (k1.mean + 2.0 * k2.mean + 2.0 * k3.mean + k4.mean),
                    y.cov + (h / 6.0) * (k1.cov + 2.0 * k2.cov + 2.0 * k3.cov + k4.cov)};
      next.cov = 0.5 * (next.cov + next.cov.transpose()).eval();
      if (!finite(next)) {
        throw DivergenceError(out.method + " solver diverged after t=" + std::to_string(t), t);
      }
      y = std::move(next);
    }
    record(b);
  }
  return out;
}

}  // namespace

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::Fluid:
      return "fluid";
    case Method::Adjusted:
      return "adjusted";
    case Method::MeasureZero:
      return "measure-zero";
  }
  return "unknown";
}

std::optional<Method> parse_method(std::string_view name) noexcept {
  if (name == "fluid") {
    return Method::Fluid;
  }
  if (name == "adjusted") {
    return Method::Adjusted;
  }
  if (name == "measure-zero" || name == "measure_zero") {
    return Method::MeasureZero;
  }
  return std::nullopt;
}

MomentTrajectory solve_fluid(const NetworkModel& m, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.method = Method::Fluid;
  return integrate(m, c, [&](double t, const OdeState& y) {
    return OdeState{drift(m, t, as_span(y.mean)), Matrix::Zero(y.cov.rows(), y.cov.cols())};
  });
}

MomentTrajectory solve_adjusted(const NetworkModel& m, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.method = Method::Adjusted;
  const GaussianClosure closure(cfg.quad_order);
  return integrate(m, c, [&](double t, const OdeState& y) {
    const ClosedSystem sys = closure.evaluate(m, t, MomentPoint{y.mean, y.cov});
    return OdeState{sys.drift, lyapunov_rhs(sys.jacobian, y.cov, sys.noise)};
  });
}

MomentTrajectory solve_measure_zero(const NetworkModel& m, const SolverConfig& cfg) {
  SolverConfig c = cfg;
  c.method = Method::MeasureZero;
  return integrate(m, c, [&](double t, const OdeState& y) {
    const auto x = as_span(y.mean);
    return OdeState{drift(m, t, x),
                    lyapunov_rhs(drift_jacobian(m, t, x), y.cov, pointwise_noise(m, t, y.mean))};
  });
}

MomentTrajectory solve(const NetworkModel& m, const SolverConfig& cfg) {
  switch (cfg.method) {
    case Method::Fluid:
      return solve_fluid(m, cfg);
    case Method::Adjusted:
      return solve_adjusted(m, cfg);
    case Method::MeasureZero:
      return solve_measure_zero(m, cfg);
  }
  throw UsageError("solver: unknown method");
}

std::vector<double> make_grid(double t0, double t1, double step) {
  if (!(step > 0.0) || !(t1 >= t0) || !std::isfinite(t0) || !std::isfinite(t1)) {
    throw UsageError("grid: need t0 <= t1 and step > 0");
  }
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    g.push_back(t0 + step * static_cast<double>(k));
  }
  if (std::abs(g.back() - t1) < 1e-9 * std::max(1.0, std::abs(t1))) {
    g.back() = t1;
  }
  return g;
}

}  // namespace transq
