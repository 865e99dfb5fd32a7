#include "transq/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "transq/errors.hpp"

namespace transq {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_rate_args(const NetworkModel& m, std::size_t i, std::span<const double> x) {
  if (i >= m.transitions.size()) {
    throw UsageError("transition index " + std::to_string(i) + " out of range (k = " +
                     std::to_string(m.transitions.size()) + ")");
  }
  if (x.size() != m.dimension) {
    throw UsageError("state has " + std::to_string(x.size()) + " components, model has " +
                     std::to_string(m.dimension));
  }
}

const TimeSchedule* threshold_schedule(const RateKernel& k) {
  return std::visit(Overloaded{
                        [](const kernel::MinThreshold& v) -> const TimeSchedule* { return &v.threshold; },
                        [](const kernel::PosPart& v) -> const TimeSchedule* { return &v.threshold; },
                        [](const kernel::CappedResidual& v) -> const TimeSchedule* { return &v.threshold; },
                        [](const auto&) -> const TimeSchedule* { return nullptr; },
                    },
                    k);
}

}  // namespace

std::string_view kernel_name(const RateKernel& k) {
  return std::visit(Overloaded{
                        [](const kernel::Constant&) { return std::string_view{"constant"}; },
                        [](const kernel::Linear&) { return std::string_view{"linear"}; },
                        [](const kernel::MinThreshold&) { return std::string_view{"min_threshold"}; },
                        [](const kernel::PosPart&) { return std::string_view{"pos_part"}; },
                        [](const kernel::MinPair&) { return std::string_view{"min_pair"}; },
                        [](const kernel::CappedResidual&) { return std::string_view{"capped_residual"}; },
                    },
                    k);
}

double kernel_threshold(const RateKernel& k, double t) {
  const TimeSchedule* s = threshold_schedule(k);
  return s != nullptr ? s->at(t) : 0.0;
}

double kernel_value(const RateKernel& k, double threshold, std::span<const double> x) {
  return std::visit(
      Overloaded{
          [](const kernel::Constant&) { return 1.0; },
          [&](const kernel::Linear& v) {
            double acc = 0.0;
            for (std::size_t j = 0; j < v.coeffs.size(); ++j) {
              acc += v.coeffs[j] * x[j];
            }
            return acc;
          },
          [&](const kernel::MinThreshold& v) { return std::min(x[v.index], threshold); },
          [&](const kernel::PosPart& v) { return std::max(x[v.index] - threshold, 0.0); },
          [&](const kernel::MinPair& v) { return std::min(x[v.first], x[v.second]); },
          [&](const kernel::CappedResidual& v) {
            return std::min(x[v.index], std::max(threshold - x[v.residual_index], 0.0));
          },
      },
      k);
}

double kernel_lipschitz(const RateKernel& k) {
  if (const auto* lin = std::get_if<kernel::Linear>(&k)) {
    double s = 0.0;
    for (double c : lin->coeffs) {
      s += std::abs(c);
    }
    return std::max(1.0, s);
  }
  return 1.0;
}

std::vector<std::size_t> kernel_indices(const RateKernel& k) {
  return std::visit(Overloaded{
                        [](const kernel::Constant&) { return std::vector<std::size_t>{}; },
                        [](const kernel::Linear& v) {
                          std::vector<std::size_t> idx;
                          for (std::size_t j = 0; j < v.coeffs.size(); ++j) {
                            if (v.coeffs[j] != 0.0) {
                              idx.push_back(j);
                            }
                          }
                          return idx;
                        },
                        [](const kernel::MinThreshold& v) { return std::vector<std::size_t>{v.index}; },
                        [](const kernel::PosPart& v) { return std::vector<std::size_t>{v.index}; },
                        [](const kernel::MinPair& v) {
                          return std::vector<std::size_t>{v.first, v.second};
                        },
                        [](const kernel::CappedResidual& v) {
                          return std::vector<std::size_t>{v.index, v.residual_index};
                        },
                    },
                    k);
}

double eval_rate(const NetworkModel& m, std::size_t i, double t, std::span<const double> x) {
  check_rate_args(m, i, x);
  const RateTerm& term = m.transitions[i].rate;
  return term.coefficient.at(t) * kernel_value(term.kernel, kernel_threshold(term.kernel, t), x);
}

Vector drift(const NetworkModel& m, double t, std::span<const double> x) {
  Vector f = Vector::Zero(static_cast<Eigen::Index>(m.dimension));
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const double r = eval_rate(m, i, t, x);
    const auto& jump = m.transitions[i].jump;
    for (std::size_t j = 0; j < jump.size(); ++j) {
      f[static_cast<Eigen::Index>(j)] += jump[j] * r;
    }
  }
  return f;
}

Vector rate_gradient(const NetworkModel& m, std::size_t i, double t, std::span<const double> x) {
  check_rate_args(m, i, x);
  const RateTerm& term = m.transitions[i].rate;
  const double c = term.coefficient.at(t);
  const double n = kernel_threshold(term.kernel, t);
  Vector g = Vector::Zero(static_cast<Eigen::Index>(m.dimension));
  auto at = [&](std::size_t j) -> double& { return g[static_cast<Eigen::Index>(j)]; };
  std::visit(Overloaded{
                 [](const kernel::Constant&) {},
                 [&](const kernel::Linear& v) {
                   for (std::size_t j = 0; j < v.coeffs.size(); ++j) {
                     at(j) = c * v.coeffs[j];
                   }
                 },
                 [&](const kernel::MinThreshold& v) { at(v.index) = x[v.index] <= n ? c : 0.0; },
                 [&](const kernel::PosPart& v) { at(v.index) = x[v.index] > n ? c : 0.0; },
                 [&](const kernel::MinPair& v) {
                   if (x[v.first] <= x[v.second]) {
                     at(v.first) = c;
                   } else {
                     at(v.second) = c;
                   }
                 },
                 [&](const kernel::CappedResidual& v) {
                   const double residual = n - x[v.residual_index];
                   if (x[v.index] <= std::max(residual, 0.0)) {
                     at(v.index) = c;
                   } else if (residual > 0.0) {
                     at(v.residual_index) = -c;
                   }
                 },
             },
             term.kernel);
  return g;
}

Matrix drift_jacobian(const NetworkModel& m, double t, std::span<const double> x) {
  const auto d = static_cast<Eigen::Index>(m.dimension);
  Matrix a = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const Vector grad = rate_gradient(m, i, t, x);
    const auto& jump = m.transitions[i].jump;
    for (std::size_t r = 0; r < jump.size(); ++r) {
      if (jump[r] != 0) {
        a.row(static_cast<Eigen::Index>(r)) += jump[r] * grad.transpose();
      }
    }
  }
  return a;
}

std::vector<double> breakpoints_between(const NetworkModel& m, double from, double to) {
  std::vector<double> out;
  auto take = [&](const TimeSchedule& s) {
    for (double b : s.breakpoints()) {
      if (b > from && b < to) {
        out.push_back(b);
      }
    }
  };
  for (const auto& tr : m.transitions) {
    take(tr.rate.coefficient);
    if (const TimeSchedule* s = threshold_schedule(tr.rate.kernel)) {
      take(*s);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i > 0) {
      os << "; ";
    }
    os << violations[i].message;
  }
  return os.str();
}

ValidationReport validate_model(const NetworkModel& m) noexcept {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, std::string msg) {
    report.violations.push_back({kind, std::move(msg)});
  };
  using K = Violation::Kind;

  if (m.dimension < 1) {
    add(K::Structure, "dimension must be at least 1");
  }
  if (m.transitions.empty()) {
    add(K::Structure, "model needs at least one transition");
  }
  if (!(m.horizon > 0.0) || !std::isfinite(m.horizon)) {
    add(K::Structure, "horizon must be positive and finite");
  }
  if (m.initial_state.size() != m.dimension) {
    add(K::Structure, "initial_state has " + std::to_string(m.initial_state.size()) +
                          " entries, expected " + std::to_string(m.dimension));
  }
  for (std::size_t j = 0; j < m.initial_state.size(); ++j) {
    if (m.initial_state[j] < 0) {
      add(K::Structure, "initial_state[" + std::to_string(j) + "] is negative");
    }
  }

  for (std::size_t i = 0; i < m.transitions.size(); ++i) {
    const Transition& tr = m.transitions[i];
    const std::string where = "transition " + std::to_string(i) + ": ";

    if (tr.jump.size() != m.dimension) {
      add(K::Jump, where + "jump has " + std::to_string(tr.jump.size()) + " entries, expected " +
                       std::to_string(m.dimension));
    }
    if (std::all_of(tr.jump.begin(), tr.jump.end(), [](int v) { return v == 0; })) {
      add(K::Jump, where + "jump vector is all zero");
    }

    const TimeSchedule& coeff = tr.rate.coefficient;
    if (!coeff.covers(m.horizon)) {
      add(K::Coverage, where + "coefficient schedule ends at " + std::to_string(coeff.end()) +
                           " before horizon " + std::to_string(m.horizon));
    }
    if (coeff.min_value() < 0.0) {
      add(K::NegativeCoefficient, where + "coefficient takes negative value " +
                                      std::to_string(coeff.min_value()));
    }
    if (const TimeSchedule* s = threshold_schedule(tr.rate.kernel); s != nullptr && !s->covers(m.horizon)) {
      add(K::Coverage, where + "threshold schedule ends at " + std::to_string(s->end()) +
                           " before horizon " + std::to_string(m.horizon));
    }

    if (const auto* lin = std::get_if<kernel::Linear>(&tr.rate.kernel)) {
      if (lin->coeffs.size() > m.dimension) {
        add(K::Index, where + "linear kernel has " + std::to_string(lin->coeffs.size()) +
                          " coefficients but dimension is " + std::to_string(m.dimension));
      }
      for (double c : lin->coeffs) {
        if (!std::isfinite(c)) {
          add(K::Structure, where + "linear coefficient is not finite");
          break;
        }
      }
    }
    for (std::size_t j : kernel_indices(tr.rate.kernel)) {
      if (j >= m.dimension) {
        add(K::Index, where + "kernel index " + std::to_string(j) + " out of range [0, " +
                          std::to_string(m.dimension) + ")");
      }
    }
    if (const auto* p = std::get_if<kernel::MinPair>(&tr.rate.kernel); p && p->first == p->second) {
      add(K::Index, where + "min_pair needs two distinct indices");
    }
    if (const auto* c = std::get_if<kernel::CappedResidual>(&tr.rate.kernel);
        c && c->index == c->residual_index) {
      add(K::Index, where + "capped_residual needs two distinct indices");
    }
    report.lipschitz_bounds.push_back(kernel_lipschitz(tr.rate.kernel));
  }
  return report;
}

void require_valid(const NetworkModel& m) {
  const ValidationReport r = validate_model(m);
  if (!r.ok()) {
    throw UsageError("invalid model: " + r.summary());
  }
}

}  // namespace transq
