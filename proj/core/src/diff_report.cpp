#include "transq/diff_report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "transq/errors.hpp"

namespace transq {

DiffReport diff_blocks(const ResultBlock& method, const ResultBlock& reference, const std::string& experiment) {
  if (method.samples.size() != reference.samples.size()) {
    throw UsageError("grid mismatch: " + method.method + " has " + std::to_string(method.samples.size()) +
                     " samples, " + reference.method + " has " + std::to_string(reference.samples.size()));
  }
  for (std::size_t s = 0; s < method.samples.size(); ++s) {
    const double a = method.samples[s].t;
    const double b = reference.samples[s].t;
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b))) {
      throw UsageError("grid mismatch at sample " + std::to_string(s) + ": " + format_double(a) + " vs " +
                       format_double(b));
    }
  }
  if (method.dimension() != reference.dimension()) {
    throw UsageError("dimension mismatch between " + method.method + " and " + reference.method);
  }

  DiffReport out;
  const std::size_t d = method.dimension();
  const bool cov = method.has_cov() && reference.has_cov();
  const auto names = stat_names(d, cov);
  for (std::size_t k = 0; k < names.size(); ++k) {
    for (std::size_t s = 0; s < method.samples.size(); ++s) {
      const MomentSample& x = method.samples[s];
      const MomentSample& y = reference.samples[s];
      double vx;
      double vy;
      if (k < d) {
        vx = x.mean[static_cast<Eigen::Index>(k)];
        vy = y.mean[static_cast<Eigen::Index>(k)];
      } else {
        // cov_i_j, upper triangle in row order
        std::size_t rest = k - d;
        std::size_t i = 0;
        while (rest >= d - i) {
          rest -= d - i;
          ++i;
        }
        const auto r = static_cast<Eigen::Index>(i);
        const auto c = static_cast<Eigen::Index>(i + rest);
        vx = x.cov(r, c);
        vy = y.cov(r, c);
      }
      out.rows.push_back({experiment, method.method, names[k], y.t, vx, vy, vx - vy});
    }
  }
  return out;
}

DiffReport diff_report(std::span<const ResultBlock> results, const std::string& experiment) {
  const auto sim = std::find_if(results.begin(), results.end(),
                                [](const ResultBlock& b) { return b.method == "simulate"; });
  if (sim == results.end()) {
    throw UsageError("difference report needs a simulate result");
  }
  DiffReport out;
  for (const ResultBlock& b : results) {
    if (&b == &*sim) {
      continue;
    }
    DiffReport part = diff_blocks(b, *sim, experiment);
    out.rows.insert(out.rows.end(), part.rows.begin(), part.rows.end());
  }
  return out;
}

std::string emit_diff_csv(const DiffReport& report) {
  std::ostringstream os;
  os << "experiment,method,stat,t,method_value,sim_value,difference\n";
  for (const DiffRow& r : report.rows) {
    os << r.experiment << ',' << r.method << ',' << r.stat << ',' << format_double(r.t) << ','
       << format_double(r.method_value) << ',' << format_double(r.sim_value) << ','
       << format_double(r.difference) << '\n';
  }
  return os.str();
}

}  // namespace transq
