#include "transq/results_csv.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include "transq/errors.hpp"

namespace transq {

std::size_t ResultBlock::dimension() const noexcept {
  return samples.empty() ? 0 : static_cast<std::size_t>(samples.front().mean.size());
}

bool ResultBlock::has_cov() const noexcept { return !samples.empty() && samples.front().cov.size() > 0; }

bool operator==(const ResultBlock& a, const ResultBlock& b) {
  if (a.method != b.method || a.replications != b.replications || a.samples.size() != b.samples.size()) {
    return false;
  }
  for (std::size_t s = 0; s < a.samples.size(); ++s) {
    const MomentSample& x = a.samples[s];
    const MomentSample& y = b.samples[s];
    if (x.t != y.t || x.mean.size() != y.mean.size() || x.cov.rows() != y.cov.rows() ||
        x.cov.cols() != y.cov.cols()) {
      return false;
    }
    if (x.mean != y.mean || x.cov != y.cov) {
      return false;
    }
  }
  return true;
}

ResultBlock to_block(const MomentTrajectory& traj) { return {traj.method, std::nullopt, traj.samples}; }

ResultBlock to_block(const EnsembleStats& stats) {
  return {"simulate", stats.replications, stats.to_trajectory().samples};
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

std::vector<std::string> stat_names(std::size_t d, bool with_cov) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) {
    names.push_back("mean_" + std::to_string(i));
  }
  if (with_cov) {
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) {
        names.push_back("cov_" + std::to_string(i) + "_" + std::to_string(j));
      }
    }
  }
  return names;
}

namespace {

void emit_rows(std::ostringstream& os, const ResultBlock& b, bool n_column) {
  const std::size_t d = b.dimension();
  const bool cov = b.has_cov();
  const std::string n_text = b.replications ? std::to_string(*b.replications) : std::string();
  for (const MomentSample& s : b.samples) {
    const std::string t = format_double(s.t);
    auto row = [&](const std::string& stat, double v) {
      os << t << ',' << b.method << ',' << stat << ',' << format_double(v);
      if (n_column) {
        os << ',' << n_text;
      }
      os << '\n';
    };
    for (std::size_t i = 0; i < d; ++i) {
      row("mean_" + std::to_string(i), s.mean[static_cast<Eigen::Index>(i)]);
    }
    if (cov) {
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
          row("cov_" + std::to_string(i) + "_" + std::to_string(j),
              s.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
      }
    }
  }
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError("line " + std::to_string(line_no) + ": not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_count(std::string_view text, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw UsageError("line " + std::to_string(line_no) + ": bad N: '" + std::string(text) + "'");
  }
  return v;
}

struct StatId {
  bool is_cov;
  std::size_t i;
  std::size_t j;
};

StatId parse_stat(std::string_view stat, std::size_t line_no) {
  auto index = [&](std::string_view s) {
    std::size_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw UsageError("line " + std::to_string(line_no) + ": bad stat '" + std::string(stat) + "'");
    }
    return v;
  };
  if (stat.starts_with("mean_")) {
    return {false, index(stat.substr(5)), 0};
  }
  if (stat.starts_with("cov_")) {
    const auto parts = split(stat.substr(4), '_');
    if (parts.size() == 2) {
      const std::size_t i = index(parts[0]);
      const std::size_t j = index(parts[1]);
      if (i <= j) {
        return {true, i, j};
      }
    }
  }
  throw UsageError("line " + std::to_string(line_no) + ": bad stat '" + std::string(stat) + "'");
}

}  // namespace

std::string emit_block_csv(const ResultBlock& block) {
  std::ostringstream os;
  const bool n_column = block.replications.has_value();
  os << (n_column ? "t,method,stat,value,N\n" : "t,method,stat,value\n");
  emit_rows(os, block, n_column);
  return os.str();
}

std::string emit_results_csv(std::span<const ResultBlock> blocks) {
  std::ostringstream os;
  os << "t,method,stat,value,N\n";
  for (const ResultBlock& b : blocks) {
    emit_rows(os, b, true);
  }
  return os.str();
}

std::vector<ResultBlock> parse_results_csv(std::string_view text) {
  struct Cell {
    StatId id;
    double value;
  };
  struct Pending {
    std::optional<std::uint64_t> n;
    std::vector<double> times;
    std::vector<std::vector<Cell>> cells;  // per time
    std::size_t dim = 0;
    bool cov = false;
  };
  std::vector<std::string> order;
  std::map<std::string, Pending> by_method;

  std::size_t line_no = 0;
  bool header_seen = false;
  bool n_column = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (line.empty()) {
      continue;
    }
    const auto f = split(line, ',');
    if (!header_seen) {
      if (line == "t,method,stat,value,N") {
        n_column = true;
      } else if (line != "t,method,stat,value") {
        throw UsageError("unexpected CSV header '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    if (f.size() != (n_column ? 5u : 4u)) {
      throw UsageError("line " + std::to_string(line_no) + ": expected " + (n_column ? "5" : "4") + " fields");
    }
    const double t = parse_double(f[0], line_no);
    const std::string method(f[1]);
    const StatId id = parse_stat(f[2], line_no);
    const double value = parse_double(f[3], line_no);

    auto [it, inserted] = by_method.try_emplace(method);
    if (inserted) {
      order.push_back(method);
    }
    Pending& p = it->second;
    if (n_column && !f[4].empty()) {
      p.n = parse_count(f[4], line_no);
    }
    if (p.times.empty() || p.times.back() != t) {
      p.times.push_back(t);
      p.cells.emplace_back();
    }
    p.cells.back().push_back({id, value});
    p.dim = std::max(p.dim, std::max(id.i, id.j) + 1);
    p.cov = p.cov || id.is_cov;
  }

  std::vector<ResultBlock> out;
  for (const std::string& method : order) {
    const Pending& p = by_method.at(method);
    ResultBlock b{method, p.n, {}};
    const auto d = static_cast<Eigen::Index>(p.dim);
    for (std::size_t s = 0; s < p.times.size(); ++s) {
      MomentSample sample{p.times[s], Vector::Zero(d), p.cov ? Matrix::Zero(d, d) : Matrix()};
      for (const Cell& c : p.cells[s]) {
        const auto i = static_cast<Eigen::Index>(c.id.i);
        const auto j = static_cast<Eigen::Index>(c.id.j);
        if (c.id.is_cov) {
          sample.cov(i, j) = c.value;
          sample.cov(j, i) = c.value;
        } else {
          sample.mean[i] = c.value;
        }
      }
      b.samples.push_back(std::move(sample));
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace transq
