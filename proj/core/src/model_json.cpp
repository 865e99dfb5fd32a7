#include "transq/model_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "transq/errors.hpp"

namespace transq {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw UsageError("model: missing field '" + where + key + "'");
  }
  return obj.at(key);
}

template <class T>
T as(const json& v, const std::string& name) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw UsageError("model: field '" + name + "' has the wrong type");
  }
}

TimeSchedule schedule_from(const json& j, const std::string& where) {
  auto bps = as<std::vector<double>>(field(j, "breakpoints", where), where + "breakpoints");
  auto vals = as<std::vector<double>>(field(j, "values", where), where + "values");
  double end = TimeSchedule::kUnbounded;
  if (j.contains("end") && !j.at("end").is_null()) {
    end = as<double>(j.at("end"), where + "end");
  }
  try {
    return TimeSchedule(std::move(bps), std::move(vals), end);
  } catch (const UsageError& e) {
    throw UsageError("model: '" + where.substr(0, where.size() - 1) + "': " + e.what());
  }
}

json schedule_to(const TimeSchedule& s) {
  json j{{"breakpoints", s.breakpoints()}, {"values", s.values()}};
  if (s.end() != TimeSchedule::kUnbounded) {
    j["end"] = s.end();
  }
  return j;
}

std::vector<std::size_t> indices_from(const json& k, std::size_t count, const std::string& where) {
  auto idx = as<std::vector<std::size_t>>(field(k, "indices", where), where + "indices");
  if (idx.size() != count) {
    throw UsageError("model: field '" + where + "indices' needs " + std::to_string(count) +
                     " entries");
  }
  return idx;
}

RateKernel kernel_from(const json& k, const std::string& where) {
  const auto variant = as<std::string>(field(k, "variant", where), where + "variant");
  if (variant == "constant") {
    return kernel::Constant{};
  }
  if (variant == "linear") {
    return kernel::Linear{as<std::vector<double>>(field(k, "coeffs", where), where + "coeffs")};
  }
  if (variant == "min_threshold") {
    const auto idx = indices_from(k, 1, where);
    return kernel::MinThreshold{idx[0], schedule_from(field(k, "threshold", where), where + "threshold.")};
  }
  if (variant == "pos_part") {
    const auto idx = indices_from(k, 1, where);
    return kernel::PosPart{idx[0], schedule_from(field(k, "threshold", where), where + "threshold.")};
  }
  if (variant == "min_pair") {
    const auto idx = indices_from(k, 2, where);
    return kernel::MinPair{idx[0], idx[1]};
  }
  if (variant == "capped_residual") {
    const auto idx = indices_from(k, 2, where);
    return kernel::CappedResidual{idx[0], idx[1],
                                  schedule_from(field(k, "threshold", where), where + "threshold.")};
  }
  throw UsageError("model: field '" + where + "variant' has unknown value '" + variant + "'");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json kernel_to(const RateKernel& k) {
  json j{{"variant", std::string(kernel_name(k))}};
  std::visit(Overloaded{
                 [](const kernel::Constant&) {},
                 [&](const kernel::Linear& v) { j["coeffs"] = v.coeffs; },
                 [&](const kernel::MinThreshold& v) {
                   j["indices"] = {v.index};
                   j["threshold"] = schedule_to(v.threshold);
                 },
                 [&](const kernel::PosPart& v) {
                   j["indices"] = {v.index};
                   j["threshold"] = schedule_to(v.threshold);
                 },
                 [&](const kernel::MinPair& v) { j["indices"] = {v.first, v.second}; },
                 [&](const kernel::CappedResidual& v) {
                   j["indices"] = {v.index, v.residual_index};
                   j["threshold"] = schedule_to(v.threshold);
                 },
             },
             k);
  return j;
}

}  // namespace

NetworkModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(std::string("model: not valid JSON: ") + e.what());
  }
  NetworkModel m;
  m.dimension = as<std::size_t>(field(doc, "dimension", ""), "dimension");
  m.horizon = as<double>(field(doc, "horizon", ""), "horizon");
  m.initial_state = as<std::vector<std::int64_t>>(field(doc, "initial_state", ""), "initial_state");
  const json& trs = field(doc, "transitions", "");
  if (!trs.is_array()) {
    throw UsageError("model: field 'transitions' must be an array");
  }
  for (std::size_t i = 0; i < trs.size(); ++i) {
    const std::string where = "transitions[" + std::to_string(i) + "].";
    const json& t = trs[i];
    Transition tr{as<std::vector<int>>(field(t, "jump", where), where + "jump"),
                  RateTerm{schedule_from(field(t, "coefficient", where), where + "coefficient."),
                           kernel_from(field(t, "kernel", where), where + "kernel.")}};
    m.transitions.push_back(std::move(tr));
  }
  return m;
}

std::string model_to_json(const NetworkModel& m) {
  json trs = json::array();
  for (const auto& tr : m.transitions) {
    trs.push_back({{"jump", tr.jump},
                   {"coefficient", schedule_to(tr.rate.coefficient)},
                   {"kernel", kernel_to(tr.rate.kernel)}});
  }
  json doc{{"dimension", m.dimension},
           {"horizon", m.horizon},
           {"initial_state", m.initial_state},
           {"transitions", std::move(trs)}};
  return doc.dump(2);
}

NetworkModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw UsageError("model: cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

void save_model(const NetworkModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw UsageError("model: cannot write '" + path.string() + "'");
  }
  out << model_to_json(m) << '\n';
}

}  // namespace transq
