#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "radner/errors.hpp"

namespace radner::cli {

namespace {

using nlohmann::json;

std::string child(const std::string& base, const std::string& key) { return base + "/" + key; }
std::string child(const std::string& base, std::size_t index) { return base + "/" + std::to_string(index); }

void require_object(const json& j, const std::string& ptr) {
  if (!j.is_object()) throw ScenarioError(ptr, "expected an object");
}

void reject_unknown_keys(const json& obj, const std::string& ptr, const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) throw ScenarioError(child(ptr, item.key()), "unknown key");
  }
}

const json& require_key(const json& obj, const std::string& ptr, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ScenarioError(child(ptr, key), "required key is missing");
  return *it;
}

double as_number(const json& j, const std::string& ptr) {
  if (!j.is_number()) throw ScenarioError(ptr, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(ptr, "expected a finite number");
  return v;
}

double positive_number(const json& j, const std::string& ptr) {
  const double v = as_number(j, ptr);
  if (v <= 0.0) throw ScenarioError(ptr, "must be positive");
  return v;
}

std::vector<double> number_array(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ScenarioError(ptr, "expected an array of numbers");
  if (j.size() < 2) throw ScenarioError(ptr, "needs at least 2 samples");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], child(ptr, i)));
  return out;
}

std::string type_of(const json& obj, const std::string& ptr) {
  const json& type = require_key(obj, ptr, "type");
  if (!type.is_string()) throw ScenarioError(child(ptr, "type"), "expected a string");
  return type.get<std::string>();
}

KappaSpec parse_kappa(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  const std::string type = type_of(j, ptr);
  if (type == "constant") {
    reject_unknown_keys(j, ptr, {"type", "value"});
    return ConstantKappa{positive_number(require_key(j, ptr, "value"), child(ptr, "value"))};
  }
  if (type == "table") {
    reject_unknown_keys(j, ptr, {"type", "points"});
    const std::string points = child(ptr, "points");
    auto samples = number_array(require_key(j, ptr, "points"), points);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i] <= 0.0) throw ScenarioError(child(points, i), "kappa must be strictly positive");
    }
    return TabulatedKappa{std::move(samples)};
  }
  throw ScenarioError(child(ptr, "type"), "expected \"constant\" or \"table\"");
}

GammaSpec parse_gamma(const json& j, const std::string& ptr) {
  require_object(j, ptr);
  const std::string type = type_of(j, ptr);
  if (type == "twap") {
    reject_unknown_keys(j, ptr, {"type"});
    return TwapGamma{};
  }
  if (type == "table") {
    reject_unknown_keys(j, ptr, {"type", "points"});
    const std::string points = child(ptr, "points");
    auto samples = number_array(require_key(j, ptr, "points"), points);
    if (std::abs(samples.front()) > 1e-12) throw ScenarioError(child(points, 0), "gamma must start at 0");
    if (std::abs(samples.back() - 1.0) > 1e-12) {
      throw ScenarioError(child(points, samples.size() - 1), "gamma must end at 1");
    }
    for (std::size_t i = 1; i < samples.size(); ++i) {
      if (!(samples[i] > samples[i - 1])) throw ScenarioError(child(points, i), "gamma must be strictly increasing");
    }
    return TabulatedGamma{std::move(samples)};
  }
  throw ScenarioError(child(ptr, "type"), "expected \"twap\" or \"table\"");
}

std::vector<AgentSpec> parse_agents(const json& j, const std::string& ptr) {
  if (!j.is_array()) throw ScenarioError(ptr, "expected an array of agents");
  if (j.size() < 2) throw ScenarioError(ptr, "at least 2 agents are required");
  std::vector<AgentSpec> agents;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = child(ptr, i);
    require_object(j[i], p);
    reject_unknown_keys(j[i], p, {"target", "endowment"});
    AgentSpec agent;
    agent.target = as_number(require_key(j[i], p, "target"), child(p, "target"));
    if (j[i].contains("endowment")) agent.endowment = as_number(j[i]["endowment"], child(p, "endowment"));
    agents.push_back(agent);
  }
  return agents;
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  require_object(doc, "");
  reject_unknown_keys(doc, "",
                      {"description", "horizon", "lambda", "supply", "dividend_mean", "agents", "kappa", "gamma", "grid"});
  if (doc.contains("description") && !doc["description"].is_string()) {
    throw ScenarioError("/description", "expected a string");
  }

  MarketSpec spec;
  spec.horizon = positive_number(require_key(doc, "", "horizon"), "/horizon");
  spec.lambda = positive_number(require_key(doc, "", "lambda"), "/lambda");
  spec.supply = as_number(require_key(doc, "", "supply"), "/supply");
  if (doc.contains("dividend_mean")) spec.dividend_mean = as_number(doc["dividend_mean"], "/dividend_mean");
  spec.agents = parse_agents(require_key(doc, "", "agents"), "/agents");

  KappaSpec kappa = parse_kappa(require_key(doc, "", "kappa"), "/kappa");
  GammaSpec gamma = parse_gamma(require_key(doc, "", "gamma"), "/gamma");

  std::optional<std::size_t> grid;
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_number_integer() || g.get<long long>() < 2) throw ScenarioError("/grid", "expected an integer >= 2");
    grid = g.get<std::size_t>();
  }

  try {
    spec.validate();
    TrajectoryModel model(spec.horizon, std::move(kappa), std::move(gamma));
    return Scenario{std::move(spec), std::move(model), grid};
  } catch (const SpecError& e) {
    throw ScenarioError("", e.what());
  }
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("", "cannot read scenario file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  json doc;
  try {
    doc = json::parse(text.str());
  } catch (const json::parse_error& e) {
    throw ScenarioError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace radner::cli
