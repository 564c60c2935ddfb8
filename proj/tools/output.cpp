#include "output.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>

namespace radner::cli {

namespace {

using nlohmann::json;

std::vector<double> union_grid(std::size_t grid_size, double horizon, const std::vector<const EquilibriumSolution*>& sols) {
  std::vector<double> grid(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    grid[i] = horizon * static_cast<double>(i) / static_cast<double>(grid_size - 1);
  }
  grid.back() = horizon;
  for (const auto* s : sols) grid.insert(grid.end(), s->breakpoints().begin(), s->breakpoints().end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::vector<std::size_t> default_figure_agents(std::size_t num_agents) {
  const std::vector<std::size_t> preferred{6, 8, 11, 12, 14};
  if (num_agents >= preferred.back()) return preferred;
  std::vector<std::size_t> all(num_agents);
  for (std::size_t i = 0; i < num_agents; ++i) all[i] = i + 1;
  return all;
}

MarketSpec with_lambda(MarketSpec spec, double lambda) {
  spec.lambda = lambda;
  return spec;
}

}  // namespace

std::string format_double(double value) {
  if (value == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw std::runtime_error("number formatting failed");
  return {buf, res.ptr};
}

std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  return out;
}

json solution_summary(const EquilibriumSolution& solution) {
  const auto& o = solution.ordering();
  json ranks = json::array();
  json permutation = json::array();
  for (int j = 1; j <= o.num_agents; ++j) {
    const auto r = static_cast<std::size_t>(j);
    const std::size_t agent = o.agent[r];
    permutation.push_back(agent + 1);
    ranks.push_back({{"rank", j},
                     {"agent", agent + 1},
                     {"target", solution.spec().agents[agent].target},
                     {"endowment", o.endowment[r]},
                     {"a", o.a[r]},
                     {"A", o.A[r]},
                     {"a_sigma_geq", o.a_sigma_geq[r]},
                     {"tau", o.tau[r]},
                     {"c", o.c[r] ? json(*o.c[r]) : json(nullptr)}});
  }
  return {{"agents", o.num_agents},
          {"horizon", solution.horizon()},
          {"lambda", solution.lambda()},
          {"supply", solution.spec().supply},
          {"dividend_mean", solution.spec().dividend_mean},
          {"s0", solution.initial_price()},
          {"permutation", permutation},
          {"breakpoints", solution.breakpoints()},
          {"ranks", ranks},
          {"warnings", solution.warnings()}};
}

json report_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back(
        {{"name", c.name}, {"max_violation", c.max_violation}, {"threshold", c.threshold}, {"passed", c.passed}});
  }
  return {{"passed", report.passed()}, {"checks", checks}};
}

json certificate_json(const OptimalityCertificate& cert, std::size_t agent, bool passed) {
  return {{"rank", cert.rank},
          {"agent", agent + 1},
          {"N", cert.N},
          {"gap", cert.gap},
          {"allowance", cert.allowance},
          {"max_deviation", cert.max_deviation},
          {"sweeps", cert.sweeps},
          {"converged", cert.converged},
          {"passed", passed}};
}

std::map<std::string, std::string> figure_files(const Scenario& scenario, const FigureOptions& options) {
  const MarketSpec& spec = scenario.spec;
  const double T = spec.horizon;
  const std::size_t I = spec.agents.size();
  const EquilibriumSolution solution = solve(spec, scenario.model);
  std::map<std::string, std::string> files;

  {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < I; ++i) {
      const int rank = solution.ordering().rank_of_agent()[i];
      rows.push_back({static_cast<double>(i + 1), spec.agents[i].target,
                      solution.ordering().tau[static_cast<std::size_t>(rank)]});
    }
    files["fig1_stop_times.csv"] = csv({"agent", "target", "tau"}, rows);
  }

  const auto grid = evaluation_grid(solution, options.grid);
  {
    std::vector<std::vector<double>> rows;
    for (double t : grid) rows.push_back({t, solution.drift(t)});
    files["fig2_drift.csv"] = csv({"t", "mu"}, rows);
  }

  {
    const auto agents = options.agents.empty() ? default_figure_agents(I) : options.agents;
    std::vector<std::string> header{"t"};
    for (std::size_t a : agents) {
      if (a < 1 || a > I) throw ScenarioError("", "figure agent " + std::to_string(a) + " does not exist");
      header.push_back("theta_" + std::to_string(a));
    }
    std::vector<std::vector<double>> rows;
    for (double t : grid) {
      std::vector<double> row{t};
      for (std::size_t a : agents) row.push_back(solution.strategy_for_agent(a - 1, t));
      rows.push_back(std::move(row));
    }
    files["fig3_strategies.csv"] = csv(header, rows);
  }

  {
    const auto [l1, l2] = options.lambda_pair.value_or(std::make_pair(spec.lambda / 2.0, spec.lambda));
    const EquilibriumSolution s1 = solve(with_lambda(spec, l1), scenario.model);
    const EquilibriumSolution s2 = solve(with_lambda(spec, l2), scenario.model);
    std::vector<std::vector<double>> rows;
    for (double t : union_grid(options.grid, T, {&s1, &s2})) rows.push_back({t, s1.drift(t), s2.drift(t)});
    files["fig4_drift_pair.csv"] = csv({"t", "mu_lambda1", "mu_lambda2"}, rows);
  }

  {
    const auto lambdas = lambda_grid(options.lambda_max.value_or(10.0 * spec.lambda), options.steps);
    const SweepResult sweep = lambda_sweep(spec, scenario.model, lambdas);
    std::vector<std::vector<double>> rows;
    for (const auto& p : sweep.points) rows.push_back({p.lambda, p.s0});
    files["fig5_s0_vs_lambda.csv"] = csv({"lambda", "s0"}, rows);
  }
  return files;
}

std::string sweep_csv(const SweepResult& sweep) {
  const std::size_t I = sweep.spec.agents.size();
  std::string out = "lambda,s0,active_count,permutation_id";
  for (std::size_t j = 1; j <= I; ++j) out += ",tau_" + std::to_string(j);
  for (std::size_t j = 1; j <= I; ++j) out += ",c_" + std::to_string(j);
  out += '\n';
  for (const auto& p : sweep.points) {
    out += format_double(p.lambda) + ',' + format_double(p.s0) + ',' + std::to_string(p.active_count) + ',' +
           std::to_string(p.permutation_id);
    for (std::size_t j = 1; j <= I; ++j) out += ',' + format_double(p.tau[j]);
    for (std::size_t j = 1; j <= I; ++j) out += ',' + (p.c[j] ? format_double(*p.c[j]) : std::string());
    out += '\n';
  }
  return out;
}

json kinks_json(const SweepResult& sweep, std::span<const double> kinks) {
  json permutation = json::array();
  for (std::size_t agent : sweep.permutation) permutation.push_back(agent + 1);
  return {{"kinks", std::vector<double>(kinks.begin(), kinks.end())},
          {"permutation", permutation},
          {"permutation_constant", sweep.permutation_constant()}};
}

void write_files(const std::filesystem::path& dir, const std::map<std::string, std::string>& files) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
  try {
    for (const auto& [name, content] : files) {
      const auto target = dir / name;
      const auto temp = dir / (name + ".tmp");
      std::ofstream out(temp, std::ios::binary | std::ios::trunc);
      staged.emplace_back(temp, target);
      out << content;
      out.close();
      if (!out) throw std::runtime_error("cannot write " + temp.string());
    }
  } catch (...) {
    for (const auto& [temp, target] : staged) std::filesystem::remove(temp);
    throw;
  }
  for (const auto& [temp, target] : staged) std::filesystem::rename(temp, target);
}

}  // namespace radner::cli
