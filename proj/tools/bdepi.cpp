// bdepi: fits a stochastic nonhomogeneous birth-death model to epidemic
// prevalence series and reports parameter estimates, AIC comparisons and
// the effective reproduction number R(t) with simulation bands.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bdepi/bdprocess.hpp"
#include "bdepi/estimate.hpp"
#include "bdepi/io.hpp"
#include "bdepi/reproduction.hpp"

namespace {

using namespace bdepi;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitNumericalWarning = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BDEPI_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw std::runtime_error("BDEPI_SEED is not an integer: " + std::string(env));
    }
  }
  return 0;
}

PrevalenceSeries load_series(const std::string& path, const std::string& format) {
  if (format == "prevalence") return read_prevalence_csv(path);
  if (format == "events") return events_to_prevalence(read_events_csv(path));
  throw std::runtime_error("unknown --format \"" + format + "\" (prevalence|events)");
}

ModelSpec parse_model(const std::string& family, const std::string& constraint) {
  const auto f = family_from_string(family);
  if (!f) throw std::runtime_error("unknown family \"" + family + "\"");
  const auto c = constraint_from_string(constraint);
  if (!c) throw std::runtime_error("unknown constraint \"" + constraint + "\"");
  const ModelSpec model{*f, *c};
  if (!model.applicable())
    throw std::runtime_error("constraint inapplicable: log-logistic has no proportional rate form");
  return model;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::pair<double, double>> day_pairs_of(const PrevalenceSeries& data) {
  std::vector<std::pair<double, double>> pairs;
  for (size_t j = 1; j < data.size(); ++j) pairs.emplace_back(data[j - 1].day, data[j].day);
  return pairs;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) std::cout << text;
  else write_file(out_path, text);
}

int cmd_fit(const std::string& data_path, const std::string& format, const std::string& family,
            const std::string& constraint, std::uint64_t seed, int starts,
            const std::string& out_path) {
  const PrevalenceSeries data = load_series(data_path, format);
  const ModelSpec model = parse_model(family, constraint);

  FitOptions options;
  options.seed = seed;
  options.starts = starts;
  const FitResult result = fit(model, data, options);
  const RtSeries rt = rt_series(model, result.estimate, day_pairs_of(data));

  write_file(out_path, result_to_json(result, rt).dump(2) + "\n");

  std::string crossing = rt.threshold_crossing ? format_double(*rt.threshold_crossing) : "none";
  std::cout << "loglik=" << format_double(result.loglik) << " aic=" << format_double(result.aic)
            << " crossing_day=" << crossing << (result.converged ? "" : " (not converged)")
            << "\n";
  return result.converged ? kExitOk : kExitNumericalWarning;
}

int cmd_compare(const std::string& data_path, const std::string& format,
                const std::vector<std::string>& family_names,
                const std::vector<std::string>& constraint_names, std::uint64_t seed, int starts,
                const std::string& out_path, const std::string& json_path) {
  const PrevalenceSeries data = load_series(data_path, format);

  std::vector<Family> families;
  for (const auto& name : family_names) {
    const auto f = family_from_string(name);
    if (!f) throw std::runtime_error("unknown family \"" + name + "\"");
    families.push_back(*f);
  }
  std::vector<Constraint> constraints;
  for (const auto& name : constraint_names) {
    const auto c = constraint_from_string(name);
    if (!c) throw std::runtime_error("unknown constraint \"" + name + "\"");
    constraints.push_back(*c);
  }

  FitOptions options;
  options.seed = seed;
  options.starts = starts;
  const auto table = model_table(families, constraints, data, options);

  const auto find_cell = [&table](Family f, Constraint c) -> const ModelTableEntry* {
    for (const auto& entry : table)
      if (entry.model.family == f && entry.model.constraint == c) return &entry;
    return nullptr;
  };

  std::string tsv = "family";
  for (Constraint c : constraints) tsv += std::string("\t") + to_string(c);
  tsv += "\n";
  for (Family f : families) {
    tsv += to_string(f);
    for (Constraint c : constraints) {
      tsv += '\t';
      const ModelTableEntry* cell = find_cell(f, c);
      if (!cell || cell->status == CellStatus::Failed) tsv += "FAIL";
      else if (cell->status == CellStatus::Inapplicable) tsv += "--";
      else tsv += format_double(cell->fit->aic);
    }
    tsv += '\n';
  }
  emit(tsv, out_path);

  if (!json_path.empty()) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& entry : table) {
      nlohmann::json row{{"family", to_string(entry.model.family)},
                         {"constraint", to_string(entry.model.constraint)}};
      switch (entry.status) {
        case CellStatus::Fitted: row["status"] = "fitted"; break;
        case CellStatus::CollapsedToFull: row["status"] = "same as full model"; break;
        case CellStatus::Inapplicable: row["status"] = "inapplicable"; break;
        case CellStatus::Failed: row["status"] = "failed"; break;
      }
      if (entry.fit) {
        row["aic"] = entry.fit->aic;
        row["loglik"] = entry.fit->loglik;
        row["estimates"] = entry.fit->estimate;
        row["converged"] = entry.fit->converged;
      }
      if (!entry.message.empty()) row["message"] = entry.message;
      rows.push_back(row);
    }
    write_file(json_path, nlohmann::json{{"ranked", rows}}.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_rt(const std::string& params_path, const std::string& data_path, const std::string& format,
           std::optional<std::int64_t> horizon, std::optional<std::int64_t> y_init,
           std::int64_t paths, double level, std::uint64_t seed, const std::string& out_path) {
  const ParamsFile params = read_params_json(params_path);
  if (!data_path.empty()) {
    const PrevalenceSeries data = load_series(data_path, format);
    if (!horizon) horizon = static_cast<std::int64_t>(data.observations.back().day);
    if (!y_init) y_init = data.observations.front().count;
  }
  if (!horizon) throw std::runtime_error("need --horizon (or --data to derive it)");
  if (!y_init) throw std::runtime_error("need --y-init (or --data to derive it)");

  const RtSeries series =
      rt_bands(params.model, params.estimates, *y_init, *horizon, paths, level, seed);

  std::string tsv = "day\tr\tlower\tupper\n";
  for (size_t i = 0; i < series.points.size(); ++i) {
    tsv += format_double(series.points[i].day) + "\t" + format_double(series.points[i].r) + "\t" +
           format_double(series.bands[i].lower) + "\t" + format_double(series.bands[i].upper) +
           "\n";
  }
  emit(tsv, out_path);
  return kExitOk;
}

int cmd_simulate(const std::string& params_path, std::int64_t horizon, std::int64_t y_init,
                 std::uint64_t seed, const std::string& out_path) {
  const ParamsFile params = read_params_json(params_path);
  if (horizon < 1) throw std::runtime_error("--horizon must be >= 1");
  if (y_init < 0) throw std::runtime_error("--y-init must be >= 0");
  const SurvivalPair pair = params.model.make_pair(params.estimates);

  RngStream rng = derive_stream(seed, 0);
  const std::vector<std::int64_t> path = simulate_path(pair, y_init, horizon, rng);
  std::vector<Observation> observations;
  observations.reserve(path.size());
  for (size_t t = 0; t < path.size(); ++t)
    observations.push_back({static_cast<double>(t), path[t]});
  emit(write_prevalence_csv(PrevalenceSeries(std::move(observations))), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonhomogeneous birth-death epidemic model: fitting, AIC comparison, R(t)"};
  app.require_subcommand(1);

  std::string data_path, format = "prevalence", family = "lomax", constraint = "full";
  std::string out_path, json_path, params_path;
  std::vector<std::string> family_names{"burr", "loglogistic", "lomax", "paralogistic"};
  std::vector<std::string> constraint_names{"full", "aft", "pr", "both"};
  std::uint64_t seed = 0;
  bool seed_given = false;
  int starts = 8;
  std::int64_t paths = 500, sim_horizon = 0, sim_y_init = 1;
  std::optional<std::int64_t> horizon, y_init;
  double level = 95.0;

  auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood fit of one (family, constraint) model");
  fit_cmd->add_option("--data", data_path, "input CSV")->required();
  fit_cmd->add_option("--format", format, "prevalence|events (default prevalence)");
  fit_cmd->add_option("--family", family, "burr|loglogistic|lomax|paralogistic")->required();
  fit_cmd->add_option("--constraint", constraint, "full|aft|pr|both")->required();
  fit_cmd->add_option("--seed", seed, "root seed (default: BDEPI_SEED or 0)")->each([&](const std::string&) { seed_given = true; });
  fit_cmd->add_option("--starts", starts, "multi-start count (default 8)");
  fit_cmd->add_option("--out", out_path, "result JSON path (default results.json)");

  auto* compare_cmd = app.add_subcommand("compare", "AIC table over a family x constraint grid");
  compare_cmd->add_option("--data", data_path, "input CSV")->required();
  compare_cmd->add_option("--format", format, "prevalence|events");
  compare_cmd->add_option("--families", family_names, "families (default all)")->delimiter(',');
  compare_cmd->add_option("--constraints", constraint_names, "constraints (default all)")->delimiter(',');
  compare_cmd->add_option("--seed", seed, "root seed")->each([&](const std::string&) { seed_given = true; });
  compare_cmd->add_option("--starts", starts, "multi-start count per cell");
  compare_cmd->add_option("--out", out_path, "TSV path (default stdout)");
  compare_cmd->add_option("--json", json_path, "ranked results JSON path");

  auto* rt_cmd = app.add_subcommand("rt", "R(t) with simulation-based percentile bands");
  rt_cmd->add_option("--params", params_path, "fit result JSON")->required();
  rt_cmd->add_option("--data", data_path, "input CSV (derives horizon and initial prevalence)");
  rt_cmd->add_option("--format", format, "prevalence|events");
  rt_cmd->add_option("--horizon", horizon, "last day of the daily grid");
  rt_cmd->add_option("--y-init", y_init, "initial prevalence for the sample paths");
  rt_cmd->add_option("--paths", paths, "sample paths (default 500)");
  rt_cmd->add_option("--level", level, "percentile band level (default 95)");
  rt_cmd->add_option("--seed", seed, "root seed")->each([&](const std::string&) { seed_given = true; });
  rt_cmd->add_option("--out", out_path, "TSV path (default stdout)");

  auto* sim_cmd = app.add_subcommand("simulate", "draw one prevalence path from given parameters");
  sim_cmd->add_option("--params", params_path, "parameter JSON (fit result or hand-written)")->required();
  sim_cmd->add_option("--horizon", sim_horizon, "days to simulate")->required();
  sim_cmd->add_option("--y-init", sim_y_init, "initial prevalence (default 1)");
  sim_cmd->add_option("--seed", seed, "root seed")->each([&](const std::string&) { seed_given = true; });
  sim_cmd->add_option("--out", out_path, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!seed_given) seed = default_seed();
    if (fit_cmd->parsed()) {
      if (out_path.empty()) out_path = "results.json";
      return cmd_fit(data_path, format, family, constraint, seed, starts, out_path);
    }
    if (compare_cmd->parsed())
      return cmd_compare(data_path, format, family_names, constraint_names, seed, starts,
                         out_path, json_path);
    if (rt_cmd->parsed())
      return cmd_rt(params_path, data_path, format, horizon, y_init, paths, level, seed, out_path);
    if (sim_cmd->parsed()) return cmd_simulate(params_path, sim_horizon, sim_y_init, seed, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
