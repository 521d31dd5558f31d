// Acceptance suite: one line per criterion, nonzero exit on any failure.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bdepi/bdprocess.hpp"
#include "bdepi/estimate.hpp"
#include "bdepi/io.hpp"
#include "bdepi/reproduction.hpp"
#include "oracles.hpp"

using namespace bdepi;
namespace fs = std::filesystem;

namespace {

struct Criterion {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int g_failures = 0;

void run_criterion(int number, const std::string& name, double budget_seconds,
                   const std::function<void(Criterion&)>& body) {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0)
    c.require(elapsed < budget_seconds, "runtime " + std::to_string(elapsed) + "s over budget");
  if (!c.pass) ++g_failures;
  std::printf("%s  criterion %d (%s): %s(%.2fs)\n", c.pass ? "PASS" : "FAIL", number, name.c_str(),
              c.detail.str().c_str(), elapsed);
  std::fflush(stdout);
}

TransitionLaw discrete_law(double theta, double pi) {
  return TransitionLaw{theta, pi, 0.0, TransitionLaw::Mode::DiscreteConditional};
}

const std::vector<double> kGridValues{0.1, 0.3, 0.5, 0.7, 0.9};

// --- criterion 1 & 2 -------------------------------------------------------

void pmf_normalization(Criterion& c) {
  double worst = 0.0;
  for (std::int64_t y0 = 1; y0 <= 6; ++y0) {
    for (double theta : kGridValues) {
      for (double pi : kGridValues) {
        const auto law = discrete_law(theta, pi);
        const auto p = [&](std::int64_t y) { return pmf(law, y0, y); };
        const std::int64_t y_max = oracles::support_bound(p, y0 + 10, 1e-12);
        worst = std::max(worst, std::abs(oracles::sum_moments(p, y_max).total - 1.0));
      }
    }
  }
  c.detail << "max |sum - 1| = " << worst << " over 150 grid cells ";
  c.require(worst < 1e-9, "normalization tolerance 1e-9");
}

void moment_identities(Criterion& c) {
  double worst = 0.0;
  for (std::int64_t y0 = 1; y0 <= 6; ++y0) {
    for (double theta : kGridValues) {
      for (double pi : kGridValues) {
        const auto law = discrete_law(theta, pi);
        const auto p = [&](std::int64_t y) { return pmf(law, y0, y); };
        const std::int64_t y_max = oracles::support_bound(p, y0 + 10, 1e-14);
        const auto summed = oracles::sum_moments(p, y_max);
        const double n = static_cast<double>(y0);
        const double mean = n * (1.0 - theta) / (1.0 - pi);
        const double variance = n * (1.0 - theta) * (theta + pi * (1.0 - theta - pi)) /
                                std::pow(1.0 - pi, 3.0);
        worst = std::max(worst, std::abs(mean - summed.mean));
        worst = std::max(worst, std::abs(variance - summed.variance));
        const auto closed = moments(law, y0);
        worst = std::max(worst, std::abs(closed.mean - mean));
        worst = std::max(worst, std::abs(closed.variance - variance));
      }
    }
  }
  c.detail << "max |closed-form - summed| = " << worst << " ";
  c.require(worst < 1e-8, "moment tolerance 1e-8");
}

// --- criterion 3 ------------------------------------------------------------

void sampler_exactness(Criterion& c) {
  struct Point {
    double theta, pi;
    std::int64_t y0;
    std::uint64_t seed;
  };
  const std::vector<Point> points{{0.3, 0.4, 3, 101}, {0.7, 0.2, 5, 102}, {0.15, 0.85, 2, 103}};
  constexpr std::int64_t draws = 1000000;
  for (const auto& pt : points) {
    const auto law = discrete_law(pt.theta, pt.pi);
    const std::int64_t top =
        oracles::support_bound([&](std::int64_t y) { return pmf(law, pt.y0, y); }, pt.y0 + 10, 1e-9);
    std::vector<std::int64_t> observed(top + 1, 0);
    RngStream rng = derive_stream(pt.seed, 0);
    for (std::int64_t i = 0; i < draws; ++i)
      observed[std::min(sample(law, pt.y0, rng), top)] += 1;
    std::vector<double> expected(top + 1, 0.0);
    double tail = 1.0;
    for (std::int64_t y = 0; y < top; ++y) {
      expected[y] = pmf(law, pt.y0, y);
      tail -= expected[y];
    }
    expected[top] = std::max(tail, 0.0);
    const double p = oracles::chi_square_p(observed, expected, draws);
    c.detail << "p=" << p << " ";
    c.require(p > 0.01, "chi-square p <= 0.01");
  }
}

// --- criterion 4 ------------------------------------------------------------

void lomax_mean_times(Criterion& c) {
  const auto repro = mean_event_time(SurvivalSpec::lomax(3.235, 2.712));
  const auto removal = mean_event_time(SurvivalSpec::lomax(4.987, 3.980));
  c.require(repro.has_value() && removal.has_value(), "moment existence");
  if (repro) {
    c.detail << "reproduction mean " << *repro << " ";
    c.require(std::abs(*repro - 1.81) <= 0.01, "reproduction mean outside 1.81 +- 0.01");
  }
  if (removal) {
    c.detail << "removal mean " << *removal << " ";
    c.require(std::abs(*removal - 2.79) <= 0.01, "removal mean outside 2.79 +- 0.01");
  }
}

// --- criterion 5 ------------------------------------------------------------

ContinuousRates exponential_rates(double lambda, double mu) {
  return ContinuousRates{
      [lambda](double t) { return -lambda * t; },
      [lambda](double t) { return lambda * std::exp(-lambda * t); },
      [mu](double t) { return -mu * t; },
  };
}

void homogeneous_closed_form(Criterion& c) {
  const std::vector<std::array<double, 3>> triples{
      {0.5, 0.5, 1.0},  {0.8, 0.3, 2.0},  {0.2, 0.9, 5.0},   {1.5, 1.5, 0.7},
      {0.05, 0.4, 10.0}, {0.6, 0.1, 3.0},  {1.2, 0.8, 1.5},   {0.3, 0.3, 8.0},
      {0.9, 1.6, 2.5},  {0.07, 0.02, 20.0}};
  double worst = 0.0;
  for (const auto& [lambda, mu, t] : triples) {
    const double expected = oracles::homogeneous_gamma(lambda, mu, t);
    worst = std::max(worst, std::abs(gamma_dependence(exponential_rates(lambda, mu), t) - expected));
  }
  c.detail << "max |quadrature - closed form| = " << worst << " ";
  c.require(worst < 1e-8, "gamma tolerance 1e-8");

  double worst_law = 0.0;
  for (const auto& [lambda, mu, t] : triples) {
    if (lambda != mu) continue;
    const auto law = transition_law_continuous(exponential_rates(lambda, lambda), t);
    const double expected = lambda * t / (1.0 + lambda * t);
    worst_law = std::max({worst_law, std::abs(law.theta - expected), std::abs(law.pi - expected)});
  }
  c.detail << "max theta/pi error = " << worst_law << " ";
  c.require(worst_law < 1e-8, "theta=pi=lambda t/(1+lambda t)");
}

// --- criterion 6 ------------------------------------------------------------

void simulate_then_recover(Criterion& c) {
  const ModelSpec model{Family::Lomax, Constraint::Full};
  const ParameterVector truth{std::log(3.0), std::log(3.0), std::log(17.0), std::log(5.0)};
  const SurvivalPair pair = model.make_pair(truth);
  constexpr int n_datasets = 50;
  constexpr std::int64_t horizon = 200;

  int covered = 0;
  std::vector<std::vector<double>> estimates(4), ses(4);
  std::uint64_t attempt = 0;
  for (int d = 0; d < n_datasets; ++d) {
    std::vector<std::int64_t> path;
    do {  // y_init = 1, conditioned on non-extinction at the horizon
      RngStream rng = derive_stream(1234, attempt++);
      path = simulate_path(pair, 1, horizon, rng);
    } while (path.back() == 0);

    std::vector<Observation> obs;
    for (size_t t = 0; t < path.size(); ++t) obs.push_back({static_cast<double>(t), path[t]});
    const PrevalenceSeries data(std::move(obs));

    FitOptions options;
    options.seed = 99 + static_cast<std::uint64_t>(d);
    const FitResult result = fit(model, data, options);

    bool run_covered = result.se_valid;
    if (result.se_valid) {
      for (int i = 0; i < 4; ++i) {
        if (std::abs(result.estimate[i] - truth[i]) > 3.0 * result.standard_errors[i])
          run_covered = false;
        estimates[i].push_back(result.estimate[i]);
        ses[i].push_back(result.standard_errors[i]);
      }
    }
    if (run_covered) ++covered;
  }

  c.detail << "coverage " << covered << "/" << n_datasets << " ";
  c.require(covered >= 45, "within-3-SE coverage below 90%");

  for (int i = 0; i < 4; ++i) {
    c.require(estimates[i].size() >= 2, "too few runs with reported SEs");
    if (estimates[i].size() < 2) continue;
    double mean = 0.0;
    for (double v : estimates[i]) mean += v;
    mean /= static_cast<double>(estimates[i].size());
    double var = 0.0;
    for (double v : estimates[i]) var += (v - mean) * (v - mean);
    const double mc_sd = std::sqrt(var / static_cast<double>(estimates[i].size() - 1));
    double rms = 0.0;
    for (double v : ses[i]) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(ses[i].size()));
    const double ratio = rms / mc_sd;
    c.detail << "se/spread[" << i << "]=" << ratio << " ";
    c.require(ratio > 0.75 && ratio < 1.25, "reported SEs not within 25% of the MC spread");
  }
}

// --- criterion 7 ------------------------------------------------------------

void nested_dominance(Criterion& c) {
  const PrevalenceSeries data = read_prevalence_csv(std::string(BDEPI_DATA_DIR) +
                                                    "/synthetic_lomax.csv");
  FitOptions options;
  options.starts = 4;
  options.seed = 5;
  const auto table = model_table(
      {Family::BurrXII, Family::LogLogistic, Family::Lomax, Family::ParaLogistic},
      {Constraint::Full, Constraint::AcceleratedEventTime, Constraint::ProportionalRate,
       Constraint::Both},
      data, options);

  const auto cell = [&](Family f, Constraint k) -> const ModelTableEntry* {
    for (const auto& entry : table)
      if (entry.model.family == f && entry.model.constraint == k) return &entry;
    return nullptr;
  };

  for (Family family : {Family::BurrXII, Family::LogLogistic, Family::Lomax, Family::ParaLogistic}) {
    const auto* full = cell(family, Constraint::Full);
    c.require(full && full->fit.has_value(), "full fit missing");
    if (!full || !full->fit) continue;
    for (Constraint k : {Constraint::AcceleratedEventTime, Constraint::ProportionalRate,
                         Constraint::Both}) {
      const auto* entry = cell(family, k);
      if (!entry || entry->status != CellStatus::Fitted) continue;
      const double slack = full->fit->loglik - entry->fit->loglik;
      if (slack < 0.0) c.detail << to_string(family) << "/" << to_string(k) << " slack " << slack << " ";
      c.require(slack >= -1e-4, std::string(to_string(family)) + "/" + to_string(k) +
                                    " beats the full model beyond tolerance");
    }
  }

  c.require(cell(Family::LogLogistic, Constraint::ProportionalRate)->status ==
                CellStatus::Inapplicable,
            "log-logistic PR cell should be inapplicable");
  c.require(cell(Family::LogLogistic, Constraint::Both)->status == CellStatus::Inapplicable,
            "log-logistic Both cell should be inapplicable");
  for (Family family : {Family::Lomax, Family::ParaLogistic}) {
    const auto* both = cell(family, Constraint::Both);
    const auto* full = cell(family, Constraint::Full);
    c.require(both->status == CellStatus::CollapsedToFull, "Both cell should collapse to full");
    c.require(both->fit.has_value() && full->fit.has_value() &&
                  both->fit->aic == full->fit->aic && both->fit->estimate == full->fit->estimate,
              "collapsed cell should carry the full fit");
  }
  c.detail << "structure and dominance hold over the 4x4 grid ";
}

// --- criterion 8 ------------------------------------------------------------

void rt_identity(Criterion& c) {
  const PrevalenceSeries data = read_prevalence_csv(std::string(BDEPI_DATA_DIR) +
                                                    "/synthetic_lomax.csv");
  const ModelSpec model{Family::Lomax, Constraint::Full};
  const ParameterVector delta{1.29, 1.45, 2.43, 1.81};
  std::vector<std::pair<double, double>> day_pairs;
  for (size_t j = 1; j < data.size(); ++j) day_pairs.emplace_back(data[j - 1].day, data[j].day);
  const auto rt = rt_series(model, delta, day_pairs);
  const auto predicted = conditional_expectation_series(model, delta, data);
  double worst = 0.0;
  for (size_t j = 0; j < predicted.size(); ++j) {
    const double via_r = rt.points[j].r * static_cast<double>(data[j].count);
    const double scale = std::max(1.0, std::abs(predicted[j].second));
    worst = std::max(worst, std::abs(via_r - predicted[j].second) / scale);
  }
  c.detail << "max relative gap " << worst << " ";
  c.require(worst <= 1e-12, "R * y_prev vs conditional expectation beyond 1e-12");

  const ModelSpec aft{Family::Lomax, Constraint::AcceleratedEventTime};
  const auto unit = rt_series(aft, {1.3, 0.9, 0.0}, day_pairs);
  bool all_one = true;
  for (const auto& p : unit.points) all_one = all_one && p.r == 1.0;
  c.require(all_one, "R should be identically 1 for coinciding specs");
}

// --- criterion 9 ------------------------------------------------------------

std::string run_cli(const std::string& args, int* exit_code) {
  const std::string cmd = std::string(BDEPI_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  std::string out;
  if (!pipe) {
    *exit_code = -1;
    return out;
  }
  char buf[4096];
  size_t n;
  while ((n = ::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = ::pclose(pipe);
  *exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

void band_reproducibility(Criterion& c) {
  const fs::path dir = fs::temp_directory_path() / ("bdepi_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string data = std::string(BDEPI_DATA_DIR) + "/synthetic_lomax.csv";
  const std::string fit_json = (dir / "fit.json").string();

  int code = 0;
  run_cli("fit --data " + data + " --family lomax --constraint full --seed 1 --out " + fit_json,
          &code);
  c.require(code == 0, "fit exited " + std::to_string(code));

  const std::string rt_cmd =
      "rt --params " + fit_json + " --data " + data + " --paths 500 --level 95 --seed 7 --out ";
  run_cli(rt_cmd + (dir / "a.tsv").string(), &code);
  c.require(code == 0, "rt exited " + std::to_string(code));
  run_cli(rt_cmd + (dir / "b.tsv").string(), &code);
  c.require(code == 0, "rt rerun exited " + std::to_string(code));
  const std::string a = read_file((dir / "a.tsv").string());
  c.require(a == read_file((dir / "b.tsv").string()), "reruns not byte-identical");

  run_cli("rt --params " + fit_json + " --data " + data +
              " --paths 500 --level 50 --seed 7 --out " + (dir / "c.tsv").string(),
          &code);
  c.require(code == 0, "rt level 50 exited " + std::to_string(code));
  const std::string narrow = read_file((dir / "c.tsv").string());

  const auto parse = [](const std::string& text) {
    std::vector<std::array<double, 4>> rows;
    std::istringstream stream(text);
    std::string line;
    std::getline(stream, line);  // header
    while (std::getline(stream, line)) {
      std::array<double, 4> row{};
      std::istringstream fields(line);
      fields >> row[0] >> row[1] >> row[2] >> row[3];
      rows.push_back(row);
    }
    return rows;
  };
  const auto wide_rows = parse(a);
  const auto narrow_rows = parse(narrow);
  c.require(wide_rows.size() == 60 && narrow_rows.size() == 60, "expected 60 band rows");
  bool contained = true, nested = true;
  for (size_t i = 0; i < wide_rows.size(); ++i) {
    contained = contained && wide_rows[i][2] <= wide_rows[i][1] && wide_rows[i][1] <= wide_rows[i][3];
    nested = nested && narrow_rows[i][2] >= wide_rows[i][2] && narrow_rows[i][3] <= wide_rows[i][3];
  }
  c.require(contained, "central estimate escapes the 95% band");
  c.require(nested, "50% band not nested in the 95% band");
  c.detail << "byte-identical reruns, containment and nesting over 60 days ";
  fs::remove_all(dir);
}

}  // namespace

int main() {
  run_criterion(1, "pmf normalization", 1.0, pmf_normalization);
  run_criterion(2, "moment identities", 1.0, moment_identities);
  run_criterion(3, "sampler exactness", 30.0, sampler_exactness);
  run_criterion(4, "Lomax mean event times", 0.0, lomax_mean_times);
  run_criterion(5, "homogeneous closed form", 1.0, homogeneous_closed_form);
  run_criterion(6, "simulate-then-recover", 600.0, simulate_then_recover);
  run_criterion(7, "nested-model dominance and table structure", 0.0, nested_dominance);
  run_criterion(8, "R(t) identity", 0.0, rt_identity);
  run_criterion(9, "band reproducibility", 0.0, band_reproducibility);
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
