#include "bdepi/likelihood.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bdepi/bdprocess.hpp"

namespace bdepi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PrevalenceSeries::PrevalenceSeries(std::vector<Observation> obs) : observations(std::move(obs)) {
  if (observations.size() < 2)
    throw std::invalid_argument("prevalence series needs at least 2 observations");
  for (size_t i = 0; i < observations.size(); ++i) {
    if (observations[i].day < 0.0)
      throw std::invalid_argument("prevalence series: negative day " +
                                  std::to_string(observations[i].day));
    if (observations[i].count < 0)
      throw std::invalid_argument("prevalence series: negative count at day " +
                                  std::to_string(observations[i].day));
    if (i > 0 && !(observations[i].day > observations[i - 1].day))
      throw std::invalid_argument("prevalence series: days not strictly increasing at day " +
                                  std::to_string(observations[i].day));
  }
}

double log_likelihood(const ModelSpec& model, const ParameterVector& delta,
                      const PrevalenceSeries& data) {
  const SurvivalPair pair = model.make_pair(delta);
  double total = 0.0;
  for (size_t j = 1; j < data.size(); ++j) {
    const auto& prev = data[j - 1];
    const auto& cur = data[j];
    if (cur.count == 0) continue;      // absorbing state, not observable
    if (prev.count == 0) continue;     // reintroduction, impossible under the model
    const TransitionLaw law = transition_law_discrete(pair, prev.day, cur.day);
    const double term = log_pmf(law, prev.count, cur.count);
    if (term == -kInf) return -kInf;
    total += term;
  }
  return total;
}

std::vector<std::string> series_warnings(const PrevalenceSeries& data) {
  std::vector<std::string> warnings;
  size_t included = 0;
  for (size_t j = 1; j < data.size(); ++j) {
    if (data[j].count == 0) continue;
    if (data[j - 1].count == 0) {
      warnings.push_back("zero-to-positive transition at day " + std::to_string(data[j].day) +
                         " excluded from the likelihood (impossible under the model)");
      continue;
    }
    ++included;
  }
  if (included == 0)
    warnings.push_back("no observation pair contributes to the likelihood");
  return warnings;
}

std::vector<std::pair<double, double>> conditional_expectation_series(
    const ModelSpec& model, const ParameterVector& delta, const PrevalenceSeries& data) {
  const SurvivalPair pair = model.make_pair(delta);
  std::vector<std::pair<double, double>> out;
  out.reserve(data.size() - 1);
  for (size_t j = 1; j < data.size(); ++j) {
    const auto& prev = data[j - 1];
    const auto& cur = data[j];
    if (prev.count == 0) {
      out.emplace_back(cur.day, 0.0);
      continue;
    }
    const double h_mu = discrete_hazard(pair.removal, prev.day, cur.day);
    const double h_lambda = discrete_hazard(pair.reproduction, prev.day, cur.day);
    out.emplace_back(cur.day, static_cast<double>(prev.count) * (1.0 - h_mu) / (1.0 - h_lambda));
  }
  return out;
}

}  // namespace bdepi
