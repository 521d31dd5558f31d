#ifndef BDEPI_LIKELIHOOD_HPP_
#define BDEPI_LIKELIHOOD_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "bdepi/survival.hpp"

namespace bdepi {

struct Observation {
  double day = 0.0;         // days since detection of the index case
  std::int64_t count = 0;   // infected-and-detected, not yet removed

  bool operator==(const Observation&) const = default;
};

/// Ordered prevalence observations; day 0 is the detection of the index
/// case. Days must be strictly increasing, counts nonnegative, and at
/// least two observations are required.
struct PrevalenceSeries {
  std::vector<Observation> observations;

  explicit PrevalenceSeries(std::vector<Observation> obs);
  PrevalenceSeries() = default;

  size_t size() const { return observations.size(); }
  const Observation& operator[](size_t i) const { return observations[i]; }

  bool operator==(const PrevalenceSeries&) const = default;
};

/// Free parameters on the log scale; layout fixed by the ModelSpec.
using ParameterVector = std::vector<double>;

/// Conditional discrete-time log-likelihood: the sum of
/// log P(Y(t_j) = y_j | Y(t_{j-1}) = y_{j-1}) over consecutive pairs.
/// Pairs with y_j = 0 are excluded (zero prevalence is absorbing and not
/// observable); pairs with y_{j-1} = 0 and y_j > 0 are impossible under
/// the model and are excluded as well (see series_warnings). Returns
/// -inf when an included term underflows to zero probability.
double log_likelihood(const ModelSpec& model, const ParameterVector& delta,
                      const PrevalenceSeries& data);

/// Data issues the likelihood silently skips: one warning per
/// zero-to-positive transition (reintroduction, probability zero under
/// the model), plus a note when no pair contributes at all.
std::vector<std::string> series_warnings(const PrevalenceSeries& data);

/// One-step-ahead conditional means, the sample path profile: for each
/// consecutive pair emits (t_j, y_{j-1} (1-h_mu(t_{j-1}))/(1-h_lambda(t_{j-1}))).
std::vector<std::pair<double, double>> conditional_expectation_series(
    const ModelSpec& model, const ParameterVector& delta, const PrevalenceSeries& data);

}  // namespace bdepi

#endif  // BDEPI_LIKELIHOOD_HPP_
