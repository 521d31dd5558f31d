#include "bdepi/bdprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bdepi/quadrature.hpp"

namespace bdepi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Below this, theta/pi are treated as exactly degenerate: the bracket
// [(1-pi)(1-theta)/(pi theta)]^{k+1} in the general formula is singular.
constexpr double kDegenerateTol = 1e-12;

// lgamma(n) for integer n via a read-only table; the PMF inner sum hits
// these hard during likelihood maximization.
double lgamma_int(std::int64_t n) {
  constexpr std::int64_t kTableSize = 65536;
  static const std::vector<double>& table = *[] {
    auto* t = new std::vector<double>(kTableSize);
    (*t)[0] = kInf;  // lgamma(0) pole, never used
    for (std::int64_t i = 1; i < kTableSize; ++i) (*t)[i] = std::lgamma(static_cast<double>(i));
    return t;
  }();
  if (n < kTableSize) return table[n];
  return std::lgamma(static_cast<double>(n));
}

double log_sum_exp(const std::vector<double>& terms) {
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (m == -kInf) return -kInf;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

void check_law(const TransitionLaw& law, bool allow_pi_one) {
  const double pi_sup = allow_pi_one ? 1.0 : std::nextafter(1.0, 0.0);
  if (!(law.theta >= 0.0 && law.theta <= 1.0 && law.pi >= 0.0 && law.pi <= pi_sup))
    throw std::invalid_argument("transition law requires theta in [0,1], pi in [0,1)");
}

}  // namespace

double log_choose(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return -kInf;
  return lgamma_int(n + 1) - lgamma_int(k + 1) - lgamma_int(n - k + 1);
}

ContinuousRates ContinuousRates::from_pair(const SurvivalPair& pair) {
  const auto [repro, removal] = realize_pair(pair);
  return ContinuousRates{
      [repro](double t) { return log_survival(repro, t); },
      [repro](double t) { return density(repro, t); },
      [removal](double t) { return log_survival(removal, t); },
  };
}

double rho(const SurvivalPair& pair, double t) {
  return log_survival(pair.reproduction, t) - log_survival(pair.removal, t);
}

double gamma_dependence(const ContinuousRates& rates, double t) {
  if (t < 0.0) throw std::invalid_argument("gamma_dependence: t must be >= 0");
  if (t == 0.0) return 0.0;
  const auto integrand = [&rates](double tau) {
    return rates.density_reproduction(tau) * std::exp(-rates.log_survival_removal(tau));
  };
  return integrate(integrand, 0.0, t).value;
}

double gamma_dependence(const SurvivalPair& pair, double t) {
  return gamma_dependence(ContinuousRates::from_pair(pair), t);
}

TransitionLaw transition_law_continuous(const ContinuousRates& rates, double t) {
  const double g = gamma_dependence(rates, t);
  const double s_repro = std::exp(rates.log_survival_reproduction(t));
  const double s_removal = std::exp(rates.log_survival_removal(t));
  const double denom = s_repro + g * s_removal;
  TransitionLaw law;
  law.theta = std::clamp(1.0 - s_removal / denom, 0.0, 1.0);
  law.pi = std::clamp(1.0 - s_repro / denom, 0.0, 1.0);
  law.gamma = g;
  law.mode = TransitionLaw::Mode::Continuous;
  return law;
}

TransitionLaw transition_law_continuous(const SurvivalPair& pair, double t) {
  return transition_law_continuous(ContinuousRates::from_pair(pair), t);
}

TransitionLaw transition_law_discrete(const SurvivalPair& pair, double t_prev, double t_next) {
  TransitionLaw law;
  law.theta = discrete_hazard(pair.removal, t_prev, t_next);
  law.pi = discrete_hazard(pair.reproduction, t_prev, t_next);
  law.gamma = 0.0;
  law.mode = TransitionLaw::Mode::DiscreteConditional;
  return law;
}

double log_pmf(const TransitionLaw& law, std::int64_t y0, std::int64_t y) {
  check_law(law, /*allow_pi_one=*/true);
  if (y0 < 1) throw std::invalid_argument("log_pmf: conditioning count y0 must be >= 1");
  if (y < 0) throw std::invalid_argument("log_pmf: y must be >= 0");
  const double theta = law.theta;
  const double pi = law.pi;

  // At the pi = 1 boundary every surviving unit's cluster diverges, so all
  // mass at finite y sits on extinction of the whole cohort.
  if (pi == 1.0) return y == 0 ? static_cast<double>(y0) * std::log(theta) : -kInf;

  if (theta < kDegenerateTol) {
    // Every unit survives removal: Y is a sum of y0 positive geometrics,
    // i.e. a negative binomial shifted by y0.
    if (y < y0) return -kInf;
    if (pi < kDegenerateTol) return y == y0 ? 0.0 : -kInf;
    return log_choose(y - 1, y0 - 1) + static_cast<double>(y0) * std::log1p(-pi) +
           static_cast<double>(y - y0) * std::log(pi);
  }
  if (pi < kDegenerateTol) {
    // Every surviving unit has a cluster of exactly one: Binomial(y0, 1-theta).
    if (y > y0) return -kInf;
    return log_choose(y0, y) + static_cast<double>(y) * std::log1p(-theta) +
           static_cast<double>(y0 - y) * std::log(theta);
  }

  if (y == 0) return static_cast<double>(y0) * std::log(theta);

  const double log_bracket =
      std::log1p(-pi) + std::log1p(-theta) - std::log(pi) - std::log(theta);
  const std::int64_t k_max = std::min(y - 1, y0 - 1);
  std::vector<double> terms;
  terms.reserve(static_cast<size_t>(k_max) + 1);
  for (std::int64_t k = 0; k <= k_max; ++k) {
    terms.push_back(log_choose(y0 - 1, k) + log_choose(y, y - k - 1) +
                    static_cast<double>(k + 1) * log_bracket);
  }
  return std::log(static_cast<double>(y0)) - std::log(static_cast<double>(y)) +
         static_cast<double>(y0) * std::log(theta) + static_cast<double>(y) * std::log(pi) +
         log_sum_exp(terms);
}

double pmf(const TransitionLaw& law, std::int64_t y0, std::int64_t y) {
  return std::exp(log_pmf(law, y0, y));
}

Moments moments(const TransitionLaw& law, std::int64_t y0) {
  check_law(law, /*allow_pi_one=*/false);
  const double theta = law.theta;
  const double pi = law.pi;
  const double n = static_cast<double>(y0);
  Moments m;
  m.mean = n * (1.0 - theta) / (1.0 - pi);
  m.variance = n * (1.0 - theta) * (theta + pi * (1.0 - theta - pi)) /
               ((1.0 - pi) * (1.0 - pi) * (1.0 - pi));
  if (law.mode == TransitionLaw::Mode::Continuous && theta < 1.0) {
    // The theta/pi equations force gamma = pi/(1-theta); with that, the
    // closed form above equals y0 R [1 + (2 gamma - 1) R] for
    // R = (1-theta)/(1-pi). Check the law is internally consistent.
    const double r = m.mean / n;
    const double via_gamma = n * r * (1.0 + (2.0 * law.gamma - 1.0) * r);
    const double scale = std::max(1.0, std::abs(m.variance));
    if (std::abs(via_gamma - m.variance) > 1e-6 * scale)
      throw std::runtime_error(
          "continuous transition law is inconsistent: closed-form variance " +
          std::to_string(m.variance) + " vs gamma form " + std::to_string(via_gamma));
  }
  return m;
}

std::vector<std::int64_t> simulate_path(const SurvivalPair& pair, std::int64_t y_init,
                                        std::int64_t horizon, RngStream& rng) {
  if (y_init < 0) throw std::invalid_argument("simulate_path: y_init must be >= 0");
  if (horizon < 1) throw std::invalid_argument("simulate_path: horizon must be >= 1");
  std::vector<std::int64_t> path;
  path.reserve(static_cast<size_t>(horizon) + 1);
  path.push_back(y_init);
  for (std::int64_t t = 0; t < horizon; ++t) {
    const TransitionLaw law =
        transition_law_discrete(pair, static_cast<double>(t), static_cast<double>(t + 1));
    path.push_back(sample(law, path.back(), rng));
  }
  return path;
}

std::int64_t sample(const TransitionLaw& law, std::int64_t y0, RngStream& rng) {
  check_law(law, /*allow_pi_one=*/false);
  if (y0 < 0) throw std::invalid_argument("sample: y0 must be >= 0");
  const double theta = law.theta;
  const double pi = law.pi;
  const double log_pi = pi > 0.0 ? std::log(pi) : -kInf;
  std::int64_t total = 0;
  for (std::int64_t i = 0; i < y0; ++i) {
    if (next_uniform(rng) < theta) continue;  // removed without offspring
    if (pi <= 0.0) {
      total += 1;
      continue;
    }
    // Positive geometric by inversion: P(G = g) = pi^{g-1}(1-pi), g >= 1.
    const double u = next_uniform(rng);
    const double g = std::ceil(std::log1p(-u) / log_pi);
    total += std::max<std::int64_t>(1, static_cast<std::int64_t>(g));
  }
  return total;
}

}  // namespace bdepi
