#ifndef BDEPI_BDPROCESS_HPP_
#define BDEPI_BDPROCESS_HPP_

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "bdepi/rng.hpp"
#include "bdepi/survival.hpp"

namespace bdepi {

/// One-step transition law of the nonhomogeneous birth-death process.
/// In continuous mode (theta, pi) come from the gamma functional; in
/// discrete conditional mode they are the removal and reproduction
/// hazards of the observation interval.
struct TransitionLaw {
  enum class Mode { Continuous, DiscreteConditional };

  double theta = 0.0;  // removal side, in [0, 1)
  double pi = 0.0;     // reproduction side, in [0, 1)
  double gamma = 0.0;  // dependence functional, continuous mode only
  Mode mode = Mode::DiscreteConditional;
};

struct PrevalenceState {
  std::int64_t y0 = 0;  // infected-and-detected, not yet removed
  double t = 0.0;       // days since detection of the index case
};

/// Survival model as callables, so tests can inject non-Burr rates
/// (e.g. constant-rate exponentials) into the continuous machinery.
struct ContinuousRates {
  std::function<double(double)> log_survival_reproduction;
  std::function<double(double)> density_reproduction;
  std::function<double(double)> log_survival_removal;

  static ContinuousRates from_pair(const SurvivalPair& pair);
};

/// rho(t) = log S_lambda(t) - log S_mu(t), the integrated rate difference.
double rho(const SurvivalPair& pair, double t);

/// gamma(t) = integral_0^t f_lambda(tau) / S_mu(tau) dtau, nonnegative and
/// nondecreasing in t. Throws QuadratureError on non-convergence.
double gamma_dependence(const ContinuousRates& rates, double t);
double gamma_dependence(const SurvivalPair& pair, double t);

/// (theta, pi, gamma) of the exact transition over [0, t]:
///   theta = 1 - S_mu/(S_lambda + gamma S_mu)
///   pi    = 1 - S_lambda/(S_lambda + gamma S_mu)
TransitionLaw transition_law_continuous(const ContinuousRates& rates, double t);
TransitionLaw transition_law_continuous(const SurvivalPair& pair, double t);

/// Conditional law of the interval (t_prev, t_next]: theta and pi are the
/// discrete removal and reproduction hazards.
TransitionLaw transition_law_discrete(const SurvivalPair& pair, double t_prev, double t_next);

/// log P(Y = y | Y_prev = y0) for the Bernoulli-binomial Lagrangian
/// distribution; y0 >= 1. Evaluated in log space with the inner sum
/// accumulated by log-sum-exp; laws with theta or pi below 1e-12 are
/// routed to their binomial / shifted-negative-binomial limits.
double log_pmf(const TransitionLaw& law, std::int64_t y0, std::int64_t y);
double pmf(const TransitionLaw& law, std::int64_t y0, std::int64_t y);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Closed-form mean y0(1-theta)/(1-pi) and variance
/// y0(1-theta)[theta + pi(1-theta-pi)]/(1-pi)^3. In continuous mode the
/// law additionally satisfies gamma = pi/(1-theta); that identity (which
/// makes the variance equal y0 R [1 + (2 gamma - 1) R]) is verified and a
/// violation beyond quadrature tolerance throws.
Moments moments(const TransitionLaw& law, std::int64_t y0);

/// Exact draw from the transition law: each of the y0 units survives
/// removal with probability 1-theta and, if it survives, contributes a
/// positive-geometric cluster with success probability 1-pi. y0 = 0 is
/// absorbing and returns 0.
std::int64_t sample(const TransitionLaw& law, std::int64_t y0, RngStream& rng);

/// log of the binomial coefficient C(n, k) for integers 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

/// One prevalence path on the daily grid: returns y_0..y_horizon with
/// y_0 = y_init and each step drawn from the discrete conditional law.
std::vector<std::int64_t> simulate_path(const SurvivalPair& pair, std::int64_t y_init,
                                        std::int64_t horizon, RngStream& rng);

}  // namespace bdepi

#endif  // BDEPI_BDPROCESS_HPP_
