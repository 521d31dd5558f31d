#ifndef BDEPI_ESTIMATE_HPP_
#define BDEPI_ESTIMATE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bdepi/likelihood.hpp"
#include "bdepi/survival.hpp"

namespace bdepi {

using Objective = std::function<double(const std::vector<double>&)>;

/// Standard Nelder-Mead coefficients: reflect 1, expand 2, contract 0.5,
/// shrink 0.5. A simplex run converges when both the function spread and
/// the parameter spread over the vertices fall below the tolerances.
struct NelderMeadOptions {
  int max_iterations = 5000;  // per simplex run
  double f_tol = 1e-8;
  double x_tol = 1e-6;
  double initial_step = 0.5;
  int max_restarts = 10;  // re-seeded simplexes in minimize()
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  long iterations = 0;
  bool converged = false;
};

/// One downhill simplex run. Objective values that are NaN or +inf are
/// treated as rejections.
MinimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const NelderMeadOptions& options = {});

/// nelder_mead with restarts: the simplex is rebuilt at the incumbent
/// until a restart no longer improves the value.
MinimizeResult minimize(const Objective& f, const std::vector<double>& x0,
                        const NelderMeadOptions& options = {});

struct FitOptions {
  int starts = 8;  // multi-start count; start 0 is the default point
  double jitter_sd = 0.5;
  std::uint64_t seed = 0;
  NelderMeadOptions nm{};
  std::vector<ParameterVector> extra_starts;  // e.g. embedded nested optima
  bool compute_standard_errors = true;
};

struct FitResult {
  ModelSpec model;
  ParameterVector estimate;
  std::vector<double> standard_errors;  // empty when withheld (see se_valid)
  bool se_valid = false;
  double loglik = 0.0;
  double aic = 0.0;
  bool converged = false;
  long iterations = 0;
  std::vector<std::string> warnings;
};

/// Default initial point: scale parameters at the log of the series
/// midpoint time, ln q = 1, ln a = 0, ln d = ln c = 0.
ParameterVector default_start(const ModelSpec& model, const PrevalenceSeries& data);

/// Maximum-likelihood fit by multi-start Nelder-Mead; the best start wins
/// (ties broken by start order, so results are deterministic under a
/// fixed seed). Non-convergence is flagged, the best point still reported.
FitResult fit(const ModelSpec& model, const PrevalenceSeries& data, const FitOptions& options = {});

/// Standard errors from the observed information matrix: central-difference
/// Hessian of -log_lik with per-coordinate steps max(1e-4, 1e-4 |delta_i|),
/// inverted via Cholesky. Returns nullopt when the Hessian is not positive
/// definite.
std::optional<std::vector<double>> observed_information_ses(const Objective& log_lik,
                                                            const std::vector<double>& at);

/// observed_information_ses for a fitted model.
std::optional<std::vector<double>> standard_errors(const ModelSpec& model,
                                                   const ParameterVector& at,
                                                   const PrevalenceSeries& data);

enum class CellStatus { Fitted, CollapsedToFull, Inapplicable, Failed };

struct ModelTableEntry {
  ModelSpec model;
  CellStatus status = CellStatus::Failed;
  std::optional<FitResult> fit;  // Fitted, or the full fit when collapsed
  std::string message;
};

/// Fits every well-defined (family, constraint) cell and ranks by AIC.
/// Log-logistic proportional-rate (and Both) cells are inapplicable; the
/// Lomax and para-logistic Both cells span the same space as the full
/// model and are reported as the full fit. Within a family, constrained
/// optima are embedded as extra starts for the full fit so the nested
/// log-likelihood ordering survives optimizer noise.
std::vector<ModelTableEntry> model_table(const std::vector<Family>& families,
                                         const std::vector<Constraint>& constraints,
                                         const PrevalenceSeries& data,
                                         const FitOptions& options = {});

}  // namespace bdepi

#endif  // BDEPI_ESTIMATE_HPP_
