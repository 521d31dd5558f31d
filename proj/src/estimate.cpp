#include "bdepi/estimate.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_linalg.h>
#include <gsl/gsl_matrix.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bdepi/rng.hpp"

namespace bdepi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double guard(double v) { return std::isnan(v) ? kInf : v; }

struct Vertex {
  std::vector<double> x;
  double f;
};

}  // namespace

MinimizeResult nelder_mead(const Objective& f, const std::vector<double>& x0,
                           const NelderMeadOptions& options) {
  const size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

  std::vector<Vertex> simplex;
  simplex.reserve(n + 1);
  simplex.push_back({x0, guard(f(x0))});
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> x = x0;
    x[i] += options.initial_step;
    simplex.push_back({x, guard(f(x))});
  }

  const auto by_value = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  long iterations = 0;
  bool converged = false;

  while (iterations < options.max_iterations) {
    std::stable_sort(simplex.begin(), simplex.end(), by_value);
    const Vertex& best = simplex.front();
    Vertex& worst = simplex.back();

    double x_spread = 0.0;
    for (const Vertex& v : simplex)
      for (size_t i = 0; i < n; ++i) x_spread = std::max(x_spread, std::abs(v.x[i] - best.x[i]));
    const double f_spread = worst.f - best.f;
    if (f_spread < options.f_tol && x_spread < options.x_tol && std::isfinite(best.f)) {
      converged = true;
      break;
    }
    ++iterations;

    std::vector<double> centroid(n, 0.0);
    for (size_t v = 0; v < n; ++v)
      for (size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(n);

    const auto along = [&](double coef) {
      std::vector<double> x(n);
      for (size_t i = 0; i < n; ++i) x[i] = centroid[i] + coef * (centroid[i] - worst.x[i]);
      return x;
    };

    const std::vector<double> xr = along(1.0);
    const double fr = guard(f(xr));
    if (fr < best.f) {
      const std::vector<double> xe = along(2.0);
      const double fe = guard(f(xe));
      if (fe < fr) worst = {xe, fe};
      else worst = {xr, fr};
      continue;
    }
    if (fr < simplex[n - 1].f) {  // better than the second worst
      worst = {xr, fr};
      continue;
    }
    if (fr < worst.f) {
      const std::vector<double> xc = along(0.5);  // outside contraction
      const double fc = guard(f(xc));
      if (fc <= fr) {
        worst = {xc, fc};
        continue;
      }
    } else {
      const std::vector<double> xc = along(-0.5);  // inside contraction
      const double fc = guard(f(xc));
      if (fc < worst.f) {
        worst = {xc, fc};
        continue;
      }
    }
    for (size_t v = 1; v <= n; ++v) {  // shrink toward the best vertex
      for (size_t i = 0; i < n; ++i)
        simplex[v].x[i] = best.x[i] + 0.5 * (simplex[v].x[i] - best.x[i]);
      simplex[v].f = guard(f(simplex[v].x));
    }
  }

  std::stable_sort(simplex.begin(), simplex.end(), by_value);
  return {simplex.front().x, simplex.front().f, iterations, converged};
}

MinimizeResult minimize(const Objective& f, const std::vector<double>& x0,
                        const NelderMeadOptions& options) {
  MinimizeResult best = nelder_mead(f, x0, options);
  long total_iterations = best.iterations;
  for (int r = 0; r < options.max_restarts; ++r) {
    MinimizeResult next = nelder_mead(f, best.x, options);
    total_iterations += next.iterations;
    const bool improved = next.f < best.f - 1e-12 * std::max(1.0, std::abs(best.f));
    if (next.f <= best.f) best = {next.x, next.f, 0, next.converged};
    if (!improved) break;
  }
  best.iterations = total_iterations;
  return best;
}

ParameterVector default_start(const ModelSpec& model, const PrevalenceSeries& data) {
  const double t_mid =
      0.5 * (data.observations.front().day + data.observations.back().day);
  const double log_b0 = std::log(std::max(t_mid, 1e-6));
  ParameterVector start;
  for (ParamKind kind : model.parameter_kinds()) {
    switch (kind) {
      case ParamKind::Scale: start.push_back(log_b0); break;
      case ParamKind::Tail: start.push_back(1.0); break;
      case ParamKind::Shape:
      case ParamKind::Accel:
      case ParamKind::Prop: start.push_back(0.0); break;
    }
  }
  return start;
}

FitResult fit(const ModelSpec& model, const PrevalenceSeries& data, const FitOptions& options) {
  if (!model.applicable())
    throw std::invalid_argument("constraint inapplicable: log-logistic has no proportional rate form");

  const Objective negative_loglik = [&](const std::vector<double>& delta) {
    return -log_likelihood(model, delta, data);
  };

  std::vector<ParameterVector> starts;
  const ParameterVector base = default_start(model, data);
  starts.push_back(base);
  for (int s = 1; s < options.starts; ++s) {
    RngStream rng = derive_stream(options.seed, static_cast<std::uint64_t>(s));
    ParameterVector jittered = base;
    for (double& v : jittered) {
      const double u1 = next_uniform(rng);
      const double u2 = next_uniform(rng);
      const double z = std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * M_PI * u2);
      v += options.jitter_sd * z;
    }
    starts.push_back(jittered);
  }
  for (const ParameterVector& extra : options.extra_starts) {
    if (extra.size() == base.size()) starts.push_back(extra);
  }

  MinimizeResult best;
  best.f = kInf;
  bool have_best = false;
  for (const ParameterVector& start : starts) {
    const MinimizeResult run = minimize(negative_loglik, start, options.nm);
    if (!have_best || run.f < best.f) {
      best = run;
      have_best = true;
    }
  }

  FitResult result;
  result.model = model;
  result.estimate = best.x;
  result.loglik = -best.f;
  result.aic = 2.0 * model.free_parameter_count() - 2.0 * result.loglik;
  result.converged = best.converged && std::isfinite(best.f);
  result.iterations = best.iterations;
  result.warnings = series_warnings(data);
  if (!result.converged) result.warnings.push_back("optimizer did not converge; best point reported");

  if (options.compute_standard_errors && std::isfinite(best.f)) {
    const auto ses = standard_errors(model, result.estimate, data);
    if (ses) {
      result.standard_errors = *ses;
      result.se_valid = true;
    } else {
      result.warnings.push_back(
          "observed information matrix not positive definite; standard errors withheld");
    }
  }
  return result;
}

std::optional<std::vector<double>> observed_information_ses(const Objective& log_lik,
                                                            const std::vector<double>& at) {
  const size_t n = at.size();
  const auto g = [&](const std::vector<double>& x) { return -log_lik(x); };

  std::vector<double> h(n);
  for (size_t i = 0; i < n; ++i) h[i] = std::max(1e-4, 1e-4 * std::abs(at[i]));

  const auto shifted = [&](std::initializer_list<std::pair<size_t, double>> moves) {
    std::vector<double> x = at;
    for (const auto& [i, delta] : moves) x[i] += delta;
    return g(x);
  };

  std::vector<double> hess(n * n);
  const double g0 = g(at);
  for (size_t i = 0; i < n; ++i) {
    hess[i * n + i] = (shifted({{i, h[i]}}) - 2.0 * g0 + shifted({{i, -h[i]}})) / (h[i] * h[i]);
    for (size_t j = i + 1; j < n; ++j) {
      const double v = (shifted({{i, h[i]}, {j, h[j]}}) - shifted({{i, h[i]}, {j, -h[j]}}) -
                        shifted({{i, -h[i]}, {j, h[j]}}) + shifted({{i, -h[i]}, {j, -h[j]}})) /
                       (4.0 * h[i] * h[j]);
      hess[i * n + j] = v;
      hess[j * n + i] = v;
    }
  }
  for (double v : hess)
    if (!std::isfinite(v)) return std::nullopt;

  gsl_set_error_handler_off();
  gsl_matrix* m = gsl_matrix_alloc(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) gsl_matrix_set(m, i, j, hess[i * n + j]);
  std::optional<std::vector<double>> out;
  if (gsl_linalg_cholesky_decomp1(m) == GSL_SUCCESS &&
      gsl_linalg_cholesky_invert(m) == GSL_SUCCESS) {
    std::vector<double> ses(n);
    bool ok = true;
    for (size_t i = 0; i < n; ++i) {
      const double v = gsl_matrix_get(m, i, i);
      if (v <= 0.0 || !std::isfinite(v)) ok = false;
      ses[i] = std::sqrt(v);
    }
    if (ok) out = std::move(ses);
  }
  gsl_matrix_free(m);
  return out;
}

std::optional<std::vector<double>> standard_errors(const ModelSpec& model,
                                                   const ParameterVector& at,
                                                   const PrevalenceSeries& data) {
  return observed_information_ses(
      [&](const std::vector<double>& delta) { return log_likelihood(model, delta, data); }, at);
}

namespace {

// Free parameters of one realized spec in the family's layout order, or
// nullopt when the spec no longer satisfies the family constraint.
std::optional<std::vector<double>> spec_free_params(const SurvivalSpec& spec, Family family) {
  switch (family) {
    case Family::BurrXII: return std::vector<double>{spec.log_a, spec.log_b, spec.log_q};
    case Family::LogLogistic:
      if (spec.log_q != 0.0) return std::nullopt;
      return std::vector<double>{spec.log_a, spec.log_b};
    case Family::Lomax:
      if (spec.log_a != 0.0) return std::nullopt;
      return std::vector<double>{spec.log_b, spec.log_q};
    case Family::ParaLogistic:
      if (spec.log_a != spec.log_q) return std::nullopt;
      return std::vector<double>{spec.log_a, spec.log_b};
  }
  return std::nullopt;
}

// Maps a constrained optimum into the full-model parameter space of the
// same family, when the realized removal spec stays in the family.
std::optional<ParameterVector> embed_in_full(const ModelSpec& constrained,
                                             const ParameterVector& delta) {
  const auto [repro, removal] = realize_pair(constrained.make_pair(delta));
  const auto p1 = spec_free_params(repro, constrained.family);
  const auto p2 = spec_free_params(removal, constrained.family);
  if (!p1 || !p2) return std::nullopt;
  ParameterVector full = *p1;
  full.insert(full.end(), p2->begin(), p2->end());
  return full;
}

std::uint64_t cell_seed(std::uint64_t root, Family f, Constraint c) {
  const std::uint64_t index =
      static_cast<std::uint64_t>(f) * 8 + static_cast<std::uint64_t>(c) + 1;
  return splitmix64(root ^ splitmix64(index));
}

}  // namespace

std::vector<ModelTableEntry> model_table(const std::vector<Family>& families,
                                         const std::vector<Constraint>& constraints,
                                         const PrevalenceSeries& data,
                                         const FitOptions& options) {
  if (families.empty() || constraints.empty())
    throw std::invalid_argument("model_table: empty grid");

  std::vector<ModelTableEntry> entries;
  for (Family family : families) {
    std::vector<ModelTableEntry> row;
    std::vector<ParameterVector> embedded;
    bool need_full = false;

    // Constrained cells first; their optima seed the full fit.
    for (Constraint constraint : constraints) {
      const ModelSpec model{family, constraint};
      if (constraint == Constraint::Full) {
        need_full = true;
        continue;
      }
      ModelTableEntry entry;
      entry.model = model;
      if (!model.applicable()) {
        entry.status = CellStatus::Inapplicable;
        entry.message = "no proportional rate form for the log-logistic";
      } else if (model.collapses_to_full()) {
        entry.status = CellStatus::CollapsedToFull;
        entry.message = "same free-parameter space as the full model";
        need_full = true;
      } else {
        FitOptions cell_options = options;
        cell_options.seed = cell_seed(options.seed, family, constraint);
        cell_options.extra_starts.clear();
        try {
          entry.fit = fit(model, data, cell_options);
          entry.status = CellStatus::Fitted;
          if (const auto e = embed_in_full(model, entry.fit->estimate)) embedded.push_back(*e);
        } catch (const std::exception& ex) {
          entry.status = CellStatus::Failed;
          entry.message = ex.what();
        }
      }
      row.push_back(std::move(entry));
    }

    std::optional<FitResult> full_fit;
    if (need_full) {
      const ModelSpec full_model{family, Constraint::Full};
      FitOptions cell_options = options;
      cell_options.seed = cell_seed(options.seed, family, Constraint::Full);
      cell_options.extra_starts = embedded;
      try {
        full_fit = fit(full_model, data, cell_options);
      } catch (const std::exception&) {
        full_fit.reset();
      }
    }

    for (Constraint constraint : constraints) {
      if (constraint != Constraint::Full) continue;
      ModelTableEntry entry;
      entry.model = ModelSpec{family, Constraint::Full};
      if (full_fit) {
        entry.status = CellStatus::Fitted;
        entry.fit = full_fit;
      } else {
        entry.status = CellStatus::Failed;
        entry.message = "full fit failed";
      }
      row.push_back(std::move(entry));
    }
    for (ModelTableEntry& entry : row) {
      if (entry.status == CellStatus::CollapsedToFull) {
        if (full_fit) entry.fit = full_fit;
        else {
          entry.status = CellStatus::Failed;
          entry.message = "full fit failed";
        }
      }
    }
    entries.insert(entries.end(), row.begin(), row.end());
  }

  std::stable_sort(entries.begin(), entries.end(),
                   [](const ModelTableEntry& a, const ModelTableEntry& b) {
                     const bool fa = a.fit.has_value();
                     const bool fb = b.fit.has_value();
                     if (fa != fb) return fa;
                     if (!fa) return false;
                     return a.fit->aic < b.fit->aic;
                   });
  return entries;
}

}  // namespace bdepi
