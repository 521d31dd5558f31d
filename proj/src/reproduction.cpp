#include "bdepi/reproduction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bdepi/bdprocess.hpp"
#include "bdepi/rng.hpp"

namespace bdepi {

namespace {

// Nearest-rank percentile of a sorted sample.
double percentile(const std::vector<double>& sorted, double p) {
  const auto n = static_cast<std::int64_t>(sorted.size());
  const auto rank = static_cast<std::int64_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  return sorted[static_cast<size_t>(std::clamp<std::int64_t>(rank, 1, n)) - 1];
}

}  // namespace

RtSeries rt_series(const ModelSpec& model, const ParameterVector& delta,
                   const std::vector<std::pair<double, double>>& day_pairs) {
  const SurvivalPair pair = model.make_pair(delta);
  RtSeries series;
  series.points.reserve(day_pairs.size());
  for (const auto& [t_prev, t_next] : day_pairs) {
    const double h_mu = discrete_hazard(pair.removal, t_prev, t_next);
    const double h_lambda = discrete_hazard(pair.reproduction, t_prev, t_next);
    const double r = (1.0 - h_mu) / (1.0 - h_lambda);
    if (!series.threshold_crossing && r < 1.0) series.threshold_crossing = t_prev;
    series.points.push_back({t_prev, r});
  }
  return series;
}

RtSeries rt_bands(const ModelSpec& model, const ParameterVector& delta, std::int64_t y_init,
                  std::int64_t horizon, std::int64_t paths, double level, std::uint64_t rng_root) {
  if (paths < 2) throw std::invalid_argument("rt_bands: need at least 2 paths");
  if (y_init < 1) throw std::invalid_argument("rt_bands: y_init must be >= 1");
  if (horizon < 1) throw std::invalid_argument("rt_bands: horizon must be >= 1");
  if (!(level > 0.0 && level <= 100.0))
    throw std::invalid_argument("rt_bands: level must be in (0, 100]");

  const SurvivalPair pair = model.make_pair(delta);
  const auto steps = static_cast<size_t>(horizon);

  std::vector<std::pair<double, double>> day_pairs;
  day_pairs.reserve(steps);
  for (size_t j = 0; j < steps; ++j)
    day_pairs.emplace_back(static_cast<double>(j), static_cast<double>(j + 1));

  // Realized growth factors y_{t+1}/y_t per day, over the alive paths.
  std::vector<std::vector<double>> ratios(steps);
  for (std::int64_t p = 0; p < paths; ++p) {
    RngStream rng = derive_stream(rng_root, static_cast<std::uint64_t>(p));
    const std::vector<std::int64_t> path = simulate_path(pair, y_init, horizon, rng);
    for (size_t j = 0; j < steps && path[j] > 0; ++j)
      ratios[j].push_back(static_cast<double>(path[j + 1]) / static_cast<double>(path[j]));
  }

  RtSeries series = rt_series(model, delta, day_pairs);
  series.paths_used = paths;
  series.bands.reserve(steps);
  const double lower_p = (100.0 - level) / 2.0;
  const double upper_p = 100.0 - lower_p;
  for (size_t j = 0; j < steps; ++j) {
    RtBandPoint band;
    band.day = static_cast<double>(j);
    band.contributing_paths = static_cast<std::int64_t>(ratios[j].size());
    if (!ratios[j].empty()) {
      std::sort(ratios[j].begin(), ratios[j].end());
      band.lower = percentile(ratios[j], lower_p);
      band.upper = percentile(ratios[j], upper_p);
    }
    series.bands.push_back(band);
  }
  return series;
}

}  // namespace bdepi
