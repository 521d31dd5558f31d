#ifndef BDEPI_REPRODUCTION_HPP_
#define BDEPI_REPRODUCTION_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bdepi/likelihood.hpp"
#include "bdepi/survival.hpp"

namespace bdepi {

struct RtPoint {
  double day = 0.0;  // t_{j-1}, the left endpoint of the step
  double r = 0.0;
};

struct RtBandPoint {
  double day = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::int64_t contributing_paths = 0;  // paths not yet absorbed at this day
};

struct RtSeries {
  std::vector<RtPoint> points;
  std::optional<double> threshold_crossing;  // first day with r < 1
  std::vector<RtBandPoint> bands;
  std::int64_t paths_used = 0;
};

/// Effective reproduction number per step:
/// R(t_{j-1}) = (1 - h_mu(t_{j-1})) / (1 - h_lambda(t_{j-1})).
RtSeries rt_series(const ModelSpec& model, const ParameterVector& delta,
                   const std::vector<std::pair<double, double>>& day_pairs);

/// Simulation bands: `paths` free-running trajectories are drawn from the
/// fitted process on the daily grid 0..horizon, each path contributes its
/// realized one-step growth factor y_{t+1}/y_t while it is alive (this is
/// the per-path (1-h_mu)/(1-h_lambda) with both hazards replaced by their
/// within-path empirical estimates), and nearest-rank percentiles at the
/// requested level envelope the parametric estimate. Absorbed paths stop
/// contributing; the per-day contributing count is tracked.
RtSeries rt_bands(const ModelSpec& model, const ParameterVector& delta, std::int64_t y_init,
                  std::int64_t horizon, std::int64_t paths, double level, std::uint64_t rng_root);

}  // namespace bdepi

#endif  // BDEPI_REPRODUCTION_HPP_
