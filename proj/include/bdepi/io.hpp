#ifndef BDEPI_IO_HPP_
#define BDEPI_IO_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bdepi/estimate.hpp"
#include "bdepi/likelihood.hpp"
#include "bdepi/reproduction.hpp"

namespace bdepi {

/// One infected unit: detection is the birth date, removal the death date.
struct EventRecord {
  std::string unit_id;
  std::int64_t detection_day = 0;
  std::optional<std::int64_t> removal_day;  // absent: not yet removed

  bool operator==(const EventRecord&) const = default;
};

/// Daily prevalence from event records: a unit is prevalent from its
/// detection day through its removal day inclusive (or through the
/// horizon when still open). Days 0..horizon are emitted; the horizon
/// defaults to the last observed day.
PrevalenceSeries events_to_prevalence(const std::vector<EventRecord>& records,
                                      std::optional<std::int64_t> horizon = std::nullopt);

/// CSV schema: header "day,count", integer days strictly ascending,
/// nonnegative integer counts. Malformed input throws with line numbers.
PrevalenceSeries read_prevalence_csv(const std::string& path);
std::string write_prevalence_csv(const PrevalenceSeries& series);

/// CSV schema: header "unit_id,detection_day,removal_day"; an empty
/// removal field marks a unit that has not been removed.
std::vector<EventRecord> read_events_csv(const std::string& path);
std::string write_events_csv(const std::vector<EventRecord>& records);

/// Result document: model, estimates, standard_errors, loglik, aic, rt,
/// warnings (plus convergence diagnostics). Numbers keep full precision.
nlohmann::json result_to_json(const FitResult& fit, const RtSeries& rt);

/// Model and estimates parsed back from a result (or hand-written
/// parameter) document.
struct ParamsFile {
  ModelSpec model;
  ParameterVector estimates;
};
ParamsFile params_from_json(const nlohmann::json& doc);
ParamsFile read_params_json(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace bdepi

#endif  // BDEPI_IO_HPP_
