#include "bdepi/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bdepi {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

[[noreturn]] void fail(const std::string& path, size_t line_no, const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + message);
}

std::int64_t parse_int(const std::string& path, size_t line_no, const std::string& field,
                       const std::string& what) {
  try {
    size_t used = 0;
    const long long v = std::stoll(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    fail(path, line_no, "expected integer " + what + ", got \"" + field + "\"");
  }
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << contents;
  if (!out) throw std::runtime_error(path + ": write failed");
}

PrevalenceSeries events_to_prevalence(const std::vector<EventRecord>& records,
                                      std::optional<std::int64_t> horizon) {
  if (records.empty()) throw std::invalid_argument("events_to_prevalence: no records");
  std::int64_t last_day = 0;
  for (const EventRecord& r : records) {
    if (r.detection_day < 0)
      throw std::invalid_argument("unit " + r.unit_id + ": negative detection day");
    if (r.removal_day && *r.removal_day < r.detection_day)
      throw std::invalid_argument("unit " + r.unit_id + ": removal before detection");
    last_day = std::max(last_day, r.detection_day);
    if (r.removal_day) last_day = std::max(last_day, *r.removal_day);
  }
  const std::int64_t h = horizon.value_or(last_day);
  if (h < 1) throw std::invalid_argument("events_to_prevalence: horizon must be >= 1");

  std::vector<Observation> observations(static_cast<size_t>(h) + 1);
  for (std::int64_t t = 0; t <= h; ++t) observations[t] = {static_cast<double>(t), 0};
  for (const EventRecord& r : records) {
    const std::int64_t from = r.detection_day;
    const std::int64_t to = std::min(h, r.removal_day.value_or(h));
    for (std::int64_t t = from; t <= to; ++t) ++observations[static_cast<size_t>(t)].count;
  }
  return PrevalenceSeries(std::move(observations));
}

PrevalenceSeries read_prevalence_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "day,count")
    fail(path, 1, "expected header \"day,count\"");
  std::vector<Observation> observations;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2) fail(path, i + 1, "expected 2 fields, got " + std::to_string(fields.size()));
    const std::int64_t day = parse_int(path, i + 1, fields[0], "day");
    const std::int64_t count = parse_int(path, i + 1, fields[1], "count");
    if (day < 0) fail(path, i + 1, "negative day");
    if (count < 0) fail(path, i + 1, "negative count");
    if (!observations.empty()) {
      const auto prev = static_cast<std::int64_t>(observations.back().day);
      if (day == prev) fail(path, i + 1, "duplicate day " + std::to_string(day));
      if (day < prev) fail(path, i + 1, "days not ascending at day " + std::to_string(day));
    }
    observations.push_back({static_cast<double>(day), count});
  }
  try {
    return PrevalenceSeries(std::move(observations));
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string write_prevalence_csv(const PrevalenceSeries& series) {
  std::string out = "day,count\n";
  char buf[64];
  for (const Observation& obs : series.observations) {
    if (obs.day == std::floor(obs.day))
      std::snprintf(buf, sizeof buf, "%lld,%lld\n", static_cast<long long>(obs.day),
                    static_cast<long long>(obs.count));
    else
      std::snprintf(buf, sizeof buf, "%.12g,%lld\n", obs.day, static_cast<long long>(obs.count));
    out += buf;
  }
  return out;
}

std::vector<EventRecord> read_events_csv(const std::string& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "unit_id,detection_day,removal_day")
    fail(path, 1, "expected header \"unit_id,detection_day,removal_day\"");
  std::vector<EventRecord> records;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const auto fields = split_csv_line(lines[i]);
    if (fields.size() != 3) fail(path, i + 1, "expected 3 fields, got " + std::to_string(fields.size()));
    EventRecord r;
    r.unit_id = fields[0];
    if (r.unit_id.empty()) fail(path, i + 1, "empty unit_id");
    r.detection_day = parse_int(path, i + 1, fields[1], "detection_day");
    if (r.detection_day < 0) fail(path, i + 1, "negative detection_day");
    if (!fields[2].empty()) {
      r.removal_day = parse_int(path, i + 1, fields[2], "removal_day");
      if (*r.removal_day < r.detection_day)
        fail(path, i + 1, "removal_day before detection_day for unit " + r.unit_id);
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw std::runtime_error(path + ": no event records");
  return records;
}

std::string write_events_csv(const std::vector<EventRecord>& records) {
  std::string out = "unit_id,detection_day,removal_day\n";
  for (const EventRecord& r : records) {
    out += r.unit_id;
    out += ',';
    out += std::to_string(r.detection_day);
    out += ',';
    if (r.removal_day) out += std::to_string(*r.removal_day);
    out += '\n';
  }
  return out;
}

namespace {

nlohmann::json rt_to_json(const RtSeries& rt) {
  nlohmann::json points = nlohmann::json::array();
  for (const RtPoint& p : rt.points) points.push_back({{"day", p.day}, {"r", p.r}});
  nlohmann::json out{{"points", points}};
  if (rt.threshold_crossing) out["threshold_crossing"] = *rt.threshold_crossing;
  else out["threshold_crossing"] = nullptr;
  if (!rt.bands.empty()) {
    nlohmann::json bands = nlohmann::json::array();
    for (const RtBandPoint& b : rt.bands)
      bands.push_back({{"day", b.day},
                       {"lower", b.lower},
                       {"upper", b.upper},
                       {"contributing_paths", b.contributing_paths}});
    out["bands"] = bands;
    out["paths_used"] = rt.paths_used;
  }
  return out;
}

}  // namespace

nlohmann::json result_to_json(const FitResult& fit, const RtSeries& rt) {
  nlohmann::json doc;
  doc["model"] = {{"family", to_string(fit.model.family)},
                  {"constraint", to_string(fit.model.constraint)},
                  {"parameters", fit.model.parameter_names()}};
  doc["estimates"] = fit.estimate;
  if (fit.se_valid) doc["standard_errors"] = fit.standard_errors;
  else doc["standard_errors"] = nullptr;
  doc["loglik"] = fit.loglik;
  doc["aic"] = fit.aic;
  doc["rt"] = rt_to_json(rt);
  doc["warnings"] = fit.warnings;
  doc["converged"] = fit.converged;
  doc["iterations"] = fit.iterations;
  return doc;
}

ParamsFile params_from_json(const nlohmann::json& doc) {
  if (!doc.contains("model") || !doc.contains("estimates"))
    throw std::runtime_error("parameter document needs \"model\" and \"estimates\" keys");
  const auto& model = doc.at("model");
  const auto family = family_from_string(model.at("family").get<std::string>());
  if (!family)
    throw std::runtime_error("unknown family \"" + model.at("family").get<std::string>() + "\"");
  const auto constraint = constraint_from_string(model.at("constraint").get<std::string>());
  if (!constraint)
    throw std::runtime_error("unknown constraint \"" + model.at("constraint").get<std::string>() +
                             "\"");
  ParamsFile out;
  out.model = ModelSpec{*family, *constraint};
  out.estimates = doc.at("estimates").get<ParameterVector>();
  const auto expected = static_cast<size_t>(out.model.free_parameter_count());
  if (out.estimates.size() != expected)
    throw std::runtime_error("estimates length " + std::to_string(out.estimates.size()) +
                             " does not match model (" + std::to_string(expected) + " expected)");
  return out;
}

ParamsFile read_params_json(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  try {
    return params_from_json(doc);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace bdepi
