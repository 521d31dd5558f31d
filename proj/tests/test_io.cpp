#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "bdepi/io.hpp"

using namespace bdepi;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& contents) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("bdepi_io_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv");
    write_file(path.string(), contents);
  }
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("single record is prevalent through its removal day") {
  const std::vector<EventRecord> records{{"farm-1", 0, 2}};
  const auto series = events_to_prevalence(records, 3);
  REQUIRE(series.size() == 4);
  const std::vector<std::int64_t> expected{1, 1, 1, 0};
  for (size_t t = 0; t < 4; ++t) {
    CHECK(series[t].day == static_cast<double>(t));
    CHECK(series[t].count == expected[t]);
  }
}

TEST_CASE("overlapping records add pointwise") {
  const std::vector<EventRecord> a{{"u1", 0, 2}};
  const std::vector<EventRecord> b{{"u2", 1, 4}};
  std::vector<EventRecord> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const auto sa = events_to_prevalence(a, 5);
  const auto sb = events_to_prevalence(b, 5);
  const auto sum = events_to_prevalence(both, 5);
  for (size_t t = 0; t < sum.size(); ++t) CHECK(sum[t].count == sa[t].count + sb[t].count);
}

TEST_CASE("record order does not matter") {
  std::vector<EventRecord> records{
      {"a", 0, 3}, {"b", 2, 5}, {"c", 1, std::nullopt}, {"d", 4, 9}, {"e", 3, 3}};
  const auto base = events_to_prevalence(records);
  std::mt19937 shuffler(99);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(records.begin(), records.end(), shuffler);
    CHECK(events_to_prevalence(records) == base);
  }
}

TEST_CASE("open records stay prevalent through the horizon") {
  const std::vector<EventRecord> records{{"open", 1, std::nullopt}};
  const auto series = events_to_prevalence(records, 4);
  const std::vector<std::int64_t> expected{0, 1, 1, 1, 1};
  for (size_t t = 0; t < 5; ++t) CHECK(series[t].count == expected[t]);
}

TEST_CASE("total person-days equals the sum of the stay lengths") {
  const std::vector<EventRecord> records{
      {"a", 0, 2}, {"b", 3, 3}, {"c", 1, 10}, {"d", 5, std::nullopt}};
  const std::int64_t horizon = 8;
  const auto series = events_to_prevalence(records, horizon);
  std::int64_t person_days = 0;
  for (const auto& obs : series.observations) person_days += obs.count;
  std::int64_t expected = 0;
  for (const auto& r : records)
    expected += std::min(horizon, r.removal_day.value_or(horizon)) - r.detection_day + 1;
  CHECK(person_days == expected);
}

TEST_CASE("removal before detection is a hard error") {
  const std::vector<EventRecord> bad{{"x", 5, 3}};
  CHECK_THROWS_AS(events_to_prevalence(bad), std::invalid_argument);
}

TEST_CASE("prevalence csv round trip is byte identical") {
  const std::string canonical = "day,count\n0,1\n1,3\n2,5\n4,2\n5,0\n";
  TempFile file(canonical);
  const auto series = read_prevalence_csv(file.path.string());
  REQUIRE(series.size() == 5);
  CHECK(series[0].count == 1);
  CHECK(series[3].day == 4.0);
  CHECK(write_prevalence_csv(series) == canonical);
}

TEST_CASE("prevalence csv diagnostics carry line numbers") {
  TempFile dup("day,count\n0,1\n1,2\n1,4\n");
  CHECK_THROWS_WITH_AS(read_prevalence_csv(dup.path.string()),
                       doctest::Contains("duplicate day 1"), std::runtime_error);
  TempFile unordered("day,count\n3,1\n1,2\n");
  CHECK_THROWS_WITH_AS(read_prevalence_csv(unordered.path.string()),
                       doctest::Contains(":3:"), std::runtime_error);
  TempFile not_int("day,count\n0,1\n1,2.5\n");
  CHECK_THROWS_WITH_AS(read_prevalence_csv(not_int.path.string()),
                       doctest::Contains("integer"), std::runtime_error);
  TempFile bad_header("t,y\n0,1\n");
  CHECK_THROWS_WITH_AS(read_prevalence_csv(bad_header.path.string()),
                       doctest::Contains("day,count"), std::runtime_error);
  CHECK_THROWS_AS(read_prevalence_csv("/nonexistent/bdepi.csv"), std::runtime_error);
}

TEST_CASE("events csv round trip and open removal fields") {
  const std::string canonical = "unit_id,detection_day,removal_day\nf1,0,2\nf2,3,\nf3,4,9\n";
  TempFile file(canonical);
  const auto records = read_events_csv(file.path.string());
  REQUIRE(records.size() == 3);
  CHECK(!records[1].removal_day.has_value());
  CHECK(records[2].removal_day == 9);
  CHECK(write_events_csv(records) == canonical);
}

TEST_CASE("events csv diagnostics") {
  TempFile reversed("unit_id,detection_day,removal_day\nf1,5,2\n");
  CHECK_THROWS_WITH_AS(read_events_csv(reversed.path.string()),
                       doctest::Contains("removal_day before detection_day"), std::runtime_error);
  TempFile missing_field("unit_id,detection_day,removal_day\nf1,5\n");
  CHECK_THROWS_WITH_AS(read_events_csv(missing_field.path.string()), doctest::Contains(":2:"),
                       std::runtime_error);
}

TEST_CASE("result json has the documented keys and full precision") {
  FitResult fit;
  fit.model = ModelSpec{Family::Lomax, Constraint::Full};
  fit.estimate = {3.2350000000001, 2.712, 4.987, 3.98};
  fit.standard_errors = {0.5998, 0.3611, 1.0396, 0.848};
  fit.se_valid = true;
  fit.loglik = -166.93128261234567;
  fit.aic = 341.86256522469134;
  fit.converged = true;
  fit.iterations = 321;

  RtSeries rt;
  rt.points = {{0.0, 1.25}, {1.0, 0.75}};
  rt.threshold_crossing = 1.0;

  const auto doc = result_to_json(fit, rt);
  for (const char* key :
       {"model", "estimates", "standard_errors", "loglik", "aic", "rt", "warnings"})
    CHECK(doc.contains(key));
  CHECK(doc["model"]["family"] == "lomax");
  CHECK(doc["model"]["parameters"][0] == "ln_b1");
  CHECK(doc["rt"]["threshold_crossing"] == 1.0);

  // Serialized numbers must survive a parse round trip bit for bit.
  const auto reparsed = nlohmann::json::parse(doc.dump(2));
  CHECK(reparsed["loglik"].get<double>() == fit.loglik);
  CHECK(reparsed["estimates"][0].get<double>() == fit.estimate[0]);

  const auto params = params_from_json(reparsed);
  CHECK(params.model == fit.model);
  CHECK(params.estimates == fit.estimate);
}

TEST_CASE("standard errors withheld appear as null") {
  FitResult fit;
  fit.model = ModelSpec{Family::Lomax, Constraint::Full};
  fit.estimate = {1.0, 1.0, 1.0, 1.0};
  fit.se_valid = false;
  const auto doc = result_to_json(fit, RtSeries{});
  CHECK(doc["standard_errors"].is_null());
  CHECK(doc["rt"]["threshold_crossing"].is_null());
}

TEST_CASE("params json validation") {
  nlohmann::json bad_family{{"model", {{"family", "weibull"}, {"constraint", "full"}}},
                            {"estimates", {1.0, 2.0}}};
  CHECK_THROWS_WITH_AS(params_from_json(bad_family), doctest::Contains("unknown family"),
                       std::runtime_error);
  nlohmann::json wrong_len{{"model", {{"family", "lomax"}, {"constraint", "full"}}},
                           {"estimates", {1.0, 2.0}}};
  CHECK_THROWS_WITH_AS(params_from_json(wrong_len), doctest::Contains("length"),
                       std::runtime_error);
}
