#include "bdepi/survival.hpp"

#include <limits>
#include <stdexcept>

namespace bdepi {

namespace {

// log(1 + e^x) without overflow.
double log1pexp(double x) {
  if (x > 36.0) return x + std::exp(-x);
  if (x < -36.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::BurrXII: return "burr";
    case Family::LogLogistic: return "loglogistic";
    case Family::Lomax: return "lomax";
    case Family::ParaLogistic: return "paralogistic";
  }
  return "?";
}

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::Full: return "full";
    case Constraint::AcceleratedEventTime: return "aft";
    case Constraint::ProportionalRate: return "pr";
    case Constraint::Both: return "both";
  }
  return "?";
}

std::optional<Family> family_from_string(const std::string& s) {
  if (s == "burr") return Family::BurrXII;
  if (s == "loglogistic") return Family::LogLogistic;
  if (s == "lomax") return Family::Lomax;
  if (s == "paralogistic") return Family::ParaLogistic;
  return std::nullopt;
}

std::optional<Constraint> constraint_from_string(const std::string& s) {
  if (s == "full") return Constraint::Full;
  if (s == "aft") return Constraint::AcceleratedEventTime;
  if (s == "pr") return Constraint::ProportionalRate;
  if (s == "both") return Constraint::Both;
  return std::nullopt;
}

SurvivalSpec SurvivalSpec::burr(double log_a, double log_b, double log_q) {
  return SurvivalSpec{Family::BurrXII, log_a, log_b, log_q};
}

SurvivalSpec SurvivalSpec::loglogistic(double log_a, double log_b) {
  return SurvivalSpec{Family::LogLogistic, log_a, log_b, 0.0};
}

SurvivalSpec SurvivalSpec::lomax(double log_b, double log_q) {
  return SurvivalSpec{Family::Lomax, 0.0, log_b, log_q};
}

SurvivalSpec SurvivalSpec::paralogistic(double log_a, double log_b) {
  return SurvivalSpec{Family::ParaLogistic, log_a, log_b, log_a};
}

double log_survival(const SurvivalSpec& spec, double t) {
  if (t < 0.0) throw std::invalid_argument("log_survival: t must be >= 0");
  if (t == 0.0) return 0.0;
  // log S = -q log(1 + (t/b)^a), with (t/b)^a kept in log space.
  const double u = std::exp(spec.log_a) * (std::log(t) - spec.log_b);
  return -std::exp(spec.log_q) * log1pexp(u);
}

double survival(const SurvivalSpec& spec, double t) {
  return std::exp(log_survival(spec, t));
}

double density(const SurvivalSpec& spec, double t) {
  if (t < 0.0) throw std::invalid_argument("density: t must be >= 0");
  const double a = spec.a();
  if (t == 0.0) {
    if (a > 1.0) return 0.0;
    if (a == 1.0) return std::exp(spec.log_q - spec.log_b);
    return kInf;
  }
  const double u = a * (std::log(t) - spec.log_b);
  const double log_f = spec.log_a + spec.log_q - spec.log_b +
                       (a - 1.0) * (std::log(t) - spec.log_b) -
                       (std::exp(spec.log_q) + 1.0) * log1pexp(u);
  return std::exp(log_f);
}

double discrete_hazard(const SurvivalSpec& spec, double t_prev, double t_next) {
  if (!(t_prev >= 0.0 && t_prev < t_next))
    throw std::invalid_argument("discrete_hazard: need 0 <= t_prev < t_next");
  // log[S(t_next)/S(t_prev)] = -q [log1pexp(u_next) - log1pexp(u_prev)],
  // with the difference taken before scaling by q so extreme tails do not
  // overflow to inf - inf.
  const double a = std::exp(spec.log_a);
  const double u_prev = t_prev == 0.0 ? -kInf : a * (std::log(t_prev) - spec.log_b);
  const double u_next = a * (std::log(t_next) - spec.log_b);
  const double log_ratio = -std::exp(spec.log_q) * (log1pexp(u_next) - log1pexp(u_prev));
  if (std::isnan(log_ratio)) return 1.0;  // degenerate corner: survival past t_prev impossible
  return -std::expm1(log_ratio);
}

std::optional<double> mean_event_time(const SurvivalSpec& spec) {
  const double a = spec.a();
  const double q = spec.q();
  if (a * q <= 1.0) return std::nullopt;
  return std::exp(spec.log_b + std::lgamma(1.0 + 1.0 / a) +
                  std::lgamma(q - 1.0 / a) - std::lgamma(q));
}

SurvivalPair SurvivalPair::full(const SurvivalSpec& repro, const SurvivalSpec& removal) {
  return SurvivalPair{repro, removal, Constraint::Full, 0.0, 0.0};
}

SurvivalPair SurvivalPair::accelerated(const SurvivalSpec& repro, double log_d) {
  SurvivalSpec removal = repro;
  removal.log_b += log_d;
  return SurvivalPair{repro, removal, Constraint::AcceleratedEventTime, log_d, 0.0};
}

SurvivalPair SurvivalPair::proportional(const SurvivalSpec& repro, double log_c) {
  SurvivalSpec removal = repro;
  removal.log_q += log_c;
  // q2 = c q1 breaks the a = q tie; the removal is then a plain Burr.
  if (repro.family == Family::ParaLogistic) removal.family = Family::BurrXII;
  if (repro.family == Family::LogLogistic)
    throw std::invalid_argument("proportional rate form does not exist for the log-logistic");
  return SurvivalPair{repro, removal, Constraint::ProportionalRate, 0.0, log_c};
}

SurvivalPair SurvivalPair::both(const SurvivalSpec& repro, double log_d, double log_c) {
  if (repro.family == Family::LogLogistic)
    throw std::invalid_argument("combined AFT/PR form does not exist for the log-logistic");
  SurvivalSpec removal = repro;
  removal.log_b += log_d;
  removal.log_q += log_c;
  if (repro.family == Family::ParaLogistic) removal.family = Family::BurrXII;
  return SurvivalPair{repro, removal, Constraint::Both, log_d, log_c};
}

std::pair<SurvivalSpec, SurvivalSpec> realize_pair(const SurvivalPair& pair) {
  return {pair.reproduction, pair.removal};
}

bool ModelSpec::applicable() const {
  return !(family == Family::LogLogistic &&
           (constraint == Constraint::ProportionalRate || constraint == Constraint::Both));
}

bool ModelSpec::collapses_to_full() const {
  return constraint == Constraint::Both &&
         (family == Family::Lomax || family == Family::ParaLogistic);
}

namespace {

// Free parameters of one spec, in layout order.
std::vector<std::pair<std::string, ParamKind>> family_params(Family f, const std::string& suffix) {
  switch (f) {
    case Family::BurrXII:
      return {{"ln_a" + suffix, ParamKind::Shape},
              {"ln_b" + suffix, ParamKind::Scale},
              {"ln_q" + suffix, ParamKind::Tail}};
    case Family::LogLogistic:
    case Family::ParaLogistic:
      return {{"ln_a" + suffix, ParamKind::Shape}, {"ln_b" + suffix, ParamKind::Scale}};
    case Family::Lomax:
      return {{"ln_b" + suffix, ParamKind::Scale}, {"ln_q" + suffix, ParamKind::Tail}};
  }
  throw std::logic_error("unknown family");
}

std::vector<std::pair<std::string, ParamKind>> layout(const ModelSpec& m) {
  std::vector<std::pair<std::string, ParamKind>> out;
  switch (m.constraint) {
    case Constraint::Full: {
      out = family_params(m.family, "1");
      auto removal = family_params(m.family, "2");
      out.insert(out.end(), removal.begin(), removal.end());
      break;
    }
    case Constraint::AcceleratedEventTime:
      if (m.family == Family::BurrXII)
        out = {{"ln_a", ParamKind::Shape}, {"ln_b1", ParamKind::Scale}, {"ln_q", ParamKind::Tail}};
      else if (m.family == Family::Lomax)
        out = {{"ln_b1", ParamKind::Scale}, {"ln_q", ParamKind::Tail}};
      else
        out = {{"ln_a", ParamKind::Shape}, {"ln_b1", ParamKind::Scale}};
      out.emplace_back("ln_d", ParamKind::Accel);
      break;
    case Constraint::ProportionalRate:
      if (m.family == Family::BurrXII)
        out = {{"ln_a", ParamKind::Shape}, {"ln_b", ParamKind::Scale}, {"ln_q1", ParamKind::Tail}};
      else if (m.family == Family::Lomax)
        out = {{"ln_b", ParamKind::Scale}, {"ln_q1", ParamKind::Tail}};
      else if (m.family == Family::ParaLogistic)
        out = {{"ln_a", ParamKind::Shape}, {"ln_b", ParamKind::Scale}};
      else
        throw std::invalid_argument("constraint inapplicable: log-logistic has no proportional rate form");
      out.emplace_back("ln_c", ParamKind::Prop);
      break;
    case Constraint::Both:
      if (m.family == Family::BurrXII)
        out = {{"ln_a", ParamKind::Shape}, {"ln_b1", ParamKind::Scale}, {"ln_q1", ParamKind::Tail}};
      else if (m.family == Family::Lomax)
        out = {{"ln_b1", ParamKind::Scale}, {"ln_q1", ParamKind::Tail}};
      else if (m.family == Family::ParaLogistic)
        out = {{"ln_a", ParamKind::Shape}, {"ln_b1", ParamKind::Scale}};
      else
        throw std::invalid_argument("constraint inapplicable: log-logistic has no proportional rate form");
      out.emplace_back("ln_d", ParamKind::Accel);
      out.emplace_back("ln_c", ParamKind::Prop);
      break;
  }
  return out;
}

SurvivalSpec make_spec(Family f, std::span<const double> p) {
  switch (f) {
    case Family::BurrXII: return SurvivalSpec::burr(p[0], p[1], p[2]);
    case Family::LogLogistic: return SurvivalSpec::loglogistic(p[0], p[1]);
    case Family::ParaLogistic: return SurvivalSpec::paralogistic(p[0], p[1]);
    case Family::Lomax: return SurvivalSpec::lomax(p[0], p[1]);
  }
  throw std::logic_error("unknown family");
}

}  // namespace

int ModelSpec::free_parameter_count() const {
  return static_cast<int>(layout(*this).size());
}

std::vector<std::string> ModelSpec::parameter_names() const {
  std::vector<std::string> names;
  for (const auto& [name, kind] : layout(*this)) names.push_back(name);
  return names;
}

std::vector<ParamKind> ModelSpec::parameter_kinds() const {
  std::vector<ParamKind> kinds;
  for (const auto& [name, kind] : layout(*this)) kinds.push_back(kind);
  return kinds;
}

SurvivalPair ModelSpec::make_pair(std::span<const double> delta) const {
  if (!applicable())
    throw std::invalid_argument("constraint inapplicable: log-logistic has no proportional rate form");
  const size_t n = static_cast<size_t>(free_parameter_count());
  if (delta.size() != n)
    throw std::invalid_argument("parameter vector length " + std::to_string(delta.size()) +
                                " does not match model (" + std::to_string(n) + " free parameters)");
  const size_t k = delta.size();
  switch (constraint) {
    case Constraint::Full:
      return SurvivalPair::full(make_spec(family, delta.subspan(0, k / 2)),
                                make_spec(family, delta.subspan(k / 2)));
    case Constraint::AcceleratedEventTime:
      return SurvivalPair::accelerated(make_spec(family, delta.subspan(0, k - 1)), delta[k - 1]);
    case Constraint::ProportionalRate:
      return SurvivalPair::proportional(make_spec(family, delta.subspan(0, k - 1)), delta[k - 1]);
    case Constraint::Both:
      return SurvivalPair::both(make_spec(family, delta.subspan(0, k - 2)), delta[k - 2],
                                delta[k - 1]);
  }
  throw std::logic_error("unknown constraint");
}

}  // namespace bdepi
