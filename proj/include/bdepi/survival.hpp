#ifndef BDEPI_SURVIVAL_HPP_
#define BDEPI_SURVIVAL_HPP_

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bdepi {

/// Burr XII survival family used for both the reproduction and the
/// removal time distributions. Special cases fix one shape parameter.
enum class Family { BurrXII, LogLogistic, Lomax, ParaLogistic };

/// How the removal distribution is tied to the reproduction distribution.
enum class Constraint { Full, AcceleratedEventTime, ProportionalRate, Both };

const char* to_string(Family f);
const char* to_string(Constraint c);
std::optional<Family> family_from_string(const std::string& s);
std::optional<Constraint> constraint_from_string(const std::string& s);

/// One parameterized survival function S(t) = [1 + (t/b)^a]^{-q}.
/// All parameters live on the natural-log scale so that any real-valued
/// vector maps to a valid distribution. Family constraints (q = 1 for
/// log-logistic, a = 1 for Lomax, a = q for para-logistic) are applied at
/// construction; the fixed values are stored but are not free parameters.
struct SurvivalSpec {
  Family family = Family::BurrXII;
  double log_a = 0.0;  // shape, left and right tail
  double log_b = 0.0;  // scale, days
  double log_q = 0.0;  // right-tail shape

  static SurvivalSpec burr(double log_a, double log_b, double log_q);
  static SurvivalSpec loglogistic(double log_a, double log_b);
  static SurvivalSpec lomax(double log_b, double log_q);
  static SurvivalSpec paralogistic(double log_a, double log_b);

  double a() const { return std::exp(log_a); }
  double b() const { return std::exp(log_b); }
  double q() const { return std::exp(log_q); }

  bool operator==(const SurvivalSpec&) const = default;
};

/// log S(t); exact 0 at t = 0, stable for large t/b and large shapes.
double log_survival(const SurvivalSpec& spec, double t);

/// S(t) in (0, 1].
double survival(const SurvivalSpec& spec, double t);

/// Event-time density -dS/dt = (aq/b)(t/b)^{a-1}[1+(t/b)^a]^{-q-1}.
/// At t = 0 this is 0 for a > 1, q/b for a = 1 and +inf for a < 1.
double density(const SurvivalSpec& spec, double t);

/// P(event in (t_prev, t_next] | survived past t_prev)
///   = 1 - S(t_next)/S(t_prev), in [0, 1).
double discrete_hazard(const SurvivalSpec& spec, double t_prev, double t_next);

/// Mean event time b G(1+1/a) G(q-1/a) / G(q); requires aq > 1, otherwise
/// the moment does not exist and nullopt is returned.
std::optional<double> mean_event_time(const SurvivalSpec& spec);

/// Reproduction and removal distributions plus the constraint that ties
/// them together. The removal spec is always materialized consistently
/// with the constraint (Burr is closed under both the accelerated
/// event-time rescaling b2 = d b1 and the proportional-rate power
/// q2 = c q1, so S_mu(t) = [S_lambda(t/d)]^c is again a Burr spec).
struct SurvivalPair {
  SurvivalSpec reproduction;
  SurvivalSpec removal;
  Constraint constraint = Constraint::Full;
  double log_d = 0.0;  // acceleration factor, AFT / Both only
  double log_c = 0.0;  // rate proportionality, PR / Both only

  static SurvivalPair full(const SurvivalSpec& repro, const SurvivalSpec& removal);
  static SurvivalPair accelerated(const SurvivalSpec& repro, double log_d);
  static SurvivalPair proportional(const SurvivalSpec& repro, double log_c);
  static SurvivalPair both(const SurvivalSpec& repro, double log_d, double log_c);
};

/// Expands the constrained parameterization into the two concrete specs.
std::pair<SurvivalSpec, SurvivalSpec> realize_pair(const SurvivalPair& pair);

/// Role of one coordinate of the free-parameter vector.
enum class ParamKind { Shape, Scale, Tail, Accel, Prop };

/// A (family, constraint) cell. Defines the layout of the free-parameter
/// vector delta and turns a delta into a SurvivalPair.
struct ModelSpec {
  Family family = Family::Lomax;
  Constraint constraint = Constraint::Full;

  /// Log-logistic has q fixed at 1, so a proportional-rate removal
  /// (q2 = c q1) leaves the family; those cells do not exist.
  bool applicable() const;

  /// Lomax and para-logistic have one shape free, so the Both
  /// parameterization spans the same space as the full model.
  bool collapses_to_full() const;

  int free_parameter_count() const;
  std::vector<std::string> parameter_names() const;
  std::vector<ParamKind> parameter_kinds() const;

  /// Unpacks delta (length must equal free_parameter_count()).
  SurvivalPair make_pair(std::span<const double> delta) const;

  bool operator==(const ModelSpec&) const = default;
};

}  // namespace bdepi

#endif  // BDEPI_SURVIVAL_HPP_
