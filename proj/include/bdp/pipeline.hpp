#ifndef BDP_PIPELINE_HPP
#define BDP_PIPELINE_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bdp/bounds.hpp"
#include "bdp/error.hpp"
#include "bdp/json_io.hpp"
#include "bdp/model.hpp"
#include "bdp/oracle.hpp"
#include "bdp/rates.hpp"
#include "bdp/weights.hpp"

namespace bdp {

struct ModelConfig {
  std::optional<std::string> preset;
  PresetParameters params;
  std::vector<double> birth;  // explicit finite tables
  std::vector<double> death;
};

enum class WeightStrategy { auto_search, paper_preset, explicit_list };

struct WeightConfig {
  WeightStrategy strategy = WeightStrategy::paper_preset;
  Direction direction = Direction::ergodic;  // auto search only
  SearchOptions search;
  PresetWeightOptions preset;
  TransformKind kind = TransformKind::triangular;  // explicit list only
  std::vector<double> ratios;
  std::optional<double> tail;
};

struct BoundsConfig {
  std::vector<std::size_t> states{0, 3, 10};
  std::vector<std::size_t> starts{0};
  std::optional<double> eps;
  std::vector<std::size_t> tail_levels;
};

struct SweepConfig {
  std::string parameter = "rho";  // "rho" or "epsilon"
  std::vector<double> values;
};

struct RunConfig {
  ModelConfig model;
  RateFunction a = RateFunction::constant(1.0);
  RateFunction b = RateFunction::constant(1.0);
  WeightConfig weights;
  std::set<std::string> analyses{"feasibility"};
  double horizon = 10.0;
  std::size_t grid_points = 100;
  OdeOptions ode;
  std::string output = "out";
  BoundsConfig bounds;
  std::vector<double> spectrum_times{0.0};
  std::vector<double> cesaro_periods{50.0, 100.0};
  std::size_t cesaro_start = 0;
  SweepConfig sweep;
};

/// Throws ConfigError naming the offending field (or the parse position).
RunConfig parse_config(const std::string &text);
RunConfig load_config(const std::string &path);

/// Tagged rate record: {form, ..., period, vanishing: {form, ...}} or a bare number.
RateFunction parse_rate(const Json &j, const std::string &field);

BirthDeathSpec build_spec(const RunConfig &config);

enum class Command { run, feasibility, bounds, verify, sweep, spectrum };

Command parse_command(const std::string &name);

/// Resolved weights with the rate the bounds will integrate.
struct WeightPlan {
  WeightSequence weights;
  Direction direction;
  RateCombination rate;
  double rate_mean = 0.0;
  std::vector<std::string> hypotheses;
  Json report;
};

WeightPlan plan_weights(const BirthDeathSpec &spec, const WeightConfig &config);

std::vector<BoundCertificate> plan_certificates(const BirthDeathSpec &spec, const WeightPlan &plan,
                                                const BoundsConfig &config);

struct RunOutcome {
  int exit_code = 0;
  std::vector<std::string> artifacts;
  std::vector<std::string> lines;  // human-readable summary
};

/// Executes the pipeline; library errors propagate.
RunOutcome run(const RunConfig &config, Command command);

/// 0 ok, 1 verification failed, 2 config, 3 infeasible, 4 model, 5 numerical.
int exit_code_for(const Error &e);

} // namespace bdp

#endif
