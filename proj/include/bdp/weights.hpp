#ifndef BDP_WEIGHTS_HPP
#define BDP_WEIGHTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "bdp/lognorm.hpp"
#include "bdp/model.hpp"
#include "bdp/rates.hpp"
#include "bdp/weight_sequence.hpp"

namespace bdp {

/// Values indexed from `first_index`, plus the k -> inf limit for infinite chains.
struct IndexedSequence {
  std::size_t first_index = 0;
  std::vector<double> values;
  std::optional<double> limit;

  double inf() const;
};

/// Largest root of the quadratic in c that makes the delta_k interval
/// nonempty (ergodic case). k = 0..N-1, or 0..K plus limit. lambda_{-1} = 0.
IndexedSequence f_sequence(const BirthDeathSpec &spec, double spread);

/// Null-case analogue, k >= 1: (D mu lambda_{k-1} - lambda mu_k) / (D lambda mu).
IndexedSequence h_sequence(const BirthDeathSpec &spec, double spread);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x, double rel_tol = 1e-12) const;
};

struct ErgodicFeasibility {
  double spread = 0.0;  // Delta
  double c = 0.0;
  double f = 0.0;       // inf_k f_k
  std::vector<Interval> intervals;  // delta_1, delta_2, ...
  std::optional<Interval> tail_interval;
  RateCombination drift;  // l(t) = c (mu b(t) - Delta lambda a(t))
  double drift_mean = 0.0;
  std::vector<std::string> conditions;
};

struct NullFeasibility {
  double spread = 0.0;
  double c = 0.0;
  double h = 0.0;
  std::vector<Interval> intervals;
  std::optional<Interval> tail_interval;
  RateCombination drift;  // theta(t) = c (lambda a(t) - Delta mu b(t))
  double drift_mean = 0.0;
  std::vector<std::string> conditions;
};

enum class IntervalChoice { geometric, lower, upper };

struct SearchOptions {
  std::optional<double> spread;
  std::optional<double> c;
  IntervalChoice choice = IntervalChoice::geometric;
};

/// Checks every hypothesis for a given (Delta, c); throws Infeasible naming
/// the first that fails.
ErgodicFeasibility ergodic_feasibility(const BirthDeathSpec &spec, double spread, double c);
NullFeasibility null_feasibility(const BirthDeathSpec &spec, double spread, double c);

/// Largest admissible c for a given Delta (0 if none).
double max_ergodic_c(const BirthDeathSpec &spec, double spread);
double max_null_c(const BirthDeathSpec &spec, double spread);

struct ErgodicWeights {
  ErgodicFeasibility feasibility;
  WeightSequence weights;
};

struct NullWeights {
  NullFeasibility feasibility;
  WeightSequence weights;
};

/// Missing Delta / c are chosen to maximise the mean drift.
ErgodicWeights find_ergodic_weights(const BirthDeathSpec &spec,
                                    const SearchOptions &options = {});
NullWeights find_null_weights(const BirthDeathSpec &spec,
                              const SearchOptions &options = {});

/// Throws Infeasible("interval") unless every ratio of `w` lies in its interval.
void check_membership(const std::vector<Interval> &intervals,
                      const std::optional<Interval> &tail, const WeightSequence &w);

enum class Direction { ergodic, null };

/// Weights, certified rate and provenance for one of the built-in queues.
struct PresetWeights {
  WeightSequence weights;
  Direction direction = Direction::ergodic;
  std::string regime;
  /// Lower bound on inf_k alpha_k(t) (ergodic) or inf_k alpha0_k(t) (null).
  RateCombination rate;
  std::optional<double> spread;
  std::optional<double> c;
  std::vector<std::string> notes;
};

struct PresetWeightOptions {
  int loss_case = 1;      // mmss: 1 -> delta = 1, 2 -> delta = (S-1)/S
  double epsilon = 0.5;   // discouragement
};

/// Traffic intensity lambda a_m / (mu b_m) with the limiting rates.
double traffic_intensity(const BirthDeathSpec &spec);

PresetWeights preset_weights(const BirthDeathSpec &spec,
                             const PresetWeightOptions &options = {});

/// Is `rate` <= every coefficient pair of `lin` (including the limit)?
bool dominated_coefficientwise(const LinearCoefficients &lin, const RateCombination &rate,
                               double tol = 1e-12);

} // namespace bdp

#endif
