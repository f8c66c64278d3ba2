#ifndef BDP_BOUNDS_HPP
#define BDP_BOUNDS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bdp/model.hpp"
#include "bdp/rates.hpp"
#include "bdp/weight_sequence.hpp"
#include "bdp/weights.hpp"

namespace bdp {

enum class Shape {
  exponential,  // prefactor * exp(-int_s^t rate) * initial term
  level,        // constant level
  drift,        // level + int_s^t rate
  relaxation,   // level * exp(-int rate) + int source(u) exp(-int_u^t rate) du
};

enum class BoundDirection { upper, lower };

enum class Observable {
  l1d_difference,        // ||p1 - p2||_1D in the weights' transform
  l1_difference,         // sum |p1_i - p2_i|
  weighted_sum,          // sum d_i p_i (diagonal weights)
  state_probability,     // p_index
  cumulative_probability,// Pr(X <= index)
  mean,                  // sum i p_i
};

enum class InitialTerm {
  observable,            // the observable's own value at s
  q_weighted_difference, // sum_i q_i |p1_i(s) - p2_i(s)|
  one,
};

const char *to_string(Shape s);
const char *to_string(BoundDirection d);
const char *to_string(Observable o);
const char *to_string(InitialTerm i);

struct BoundCertificate {
  std::string id;
  std::string statement;
  Shape shape = Shape::exponential;
  BoundDirection direction = BoundDirection::upper;
  Observable observable = Observable::l1d_difference;
  InitialTerm initial = InitialTerm::observable;
  RateCombination rate;
  RateCombination source;       // relaxation only
  double prefactor = 1.0;
  double level = 0.0;
  std::optional<std::size_t> index;
  std::optional<std::size_t> start_state;  // single-trajectory bounds
  bool pair = true;                        // compares two trajectories
  bool requires_ordered = false;
  std::vector<std::string> hypotheses;
  std::vector<std::pair<std::string, double>> parameters;

  /// Bound value at t for a bound anchored at s, with the initial term
  /// already evaluated (ignored unless the shape is exponential).
  double envelope(const RateFunction &a, const RateFunction &b, double s, double t,
                  double initial_value = 1.0) const;

  /// Same certificate with a tighter claim: rate * factor for upper,
  /// drift and relaxation bounds, rate / factor for exponential lower bounds.
  BoundCertificate strengthened(double factor) const;
  /// False when strengthening cannot change the claim (level bounds).
  bool falsifiable() const { return shape != Shape::level; }
};

/// Weak-ergodic decay in l1D (prefactor 1) and l1 (prefactor 4/g against
/// the q-weighted initial difference). `rate` is l(t) or any lower bound of
/// inf_k alpha_k(t).
std::vector<BoundCertificate> weak_ergodic_certificate(const BirthDeathSpec &spec,
                                                       const WeightSequence &w,
                                                       const RateCombination &rate,
                                                       std::vector<std::string> hypotheses = {});

/// Finite chains: l1D and l1 sandwich plus the ordered lower bounds.
/// The ordered bounds need D(z2 - z1) >= 0 at s (tail sums of p2 dominate).
std::vector<BoundCertificate> two_sided_certificate(const BirthDeathSpec &spec,
                                                    const WeightSequence &w,
                                                    std::optional<RateCombination> rate = {},
                                                    std::vector<std::string> hypotheses = {});

/// Null-ergodic bounds for diagonal weights and rate theta(t).
std::vector<BoundCertificate> null_ergodic_certificate(
    const BirthDeathSpec &spec, const WeightSequence &w, const RateCombination &rate,
    const std::vector<std::size_t> &states, const std::vector<std::size_t> &starts,
    std::vector<std::string> hypotheses = {});

struct DecayConstant {
  double value = 1.0;     // K(eps)
  double raw_sup = 1.0;   // grid supremum before the safety factor
  double window = 0.0;
  double start_span = 0.0;
};

/// K(eps) with exp(-int_s^t l) <= K exp(-(l_mean - eps)(t - s)).
DecayConstant decay_constant(const BirthDeathSpec &spec, const RateCombination &rate,
                             double eps);

/// Pr(X(t) <= j | X(0) = 0) >= level, for each j.
std::vector<BoundCertificate> tail_certificate(const BirthDeathSpec &spec,
                                               const WeightSequence &w,
                                               const RateCombination &rate, double eps,
                                               const std::vector<std::size_t> &levels);

/// r(t) lower bound on inf_i (lambda_i(t) - mu_i(t)), linear in a and b.
RateCombination mean_drift_rate(const BirthDeathSpec &spec);

struct MeanBoundRequest {
  std::optional<double> eps;                 // ergodic upper bound (needs rate + w)
  std::optional<RateCombination> rate;
  const WeightSequence *weights = nullptr;
  std::vector<std::size_t> drift_starts;     // lower drift bound from these states
  std::vector<std::size_t> relaxation_starts;// loss-system upper bound
};

std::vector<BoundCertificate> mean_bounds(const BirthDeathSpec &spec,
                                          const MeanBoundRequest &request);

/// Constant rates only: ||p(t) - pi|| <= (4/g) e^{-int l} sum q_i |p_i(s) - pi_i|.
BoundCertificate ergodic_certificate(const BirthDeathSpec &spec, const WeightSequence &w,
                                     const RateCombination &rate);

} // namespace bdp

#endif
