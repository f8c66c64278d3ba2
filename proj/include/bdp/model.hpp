#ifndef BDP_MODEL_HPP
#define BDP_MODEL_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bdp/rates.hpp"
#include "bdp/weight_sequence.hpp"

namespace bdp {

/// Closed-form rule n -> rate together with its limit as n -> infinity.
struct RateSequence {
  std::function<double(std::size_t)> rule;
  double limit = 0.0;
};

/// Parameters for the built-in queue models.
struct PresetParameters {
  int servers = 1;
  double lambda = 1.0;
  double mu = 1.0;
  std::size_t truncation = 200;
};

/// Birth-death process with lambda_n(t) = lambda_n a(t), mu_n(t) = mu_n b(t).
/// States 0..N for a finite chain. An infinite chain is handled numerically on
/// 0..K with lambda_K forced to 0; coefficient sequences still see the rule.
class BirthDeathSpec {
public:
  /// birth = lambda_0..lambda_{N-1}, death = mu_1..mu_N.
  static BirthDeathSpec finite(std::vector<double> birth, std::vector<double> death,
                               RateFunction a, RateFunction b);
  static BirthDeathSpec infinite(RateSequence birth, RateSequence death,
                                 RateFunction a, RateFunction b,
                                 std::size_t truncation = 200);

  bool is_finite() const { return finite_n_.has_value(); }
  /// N for a finite chain, K_trunc otherwise.
  std::size_t top() const;
  std::size_t truncation() const { return truncation_; }

  /// Structural rates: lambda_n (0 for n >= N when finite), mu_n (mu_0 = 0).
  double birth(std::size_t n) const;
  double death(std::size_t n) const;
  /// Rates of the chain the oracle integrates: birth(top()) = 0.
  double truncated_birth(std::size_t n) const;
  double birth_limit() const { return birth_limit_; }
  double death_limit() const { return death_limit_; }

  const RateFunction &a() const { return a_; }
  const RateFunction &b() const { return b_; }

  /// Copy with a different truncation level (infinite chains only).
  BirthDeathSpec with_truncation(std::size_t k) const;
  /// Copy with the basic functions replaced.
  BirthDeathSpec with_rates(RateFunction a, RateFunction b) const;

  const std::string &preset() const { return preset_; }
  int servers() const { return servers_; }
  const PresetParameters &preset_parameters() const { return preset_params_; }

  friend BirthDeathSpec make_preset(const std::string &, const PresetParameters &,
                                    RateFunction, RateFunction);

private:
  BirthDeathSpec(RateFunction a, RateFunction b) : a_(std::move(a)), b_(std::move(b)) {}
  void validate() const;

  std::optional<std::size_t> finite_n_;
  std::vector<double> birth_table_;
  std::vector<double> death_table_;
  RateSequence birth_rule_;
  RateSequence death_rule_;
  std::size_t truncation_ = 0;
  double birth_limit_ = 0.0;
  double death_limit_ = 0.0;
  RateFunction a_;
  RateFunction b_;
  std::string preset_;
  int servers_ = 0;
  PresetParameters preset_params_;
};

/// "mm1", "mms", "discouragement" (infinite) or "mmss" (finite, N = S).
BirthDeathSpec make_preset(const std::string &name, const PresetParameters &params,
                           RateFunction a, RateFunction b);

/// Column convention: dp/dt = A(t) p.
struct IntensityMatrix {
  double t = 0.0;
  Eigen::MatrixXd values;
};

IntensityMatrix build_A(const BirthDeathSpec &spec, double t);

/// dz/dt = B(t) z + f(t) for z = (p_1, ..., p_N).
struct ReducedSystem {
  Eigen::MatrixXd B;
  Eigen::VectorXd f;
};

ReducedSystem build_B(const BirthDeathSpec &spec, double t);

/// D B D^{-1} (triangular kind, size N) or D A D^{-1} (diagonal kind, size
/// N + 1), assembled entry by entry from the rates.
Eigen::MatrixXd build_transformed(const BirthDeathSpec &spec, const WeightSequence &w,
                                  double t);

} // namespace bdp

#endif
