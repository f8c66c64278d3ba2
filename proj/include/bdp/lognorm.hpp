#ifndef BDP_LOGNORM_HPP
#define BDP_LOGNORM_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "bdp/model.hpp"
#include "bdp/rates.hpp"
#include "bdp/weight_sequence.hpp"

namespace bdp {

/// alpha, zeta: column sums of the triangular transform (with and without
/// sign flips on the off-diagonal terms). alpha0: diagonal transform.
enum class SequenceKind { alpha, zeta, alpha0 };

const char *to_string(SequenceKind kind);

/// l1 logarithmic norm: max over columns of m_jj + sum_{i != j} |m_ij|.
double lognorm_l1(const Eigen::MatrixXd &m);

/// Each coefficient is A_k a(t) + B_k b(t). The index set is k = 0..N-1
/// (triangular, finite), 0..N (diagonal, finite) or 0..K plus the k -> inf
/// limit for an infinite chain.
struct LinearCoefficients {
  SequenceKind kind = SequenceKind::alpha;
  std::vector<double> a_coef;
  std::vector<double> b_coef;
  std::optional<double> limit_a;
  std::optional<double> limit_b;

  std::size_t size() const { return a_coef.size(); }
  /// Coefficientwise minimum / maximum: valid bounds on inf_k / sup_k since
  /// a(t), b(t) >= 0.
  RateCombination lower() const;
  RateCombination upper() const;
};

LinearCoefficients linear_coefficients(const BirthDeathSpec &spec,
                                       const WeightSequence &w, SequenceKind kind);

struct CoefficientProfile {
  double t = 0.0;
  SequenceKind kind = SequenceKind::alpha;
  std::vector<double> values;
  std::optional<double> limit;
  double inf = 0.0;
  double sup = 0.0;
};

CoefficientProfile coefficient_profile(const BirthDeathSpec &spec,
                                       const WeightSequence &w, double t,
                                       SequenceKind kind);

/// -inf_k alpha_k(t) (triangular) or -inf_k alpha0_k(t) (diagonal).
double lognorm_of_transformed(const BirthDeathSpec &spec, const WeightSequence &w,
                              double t);

} // namespace bdp

#endif
