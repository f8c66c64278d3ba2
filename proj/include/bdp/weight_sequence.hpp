#ifndef BDP_WEIGHT_SEQUENCE_HPP
#define BDP_WEIGHT_SEQUENCE_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <vector>

namespace bdp {

/// Triangular weights act on the reduced vector z = (p_1, ..., p_N) through
/// the upper-triangular matrix with row k equal to d_k in columns j >= k.
/// Diagonal weights act on the full vector p = (p_0, ..., p_N).
enum class TransformKind { triangular, diagonal };

const char *to_string(TransformKind kind);

/// Ratios delta_k (k >= 1), cumulative products d_k (d_0 = 1) and the
/// derived constants g, G, W. Either a finite list or a stored prefix
/// followed by a constant tail ratio.
class WeightSequence {
public:
  /// `ratios` holds delta_1, delta_2, ... ; all must be positive.
  static WeightSequence finite(TransformKind kind, std::vector<double> ratios);
  static WeightSequence unbounded(TransformKind kind, std::vector<double> ratios,
                                  double tail);

  TransformKind kind() const { return kind_; }
  bool is_finite() const { return !tail_.has_value(); }
  std::optional<double> tail() const { return tail_; }
  const std::vector<double> &ratios() const { return ratios_; }
  std::size_t stored() const { return ratios_.size(); }

  /// Number of weights d_0..d_{n-1} for a finite sequence (stored + 1).
  std::size_t length() const { return ratios_.size() + 1; }

  /// delta_0 = 0 for the triangular kind; 0 past the end of a finite list.
  double delta(std::size_t k) const;
  double d(std::size_t k) const;
  /// q_i = sum_{m < i} d_m, q_0 = 0.
  double q(std::size_t i) const;

  /// g = inf_{k >= 0} d_k (0 if d_k -> 0).
  double min_weight() const;
  /// G = sup_k d_k (+inf if d_k grows without bound).
  double max_weight() const;
  /// W = inf_{i >= 1} q_i / i.
  double w_constant() const;

  /// Dense dim x dim weight matrix for cross-checks.
  Eigen::MatrixXd matrix(std::size_t dim) const;

private:
  WeightSequence(TransformKind kind, std::vector<double> ratios,
                 std::optional<double> tail);

  TransformKind kind_;
  std::vector<double> ratios_;
  std::optional<double> tail_;
  std::vector<double> d_;  // d_0..d_stored
  std::vector<double> q_;  // q_0..q_{stored+1}
};

} // namespace bdp

#endif
