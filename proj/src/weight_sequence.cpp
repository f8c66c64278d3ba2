#include "bdp/weight_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bdp/error.hpp"

namespace bdp {

const char *to_string(TransformKind kind) {
  return kind == TransformKind::triangular ? "triangular" : "diagonal";
}

WeightSequence::WeightSequence(TransformKind kind, std::vector<double> ratios,
                               std::optional<double> tail)
    : kind_(kind), ratios_(std::move(ratios)), tail_(tail) {
  for (std::size_t i = 0; i < ratios_.size(); ++i)
    if (!(ratios_[i] > 0.0) || !std::isfinite(ratios_[i]))
      throw Error(ErrorCode::invalid_parameter,
                  "weight ratio delta_" + std::to_string(i + 1) + " must be positive");
  if (tail_ && (!(*tail_ > 0.0) || !std::isfinite(*tail_)))
    throw Error(ErrorCode::invalid_parameter, "tail ratio must be positive");

  d_.reserve(ratios_.size() + 1);
  d_.push_back(1.0);
  for (double r : ratios_)
    d_.push_back(d_.back() * r);
  q_.reserve(d_.size() + 1);
  q_.push_back(0.0);
  for (double x : d_)
    q_.push_back(q_.back() + x);
}

WeightSequence WeightSequence::finite(TransformKind kind, std::vector<double> ratios) {
  return WeightSequence(kind, std::move(ratios), std::nullopt);
}

WeightSequence WeightSequence::unbounded(TransformKind kind,
                                         std::vector<double> ratios, double tail) {
  return WeightSequence(kind, std::move(ratios), tail);
}

double WeightSequence::delta(std::size_t k) const {
  if (k == 0)
    return kind_ == TransformKind::triangular ? 0.0 : 1.0;
  if (k <= ratios_.size())
    return ratios_[k - 1];
  return tail_ ? *tail_ : 0.0;
}

double WeightSequence::d(std::size_t k) const {
  if (k < d_.size())
    return d_[k];
  if (!tail_)
    throw Error(ErrorCode::out_of_range,
                "weight index " + std::to_string(k) + " past finite sequence");
  return d_.back() * std::pow(*tail_, static_cast<double>(k - ratios_.size()));
}

double WeightSequence::q(std::size_t i) const {
  if (i < q_.size())
    return q_[i];
  if (!tail_)
    throw Error(ErrorCode::out_of_range,
                "q index " + std::to_string(i) + " past finite sequence");
  // q_i = q_{m+1} + d_m * sum_{j=1}^{n} tail^j, m = stored, n = i - m - 1
  const double r = *tail_;
  const double n = static_cast<double>(i - ratios_.size() - 1);
  const double geo = r == 1.0 ? n : r * (std::pow(r, n) - 1.0) / (r - 1.0);
  return q_.back() + d_.back() * geo;
}

double WeightSequence::min_weight() const {
  if (tail_ && *tail_ < 1.0)
    return 0.0;
  return *std::min_element(d_.begin(), d_.end());
}

double WeightSequence::max_weight() const {
  if (tail_ && *tail_ > 1.0)
    return std::numeric_limits<double>::infinity();
  return *std::max_element(d_.begin(), d_.end());
}

double WeightSequence::w_constant() const {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < q_.size(); ++i)
    best = std::min(best, q_[i] / static_cast<double>(i));
  if (!tail_)
    return best;
  if (*tail_ < 1.0)
    return 0.0;
  if (*tail_ == 1.0)
    return std::min(best, d_.back());
  // Past the prefix, q_{i+1}/(i+1) >= q_i/i iff i d_i >= q_i, and once that
  // holds in the geometric tail it holds for every later index.
  const std::size_t first_tail = ratios_.size() + 1;
  double di = d_.back();
  double qi = q_.back();
  for (std::size_t i = first_tail; i < 100000000; ++i) {
    di *= *tail_;
    best = std::min(best, qi / static_cast<double>(i));
    if (static_cast<double>(i) * di >= qi || !std::isfinite(di))
      break;
    qi += di;
  }
  return best;
}

Eigen::MatrixXd WeightSequence::matrix(std::size_t dim) const {
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double dk = d(static_cast<std::size_t>(k));
    if (kind_ == TransformKind::diagonal)
      m(k, k) = dk;
    else
      m.row(k).tail(n - k).setConstant(dk);
  }
  return m;
}

} // namespace bdp
