#include "bdp/lognorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bdp/error.hpp"

namespace bdp {

const char *to_string(SequenceKind kind) {
  switch (kind) {
  case SequenceKind::alpha:
    return "alpha";
  case SequenceKind::zeta:
    return "zeta";
  case SequenceKind::alpha0:
    return "alpha0";
  }
  return "?";
}

double lognorm_l1(const Eigen::MatrixXd &m) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::dimension_mismatch, "logarithmic norm needs a square matrix");
  if (m.size() == 0)
    return 0.0;
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double col = m(j, j) + m.col(j).cwiseAbs().sum() - std::abs(m(j, j));
    best = std::max(best, col);
  }
  return best;
}

namespace {

void check_kind(const BirthDeathSpec &spec, const WeightSequence &w, SequenceKind kind) {
  const bool tri = w.kind() == TransformKind::triangular;
  if ((kind == SequenceKind::alpha0) == tri)
    throw Error(ErrorCode::kind_mismatch,
                std::string(to_string(kind)) + " needs " +
                    (tri ? "diagonal" : "triangular") + " weights, got " + to_string(w.kind()));
  if (!spec.is_finite() && w.is_finite())
    throw Error(ErrorCode::dimension_mismatch,
                "an infinite chain needs a weight sequence with a tail rule");
  const std::size_t need = tri ? spec.top() : spec.top() + 1;
  if (spec.is_finite() && w.is_finite() && w.length() < need)
    throw Error(ErrorCode::dimension_mismatch,
                "weight sequence too short for the state space");
}

} // namespace

LinearCoefficients linear_coefficients(const BirthDeathSpec &spec,
                                       const WeightSequence &w, SequenceKind kind) {
  check_kind(spec, w, kind);
  LinearCoefficients out;
  out.kind = kind;
  std::size_t count = 0;
  if (spec.is_finite())
    count = kind == SequenceKind::alpha0 ? spec.top() + 1 : spec.top();
  else
    count = spec.top() + 1;
  out.a_coef.resize(count);
  out.b_coef.resize(count);

  for (std::size_t k = 0; k < count; ++k) {
    const double lk = spec.birth(k);
    const double lk1 = spec.birth(k + 1);
    const double mk = spec.death(k);
    const double mk1 = spec.death(k + 1);
    const double dk1 = w.delta(k + 1);
    // mu_k / delta_k is 0 at k = 0 (mu_0 = 0, delta_0 = 0 convention).
    const double back = k == 0 ? 0.0 : mk / w.delta(k);
    switch (kind) {
    case SequenceKind::alpha:
      out.a_coef[k] = lk - dk1 * lk1;
      out.b_coef[k] = mk1 - back;
      break;
    case SequenceKind::zeta:
      out.a_coef[k] = lk + dk1 * lk1;
      out.b_coef[k] = mk1 + back;
      break;
    case SequenceKind::alpha0:
      out.a_coef[k] = lk * (1.0 - dk1);
      out.b_coef[k] = mk - back;
      break;
    }
  }

  if (!spec.is_finite()) {
    const double lam = spec.birth_limit();
    const double mu = spec.death_limit();
    const double r = *w.tail();
    switch (kind) {
    case SequenceKind::alpha:
    case SequenceKind::alpha0:
      out.limit_a = lam * (1.0 - r);
      out.limit_b = mu * (1.0 - 1.0 / r);
      break;
    case SequenceKind::zeta:
      out.limit_a = lam * (1.0 + r);
      out.limit_b = mu * (1.0 + 1.0 / r);
      break;
    }
  }
  return out;
}

RateCombination LinearCoefficients::lower() const {
  double a = *std::min_element(a_coef.begin(), a_coef.end());
  double b = *std::min_element(b_coef.begin(), b_coef.end());
  if (limit_a) {
    a = std::min(a, *limit_a);
    b = std::min(b, *limit_b);
  }
  return {a, b, 0.0};
}

RateCombination LinearCoefficients::upper() const {
  double a = *std::max_element(a_coef.begin(), a_coef.end());
  double b = *std::max_element(b_coef.begin(), b_coef.end());
  if (limit_a) {
    a = std::max(a, *limit_a);
    b = std::max(b, *limit_b);
  }
  return {a, b, 0.0};
}

CoefficientProfile coefficient_profile(const BirthDeathSpec &spec,
                                       const WeightSequence &w, double t,
                                       SequenceKind kind) {
  const LinearCoefficients lin = linear_coefficients(spec, w, kind);
  const double at = spec.a()(t);
  const double bt = spec.b()(t);
  CoefficientProfile p;
  p.t = t;
  p.kind = kind;
  p.values.resize(lin.size());
  for (std::size_t k = 0; k < lin.size(); ++k)
    p.values[k] = lin.a_coef[k] * at + lin.b_coef[k] * bt;
  p.inf = *std::min_element(p.values.begin(), p.values.end());
  p.sup = *std::max_element(p.values.begin(), p.values.end());
  if (lin.limit_a) {
    p.limit = *lin.limit_a * at + *lin.limit_b * bt;
    p.inf = std::min(p.inf, *p.limit);
    p.sup = std::max(p.sup, *p.limit);
  }
  return p;
}

double lognorm_of_transformed(const BirthDeathSpec &spec, const WeightSequence &w,
                              double t) {
  const SequenceKind kind = w.kind() == TransformKind::triangular
                                ? SequenceKind::alpha
                                : SequenceKind::alpha0;
  return -coefficient_profile(spec, w, t, kind).inf;
}

} // namespace bdp
