#include "bdp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bdp/error.hpp"

namespace bdp {

BirthDeathSpec BirthDeathSpec::finite(std::vector<double> birth,
                                      std::vector<double> death, RateFunction a,
                                      RateFunction b) {
  if (birth.empty() || birth.size() != death.size())
    throw Error(ErrorCode::dimension_mismatch,
                "finite chain needs lambda_0..lambda_{N-1} and mu_1..mu_N of equal length N >= 1");
  BirthDeathSpec s(std::move(a), std::move(b));
  s.finite_n_ = birth.size();
  s.truncation_ = birth.size();
  s.birth_limit_ = birth.back();
  s.death_limit_ = death.back();
  s.birth_table_ = std::move(birth);
  s.death_table_ = std::move(death);
  s.validate();
  return s;
}

BirthDeathSpec BirthDeathSpec::infinite(RateSequence birth, RateSequence death,
                                        RateFunction a, RateFunction b,
                                        std::size_t truncation) {
  if (truncation < 1)
    throw Error(ErrorCode::invalid_parameter, "truncation level must be >= 1");
  if (!birth.rule || !death.rule)
    throw Error(ErrorCode::invalid_parameter, "rate rules must be set");
  BirthDeathSpec s(std::move(a), std::move(b));
  s.truncation_ = truncation;
  s.birth_limit_ = birth.limit;
  s.death_limit_ = death.limit;
  s.birth_rule_ = std::move(birth);
  s.death_rule_ = std::move(death);
  s.validate();
  return s;
}

void BirthDeathSpec::validate() const {
  const std::size_t n = top();
  for (std::size_t k = 0; k < n; ++k)
    if (!(birth(k) > 0.0))
      throw Error(ErrorCode::invalid_parameter,
                  "lambda_" + std::to_string(k) + " must be positive");
  for (std::size_t k = 1; k <= n; ++k)
    if (!(death(k) > 0.0))
      throw Error(ErrorCode::invalid_parameter,
                  "mu_" + std::to_string(k) + " must be positive");
  if (is_finite())
    return;
  if (!(birth_limit_ >= 0.0) || !(death_limit_ > 0.0))
    throw Error(ErrorCode::invalid_parameter,
                "rate limits must satisfy lambda >= 0, mu > 0");
  // Rules with a positive limit must have reached it at the truncation level.
  auto close = [](double v, double lim) {
    return std::abs(v - lim) <= 1e-6 * std::max(1.0, std::abs(lim));
  };
  if (birth_limit_ > 0.0 && !close(birth(n), birth_limit_))
    throw Error(ErrorCode::invalid_parameter,
                "lambda_K does not match the declared limit");
  if (!close(death(n), death_limit_))
    throw Error(ErrorCode::invalid_parameter, "mu_K does not match the declared limit");
}

std::size_t BirthDeathSpec::top() const {
  return finite_n_ ? *finite_n_ : truncation_;
}

double BirthDeathSpec::birth(std::size_t n) const {
  if (finite_n_)
    return n < *finite_n_ ? birth_table_[n] : 0.0;
  return birth_rule_.rule(n);
}

double BirthDeathSpec::death(std::size_t n) const {
  if (n == 0)
    return 0.0;
  if (finite_n_)
    return n <= *finite_n_ ? death_table_[n - 1] : 0.0;
  return death_rule_.rule(n);
}

double BirthDeathSpec::truncated_birth(std::size_t n) const {
  return n >= top() ? 0.0 : birth(n);
}

BirthDeathSpec BirthDeathSpec::with_truncation(std::size_t k) const {
  if (is_finite())
    throw Error(ErrorCode::invalid_parameter, "finite chains have no truncation level");
  BirthDeathSpec s = *this;
  s.truncation_ = k;
  s.preset_params_.truncation = k;
  s.validate();
  return s;
}

BirthDeathSpec BirthDeathSpec::with_rates(RateFunction a, RateFunction b) const {
  BirthDeathSpec s = *this;
  s.a_ = std::move(a);
  s.b_ = std::move(b);
  return s;
}

BirthDeathSpec make_preset(const std::string &name, const PresetParameters &params,
                           RateFunction a, RateFunction b) {
  const int S = params.servers;
  if (S < 1)
    throw Error(ErrorCode::invalid_parameter, "number of servers must be >= 1");
  if (!(params.lambda > 0.0) || !(params.mu > 0.0))
    throw Error(ErrorCode::invalid_parameter, "lambda and mu must be positive");
  const double lam = params.lambda;
  const double mu = params.mu;
  const auto s = static_cast<std::size_t>(S);

  BirthDeathSpec spec = [&] {
    if (name == "mm1") {
      return BirthDeathSpec::infinite({[lam](std::size_t) { return lam; }, lam},
                                      {[mu](std::size_t) { return mu; }, mu},
                                      std::move(a), std::move(b), params.truncation);
    }
    if (name == "mms") {
      return BirthDeathSpec::infinite(
          {[lam](std::size_t) { return lam; }, lam},
          {[mu, s](std::size_t n) { return mu * static_cast<double>(std::min(n, s)); },
           mu * S},
          std::move(a), std::move(b), params.truncation);
    }
    if (name == "discouragement") {
      return BirthDeathSpec::infinite(
          {[lam, s](std::size_t n) {
             return n < s ? lam : lam / static_cast<double>(n - s + 2);
           },
           0.0},
          {[mu, s](std::size_t n) { return mu * static_cast<double>(std::min(n, s)); },
           mu * S},
          std::move(a), std::move(b), params.truncation);
    }
    if (name == "mmss") {
      std::vector<double> birth(s, lam), death(s);
      for (std::size_t n = 1; n <= s; ++n)
        death[n - 1] = mu * static_cast<double>(n);
      return BirthDeathSpec::finite(std::move(birth), std::move(death), std::move(a),
                                    std::move(b));
    }
    throw Error(ErrorCode::unknown_preset, "unknown preset '" + name + "'");
  }();
  spec.preset_ = name;
  spec.servers_ = S;
  spec.preset_params_ = params;
  if (name == "mmss")
    spec.preset_params_.truncation = s;
  return spec;
}

IntensityMatrix build_A(const BirthDeathSpec &spec, double t) {
  const std::size_t n = spec.top();
  const double at = spec.a()(t);
  const double bt = spec.b()(t);
  const auto dim = static_cast<Eigen::Index>(n + 1);
  IntensityMatrix out{t, Eigen::MatrixXd::Zero(dim, dim)};
  for (std::size_t j = 0; j <= n; ++j) {
    const auto J = static_cast<Eigen::Index>(j);
    const double up = spec.truncated_birth(j) * at;
    const double down = spec.death(j) * bt;
    if (j < n)
      out.values(J + 1, J) = up;
    if (j > 0)
      out.values(J - 1, J) = down;
    out.values(J, J) = -(up + down);
  }
  return out;
}

ReducedSystem build_B(const BirthDeathSpec &spec, double t) {
  const Eigen::MatrixXd A = build_A(spec, t).values;
  const Eigen::Index n = A.rows() - 1;
  ReducedSystem out;
  out.B = A.bottomRightCorner(n, n);
  out.f = A.col(0).tail(n);
  out.B.colwise() -= out.f;
  return out;
}

Eigen::MatrixXd build_transformed(const BirthDeathSpec &spec, const WeightSequence &w,
                                  double t) {
  const std::size_t n = spec.top();
  const bool tri = w.kind() == TransformKind::triangular;
  const std::size_t dim = tri ? n : n + 1;
  if (w.is_finite() && w.length() < dim)
    throw Error(ErrorCode::dimension_mismatch,
                "weight sequence has " + std::to_string(w.length()) +
                    " entries, transformed matrix needs " + std::to_string(dim));
  const double at = spec.a()(t);
  const double bt = spec.b()(t);
  const auto D = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(D, D);
  for (std::size_t k = 0; k < dim; ++k) {
    const auto K = static_cast<Eigen::Index>(k);
    if (tri) {
      // Row k tracks d_k * P(X > k).
      m(K, K) = -(spec.birth(k) * at + spec.death(k + 1) * bt);
      if (k + 1 < dim) {
        m(K, K + 1) = w.d(k) / w.d(k + 1) * spec.death(k + 1) * bt;
        m(K + 1, K) = w.d(k + 1) / w.d(k) * spec.birth(k + 1) * at;
      }
    } else {
      m(K, K) = -(spec.truncated_birth(k) * at + spec.death(k) * bt);
      if (k + 1 < dim) {
        m(K, K + 1) = w.d(k) / w.d(k + 1) * spec.death(k + 1) * bt;
        m(K + 1, K) = w.d(k + 1) / w.d(k) * spec.truncated_birth(k) * at;
      }
    }
  }
  return m;
}

} // namespace bdp
