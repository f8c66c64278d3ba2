#include "bdp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "bdp/error.hpp"

namespace bdp {
namespace {

constexpr int grid_size = 64;
constexpr double search_tol = 1e-6;
constexpr double strict_margin = 1e-9;
constexpr double unbounded_spread = 1e3;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Number of coefficient indices k = 0..count-1 for the triangular system.
std::size_t ergodic_count(const BirthDeathSpec &spec) {
  return spec.is_finite() ? spec.top() : spec.top() + 1;
}

void require_positive_limits(const BirthDeathSpec &spec) {
  if (!(spec.birth_limit() > 0.0) || !(spec.death_limit() > 0.0))
    throw Infeasible("limits", "the birth and death rates must have positive limits (lambda = " +
                                   fmt(spec.birth_limit()) + ", mu = " +
                                   fmt(spec.death_limit()) + ")");
}

void require_spread(double spread) {
  if (!(spread > 1.0) || !std::isfinite(spread))
    throw Error(ErrorCode::invalid_parameter, "Delta must be > 1, got " + fmt(spread));
}

void check_condition_a(const BirthDeathSpec &spec) {
  const std::size_t n = ergodic_count(spec);
  for (std::size_t k = 0; k < n; ++k) {
    const double lm1 = k == 0 ? 0.0 : spec.birth(k - 1);
    const double q = lm1 * spec.death(k + 1) - spec.birth(k) * spec.death(k);
    const double scale = std::max(1.0, spec.birth(k) * spec.death(k));
    if (q < -1e-12 * scale)
      throw Infeasible("a", "lambda_{k-1} mu_{k+1} - lambda_k mu_k < 0 at k = " +
                                std::to_string(k));
  }
}

double golden_max(const std::function<double(double)> &f, double lo, double hi) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo);
  double x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > search_tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

struct SearchResult {
  double spread;
  double c;
};

// Maximises c * slope(Delta) over Delta in (1, spread_max], c in (0, c_max(Delta)].
SearchResult search(double spread_max, const std::function<double(double)> &c_max,
                    const std::function<double(double)> &slope,
                    std::optional<double> fixed_c) {
  auto objective = [&](double spread, double c) {
    if (!(c > 0.0) || c > c_max(spread))
      return -std::numeric_limits<double>::infinity();
    return c * slope(spread);
  };
  auto grid_point = [&](int i) { return 1.0 + (spread_max - 1.0) * i / grid_size; };

  double best = -std::numeric_limits<double>::infinity();
  int best_i = -1;
  double best_c = 0.0;
  for (int i = 1; i <= grid_size; ++i) {
    const double spread = grid_point(i);
    const double cm = c_max(spread);
    for (int j = 1; j <= grid_size; ++j) {
      const double c = fixed_c ? *fixed_c : cm * j / grid_size;
      const double v = objective(spread, c);
      if (v > best) {
        best = v;
        best_i = i;
        best_c = c;
      }
      if (fixed_c)
        break;
    }
  }
  if (best_i < 0 || !(best > 0.0))
    return {0.0, 0.0};

  if (fixed_c) {
    // Drift falls with Delta at fixed c: move down to the feasibility edge.
    double hi = grid_point(best_i);
    double lo = grid_point(best_i - 1);
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid > 1.0 && objective(mid, *fixed_c) > 0.0)
        hi = mid;
      else
        lo = mid;
    }
    return {hi, *fixed_c};
  }

  const double lo = std::max(grid_point(best_i - 1), 1.0 + 1e-12);
  const double hi = grid_point(std::min(best_i + 1, grid_size));
  const double spread = golden_max([&](double x) { return objective(x, c_max(x)); }, lo, hi);
  const double c = c_max(spread);
  if (objective(spread, c) >= best)
    return {spread, c};
  return {grid_point(best_i), best_c};
}

double pick(const Interval &iv, IntervalChoice choice) {
  switch (choice) {
  case IntervalChoice::lower:
    return iv.lo;
  case IntervalChoice::upper:
    return iv.hi;
  case IntervalChoice::geometric:
    break;
  }
  return std::sqrt(iv.lo * iv.hi);
}

WeightSequence weights_from(TransformKind kind, const std::vector<Interval> &intervals,
                            const std::optional<Interval> &tail, IntervalChoice choice) {
  std::vector<double> ratios;
  ratios.reserve(intervals.size());
  for (const Interval &iv : intervals)
    ratios.push_back(pick(iv, choice));
  if (tail)
    return WeightSequence::unbounded(kind, std::move(ratios), pick(*tail, choice));
  return WeightSequence::finite(kind, std::move(ratios));
}

} // namespace

double IndexedSequence::inf() const {
  double v = values.empty() ? std::numeric_limits<double>::infinity()
                            : *std::min_element(values.begin(), values.end());
  if (limit)
    v = std::min(v, *limit);
  return v;
}

bool Interval::contains(double x, double rel_tol) const {
  return x >= lo - rel_tol * std::max(1.0, std::abs(lo)) &&
         x <= hi + rel_tol * std::max(1.0, std::abs(hi));
}

IndexedSequence f_sequence(const BirthDeathSpec &spec, double spread) {
  if (!(spread > 0.0))
    throw Error(ErrorCode::invalid_parameter, "Delta must be positive");
  const double lam = spec.birth_limit();
  const double mu = spec.death_limit();
  if (!(lam > 0.0) || !(mu > 0.0))
    throw Error(ErrorCode::invalid_parameter, "f_k needs positive rate limits");
  IndexedSequence out;
  const std::size_t n = ergodic_count(spec);
  out.values.resize(n);
  const double denom = 2.0 * spread * lam * mu;
  for (std::size_t k = 0; k < n; ++k) {
    const double lm1 = k == 0 ? 0.0 : spec.birth(k - 1);
    const double p = spread * lam * spec.death(k + 1) - lm1 * mu;
    const double q = lm1 * spec.death(k + 1) - spec.birth(k) * spec.death(k);
    const double rad = p * p + 4.0 * spread * lam * mu * q;
    if (rad < -1e-12 * std::max(1.0, p * p))
      throw Error(ErrorCode::negative_discriminant,
                  "f_k radicand negative at k = " + std::to_string(k));
    out.values[k] = (p + std::sqrt(std::max(rad, 0.0))) / denom;
  }
  if (!spec.is_finite())
    out.limit = (spread - 1.0) / spread;
  return out;
}

IndexedSequence h_sequence(const BirthDeathSpec &spec, double spread) {
  if (!(spread > 0.0))
    throw Error(ErrorCode::invalid_parameter, "Delta must be positive");
  const double lam = spec.birth_limit();
  const double mu = spec.death_limit();
  if (!(lam > 0.0) || !(mu > 0.0))
    throw Error(ErrorCode::invalid_parameter, "h_k needs positive rate limits");
  IndexedSequence out;
  out.first_index = 1;
  const std::size_t n = spec.top();
  out.values.resize(n);
  for (std::size_t k = 1; k <= n; ++k)
    out.values[k - 1] = (spread * mu * spec.birth(k - 1) - lam * spec.death(k)) /
                        (spread * lam * mu);
  if (!spec.is_finite())
    out.limit = (spread - 1.0) / spread;
  return out;
}

double max_ergodic_c(const BirthDeathSpec &spec, double spread) {
  const double mu = spec.death_limit();
  double f;
  try {
    f = f_sequence(spec, spread).inf();
  } catch (const Error &) {
    return 0.0;
  }
  double strict = 1.0;
  const std::size_t n = ergodic_count(spec);
  for (std::size_t k = 1; k < n; ++k)
    strict = std::min(strict, spec.death(k + 1) / mu);
  return std::max(0.0, std::min({f, spec.death(1) / mu, (1.0 - strict_margin) * strict}));
}

double max_null_c(const BirthDeathSpec &spec, double spread) {
  const double lam = spec.birth_limit();
  const double h = h_sequence(spec, spread).inf();
  double strict = 1.0;
  for (std::size_t k = 0; k <= spec.top(); ++k)
    strict = std::min(strict, spec.birth(k) / lam);
  return std::max(0.0, std::min(h, (1.0 - strict_margin) * strict));
}

ErgodicFeasibility ergodic_feasibility(const BirthDeathSpec &spec, double spread, double c) {
  if (!spec.is_finite())
    require_positive_limits(spec);
  require_spread(spread);
  ErgodicFeasibility out;
  out.spread = spread;
  out.c = c;
  const double lam = spec.birth_limit();
  const double mu = spec.death_limit();

  check_condition_a(spec);
  out.conditions.push_back("a: lambda_{k-1} mu_{k+1} - lambda_k mu_k >= 0");

  const double am = spec.a().long_run_average();
  const double bm = spec.b().long_run_average();
  const double slope = mu * bm - spread * lam * am;
  if (!(slope > 0.0))
    throw Infeasible("b", "mu b_m - Delta lambda a_m = " + fmt(slope) + " is not positive");
  out.conditions.push_back("b: mu b_m - Delta lambda a_m > 0");

  out.f = f_sequence(spec, spread).inf();
  if (!(out.f > 0.0))
    throw Infeasible("c", "f = inf f_k = " + fmt(out.f) + " is not positive");
  if (!(c > 0.0) || !(c < 1.0))
    throw Infeasible("c", "c = " + fmt(c) + " must lie in (0, 1)");
  if (c > out.f * (1.0 + 1e-12))
    throw Infeasible("c", "c = " + fmt(c) + " exceeds f = " + fmt(out.f));
  if (c > spec.death(1) / mu * (1.0 + 1e-12))
    throw Infeasible("c", "c exceeds mu_1 / mu");
  const std::size_t n = ergodic_count(spec);
  for (std::size_t k = 1; k < n; ++k)
    if (!(c < spec.death(k + 1) / mu))
      throw Infeasible("c", "c >= mu_{k+1} / mu at k = " + std::to_string(k));
  out.conditions.push_back("c: 0 < c <= f, c < 1, c < mu_{k+1}/mu");

  // delta_k, k = 1..N-1 (finite) or 1..K (infinite, then the tail).
  const std::size_t last = spec.is_finite() ? spec.top() - 1 : spec.top();
  for (std::size_t k = 1; k <= last; ++k) {
    Interval iv{spec.death(k) / (spec.death(k + 1) - c * mu),
                (spec.birth(k - 1) + c * spread * lam) / spec.birth(k)};
    if (!(iv.lo <= iv.hi * (1.0 + 1e-12)))
      throw Infeasible("interval", "empty delta interval at k = " + std::to_string(k));
    out.intervals.push_back(iv);
  }
  if (!spec.is_finite())
    out.tail_interval = Interval{1.0 / (1.0 - c), 1.0 + c * spread};
  out.conditions.push_back("interval: lo_k <= hi_k for every k");

  out.drift = {-c * spread * lam, c * mu, 0.0};
  out.drift_mean = out.drift.mean(spec.a(), spec.b());
  return out;
}

NullFeasibility null_feasibility(const BirthDeathSpec &spec, double spread, double c) {
  if (spec.is_finite())
    throw Infeasible("finite", "a finite chain cannot be null-ergodic");
  require_positive_limits(spec);
  require_spread(spread);
  NullFeasibility out;
  out.spread = spread;
  out.c = c;
  const double lam = spec.birth_limit();
  const double mu = spec.death_limit();

  out.h = h_sequence(spec, spread).inf();
  if (!(out.h > 0.0))
    throw Infeasible("a", "h = inf h_k = " + fmt(out.h) + " is not positive");
  out.conditions.push_back("a: h = inf h_k > 0");

  const double am = spec.a().long_run_average();
  const double bm = spec.b().long_run_average();
  const double slope = lam * am - spread * mu * bm;
  if (!(slope > 0.0))
    throw Infeasible("b", "lambda a_m - Delta mu b_m = " + fmt(slope) + " is not positive");
  out.conditions.push_back("b: lambda a_m - Delta mu b_m > 0");

  if (!(c > 0.0) || !(c < 1.0))
    throw Infeasible("c", "c = " + fmt(c) + " must lie in (0, 1)");
  if (c > out.h * (1.0 + 1e-12))
    throw Infeasible("c", "c = " + fmt(c) + " exceeds h = " + fmt(out.h));
  for (std::size_t k = 0; k <= spec.top(); ++k)
    if (!(c < spec.birth(k) / lam))
      throw Infeasible("c", "c >= lambda_k / lambda at k = " + std::to_string(k));
  out.conditions.push_back("c: 0 < c <= h, c < 1, c < lambda_k/lambda");

  for (std::size_t k = 1; k <= spec.top(); ++k) {
    Interval iv{spec.death(k) / (spec.death(k) + c * mu * spread),
                (spec.birth(k - 1) - c * lam) / spec.birth(k - 1)};
    if (!(iv.lo <= iv.hi * (1.0 + 1e-12)))
      throw Infeasible("interval", "empty delta interval at k = " + std::to_string(k));
    out.intervals.push_back(iv);
  }
  out.tail_interval = Interval{1.0 / (1.0 + c * spread), 1.0 - c};
  out.conditions.push_back("interval: lo_k <= hi_k for every k");

  out.drift = {c * lam, -c * spread * mu, 0.0};
  out.drift_mean = out.drift.mean(spec.a(), spec.b());
  return out;
}

void check_membership(const std::vector<Interval> &intervals,
                      const std::optional<Interval> &tail, const WeightSequence &w) {
  const std::size_t n = std::max(intervals.size(), w.stored());
  for (std::size_t k = 1; k <= n; ++k) {
    const Interval *iv = k <= intervals.size() ? &intervals[k - 1] : tail ? &*tail : nullptr;
    if (!iv)
      break;
    const double x = w.delta(k);
    if (!iv->contains(x))
      throw Infeasible("interval", "delta_" + std::to_string(k) + " = " + fmt(x) +
                                       " outside [" + fmt(iv->lo) + ", " + fmt(iv->hi) + "]");
  }
  if (tail) {
    if (!w.tail())
      throw Infeasible("interval", "an infinite chain needs a tail ratio");
    if (!tail->contains(*w.tail()))
      throw Infeasible("interval", "tail ratio " + fmt(*w.tail()) + " outside [" +
                                       fmt(tail->lo) + ", " + fmt(tail->hi) + "]");
  }
}

ErgodicWeights find_ergodic_weights(const BirthDeathSpec &spec, const SearchOptions &options) {
  if (!spec.is_finite())
    require_positive_limits(spec);
  check_condition_a(spec);
  const double lam = spec.birth_limit();
  const double mu = spec.death_limit();
  const double am = spec.a().long_run_average();
  const double bm = spec.b().long_run_average();
  if (!(mu * bm - lam * am > 0.0))
    throw Infeasible("b", "mu b_m - Delta lambda a_m <= 0 for every Delta > 1");

  double spread = 0.0, c = 0.0;
  if (options.spread && options.c) {
    spread = *options.spread;
    c = *options.c;
  } else if (options.spread) {
    spread = *options.spread;
    require_spread(spread);
    c = max_ergodic_c(spec, spread);
    if (!(c > 0.0))
      throw Infeasible("c", "no admissible c for Delta = " + fmt(spread));
  } else {
    const double spread_max = am > 0.0 ? mu * bm / (lam * am) : unbounded_spread;
    SearchResult r = search(
        spread_max, [&](double x) { return max_ergodic_c(spec, x); },
        [&](double x) { return mu * bm - x * lam * am; }, options.c);
    if (!(r.c > 0.0))
      throw Infeasible("c", "no (Delta, c) pair gives a positive drift");
    spread = r.spread;
    c = r.c;
  }
  ErgodicFeasibility feas = ergodic_feasibility(spec, spread, c);
  WeightSequence w = weights_from(TransformKind::triangular, feas.intervals,
                                  feas.tail_interval, options.choice);
  check_membership(feas.intervals, feas.tail_interval, w);
  return {std::move(feas), std::move(w)};
}

NullWeights find_null_weights(const BirthDeathSpec &spec, const SearchOptions &options) {
  if (spec.is_finite())
    throw Infeasible("finite", "a finite chain cannot be null-ergodic");
  require_positive_limits(spec);
  const double lam = spec.birth_limit();
  const double mu = spec.death_limit();
  const double am = spec.a().long_run_average();
  const double bm = spec.b().long_run_average();
  if (!(lam * am - mu * bm > 0.0))
    throw Infeasible("b", "lambda a_m - Delta mu b_m <= 0 for every Delta > 1");

  double spread = 0.0, c = 0.0;
  if (options.spread && options.c) {
    spread = *options.spread;
    c = *options.c;
  } else if (options.spread) {
    spread = *options.spread;
    require_spread(spread);
    c = max_null_c(spec, spread);
    if (!(c > 0.0))
      throw Infeasible("c", "no admissible c for Delta = " + fmt(spread));
  } else {
    const double spread_max = bm > 0.0 ? lam * am / (mu * bm) : unbounded_spread;
    SearchResult r = search(
        spread_max, [&](double x) { return max_null_c(spec, x); },
        [&](double x) { return lam * am - x * mu * bm; }, options.c);
    if (!(r.c > 0.0))
      throw Infeasible("c", "no (Delta, c) pair gives a positive drift");
    spread = r.spread;
    c = r.c;
  }
  NullFeasibility feas = null_feasibility(spec, spread, c);
  WeightSequence w =
      weights_from(TransformKind::diagonal, feas.intervals, feas.tail_interval, options.choice);
  check_membership(feas.intervals, feas.tail_interval, w);
  return {std::move(feas), std::move(w)};
}

bool dominated_coefficientwise(const LinearCoefficients &lin, const RateCombination &rate,
                               double tol) {
  if (rate.constant > tol)
    return false;
  for (std::size_t k = 0; k < lin.size(); ++k)
    if (lin.a_coef[k] < rate.a_coef - tol || lin.b_coef[k] < rate.b_coef - tol)
      return false;
  if (lin.limit_a &&
      (*lin.limit_a < rate.a_coef - tol || *lin.limit_b < rate.b_coef - tol))
    return false;
  return true;
}

double traffic_intensity(const BirthDeathSpec &spec) {
  const double bm = spec.b().long_run_average();
  const double am = spec.a().long_run_average();
  if (bm == 0.0)
    return std::numeric_limits<double>::infinity();
  return spec.birth_limit() * am / (spec.death_limit() * bm);
}

namespace {

PresetWeights queue_weights(const BirthDeathSpec &spec) {
  const double rho = traffic_intensity(spec);
  const int S = spec.servers();
  if (!(rho > 0.0) || rho == 1.0 || !std::isfinite(rho))
    throw Error(ErrorCode::invalid_parameter,
                "traffic intensity must be positive, finite and != 1, got " + fmt(rho));
  const double s = std::sqrt(rho);
  if (rho < 1.0) {
    const double spread = 1.0 / s;
    const double c = std::min(1.0 / S, 1.0 - s);
    const bool heavy = 1.0 - s <= 1.0 / S;
    PresetWeights out{WeightSequence::unbounded(TransformKind::triangular, {}, 1.0 / s),
                      Direction::ergodic,
                      spec.preset() == "mm1" ? "underloaded"
                                             : (heavy ? "heavy-traffic" : "light-traffic"),
                      {}, spread, c, {}};
    ErgodicFeasibility feas = ergodic_feasibility(spec, spread, c);
    try {
      check_membership(feas.intervals, feas.tail_interval, out.weights);
    } catch (const Infeasible &e) {
      out.notes.push_back(std::string("delta = rho^{-1/2} is not admissible here (") +
                          e.what() +
                          "); weights taken from the interval construction with the same "
                          "Delta and c");
      ErgodicWeights ew = find_ergodic_weights(spec, {spread, c, IntervalChoice::geometric});
      out.weights = ew.weights;
      feas = ew.feasibility;
    }
    out.rate = feas.drift;
    return out;
  }
  const double spread = s;
  const double c = 1.0 - 1.0 / s;
  PresetWeights out{WeightSequence::unbounded(TransformKind::diagonal, {}, 1.0 / s),
                    Direction::null, "overloaded", {}, spread, c, {}};
  const double literal_c = s - 1.0;
  const double h = h_sequence(spec, spread).inf();
  if (literal_c > h)
    out.notes.push_back("c = rho^{1/2} - 1 = " + fmt(literal_c) + " violates c <= h = " +
                        fmt(h) + "; using c = 1 - rho^{-1/2}");
  NullFeasibility feas = null_feasibility(spec, spread, c);
  check_membership(feas.intervals, feas.tail_interval, out.weights);
  out.rate = feas.drift;
  return out;
}

PresetWeights discouragement_weights(const BirthDeathSpec &spec, double eps) {
  if (!(eps > 0.0) || !(eps < 1.0))
    throw Error(ErrorCode::invalid_parameter, "epsilon must lie in (0, 1)");
  const int S = spec.servers();
  const double lam = spec.preset_parameters().lambda;
  const double mu = spec.preset_parameters().mu;
  const double am = spec.a().long_run_average();
  const double bm = spec.b().long_run_average();
  if (!(mu * bm - eps * lam * am > 0.0))
    throw Infeasible("b", "mu b_m - epsilon lambda a_m must be positive");
  PresetWeights out{
      WeightSequence::unbounded(TransformKind::triangular,
                                std::vector<double>(static_cast<std::size_t>(S - 1), 1.0),
                                1.0 + eps),
      Direction::ergodic, "discouragement", {}, std::nullopt, std::nullopt, {}};
  const double scale = S * eps / (1.0 + eps);
  out.rate = {-scale * eps * lam, scale * mu, 0.0};
  const LinearCoefficients lin = linear_coefficients(spec, out.weights, SequenceKind::alpha);
  if (!dominated_coefficientwise(lin, out.rate)) {
    out.notes.push_back("(S eps/(1+eps))(mu b - eps lambda a) is not a lower bound for every "
                        "alpha_k when eps > 1/(S-1); using the coefficientwise minimum");
    out.rate = lin.lower();
    if (!(out.rate.mean(spec.a(), spec.b()) > 0.0))
      throw Infeasible("b", "coefficientwise rate has nonpositive mean");
  }
  return out;
}

PresetWeights loss_weights(const BirthDeathSpec &spec, int loss_case) {
  const int S = spec.servers();
  const auto n = static_cast<std::size_t>(S - 1);
  PresetWeights out{WeightSequence::finite(TransformKind::triangular, {}), Direction::ergodic,
                    "", {}, std::nullopt, std::nullopt, {}};
  if (loss_case == 1) {
    out.weights = WeightSequence::finite(TransformKind::triangular, std::vector<double>(n, 1.0));
    out.regime = "case1";
  } else if (loss_case == 2) {
    if (S < 2)
      throw Error(ErrorCode::invalid_parameter, "delta = (S-1)/S needs S >= 2");
    out.weights = WeightSequence::finite(TransformKind::triangular,
                                         std::vector<double>(n, double(S - 1) / S));
    out.regime = "case2";
  } else {
    throw Error(ErrorCode::invalid_parameter, "loss case must be 1 or 2");
  }
  out.rate = linear_coefficients(spec, out.weights, SequenceKind::alpha).lower();
  return out;
}

} // namespace

PresetWeights preset_weights(const BirthDeathSpec &spec, const PresetWeightOptions &options) {
  const std::string &name = spec.preset();
  if (name == "mm1" || name == "mms")
    return queue_weights(spec);
  if (name == "discouragement")
    return discouragement_weights(spec, options.epsilon);
  if (name == "mmss")
    return loss_weights(spec, options.loss_case);
  throw Error(ErrorCode::unknown_preset, "spec is not built from a preset");
}

} // namespace bdp
