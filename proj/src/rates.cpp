#include "bdp/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bdp/error.hpp"

namespace bdp {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double negativity_slack = 1e-12;
constexpr int samples_per_period = 10000;
constexpr long max_transient_samples = 1000000;

template <class... Ts> struct overloaded : Ts... { using Ts::operator()...; };
template <class... Ts> overloaded(Ts...) -> overloaded<Ts...>;

struct Phase {
  double cycles;
  double offset;
};

// t = cycles * T + offset with offset in [0, T).
Phase split(double t, double period) {
  double n = std::floor(t / period);
  double r = t - n * period;
  if (r < 0.0) {
    n -= 1.0;
    r += period;
  } else if (r >= period) {
    n += 1.0;
    r -= period;
  }
  return {n, r};
}

std::size_t segment_of(const std::vector<double> &knots, double r) {
  auto it = std::upper_bound(knots.begin(), knots.end(), r);
  return static_cast<std::size_t>(std::distance(knots.begin(), it)) - 1;
}

void check_knots(const std::vector<double> &knots,
                 const std::vector<double> &values, double period,
                 const char *what) {
  if (knots.empty() || knots.size() != values.size())
    throw Error(ErrorCode::invalid_parameter,
                std::string(what) + ": knots and values must be nonempty and of equal length");
  if (knots.front() != 0.0)
    throw Error(ErrorCode::invalid_parameter,
                std::string(what) + ": first knot must be 0");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1]))
      throw Error(ErrorCode::invalid_parameter,
                  std::string(what) + ": knots must be strictly increasing");
  if (!(knots.back() < period))
    throw Error(ErrorCode::invalid_parameter,
                std::string(what) + ": knots must lie in [0, period)");
}

} // namespace

RateFunction::RateFunction(PeriodicForm periodic, double period,
                           VanishingForm vanishing)
    : periodic_(std::move(periodic)), period_(period),
      vanishing_(std::move(vanishing)) {
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw Error(ErrorCode::invalid_parameter, "period must be positive");
  prepare();
  validate();
}

RateFunction RateFunction::constant(double value) {
  return RateFunction(ConstantForm{value}, 1.0);
}

RateFunction RateFunction::sinusoid(double mean, double amplitude,
                                    double period) {
  return RateFunction(TrigSeriesForm{mean, {}, {amplitude}}, period);
}

void RateFunction::prepare() {
  cumulative_.clear();
  std::visit(
      overloaded{
          [&](const ConstantForm &f) { period_area_ = f.value * period_; },
          [&](const TrigSeriesForm &f) { period_area_ = f.mean * period_; },
          [&](const PiecewiseLinearForm &f) {
            check_knots(f.knots, f.values, period_, "piecewise_linear");
            double acc = 0.0;
            const std::size_t m = f.knots.size();
            for (std::size_t i = 0; i < m; ++i) {
              cumulative_.push_back(acc);
              double right = i + 1 < m ? f.knots[i + 1] : period_;
              double v_right = i + 1 < m ? f.values[i + 1] : f.values[0];
              acc += 0.5 * (f.values[i] + v_right) * (right - f.knots[i]);
            }
            period_area_ = acc;
          },
          [&](const PiecewiseConstantForm &f) {
            check_knots(f.breaks, f.values, period_, "piecewise_constant");
            double acc = 0.0;
            const std::size_t m = f.breaks.size();
            for (std::size_t i = 0; i < m; ++i) {
              cumulative_.push_back(acc);
              double right = i + 1 < m ? f.breaks[i + 1] : period_;
              acc += f.values[i] * (right - f.breaks[i]);
            }
            period_area_ = acc;
          }},
      periodic_);

  std::visit(overloaded{[](const NoDecay &) {},
                        [](const ExponentialDecay &v) {
                          if (!(v.rate > 0.0))
                            throw Error(ErrorCode::invalid_parameter,
                                        "exponential decay rate must be positive");
                        },
                        [](const PowerDecay &v) {
                          if (!(v.exponent > 0.0))
                            throw Error(ErrorCode::invalid_parameter,
                                        "power decay exponent must be positive");
                        }},
             vanishing_);
}

void RateFunction::validate() const {
  double periodic_min = std::visit(
      overloaded{[](const ConstantForm &f) { return f.value; },
                 [&](const TrigSeriesForm &) {
                   double lo = periodic_part(0.0);
                   for (int i = 1; i < samples_per_period; ++i)
                     lo = std::min(lo, periodic_part(period_ * i / samples_per_period));
                   return lo;
                 },
                 [](const PiecewiseLinearForm &f) {
                   return *std::min_element(f.values.begin(), f.values.end());
                 },
                 [](const PiecewiseConstantForm &f) {
                   return *std::min_element(f.values.begin(), f.values.end());
                 }},
      periodic_);
  if (periodic_min < -negativity_slack)
    throw Error(ErrorCode::negative_rate,
                "periodic part goes negative (min " + std::to_string(periodic_min) + ")");

  double scale = std::visit(
      overloaded{[](const NoDecay &) { return 0.0; },
                 [](const ExponentialDecay &v) { return v.scale; },
                 [](const PowerDecay &v) { return v.scale; }},
      vanishing_);
  if (scale >= 0.0)
    return;

  // A negative transient can only pull the sum below zero before burn-in.
  double horizon = burn_in() + period_;
  long count = std::min<long>(
      max_transient_samples,
      static_cast<long>(std::ceil(horizon / period_ * samples_per_period)));
  for (long i = 0; i <= count; ++i) {
    double t = horizon * static_cast<double>(i) / static_cast<double>(count);
    double v = periodic_part(t) + vanishing_part(t);
    if (v < -negativity_slack)
      throw Error(ErrorCode::negative_rate,
                  "rate goes negative at t=" + std::to_string(t));
  }
}

double RateFunction::periodic_part(double t) const {
  return std::visit(
      overloaded{
          [](const ConstantForm &f) { return f.value; },
          [&](const TrigSeriesForm &f) {
            const double w = two_pi / period_;
            double v = f.mean;
            for (std::size_t k = 0; k < f.cos_coef.size(); ++k)
              v += f.cos_coef[k] * std::cos(w * static_cast<double>(k + 1) * t);
            for (std::size_t k = 0; k < f.sin_coef.size(); ++k)
              v += f.sin_coef[k] * std::sin(w * static_cast<double>(k + 1) * t);
            return v;
          },
          [&](const PiecewiseLinearForm &f) {
            double r = split(t, period_).offset;
            std::size_t i = segment_of(f.knots, r);
            const std::size_t m = f.knots.size();
            double right = i + 1 < m ? f.knots[i + 1] : period_;
            double v_right = i + 1 < m ? f.values[i + 1] : f.values[0];
            double slope = (v_right - f.values[i]) / (right - f.knots[i]);
            return f.values[i] + slope * (r - f.knots[i]);
          },
          [&](const PiecewiseConstantForm &f) {
            double r = split(t, period_).offset;
            return f.values[segment_of(f.breaks, r)];
          }},
      periodic_);
}

double RateFunction::vanishing_part(double t) const {
  return std::visit(
      overloaded{[](const NoDecay &) { return 0.0; },
                 [&](const ExponentialDecay &v) {
                   return v.scale * std::exp(-v.rate * t);
                 },
                 [&](const PowerDecay &v) {
                   return v.scale / std::pow(1.0 + t, v.exponent);
                 }},
      vanishing_);
}

double RateFunction::operator()(double t) const {
  if (!(t >= 0.0))
    throw Error(ErrorCode::invalid_parameter, "rate evaluated at negative time");
  double v = periodic_part(t) + vanishing_part(t);
  if (v < -negativity_slack)
    throw Error(ErrorCode::negative_rate,
                "rate " + std::to_string(v) + " at t=" + std::to_string(t));
  return v;
}

double RateFunction::long_run_average() const { return period_area_ / period_; }

double RateFunction::periodic_antiderivative(double t) const {
  return std::visit(
      overloaded{
          [&](const ConstantForm &f) { return f.value * t; },
          [&](const TrigSeriesForm &f) {
            const double w = two_pi / period_;
            double v = f.mean * t;
            for (std::size_t k = 0; k < f.cos_coef.size(); ++k) {
              double kw = w * static_cast<double>(k + 1);
              v += f.cos_coef[k] * std::sin(kw * t) / kw;
            }
            for (std::size_t k = 0; k < f.sin_coef.size(); ++k) {
              double kw = w * static_cast<double>(k + 1);
              v -= f.sin_coef[k] * std::cos(kw * t) / kw;
            }
            return v;
          },
          [&](const PiecewiseLinearForm &f) {
            Phase ph = split(t, period_);
            std::size_t i = segment_of(f.knots, ph.offset);
            const std::size_t m = f.knots.size();
            double right = i + 1 < m ? f.knots[i + 1] : period_;
            double v_right = i + 1 < m ? f.values[i + 1] : f.values[0];
            double slope = (v_right - f.values[i]) / (right - f.knots[i]);
            double x = ph.offset - f.knots[i];
            return ph.cycles * period_area_ + cumulative_[i] +
                   f.values[i] * x + 0.5 * slope * x * x;
          },
          [&](const PiecewiseConstantForm &f) {
            Phase ph = split(t, period_);
            std::size_t i = segment_of(f.breaks, ph.offset);
            return ph.cycles * period_area_ + cumulative_[i] +
                   f.values[i] * (ph.offset - f.breaks[i]);
          }},
      periodic_);
}

double RateFunction::vanishing_antiderivative(double t) const {
  return std::visit(
      overloaded{[](const NoDecay &) { return 0.0; },
                 [&](const ExponentialDecay &v) {
                   return -v.scale / v.rate * std::exp(-v.rate * t);
                 },
                 [&](const PowerDecay &v) {
                   if (v.exponent == 1.0)
                     return v.scale * std::log1p(t);
                   double e = 1.0 - v.exponent;
                   return v.scale * std::pow(1.0 + t, e) / e;
                 }},
      vanishing_);
}

double RateFunction::integrate(double s, double t) const {
  if (!(s >= 0.0) || !(t >= s))
    throw Error(ErrorCode::invalid_parameter, "integrate requires 0 <= s <= t");
  if (s == t)
    return 0.0;
  return (periodic_antiderivative(t) - periodic_antiderivative(s)) +
         (vanishing_antiderivative(t) - vanishing_antiderivative(s));
}

double RateFunction::burn_in(double threshold) const {
  return std::visit(
      overloaded{[](const NoDecay &) { return 0.0; },
                 [&](const ExponentialDecay &v) {
                   double c = std::abs(v.scale);
                   return c <= threshold ? 0.0 : std::log(c / threshold) / v.rate;
                 },
                 [&](const PowerDecay &v) {
                   double c = std::abs(v.scale);
                   return c <= threshold
                              ? 0.0
                              : std::pow(c / threshold, 1.0 / v.exponent) - 1.0;
                 }},
      vanishing_);
}

std::vector<double> RateFunction::jumps(double s, double t) const {
  std::vector<double> out;
  const auto *pc = std::get_if<PiecewiseConstantForm>(&periodic_);
  if (!pc || !(t > s))
    return out;
  const double first_cycle = std::floor(s / period_);
  for (double n = first_cycle; n * period_ <= t; n += 1.0) {
    for (std::size_t i = 0; i < pc->breaks.size(); ++i) {
      const double prev = pc->values[i == 0 ? pc->values.size() - 1 : i - 1];
      if (prev == pc->values[i])
        continue;
      const double x = n * period_ + pc->breaks[i];
      if (x > s && x <= t)
        out.push_back(x);
    }
  }
  return out;
}

bool RateFunction::is_constant() const {
  bool flat = std::holds_alternative<ConstantForm>(periodic_);
  bool still = std::visit(
      overloaded{[](const NoDecay &) { return true; },
                 [](const ExponentialDecay &v) { return v.scale == 0.0; },
                 [](const PowerDecay &v) { return v.scale == 0.0; }},
      vanishing_);
  return flat && still;
}

RateFunction RateFunction::scaled(double factor) const {
  if (!(factor >= 0.0))
    throw Error(ErrorCode::invalid_parameter, "scale factor must be nonnegative");
  auto times = [factor](std::vector<double> v) {
    for (double &x : v)
      x *= factor;
    return v;
  };
  PeriodicForm p = std::visit(
      overloaded{
          [&](const ConstantForm &f) -> PeriodicForm {
            return ConstantForm{f.value * factor};
          },
          [&](const TrigSeriesForm &f) -> PeriodicForm {
            return TrigSeriesForm{f.mean * factor, times(f.cos_coef), times(f.sin_coef)};
          },
          [&](const PiecewiseLinearForm &f) -> PeriodicForm {
            return PiecewiseLinearForm{f.knots, times(f.values)};
          },
          [&](const PiecewiseConstantForm &f) -> PeriodicForm {
            return PiecewiseConstantForm{f.breaks, times(f.values)};
          }},
      periodic_);
  VanishingForm v = std::visit(
      overloaded{[](const NoDecay &) -> VanishingForm { return NoDecay{}; },
                 [&](const ExponentialDecay &d) -> VanishingForm {
                   return ExponentialDecay{d.scale * factor, d.rate};
                 },
                 [&](const PowerDecay &d) -> VanishingForm {
                   return PowerDecay{d.scale * factor, d.exponent};
                 }},
      vanishing_);
  return RateFunction(std::move(p), period_, std::move(v));
}

double RateCombination::operator()(const RateFunction &a, const RateFunction &b,
                                   double t) const {
  double v = constant;
  if (a_coef != 0.0)
    v += a_coef * a(t);
  if (b_coef != 0.0)
    v += b_coef * b(t);
  return v;
}

double RateCombination::integrate(const RateFunction &a, const RateFunction &b,
                                  double s, double t) const {
  double v = constant * (t - s);
  if (a_coef != 0.0)
    v += a_coef * a.integrate(s, t);
  if (b_coef != 0.0)
    v += b_coef * b.integrate(s, t);
  return v;
}

double RateCombination::mean(const RateFunction &a, const RateFunction &b) const {
  return a_coef * a.long_run_average() + b_coef * b.long_run_average() + constant;
}

RateCombination RateCombination::scaled(double factor) const {
  return {a_coef * factor, b_coef * factor, constant * factor};
}

} // namespace bdp
