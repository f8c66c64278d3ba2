#ifndef BDP_RATES_HPP
#define BDP_RATES_HPP

#include <variant>
#include <vector>

namespace bdp {

// Periodic parts. Each is defined on one period [0, T) and repeated.

struct ConstantForm {
  double value = 0.0;
};

/// mean + sum_k cos_coef[k-1] cos(2 pi k t / T) + sin_coef[k-1] sin(2 pi k t / T)
struct TrigSeriesForm {
  double mean = 0.0;
  std::vector<double> cos_coef;
  std::vector<double> sin_coef;
};

/// Linear interpolation between (knots[i], values[i]); the last segment runs
/// back to values[0] at t = T so the function is continuous and periodic.
struct PiecewiseLinearForm {
  std::vector<double> knots;
  std::vector<double> values;
};

/// values[i] on [breaks[i], breaks[i+1]), the last value up to T.
struct PiecewiseConstantForm {
  std::vector<double> breaks;
  std::vector<double> values;
};

using PeriodicForm = std::variant<ConstantForm, TrigSeriesForm,
                                  PiecewiseLinearForm, PiecewiseConstantForm>;

// Vanishing parts.

struct NoDecay {};

/// scale * exp(-rate t), rate > 0
struct ExponentialDecay {
  double scale = 0.0;
  double rate = 1.0;
};

/// scale / (1 + t)^exponent, exponent > 0
struct PowerDecay {
  double scale = 0.0;
  double exponent = 1.0;
};

using VanishingForm = std::variant<NoDecay, ExponentialDecay, PowerDecay>;

/// An asymptotically periodic basic function: periodic part plus a part that
/// vanishes at infinity. Construction rejects any configuration that goes
/// negative on a dense sample of one period plus the burn-in window.
class RateFunction {
public:
  RateFunction(PeriodicForm periodic, double period,
               VanishingForm vanishing = NoDecay{});

  static RateFunction constant(double value);
  /// mean + amplitude * sin(2 pi t / period)
  static RateFunction sinusoid(double mean, double amplitude, double period);

  /// Throws InvalidParameter for t < 0, NegativeRate for a negative value.
  double operator()(double t) const;

  double periodic_part(double t) const;
  double vanishing_part(double t) const;

  double period() const { return period_; }
  const PeriodicForm &periodic_form() const { return periodic_; }
  const VanishingForm &vanishing_form() const { return vanishing_; }

  /// (1/T) * integral of the periodic part over one period.
  double long_run_average() const;

  /// Integral over [s, t], 0 <= s <= t. Closed form for every supported form.
  double integrate(double s, double t) const;

  /// First time after which |vanishing_part| stays below `threshold`.
  double burn_in(double threshold = 1e-6) const;

  /// Jump points in (s, t] (piecewise-constant forms only), ascending.
  std::vector<double> jumps(double s, double t) const;

  /// True for a constant periodic part with no vanishing part.
  bool is_constant() const;

  /// Same shape, every value multiplied by `factor` (factor >= 0).
  RateFunction scaled(double factor) const;

private:
  double periodic_antiderivative(double t) const;
  double vanishing_antiderivative(double t) const;
  void prepare();
  void validate() const;

  PeriodicForm periodic_;
  double period_;
  VanishingForm vanishing_;
  // Integral of the periodic part from 0 to each knot/break, and over one period.
  std::vector<double> cumulative_;
  double period_area_ = 0.0;
};

/// Symbolic rate a_coef * a(t) + b_coef * b(t) + constant. Certificates store
/// their decay rates in this form so integrals reuse the closed forms above.
struct RateCombination {
  double a_coef = 0.0;
  double b_coef = 0.0;
  double constant = 0.0;

  double operator()(const RateFunction &a, const RateFunction &b,
                    double t) const;
  double integrate(const RateFunction &a, const RateFunction &b, double s,
                   double t) const;
  double mean(const RateFunction &a, const RateFunction &b) const;
  RateCombination scaled(double factor) const;
};

} // namespace bdp

#endif
