#include "bdp/bounds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <deque>
#include <limits>
#include <variant>

#include "bdp/error.hpp"
#include "bdp/lognorm.hpp"

namespace bdp {

const char *to_string(Shape s) {
  switch (s) {
  case Shape::exponential:
    return "exponential";
  case Shape::level:
    return "level";
  case Shape::drift:
    return "drift";
  case Shape::relaxation:
    return "relaxation";
  }
  return "?";
}

const char *to_string(BoundDirection d) {
  return d == BoundDirection::upper ? "upper" : "lower";
}

const char *to_string(Observable o) {
  switch (o) {
  case Observable::l1d_difference:
    return "l1D_difference";
  case Observable::l1_difference:
    return "l1_difference";
  case Observable::weighted_sum:
    return "weighted_sum";
  case Observable::state_probability:
    return "state_probability";
  case Observable::cumulative_probability:
    return "cumulative_probability";
  case Observable::mean:
    return "mean";
  }
  return "?";
}

const char *to_string(InitialTerm i) {
  switch (i) {
  case InitialTerm::observable:
    return "observable";
  case InitialTerm::q_weighted_difference:
    return "q_weighted_difference";
  case InitialTerm::one:
    return "one";
  }
  return "?";
}

double BoundCertificate::envelope(const RateFunction &a, const RateFunction &b, double s,
                                  double t, double initial_value) const {
  switch (shape) {
  case Shape::exponential:
    return prefactor * std::exp(-rate.integrate(a, b, s, t)) * initial_value;
  case Shape::level:
    return level;
  case Shape::drift:
    return level + rate.integrate(a, b, s, t);
  case Shape::relaxation: {
    if (t <= s)
      return level;
    auto integrand = [&](double u) {
      return source(a, b, u) * std::exp(-rate.integrate(a, b, u, t));
    };
    double err = 0.0;
    const double tail = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, s, t, 15, 1e-13, &err);
    return level * std::exp(-rate.integrate(a, b, s, t)) + tail;
  }
  }
  return 0.0;
}

BoundCertificate BoundCertificate::strengthened(double factor) const {
  BoundCertificate c = *this;
  c.id += "-strengthened";
  if (shape == Shape::exponential && direction == BoundDirection::lower)
    c.rate = rate.scaled(1.0 / factor);
  else if (shape != Shape::level)
    c.rate = rate.scaled(factor);
  c.parameters.emplace_back("strengthening_factor", factor);
  return c;
}

namespace {

// Integral of |vanishing part| over [0, inf); throws if not integrable.
double vanishing_mass(const RateFunction &f, bool positive_only) {
  return std::visit(
      [&](const auto &v) -> double {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NoDecay>) {
          return 0.0;
        } else {
          if (positive_only && v.scale <= 0.0)
            return 0.0;
          if constexpr (std::is_same_v<V, ExponentialDecay>) {
            return std::abs(v.scale) / v.rate;
          } else {
            if (v.scale == 0.0)
              return 0.0;
            if (v.exponent <= 1.0)
              throw Error(ErrorCode::hypothesis_unmet,
                          "power-law vanishing part with exponent <= 1 is not integrable");
            return std::abs(v.scale) / (v.exponent - 1.0);
          }
        }
      },
      f.vanishing_form());
}

// Range of int_0^u (periodic part - mean) over one period.
double periodic_oscillation(const RateFunction &f) {
  const int n = 10000;
  const RateFunction periodic(f.periodic_form(), f.period());
  const double T = f.period();
  const double mean = f.long_run_average();
  double lo = 0.0, hi = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double u = T * i / n;
    const double v = periodic.integrate(0.0, u) - mean * u;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

double q_constant(const BirthDeathSpec &spec, const RateCombination &rate, double eps,
                  DecayConstant &kc) {
  const RateFunction &a = spec.a();
  const double l_mean = rate.mean(spec.a(), spec.b());
  kc = decay_constant(spec, rate, eps);
  const double x = l_mean - eps;
  const double T = a.period();
  const double geo = std::exp(x * T) / std::expm1(x * T);
  const double a_bar = a.long_run_average() * std::max(1.0, T) + vanishing_mass(a, true);
  return kc.value * spec.birth(0) * a_bar * (1.0 + geo);
}

} // namespace

std::vector<BoundCertificate> weak_ergodic_certificate(const BirthDeathSpec &spec,
                                                       const WeightSequence &w,
                                                       const RateCombination &rate,
                                                       std::vector<std::string> hypotheses) {
  if (w.kind() != TransformKind::triangular)
    throw Error(ErrorCode::kind_mismatch, "weak-ergodic bounds need triangular weights");
  const double g = w.min_weight();
  if (!(g > 0.0))
    throw Error(ErrorCode::hypothesis_unmet, "g = inf d_k must be positive");
  (void)spec;
  BoundCertificate l1d;
  l1d.id = "decay-l1D";
  l1d.statement = "||p1(t)-p2(t)||_1D <= exp(-int_s^t l) ||p1(s)-p2(s)||_1D";
  l1d.rate = rate;
  l1d.hypotheses = hypotheses;
  l1d.parameters = {{"g", g}};

  BoundCertificate l1 = l1d;
  l1.id = "decay-l1";
  l1.statement = "||p1(t)-p2(t)|| <= (4/g) exp(-int_s^t l) sum_i q_i |p1_i(s)-p2_i(s)|";
  l1.observable = Observable::l1_difference;
  l1.initial = InitialTerm::q_weighted_difference;
  l1.prefactor = 4.0 / g;
  return {l1d, l1};
}

std::vector<BoundCertificate> two_sided_certificate(const BirthDeathSpec &spec,
                                                    const WeightSequence &w,
                                                    std::optional<RateCombination> rate,
                                                    std::vector<std::string> hypotheses) {
  if (!spec.is_finite())
    throw Error(ErrorCode::requires_finite, "two-sided bounds need a finite state space");
  if (w.kind() != TransformKind::triangular)
    throw Error(ErrorCode::kind_mismatch, "two-sided bounds need triangular weights");
  const LinearCoefficients alpha = linear_coefficients(spec, w, SequenceKind::alpha);
  const LinearCoefficients zeta = linear_coefficients(spec, w, SequenceKind::zeta);
  const RateCombination lower_alpha = rate ? *rate : alpha.lower();
  const RateCombination upper_alpha = alpha.upper();
  const RateCombination upper_zeta = zeta.upper();

  const double n = static_cast<double>(spec.top());
  double g = std::numeric_limits<double>::infinity(), G = 0.0;
  for (std::size_t k = 0; k < spec.top(); ++k) {
    g = std::min(g, w.d(k));
    G = std::max(G, w.d(k));
  }
  const std::vector<std::pair<std::string, double>> params = {{"g", g}, {"G", G}, {"N", n}};

  auto make = [&](std::string id, std::string statement, BoundDirection dir, Observable obs,
                  const RateCombination &r, double pref, bool ordered) {
    BoundCertificate c;
    c.id = std::move(id);
    c.statement = std::move(statement);
    c.direction = dir;
    c.observable = obs;
    c.rate = r;
    c.prefactor = pref;
    c.requires_ordered = ordered;
    c.hypotheses = hypotheses;
    c.hypotheses.push_back("finite state space");
    if (ordered)
      c.hypotheses.push_back("D(z2(s) - z1(s)) >= 0: tail sums of p2(s) dominate those of p1(s)");
    c.parameters = params;
    return c;
  };
  return {
      make("two-sided-l1D-upper", "||p1(t)-p2(t)||_1D <= exp(-int l) ||p1(s)-p2(s)||_1D",
           BoundDirection::upper, Observable::l1d_difference, lower_alpha, 1.0, false),
      make("two-sided-l1D-lower", "||p1(t)-p2(t)||_1D >= exp(-int zeta_bar) ||p1(s)-p2(s)||_1D",
           BoundDirection::lower, Observable::l1d_difference, upper_zeta, 1.0, false),
      make("two-sided-l1-upper", "||p1(t)-p2(t)|| <= (4NG/g) exp(-int alpha_low) ||p1(s)-p2(s)||",
           BoundDirection::upper, Observable::l1_difference, lower_alpha, 4.0 * n * G / g, false),
      make("two-sided-l1-lower", "||p1(t)-p2(t)|| >= (g/4NG) exp(-int zeta_bar) ||p1(s)-p2(s)||",
           BoundDirection::lower, Observable::l1_difference, upper_zeta, g / (4.0 * n * G), false),
      make("ordered-l1D-lower", "||p1(t)-p2(t)||_1D >= exp(-int alpha_bar) ||p1(s)-p2(s)||_1D",
           BoundDirection::lower, Observable::l1d_difference, upper_alpha, 1.0, true),
      make("ordered-l1-lower", "||p1(t)-p2(t)|| >= (g/4NG) exp(-int alpha_bar) ||p1(s)-p2(s)||",
           BoundDirection::lower, Observable::l1_difference, upper_alpha, g / (4.0 * n * G), true),
  };
}

std::vector<BoundCertificate> null_ergodic_certificate(
    const BirthDeathSpec &spec, const WeightSequence &w, const RateCombination &rate,
    const std::vector<std::size_t> &states, const std::vector<std::size_t> &starts,
    std::vector<std::string> hypotheses) {
  if (w.kind() != TransformKind::diagonal)
    throw Error(ErrorCode::kind_mismatch, "null-ergodic bounds need diagonal weights");
  const double G = w.max_weight();
  if (!std::isfinite(G))
    throw Error(ErrorCode::hypothesis_unmet, "G = sup d_k must be finite");
  std::vector<BoundCertificate> out;

  for (std::size_t k : starts) {
    if (k > spec.top())
      throw Error(ErrorCode::out_of_range, "start state beyond the state space");
    BoundCertificate c;
    c.id = "null-weighted-sum-from-" + std::to_string(k);
    c.statement = "sum_i d_i p_i(t) <= exp(-int_0^t theta) sum_i d_i p_i(0) (<= G exp(...))";
    c.observable = Observable::weighted_sum;
    c.initial = InitialTerm::observable;
    c.pair = false;
    c.start_state = k;
    c.rate = rate;
    c.prefactor = 1.0;
    c.hypotheses = hypotheses;
    c.parameters = {{"G", G}};
    out.push_back(c);
  }

  const std::size_t first = starts.empty() ? 0 : starts.front();
  for (std::size_t k : states) {
    BoundCertificate c;
    c.id = "null-state-" + std::to_string(k);
    c.statement = "p_k(t) <= (G/d_k) exp(-int_0^t theta)";
    c.observable = Observable::state_probability;
    c.initial = InitialTerm::one;
    c.pair = false;
    c.index = k;
    c.start_state = first;
    c.rate = rate;
    c.prefactor = G / w.d(k);
    c.hypotheses = hypotheses;
    c.parameters = {{"G", G}, {"d_k", w.d(k)}};
    out.push_back(c);
  }

  for (std::size_t k : starts) {
    for (std::size_t j : states) {
      double dmin = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i <= j; ++i)
        dmin = std::min(dmin, w.d(i));
      BoundCertificate c;
      c.id = "null-cumulative-j" + std::to_string(j) + "-from-" + std::to_string(k);
      c.statement = "Pr(X(t) <= j | X(0) = k) <= (d_k / min_{i<=j} d_i) exp(-int_0^t theta)";
      c.observable = Observable::cumulative_probability;
      c.initial = InitialTerm::one;
      c.pair = false;
      c.index = j;
      c.start_state = k;
      c.rate = rate;
      c.prefactor = w.d(k) / dmin;
      c.hypotheses = hypotheses;
      c.parameters = {{"d_k", w.d(k)}, {"d_j_min", dmin}};
      out.push_back(c);
    }
  }
  return out;
}

DecayConstant decay_constant(const BirthDeathSpec &spec, const RateCombination &rate,
                             double eps) {
  const RateFunction &a = spec.a();
  const RateFunction &b = spec.b();
  const double l_mean = rate.mean(a, b);
  if (!(eps > 0.0))
    throw Error(ErrorCode::invalid_parameter, "epsilon must be positive");
  if (eps >= l_mean)
    throw Error(ErrorCode::epsilon_too_large,
                "epsilon must be below the mean drift " + std::to_string(l_mean));
  DecayConstant out;
  if ((a.is_constant() || rate.a_coef == 0.0) && (b.is_constant() || rate.b_coef == 0.0))
    return out;  // exp(-eps (t - s)) <= 1

  double osc = 0.0;
  if (rate.a_coef != 0.0)
    osc += std::abs(rate.a_coef) * (periodic_oscillation(a) + vanishing_mass(a, false));
  if (rate.b_coef != 0.0)
    osc += std::abs(rate.b_coef) * (periodic_oscillation(b) + vanishing_mass(b, false));
  const double T = std::max(a.period(), b.period());
  out.start_span = std::max(a.burn_in(), b.burn_in()) + T;
  out.window = std::max(3.0 * T, 2.0 * osc / eps + T);

  const int n = 10000;
  const double L = out.start_span + out.window;
  const double h = L / n;
  std::vector<double> P(n + 1);
  double phi = 0.0, lip = 0.0;
  P[0] = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double u0 = h * (i - 1), u1 = h * i;
    phi += rate.integrate(a, b, u0, u1) - l_mean * h;
    P[i] = phi + eps * u1;
    lip = std::max(lip, std::abs(rate(a, b, u1) - l_mean));
  }
  const int i_start = static_cast<int>(std::floor(out.start_span / h));
  const int width = static_cast<int>(std::ceil(out.window / h));
  // sup over i <= j, i <= i_start, j - i <= width of P_i - P_j.
  double best = 0.0;
  std::deque<int> dq;
  for (int j = 0; j <= n; ++j) {
    if (j <= i_start) {
      while (!dq.empty() && P[dq.back()] <= P[j])
        dq.pop_back();
      dq.push_back(j);
    }
    while (!dq.empty() && dq.front() < j - width)
      dq.pop_front();
    if (dq.empty())
      break;
    best = std::max(best, P[dq.front()] - P[j]);
  }
  out.raw_sup = std::exp(best);
  out.value = 1.1 * std::exp(best + h * (lip + eps));
  return out;
}

std::vector<BoundCertificate> tail_certificate(const BirthDeathSpec &spec,
                                               const WeightSequence &w,
                                               const RateCombination &rate, double eps,
                                               const std::vector<std::size_t> &levels) {
  if (w.kind() != TransformKind::triangular)
    throw Error(ErrorCode::kind_mismatch, "tail bounds need triangular weights");
  DecayConstant kc;
  const double C = q_constant(spec, rate, eps, kc);
  std::vector<BoundCertificate> out;
  for (std::size_t j : levels) {
    BoundCertificate c;
    c.id = "tail-j" + std::to_string(j);
    c.statement = "Pr(X(t) <= j | X(0) = 0) >= 1 - K lambda_0 a_m (1 + e^{xT}/(e^{xT}-1)) / q_{j+1}";
    c.shape = Shape::level;
    c.direction = BoundDirection::lower;
    c.observable = Observable::cumulative_probability;
    c.initial = InitialTerm::one;
    c.pair = false;
    c.index = j;
    c.start_state = 0;
    c.rate = rate;
    c.level = 1.0 - C / w.q(j + 1);
    c.hypotheses = {"ergodic feasibility", "start in state 0"};
    c.parameters = {{"eps", eps}, {"K", kc.value}, {"K_grid_sup", kc.raw_sup},
                    {"l_mean", rate.mean(spec.a(), spec.b())}, {"C", C},
                    {"q_j+1", w.q(j + 1)}};
    out.push_back(c);
  }
  return out;
}

RateCombination mean_drift_rate(const BirthDeathSpec &spec) {
  double min_birth = std::numeric_limits<double>::infinity();
  double max_death = 0.0;
  for (std::size_t i = 0; i <= spec.top(); ++i) {
    min_birth = std::min(min_birth, spec.birth(i));
    max_death = std::max(max_death, spec.death(i));
  }
  if (!spec.is_finite()) {
    min_birth = std::min(min_birth, spec.birth_limit());
    max_death = std::max(max_death, spec.death_limit());
  }
  return {min_birth, -max_death, 0.0};
}

std::vector<BoundCertificate> mean_bounds(const BirthDeathSpec &spec,
                                          const MeanBoundRequest &request) {
  std::vector<BoundCertificate> out;
  if (request.eps) {
    if (!request.rate || !request.weights)
      throw Error(ErrorCode::hypothesis_unmet,
                  "the ergodic mean bound needs the drift rate and weights");
    const double W = request.weights->w_constant();
    if (!(W > 0.0))
      throw Error(ErrorCode::hypothesis_unmet, "W = inf q_i / i must be positive");
    DecayConstant kc;
    const double C = q_constant(spec, *request.rate, *request.eps, kc);
    BoundCertificate c;
    c.id = "mean-upper-ergodic";
    c.statement = "E(t;0) <= K lambda_0 a_m (1 + e^{xT}/(e^{xT}-1)) / W";
    c.shape = Shape::level;
    c.observable = Observable::mean;
    c.initial = InitialTerm::one;
    c.pair = false;
    c.start_state = 0;
    c.rate = *request.rate;
    c.level = C / W;
    c.hypotheses = {"ergodic feasibility", "start in state 0"};
    c.parameters = {{"eps", *request.eps}, {"K", kc.value}, {"W", W}, {"C", C}};
    out.push_back(c);
  }
  const RateCombination r = mean_drift_rate(spec);
  for (std::size_t k : request.drift_starts) {
    BoundCertificate c;
    c.id = "mean-lower-drift-from-" + std::to_string(k);
    c.statement = "E(t;k) >= k + int_0^t r, r = min(lambda_0(t), inf_i lambda_i(t) - mu_i(t))";
    c.shape = Shape::drift;
    c.direction = BoundDirection::lower;
    c.observable = Observable::mean;
    c.initial = InitialTerm::one;
    c.pair = false;
    c.start_state = k;
    c.rate = r;
    c.level = static_cast<double>(k);
    c.hypotheses = {"r(t) linearised: a(t) min_i lambda_i - b(t) max_i mu_i"};
    c.parameters = {{"r_a", r.a_coef}, {"r_b", r.b_coef}};
    out.push_back(c);
  }
  if (!request.relaxation_starts.empty()) {
    if (spec.preset() != "mmss")
      throw Error(ErrorCode::hypothesis_unmet,
                  "the relaxation mean bound is specific to the loss system");
    const double lam = spec.birth(0);
    const double mu = spec.death(1);
    for (std::size_t k : request.relaxation_starts) {
      BoundCertificate c;
      c.id = "mean-upper-loss-from-" + std::to_string(k);
      c.statement = "E(t;k) <= k e^{-int_0^t b} + int_0^t a(u) e^{-int_u^t b} du";
      c.shape = Shape::relaxation;
      c.observable = Observable::mean;
      c.initial = InitialTerm::one;
      c.pair = false;
      c.start_state = k;
      c.rate = {0.0, mu, 0.0};
      c.source = {lam, 0.0, 0.0};
      c.level = static_cast<double>(k);
      c.hypotheses = {"loss system: lambda_n = lambda (n < S), mu_n = n mu"};
      out.push_back(c);
    }
  }
  return out;
}

BoundCertificate ergodic_certificate(const BirthDeathSpec &spec, const WeightSequence &w,
                                     const RateCombination &rate) {
  if (!spec.a().is_constant() || !spec.b().is_constant())
    throw Error(ErrorCode::hypothesis_unmet,
                "a stationary distribution is only defined here for constant rates");
  std::vector<BoundCertificate> pair = weak_ergodic_certificate(spec, w, rate);
  BoundCertificate c = pair[1];
  c.id = "ergodic-l1";
  c.statement = "||p(t) - pi|| <= (4/g) exp(-int_s^t l) sum_i q_i |p_i(s) - pi_i|";
  c.hypotheses.push_back("pi: stationary distribution of the homogeneous chain");
  return c;
}

} // namespace bdp
