#include "bdp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bdp/error.hpp"

namespace bdp {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695, e4 = b4 - 393.0 / 640,
                 e5 = b5 - -92097.0 / 339200, e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

// Tridiagonal generator with rates split as lambda_i a(t), mu_i b(t).
struct Generator {
  const BirthDeathSpec &spec;
  Eigen::VectorXd lam;  // truncated births
  Eigen::VectorXd mu;

  explicit Generator(const BirthDeathSpec &s) : spec(s) {
    const auto n = static_cast<Eigen::Index>(s.top() + 1);
    lam.resize(n);
    mu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      lam[i] = s.truncated_birth(static_cast<std::size_t>(i));
      mu[i] = s.death(static_cast<std::size_t>(i));
    }
  }

  void apply(double t, const Eigen::VectorXd &p, Eigen::VectorXd &out) const {
    const double at = spec.a()(t);
    const double bt = spec.b()(t);
    const Eigen::Index n = p.size();
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = -(lam[i] * at + mu[i] * bt) * p[i];
      if (i > 0)
        v += lam[i - 1] * at * p[i - 1];
      if (i + 1 < n)
        v += mu[i + 1] * bt * p[i + 1];
      out[i] = v;
    }
  }

  double norm(double t) const {
    const double at = spec.a()(t);
    const double bt = spec.b()(t);
    return 2.0 * (lam * at + mu * bt).maxCoeff();
  }
};

double top_band_mass(const Eigen::VectorXd &p, const BirthDeathSpec &spec, double band) {
  if (spec.is_finite())
    return 0.0;
  const auto n = p.size();
  const auto width = static_cast<Eigen::Index>(std::ceil(band * static_cast<double>(n)));
  return p.tail(std::max<Eigen::Index>(width, 1)).sum();
}

} // namespace

double Trajectory::max_truncation_loss() const {
  return truncation_loss.empty() ? 0.0
                                 : *std::max_element(truncation_loss.begin(),
                                                     truncation_loss.end());
}

double Trajectory::mean(std::size_t m) const {
  const Eigen::VectorXd &p = states.at(m);
  double e = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    e += static_cast<double>(i) * p[i];
  return e;
}

Eigen::VectorXd point_mass(std::size_t dim, std::size_t k) {
  if (k >= dim)
    throw Error(ErrorCode::out_of_range, "state " + std::to_string(k) + " outside 0.." +
                                             std::to_string(dim - 1));
  Eigen::VectorXd p = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  p[static_cast<Eigen::Index>(k)] = 1.0;
  return p;
}

std::vector<double> time_grid(double t0, double t1, std::size_t n) {
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n);
  g.back() = t1;
  return g;
}

Trajectory integrate_kolmogorov(const BirthDeathSpec &spec, const Eigen::VectorXd &p0,
                                const std::vector<double> &grid, const OdeOptions &options) {
  const auto dim = static_cast<Eigen::Index>(spec.top() + 1);
  if (p0.size() != dim)
    throw Error(ErrorCode::dimension_mismatch, "initial vector has the wrong length");
  if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-12)
    throw Error(ErrorCode::invalid_parameter, "initial vector must be a probability vector");
  if (!(options.tol > 0.0))
    throw Error(ErrorCode::invalid_parameter, "tolerance must be positive");
  if (grid.empty() || grid.front() < 0.0 || !std::is_sorted(grid.begin(), grid.end()))
    throw Error(ErrorCode::invalid_parameter, "time grid must be nonempty, sorted, >= 0");

  const Generator gen(spec);
  Trajectory out;
  out.times = grid;
  out.states.reserve(grid.size());

  Eigen::VectorXd y = p0;
  double t = grid.front();
  auto record = [&](const Eigen::VectorXd &p) {
    out.states.push_back(p);
    const double loss = top_band_mass(p, spec, options.top_band);
    out.truncation_loss.push_back(loss);
    if (loss > options.truncation_threshold)
      out.truncation_flagged = true;
  };
  record(y);

  // Step boundaries: grid points plus jumps of piecewise-constant rates.
  std::vector<double> stops(grid.begin() + 1, grid.end());
  for (const RateFunction *f : {&spec.a(), &spec.b()}) {
    auto j = f->jumps(grid.front(), grid.back());
    stops.insert(stops.end(), j.begin(), j.end());
  }
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  Eigen::VectorXd k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim),
      ynew(dim), err(dim);
  double h = options.initial_step;
  std::size_t next_grid = 1;
  bool have_k1 = false;

  for (double stop : stops) {
    // Stage times on [t, stop] read rates from the left of a jump at `stop`.
    const double eval_cap = std::nextafter(stop, -std::numeric_limits<double>::infinity());
    auto f = [&](double s, const Eigen::VectorXd &p, Eigen::VectorXd &o) {
      gen.apply(std::min(s, eval_cap), p, o);
    };
    have_k1 = false;
    while (t < stop) {
      const double gen_norm = gen.norm(t);
      const double h_max = gen_norm > 0.0 ? 0.1 / gen_norm : stop - t;
      h = std::min({h, h_max, stop - t});
      if (stop - t - h < 1e-12 * std::max(1.0, stop))
        h = stop - t;
      if (h < options.min_step * std::max(1.0, t))
        throw Error(ErrorCode::step_failure, "step size underflow at t = " + std::to_string(t));

      if (!have_k1)
        f(t, y, k1);
      tmp = y + h * (a21 * k1);
      f(t + c2 * h, tmp, k2);
      tmp = y + h * (a31 * k1 + a32 * k2);
      f(t + c3 * h, tmp, k3);
      tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * h, tmp, k4);
      tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * h, tmp, k5);
      tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + h, tmp, k6);
      ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(t + h, ynew, k7);
      err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const double e = err.lpNorm<1>();
      const double allowed = options.tol * h;

      if (e <= allowed) {
        t = (h == stop - t) ? stop : t + h;
        y = ynew;
        k1 = k7;
        have_k1 = true;
        ++out.accepted_steps;
      } else {
        have_k1 = true;  // k1 still belongs to (t, y)
        ++out.rejected_steps;
      }
      const double factor =
          e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(allowed / e, 0.25), 0.2, 5.0);
      h *= factor;
    }
    while (next_grid < grid.size() && grid[next_grid] <= t) {
      record(y);
      ++next_grid;
    }
  }
  while (next_grid < grid.size()) {  // repeated grid points
    record(y);
    ++next_grid;
  }
  return out;
}

double weighted_norm(const Eigen::VectorXd &x, const WeightSequence &w, NormKind kind) {
  const auto n = static_cast<std::size_t>(x.size());
  if (n == 0)
    return 0.0;
  switch (kind) {
  case NormKind::l1:
    return x.lpNorm<1>();
  case NormKind::l1d: {
    double s = 0.0;
    if (w.kind() == TransformKind::diagonal) {
      if (w.is_finite() && w.length() < n)
        throw Error(ErrorCode::dimension_mismatch, "weights shorter than the vector");
      for (std::size_t i = 0; i < n; ++i)
        s += w.d(i) * std::abs(x[static_cast<Eigen::Index>(i)]);
      return s;
    }
    if (w.is_finite() && w.length() < n - 1)
      throw Error(ErrorCode::dimension_mismatch, "weights shorter than the reduced vector");
    double tail = 0.0;  // sum_{i > k} x_i
    std::vector<double> tails(n, 0.0);
    for (std::size_t i = n - 1; i > 0; --i) {
      tail += x[static_cast<Eigen::Index>(i)];
      tails[i - 1] = tail;
    }
    for (std::size_t k = 0; k + 1 < n; ++k)
      s += w.d(k) * std::abs(tails[k]);
    return s;
  }
  case NormKind::weighted_sum_q: {
    if (w.is_finite() && w.length() < n - 1)
      throw Error(ErrorCode::dimension_mismatch, "weights shorter than the reduced vector");
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i)
      s += w.q(i) * std::abs(x[static_cast<Eigen::Index>(i)]);
    return s;
  }
  }
  return 0.0;
}

Eigen::VectorXd cesaro_average(const Trajectory &traj, double t) {
  if (traj.times.empty())
    throw Error(ErrorCode::out_of_range, "empty trajectory");
  const double t0 = traj.times.front();
  if (t < t0 || t > traj.times.back())
    throw Error(ErrorCode::out_of_range, "time outside the trajectory span");
  if (t == t0)
    return traj.states.front();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(traj.states.front().size());
  for (std::size_t m = 1; m < traj.times.size(); ++m) {
    const double lo = traj.times[m - 1];
    const double hi = traj.times[m];
    if (lo >= t)
      break;
    if (hi <= t) {
      acc += 0.5 * (hi - lo) * (traj.states[m - 1] + traj.states[m]);
    } else {
      const double w = (t - lo) / (hi - lo);
      const Eigen::VectorXd pt = (1.0 - w) * traj.states[m - 1] + w * traj.states[m];
      acc += 0.5 * (t - lo) * (traj.states[m - 1] + pt);
    }
  }
  return acc / (t - t0);
}

std::vector<std::complex<double>> frozen_spectrum(const BirthDeathSpec &spec, double t) {
  const Eigen::MatrixXd A = build_A(spec, t).values;
  const Eigen::Index n = A.rows();
  bool symmetrizable = true;
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(A(i + 1, i) > 0.0) || !(A(i, i + 1) > 0.0))
      symmetrizable = false;

  std::vector<std::complex<double>> out;
  if (symmetrizable && n > 1) {
    // A is similar to a symmetric tridiagonal matrix; spec(B) = spec(A) \ {0}.
    Eigen::VectorXd diag = A.diagonal();
    Eigen::VectorXd off(n - 1);
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      off[i] = std::sqrt(A(i + 1, i) * A(i, i + 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    Eigen::Index zero = 0;
    ev.cwiseAbs().minCoeff(&zero);
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != zero)
        out.emplace_back(ev[i], 0.0);
    return out;
  }
  const ReducedSystem r = build_B(spec, t);
  Eigen::EigenSolver<Eigen::MatrixXd> es(r.B, false);
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    out.push_back(es.eigenvalues()[i]);
  return out;
}

double spectral_gap(const BirthDeathSpec &spec, double t) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto &nu : frozen_spectrum(spec, t))
    gap = std::min(gap, -nu.real());
  return gap;
}

Eigen::VectorXd stationary_distribution(const BirthDeathSpec &spec, double t) {
  const double at = spec.a()(t);
  const double bt = spec.b()(t);
  const auto n = static_cast<Eigen::Index>(spec.top() + 1);
  Eigen::VectorXd logp(n);
  logp[0] = 0.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double up = spec.birth(static_cast<std::size_t>(i - 1)) * at;
    const double down = spec.death(static_cast<std::size_t>(i)) * bt;
    if (!(up > 0.0) || !(down > 0.0))
      throw Error(ErrorCode::hypothesis_unmet,
                  "detailed balance needs positive frozen rates");
    logp[i] = logp[i - 1] + std::log(up) - std::log(down);
  }
  const double top = logp.maxCoeff();
  Eigen::VectorXd p = (logp.array() - top).exp();
  return p / p.sum();
}

} // namespace bdp
