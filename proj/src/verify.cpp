#include "bdp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>

#include "bdp/error.hpp"

namespace bdp {
namespace {

void check_order(const Eigen::VectorXd &p1, const Eigen::VectorXd &p2) {
  double tail = 0.0;
  for (Eigen::Index i = p1.size() - 1; i > 0; --i) {
    tail += p2[i] - p1[i];
    if (tail < -1e-14)
      throw Error(ErrorCode::order_violation,
                  "ordered bound needs the tail sums of p2 to dominate those of p1 (fails above state " +
                      std::to_string(i - 1) + ")");
  }
}

std::vector<Trajectory> integrate_all(const BirthDeathSpec &spec,
                                      const std::vector<Eigen::VectorXd> &starts,
                                      const std::vector<double> &grid, const OdeOptions &ode) {
  std::vector<std::future<Trajectory>> jobs;
  for (const auto &p : starts)
    jobs.push_back(std::async(std::launch::async,
                              [&spec, &grid, &ode, p] { return integrate_kolmogorov(spec, p, grid, ode); }));
  std::vector<Trajectory> out;
  for (auto &j : jobs)
    out.push_back(j.get());
  return out;
}

// Single-trajectory certificates grouped by starting state.
std::vector<VerificationReport> check_single(const std::vector<BoundCertificate> &certs,
                                             const BirthDeathSpec &spec,
                                             const WeightSequence &w,
                                             const Eigen::VectorXd &p0,
                                             const std::vector<double> &grid,
                                             const VerifyOptions &options,
                                             const std::string &check, bool abort_on_loss) {
  constexpr std::size_t no_start = std::numeric_limits<std::size_t>::max();
  std::map<std::size_t, std::size_t> slot;
  std::vector<Eigen::VectorXd> starts;
  const std::size_t dim = spec.top() + 1;
  for (const auto &c : certs) {
    const std::size_t key = c.start_state.value_or(no_start);
    if (slot.count(key))
      continue;
    slot[key] = starts.size();
    starts.push_back(key == no_start ? p0 : point_mass(dim, key));
  }
  const std::vector<Trajectory> trajs = integrate_all(spec, starts, grid, options.ode);
  if (abort_on_loss)
    for (const auto &tr : trajs)
      if (tr.truncation_flagged)
        throw Error(ErrorCode::truncation_loss,
                    "probability mass reached the top band (max " +
                        std::to_string(tr.max_truncation_loss()) +
                        "); raise the truncation level");
  std::vector<VerificationReport> out;
  for (const auto &c : certs) {
    const Trajectory &tr = trajs[slot[c.start_state.value_or(no_start)]];
    out.push_back(evaluate(c, spec, w, tr, nullptr, options.ode.tol, check));
  }
  return out;
}

} // namespace

double observe(const BoundCertificate &cert, const WeightSequence &w, const Eigen::VectorXd &p1,
               const Eigen::VectorXd *p2) {
  switch (cert.observable) {
  case Observable::l1d_difference:
    return weighted_norm(p1 - *p2, w, NormKind::l1d);
  case Observable::l1_difference:
    return (p1 - *p2).lpNorm<1>();
  case Observable::weighted_sum: {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p1.size(); ++i)
      s += w.d(static_cast<std::size_t>(i)) * p1[i];
    return s;
  }
  case Observable::state_probability:
    return p1[static_cast<Eigen::Index>(cert.index.value_or(0))];
  case Observable::cumulative_probability:
    return p1.head(static_cast<Eigen::Index>(cert.index.value_or(0) + 1)).sum();
  case Observable::mean: {
    double e = 0.0;
    for (Eigen::Index i = 0; i < p1.size(); ++i)
      e += static_cast<double>(i) * p1[i];
    return e;
  }
  }
  return 0.0;
}

double initial_term(const BoundCertificate &cert, const WeightSequence &w,
                    const Eigen::VectorXd &p1, const Eigen::VectorXd *p2) {
  switch (cert.initial) {
  case InitialTerm::observable:
    return observe(cert, w, p1, p2);
  case InitialTerm::q_weighted_difference:
    return weighted_norm(p1 - *p2, w, NormKind::weighted_sum_q);
  case InitialTerm::one:
    return 1.0;
  }
  return 1.0;
}

VerificationReport evaluate(const BoundCertificate &cert, const BirthDeathSpec &spec,
                            const WeightSequence &w, const Trajectory &first,
                            const Trajectory *second, double tol_ode,
                            const std::string &check) {
  if (cert.pair && !second)
    throw Error(ErrorCode::invalid_parameter, cert.id + " compares two trajectories");
  VerificationReport r;
  r.certificate_id = cert.id;
  r.check = check;
  r.direction = cert.direction;
  r.tol_ode = tol_ode;
  r.truncation_loss = first.max_truncation_loss();
  if (second)
    r.truncation_loss = std::max(r.truncation_loss, second->max_truncation_loss());
  r.tolerance = 100.0 * tol_ode + 10.0 * r.truncation_loss;
  if (first.truncation_flagged || (second && second->truncation_flagged))
    r.caveats.push_back("truncation loss above threshold");
  if (cert.requires_ordered)
    r.caveats.push_back("ordered initial pair: tail-sum dominance hypothesis invoked");

  const double s = first.times.front();
  const Eigen::VectorXd *q0 = second ? &second->states.front() : nullptr;
  const double init = initial_term(cert, w, first.states.front(), q0);
  r.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < first.times.size(); ++m) {
    const double t = first.times[m];
    const Eigen::VectorXd *q = second ? &second->states[m] : nullptr;
    TimeSample sample;
    sample.t = t;
    sample.lhs = observe(cert, w, first.states[m], q);
    sample.rhs = cert.envelope(spec.a(), spec.b(), s, t, init);
    sample.slack = cert.direction == BoundDirection::upper ? sample.rhs - sample.lhs
                                                           : sample.lhs - sample.rhs;
    if (sample.slack < r.min_slack) {
      r.min_slack = sample.slack;
      r.worst_time = t;
    }
    r.samples.push_back(sample);
  }
  r.pass = r.min_slack >= -r.tolerance;
  return r;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> standard_pair(const BirthDeathSpec &spec) {
  const std::size_t dim = spec.top() + 1;
  const std::size_t m = std::min<std::size_t>(10, spec.top());
  return {point_mass(dim, 0), point_mass(dim, m)};
}

VerificationReport check_decay(const BoundCertificate &cert, const BirthDeathSpec &spec,
                               const WeightSequence &w, const Eigen::VectorXd &p1,
                               const Eigen::VectorXd &p2, const std::vector<double> &grid,
                               const VerifyOptions &options) {
  const auto trajs = integrate_all(spec, {p1, p2}, grid, options.ode);
  return evaluate(cert, spec, w, trajs[0], &trajs[1], options.ode.tol, "check_decay");
}

std::vector<VerificationReport> check_two_sided(const std::vector<BoundCertificate> &certs,
                                                const BirthDeathSpec &spec,
                                                const WeightSequence &w,
                                                const Eigen::VectorXd &p1,
                                                const Eigen::VectorXd &p2,
                                                const std::vector<double> &grid,
                                                const VerifyOptions &options) {
  if (!spec.is_finite())
    throw Error(ErrorCode::requires_finite, "two-sided checks need a finite state space");
  for (const auto &c : certs)
    if (c.requires_ordered) {
      check_order(p1, p2);
      break;
    }
  const auto trajs = integrate_all(spec, {p1, p2}, grid, options.ode);
  std::vector<VerificationReport> out;
  for (const auto &c : certs)
    out.push_back(evaluate(c, spec, w, trajs[0], &trajs[1], options.ode.tol, "check_two_sided"));
  return out;
}

std::vector<VerificationReport> check_null(const std::vector<BoundCertificate> &certs,
                                           const BirthDeathSpec &spec,
                                           const WeightSequence &w,
                                           const Eigen::VectorXd &p0,
                                           const std::vector<double> &grid,
                                           const VerifyOptions &options) {
  return check_single(certs, spec, w, p0, grid, options, "check_null", true);
}

std::vector<VerificationReport> check_means_and_tails(
    const std::vector<BoundCertificate> &certs, const BirthDeathSpec &spec,
    const WeightSequence &w, const Eigen::VectorXd &p0, const std::vector<double> &grid,
    const VerifyOptions &options) {
  return check_single(certs, spec, w, p0, grid, options, "check_means_and_tails", false);
}

bool all_pass(const std::vector<VerificationReport> &reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerificationReport &r) { return r.pass; });
}

} // namespace bdp
