#ifndef BDP_VERIFY_HPP
#define BDP_VERIFY_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bdp/bounds.hpp"
#include "bdp/model.hpp"
#include "bdp/oracle.hpp"
#include "bdp/weight_sequence.hpp"

namespace bdp {

struct TimeSample {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs for upper bounds, lhs - rhs for lower
};

struct VerificationReport {
  std::string certificate_id;
  std::string check;
  BoundDirection direction = BoundDirection::upper;
  std::vector<TimeSample> samples;
  double min_slack = 0.0;
  double worst_time = 0.0;
  double tol_ode = 0.0;
  double truncation_loss = 0.0;
  double tolerance = 0.0;  // 100 tol_ode + 10 truncation_loss
  bool pass = false;
  std::vector<std::string> caveats;
};

struct VerifyOptions {
  OdeOptions ode;
};

/// The initial pair (delta_0, delta_m), m = min(10, N).
std::pair<Eigen::VectorXd, Eigen::VectorXd> standard_pair(const BirthDeathSpec &spec);

VerificationReport check_decay(const BoundCertificate &cert, const BirthDeathSpec &spec,
                               const WeightSequence &w, const Eigen::VectorXd &p1,
                               const Eigen::VectorXd &p2, const std::vector<double> &grid,
                               const VerifyOptions &options = {});

/// Throws OrderViolation when an ordered bound is given a pair whose
/// transformed difference D(z2 - z1) is not nonnegative.
std::vector<VerificationReport> check_two_sided(const std::vector<BoundCertificate> &certs,
                                                const BirthDeathSpec &spec,
                                                const WeightSequence &w,
                                                const Eigen::VectorXd &p1,
                                                const Eigen::VectorXd &p2,
                                                const std::vector<double> &grid,
                                                const VerifyOptions &options = {});

/// Single-trajectory null bounds; each certificate starts from its own
/// start state (or `p0` when it has none). Throws TruncationLoss when mass
/// reaches the top band.
std::vector<VerificationReport> check_null(const std::vector<BoundCertificate> &certs,
                                           const BirthDeathSpec &spec,
                                           const WeightSequence &w,
                                           const Eigen::VectorXd &p0,
                                           const std::vector<double> &grid,
                                           const VerifyOptions &options = {});

std::vector<VerificationReport> check_means_and_tails(
    const std::vector<BoundCertificate> &certs, const BirthDeathSpec &spec,
    const WeightSequence &w, const Eigen::VectorXd &p0, const std::vector<double> &grid,
    const VerifyOptions &options = {});

bool all_pass(const std::vector<VerificationReport> &reports);

/// The certificate's observable and initial term at one instant.
double observe(const BoundCertificate &cert, const WeightSequence &w, const Eigen::VectorXd &p1,
               const Eigen::VectorXd *p2 = nullptr);
double initial_term(const BoundCertificate &cert, const WeightSequence &w,
                    const Eigen::VectorXd &p1, const Eigen::VectorXd *p2 = nullptr);

/// Evaluates a certificate against precomputed trajectories (the second is
/// ignored for single-trajectory bounds).
VerificationReport evaluate(const BoundCertificate &cert, const BirthDeathSpec &spec,
                            const WeightSequence &w, const Trajectory &first,
                            const Trajectory *second, double tol_ode,
                            const std::string &check);

} // namespace bdp

#endif
