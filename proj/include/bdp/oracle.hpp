#ifndef BDP_ORACLE_HPP
#define BDP_ORACLE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bdp/model.hpp"
#include "bdp/weight_sequence.hpp"

namespace bdp {

struct OdeOptions {
  double tol = 1e-9;                    // local error per unit time, l1
  double truncation_threshold = 1e-6;   // flag level for mass in the top band
  double top_band = 0.05;               // fraction of states forming the top band
  double initial_step = 1e-3;
  double min_step = 1e-14;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<double> truncation_loss;  // per time; 0 for finite chains
  bool truncation_flagged = false;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  double max_truncation_loss() const;
  double mean(std::size_t m) const;
};

Eigen::VectorXd point_mass(std::size_t dim, std::size_t k);

/// dp/dt = A(t) p with Dormand-Prince 5(4). Probability mass is not
/// renormalised; conservation is left as a check on the caller's side.
Trajectory integrate_kolmogorov(const BirthDeathSpec &spec, const Eigen::VectorXd &p0,
                                const std::vector<double> &grid,
                                const OdeOptions &options = {});

enum class NormKind { l1, l1d, weighted_sum_q };

/// `x` is a full-length vector over states 0..N (typically p1 - p2).
double weighted_norm(const Eigen::VectorXd &x, const WeightSequence &w, NormKind kind);

/// (1/(t - t_0)) * trapezoidal integral of p over [t_0, t].
Eigen::VectorXd cesaro_average(const Trajectory &traj, double t);

/// Eigenvalues of the reduced matrix B(t).
std::vector<std::complex<double>> frozen_spectrum(const BirthDeathSpec &spec, double t);

/// Smallest -Re(nu) over the spectrum of B(t).
double spectral_gap(const BirthDeathSpec &spec, double t);

/// Detailed-balance stationary vector of the chain frozen at time t
/// (the truncated chain for infinite specs).
Eigen::VectorXd stationary_distribution(const BirthDeathSpec &spec, double t = 0.0);

/// Uniform grid of n + 1 points on [t0, t1].
std::vector<double> time_grid(double t0, double t1, std::size_t n);

} // namespace bdp

#endif
