#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mgf/systems.hpp"

namespace mgf {

enum class Scheme { ImplicitEuler, TRBDF2 };

struct IntegratorConfig {
  Scheme scheme = Scheme::TRBDF2;
  double t_end = 40.0;
  double rtol = 1e-8;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0: chosen from the initial slope
  double max_step = 0.0;      // 0: unbounded
  double fixed_step = 0.0;    // > 0 disables error control
  std::vector<double> output_times;  // sorted, within [0, t_end]; empty: {0, t_end}
  long max_steps = 10'000'000;
};

struct IntegratorStats {
  long accepted = 0;
  long rejected = 0;
  long factorizations = 0;
};

// States are stored column-wise, one column per output time.
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;
  IntegratorStats stats;

  std::size_t size() const { return times.size(); }
  Eigen::VectorXd state(std::size_t i) const { return states.col(static_cast<Index>(i)); }
};

std::vector<double> uniform_grid(double t_end, std::size_t count);
// Uniform grid merged with log-spaced points in [t_first, first uniform spacing), sorted.
std::vector<double> graded_grid(double t_end, std::size_t uniform_count, std::size_t log_count, double t_first);

// Integrates d gamma/dt = A gamma. The step sequence lands on every output time, so
// outputs are step endpoints and need no interpolation.
Trajectory integrate(const DiscreteSystem& sys, const Eigen::VectorXd& gamma0, const IntegratorConfig& cfg);

struct SweepResult {
  Trajectory trajectory;  // the tighter run
  double discrepancy = 0.0;
};

SweepResult resolve_with_tolerance_sweep(const DiscreteSystem& sys, const Eigen::VectorXd& gamma0,
                                         const IntegratorConfig& cfg, double factor);

}  // namespace mgf
