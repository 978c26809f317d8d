#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mgf/functionals.hpp"
#include "mgf/integrator.hpp"
#include "mgf/scenario.hpp"

namespace mgf {

ScalingRegime make_regime(Regime tag, double eps, KirchhoffRateScaling k = KirchhoffRateScaling::DetailedBalance);

// Prelimit and FastEdge systems take the scaled parameters; the Kirchhoff and
// combinatorial limits are eps-free and built from the base measure.
DiscreteSystem build_system(const Scenario& s, SystemChoice choice, const ScalingRegime& regime, int n);

// Vertex densities and per-edge cell densities at resolution n.
struct DensityField {
  Eigen::VectorXd vertex;
  std::vector<Eigen::VectorXd> cells;
};
DensityField density_field(const Scenario& s, int n);

// Initial masses for sys from the scenario's initial-data block.
Eigen::VectorXd initial_state(const Scenario& s, const DiscreteSystem& sys);

struct RunResult {
  std::string label;
  Regime regime = Regime::Unscaled;
  double eps = 1.0;
  SystemChoice choice = SystemChoice::Prelimit;
  int n = 0;
  std::shared_ptr<const DiscreteSystem> system;
  Trajectory trajectory;
  double seconds = 0.0;
};

RunResult run_system(const Scenario& s, SystemChoice choice, const ScalingRegime& regime, int n,
                     const IntegratorConfig& cfg);

// Runs f(i) for i in [0, count) on at most `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& f);

ComparisonMap make_map(const std::string& name, const DiscreteSystem& a, const DiscreteSystem& b);

struct TableCell {
  double eps = 1.0;
  double literal = 0.0;
  double per_cell = 0.0;
};

struct TableRow {
  std::string name;
  Regime regime = Regime::Unscaled;
  std::vector<TableCell> cells;
};

struct TableResult {
  std::vector<TableRow> rows;
  std::vector<RunResult> runs;  // every trajectory that entered the table
};

TableResult table_hellinger(const Scenario& s, int jobs);

struct JointStudy {
  std::vector<int> n;
  std::vector<double> eps;
  Eigen::MatrixXd H;  // rows: n, columns: eps
  double slope = 0.0;  // log H vs log n at the smallest eps
};

JointStudy joint_limit_study(const Scenario& s, int jobs);

// Prelimit runs for every regime/eps of the sweep plus the limit systems.
std::vector<RunResult> entropy_sweep(const Scenario& s, int jobs);

struct EdpResult {
  FunctionalReport report;
  double threshold = 0.0;
  bool pass = false;
};

EdpResult edp_check(const DiscreteSystem& sys, const Trajectory& traj, double tol);

// Reverses the time order of the states (a curve that is not a solution).
Trajectory reversed_states(const Trajectory& t);

}  // namespace mgf
