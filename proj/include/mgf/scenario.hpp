#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "mgf/functionals.hpp"
#include "mgf/graph.hpp"
#include "mgf/integrator.hpp"
#include "mgf/reference.hpp"
#include "mgf/systems.hpp"

namespace mgf {

struct EdgeProfile {
  enum class Kind { Ramp, Const };
  Kind kind = Kind::Ramp;
  double value = 1.0;
  bool per_n = false;  // Const value divided by n
};

struct InitialSpec {
  enum class Kind { Uniform, Ramp, Stationary };
  Kind kind = Kind::Uniform;
  std::vector<double> vertex_densities;
  std::vector<EdgeProfile> edge_profiles;  // one per edge for Ramp
  bool normalize = true;
};

enum class SystemChoice { Prelimit, KirchhoffLimit, FastEdge, Combinatorial };

struct ComparisonSpec {
  std::string name;
  Regime regime = Regime::Kirchhoff;
  SystemChoice prelimit = SystemChoice::Prelimit;
  SystemChoice limit = SystemChoice::KirchhoffLimit;
  std::string map = "kirchhoff";  // kirchhoff | fast-edge | vertex | identity
  KirchhoffRateScaling kirchhoff_rates = KirchhoffRateScaling::DetailedBalance;
};

struct GridSpec {
  std::size_t uniform = 2001;
  std::size_t log_points = 0;
  double t_first = 1e-6;
};

struct Scenario {
  std::string name;
  MetricGraph graph;
  ReferenceMeasure measure;
  std::vector<std::array<double, 2>> kappa;
  EndpointEval endpoint = EndpointEval::Continuum;
  Eigen::VectorXd d;
  int n = 100;

  Regime regime = Regime::Unscaled;
  std::vector<double> eps{1.0};
  SystemChoice system = SystemChoice::Prelimit;
  KirchhoffRateScaling kirchhoff_rates = KirchhoffRateScaling::DetailedBalance;
  PrelimitOptions prelimit;

  InitialSpec initial;
  double t_end = 40.0;
  IntegratorConfig integrator;  // output_times filled by output_grid()
  GridSpec grid;
  CellWeight cell_weight = CellWeight::Literal;
  double edp_tolerance = 1e-3;

  std::vector<ComparisonSpec> comparisons;
  std::vector<Regime> sweep_regimes;
  std::vector<int> joint_n;
  std::vector<double> joint_eps;

  nlohmann::json source;

  RateSpec base_rates() const;
  std::vector<double> output_grid() const;
  IntegratorConfig integrator_config() const;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);

// Resolves a scenario path: as given, else relative to $MGF_SEED_DIR; empty path -> $MGF_SEED_DIR/triangle.json.
std::string resolve_scenario_path(const std::string& path);

Regime parse_regime(const std::string& s);
SystemChoice parse_system(const std::string& s);
const char* system_choice_name(SystemChoice s);
CellWeight parse_cell_weight(const std::string& s);

}  // namespace mgf
