#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mgf/error.hpp"
#include "mgf/experiments.hpp"
#include "mgf/output.hpp"
#include "test_util.hpp"

using namespace mgf;
namespace fs = std::filesystem;

namespace {

const Scenario& table_scenario() {
  static const Scenario s = load_scenario(test::scenario_path("triangle_table.json"));
  return s;
}

Errc parse_error(const nlohmann::json& j) {
  try {
    parse_scenario(j);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::InvalidConfig;  // no error: never the expected code below
}

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mgf_test_" + name);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IntegratorConfig short_run(double t_end, std::size_t points) {
  IntegratorConfig cfg;
  cfg.t_end = t_end;
  cfg.output_times = uniform_grid(t_end, points);
  return cfg;
}

}  // namespace

TEST(Scenario, TriangleSetup) {
  const Scenario& s = test::triangle();
  EXPECT_EQ(s.graph.num_vertices(), 3u);
  EXPECT_EQ(s.graph.num_edges(), 3u);
  EXPECT_NEAR(s.measure.Z, 67.0 / 15.0, 1e-12);
  EXPECT_EQ(s.n, 100);
  EXPECT_EQ(s.eps, (std::vector<double>{1.0, 0.1, 0.01, 0.001}));
  for (std::size_t e = 0; e < 3; ++e) {
    EXPECT_EQ(s.graph.edge(e).length, 1.0);
    EXPECT_EQ(s.d[static_cast<Index>(e)], 1.0);
    EXPECT_EQ(s.kappa[e][0], 1.0);
  }
  EXPECT_EQ(s.t_end, 40.0);
  EXPECT_EQ(table_scenario().comparisons.size(), 3u);
}

TEST(Scenario, ParseErrors) {
  const nlohmann::json base = test::triangle().source;
  EXPECT_NO_THROW(parse_scenario(base));

  nlohmann::json j = base;
  j["eps"] = {0.1, 1.0};
  EXPECT_EQ(parse_error(j), Errc::ConfigError);
  j["eps"] = {1.0, 0.0};
  EXPECT_EQ(parse_error(j), Errc::NonPositiveEpsilon);

  j = base;
  j["graph"]["edges"][0]["head"] = "v9";
  EXPECT_EQ(parse_error(j), Errc::UnknownVertex);

  j = base;
  j["regime"] = "sideways";
  EXPECT_EQ(parse_error(j), Errc::ConfigError);

  j = base;
  j.erase("graph");
  EXPECT_EQ(parse_error(j), Errc::ConfigError);

  j = base;
  j["reference"]["edge_densities"]["e1"] = {{"kind", "poly"}, {"coeffs", {-1.0}}};
  EXPECT_EQ(parse_error(j), Errc::NonPositiveDensity);

  EXPECT_THROW(load_scenario("/nonexistent/scenario.json"), Error);
}

TEST(Scenario, SeedDirectoryResolution) {
  const std::string dir = MGF_SCENARIO_DIR;
  ::setenv("MGF_SEED_DIR", dir.c_str(), 1);
  EXPECT_EQ(resolve_scenario_path(""), (fs::path(dir) / "triangle.json").string());
  EXPECT_EQ(resolve_scenario_path("triangle_edp.json"), (fs::path(dir) / "triangle_edp.json").string());
  EXPECT_NO_THROW(load_scenario(resolve_scenario_path("")));
  ::unsetenv("MGF_SEED_DIR");
  EXPECT_THROW(resolve_scenario_path(""), Error);
}

TEST(Experiments, UniformInitialMasses) {
  const Scenario& s = test::triangle();
  const DiscreteSystem p = build_system(s, SystemChoice::Prelimit, make_regime(Regime::Unscaled, 1.0), 100);
  const Eigen::VectorXd g = initial_state(s, p);
  for (std::size_t v = 0; v < 3; ++v) EXPECT_NEAR(g[p.layout().vertex_slot[v]], 1.0 / 6, 1e-15);
  for (std::size_t e = 0; e < 3; ++e)
    for (int k = 1; k <= 100; ++k) EXPECT_NEAR(g[p.layout().cell(e, k)], 1.0 / 600, 1e-16);
  EXPECT_NEAR(total_mass(g), 1.0, 1e-14);

  for (SystemChoice c : {SystemChoice::KirchhoffLimit, SystemChoice::FastEdge, SystemChoice::Combinatorial}) {
    const DiscreteSystem sys = build_system(s, c, make_regime(Regime::Unscaled, 1.0), 100);
    EXPECT_NEAR(total_mass(initial_state(s, sys)), 1.0, 1e-14) << system_choice_name(c);
  }
}

TEST(Experiments, RampDensities) {
  const DensityField f = density_field(table_scenario(), 10);
  EXPECT_EQ(f.vertex, Eigen::Vector3d(0, 1, 1));
  for (int k = 1; k <= 10; ++k) {
    EXPECT_NEAR(f.cells[0][k - 1], k / 10.0, 1e-15);
    EXPECT_NEAR(f.cells[1][k - 1], 1 / 10.0, 1e-15);
    EXPECT_NEAR(f.cells[2][k - 1], 1 - k / 10.0, 1e-15);
  }
  EXPECT_THROW(density_field(test::triangle(), 10), Error);
}

TEST(ExperimentsProperty, WellPreparedKirchhoffInterior) {
  Scenario s = table_scenario();
  for (bool normalize : {false, true}) {
    s.initial.normalize = normalize;
    for (double eps : {1.0, 0.01}) {
      const DiscreteSystem p = build_system(s, SystemChoice::Prelimit, make_regime(Regime::Kirchhoff, eps), 50);
      const DiscreteSystem k = build_system(s, SystemChoice::KirchhoffLimit, make_regime(Regime::Kirchhoff, eps), 50);
      const Eigen::VectorXd up = p.density(initial_state(s, p)), uk = k.density(initial_state(s, k));
      // Interior densities agree; normalisation rescales each system by its own total mass.
      const double ratio = uk[k.layout().cell(0, 25)] / up[p.layout().cell(0, 25)];
      if (!normalize) EXPECT_NEAR(ratio, 1.0, 1e-14);
      for (std::size_t e = 0; e < 3; ++e)
        for (int c = 2; c <= 49; ++c) {
          const double a = up[p.layout().cell(e, c)], b = uk[k.layout().cell(e, c)];
          EXPECT_NEAR(b, ratio * a, 1e-12 * std::max(b, 1e-3)) << "e=" << e << " k=" << c;
        }
      for (std::size_t v = 0; v < 3; ++v)
        EXPECT_NEAR(uk[k.layout().vertex_slot[v]], ratio * up[p.layout().vertex_slot[v]], 1e-12);
    }
  }
}

TEST(Experiments, StationaryRunHasFlatEntropy) {
  Scenario s = test::triangle();
  s.initial.kind = InitialSpec::Kind::Stationary;
  const RunResult r = run_system(s, SystemChoice::Prelimit, make_regime(Regime::Unscaled, 1.0), 20, short_run(2, 21));
  const CsvTable t = entropy_table(*r.system, r.trajectory);
  for (double h : t.columns[1]) EXPECT_LE(std::abs(h), 1e-15);
  const EdpResult e = edp_check(*r.system, r.trajectory, 1e-3);
  // Integrated, so only round-off separates the states from the reference.
  EXPECT_LE(std::abs(e.report.L_n), 1e-20);
  EXPECT_TRUE(e.pass);
}

TEST(Experiments, UniformEntropyDecaysToZero) {
  const Scenario& s = test::triangle();
  const RunResult r = run_system(s, SystemChoice::Prelimit, make_regime(Regime::Unscaled, 1.0), s.n,
                                 s.integrator_config());
  const CsvTable t = entropy_table(*r.system, r.trajectory);
  const std::vector<double>& h = t.columns[1];
  EXPECT_GT(h.front(), 0.1);
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i - 1] > 1e-10) EXPECT_LT(h[i], h[i - 1]) << "t=" << t.columns[0][i];
  EXPECT_LT(h.back(), 1e-10);
}

TEST(Experiments, KirchhoffBoundaryLayer) {
  // Vertex mass at eps = 0.001 is O(eps) and relaxes to the adjacent edge densities long
  // before the edges equilibrate.
  const Scenario& s = test::triangle();
  IntegratorConfig cfg = short_run(4.0, 401);
  cfg.output_times = graded_grid(4.0, 401, 100, 1e-8);
  const RunResult r = run_system(s, SystemChoice::Prelimit, make_regime(Regime::Kirchhoff, 0.001), 100, cfg);
  const DiscreteSystem& sys = *r.system;
  const Index v1 = sys.layout().vertex_slot[0];
  const Eigen::VectorXd u0 = sys.density(r.trajectory.state(0));
  const Eigen::VectorXd uend = sys.density(r.trajectory.state(r.trajectory.size() - 1));
  std::size_t i_fast = 0;
  while (r.trajectory.times[i_fast] < 1e-3) ++i_fast;
  const Eigen::VectorXd ufast = sys.density(r.trajectory.state(i_fast));
  const double total_change = std::abs(uend[v1] - u0[v1]);
  EXPECT_GT(total_change, 0.1);
  EXPECT_GT(std::abs(ufast[v1] - u0[v1]), 0.5 * total_change);
}

TEST(Experiments, DeterministicRuns) {
  const Scenario& s = table_scenario();
  const ScalingRegime reg = make_regime(Regime::Joint, 1e-3);
  const RunResult a = run_system(s, SystemChoice::Prelimit, reg, 50, short_run(1, 51));
  const RunResult b = run_system(s, SystemChoice::Prelimit, reg, 50, short_run(1, 51));
  EXPECT_TRUE(a.trajectory.states == b.trajectory.states);
  const fs::path dir = temp_dir("determinism");
  write_csv((dir / "a.csv").string(), states_table(s.graph, *a.system, a.trajectory));
  write_csv((dir / "b.csv").string(), states_table(s.graph, *b.system, b.trajectory));
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
}

TEST(Experiments, SelfComparisonIsZero) {
  const Scenario& s = table_scenario();
  const RunResult r = run_system(s, SystemChoice::Prelimit, make_regime(Regime::Unscaled, 1.0), 20, short_run(1, 21));
  EXPECT_EQ(hellinger(*r.system, r.trajectory, *r.system, r.trajectory, identity_map(*r.system)), 0.0);
  EXPECT_EQ(make_map("identity", *r.system, *r.system).pairs.size(), static_cast<std::size_t>(r.system->dim()));
  EXPECT_THROW(make_map("diagonal", *r.system, *r.system), Error);
}

TEST(Experiments, ParallelForPropagatesFailure) {
  std::vector<int> hit(16, 0);
  parallel_for(16, 4, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 16);
  EXPECT_THROW(parallel_for(8, 3,
                            [](std::size_t i) {
                              if (i == 5) throw Error(Errc::StepUnderflow, "boom");
                            }),
               Error);
}

TEST(ExperimentsProperty, TableRowsDecreaseInEps) {
  const TableResult t = table_hellinger(table_scenario(), 4);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const TableRow& row : t.rows) {
    ASSERT_EQ(row.cells.size(), 4u);
    for (std::size_t i = 1; i < row.cells.size(); ++i) {
      EXPECT_LT(row.cells[i].eps, row.cells[i - 1].eps);
      EXPECT_LT(row.cells[i].literal, row.cells[i - 1].literal) << row.name;
      EXPECT_LT(row.cells[i].per_cell, row.cells[i - 1].per_cell) << row.name;
    }
  }
}

TEST(Experiments, SyntheticSlopeFit) {
  std::vector<double> n{50, 100, 200, 400}, h;
  for (double x : n) h.push_back(0.37 / x);
  EXPECT_NEAR(loglog_slope(n, h), -1.0, 1e-9);
}

TEST(Output, NumberFormat) {
  EXPECT_EQ(format_number(0.1), "0.10000000000000001");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(std::stod(format_number(1.0 / 3)), 1.0 / 3);
}

TEST(Output, CsvRoundTrip) {
  const fs::path dir = temp_dir("csv");
  CsvTable t{{"t", "a", "b"}, {{0.0, 0.5, 1.0}, {1.0 / 3, 2e-300, -4.5}, {1e10, 0.1, 7.0}}};
  write_csv((dir / "t.csv").string(), t);
  const CsvTable r = read_csv((dir / "t.csv").string());
  EXPECT_EQ(r.header, t.header);
  EXPECT_EQ(r.columns, t.columns);

  std::ofstream((dir / "empty.csv").string()).close();
  try {
    read_csv((dir / "empty.csv").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MalformedCsv);
  }
  std::ofstream((dir / "bad.csv").string()) << "t,a\n0,x\n";
  EXPECT_THROW(read_csv((dir / "bad.csv").string()), Error);
  EXPECT_THROW(read_csv((dir / "missing.csv").string()), Error);
}

TEST(Output, SvgLegendAndAxes) {
  CsvTable t{{"t", "eps=1", "eps=0.1"}, {{0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.25, 0.125}, {1.0, 0.1, 0.01, 0.001}}};
  PlotOptions opt;
  opt.log_y = true;
  opt.title = "entropies";
  const std::string svg = render_svg(t, opt);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("eps=1"), std::string::npos);
  EXPECT_NE(svg.find("eps=0.1"), std::string::npos);
  EXPECT_NE(svg.find("entropies"), std::string::npos);
  EXPECT_EQ(std::count(svg.begin(), svg.end(), '\n') > 0, true);
  std::size_t polylines = 0;
  for (std::size_t p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);

  const fs::path dir = temp_dir("svg");
  write_csv((dir / "e.csv").string(), t);
  plot_csv((dir / "e.csv").string(), (dir / "e.svg").string(), opt);
  EXPECT_TRUE(fs::exists(dir / "e.svg"));
  CsvTable lone{{"t"}, {{0.0, 1.0}}};
  EXPECT_THROW(render_svg(lone, opt), Error);
}

TEST(Output, LayoutJson) {
  const Scenario& s = test::triangle();
  const DiscreteSystem k = build_system(s, SystemChoice::KirchhoffLimit, make_regime(Regime::Kirchhoff, 1.0), 10);
  const nlohmann::json j = layout_json(s.graph, k);
  EXPECT_EQ(j.dump().find("patch") != std::string::npos, true);
}
