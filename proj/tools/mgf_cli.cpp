// Command line front end: simulate, table-hellinger, entropy-sweep, joint-limit, edp-check, plot.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mgf/error.hpp"
#include "mgf/experiments.hpp"
#include "mgf/output.hpp"
#include "mgf/scenario.hpp"

namespace fs = std::filesystem;
using namespace mgf;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitAcceptance = 4;

struct CommonFlags {
  std::string scenario;
  std::string out = "out";
  int jobs = 1;
  std::optional<double> rtol, atol, t_end;
  std::optional<std::size_t> grid;
  std::optional<std::string> cell_weight;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--scenario", f.scenario, "scenario JSON (default: $MGF_SEED_DIR/triangle.json)");
  app->add_option("--out", f.out, "output directory");
  app->add_option("--jobs", f.jobs, "parallel runs")->check(CLI::PositiveNumber);
  app->add_option("--rtol", f.rtol, "relative tolerance");
  app->add_option("--atol", f.atol, "absolute tolerance");
  app->add_option("--t-end", f.t_end, "final time");
  app->add_option("--grid", f.grid, "number of uniform output points");
  app->add_option("--hellinger-cell-weight", f.cell_weight, "literal | per-cell")
      ->check(CLI::IsMember({"literal", "per-cell"}));
}

Scenario load(const CommonFlags& f) {
  Scenario s = load_scenario(resolve_scenario_path(f.scenario));
  if (f.rtol) s.integrator.rtol = *f.rtol;
  if (f.atol) s.integrator.atol = *f.atol;
  if (f.t_end) s.t_end = *f.t_end;
  if (f.grid) s.grid.uniform = *f.grid;
  if (f.cell_weight) s.cell_weight = parse_cell_weight(*f.cell_weight);
  fs::create_directories(f.out);
  return s;
}

std::string hash_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

void write_json(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

std::string entry_text(double v) {
  if (v <= 1e-9) return "< 1e-9 (below solver floor)";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

int cmd_simulate(const CommonFlags& f) {
  const Scenario s = load(f);
  const std::vector<double> eps = s.regime == Regime::Unscaled ? std::vector<double>{1.0} : s.eps;
  const IntegratorConfig cfg = s.integrator_config();
  std::vector<RunResult> runs(eps.size());
  parallel_for(eps.size(), f.jobs, [&](std::size_t i) {
    runs[i] = run_system(s, s.system, make_regime(s.regime, eps[i], s.kirchhoff_rates), s.n, cfg);
  });
  nlohmann::json record{{"scenario", s.name}, {"scenario_hash", hash_hex(s.source.dump())}, {"runs", nlohmann::json::array()}};
  for (const RunResult& r : runs) {
    const std::string stem = (fs::path(f.out) / (s.name + "_" + system_choice_name(r.choice) + "_" +
                                                 regime_name(r.regime) + "_eps" + eps_tag(r.eps)))
                                 .string();
    write_csv(stem + "_states.csv", states_table(s.graph, *r.system, r.trajectory));
    write_csv(stem + "_entropy.csv", entropy_table(*r.system, r.trajectory));
    const Eigen::VectorXd mass = r.trajectory.states.colwise().sum().transpose();
    nlohmann::json meta{{"label", r.label},
                        {"regime", regime_name(r.regime)},
                        {"eps", r.eps},
                        {"layout", layout_json(s.graph, *r.system)},
                        {"mass_drift", (mass.array() - mass[0]).abs().maxCoeff()},
                        {"steps_accepted", r.trajectory.stats.accepted},
                        {"steps_rejected", r.trajectory.stats.rejected},
                        {"wall_seconds", r.seconds}};
    write_json(stem + "_meta.json", meta);
    record["runs"].push_back({{"label", r.label}, {"states", stem + "_states.csv"}, {"entropy", stem + "_entropy.csv"}});
    std::cout << r.label << ": final entropy " << entry_text(relative_entropy(*r.system, r.trajectory.state(r.trajectory.size() - 1)))
              << ", " << r.trajectory.stats.accepted << " steps\n";
  }
  write_json((fs::path(f.out) / (s.name + "_run.json")).string(), record);
  return 0;
}

int cmd_table(const CommonFlags& f) {
  const Scenario s = load(f);
  const TableResult t = table_hellinger(s, f.jobs);
  const std::string path = (fs::path(f.out) / (s.name + "_hellinger_table.csv")).string();
  std::ofstream csv(path);
  csv << "regime,eps,literal,per_cell\n";
  std::printf("%-16s", "regime \\ eps");
  for (double e : s.eps) std::printf("%-30s", eps_tag(e).c_str());
  std::printf("\n");
  for (const TableRow& row : t.rows) {
    std::printf("%-16s", row.name.c_str());
    for (const TableCell& c : row.cells) {
      csv << row.name << "," << format_number(c.eps) << "," << format_number(c.literal) << ","
          << format_number(c.per_cell) << "\n";
      std::printf("%-30s", entry_text(s.cell_weight == CellWeight::Literal ? c.literal : c.per_cell).c_str());
    }
    std::printf("\n");
  }
  std::cout << "cell weighting: " << (s.cell_weight == CellWeight::Literal ? "literal" : "per-cell") << "; csv: " << path
            << "\n";
  return 0;
}

int cmd_entropy_sweep(const CommonFlags& f) {
  const Scenario s = load(f);
  const std::vector<RunResult> runs = entropy_sweep(s, f.jobs);
  std::map<std::string, CsvTable> tables;
  for (const RunResult& r : runs) {
    const std::string key = r.choice == SystemChoice::Prelimit ? regime_name(r.regime) : "limits";
    CsvTable& t = tables[key];
    if (t.header.empty()) {
      t.header.push_back("t");
      t.columns.push_back(r.trajectory.times);
    }
    t.header.push_back(r.choice == SystemChoice::Prelimit ? "eps=" + eps_tag(r.eps) : system_choice_name(r.choice));
    t.columns.push_back(entropy_table(*r.system, r.trajectory).columns[1]);
  }
  for (const auto& [key, t] : tables) {
    const std::string stem = (fs::path(f.out) / (s.name + "_entropy_" + key)).string();
    write_csv(stem + ".csv", t);
    PlotOptions opt;
    opt.log_y = true;
    opt.title = "relative entropy, " + key;
    opt.y_label = "H(gamma(t) | w)";
    std::ofstream(stem + ".svg") << render_svg(t, opt);
    std::cout << "wrote " << stem << ".csv/.svg\n";
  }
  return 0;
}

int cmd_joint(const CommonFlags& f) {
  const Scenario s = load(f);
  const JointStudy js = joint_limit_study(s, f.jobs);
  const std::string path = (fs::path(f.out) / (s.name + "_joint_limit.csv")).string();
  CsvTable t;
  t.header.push_back("n");
  t.columns.emplace_back(js.n.begin(), js.n.end());
  for (std::size_t b = 0; b < js.eps.size(); ++b) {
    t.header.push_back("eps=" + eps_tag(js.eps[b]));
    const Eigen::VectorXd col = js.H.col(static_cast<Index>(b));
    t.columns.emplace_back(col.data(), col.data() + col.size());
  }
  write_csv(path, t);
  for (std::size_t a = 0; a < js.n.size(); ++a) {
    std::cout << "n=" << js.n[a];
    for (Index b = 0; b < js.H.cols(); ++b) std::cout << "  H=" << format_number(js.H(static_cast<Index>(a), b));
    std::cout << "\n";
  }
  std::cout << "log-log slope at smallest eps: " << js.slope << "\n";
  return 0;
}

int cmd_edp(const CommonFlags& f, bool corrupt) {
  const Scenario s = load(f);
  const double eps = s.eps.empty() ? 1.0 : s.eps.front();
  RunResult r = run_system(s, s.system, make_regime(s.regime, eps, s.kirchhoff_rates), s.n, s.integrator_config());
  const Trajectory traj = corrupt ? reversed_states(r.trajectory) : r.trajectory;
  const EdpResult e = edp_check(*r.system, traj, s.edp_tolerance);
  nlohmann::json j = report_json(e.report);
  j["threshold"] = e.threshold;
  j["pass"] = e.pass;
  j["corrupted"] = corrupt;
  write_json((fs::path(f.out) / (s.name + "_edp.json")).string(), j);
  std::cout << "L_n = " << format_number(e.report.L_n) << ", D_n = " << format_number(e.report.breakdown.total())
            << ", threshold = " << format_number(e.threshold) << " -> " << (e.pass ? "PASS" : "FAIL") << "\n";
  return e.pass ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diffusion on metric graphs with vertex reservoirs"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* sim = app.add_subcommand("simulate", "integrate the scenario's system for every eps");
  add_common(sim, flags);
  auto* tab = app.add_subcommand("table-hellinger", "Hellinger distances between prelimit and limit systems");
  add_common(tab, flags);
  auto* ent = app.add_subcommand("entropy-sweep", "entropy curves for every regime and eps");
  add_common(ent, flags);
  auto* joint = app.add_subcommand("joint-limit", "joint limit Hellinger distance against n");
  add_common(joint, flags);
  auto* edp = app.add_subcommand("edp-check", "evaluate the energy-dissipation functional along a run");
  add_common(edp, flags);
  bool corrupt = false;
  edp->add_flag("--corrupt", corrupt, "reverse the time order of the states before evaluation");

  auto* plot = app.add_subcommand("plot", "render a CSV as an SVG line chart");
  std::string csv_in, svg_out;
  PlotOptions popt;
  plot->add_option("csv", csv_in, "input CSV with a leading t column")->required();
  plot->add_option("svg", svg_out, "output SVG")->required();
  plot->add_flag("--log-x", popt.log_x);
  plot->add_flag("--log-y", popt.log_y);
  plot->add_option("--title", popt.title);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*sim) return cmd_simulate(flags);
    if (*tab) return cmd_table(flags);
    if (*ent) return cmd_entropy_sweep(flags);
    if (*joint) return cmd_joint(flags);
    if (*edp) return cmd_edp(flags, corrupt);
    if (*plot) {
      plot_csv(csv_in, svg_out, popt);
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case Errc::SingularStageMatrix:
      case Errc::NonFiniteState:
      case Errc::StepUnderflow:
      case Errc::NegativeMassBeyondTolerance:
      case Errc::ResidualTooLarge:
      case Errc::InfeasibleFlux:
        return kExitNumerical;
      default:
        return kExitConfig;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
