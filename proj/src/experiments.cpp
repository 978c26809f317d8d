#include "mgf/experiments.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "mgf/error.hpp"

namespace mgf {

ScalingRegime make_regime(Regime tag, double eps, KirchhoffRateScaling k) {
  ScalingRegime r;
  r.tag = tag;
  r.eps = tag == Regime::Unscaled ? 1.0 : eps;
  r.kirchhoff_rates = k;
  return r;
}

DiscreteSystem build_system(const Scenario& s, SystemChoice choice, const ScalingRegime& regime, int n) {
  const RateSpec rates = s.base_rates();
  switch (choice) {
    case SystemChoice::Prelimit: {
      const ScaledParameters p = apply_scaling(regime, s.measure, rates, s.d, s.graph);
      return assemble_prelimit(s.graph, p, n, s.prelimit);
    }
    case SystemChoice::KirchhoffLimit:
      return assemble_kirchhoff_limit(s.graph, s.measure, s.d, n);
    case SystemChoice::FastEdge: {
      const ScaledParameters p = apply_scaling(regime, s.measure, rates, s.d, s.graph);
      return assemble_fast_edge(s.graph, p.measure, p.rates);
    }
    case SystemChoice::Combinatorial:
      return assemble_combinatorial(s.graph, s.measure, rates);
  }
  throw Error(Errc::ConfigError, "unknown system choice");
}

DensityField density_field(const Scenario& s, int n) {
  const InitialSpec& in = s.initial;
  if (in.kind != InitialSpec::Kind::Ramp) throw Error(Errc::ConfigError, "density field needs ramp initial data");
  DensityField f;
  f.vertex = Eigen::Map<const Eigen::VectorXd>(in.vertex_densities.data(),
                                               static_cast<Index>(in.vertex_densities.size()));
  for (std::size_t e = 0; e < s.graph.num_edges(); ++e) {
    const Edge& ed = s.graph.edge(e);
    const EdgeProfile& p = in.edge_profiles[e];
    Eigen::VectorXd u(n);
    for (int k = 1; k <= n; ++k) {
      if (p.kind == EdgeProfile::Kind::Ramp) {
        const double a = f.vertex[static_cast<Index>(ed.tail)], b = f.vertex[static_cast<Index>(ed.head)];
        u[k - 1] = a + (b - a) * k / static_cast<double>(n);
      } else {
        u[k - 1] = p.per_n ? p.value / n : p.value;
      }
    }
    f.cells.push_back(std::move(u));
  }
  return f;
}

Eigen::VectorXd initial_state(const Scenario& s, const DiscreteSystem& sys) {
  const StateLayout& L = sys.layout();
  const InitialSpec& in = s.initial;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(sys.dim());
  const double nv = static_cast<double>(s.graph.num_vertices()), ne = static_cast<double>(s.graph.num_edges());

  if (in.kind == InitialSpec::Kind::Stationary) {
    g = sys.weights();
  } else if (in.kind == InitialSpec::Kind::Uniform) {
    // Equal mass on every vertex and every edge; edge mass split evenly over cells.
    const double share = 1.0 / (nv + ne);
    const int n = std::max(L.n, 1);
    for (std::size_t i = 0; i < L.slots.size(); ++i) {
      const Slot& sl = L.slots[i];
      switch (sl.kind) {
        case SlotKind::Vertex:
        case SlotKind::EdgeSlot: g[static_cast<Index>(i)] = share; break;
        case SlotKind::Cell: g[static_cast<Index>(i)] = share / n; break;
        case SlotKind::Patch:
          g[static_cast<Index>(i)] = share + share / n * static_cast<double>(s.graph.incident(sl.id).size());
          break;
      }
    }
  } else {
    const int n = sys.kind() == SystemKind::Prelimit || sys.kind() == SystemKind::KirchhoffLimit ? sys.n() : s.n;
    const DensityField f = density_field(s, n);
    // Edge means use the reference cell masses; the ratio does not depend on the scaling.
    const CellMeasures cm = cell_measures(s.measure, n);
    for (std::size_t i = 0; i < L.slots.size(); ++i) {
      const Slot& sl = L.slots[i];
      double u = 0.0;
      switch (sl.kind) {
        case SlotKind::Vertex:
        case SlotKind::Patch: u = f.vertex[static_cast<Index>(sl.id)]; break;
        case SlotKind::Cell: u = f.cells[sl.id][sl.k - 1]; break;
        case SlotKind::EdgeSlot: {
          const Eigen::VectorXd& w = cm.masses[sl.id];
          u = f.cells[sl.id].dot(w) / w.sum();
          break;
        }
      }
      g[static_cast<Index>(i)] = u * L.weights[static_cast<Index>(i)];
    }
  }
  if (in.normalize) {
    const double total = g.sum();
    if (!(total > 0.0)) throw Error(Errc::ConfigError, "initial data has zero mass");
    g /= total;
  }
  return g;
}

RunResult run_system(const Scenario& s, SystemChoice choice, const ScalingRegime& regime, int n,
                     const IntegratorConfig& cfg) {
  RunResult r;
  r.regime = regime.tag;
  r.eps = regime.eps;
  r.choice = choice;
  r.n = n;
  r.label = std::string(system_choice_name(choice)) + "/" + regime_name(regime.tag) + "/eps=" +
            std::to_string(regime.eps) + "/n=" + std::to_string(n);
  const auto t0 = std::chrono::steady_clock::now();
  auto sys = std::make_shared<const DiscreteSystem>(build_system(s, choice, regime, n));
  r.trajectory = integrate(*sys, initial_state(s, *sys), cfg);
  r.system = std::move(sys);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

ComparisonMap make_map(const std::string& name, const DiscreteSystem& a, const DiscreteSystem& b) {
  if (name == "kirchhoff") return kirchhoff_map(a, b);
  if (name == "fast-edge") return fast_edge_map(a, b);
  if (name == "vertex") return vertex_map(a, b);
  if (name == "identity") {
    if (a.dim() != b.dim()) throw Error(Errc::MappingMismatch, "identity map needs equal layouts");
    return identity_map(a);
  }
  throw Error(Errc::ConfigError, "unknown comparison map '" + name + "'");
}

TableResult table_hellinger(const Scenario& s, int jobs) {
  const IntegratorConfig cfg = s.integrator_config();
  struct Task {
    std::size_t row;
    int col;  // -1: the eps-free limit run of the row
  };
  std::vector<Task> tasks;
  for (std::size_t r = 0; r < s.comparisons.size(); ++r) {
    tasks.push_back({r, -1});
    for (std::size_t c = 0; c < s.eps.size(); ++c) tasks.push_back({r, static_cast<int>(c)});
  }
  std::vector<RunResult> runs(tasks.size());
  parallel_for(tasks.size(), jobs, [&](std::size_t i) {
    const ComparisonSpec& cs = s.comparisons[tasks[i].row];
    if (tasks[i].col < 0)
      runs[i] = run_system(s, cs.limit, make_regime(Regime::Unscaled, 1.0), s.n, cfg);
    else
      runs[i] = run_system(s, cs.prelimit,
                           make_regime(cs.regime, s.eps[static_cast<std::size_t>(tasks[i].col)], cs.kirchhoff_rates),
                           s.n, cfg);
  });

  TableResult out;
  std::size_t i = 0;
  for (const ComparisonSpec& cs : s.comparisons) {
    TableRow row{cs.name, cs.regime, {}};
    const RunResult& lim = runs[i++];
    for (std::size_t c = 0; c < s.eps.size(); ++c) {
      const RunResult& pre = runs[i++];
      const ComparisonMap map = make_map(cs.map, *pre.system, *lim.system);
      TableCell cell;
      cell.eps = s.eps[c];
      cell.literal = hellinger(*pre.system, pre.trajectory, *lim.system, lim.trajectory, map, CellWeight::Literal);
      cell.per_cell = hellinger(*pre.system, pre.trajectory, *lim.system, lim.trajectory, map, CellWeight::PerCell);
      row.cells.push_back(cell);
    }
    out.rows.push_back(std::move(row));
  }
  out.runs = std::move(runs);
  return out;
}

JointStudy joint_limit_study(const Scenario& s, int jobs) {
  const IntegratorConfig cfg = s.integrator_config();
  JointStudy js;
  js.n = s.joint_n;
  js.eps = s.joint_eps;
  if (js.n.size() < 2 || js.eps.empty()) throw Error(Errc::ConfigError, "joint study needs >= 2 values of n");
  js.H.resize(static_cast<Index>(js.n.size()), static_cast<Index>(js.eps.size()));

  const RunResult lim = run_system(s, SystemChoice::Combinatorial, make_regime(Regime::Unscaled, 1.0), s.n, cfg);
  const std::size_t cols = js.eps.size();
  parallel_for(js.n.size() * cols, jobs, [&](std::size_t i) {
    const std::size_t a = i / cols, b = i % cols;
    const RunResult pre = run_system(s, SystemChoice::Prelimit, make_regime(Regime::Joint, js.eps[b]), js.n[a], cfg);
    js.H(static_cast<Index>(a), static_cast<Index>(b)) =
        hellinger(*pre.system, pre.trajectory, *lim.system, lim.trajectory, vertex_map(*pre.system, *lim.system));
  });

  std::size_t smallest = 0;
  for (std::size_t b = 1; b < cols; ++b)
    if (js.eps[b] < js.eps[smallest]) smallest = b;
  std::vector<double> x, y;
  for (std::size_t a = 0; a < js.n.size(); ++a) {
    x.push_back(js.n[a]);
    y.push_back(js.H(static_cast<Index>(a), static_cast<Index>(smallest)));
  }
  js.slope = loglog_slope(x, y);
  return js;
}

std::vector<RunResult> entropy_sweep(const Scenario& s, int jobs) {
  const IntegratorConfig cfg = s.integrator_config();
  struct Task {
    SystemChoice choice;
    ScalingRegime regime;
  };
  std::vector<Task> tasks;
  for (Regime r : s.sweep_regimes) {
    if (r == Regime::Unscaled) {
      tasks.push_back({SystemChoice::Prelimit, make_regime(r, 1.0)});
      continue;
    }
    for (double e : s.eps) tasks.push_back({SystemChoice::Prelimit, make_regime(r, e, s.kirchhoff_rates)});
  }
  for (SystemChoice c : {SystemChoice::KirchhoffLimit, SystemChoice::FastEdge, SystemChoice::Combinatorial})
    tasks.push_back({c, make_regime(Regime::Unscaled, 1.0)});
  std::vector<RunResult> runs(tasks.size());
  parallel_for(tasks.size(), jobs,
               [&](std::size_t i) { runs[i] = run_system(s, tasks[i].choice, tasks[i].regime, s.n, cfg); });
  return runs;
}

EdpResult edp_check(const DiscreteSystem& sys, const Trajectory& traj, double tol) {
  EdpResult r;
  r.report = edp_L_n(sys, traj);
  r.threshold = tol * (1.0 + r.report.breakdown.total());
  r.pass = std::abs(r.report.L_n) <= r.threshold;
  return r;
}

Trajectory reversed_states(const Trajectory& t) {
  Trajectory out = t;
  out.states = t.states.rowwise().reverse();
  return out;
}

}  // namespace mgf
