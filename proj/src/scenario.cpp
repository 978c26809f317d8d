#include "mgf/scenario.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mgf/error.hpp"

namespace mgf {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

EdgeDensity parse_density(const json& j) {
  const std::string kind = j.value("kind", "");
  if (kind == "poly") return EdgeDensity::poly(j.at("coeffs").get<std::vector<double>>());
  if (kind == "sin")
    return EdgeDensity::sinusoid(j.at("amp").get<double>(), j.at("omega").get<double>(), j.value("phase", 0.0),
                                 j.value("offset", 0.0));
  if (kind == "table")
    return EdgeDensity::tabulated(j.at("x").get<std::vector<double>>(), j.at("y").get<std::vector<double>>());
  config_error("unknown density kind '" + kind + "'");
}

// Accepts a scalar (same value everywhere), an array in order, or an object keyed by id.
std::vector<double> per_item(const json& j, const std::vector<std::string>& ids, const std::string& what) {
  std::vector<double> out(ids.size());
  if (j.is_number()) {
    std::fill(out.begin(), out.end(), j.get<double>());
  } else if (j.is_array()) {
    if (j.size() != ids.size()) config_error(what + ": expected " + std::to_string(ids.size()) + " values");
    for (std::size_t i = 0; i < ids.size(); ++i) out[i] = j[i].get<double>();
  } else if (j.is_object()) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (!j.contains(ids[i])) config_error(what + ": missing entry for " + ids[i]);
      out[i] = j.at(ids[i]).get<double>();
    }
  } else {
    config_error(what + ": unsupported value");
  }
  return out;
}

std::vector<std::array<double, 2>> per_incidence(const json& j, const MetricGraph& g, const std::string& what) {
  std::vector<std::array<double, 2>> out(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const std::string& id = g.edge(e).id;
    if (j.is_number()) {
      out[e] = {j.get<double>(), j.get<double>()};
    } else if (j.is_object() && j.contains(id)) {
      const json& x = j.at(id);
      if (x.is_number())
        out[e] = {x.get<double>(), x.get<double>()};
      else
        out[e] = {x.at(0).get<double>(), x.at(1).get<double>()};
    } else {
      throw Error(Errc::MissingRate, what + ": no value for edge " + id);
    }
  }
  return out;
}

EdgeProfile parse_profile(const json& j) {
  EdgeProfile p;
  const std::string kind = j.value("kind", "ramp");
  if (kind == "ramp") {
    p.kind = EdgeProfile::Kind::Ramp;
  } else if (kind == "const") {
    p.kind = EdgeProfile::Kind::Const;
    p.value = j.at("value").get<double>();
    p.per_n = j.value("per_n", false);
  } else {
    config_error("unknown edge profile '" + kind + "'");
  }
  return p;
}

InitialSpec parse_initial(const json& j, const MetricGraph& g) {
  InitialSpec s;
  const std::string kind = j.value("kind", "uniform");
  s.normalize = j.value("normalize", true);
  if (kind == "uniform") {
    s.kind = InitialSpec::Kind::Uniform;
  } else if (kind == "stationary") {
    s.kind = InitialSpec::Kind::Stationary;
  } else if (kind == "ramp") {
    s.kind = InitialSpec::Kind::Ramp;
    s.vertex_densities = per_item(j.at("vertex_densities"), g.vertex_ids(), "vertex_densities");
    s.edge_profiles.assign(g.num_edges(), EdgeProfile{});
    if (j.contains("edge_profiles"))
      for (std::size_t e = 0; e < g.num_edges(); ++e)
        if (j.at("edge_profiles").contains(g.edge(e).id))
          s.edge_profiles[e] = parse_profile(j.at("edge_profiles").at(g.edge(e).id));
  } else {
    config_error("unknown initial kind '" + kind + "'");
  }
  return s;
}

KirchhoffRateScaling parse_kirchhoff_rates(const std::string& s) {
  if (s == "detailed-balance") return KirchhoffRateScaling::DetailedBalance;
  if (s == "symmetric") return KirchhoffRateScaling::Symmetric;
  config_error("unknown kirchhoff_rate_scaling '" + s + "'");
}

VertexCoupling parse_coupling(const std::string& s) {
  if (s == "cell-mass") return VertexCoupling::CellMass;
  if (s == "cell-density") return VertexCoupling::CellDensity;
  if (s == "endpoint") return VertexCoupling::Endpoint;
  config_error("unknown vertex_coupling '" + s + "'");
}

}  // namespace

Regime parse_regime(const std::string& s) {
  if (s == "unscaled") return Regime::Unscaled;
  if (s == "kirchhoff") return Regime::Kirchhoff;
  if (s == "fast-edge") return Regime::FastEdge;
  if (s == "combinatorial") return Regime::Combinatorial;
  if (s == "joint") return Regime::Joint;
  config_error("unknown regime '" + s + "'");
}

SystemChoice parse_system(const std::string& s) {
  if (s == "prelimit") return SystemChoice::Prelimit;
  if (s == "kirchhoff-limit") return SystemChoice::KirchhoffLimit;
  if (s == "fast-edge") return SystemChoice::FastEdge;
  if (s == "combinatorial") return SystemChoice::Combinatorial;
  config_error("unknown system '" + s + "'");
}

const char* system_choice_name(SystemChoice s) {
  switch (s) {
    case SystemChoice::Prelimit: return "prelimit";
    case SystemChoice::KirchhoffLimit: return "kirchhoff-limit";
    case SystemChoice::FastEdge: return "fast-edge";
    case SystemChoice::Combinatorial: return "combinatorial";
  }
  return "?";
}

CellWeight parse_cell_weight(const std::string& s) {
  if (s == "literal") return CellWeight::Literal;
  if (s == "per-cell") return CellWeight::PerCell;
  config_error("unknown cell weight '" + s + "'");
}

RateSpec Scenario::base_rates() const { return rates_from_kappa(kappa, measure, graph, endpoint, n); }

std::vector<double> Scenario::output_grid() const {
  return graded_grid(t_end, grid.uniform, grid.log_points, grid.t_first);
}

IntegratorConfig Scenario::integrator_config() const {
  IntegratorConfig c = integrator;
  c.t_end = t_end;
  c.output_times = output_grid();
  return c;
}

Scenario parse_scenario(const json& j) {
  try {
    Scenario s;
    s.source = j;
    s.name = j.value("name", "scenario");

    const json& jg = j.at("graph");
    std::vector<EdgeSpec> specs;
    for (const json& e : jg.at("edges"))
      specs.push_back({e.at("tail").get<std::string>(), e.at("head").get<std::string>(), e.value("length", 1.0),
                       e.value("id", std::string())});
    s.graph = build_graph(jg.at("vertices").get<std::vector<std::string>>(), specs);

    const json& jr = j.at("reference");
    const std::vector<double> w = per_item(jr.at("vertex_weights"), s.graph.vertex_ids(), "vertex_weights");
    std::vector<EdgeDensity> dens;
    const json& jd = jr.at("edge_densities");
    for (std::size_t e = 0; e < s.graph.num_edges(); ++e)
      dens.push_back(parse_density(jd.is_array() ? jd.at(e) : jd.at(s.graph.edge(e).id)));
    s.measure = normalize(Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Index>(w.size())), dens, s.graph);

    s.n = j.value("n", 100);
    const json jrates = j.value("rates", json{{"kappa", 1.0}});
    if (jrates.value("endpoint", "continuum") == "cell-average") s.endpoint = EndpointEval::CellAverage;
    if (jrates.contains("r_vertex_to_edge")) {
      const auto r = per_incidence(jrates.at("r_vertex_to_edge"), s.graph, "r_vertex_to_edge");
      s.kappa = rates_from_detailed_balance(r, s.measure, s.graph, s.endpoint, s.n).kappa;
    } else {
      s.kappa = per_incidence(jrates.value("kappa", json(1.0)), s.graph, "kappa");
      rates_from_kappa(s.kappa, s.measure, s.graph, s.endpoint, s.n);
    }

    std::vector<std::string> edge_ids;
    for (const Edge& e : s.graph.edges()) edge_ids.push_back(e.id);
    const std::vector<double> d = per_item(j.value("diffusivity", json(1.0)), edge_ids, "diffusivity");
    s.d = Eigen::Map<const Eigen::VectorXd>(d.data(), static_cast<Index>(d.size()));
    for (double x : d)
      if (!(x > 0.0)) config_error("diffusivities must be positive");

    s.regime = parse_regime(j.value("regime", "unscaled"));
    if (j.contains("eps")) s.eps = j.at("eps").get<std::vector<double>>();
    for (std::size_t i = 0; i < s.eps.size(); ++i) {
      if (!(s.eps[i] > 0.0)) throw Error(Errc::NonPositiveEpsilon, "eps list must be positive");
      if (i > 0 && !(s.eps[i] < s.eps[i - 1])) config_error("eps list must be decreasing");
    }
    s.system = parse_system(j.value("system", "prelimit"));

    const json disc = j.value("discretization", json::object());
    s.kirchhoff_rates = parse_kirchhoff_rates(disc.value("kirchhoff_rate_scaling", "detailed-balance"));
    s.prelimit.coupling = parse_coupling(disc.value("vertex_coupling", "cell-density"));

    s.initial = parse_initial(j.value("initial", json{{"kind", "uniform"}}), s.graph);
    s.t_end = j.value("t_end", 40.0);
    if (!(s.t_end > 0.0)) config_error("t_end must be positive");

    const json ji = j.value("integrator", json::object());
    const std::string scheme = ji.value("scheme", "trbdf2");
    if (scheme == "trbdf2")
      s.integrator.scheme = Scheme::TRBDF2;
    else if (scheme == "implicit-euler")
      s.integrator.scheme = Scheme::ImplicitEuler;
    else
      config_error("unknown scheme '" + scheme + "'");
    s.integrator.rtol = ji.value("rtol", 1e-8);
    s.integrator.atol = ji.value("atol", 1e-10);
    s.integrator.max_step = ji.value("max_step", 0.0);
    s.integrator.initial_step = ji.value("initial_step", 0.0);

    const json jo = j.value("output_grid", json::object());
    s.grid.uniform = jo.value("uniform", std::size_t{2001});
    s.grid.log_points = jo.value("log_points", std::size_t{0});
    s.grid.t_first = jo.value("t_first", 1e-6);

    const json jh = j.value("hellinger", json::object());
    s.cell_weight = parse_cell_weight(jh.value("cell_weight", "literal"));
    s.edp_tolerance = j.value("edp_tolerance", 1e-3);

    for (const json& c : j.value("comparisons", json::array())) {
      ComparisonSpec cs;
      cs.regime = parse_regime(c.at("regime").get<std::string>());
      cs.name = c.value("name", std::string(regime_name(cs.regime)));
      cs.prelimit = parse_system(c.value("prelimit", "prelimit"));
      cs.limit = parse_system(c.at("limit").get<std::string>());
      cs.map = c.at("map").get<std::string>();
      cs.kirchhoff_rates = c.contains("kirchhoff_rate_scaling")
                               ? parse_kirchhoff_rates(c.at("kirchhoff_rate_scaling").get<std::string>())
                               : s.kirchhoff_rates;
      s.comparisons.push_back(cs);
    }
    for (const json& r : j.value("sweep_regimes", json::array())) s.sweep_regimes.push_back(parse_regime(r));
    if (s.sweep_regimes.empty())
      s.sweep_regimes = {Regime::Unscaled, Regime::Kirchhoff, Regime::FastEdge, Regime::Combinatorial, Regime::Joint};
    const json jj = j.value("joint", json::object());
    s.joint_n = jj.value("n", std::vector<int>{50, 100, 200, 400});
    s.joint_eps = jj.value("eps", std::vector<double>{1e-4});
    return s;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigError, "cannot open scenario " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, path + ": " + e.what());
  }
  return parse_scenario(j);
}

std::string resolve_scenario_path(const std::string& path) {
  namespace fs = std::filesystem;
  const char* seed = std::getenv("MGF_SEED_DIR");
  if (path.empty()) {
    if (!seed) throw Error(Errc::ConfigError, "no --scenario given and MGF_SEED_DIR is unset");
    return (fs::path(seed) / "triangle.json").string();
  }
  if (fs::exists(path) || !seed) return path;
  const fs::path alt = fs::path(seed) / path;
  return fs::exists(alt) ? alt.string() : path;
}

}  // namespace mgf
