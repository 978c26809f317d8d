#include "mgf/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mgf/error.hpp"
#include "mgf/quadrature.hpp"

namespace mgf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tabulated_value(const Tabulated& t, double x) {
  if (x <= t.x.front()) return t.y.front();
  if (x >= t.x.back()) return t.y.back();
  const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t.x.begin());
  const double s = (x - t.x[j - 1]) / (t.x[j] - t.x[j - 1]);
  return (1.0 - s) * t.y[j - 1] + s * t.y[j];
}

double tabulated_integral(const Tabulated& t, double a, double b) {
  std::vector<double> pts{a};
  for (double xi : t.x)
    if (xi > a && xi < b) pts.push_back(xi);
  pts.push_back(b);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    acc += 0.5 * (pts[i + 1] - pts[i]) * (tabulated_value(t, pts[i]) + tabulated_value(t, pts[i + 1]));
  return acc;
}

constexpr int kCheckCells = 64;
constexpr int kMassCells = 64;

}  // namespace

double EdgeDensity::operator()(double x) const {
  return std::visit(overloaded{[x](const Polynomial& p) {
                                 double acc = 0.0;
                                 for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * x + *it;
                                 return acc;
                               },
                               [x](const Sinusoid& s) { return s.amp * std::sin(s.omega * x + s.phase) + s.offset; },
                               [x](const Tabulated& t) { return tabulated_value(t, x); }},
                    expr_);
}

double EdgeDensity::integral(double a, double b) const {
  if (const auto* t = std::get_if<Tabulated>(&expr_)) return tabulated_integral(*t, a, b);
  return integrate_gl8<double>([this](double x) { return (*this)(x); }, a, b);
}

void EdgeDensity::validate(double length) const {
  if (const auto* t = std::get_if<Tabulated>(&expr_)) {
    if (t->x.size() < 2 || t->x.size() != t->y.size())
      throw Error(Errc::InvalidDensity, "tabulated density needs matching grids of size >= 2");
    for (std::size_t i = 1; i < t->x.size(); ++i)
      if (!(t->x[i] > t->x[i - 1])) throw Error(Errc::InvalidDensity, "tabulated grid must increase strictly");
    if (t->x.front() > 0.0 || t->x.back() < length)
      throw Error(Errc::InvalidDensity, "tabulated grid must cover the edge");
  }
  if (const auto* p = std::get_if<Polynomial>(&expr_); p && p->coeffs.empty())
    throw Error(Errc::InvalidDensity, "empty polynomial");
  auto check = [&](double x) {
    const double v = (*this)(x);
    if (!(v > 0.0) || !std::isfinite(v))
      throw Error(Errc::NonPositiveDensity, "density " + std::to_string(v) + " at x=" + std::to_string(x));
  };
  check(0.0);
  check(length);
  const double h = length / kCheckCells;
  for (int c = 0; c < kCheckCells; ++c) {
    const double mid = (c + 0.5) * h;
    for (double node : GaussLegendre8<double>::nodes) check(mid + 0.5 * h * node);
  }
}

void ReferenceMeasure::refresh() {
  raw_edge_mass_.assign(raw.size(), 0.0);
  for (std::size_t e = 0; e < raw.size(); ++e) {
    const double h = lengths[e] / kMassCells;
    double acc = 0.0;
    for (int c = 0; c < kMassCells; ++c) acc += raw[e].integral(c * h, (c + 1) * h);
    raw_edge_mass_[e] = acc;
  }
}

double ReferenceMeasure::edges_mass() const {
  double acc = 0.0;
  for (std::size_t e = 0; e < raw.size(); ++e) acc += edge_mass(e);
  return acc;
}

ReferenceMeasure normalize(const Eigen::VectorXd& raw_vertex_weights, const std::vector<EdgeDensity>& raw_densities,
                           const MetricGraph& g) {
  if (static_cast<std::size_t>(raw_vertex_weights.size()) != g.num_vertices())
    throw Error(Errc::DimensionMismatch, "one weight per vertex expected");
  if (raw_densities.size() != g.num_edges()) throw Error(Errc::DimensionMismatch, "one density per edge expected");
  for (Eigen::Index v = 0; v < raw_vertex_weights.size(); ++v)
    if (!(raw_vertex_weights[v] > 0.0))
      throw Error(Errc::NonPositiveWeight, "vertex " + g.vertex_ids()[static_cast<std::size_t>(v)]);

  ReferenceMeasure m;
  m.raw = raw_densities;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    m.lengths.push_back(g.edge(e).length);
    m.raw[e].validate(g.edge(e).length);
  }
  m.refresh();
  m.omega = raw_vertex_weights;
  m.Z = m.total_mass();
  m.omega /= m.Z;
  m.edge_scale = 1.0 / m.Z;
  return m;
}

Eigen::VectorXd cell_masses(const ReferenceMeasure& m, std::size_t e, int n) {
  if (n < 2) throw Error(Errc::InvalidCellCount, "n = " + std::to_string(n));
  if (e >= m.num_edges()) throw Error(Errc::UnknownEdge, std::to_string(e));
  const double h = m.lengths[e] / n;
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) out[k] = m.edge_scale * m.raw[e].integral(k * h, (k + 1) * h);
  return out;
}

CellMeasures cell_measures(const ReferenceMeasure& m, int n) {
  CellMeasures cm;
  cm.n = n;
  for (std::size_t e = 0; e < m.num_edges(); ++e) cm.masses.push_back(cell_masses(m, e, n));
  return cm;
}

double endpoint_density(const ReferenceMeasure& m, const MetricGraph& g, std::size_t e, EndpointRole role,
                        EndpointEval how, int n) {
  const double len = g.edge(e).length;
  if (how == EndpointEval::Continuum) return m.pi(e, role == EndpointRole::Tail ? 0.0 : len);
  if (n < 2) throw Error(Errc::InvalidCellCount, "cell-average endpoint needs n >= 2");
  const double h = len / n;
  const double a = role == EndpointRole::Tail ? 0.0 : len - h;
  return m.edge_scale * m.raw[e].integral(a, a + h) / h;
}

void complete_directed_rates(RateSpec& rates, const ReferenceMeasure& m, const MetricGraph& g) {
  rates.to_vertex.assign(g.num_edges(), {0.0, 0.0});
  rates.to_edge.assign(g.num_edges(), {0.0, 0.0});
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    for (EndpointRole role : {EndpointRole::Tail, EndpointRole::Head}) {
      const int r = role_index(role);
      const double p = endpoint_density(m, g, e, role, rates.endpoint, rates.n);
      const double w = m.omega[static_cast<Eigen::Index>(g.edge(e).endpoint(role))];
      rates.to_vertex[e][r] = rates.kappa[e][r] * std::sqrt(w / p);
      rates.to_edge[e][r] = rates.kappa[e][r] * std::sqrt(p / w);
    }
  }
}

RateSpec rates_from_kappa(const std::vector<std::array<double, 2>>& kappa, const ReferenceMeasure& m,
                          const MetricGraph& g, EndpointEval how, int n) {
  if (kappa.size() != g.num_edges()) throw Error(Errc::MissingRate, "one kappa pair per edge expected");
  for (const auto& kv : kappa)
    for (double k : kv)
      if (!(k > 0.0)) throw Error(Errc::NonPositiveRate, "kappa must be positive");
  RateSpec rs;
  rs.kappa = kappa;
  rs.endpoint = how;
  rs.n = n;
  complete_directed_rates(rs, m, g);
  return rs;
}

RateSpec rates_from_detailed_balance(const std::vector<std::array<double, 2>>& r_vertex_to_edge,
                                     const ReferenceMeasure& m, const MetricGraph& g, EndpointEval how, int n) {
  if (r_vertex_to_edge.size() != g.num_edges()) throw Error(Errc::MissingRate, "one rate pair per edge expected");
  std::vector<std::array<double, 2>> kappa(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    for (EndpointRole role : {EndpointRole::Tail, EndpointRole::Head}) {
      const int r = role_index(role);
      const double rate = r_vertex_to_edge[e][r];
      if (!(rate > 0.0)) throw Error(Errc::NonPositiveRate, "edge " + g.edge(e).id);
      const double p = endpoint_density(m, g, e, role, how, n);
      if (!(p > 0.0)) throw Error(Errc::NonPositiveDensity, "endpoint of " + g.edge(e).id);
      const double w = m.omega[static_cast<Eigen::Index>(g.edge(e).endpoint(role))];
      kappa[e][r] = rate * std::sqrt(w / p);
    }
  }
  return rates_from_kappa(kappa, m, g, how, n);
}

ScaledParameters apply_scaling(const ScalingRegime& regime, const ReferenceMeasure& m, const RateSpec& rates,
                               const Eigen::VectorXd& d, const MetricGraph& g) {
  if (regime.tag != Regime::Unscaled && !(regime.eps > 0.0))
    throw Error(Errc::NonPositiveEpsilon, "eps = " + std::to_string(regime.eps));
  const double eps = regime.eps;
  ScaledParameters out{regime, m, rates, d, 1.0, 1.0};
  ReferenceMeasure& sm = out.measure;

  auto combinatorial = [&]() {
    out.Z_eps = m.vertex_mass() + eps * m.edges_mass();
    sm.omega = m.omega / out.Z_eps;
    sm.edge_scale = m.edge_scale * eps / out.Z_eps;
    out.kappa_factor = 1.0 / std::sqrt(eps);
  };

  switch (regime.tag) {
    case Regime::Unscaled:
      break;
    case Regime::Kirchhoff:
      out.Z_eps = eps * m.vertex_mass() + m.edges_mass();
      sm.omega = eps * m.omega / out.Z_eps;
      sm.edge_scale = m.edge_scale / out.Z_eps;
      out.kappa_factor = regime.kirchhoff_rates == KirchhoffRateScaling::DetailedBalance ? 1.0 / std::sqrt(eps)
                                                                                        : 1.0 / eps;
      break;
    case Regime::FastEdge:
      out.d = d / eps;
      break;
    case Regime::Combinatorial:
      combinatorial();
      break;
    case Regime::Joint:
      out.d = d / eps;
      combinatorial();
      break;
  }
  for (auto& kv : out.rates.kappa)
    for (double& k : kv) k *= out.kappa_factor;
  complete_directed_rates(out.rates, sm, g);
  return out;
}

double harmonic_rate(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates, std::size_t e) {
  const Edge& ed = g.edge(e);
  double prod[2];
  for (EndpointRole role : {EndpointRole::Tail, EndpointRole::Head}) {
    const int r = role_index(role);
    prod[r] = endpoint_density(m, g, e, role, rates.endpoint, rates.n) * rates.to_vertex[e][r];
  }
  const double wv = m.omega[static_cast<Eigen::Index>(ed.tail)];
  const double ww = m.omega[static_cast<Eigen::Index>(ed.head)];
  return harmonic_mean(prod[0], prod[1]) / (2.0 * std::sqrt(wv * ww));
}

double harmonic_rate(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates, std::size_t v,
                     std::size_t w, std::size_t e) {
  const Edge& ed = g.edge(e);
  if (!((ed.tail == v && ed.head == w) || (ed.tail == w && ed.head == v)))
    throw Error(Errc::NotAnEdge, "edge " + ed.id + " does not join the given vertices");
  return harmonic_rate(g, m, rates, e);
}

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Unscaled: return "unscaled";
    case Regime::Kirchhoff: return "kirchhoff";
    case Regime::FastEdge: return "fast-edge";
    case Regime::Combinatorial: return "combinatorial";
    case Regime::Joint: return "joint";
  }
  return "unknown";
}

}  // namespace mgf
