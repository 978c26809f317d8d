#include "mgf/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "mgf/error.hpp"

namespace mgf {

Eigen::VectorXd clip_masses(const Eigen::VectorXd& gamma, double clip) {
  Eigen::VectorXd g = gamma;
  for (Index i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0) {
      if (g[i] < -clip)
        throw Error(Errc::NegativeMassBeyondTolerance, "slot " + std::to_string(i) + " = " + std::to_string(g[i]));
      g[i] = 0.0;
    }
  }
  return g;
}

double relative_entropy(const Eigen::VectorXd& gamma, const Eigen::VectorXd& weights, double clip) {
  if (gamma.size() != weights.size()) throw Error(Errc::DimensionMismatch, "entropy arguments");
  const Eigen::VectorXd g = clip_masses(gamma, clip);
  double acc = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    if (weights[i] > 0.0)
      acc += weights[i] * eta(g[i] / weights[i]);
    else if (g[i] > 0.0)
      return std::numeric_limits<double>::infinity();
  }
  return acc;
}

FluxVector flux_from_state(const DiscreteSystem& sys, const Eigen::VectorXd& gamma) {
  if (gamma.size() != sys.dim()) throw Error(Errc::DimensionMismatch, "state does not match layout");
  const Eigen::VectorXd u = sys.density(gamma);
  FluxVector f;
  f.link.resize(static_cast<Index>(sys.links().size()));
  Index q = 0;
  for (const Link& l : sys.links()) f.link[q++] = sys.conductance(l) * (u[l.i] - u[l.j]);
  return f;
}

Eigen::VectorXd divergence(const DiscreteSystem& sys, const FluxVector& f) {
  Eigen::VectorXd div = Eigen::VectorXd::Zero(sys.dim());
  Index q = 0;
  for (const Link& l : sys.links()) {
    div[l.i] += f.link[q];
    div[l.j] -= f.link[q];
    ++q;
  }
  return div;
}

double interior_flux(const DiscreteSystem& sys, const FluxVector& f, std::size_t e, int k) {
  const Index a = sys.layout().cell(e, k), b = sys.layout().cell(e, k + 1);
  Index q = 0;
  for (const Link& l : sys.links()) {
    if (l.i == a && l.j == b) return f.link[q];
    ++q;
  }
  throw Error(Errc::MappingMismatch, "no interior link for the requested cell pair");
}

double boundary_flux(const DiscreteSystem& sys, const FluxVector& f, std::size_t e, EndpointRole role) {
  const StateLayout& L = sys.layout();
  const Index v = L.vertex_slot[L.edge_ends[e][role_index(role)]];
  Index q = 0;
  for (const Link& l : sys.links()) {
    if (l.kind == LinkKind::Jump && l.edge == e && l.j == v) return f.link[q];
    ++q;
  }
  throw Error(Errc::MappingMismatch, "no boundary link for the requested incidence");
}

DissipationBreakdown& DissipationBreakdown::operator+=(const DissipationBreakdown& o) {
  edge_rate += o.edge_rate;
  edge_slope += o.edge_slope;
  jump_rate += o.jump_rate;
  jump_slope += o.jump_slope;
  return *this;
}

DissipationBreakdown operator*(double s, DissipationBreakdown b) {
  b.edge_rate *= s;
  b.edge_slope *= s;
  b.jump_rate *= s;
  b.jump_slope *= s;
  return b;
}

DissipationBreakdown rate_R_n(const DiscreteSystem& sys, const Eigen::VectorXd& gamma, const FluxVector& f,
                              double clip) {
  const Eigen::VectorXd g = clip_masses(gamma, clip);
  DissipationBreakdown out;
  Index q = 0;
  for (const Link& l : sys.links()) {
    const double sigma = l.kappa * std::sqrt(g[l.i] * g[l.j]);
    const double r = cosh_primal_weighted(f.link[q++], sigma);
    if (!std::isfinite(r)) throw Error(Errc::InfeasibleFlux, "nonzero flux through a link with sigma = 0");
    (l.kind == LinkKind::Diffusion ? out.edge_rate : out.jump_rate) += r;
  }
  return out;
}

DissipationBreakdown slope_I_n(const DiscreteSystem& sys, const Eigen::VectorXd& gamma, double clip) {
  const Eigen::VectorXd u = sys.density(clip_masses(gamma, clip));
  DissipationBreakdown out;
  for (const Link& l : sys.links()) {
    const double diff = std::sqrt(u[l.i]) - std::sqrt(u[l.j]);
    // 2 sigma(w_i, w_j) |sqrt(u_i) - sqrt(u_j)|^2, i.e. R*(gamma, -grad E').
    const double s = 2.0 * sys.conductance(l) * diff * diff;
    (l.kind == LinkKind::Diffusion ? out.edge_slope : out.jump_slope) += s;
  }
  return out;
}

FunctionalReport edp_L_n(const DiscreteSystem& sys, const Trajectory& traj, double clip) {
  FunctionalReport rep;
  rep.times = traj.times;
  const std::size_t T = traj.size();
  if (T < 2) throw Error(Errc::GridMismatch, "trajectory needs at least two times");
  std::vector<DissipationBreakdown> parts(T);
  for (std::size_t i = 0; i < T; ++i) {
    const Eigen::VectorXd g = traj.state(i);
    rep.entropy.push_back(relative_entropy(sys, g, clip));
    parts[i] = rate_R_n(sys, g, flux_from_state(sys, g), clip);
    parts[i] += slope_I_n(sys, g, clip);
    rep.dissipation_rate.push_back(parts[i].total());
  }
  for (std::size_t i = 1; i < T; ++i) {
    const double h = traj.times[i] - traj.times[i - 1];
    rep.breakdown += (0.5 * h) * parts[i];
    rep.breakdown += (0.5 * h) * parts[i - 1];
  }
  rep.L_n = rep.entropy.back() - rep.entropy.front() + rep.breakdown.total();
  return rep;
}

double EmbeddedState::density(std::size_t e, double x) const {
  const Eigen::VectorXd& c = cell_density[e];
  const Index n = c.size();
  Index k = static_cast<Index>(std::floor(x / lengths[e] * static_cast<double>(n)));
  k = std::clamp<Index>(k, 0, n - 1);
  return c[k];
}

double EmbeddedState::total_mass() const {
  double acc = vertex_mass.sum();
  for (std::size_t e = 0; e < cell_density.size(); ++e)
    acc += cell_density[e].sum() * lengths[e] / static_cast<double>(cell_density[e].size());
  return acc;
}

double EmbeddedFlux::value(std::size_t e, double x) const {
  const Eigen::VectorXd& v = nodes[e];
  const Index n = v.size() - 1;
  const double h = lengths[e] / static_cast<double>(n);
  if (x <= 0.0 || x >= lengths[e]) return 0.0;
  const Index k = std::min<Index>(static_cast<Index>(std::floor(x / h)), n - 1);
  const double s = x / h - static_cast<double>(k);
  return (1.0 - s) * v[k] + s * v[k + 1];
}

double EmbeddedFlux::integral(std::size_t e) const {
  const Index n = nodes[e].size() - 1;
  return lengths[e] / static_cast<double>(n) * nodes[e].sum();
}

namespace {

void require_full_cells(const DiscreteSystem& sys) {
  if (sys.kind() != SystemKind::Prelimit && sys.kind() != SystemKind::Custom)
    throw Error(Errc::MappingMismatch, "embedding needs a system with all edge cells");
  if (sys.layout().cells.empty()) throw Error(Errc::MappingMismatch, "system has no edge cells");
}

std::vector<double> edge_lengths(const DiscreteSystem& sys) {
  const StateLayout& L = sys.layout();
  if (L.lengths.size() == L.cells.size()) return L.lengths;
  return std::vector<double>(L.cells.size(), 1.0);
}

}  // namespace

EmbeddedState embed_state(const DiscreteSystem& sys, const Eigen::VectorXd& gamma) {
  require_full_cells(sys);
  const StateLayout& L = sys.layout();
  EmbeddedState s;
  s.vertex_mass.resize(static_cast<Index>(L.vertex_slot.size()));
  for (std::size_t v = 0; v < L.vertex_slot.size(); ++v) s.vertex_mass[static_cast<Index>(v)] = gamma[L.vertex_slot[v]];
  s.lengths = edge_lengths(sys);
  for (std::size_t e = 0; e < L.cells.size(); ++e) {
    Eigen::VectorXd c(L.n);
    for (int k = 1; k <= L.n; ++k) c[k - 1] = gamma[L.cell(e, k)] * L.n / s.lengths[e];
    s.cell_density.push_back(std::move(c));
  }
  return s;
}

EmbeddedFlux embed_flux(const DiscreteSystem& sys, const FluxVector& f) {
  require_full_cells(sys);
  const StateLayout& L = sys.layout();
  EmbeddedFlux out;
  out.lengths = edge_lengths(sys);
  for (std::size_t e = 0; e < L.cells.size(); ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(L.n + 1);
    // The s-averaged staggered indicator of interface k is the hat centred at x = k h.
    for (int k = 1; k < L.n; ++k) v[k] = out.lengths[e] * interior_flux(sys, f, e, k);
    out.nodes.push_back(std::move(v));
  }
  return out;
}

ComparisonMap identity_map(const DiscreteSystem& sys) {
  ComparisonMap m;
  m.n = std::max(sys.n(), 1);
  for (Index i = 0; i < sys.dim(); ++i)
    m.pairs.push_back({i, i, sys.layout().slots[static_cast<std::size_t>(i)].kind == SlotKind::Cell});
  return m;
}

ComparisonMap kirchhoff_map(const DiscreteSystem& pre, const DiscreteSystem& lim) {
  if (pre.kind() != SystemKind::Prelimit || lim.kind() != SystemKind::KirchhoffLimit || pre.n() != lim.n())
    throw Error(Errc::MappingMismatch, "Kirchhoff map needs a prelimit and a Kirchhoff limit with equal n");
  const StateLayout& P = pre.layout();
  const StateLayout& K = lim.layout();
  ComparisonMap m;
  m.n = pre.n();
  for (std::size_t v = 0; v < P.vertex_slot.size(); ++v) m.pairs.push_back({P.vertex_slot[v], K.vertex_slot[v], false});
  for (std::size_t e = 0; e < P.cells.size(); ++e) {
    for (int k = 1; k <= m.n; ++k) {
      const Index kb = K.cell(e, k);
      if (kb >= 0) {
        m.pairs.push_back({P.cell(e, k), kb, true});
      } else {
        // Boundary cells take the patch value of their vertex.
        const std::size_t v = P.edge_ends[e][k == 1 ? 0 : 1];
        m.pairs.push_back({P.cell(e, k), K.vertex_slot[v], true});
      }
    }
  }
  return m;
}

ComparisonMap fast_edge_map(const DiscreteSystem& pre, const DiscreteSystem& lim) {
  if (pre.kind() != SystemKind::Prelimit || lim.kind() != SystemKind::FastEdgeLimit)
    throw Error(Errc::MappingMismatch, "fast-edge map needs a prelimit and a fast-edge limit");
  const StateLayout& P = pre.layout();
  const StateLayout& F = lim.layout();
  ComparisonMap m;
  m.n = pre.n();
  for (std::size_t v = 0; v < P.vertex_slot.size(); ++v) m.pairs.push_back({P.vertex_slot[v], F.vertex_slot[v], false});
  for (std::size_t e = 0; e < P.cells.size(); ++e)
    for (int k = 1; k <= m.n; ++k) m.pairs.push_back({P.cell(e, k), F.edge_slot[e], true});
  return m;
}

ComparisonMap vertex_map(const DiscreteSystem& a, const DiscreteSystem& b) {
  const StateLayout& A = a.layout();
  const StateLayout& B = b.layout();
  if (A.vertex_slot.size() != B.vertex_slot.size()) throw Error(Errc::MappingMismatch, "vertex counts differ");
  ComparisonMap m;
  m.n = std::max(a.n(), 1);
  for (std::size_t v = 0; v < A.vertex_slot.size(); ++v) m.pairs.push_back({A.vertex_slot[v], B.vertex_slot[v], false});
  return m;
}

std::vector<double> hellinger_integrand(const DiscreteSystem& sa, const Trajectory& ta, const DiscreteSystem& sb,
                                        const Trajectory& tb, const ComparisonMap& map, CellWeight weight) {
  if (ta.size() != tb.size()) throw Error(Errc::GridMismatch, "trajectories have different grids");
  for (std::size_t i = 0; i < ta.size(); ++i)
    if (std::abs(ta.times[i] - tb.times[i]) > 1e-12 * std::max(1.0, std::abs(ta.times[i])))
      throw Error(Errc::GridMismatch, "output times differ");
  for (const SlotPair& p : map.pairs)
    if (p.a < 0 || p.b < 0 || p.a >= sa.dim() || p.b >= sb.dim())
      throw Error(Errc::MappingMismatch, "pair outside the layouts");
  const double cw = weight == CellWeight::PerCell ? 1.0 / map.n : 1.0;
  std::vector<double> out(ta.size());
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const Eigen::VectorXd ua = sa.density(clip_masses(ta.state(i)));
    const Eigen::VectorXd ub = sb.density(clip_masses(tb.state(i)));
    double acc = 0.0;
    for (const SlotPair& p : map.pairs) {
      const double d = std::sqrt(ua[p.a]) - std::sqrt(ub[p.b]);
      acc += (p.cell ? cw : 1.0) * d * d;
    }
    out[i] = acc;
  }
  return out;
}

double hellinger(const DiscreteSystem& sa, const Trajectory& ta, const DiscreteSystem& sb, const Trajectory& tb,
                 const ComparisonMap& map, CellWeight weight) {
  const std::vector<double> f = hellinger_integrand(sa, ta, sb, tb, map, weight);
  return 0.5 * trapezoid(ta.times, Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Index>(f.size())));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error(Errc::InvalidConfig, "slope fit needs >= 2 matching points");
  const Index m = static_cast<Index>(x.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd Y(m);
  for (Index i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::log(x[static_cast<std::size_t>(i)]);
    Y[i] = std::log(y[static_cast<std::size_t>(i)]);
  }
  return X.colPivHouseholderQr().solve(Y)[1];
}

}  // namespace mgf
