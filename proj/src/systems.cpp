#include "mgf/systems.hpp"

#include <cmath>

#include "mgf/error.hpp"

namespace mgf {

namespace {

StateLayout vertex_layout(const MetricGraph& g, const Eigen::VectorXd& omega) {
  StateLayout L;
  L.weights = omega;
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    L.slots.push_back({SlotKind::Vertex, v, 0});
    L.vertex_slot.push_back(static_cast<Index>(v));
  }
  L.edge_slot.assign(g.num_edges(), -1);
  for (const Edge& e : g.edges()) {
    L.edge_ends.push_back({e.tail, e.head});
    L.lengths.push_back(e.length);
  }
  return L;
}

void append_slot(StateLayout& L, Slot s, double w) {
  L.slots.push_back(s);
  L.weights.conservativeResize(L.weights.size() + 1);
  L.weights[L.weights.size() - 1] = w;
}

double coupling_kappa(VertexCoupling c, double kappa, double cell_mass, double n_over_len, double endpoint_pi) {
  switch (c) {
    case VertexCoupling::CellMass: return kappa;
    case VertexCoupling::CellDensity: return kappa * std::sqrt(n_over_len);
    case VertexCoupling::Endpoint: return kappa * std::sqrt(endpoint_pi / cell_mass);
  }
  return kappa;
}

}  // namespace

DiscreteSystem DiscreteSystem::from_links(SystemKind kind, StateLayout layout, std::vector<Link> links) {
  DiscreteSystem s;
  s.kind_ = kind;
  s.layout_ = std::move(layout);
  s.links_ = std::move(links);
  const Index N = s.layout_.dim();
  const Eigen::VectorXd& w = s.layout_.weights;
  if (w.size() != N) throw Error(Errc::DimensionMismatch, "layout weights");
  for (Index i = 0; i < N; ++i)
    if (!(w[i] > 0.0)) throw Error(Errc::NonPositiveWeight, "slot " + std::to_string(i));

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(4 * s.links_.size());
  for (const Link& l : s.links_) {
    if (l.i < 0 || l.j < 0 || l.i >= N || l.j >= N || l.i == l.j)
      throw Error(Errc::DimensionMismatch, "link endpoints out of range");
    if (!(l.kappa > 0.0)) throw Error(Errc::NonPositiveRate, "link weight must be positive");
    const double c = s.conductance(l);
    // W du/dt = L u, with L the weighted graph Laplacian; in mass variables A = L W^{-1}.
    trip.emplace_back(l.i, l.j, c / w[l.j]);
    trip.emplace_back(l.j, l.i, c / w[l.i]);
    trip.emplace_back(l.i, l.i, -c / w[l.i]);
    trip.emplace_back(l.j, l.j, -c / w[l.j]);
  }
  s.A_.resize(N, N);
  s.A_.setFromTriplets(trip.begin(), trip.end());
  s.A_.makeCompressed();
  return s;
}

double DiscreteSystem::conductance(const Link& l) const {
  return l.kappa * std::sqrt(layout_.weights[l.i] * layout_.weights[l.j]);
}

DiscreteSystem assemble_prelimit(const MetricGraph& g, const ScaledParameters& p, int n,
                                 const PrelimitOptions& opt) {
  if (n < 3) throw Error(Errc::TooFewCells, "prelimit needs n >= 3, got " + std::to_string(n));
  const ReferenceMeasure& m = p.measure;
  StateLayout L = vertex_layout(g, m.omega);
  L.n = n;
  L.cells.assign(g.num_edges(), std::vector<Index>(static_cast<std::size_t>(n), -1));
  std::vector<Link> links;

  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const Eigen::VectorXd w = cell_masses(m, e, n);
    for (int k = 1; k <= n; ++k) {
      L.cells[e][static_cast<std::size_t>(k - 1)] = L.dim();
      append_slot(L, {SlotKind::Cell, e, k}, w[k - 1]);
    }
    const double n_over_len = n / ed.length;
    const double diff = n_over_len * n_over_len * p.d[static_cast<Index>(e)];
    for (int k = 1; k < n; ++k) links.push_back({L.cell(e, k), L.cell(e, k + 1), diff, LinkKind::Diffusion, e});

    const double k_tail = coupling_kappa(opt.coupling, p.rates.k(e, EndpointRole::Tail), w[0], n_over_len,
                                         m.pi(e, 0.0));
    const double k_head = coupling_kappa(opt.coupling, p.rates.k(e, EndpointRole::Head), w[n - 1], n_over_len,
                                         m.pi(e, ed.length));
    links.push_back({L.cell(e, 1), static_cast<Index>(ed.tail), k_tail, LinkKind::Jump, e});
    links.push_back({L.cell(e, n), static_cast<Index>(ed.head), k_head, LinkKind::Jump, e});
  }
  return DiscreteSystem::from_links(SystemKind::Prelimit, std::move(L), std::move(links));
}

DiscreteSystem assemble_kirchhoff_limit(const MetricGraph& g, const ReferenceMeasure& base, const Eigen::VectorXd& d,
                                        int n) {
  if (n < 5) throw Error(Errc::TooFewCells, "Kirchhoff limit needs n >= 5, got " + std::to_string(n));
  if (g.num_edges() == 0) throw Error(Errc::InvalidConfig, "Kirchhoff limit needs edges");
  ReferenceMeasure m = base;
  m.edge_scale = base.edge_scale / base.edges_mass();
  m.omega.setZero();

  StateLayout L;
  L.n = n;
  L.weights = Eigen::VectorXd::Zero(static_cast<Index>(g.num_vertices()));
  for (std::size_t v = 0; v < g.num_vertices(); ++v) {
    L.slots.push_back({SlotKind::Patch, v, 0});
    L.vertex_slot.push_back(static_cast<Index>(v));
  }
  L.edge_slot.assign(g.num_edges(), -1);
  for (const Edge& e : g.edges()) {
    L.edge_ends.push_back({e.tail, e.head});
    L.lengths.push_back(e.length);
  }
  L.cells.assign(g.num_edges(), std::vector<Index>(static_cast<std::size_t>(n), -1));

  std::vector<Eigen::VectorXd> w(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    w[e] = cell_masses(m, e, n);
    L.weights[static_cast<Index>(ed.tail)] += w[e][0];
    L.weights[static_cast<Index>(ed.head)] += w[e][n - 1];
    for (int k = 2; k <= n - 1; ++k) {
      L.cells[e][static_cast<std::size_t>(k - 1)] = L.dim();
      append_slot(L, {SlotKind::Cell, e, k}, w[e][k - 1]);
    }
  }

  std::vector<Link> links;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    const double n_over_len = n / ed.length;
    const double diff = n_over_len * n_over_len * d[static_cast<Index>(e)];
    for (int k = 2; k < n - 1; ++k) links.push_back({L.cell(e, k), L.cell(e, k + 1), diff, LinkKind::Diffusion, e});
    // Patch exchanges use the conductances of the merged first and last cells.
    const Index tail = static_cast<Index>(ed.tail), head = static_cast<Index>(ed.head);
    const Index c2 = L.cell(e, 2), cl = L.cell(e, n - 1);
    const double c_tail = diff * std::sqrt(w[e][0] * w[e][1]);
    const double c_head = diff * std::sqrt(w[e][n - 2] * w[e][n - 1]);
    links.push_back({tail, c2, c_tail / std::sqrt(L.weights[tail] * L.weights[c2]), LinkKind::Diffusion, e});
    links.push_back({cl, head, c_head / std::sqrt(L.weights[cl] * L.weights[head]), LinkKind::Diffusion, e});
  }
  return DiscreteSystem::from_links(SystemKind::KirchhoffLimit, std::move(L), std::move(links));
}

DiscreteSystem assemble_fast_edge(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates) {
  StateLayout L = vertex_layout(g, m.omega);
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    L.edge_slot[e] = L.dim();
    append_slot(L, {SlotKind::EdgeSlot, e, 0}, m.edge_mass(e));
  }
  std::vector<Link> links;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    for (EndpointRole role : {EndpointRole::Tail, EndpointRole::Head}) {
      const Index v = static_cast<Index>(ed.endpoint(role));
      const double pv = endpoint_density(m, g, e, role, EndpointEval::Continuum);
      const double c = rates.k(e, role) * std::sqrt(pv * m.omega[v]);
      links.push_back({L.edge_slot[e], v, c / std::sqrt(m.omega[v] * m.edge_mass(e)), LinkKind::Jump, e});
    }
  }
  return DiscreteSystem::from_links(SystemKind::FastEdgeLimit, std::move(L), std::move(links));
}

DiscreteSystem assemble_combinatorial(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates) {
  StateLayout L = vertex_layout(g, m.omega / m.vertex_mass());
  std::vector<Link> links;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edge(e);
    links.push_back({static_cast<Index>(ed.tail), static_cast<Index>(ed.head), harmonic_rate(g, m, rates, e),
                     LinkKind::Jump, e});
  }
  return DiscreteSystem::from_links(SystemKind::CombinatorialLimit, std::move(L), std::move(links));
}

Eigen::VectorXd stationary_state(const DiscreteSystem& sys, double total) {
  Eigen::VectorXd g = sys.weights();
  if (total >= 0.0) g *= total / g.sum();
  const SparseMatrix& A = sys.generator();
  double a_norm = 0.0;
  for (Index r = 0; r < A.rows(); ++r) a_norm = std::max(a_norm, A.row(r).cwiseAbs().sum());
  const double res = (A * g).cwiseAbs().maxCoeff();
  if (res > 1e-12 * a_norm * g.cwiseAbs().maxCoeff())
    throw Error(Errc::ResidualTooLarge, "|A gamma*| = " + std::to_string(res));
  return g;
}

const char* system_kind_name(SystemKind k) {
  switch (k) {
    case SystemKind::Prelimit: return "prelimit";
    case SystemKind::KirchhoffLimit: return "kirchhoff-limit";
    case SystemKind::FastEdgeLimit: return "fast-edge-limit";
    case SystemKind::CombinatorialLimit: return "combinatorial-limit";
    case SystemKind::Custom: return "custom";
  }
  return "unknown";
}

std::string slot_label(const MetricGraph& g, const Slot& s) {
  switch (s.kind) {
    case SlotKind::Vertex: return g.vertex_ids()[s.id];
    case SlotKind::Patch: return "patch:" + g.vertex_ids()[s.id];
    case SlotKind::EdgeSlot: return g.edge(s.id).id;
    case SlotKind::Cell: return g.edge(s.id).id + ":" + std::to_string(s.k);
  }
  return "?";
}

}  // namespace mgf
