#include "mgf/graph.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "mgf/error.hpp"

namespace mgf {

MetricGraph MetricGraph::build(const std::vector<std::string>& vertex_ids,
                               const std::vector<EdgeSpec>& edge_specs) {
  MetricGraph g;
  g.vertex_ids_ = vertex_ids;
  {
    std::set<std::string> seen(vertex_ids.begin(), vertex_ids.end());
    if (seen.size() != vertex_ids.size()) throw Error(Errc::DuplicateVertex, "vertex ids must be distinct");
  }
  if (vertex_ids.empty()) throw Error(Errc::Disconnected, "graph has no vertices");

  g.adjacency_.resize(vertex_ids.size());
  std::set<std::pair<std::size_t, std::size_t>> oriented;
  for (std::size_t k = 0; k < edge_specs.size(); ++k) {
    const EdgeSpec& s = edge_specs[k];
    const std::size_t t = g.vertex_index(s.tail);
    const std::size_t h = g.vertex_index(s.head);
    if (t == h) throw Error(Errc::SelfLoop, "edge " + std::to_string(k + 1) + " at vertex " + s.tail);
    if (!(s.length > 0.0)) throw Error(Errc::NonPositiveLength, "edge " + std::to_string(k + 1));
    if (oriented.count({h, t})) throw Error(Errc::AntiParallelDuplicate, s.tail + "-" + s.head);
    oriented.insert({t, h});
    std::string id = s.id.empty() ? "e" + std::to_string(k + 1) : s.id;
    for (const Edge& other : g.edges_)
      if (other.id == id) throw Error(Errc::InvalidConfig, "duplicate edge id " + id);
    g.edges_.push_back({t, h, s.length, std::move(id)});
    g.adjacency_[t].push_back({k, EndpointRole::Tail});
    g.adjacency_[h].push_back({k, EndpointRole::Head});
  }

  std::vector<char> reached(g.num_vertices(), 0);
  std::vector<std::size_t> stack{0};
  reached[0] = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (const Incidence& inc : g.adjacency_[v]) {
      const Edge& e = g.edges_[inc.edge];
      const std::size_t w = inc.role == EndpointRole::Tail ? e.head : e.tail;
      if (!reached[w]) {
        reached[w] = 1;
        stack.push_back(w);
      }
    }
  }
  if (std::find(reached.begin(), reached.end(), 0) != reached.end())
    throw Error(Errc::Disconnected, "graph is not connected");
  return g;
}

const Edge& MetricGraph::edge(std::size_t e) const {
  if (e >= edges_.size()) throw Error(Errc::UnknownEdge, std::to_string(e));
  return edges_[e];
}

const std::vector<Incidence>& MetricGraph::incident(std::size_t v) const {
  if (v >= adjacency_.size()) throw Error(Errc::UnknownVertex, std::to_string(v));
  return adjacency_[v];
}

std::size_t MetricGraph::vertex_index(const std::string& id) const {
  auto it = std::find(vertex_ids_.begin(), vertex_ids_.end(), id);
  if (it == vertex_ids_.end()) throw Error(Errc::UnknownVertex, id);
  return static_cast<std::size_t>(it - vertex_ids_.begin());
}

std::size_t MetricGraph::edge_index(const std::string& id) const {
  for (std::size_t e = 0; e < edges_.size(); ++e)
    if (edges_[e].id == id) return e;
  throw Error(Errc::UnknownEdge, id);
}

int incidence_sign(const MetricGraph& g, std::size_t v, std::size_t e) {
  if (v >= g.num_vertices()) throw Error(Errc::UnknownVertex, std::to_string(v));
  const Edge& ed = g.edge(e);
  if (ed.tail == v) return -1;
  if (ed.head == v) return 1;
  return 0;
}

}  // namespace mgf
