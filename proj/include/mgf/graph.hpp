#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mgf {

enum class EndpointRole { Tail, Head };

struct EdgeSpec {
  std::string tail;
  std::string head;
  double length = 1.0;
  std::string id;  // optional; defaults to "e<k>" (1-based)
};

struct Edge {
  std::size_t tail;
  std::size_t head;
  double length;
  std::string id;

  std::size_t endpoint(EndpointRole role) const { return role == EndpointRole::Tail ? tail : head; }
};

struct Incidence {
  std::size_t edge;
  EndpointRole role;
};

// Immutable metric graph. Vertex and edge order fix the state layout.
class MetricGraph {
 public:
  static MetricGraph build(const std::vector<std::string>& vertex_ids,
                           const std::vector<EdgeSpec>& edge_specs);

  std::size_t num_vertices() const { return vertex_ids_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<std::string>& vertex_ids() const { return vertex_ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t e) const;
  const std::vector<Incidence>& incident(std::size_t v) const;

  std::size_t vertex_index(const std::string& id) const;
  std::size_t edge_index(const std::string& id) const;

 private:
  std::vector<std::string> vertex_ids_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

inline MetricGraph build_graph(const std::vector<std::string>& vertex_ids,
                               const std::vector<EdgeSpec>& edge_specs) {
  return MetricGraph::build(vertex_ids, edge_specs);
}

// -1 at the tail, +1 at the head, 0 if v is not an endpoint of e.
int incidence_sign(const MetricGraph& g, std::size_t v, std::size_t e);

}  // namespace mgf
