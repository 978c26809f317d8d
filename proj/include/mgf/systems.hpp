#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mgf/graph.hpp"
#include "mgf/reference.hpp"

namespace mgf {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class SlotKind { Vertex, Cell, EdgeSlot, Patch };

struct Slot {
  SlotKind kind;
  std::size_t id;  // vertex or edge index
  int k = 0;       // 1-based cell index for Cell slots
};

struct StateLayout {
  std::vector<Slot> slots;
  Eigen::VectorXd weights;                // reference masses per slot
  std::vector<Index> vertex_slot;         // vertex or patch slot per vertex, -1 if absent
  std::vector<Index> edge_slot;           // FastEdge edge slot per edge, -1 if absent
  std::vector<std::vector<Index>> cells;  // cells[e][k-1], -1 if the cell is not a slot
  std::vector<std::array<std::size_t, 2>> edge_ends;  // (tail, head) vertex per edge
  std::vector<double> lengths;                        // edge lengths
  int n = 0;

  Index dim() const { return static_cast<Index>(slots.size()); }
  Index cell(std::size_t e, int k) const { return cells.empty() ? -1 : cells[e][static_cast<std::size_t>(k - 1)]; }
};

enum class LinkKind { Diffusion, Jump };

// Reversible exchange between slots i and j. Conductance c = kappa * sqrt(w_i w_j),
// the flux i -> j is c (u_i - u_j), and the rate/slope weight is sigma(a, b) = kappa * sqrt(a b).
struct Link {
  Index i;
  Index j;
  double kappa;
  LinkKind kind;
  std::size_t edge = 0;
};

enum class SystemKind { Prelimit, KirchhoffLimit, FastEdgeLimit, CombinatorialLimit, Custom };

class DiscreteSystem {
 public:
  static DiscreteSystem from_links(SystemKind kind, StateLayout layout, std::vector<Link> links);

  SystemKind kind() const { return kind_; }
  int n() const { return layout_.n; }
  Index dim() const { return layout_.dim(); }
  const StateLayout& layout() const { return layout_; }
  const Eigen::VectorXd& weights() const { return layout_.weights; }
  const std::vector<Link>& links() const { return links_; }
  const SparseMatrix& generator() const { return A_; }
  double conductance(const Link& l) const;

  Eigen::VectorXd density(const Eigen::VectorXd& gamma) const { return gamma.cwiseQuotient(layout_.weights); }

 private:
  SystemKind kind_ = SystemKind::Custom;
  StateLayout layout_;
  std::vector<Link> links_;
  SparseMatrix A_;
};

// Weight of the edge-cell to vertex exchange in the prelimit.
//   CellMass:    kappa * sqrt(omega_v * w_1)
//   CellDensity: kappa * sqrt(omega_v * n w_1 / l)   (cell average of pi at the endpoint)
//   Endpoint:    kappa * sqrt(omega_v * pi(endpoint))
enum class VertexCoupling { CellMass, CellDensity, Endpoint };

struct PrelimitOptions {
  VertexCoupling coupling = VertexCoupling::CellDensity;
};

DiscreteSystem assemble_prelimit(const MetricGraph& g, const ScaledParameters& p, int n,
                                 const PrelimitOptions& opt = {});

// Uses the edge part of m renormalised to unit mass; vertex weights do not enter.
DiscreteSystem assemble_kirchhoff_limit(const MetricGraph& g, const ReferenceMeasure& m, const Eigen::VectorXd& d,
                                        int n);

DiscreteSystem assemble_fast_edge(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates);

DiscreteSystem assemble_combinatorial(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates);

// Reference weights rescaled to the given total mass; checks A gamma* = 0.
Eigen::VectorXd stationary_state(const DiscreteSystem& sys, double total = -1.0);

template <typename Derived>
typename Derived::Scalar total_mass(const Eigen::MatrixBase<Derived>& gamma) {
  return gamma.sum();
}

const char* system_kind_name(SystemKind k);
std::string slot_label(const MetricGraph& g, const Slot& s);

}  // namespace mgf
