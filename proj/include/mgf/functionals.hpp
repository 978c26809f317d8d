#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "mgf/integrator.hpp"
#include "mgf/systems.hpp"

namespace mgf {

// Cosh-type dissipation pair. C* (s) = 4 (cosh(s/2) - 1) and its Legendre dual C.
template <typename Scalar>
Scalar cosh_primal(Scalar r) {
  using std::log;
  using std::sqrt;
  const Scalar q = sqrt(r * r + Scalar(4));
  return Scalar(2) * r * log((r + q) / Scalar(2)) - Scalar(2) * q + Scalar(4);
}

template <typename Scalar>
Scalar cosh_dual(Scalar s) {
  using std::cosh;
  return Scalar(4) * (cosh(s / Scalar(2)) - Scalar(1));
}

// Derivative of C*, i.e. the kinetic relation f = sigma * 2 sinh(xi / 2).
template <typename Scalar>
Scalar cosh_dual_prime(Scalar s) {
  using std::sinh;
  return Scalar(2) * sinh(s / Scalar(2));
}

// sigma * C(f / sigma), with the indicator convention at sigma = 0.
template <typename Scalar>
Scalar cosh_primal_weighted(Scalar f, Scalar sigma) {
  if (sigma > Scalar(0)) return sigma * cosh_primal(f / sigma);
  return f == Scalar(0) ? Scalar(0) : std::numeric_limits<Scalar>::infinity();
}

template <typename Scalar>
Scalar eta(Scalar r) {
  using std::log;
  return r > Scalar(0) ? r * log(r) - r + Scalar(1) : Scalar(1);
}

// Entries in [-clip, 0) are treated as zero; anything more negative throws.
Eigen::VectorXd clip_masses(const Eigen::VectorXd& gamma, double clip = 1e-9);

double relative_entropy(const Eigen::VectorXd& gamma, const Eigen::VectorXd& weights, double clip = 1e-9);
inline double relative_entropy(const DiscreteSystem& sys, const Eigen::VectorXd& gamma, double clip = 1e-9) {
  return relative_entropy(gamma, sys.weights(), clip);
}

// One flux per link of the system, oriented i -> j of the link. For diffusion links that is
// cell k -> k+1; for jump links it points from the edge side to the vertex.
struct FluxVector {
  Eigen::VectorXd link;
};

FluxVector flux_from_state(const DiscreteSystem& sys, const Eigen::VectorXd& gamma);
// Graph divergence: d gamma/dt = -div(f).
Eigen::VectorXd divergence(const DiscreteSystem& sys, const FluxVector& f);

// Interior flux f~_k (1 <= k < n) of edge e, and boundary flux at the tail/head toward the vertex.
double interior_flux(const DiscreteSystem& sys, const FluxVector& f, std::size_t e, int k);
double boundary_flux(const DiscreteSystem& sys, const FluxVector& f, std::size_t e, EndpointRole role);

struct DissipationBreakdown {
  double edge_rate = 0.0;
  double edge_slope = 0.0;
  double jump_rate = 0.0;
  double jump_slope = 0.0;
  double total() const { return edge_rate + edge_slope + jump_rate + jump_slope; }

  DissipationBreakdown& operator+=(const DissipationBreakdown& o);
};
DissipationBreakdown operator*(double s, DissipationBreakdown b);

DissipationBreakdown rate_R_n(const DiscreteSystem& sys, const Eigen::VectorXd& gamma, const FluxVector& f,
                              double clip = 1e-9);
DissipationBreakdown slope_I_n(const DiscreteSystem& sys, const Eigen::VectorXd& gamma, double clip = 1e-9);

struct FunctionalReport {
  std::vector<double> times;
  std::vector<double> entropy;
  std::vector<double> dissipation_rate;  // R_n + I_n at each output time
  DissipationBreakdown breakdown;        // time integrals
  double L_n = 0.0;
};

FunctionalReport edp_L_n(const DiscreteSystem& sys, const Trajectory& traj, double clip = 1e-9);

template <typename Derived>
double trapezoid(const std::vector<double>& t, const Eigen::MatrixBase<Derived>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < t.size(); ++i)
    acc += 0.5 * (t[i] - t[i - 1]) * (y[static_cast<Index>(i)] + y[static_cast<Index>(i - 1)]);
  return acc;
}

struct EmbeddedState {
  Eigen::VectorXd vertex_mass;
  std::vector<Eigen::VectorXd> cell_density;  // piecewise constant, n values per edge
  std::vector<double> lengths;

  double density(std::size_t e, double x) const;
  double total_mass() const;
};

// Piecewise linear edge flux density, given by its values at the n+1 cell interfaces.
struct EmbeddedFlux {
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> lengths;

  double value(std::size_t e, double x) const;
  double integral(std::size_t e) const;
};

EmbeddedState embed_state(const DiscreteSystem& sys, const Eigen::VectorXd& gamma);
EmbeddedFlux embed_flux(const DiscreteSystem& sys, const FluxVector& f);

enum class CellWeight { Literal, PerCell };

struct SlotPair {
  Index a;
  Index b;
  bool cell;  // cell terms carry the optional 1/n weight
};

struct ComparisonMap {
  std::vector<SlotPair> pairs;
  int n = 1;  // cell count used by the PerCell weight
};

ComparisonMap identity_map(const DiscreteSystem& sys);
// Interior cells 2..n-1 by identity; prelimit cells 1, n and the vertex slot against the patch.
ComparisonMap kirchhoff_map(const DiscreteSystem& prelimit, const DiscreteSystem& limit);
// Every edge cell against the edge slot, vertices directly.
ComparisonMap fast_edge_map(const DiscreteSystem& prelimit, const DiscreteSystem& limit);
ComparisonMap vertex_map(const DiscreteSystem& a, const DiscreteSystem& b);

// Integrand sum_pairs w (sqrt(u_a) - sqrt(u_b))^2 at each output time.
std::vector<double> hellinger_integrand(const DiscreteSystem& sa, const Trajectory& ta, const DiscreteSystem& sb,
                                        const Trajectory& tb, const ComparisonMap& map, CellWeight weight);

// 1/2 times the trapezoid integral of the integrand.
double hellinger(const DiscreteSystem& sa, const Trajectory& ta, const DiscreteSystem& sb, const Trajectory& tb,
                 const ComparisonMap& map, CellWeight weight = CellWeight::Literal);

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mgf
