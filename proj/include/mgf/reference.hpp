#pragma once

#include <array>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "mgf/graph.hpp"

namespace mgf {

struct Polynomial {
  std::vector<double> coeffs;  // ascending degree
};

struct Sinusoid {
  double amp = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  double offset = 0.0;
};

struct Tabulated {
  std::vector<double> x;  // strictly increasing
  std::vector<double> y;
};

// Raw edge density x -> pi(x) on [0, length].
class EdgeDensity {
 public:
  using Expr = std::variant<Polynomial, Sinusoid, Tabulated>;

  EdgeDensity() : expr_(Polynomial{{1.0}}) {}
  explicit EdgeDensity(Expr expr) : expr_(std::move(expr)) {}

  static EdgeDensity poly(std::vector<double> coeffs) { return EdgeDensity(Polynomial{std::move(coeffs)}); }
  static EdgeDensity sinusoid(double amp, double omega, double phase, double offset) {
    return EdgeDensity(Sinusoid{amp, omega, phase, offset});
  }
  static EdgeDensity tabulated(std::vector<double> x, std::vector<double> y) {
    return EdgeDensity(Tabulated{std::move(x), std::move(y)});
  }

  double operator()(double x) const;
  // Integral over [a, b]; Gauss-Legendre for smooth kinds, exact for Tabulated.
  double integral(double a, double b) const;
  // Throws unless strictly positive on [0, length] (sampled at quadrature nodes).
  void validate(double length) const;

  const Expr& expr() const { return expr_; }

 private:
  Expr expr_;
};

// Vertex weights and edge densities. Edge density of edge e is edge_scale * raw[e](x).
struct ReferenceMeasure {
  Eigen::VectorXd omega;
  std::vector<EdgeDensity> raw;
  std::vector<double> lengths;
  double edge_scale = 1.0;
  double Z = 1.0;

  std::size_t num_edges() const { return raw.size(); }
  double pi(std::size_t e, double x) const { return edge_scale * raw[e](x); }
  double edge_mass(std::size_t e) const { return edge_scale * raw_edge_mass_[e]; }
  double vertex_mass() const { return omega.sum(); }
  double edges_mass() const;
  double total_mass() const { return vertex_mass() + edges_mass(); }

  // Builds the cached raw edge masses; called by the constructors below.
  void refresh();

 private:
  std::vector<double> raw_edge_mass_;
};

ReferenceMeasure normalize(const Eigen::VectorXd& raw_vertex_weights,
                           const std::vector<EdgeDensity>& raw_densities, const MetricGraph& g);

// Masses of the n cells of edge e, 8-point Gauss-Legendre per cell.
Eigen::VectorXd cell_masses(const ReferenceMeasure& m, std::size_t e, int n);

struct CellMeasures {
  int n = 0;
  std::vector<Eigen::VectorXd> masses;  // one vector per edge
};
CellMeasures cell_measures(const ReferenceMeasure& m, int n);

// How pi^e|_v is evaluated: the continuum endpoint value, or the first/last cell average.
enum class EndpointEval { Continuum, CellAverage };

double endpoint_density(const ReferenceMeasure& m, const MetricGraph& g, std::size_t e, EndpointRole role,
                        EndpointEval how = EndpointEval::Continuum, int n = 0);

// Symmetric rates kappa per (edge, endpoint) with directed rates completed by detailed balance.
struct RateSpec {
  std::vector<std::array<double, 2>> kappa;      // [edge][Tail=0, Head=1]
  std::vector<std::array<double, 2>> to_vertex;  // r(e, v)
  std::vector<std::array<double, 2>> to_edge;    // r(v, e)
  EndpointEval endpoint = EndpointEval::Continuum;
  int n = 0;

  double k(std::size_t e, EndpointRole role) const { return kappa[e][role == EndpointRole::Tail ? 0 : 1]; }
};

inline int role_index(EndpointRole role) { return role == EndpointRole::Tail ? 0 : 1; }

RateSpec rates_from_detailed_balance(const std::vector<std::array<double, 2>>& r_vertex_to_edge,
                                     const ReferenceMeasure& m, const MetricGraph& g,
                                     EndpointEval how = EndpointEval::Continuum, int n = 0);

RateSpec rates_from_kappa(const std::vector<std::array<double, 2>>& kappa, const ReferenceMeasure& m,
                          const MetricGraph& g, EndpointEval how = EndpointEval::Continuum, int n = 0);

// Recomputes directed rates from kappa under measure m.
void complete_directed_rates(RateSpec& rates, const ReferenceMeasure& m, const MetricGraph& g);

enum class Regime { Unscaled, Kirchhoff, FastEdge, Combinatorial, Joint };

// Kirchhoff kappa scaling: kappa/sqrt(eps) from r(v,e)/eps plus detailed balance, or kappa/eps.
enum class KirchhoffRateScaling { DetailedBalance, Symmetric };

struct ScalingRegime {
  Regime tag = Regime::Unscaled;
  double eps = 1.0;
  KirchhoffRateScaling kirchhoff_rates = KirchhoffRateScaling::DetailedBalance;
};

struct ScaledParameters {
  ScalingRegime regime;
  ReferenceMeasure measure;
  RateSpec rates;
  Eigen::VectorXd d;
  double Z_eps = 1.0;
  double kappa_factor = 1.0;
};

ScaledParameters apply_scaling(const ScalingRegime& regime, const ReferenceMeasure& m, const RateSpec& rates,
                               const Eigen::VectorXd& d, const MetricGraph& g);

template <typename Scalar>
Scalar harmonic_mean(Scalar a, Scalar b) {
  return Scalar(2) / (Scalar(1) / a + Scalar(1) / b);
}

// Effective vertex-to-vertex rate of edge e = vw after contracting the edge.
double harmonic_rate(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates, std::size_t e);
double harmonic_rate(const MetricGraph& g, const ReferenceMeasure& m, const RateSpec& rates, std::size_t v,
                     std::size_t w, std::size_t e);

const char* regime_name(Regime r);

}  // namespace mgf
