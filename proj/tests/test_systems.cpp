#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "mgf/error.hpp"
#include "mgf/systems.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mgf;

namespace {

Eigen::MatrixXd dense(const DiscreteSystem& s) { return Eigen::MatrixXd(s.generator()); }

ScaledParameters unscaled(const Scenario& s) {
  return apply_scaling({Regime::Unscaled, 1.0}, s.measure, s.base_rates(), s.d, s.graph);
}

void expect_generator_properties(const DiscreteSystem& sys, const std::string& what) {
  const Eigen::MatrixXd A = dense(sys);
  const Eigen::VectorXd& w = sys.weights();
  for (Index j = 0; j < A.cols(); ++j) {
    const double colmax = A.col(j).cwiseAbs().maxCoeff();
    EXPECT_LE(std::abs(A.col(j).sum()), 1e-13 * colmax) << what << " column " << j;
  }
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) {
      if (i != j) EXPECT_GE(A(i, j), 0.0) << what;
      const double a = w[j] * A(i, j), b = w[i] * A(j, i);
      EXPECT_NEAR(a, b, 1e-12 * std::max(std::abs(a), std::abs(b))) << what << " (" << i << "," << j << ")";
    }
  const Eigen::VectorXd r = A * w;
  EXPECT_LE(r.cwiseAbs().maxCoeff(), 1e-12 * A.cwiseAbs().rowwise().sum().maxCoeff() * w.maxCoeff()) << what;
  EXPECT_NEAR(w.sum(), 1.0, 1e-12) << what;
}

}  // namespace

TEST(Systems, SingleEdgeFiveByFive) {
  const MetricGraph g = build_graph({"a", "b"}, {{"a", "b", 1.0, ""}});
  const ReferenceMeasure m = test::raw_measure(g, Eigen::Vector2d(1, 1), {EdgeDensity::poly({1.0})});
  const RateSpec r = rates_from_kappa(test::unit_kappa(g), m, g);
  const ScaledParameters p = apply_scaling({Regime::Unscaled, 1.0}, m, r, Eigen::VectorXd::Ones(1), g);
  const DiscreteSystem s = assemble_prelimit(g, p, 3, {VertexCoupling::CellMass});
  ASSERT_EQ(s.dim(), 5);
  // Slots: a, b, cell 1, cell 2, cell 3, all cells of mass 1/3. dt_k = sqrt(1/9) = 1/3.
  // Interior cell 2: (1/3) du_2/dt = 9 (1/3)(u_1 - u_2) + 9 (1/3)(u_3 - u_2).
  // Cell 1: (1/3) du_1/dt = 3 (u_2 - u_1) + sqrt(1/3) (u_a - u_1).
  const double c = std::sqrt(1.0 / 3.0);
  Eigen::MatrixXd L(5, 5);
  L << -c, 0, c, 0, 0,
       0, -c, 0, 0, c,
       c, 0, -3 - c, 3, 0,
       0, 0, 3, -6, 3,
       0, c, 0, 3, -3 - c;
  const Eigen::Vector<double, 5> w(1, 1, 1.0 / 3, 1.0 / 3, 1.0 / 3);
  Eigen::MatrixXd A(5, 5);
  for (int j = 0; j < 5; ++j) A.col(j) = L.col(j) / w[j];
  EXPECT_LE((dense(s) - A).cwiseAbs().maxCoeff(), 1e-13);
  EXPECT_LE((s.generator() * w).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Systems, PrelimitMatchesTranscriptionOnTriangle) {
  const Scenario& sc = test::triangle();
  const ScaledParameters p = unscaled(sc);
  for (int n : {3, 4, 5})
    for (VertexCoupling c : {VertexCoupling::CellMass, VertexCoupling::CellDensity, VertexCoupling::Endpoint}) {
      const DiscreteSystem s = assemble_prelimit(sc.graph, p, n, {c});
      const Eigen::MatrixXd A = dense(s), O = test::prelimit_oracle(sc.graph, p, n, c);
      ASSERT_EQ(A.rows(), O.rows());
      EXPECT_LE((A - O).cwiseAbs().maxCoeff(), 1e-12 * O.cwiseAbs().maxCoeff()) << "n=" << n;
    }
}

TEST(Systems, PrelimitTriangleDimension) {
  const Scenario& sc = test::triangle();
  const DiscreteSystem s = assemble_prelimit(sc.graph, unscaled(sc), 100);
  EXPECT_EQ(s.dim(), 303);
  EXPECT_THROW(assemble_prelimit(sc.graph, unscaled(sc), 2), Error);
  try {
    assemble_prelimit(sc.graph, unscaled(sc), 2);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::TooFewCells);
  }
}

TEST(Systems, KirchhoffTriangleDimension) {
  const Scenario& sc = test::triangle();
  const DiscreteSystem s = assemble_kirchhoff_limit(sc.graph, sc.measure, sc.d, 100);
  EXPECT_EQ(s.dim(), 297);
  EXPECT_LE((s.generator() * s.weights()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(assemble_kirchhoff_limit(sc.graph, sc.measure, sc.d, 4), Error);
}

TEST(Systems, KirchhoffSingleEdgeSecondDifference) {
  const MetricGraph g = build_graph({"a", "b"}, {{"a", "b", 1.0, ""}});
  const ReferenceMeasure m = test::raw_measure(g, Eigen::Vector2d(1, 1), {EdgeDensity::poly({1.0})});
  const DiscreteSystem s = assemble_kirchhoff_limit(g, m, Eigen::VectorXd::Ones(1), 5);
  ASSERT_EQ(s.dim(), 5);
  // Chain patch(a) - cell 2 - cell 3 - cell 4 - patch(b), every slot of mass 1/5:
  // n^2 times the second difference with reflecting ends.
  const Index order[5] = {s.layout().vertex_slot[0], s.layout().cell(0, 2), s.layout().cell(0, 3),
                          s.layout().cell(0, 4), s.layout().vertex_slot[1]};
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    if (i > 0) D(i, i - 1) = 1, D(i, i) -= 1;
    if (i < 4) D(i, i + 1) = 1, D(i, i) -= 1;
  }
  const Eigen::MatrixXd A = dense(s);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(A(order[i], order[j]), 25.0 * D(i, j), 1e-12);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(s.weights()[order[i]], 0.2, 1e-15);
}

TEST(Systems, FastEdgeSingleEdgeSpectrum) {
  const MetricGraph g = build_graph({"a", "b"}, {{"a", "b", 1.0, ""}});
  const ReferenceMeasure m = test::raw_measure(g, Eigen::Vector2d(1, 1), {EdgeDensity::poly({1.0})});
  const DiscreteSystem s = assemble_fast_edge(g, m, rates_from_kappa(test::unit_kappa(g), m, g));
  ASSERT_EQ(s.dim(), 3);
  Eigen::VectorXd ev = Eigen::EigenSolver<Eigen::MatrixXd>(dense(s)).eigenvalues().real();
  std::sort(ev.data(), ev.data() + ev.size());
  EXPECT_NEAR(ev[0], -3.0, 1e-12);
  EXPECT_NEAR(ev[1], -1.0, 1e-12);
  EXPECT_NEAR(ev[2], 0.0, 1e-12);
  for (const Link& l : s.links()) EXPECT_NEAR(s.conductance(l), 1.0, 1e-15);
}

TEST(Systems, FastEdgeTriangle) {
  const Scenario& sc = test::triangle();
  const DiscreteSystem s = assemble_fast_edge(sc.graph, sc.measure, sc.base_rates());
  EXPECT_EQ(s.dim(), 6);
  for (std::size_t e = 0; e < 3; ++e)
    EXPECT_NEAR(s.weights()[s.layout().edge_slot[e]], sc.measure.edge_mass(e), 1e-15);
  EXPECT_LE((s.generator() * s.weights()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Systems, CombinatorialTriangle) {
  const Scenario& sc = test::triangle();
  const RateSpec r = sc.base_rates();
  const DiscreteSystem s = assemble_combinatorial(sc.graph, sc.measure, r);
  ASSERT_EQ(s.dim(), 3);
  const Eigen::VectorXd w0 = sc.measure.omega / sc.measure.vertex_mass();
  EXPECT_LE((s.weights() - w0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((stationary_state(s) - w0).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::MatrixXd A = dense(s);
  for (std::size_t e = 0; e < 3; ++e) {
    const Index v = static_cast<Index>(sc.graph.edge(e).tail), u = static_cast<Index>(sc.graph.edge(e).head);
    // omega_v^0 du_v/dt contains kbar sqrt(omega_v^0 omega_w^0) (u_w - u_v).
    EXPECT_NEAR(A(v, u) * w0[u], harmonic_rate(sc.graph, sc.measure, r, e) * std::sqrt(w0[v] * w0[u]), 1e-13);
  }
}

TEST(Systems, CombinatorialTwoVertexDecay) {
  const MetricGraph g = build_graph({"a", "b"}, {{"a", "b", 1.0, ""}});
  const ReferenceMeasure m = test::raw_measure(g, Eigen::Vector2d(1, 3), {EdgeDensity::poly({2.0})});
  const RateSpec r = rates_from_kappa(test::unit_kappa(g), m, g);
  const DiscreteSystem s = assemble_combinatorial(g, m, r);
  const double wa = 0.25, wb = 0.75;
  const double c = harmonic_rate(g, m, r, 0) * std::sqrt(wa * wb);
  const double rate = c * (1 / wa + 1 / wb);
  Eigen::Vector2d gamma0(0.6, 0.4);
  const double t = 0.7;
  const Eigen::Vector2d gamma = (dense(s) * t).exp() * gamma0;
  const double diff0 = gamma0[0] / wa - gamma0[1] / wb;
  EXPECT_NEAR(gamma[0] / wa - gamma[1] / wb, diff0 * std::exp(-rate * t), 1e-12);
}

TEST(Systems, StationaryStateExamples) {
  const Scenario& sc = test::triangle();
  const DiscreteSystem s = assemble_prelimit(sc.graph, unscaled(sc), 100);
  EXPECT_EQ(stationary_state(s), s.weights());
  EXPECT_NEAR(total_mass(stationary_state(s)), 1.0, 1e-12);
  EXPECT_NEAR(total_mass(stationary_state(s, 0.5)), 0.5, 1e-15);
  EXPECT_EQ(total_mass(Eigen::VectorXd::Zero(7)), 0.0);

  const ScaledParameters k = apply_scaling({Regime::Kirchhoff, 0.01}, sc.measure, sc.base_rates(), sc.d, sc.graph);
  const DiscreteSystem sk = assemble_prelimit(sc.graph, k, 100);
  const Eigen::VectorXd gs = stationary_state(sk);
  for (std::size_t v = 0; v < 3; ++v) {
    const double expected = 0.01 * sc.measure.omega[v] / k.Z_eps;
    EXPECT_NEAR(gs[sk.layout().vertex_slot[v]], expected, 1e-15);
    EXPECT_LT(gs[sk.layout().vertex_slot[v]], 0.01);
  }
}

TEST(Systems, CustomLinks) {
  StateLayout L;
  L.weights = Eigen::Vector2d(0.25, 0.75);
  L.slots = {{SlotKind::Vertex, 0, 0}, {SlotKind::Vertex, 1, 0}};
  L.vertex_slot = {0, 1};
  const DiscreteSystem s = DiscreteSystem::from_links(SystemKind::Custom, L, {{0, 1, 2.0, LinkKind::Jump, 0}});
  const double c = 2.0 * std::sqrt(0.25 * 0.75);
  Eigen::Matrix2d A;
  A << -c / 0.25, c / 0.75, c / 0.25, -c / 0.75;
  EXPECT_LE((dense(s) - A).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NO_THROW(stationary_state(s));
  EXPECT_THROW(DiscreteSystem::from_links(SystemKind::Custom, L, {{0, 0, 1.0, LinkKind::Jump, 0}}), Error);
  EXPECT_THROW(DiscreteSystem::from_links(SystemKind::Custom, L, {{0, 1, 0.0, LinkKind::Jump, 0}}), Error);
  L.weights[1] = 0.0;
  EXPECT_THROW(DiscreteSystem::from_links(SystemKind::Custom, L, {{0, 1, 1.0, LinkKind::Jump, 0}}), Error);
}

TEST(SystemsProperty, GeneratorsAcrossSweep) {
  const Scenario& sc = test::triangle();
  const RateSpec r = sc.base_rates();
  for (Regime reg : {Regime::Unscaled, Regime::Kirchhoff, Regime::FastEdge, Regime::Combinatorial, Regime::Joint})
    for (double eps : {1.0, 0.1, 0.01, 0.001}) {
      const ScaledParameters p = apply_scaling({reg, eps}, sc.measure, r, sc.d, sc.graph);
      for (VertexCoupling c : {VertexCoupling::CellMass, VertexCoupling::CellDensity, VertexCoupling::Endpoint})
        expect_generator_properties(assemble_prelimit(sc.graph, p, 100, {c}),
                                    std::string(regime_name(reg)) + " eps=" + std::to_string(eps));
      expect_generator_properties(assemble_fast_edge(sc.graph, p.measure, p.rates), "fast-edge");
    }
  expect_generator_properties(assemble_kirchhoff_limit(sc.graph, sc.measure, sc.d, 100), "kirchhoff");
  expect_generator_properties(assemble_combinatorial(sc.graph, sc.measure, r), "combinatorial");
}
