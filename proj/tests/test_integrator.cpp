#include <gtest/gtest.h>

#include <cmath>

#include "mgf/error.hpp"
#include "mgf/experiments.hpp"
#include "mgf/integrator.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mgf;

namespace {

using test::two_state;
using test::two_state_exact;

DiscreteSystem triangle_prelimit() {
  const Scenario& sc = test::triangle();
  return build_system(sc, SystemChoice::Prelimit, make_regime(Regime::Unscaled, 1.0), 100);
}

}  // namespace

TEST(Integrator, StationaryStaysConstant) {
  const DiscreteSystem s = triangle_prelimit();
  const Eigen::VectorXd g = stationary_state(s);
  for (Scheme scheme : {Scheme::ImplicitEuler, Scheme::TRBDF2}) {
    IntegratorConfig cfg;
    cfg.scheme = scheme;
    cfg.t_end = 5.0;
    cfg.output_times = uniform_grid(5.0, 11);
    const Trajectory tr = integrate(s, g, cfg);
    ASSERT_EQ(tr.size(), 11u);
    // Round-off of stage solves with condition number ~ h |A| ~ 1e4, unit total mass.
    for (std::size_t i = 0; i < tr.size(); ++i) EXPECT_LE((tr.state(i) - g).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Integrator, TwoStateClosedForm) {
  for (Scheme scheme : {Scheme::ImplicitEuler, Scheme::TRBDF2}) {
    IntegratorConfig cfg;
    cfg.scheme = scheme;
    cfg.t_end = 1.0;
    cfg.output_times = uniform_grid(1.0, 11);
    const Trajectory tr = integrate(two_state(), Eigen::Vector2d(1, 0), cfg);
    EXPECT_DOUBLE_EQ(tr.times.back(), 1.0);
    const Eigen::VectorXd end = tr.state(tr.size() - 1);
    EXPECT_NEAR(end[0], 0.5677, 1e-4);
    EXPECT_NEAR(end[1], 0.4323, 1e-4);
    // Implicit Euler controls the error per step, so its global error is first order in the step.
    const double bound = scheme == Scheme::TRBDF2 ? 1e-6 : 1e-5;
    for (std::size_t i = 0; i < tr.size(); ++i)
      EXPECT_LE((tr.state(i) - two_state_exact(tr.times[i])).cwiseAbs().maxCoeff(), bound);
  }
}

TEST(IntegratorProperty, OrderOfConvergence) {
  auto error = [](Scheme scheme, double h) {
    IntegratorConfig cfg;
    cfg.scheme = scheme;
    cfg.t_end = 1.0;
    cfg.fixed_step = h;
    const Trajectory tr = integrate(two_state(), Eigen::Vector2d(1, 0), cfg);
    return (tr.state(tr.size() - 1) - two_state_exact(1.0)).cwiseAbs().maxCoeff();
  };
  const double ie = error(Scheme::ImplicitEuler, 0.02) / error(Scheme::ImplicitEuler, 0.01);
  EXPECT_GE(ie, 1.7);
  EXPECT_LE(ie, 2.3);
  const double tr = error(Scheme::TRBDF2, 0.02) / error(Scheme::TRBDF2, 0.01);
  EXPECT_GE(tr, 3.4);
  EXPECT_LE(tr, 4.6);
}

TEST(IntegratorProperty, MassAndPositivity) {
  const Scenario& sc = test::triangle();
  for (Regime reg : {Regime::Unscaled, Regime::Kirchhoff, Regime::FastEdge, Regime::Combinatorial})
    for (Scheme scheme : {Scheme::ImplicitEuler, Scheme::TRBDF2}) {
      const DiscreteSystem s = build_system(sc, SystemChoice::Prelimit, make_regime(reg, 0.01), 50);
      const Eigen::VectorXd g0 = initial_state(sc, s);
      IntegratorConfig cfg;
      cfg.scheme = scheme;
      cfg.t_end = 2.0;
      cfg.output_times = uniform_grid(2.0, 41);
      const Trajectory tr = integrate(s, g0, cfg);
      const double bound = 10 * cfg.atol * static_cast<double>(s.dim());
      for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_LE(std::abs(tr.state(i).sum() - g0.sum()), bound) << regime_name(reg);
        EXPECT_GE(tr.state(i).minCoeff(), -10 * cfg.atol) << regime_name(reg);
      }
    }
}

TEST(Integrator, TriangleConvergesToStationary) {
  const Scenario& sc = test::triangle();
  const DiscreteSystem s = triangle_prelimit();
  IntegratorConfig cfg = sc.integrator_config();
  cfg.output_times = {0.0, 40.0};
  cfg.t_end = 40.0;
  const Trajectory tr = integrate(s, initial_state(sc, s), cfg);
  const Eigen::VectorXd u = s.density(tr.state(1)), ustar = s.density(stationary_state(s));
  EXPECT_LE((u - ustar).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Integrator, ToleranceSweep) {
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  cfg.rtol = 1e-5;
  cfg.atol = 1e-7;
  cfg.output_times = uniform_grid(1.0, 21);
  const SweepResult st = resolve_with_tolerance_sweep(two_state(), Eigen::Vector2d(0.5, 0.5), cfg, 100);
  EXPECT_EQ(st.discrepancy, 0.0);

  const Trajectory loose = integrate(two_state(), Eigen::Vector2d(1, 0), cfg);
  double loose_err = 0.0;
  for (std::size_t i = 0; i < loose.size(); ++i)
    loose_err = std::max(loose_err, (loose.state(i) - two_state_exact(loose.times[i])).cwiseAbs().maxCoeff());
  const SweepResult r = resolve_with_tolerance_sweep(two_state(), Eigen::Vector2d(1, 0), cfg, 100);
  EXPECT_GT(r.discrepancy, 0.0);
  EXPECT_LE(r.discrepancy, 1.01 * loose_err + 1e-12);
  EXPECT_THROW(resolve_with_tolerance_sweep(two_state(), Eigen::Vector2d(1, 0), cfg, 1.0), Error);
}

TEST(Integrator, TriangleToleranceSweep) {
  const Scenario& sc = test::triangle();
  const DiscreteSystem s = triangle_prelimit();
  IntegratorConfig cfg = sc.integrator_config();
  cfg.rtol = 1e-6;
  cfg.atol = 1e-8;
  cfg.output_times = uniform_grid(40.0, 401);
  const SweepResult r = resolve_with_tolerance_sweep(s, initial_state(sc, s), cfg, 100);
  EXPECT_LE(r.discrepancy, 1e-5);
}

TEST(Integrator, Grids) {
  const std::vector<double> u = uniform_grid(40.0, 2001);
  ASSERT_EQ(u.size(), 2001u);
  EXPECT_DOUBLE_EQ(u[1], 0.02);
  EXPECT_DOUBLE_EQ(u.back(), 40.0);
  const std::vector<double> g = graded_grid(40.0, 2001, 50, 1e-7);
  EXPECT_EQ(g.size(), 2051u);
  EXPECT_DOUBLE_EQ(g[1], 1e-7);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
  EXPECT_THROW(uniform_grid(1.0, 1), Error);
}

TEST(Integrator, ConfigErrors) {
  IntegratorConfig cfg;
  cfg.t_end = 1.0;
  EXPECT_THROW(integrate(two_state(), Eigen::Vector3d(1, 0, 0), cfg), Error);
  EXPECT_THROW(integrate(two_state(), Eigen::Vector2d(-1, 2), cfg), Error);
  cfg.output_times = {0.0, 0.5, 0.5, 1.0};
  EXPECT_THROW(integrate(two_state(), Eigen::Vector2d(1, 0), cfg), Error);
  cfg.output_times = {0.0, 2.0};
  EXPECT_THROW(integrate(two_state(), Eigen::Vector2d(1, 0), cfg), Error);
  cfg.output_times.clear();
  cfg.rtol = 0.0;
  EXPECT_THROW(integrate(two_state(), Eigen::Vector2d(1, 0), cfg), Error);
}

TEST(Integrator, StepBudget) {
  IntegratorConfig cfg;
  cfg.t_end = 40.0;
  cfg.max_steps = 3;
  try {
    integrate(triangle_prelimit(), initial_state(test::triangle(), triangle_prelimit()), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::StepUnderflow);
  }
}
