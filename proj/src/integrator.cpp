#include "mgf/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include <Eigen/SparseLU>

#include "mgf/error.hpp"

namespace mgf {

namespace {

using Vec = Eigen::VectorXd;

// LU factors of (I - beta*A), refactored only when beta changes. A few are kept
// so that step doubling can alternate between h and h/2 without refactoring.
class StageSolvers {
 public:
  explicit StageSolvers(const SparseMatrix& A) : A_(A) {
    I_.resize(A.rows(), A.cols());
    I_.setIdentity();
    pattern_ = I_ - A_;
    pattern_.makeCompressed();
  }

  // Solves (I - beta*A) x = b with one step of iterative refinement; the residual
  // carries the mass defect of the factorized solve.
  Vec solve(double beta, const Vec& b, IntegratorStats& stats) {
    const Eigen::SparseLU<SparseMatrix>& lu = get(beta, stats);
    Vec x = lu.solve(b);
    const Vec r = b - (x - beta * (A_ * x));
    x += lu.solve(r);
    return x;
  }

  const Eigen::SparseLU<SparseMatrix>& get(double beta, IntegratorStats& stats) {
    for (auto& e : entries_)
      if (e.beta == beta) {
        e.stamp = ++clock_;
        return *e.lu;
      }
    Entry* slot = nullptr;
    if (entries_.size() < kCapacity) {
      entries_.push_back({});
      slot = &entries_.back();
      slot->lu = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
      slot->lu->analyzePattern(pattern_);
    } else {
      slot = &*std::min_element(entries_.begin(), entries_.end(),
                                [](const Entry& a, const Entry& b) { return a.stamp < b.stamp; });
    }
    SparseMatrix M = I_ - beta * A_;
    M.makeCompressed();
    slot->lu->factorize(M);
    ++stats.factorizations;
    if (slot->lu->info() != Eigen::Success) {
      slot->beta = -1.0;
      throw Error(Errc::SingularStageMatrix, "LU failed for beta = " + std::to_string(beta));
    }
    slot->beta = beta;
    slot->stamp = ++clock_;
    return *slot->lu;
  }

 private:
  struct Entry {
    double beta = -1.0;
    long stamp = 0;
    std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu;
  };
  static constexpr std::size_t kCapacity = 3;
  const SparseMatrix& A_;
  SparseMatrix I_;
  SparseMatrix pattern_;
  std::vector<Entry> entries_;
  long clock_ = 0;
};

struct StepResult {
  Vec y;
  Vec err;
};

const double kGamma = 2.0 - std::sqrt(2.0);

StepResult step_implicit_euler(StageSolvers& S, const SparseMatrix&, const Vec& y, double h, bool estimate,
                               IntegratorStats& st) {
  if (!estimate) return {S.solve(h, y, st), Vec()};
  Vec full = S.solve(h, y, st);
  Vec mid = S.solve(0.5 * h, y, st);
  Vec two = S.solve(0.5 * h, mid, st);
  Vec err = two - full;
  return {std::move(two), std::move(err)};
}

StepResult step_trbdf2(StageSolvers& S, const SparseMatrix& A, const Vec& y, double h, bool estimate,
                       IntegratorStats& st) {
  const double g = kGamma, d = 0.5 * kGamma;
  const Vec fy = A * y;
  Vec yg = S.solve(d * h, y + (d * h) * fy, st);
  const double c1 = 1.0 / (g * (2.0 - g)), c0 = (1.0 - g) * (1.0 - g) / (g * (2.0 - g));
  Vec yn = S.solve(d * h, c1 * yg - c0 * y, st);
  if (!estimate) return {std::move(yn), Vec()};
  const double k = (-3.0 * g * g + 4.0 * g - 2.0) / (12.0 * (2.0 - g));
  Vec raw = (2.0 * k * h) * (fy / g - (A * yg) / (g * (1.0 - g)) + (A * yn) / (1.0 - g));
  // Filtering through the stage matrix keeps the estimate bounded on stiff modes.
  Vec err = S.get(d * h, st).solve(raw);
  return {std::move(yn), std::move(err)};
}

}  // namespace

std::vector<double> uniform_grid(double t_end, std::size_t count) {
  if (count < 2) throw Error(Errc::InvalidConfig, "output grid needs at least 2 points");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i) t[i] = t_end * static_cast<double>(i) / static_cast<double>(count - 1);
  t.back() = t_end;
  return t;
}

std::vector<double> graded_grid(double t_end, std::size_t uniform_count, std::size_t log_count, double t_first) {
  std::vector<double> t = uniform_grid(t_end, uniform_count);
  const double upper = t[1];
  if (log_count > 0 && t_first > 0.0 && t_first < upper) {
    const double a = std::log(t_first), b = std::log(upper);
    for (std::size_t i = 0; i < log_count; ++i)
      t.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(log_count)));
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

Trajectory integrate(const DiscreteSystem& sys, const Eigen::VectorXd& gamma0, const IntegratorConfig& cfg) {
  if (gamma0.size() != sys.dim()) throw Error(Errc::DimensionMismatch, "initial state does not match layout");
  if (!(cfg.t_end > 0.0) || !(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
    throw Error(Errc::InvalidConfig, "t_end, rtol and atol must be positive");
  if (gamma0.minCoeff() < 0.0) throw Error(Errc::InvalidConfig, "initial masses must be nonnegative");

  std::vector<double> grid = cfg.output_times.empty() ? std::vector<double>{0.0, cfg.t_end} : cfg.output_times;
  if (grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw Error(Errc::InvalidConfig, "output times must increase strictly");
  if (grid.back() > cfg.t_end * (1.0 + 1e-14)) throw Error(Errc::InvalidConfig, "output time beyond t_end");

  const SparseMatrix& A = sys.generator();
  const bool ie = cfg.scheme == Scheme::ImplicitEuler;
  const bool adaptive = !(cfg.fixed_step > 0.0);
  const double order_k = ie ? 2.0 : 3.0;  // local error order
  const double alpha = 0.7 / order_k, beta = 0.4 / order_k;
  const double h_max = cfg.max_step > 0.0 ? cfg.max_step : std::numeric_limits<double>::infinity();

  Trajectory tr;
  tr.times = grid;
  tr.states.resize(sys.dim(), static_cast<Index>(grid.size()));
  tr.states.col(0) = gamma0;

  StageSolvers solvers(A);
  Vec y = gamma0;
  double t = 0.0;

  double h;
  if (!adaptive) {
    h = cfg.fixed_step;
  } else if (cfg.initial_step > 0.0) {
    h = cfg.initial_step;
  } else {
    const double slope = (A * y).cwiseAbs().maxCoeff();
    const double scale = cfg.atol + cfg.rtol * y.cwiseAbs().maxCoeff();
    h = slope > 0.0 ? 0.1 * scale / slope : grid.back();
  }
  h = std::min(h, h_max);
  double err_prev = 1.0;

  for (std::size_t out = 1; out < grid.size(); ++out) {
    const double target = grid[out];
    while (t < target) {
      if (tr.stats.accepted + tr.stats.rejected >= cfg.max_steps)
        throw Error(Errc::StepUnderflow, "step budget exhausted at t = " + std::to_string(t));
      double h_try = std::min(h, h_max);
      bool clipped = false;
      if (t + h_try >= target || target - (t + h_try) < 1e-10 * h_try) {
        h_try = target - t;
        clipped = true;
      }
      if (!(h_try > 1e-14 * std::max(1.0, target)))
        throw Error(Errc::StepUnderflow, "step size underflow at t = " + std::to_string(t));

      StepResult r;
      int retries = 0;
      for (;;) {
        try {
          r = ie ? step_implicit_euler(solvers, A, y, h_try, adaptive, tr.stats)
                 : step_trbdf2(solvers, A, y, h_try, adaptive, tr.stats);
          break;
        } catch (const Error& e) {
          if (e.code() != Errc::SingularStageMatrix || ++retries > 10) throw;
          h_try *= 0.5;
          clipped = false;
        }
      }
      if (!r.y.allFinite()) throw Error(Errc::NonFiniteState, "non-finite state at t = " + std::to_string(t));

      if (!adaptive) {
        y = std::move(r.y);
        t = clipped ? target : t + h_try;
        ++tr.stats.accepted;
        continue;
      }

      const Vec scale = (cfg.atol + cfg.rtol * y.cwiseAbs().cwiseMax(r.y.cwiseAbs()).array()).matrix();
      const double err = r.err.cwiseAbs().cwiseQuotient(scale).maxCoeff();
      if (!std::isfinite(err)) throw Error(Errc::NonFiniteState, "non-finite error estimate");

      if (err <= 1.0) {
        y = std::move(r.y);
        t = clipped ? target : t + h_try;
        ++tr.stats.accepted;
        double fac = err > 0.0 ? 0.9 * std::pow(err, -alpha) * std::pow(err_prev, beta) : 5.0;
        fac = std::clamp(fac, 0.1, 5.0);
        err_prev = std::max(err, 1e-4);
        // Small growth is not worth a refactorization.
        if (fac >= 1.0 && fac <= 1.2) fac = 1.0;
        if (clipped)
          h = std::max(h, h_try * fac);
        else
          h = h_try * fac;
      } else {
        ++tr.stats.rejected;
        h = h_try * std::clamp(0.9 * std::pow(err, -1.0 / order_k), 0.1, 0.9);
      }
    }
    tr.states.col(static_cast<Index>(out)) = y;
  }
  return tr;
}

SweepResult resolve_with_tolerance_sweep(const DiscreteSystem& sys, const Eigen::VectorXd& gamma0,
                                         const IntegratorConfig& cfg, double factor) {
  if (!(factor > 1.0)) throw Error(Errc::InvalidConfig, "tolerance factor must exceed 1");
  const Trajectory loose = integrate(sys, gamma0, cfg);
  IntegratorConfig tight = cfg;
  tight.rtol /= factor;
  tight.atol /= factor;
  SweepResult res{integrate(sys, gamma0, tight), 0.0};
  res.discrepancy = (res.trajectory.states - loose.states).cwiseAbs().maxCoeff();
  return res;
}

}  // namespace mgf
