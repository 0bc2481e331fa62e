// Copyright 2026 The DRF Planner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "drf/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "drf/errors.hpp"

namespace drf {

namespace {
constexpr double kContainTol = 1e-9;
constexpr double kMuFloor = 1e-12;

bool is_symmetric(const Eigen::MatrixXd& M) { return (M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12; }

double min_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}
}  // namespace

CostWeights CostWeights::defaults() {
  CostWeights w;
  w.Q.diagonal() << 1.0, 1.0, 0.5, 0.1, 0.01, 0.01;
  w.R.diagonal() << 0.5, 0.1;
  w.Q_T = 10.0 * w.Q;
  return w;
}

void validate(const CostWeights& w) {
  if (!is_symmetric(w.Q) || !is_symmetric(w.Q_T) || !is_symmetric(w.R)) {
    throw ParameterError("weights: Q, R and Q_T must be symmetric");
  }
  if (min_eigenvalue(w.Q) < -1e-12) throw ParameterError("weights.Q must be positive semidefinite");
  if (min_eigenvalue(w.Q_T) < -1e-12) {
    throw ParameterError("weights.Q_T must be positive semidefinite");
  }
  if (!(min_eigenvalue(w.R) > 0.0)) throw ParameterError("weights.R must be positive definite");
  if (!(w.gamma_risk > 0.0)) throw ParameterError("weights.gamma_risk must be > 0");
  if (!(w.mu_corridor > 0.0)) throw ParameterError("weights.mu_corridor must be > 0");
  if (!(w.corridor_margin >= 0.0)) throw ParameterError("weights.corridor_margin must be >= 0");
  if (!(w.mu_road > 0.0)) throw ParameterError("weights.mu_road must be > 0");
}

double KeepInAnnulus::excursion(const Vec2& p) const {
  const double r = (p - center).norm();
  if (r > r_max) return r - r_max;
  if (r < r_min) return r - r_min;
  return 0.0;
}

StateVector Dynamics::difference(const StateVector& x, const StateVector& ref) const {
  StateVector d = x - ref;
  if (wraps_heading()) d(kTheta) = wrap_angle(d(kTheta));
  return d;
}

BicycleDynamics::BicycleDynamics(VehicleParams params, double dt) : params_(params), dt_(dt) {
  validate(params_);
  if (!(dt > 0.0)) throw ParameterError("dynamics dt must be positive");
}

StateVector BicycleDynamics::step(const StateVector& x, const ControlVector& u) const {
  return drf::step(VehicleState::from_vector(x), ControlInput::from_vector(u), dt_, params_)
      .to_vector();
}

void BicycleDynamics::linearize(const StateVector& x, const ControlVector& u, StateMatrix& A,
                                ControlMatrix& B) const {
  const auto J = jacobians(VehicleState::from_vector(x), ControlInput::from_vector(u), dt_, params_);
  A = J.A;
  B = J.B;
}

ControlVector BicycleDynamics::clamp_control(const ControlVector& u) const {
  return {std::clamp(u(kAccel), -params_.limits.a_max, params_.limits.a_max),
          std::clamp(u(kPhiDdot), -params_.limits.phi_ddot_max, params_.limits.phi_ddot_max)};
}

LinearDynamics::LinearDynamics(StateMatrix A, ControlMatrix B, double dt)
    : A_(std::move(A)), B_(std::move(B)), dt_(dt) {}

StateVector LinearDynamics::step(const StateVector& x, const ControlVector& u) const {
  return A_ * x + B_ * u;
}

void LinearDynamics::linearize(const StateVector&, const ControlVector&, StateMatrix& A,
                               ControlMatrix& B) const {
  A = A_;
  B = B_;
}

LinearDynamics linearized_bicycle(double v, const VehicleParams& params, double dt) {
  VehicleState s;
  s.v = v;
  const auto J = jacobians(s, ControlInput{}, dt, params);
  return LinearDynamics(J.A, J.B, dt);
}

namespace {

ConvexRegion penalty_region(const ConvexRegion& region, double margin) {
  return margin > 0.0 ? region.shrunk(margin) : region;
}

double corridor_violation(const ConvexRegion* region, double margin, const Vec2& p) {
  return region ? penalty_region(*region, margin).distance(p) : 0.0;
}

void add_corridor_expansion(const StateVector& x, const ConvexRegion& region,
                            const CostWeights& w, CostExpansion& ex) {
  const Vec2 p(x(kX), x(kY));
  const Vec2 r = p - penalty_region(region, w.corridor_margin).clamp(p);
  ex.l_x.head<2>() += 2.0 * w.mu_corridor * r;
  if (r.x() != 0.0) ex.l_xx(kX, kX) += 2.0 * w.mu_corridor;
  if (r.y() != 0.0) ex.l_xx(kY, kY) += 2.0 * w.mu_corridor;
}

double keep_in_cost(const KeepInAnnulus* ring, const CostWeights& w, const StateVector& x) {
  if (!ring) return 0.0;
  const double e = ring->excursion(Vec2(x(kX), x(kY)));
  return w.mu_road * e * e;
}

// Gauss-Newton curvature along the radial direction.
void add_keep_in_expansion(const StateVector& x, const KeepInAnnulus* ring, const CostWeights& w,
                           CostExpansion& ex) {
  if (!ring) return;
  const Vec2 d = Vec2(x(kX), x(kY)) - ring->center;
  const double r = d.norm();
  const double e = ring->excursion(Vec2(x(kX), x(kY)));
  if (e == 0.0 || r < 1e-12) return;
  const Vec2 n = d / r;
  ex.l_x.head<2>() += 2.0 * w.mu_road * e * n;
  ex.l_xx.topLeftCorner<2, 2>() += 2.0 * w.mu_road * (n * n.transpose());
}

}  // namespace

double stage_cost(const StateVector& x, const ControlVector& u, const StageContext& ctx) {
  const CostWeights& w = *ctx.weights;
  StateVector e = x - ctx.x_ref;
  if (ctx.wrap_heading) e(kTheta) = wrap_angle(e(kTheta));
  double cost = e.dot(w.Q * e) + u.dot(w.R * u);
  const Vec2 p(x(kX), x(kY));
  if (!ctx.risk.obstacles.empty() && ctx.risk.params) {
    cost += w.gamma_risk * total_risk(p, ctx.risk.obstacles, ctx.risk.anchor, *ctx.risk.params);
  }
  const double d = corridor_violation(ctx.region, w.corridor_margin, p);
  cost += w.mu_corridor * d * d;
  cost += keep_in_cost(ctx.keep_in, w, x);
  return cost;
}

double terminal_cost(const StateVector& x_N, const StateVector& x_ref_N, const StateMatrix& Q_T,
                     bool wrap_heading) {
  StateVector e = x_N - x_ref_N;
  if (wrap_heading) e(kTheta) = wrap_angle(e(kTheta));
  return e.dot(Q_T * e);
}

CostExpansion cost_expansion(const StateVector& x, const ControlVector& u,
                             const StageContext& ctx) {
  const CostWeights& w = *ctx.weights;
  StateVector e = x - ctx.x_ref;
  if (ctx.wrap_heading) e(kTheta) = wrap_angle(e(kTheta));
  CostExpansion ex;
  ex.l_x = 2.0 * w.Q * e;
  ex.l_xx = 2.0 * w.Q;
  ex.l_u = 2.0 * w.R * u;
  ex.l_uu = 2.0 * w.R;

  const Vec2 p(x(kX), x(kY));
  if (!ctx.risk.obstacles.empty() && ctx.risk.params) {
    const auto& rp = *ctx.risk.params;
    const Vec2 g = risk_gradient(p, ctx.risk.obstacles, ctx.risk.anchor, rp);
    ex.l_x.head<2>() += w.gamma_risk * g;
    if (ctx.risk.hessian == RiskHessianMode::kExact) {
      ex.l_xx.topLeftCorner<2, 2>() +=
          w.gamma_risk * risk_hessian(p, ctx.risk.obstacles, ctx.risk.anchor, rp);
    } else {
      // Gauss-Newton curvature of R = r^2 with r = sqrt(R).
      const double R = total_risk(p, ctx.risk.obstacles, ctx.risk.anchor, rp);
      if (R > 1e-300) ex.l_xx.topLeftCorner<2, 2>() += w.gamma_risk * (g * g.transpose()) / (2.0 * R);
    }
  }
  if (ctx.region) add_corridor_expansion(x, *ctx.region, w, ex);
  add_keep_in_expansion(x, ctx.keep_in, w, ex);
  return ex;
}

CostExpansion terminal_expansion(const StateVector& x_N, const StateVector& x_ref_N,
                                 const StateMatrix& Q_T, bool wrap_heading) {
  StateVector e = x_N - x_ref_N;
  if (wrap_heading) e(kTheta) = wrap_angle(e(kTheta));
  CostExpansion ex;
  ex.l_x = 2.0 * Q_T * e;
  ex.l_xx = 2.0 * Q_T;
  return ex;
}

Gains backward_pass(std::span<const CostExpansion> expansions, const Linearization& lin,
                    double mu, double mu_max) {
  const int N = static_cast<int>(lin.A.size());
  if (static_cast<int>(expansions.size()) != N + 1 || static_cast<int>(lin.B.size()) != N) {
    throw ParameterError("backward_pass: inconsistent horizon");
  }
  Gains g;
  g.K.resize(N);
  g.k.resize(N);
  for (;;) {
    if (mu > mu_max) throw SolverFailure("backward_pass: regularization exceeded mu_max");
    StateVector Vx = expansions[N].l_x;
    StateMatrix Vxx = expansions[N].l_xx;
    g.expected_linear = 0.0;
    g.expected_quadratic = 0.0;
    g.max_abs_Qu = 0.0;
    bool ok = true;
    for (int k = N - 1; k >= 0; --k) {
      const CostExpansion& ex = expansions[k];
      const StateMatrix& A = lin.A[k];
      const ControlMatrix& B = lin.B[k];
      const StateVector Qx = ex.l_x + A.transpose() * Vx;
      const ControlVector Qu = ex.l_u + B.transpose() * Vx;
      const StateMatrix Qxx = ex.l_xx + A.transpose() * Vxx * A;
      const ControlHessian Quu = ex.l_uu + B.transpose() * Vxx * B;
      const ControlGain Qux = ex.l_ux + B.transpose() * Vxx * A;

      const ControlHessian Quu_reg = Quu + mu * ControlHessian::Identity();
      Eigen::LLT<ControlHessian> llt(Quu_reg);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      const ControlVector kff = -llt.solve(Qu);
      const ControlGain Kfb = -llt.solve(Qux);
      g.k[k] = kff;
      g.K[k] = Kfb;

      Vx = Qx + Kfb.transpose() * Quu * kff + Kfb.transpose() * Qu + Qux.transpose() * kff;
      Vxx = Qxx + Kfb.transpose() * Quu * Kfb + Kfb.transpose() * Qux + Qux.transpose() * Kfb;
      Vxx = 0.5 * (Vxx + Vxx.transpose()).eval();
      g.expected_linear += kff.dot(Qu);
      g.expected_quadratic += 0.5 * kff.dot(Quu * kff);
      g.max_abs_Qu = std::max(g.max_abs_Qu, Qu.cwiseAbs().maxCoeff());
    }
    if (ok) {
      g.mu = mu;
      return g;
    }
    mu = std::max(10.0 * mu, 1e-9);
  }
}

StageContext PlanningProblem::stage(int k, RiskHessianMode mode) const {
  StageContext ctx;
  ctx.x_ref = reference[k];
  ctx.weights = &weights;
  if (!obstacles.empty()) ctx.risk.obstacles = obstacles[k];
  ctx.risk.anchor = anchor;
  ctx.risk.params = &risk;
  ctx.risk.hessian = mode;
  ctx.region = corridor.empty() ? nullptr : &corridor[k];
  ctx.keep_in = keep_in ? &*keep_in : nullptr;
  ctx.wrap_heading = dynamics->wraps_heading();
  return ctx;
}

void evaluate_costs(const PlanningProblem& problem, Trajectory& traj) {
  const int N = traj.horizon();
  traj.stage_costs.assign(N + 1, 0.0);
  double total = 0.0;
  for (int k = 0; k < N; ++k) {
    traj.stage_costs[k] = stage_cost(traj.states[k], traj.controls[k], problem.stage(k));
    total += traj.stage_costs[k];
  }
  traj.stage_costs[N] = terminal_cost(traj.states[N], problem.reference[N], problem.weights.Q_T,
                                      problem.dynamics->wraps_heading());
  // The final position is constrained like every other one.
  if (static_cast<int>(problem.corridor.size()) > N) {
    const auto& s = traj.states[N];
    const double d = corridor_violation(&problem.corridor[N], problem.weights.corridor_margin,
                                        Vec2(s(kX), s(kY)));
    traj.stage_costs[N] += problem.weights.mu_corridor * d * d;
  }
  traj.stage_costs[N] += keep_in_cost(problem.keep_in ? &*problem.keep_in : nullptr,
                                      problem.weights, traj.states[N]);
  traj.total_cost = total + traj.stage_costs[N];
}

namespace {

void fill_bookkeeping(const PlanningProblem& problem, Trajectory& traj) {
  const int N = traj.horizon();
  const double dt = problem.dynamics->dt();
  traj.times.resize(N + 1);
  traj.region_ids.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    traj.times[k] = problem.t0 + k * dt;
    traj.region_ids[k] = k;
  }
}

bool all_finite(const StateVector& x) { return x.allFinite(); }

}  // namespace

Trajectory rollout(const PlanningProblem& problem, std::span<const ControlVector> controls) {
  const int N = problem.horizon();
  if (static_cast<int>(controls.size()) != N) {
    throw ParameterError("rollout: control sequence length must equal the horizon");
  }
  Trajectory traj;
  traj.states.resize(N + 1);
  traj.controls.assign(controls.begin(), controls.end());
  traj.states[0] = problem.x0;
  for (int k = 0; k < N; ++k) {
    traj.states[k + 1] = problem.dynamics->step(traj.states[k], traj.controls[k]);
    if (!all_finite(traj.states[k + 1])) throw DivergenceError("rollout produced non-finite state");
  }
  fill_bookkeeping(problem, traj);
  evaluate_costs(problem, traj);
  return traj;
}

double max_corridor_violation(const Trajectory& traj, std::span<const ConvexRegion> corridor) {
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.states.size() && k < corridor.size(); ++k) {
    const auto& s = traj.states[k];
    worst = std::max(worst, corridor[k].distance(Vec2(s(kX), s(kY))));
  }
  return worst;
}

ForwardResult forward_pass(const Trajectory& current, const Gains& gains, double alpha,
                           std::span<const ConvexRegion> corridor, const Dynamics& dynamics) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("forward_pass: alpha must be in (0, 1]");
  const int N = current.horizon();
  ForwardResult out;
  Trajectory& t = out.trajectory;
  t.states.resize(N + 1);
  t.controls.resize(N);
  t.times = current.times;
  t.region_ids = current.region_ids;
  t.states[0] = current.states[0];
  for (int k = 0; k < N; ++k) {
    const StateVector dx = dynamics.difference(t.states[k], current.states[k]);
    ControlVector u = current.controls[k] + alpha * gains.k[k] + gains.K[k] * dx;
    u = dynamics.clamp_control(u);
    t.controls[k] = u;
    StateVector next = dynamics.step(t.states[k], u);
    if (!all_finite(next) || !u.allFinite()) throw DivergenceError("forward pass diverged");
    if (static_cast<int>(corridor.size()) > k + 1) {
      const ConvexRegion& region = corridor[k + 1];
      const Vec2 p(next(kX), next(kY));
      if (!contains(region, p)) {
        const Vec2 q = region.clamp(p);
        next(kX) = q.x();
        next(kY) = q.y();
        ++out.projections;
      }
    }
    t.states[k + 1] = next;
  }
  return out;
}

PlanResult plan(const PlanningProblem& problem, const PlanOptions& options,
                std::span<const ControlVector> initial_controls) {
  const auto start = std::chrono::steady_clock::now();
  if (!problem.dynamics) throw ParameterError("plan: dynamics not set");
  const int N = problem.horizon();
  if (N < 1) throw ParameterError("plan: horizon must be >= 1");
  if (static_cast<int>(problem.corridor.size()) != N + 1) {
    throw ParameterError("plan: corridor length must match the horizon");
  }
  if (!problem.obstacles.empty() && static_cast<int>(problem.obstacles.size()) != N + 1) {
    throw ParameterError("plan: obstacle predictions must match the horizon");
  }
  if (problem.corridor[0].distance(Vec2(problem.x0(kX), problem.x0(kY))) > kContainTol) {
    throw InfeasibleSeedError("plan: x0 lies outside region 0");
  }

  std::vector<ControlVector> controls(N, ControlVector::Zero());
  for (int k = 0; k < N && k < static_cast<int>(initial_controls.size()); ++k) {
    controls[k] = problem.dynamics->clamp_control(initial_controls[k]);
  }

  PlanResult result;
  SolveReport& report = result.report;
  Trajectory current = rollout(problem, controls);
  double J = current.total_cost;
  report.cost_curve.push_back(J);
  bool feasible = max_corridor_violation(current, problem.corridor) <= kContainTol;
  double mu = options.mu_init;

  std::vector<CostExpansion> expansions(N + 1);
  Linearization lin;
  lin.A.resize(N);
  lin.B.resize(N);

  for (int iter = 0; iter < options.max_iter; ++iter) {
    report.iterations = iter + 1;
    for (int k = 0; k < N; ++k) {
      problem.dynamics->linearize(current.states[k], current.controls[k], lin.A[k], lin.B[k]);
      expansions[k] = cost_expansion(current.states[k], current.controls[k],
                                     problem.stage(k, options.risk_hessian));
    }
    expansions[N] = terminal_expansion(current.states[N], problem.reference[N],
                                       problem.weights.Q_T, problem.dynamics->wraps_heading());
    add_corridor_expansion(current.states[N], problem.corridor[N], problem.weights, expansions[N]);
    add_keep_in_expansion(current.states[N], problem.keep_in ? &*problem.keep_in : nullptr,
                          problem.weights, expansions[N]);
    Gains gains;
    try {
      gains = backward_pass(expansions, lin, mu, options.mu_max);
    } catch (const SolverFailure&) {
      report.status = "failed";
      break;
    }
    mu = gains.mu;
    report.final_max_qu = gains.max_abs_Qu;
    if (feasible && gains.max_abs_Qu < options.tol_grad) {
      report.converged = true;
      report.status = "converged";
      break;
    }

    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < options.line_search_steps && !accepted; ++ls, alpha *= 0.5) {
      Trajectory cand;
      try {
        ForwardResult fr = forward_pass(current, gains, alpha, problem.corridor, *problem.dynamics);
        // A projected rollout is not dynamically consistent; re-simulate its
        // controls so every accepted iterate satisfies the dynamics exactly.
        if (fr.projections > 0) {
          cand = rollout(problem, fr.trajectory.controls);
        } else {
          cand = std::move(fr.trajectory);
          evaluate_costs(problem, cand);
        }
      } catch (const DivergenceError&) {
        continue;
      }
      const bool cand_feasible = max_corridor_violation(cand, problem.corridor) <= kContainTol;
      if (cand.total_cost < J && (cand_feasible || !feasible)) {
        const double rel = (J - cand.total_cost) / std::max(std::abs(J), 1e-300);
        current = std::move(cand);
        J = current.total_cost;
        feasible = cand_feasible;
        report.cost_curve.push_back(J);
        mu = std::max(mu / 2.0, kMuFloor);
        accepted = true;
        if (rel < options.tol_cost) {
          report.converged = feasible;
          report.status = feasible ? "converged" : "stalled_infeasible";
        }
      }
    }
    if (report.status == "converged" || report.status == "stalled_infeasible") break;
    if (!accepted) {
      if (feasible && std::abs(gains.expected_decrease(1.0)) <= options.tol_cost * std::abs(J)) {
        report.converged = true;
        report.status = "converged";
        break;
      }
      mu *= 10.0;
      if (mu > options.mu_max) {
        report.status = "failed";
        break;
      }
    }
  }
  result.trajectory = std::move(current);
  report.max_corridor_violation = max_corridor_violation(result.trajectory, problem.corridor);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace drf
