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

#ifndef DRF_PLANNER_HPP_
#define DRF_PLANNER_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "drf/convex_space.hpp"
#include "drf/obstacle.hpp"
#include "drf/risk_field.hpp"
#include "drf/vehicle_model.hpp"

namespace drf {

using ControlGain = Eigen::Matrix<double, kControlDim, kStateDim>;
using ControlHessian = Eigen::Matrix<double, kControlDim, kControlDim>;

struct CostWeights {
  StateMatrix Q = StateMatrix::Zero();
  ControlHessian R = ControlHessian::Zero();
  StateMatrix Q_T = StateMatrix::Zero();
  double gamma_risk = 5.0;
  double mu_corridor = 200.0;
  /// The corridor penalty acts on the distance to the region shrunk by this
  /// margin (m), so the solver feels the boundary before touching it.
  double corridor_margin = 0.0;
  /// Weight of the radial keep-in penalty (1/m^2), used when the problem
  /// carries a KeepInAnnulus.
  double mu_road = 200.0;

  static CostWeights defaults();
  bool operator==(const CostWeights&) const = default;
};

/// Symmetry and definiteness: Q, Q_T positive semidefinite, R positive
/// definite, scalar weights positive.
void validate(const CostWeights& weights);

/// Discrete-time dynamics seen by the solver.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  virtual StateVector step(const StateVector& x, const ControlVector& u) const = 0;
  virtual void linearize(const StateVector& x, const ControlVector& u, StateMatrix& A,
                         ControlMatrix& B) const = 0;
  virtual ControlVector clamp_control(const ControlVector& u) const { return u; }
  /// Whether the heading entry is an angle (differences are wrapped).
  virtual bool wraps_heading() const { return false; }
  virtual double dt() const = 0;

  /// x - ref with the heading difference wrapped when applicable.
  StateVector difference(const StateVector& x, const StateVector& ref) const;
};

class BicycleDynamics final : public Dynamics {
 public:
  BicycleDynamics(VehicleParams params, double dt);
  StateVector step(const StateVector& x, const ControlVector& u) const override;
  void linearize(const StateVector& x, const ControlVector& u, StateMatrix& A,
                 ControlMatrix& B) const override;
  ControlVector clamp_control(const ControlVector& u) const override;
  bool wraps_heading() const override { return true; }
  double dt() const override { return dt_; }
  const VehicleParams& params() const { return params_; }

 private:
  VehicleParams params_;
  double dt_;
};

/// x_{k+1} = A x_k + B u_k with unbounded controls.
class LinearDynamics final : public Dynamics {
 public:
  LinearDynamics(StateMatrix A, ControlMatrix B, double dt);
  StateVector step(const StateVector& x, const ControlVector& u) const override;
  void linearize(const StateVector&, const ControlVector&, StateMatrix& A,
                 ControlMatrix& B) const override;
  double dt() const override { return dt_; }
  const StateMatrix& A() const { return A_; }
  const ControlMatrix& B() const { return B_; }

 private:
  StateMatrix A_;
  ControlMatrix B_;
  double dt_;
};

/// Bicycle Jacobians at straight driving with speed v (theta = phi = 0),
/// used as an exactly linear plant.
LinearDynamics linearized_bicycle(double v, const VehicleParams& params, double dt);

/// Ring the host position must stay in, for roads whose edges are circles.
/// Axis-aligned corridor regions cannot follow a curved edge, so the edge
/// enters the cost as mu_road * (radial excursion)^2.
struct KeepInAnnulus {
  Vec2 center{0.0, 0.0};
  double r_min = 0.0;
  double r_max = 0.0;

  /// Signed distance outside [r_min, r_max] (0 inside, positive outward
  /// beyond r_max, negative inward below r_min).
  double excursion(const Vec2& p) const;
};

enum class RiskHessianMode { kGaussNewton, kExact };

/// Risk inputs for one stage: obstacles predicted at that step.
struct RiskContext {
  std::span<const ObstacleVehicle> obstacles;
  RiskAnchor anchor;
  const RiskFieldParams* params = nullptr;
  RiskHessianMode hessian = RiskHessianMode::kGaussNewton;
};

struct StageContext {
  StateVector x_ref = StateVector::Zero();
  const CostWeights* weights = nullptr;
  RiskContext risk;
  const ConvexRegion* region = nullptr;
  const KeepInAnnulus* keep_in = nullptr;
  bool wrap_heading = true;
};

double stage_cost(const StateVector& x, const ControlVector& u, const StageContext& ctx);
double terminal_cost(const StateVector& x_N, const StateVector& x_ref_N, const StateMatrix& Q_T,
                     bool wrap_heading = true);

struct CostExpansion {
  StateVector l_x = StateVector::Zero();
  ControlVector l_u = ControlVector::Zero();
  StateMatrix l_xx = StateMatrix::Zero();
  ControlHessian l_uu = ControlHessian::Zero();
  ControlGain l_ux = ControlGain::Zero();
};

CostExpansion cost_expansion(const StateVector& x, const ControlVector& u,
                             const StageContext& ctx);
CostExpansion terminal_expansion(const StateVector& x_N, const StateVector& x_ref_N,
                                 const StateMatrix& Q_T, bool wrap_heading = true);

struct Trajectory {
  std::vector<StateVector> states;      // N + 1
  std::vector<ControlVector> controls;  // N
  std::vector<double> times;            // N + 1
  std::vector<int> region_ids;          // N + 1
  std::vector<double> stage_costs;      // N + 1; entry N is the terminal cost plus its corridor penalty
  double total_cost = 0.0;

  int horizon() const { return static_cast<int>(controls.size()); }
};

struct Gains {
  std::vector<ControlGain> K;
  std::vector<ControlVector> k;
  double expected_linear = 0.0;     // sum k' Q_u
  double expected_quadratic = 0.0;  // sum 1/2 k' Q_uu k
  double mu = 0.0;                  // regularization actually used
  double max_abs_Qu = 0.0;

  /// Predicted cost change for line-search step alpha.
  double expected_decrease(double alpha) const {
    return alpha * expected_linear + alpha * alpha * expected_quadratic;
  }
};

struct Linearization {
  std::vector<StateMatrix> A;
  std::vector<ControlMatrix> B;
};

/// Riccati-style sweep. `expansions` has N + 1 entries (the last one is the
/// terminal expansion). Regularization mu is added to Q_uu and multiplied by
/// 10 until Q_uu is positive definite; throws SolverFailure past mu_max.
Gains backward_pass(std::span<const CostExpansion> expansions, const Linearization& lin,
                    double mu, double mu_max);

/// Planning problem over a fixed horizon.
struct PlanningProblem {
  StateVector x0 = StateVector::Zero();
  double t0 = 0.0;
  std::vector<StateVector> reference;                    // N + 1
  std::vector<ConvexRegion> corridor;                    // N + 1
  std::vector<std::vector<ObstacleVehicle>> obstacles;   // N + 1, or empty
  RiskAnchor anchor;
  RiskFieldParams risk;
  CostWeights weights;
  std::optional<KeepInAnnulus> keep_in;
  const Dynamics* dynamics = nullptr;

  int horizon() const { return static_cast<int>(reference.size()) - 1; }
  StageContext stage(int k, RiskHessianMode mode = RiskHessianMode::kGaussNewton) const;
};

/// Rolls controls out from x0 and fills every bookkeeping field.
Trajectory rollout(const PlanningProblem& problem, std::span<const ControlVector> controls);

/// Recomputes stage costs and the total of an existing state/control pair.
void evaluate_costs(const PlanningProblem& problem, Trajectory& traj);

double max_corridor_violation(const Trajectory& traj, std::span<const ConvexRegion> corridor);

struct ForwardResult {
  Trajectory trajectory;
  int projections = 0;
};

/// u_new = u_old + alpha k + K (x_new - x_old) rolled through the dynamics;
/// controls are clamped and positions leaving their region are clamped back
/// onto it before the rollout continues.
ForwardResult forward_pass(const Trajectory& current, const Gains& gains, double alpha,
                           std::span<const ConvexRegion> corridor, const Dynamics& dynamics);

struct PlanOptions {
  int max_iter = 100;
  double tol_cost = 1e-6;
  double tol_grad = 1e-5;
  double mu_init = 1e-6;
  double mu_max = 1e6;
  int line_search_steps = 11;  // alpha in {1, 1/2, ..., 2^-10}
  RiskHessianMode risk_hessian = RiskHessianMode::kGaussNewton;

  bool operator==(const PlanOptions&) const = default;
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> cost_curve;  // initial cost followed by each accepted cost
  bool converged = false;
  std::string status = "max_iterations";  // converged | max_iterations | failed
  double max_corridor_violation = 0.0;
  double wall_time_s = 0.0;
  double final_max_qu = 0.0;
};

struct PlanResult {
  Trajectory trajectory;
  SolveReport report;
};

/// Constrained iLQR. Starts from `initial_controls` (zero controls when
/// empty). Candidates are accepted only on strict cost decrease and, once
/// the iterate is inside the corridor, only when they stay inside it.
PlanResult plan(const PlanningProblem& problem, const PlanOptions& options,
                std::span<const ControlVector> initial_controls = {});

}  // namespace drf

#endif  // DRF_PLANNER_HPP_
