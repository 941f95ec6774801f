#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "philab/field.hpp"
#include "philab/mesh.hpp"
#include "philab/orlicz.hpp"

namespace philab {

/// Nodal data callback: x is the n-dim coordinate, returns an N-vector.
using SpaceTimeFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

struct SolveConfig {
  explicit SolveConfig(NFunction growth) : phi(std::move(growth)) {}

  NFunction phi;
  double epsilon = 0.0;  // shift of the regularized flux; > 0 to solve
  double dt = 0.0;
  double T_final = 0.0;
  double newton_tol = 1e-10;
  int newton_max_iters = 30;
  double damping = 0.5;  // backtracking factor
  int snapshot_stride = 1;
  SpaceTimeFn source;  // optional manufactured forcing

  void validate_for_solve() const;
};

/// Implicit-Euler weak-form residual tested against hat functions (consistent
/// P1 mass), with the nonlinear flux A^eps(Du_new) integrated by the one-point
/// rule (exact: Du is constant per element). Rows of Dirichlet nodes are
/// zeroed. Shape: nodes x N.
Eigen::MatrixXd assemble_residual(const Mesh& mesh, const ShiftedNFunction& phi_eps,
                                  const Eigen::MatrixXd& u_new, const Eigen::MatrixXd& u_old,
                                  double dt, const SpaceTimeFn& source = nullptr,
                                  double t_new = 0.0);

double free_residual_norm(const Mesh& mesh, const Eigen::MatrixXd& residual);

struct NewtonResult {
  Eigen::MatrixXd u;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> history;  // residual norms, including the initial one
};

/// One implicit-Euler step by damped Newton. u_start must already carry the
/// Dirichlet data for t_new; its free rows are the initial guess. Jacobian
/// blocks are the shifted Hessian per element, so the linearization is
/// symmetric positive definite for epsilon > 0.
NewtonResult newton_step_solve(const Mesh& mesh, const ShiftedNFunction& phi_eps,
                               const Eigen::MatrixXd& u_start, const Eigen::MatrixXd& u_old,
                               double dt, const SolveConfig& config, double t_new = 0.0);

struct EnergySample {
  double t;
  double u_l2_sq;        // one-point quadrature of |u|^2
  double grad_modular;   // exact per-element integral of phi_eps(|Du|)
};

std::vector<EnergySample> energy_series(const SpaceTimeField& field,
                                        const ShiftedNFunction& phi_eps);

struct SolveResult {
  SpaceTimeField field;
  std::vector<EnergySample> energy;
  int max_newton_iterations = 0;
};

SolveResult solve(std::shared_ptr<const Mesh> mesh, const SolveConfig& config,
                  const SpaceTimeFn& initial, const SpaceTimeFn& boundary);

struct SweepPair {
  double eps_hi;
  double eps_lo;
  double v_distance_sq;      // time-integrated Sum_e |V^eps(Du_eps)-V^eps'(Du_eps')|^2 |e|
  double modular_distance;   // time-integrated Sum_e phi(|Du_eps - Du_eps'|) |e|
};

struct SweepReport {
  std::vector<double> eps;
  std::vector<SweepPair> pairs;
  bool aborted = false;
  std::string abort_message;
};

/// Solves for each epsilon in the strictly decreasing list and reports the
/// consecutive V-distances (Cauchy diagnostic for the vanishing-shift limit).
SweepReport epsilon_sweep(std::shared_ptr<const Mesh> mesh, const SolveConfig& config_base,
                          const SpaceTimeFn& initial, const SpaceTimeFn& boundary,
                          const std::vector<double>& eps_list);

/// Nodal interpolation of a callback at a fixed time.
Eigen::MatrixXd interpolate_nodal(const Mesh& mesh, int components, const SpaceTimeFn& fn,
                                  double t);

}  // namespace philab
