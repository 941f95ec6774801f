#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "philab/config.hpp"
#include "philab/field.hpp"
#include "philab/orlicz.hpp"
#include "philab/solver.hpp"

namespace philab {

/// One archived experiment: growth function, grid, problem preset, sweep and
/// diagnostics requests, seed. Every key has a default; see README for the
/// full table.
struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 42;
  std::string output_dir = "out";
  bool quiet = false;

  Family family = Family::Power;
  double p = 2.0;
  double q = 2.0;

  int n = 1;
  int M = 32;

  int N = 1;
  std::string preset = "sine";  // sine | zero | constant | manufactured | holder | affine
  double T_final = 0.02;
  double dt = 1e-3;
  double constant_value = 1.0;
  double holder_exponent = 0.5;

  double epsilon = 0.05;
  double newton_tol = 1e-10;
  int newton_max_iters = 30;
  double damping = 0.5;
  int snapshot_stride = 1;
  double error_tol = -1.0;              // enforce the exact-solution error when > 0
  std::vector<double> study_meshes;     // convergence study resolutions

  std::vector<double> eps_list;

  std::vector<std::string> diagnostics;  // sup_u, grad_sup, holder, density, embedding, sweep
  double center_x = 0.5;
  double center_y = 0.5;
  double center_t = -1.0;  // < 0: final stored time
  double R = 0.25;
  std::vector<double> radii;
  double sigma = 0.25;
  double embed_m = 2.0;

  long verify_samples = 10000;

  static Scenario from_config(const ConfigMap& map);
  ConfigMap to_config() const;

  NFunction make_phi() const;
  SolveConfig make_solve_config() const;
};

struct Problem {
  SpaceTimeFn initial;
  SpaceTimeFn boundary;
  SpaceTimeFn source;
  SpaceTimeFn exact;  // null when no closed form is known
};

Problem make_problem(const Scenario& sc);

/// Solved or synthetic field for the scenario (holder/affine presets are
/// built directly, everything else is time-marched).
SpaceTimeField scenario_field(const Scenario& sc);

int run_verify(const Scenario& sc, std::ostream& log);
int run_solve(const Scenario& sc, std::ostream& log);
int run_diagnose(const Scenario& sc, std::ostream& log);

}  // namespace philab
