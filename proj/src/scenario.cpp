#include "philab/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "philab/checks.hpp"
#include "philab/regularity.hpp"

namespace philab {
namespace {

constexpr double kPi = std::numbers::pi;

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << fmt_full(v[i]);
  return os.str();
}

std::string join_strings(const std::vector<std::string>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write output file: " + path);
  out << content;
}

}  // namespace

Scenario Scenario::from_config(const ConfigMap& m) {
  Scenario sc;
  sc.name = cfg_string(m, "name", sc.name);
  sc.seed = cfg_u64(m, "seed", sc.seed);
  sc.output_dir = cfg_string(m, "output_dir", sc.output_dir);
  sc.quiet = cfg_bool(m, "quiet", sc.quiet);

  sc.family = family_from_name(cfg_string(m, "phi.family", "power"));
  sc.p = cfg_double(m, "phi.p", sc.p);
  sc.q = cfg_double(m, "phi.q", sc.family == Family::Power ? sc.p : sc.q);

  sc.n = static_cast<int>(cfg_long(m, "mesh.n", sc.n));
  sc.M = static_cast<int>(cfg_long(m, "mesh.M", sc.M));

  sc.N = static_cast<int>(cfg_long(m, "problem.N", sc.N));
  sc.preset = cfg_string(m, "problem.preset", sc.preset);
  sc.T_final = cfg_double(m, "problem.T_final", sc.T_final);
  sc.dt = cfg_double(m, "problem.dt", sc.dt);
  sc.constant_value = cfg_double(m, "problem.constant", sc.constant_value);
  sc.holder_exponent = cfg_double(m, "problem.holder_exponent", sc.holder_exponent);

  sc.epsilon = cfg_double(m, "solve.epsilon", sc.epsilon);
  sc.newton_tol = cfg_double(m, "solve.newton_tol", sc.newton_tol);
  sc.newton_max_iters = static_cast<int>(cfg_long(m, "solve.newton_max_iters", sc.newton_max_iters));
  sc.damping = cfg_double(m, "solve.damping", sc.damping);
  sc.snapshot_stride = static_cast<int>(cfg_long(m, "solve.snapshot_stride", sc.snapshot_stride));
  sc.error_tol = cfg_double(m, "solve.error_tol", sc.error_tol);
  sc.study_meshes = cfg_double_list(m, "solve.study_meshes", sc.study_meshes);

  sc.eps_list = cfg_double_list(m, "sweep.eps_list", sc.eps_list);

  sc.diagnostics = cfg_string_list(m, "diag.list", sc.diagnostics);
  sc.center_x = cfg_double(m, "diag.center_x", sc.center_x);
  sc.center_y = cfg_double(m, "diag.center_y", sc.center_y);
  sc.center_t = cfg_double(m, "diag.center_t", sc.center_t);
  sc.R = cfg_double(m, "diag.R", sc.R);
  sc.radii = cfg_double_list(m, "diag.radii", sc.radii);
  sc.sigma = cfg_double(m, "diag.sigma", sc.sigma);
  sc.embed_m = cfg_double(m, "diag.m", sc.embed_m);

  sc.verify_samples = cfg_long(m, "verify.samples", sc.verify_samples);
  if (sc.verify_samples < 1) throw UsageError("verify.samples must be positive");
  return sc;
}

ConfigMap Scenario::to_config() const {
  ConfigMap m;
  m["name"] = name;
  m["seed"] = std::to_string(seed);
  m["output_dir"] = output_dir;
  m["quiet"] = quiet ? "true" : "false";
  m["phi.family"] = family_name(family);
  m["phi.p"] = fmt_full(p);
  m["phi.q"] = fmt_full(q);
  m["mesh.n"] = std::to_string(n);
  m["mesh.M"] = std::to_string(M);
  m["problem.N"] = std::to_string(N);
  m["problem.preset"] = preset;
  m["problem.T_final"] = fmt_full(T_final);
  m["problem.dt"] = fmt_full(dt);
  m["problem.constant"] = fmt_full(constant_value);
  m["problem.holder_exponent"] = fmt_full(holder_exponent);
  m["solve.epsilon"] = fmt_full(epsilon);
  m["solve.newton_tol"] = fmt_full(newton_tol);
  m["solve.newton_max_iters"] = std::to_string(newton_max_iters);
  m["solve.damping"] = fmt_full(damping);
  m["solve.snapshot_stride"] = std::to_string(snapshot_stride);
  m["solve.error_tol"] = fmt_full(error_tol);
  if (!study_meshes.empty()) m["solve.study_meshes"] = join_doubles(study_meshes);
  if (!eps_list.empty()) m["sweep.eps_list"] = join_doubles(eps_list);
  if (!diagnostics.empty()) m["diag.list"] = join_strings(diagnostics);
  m["diag.center_x"] = fmt_full(center_x);
  m["diag.center_y"] = fmt_full(center_y);
  m["diag.center_t"] = fmt_full(center_t);
  m["diag.R"] = fmt_full(R);
  if (!radii.empty()) m["diag.radii"] = join_doubles(radii);
  m["diag.sigma"] = fmt_full(sigma);
  m["diag.m"] = fmt_full(embed_m);
  m["verify.samples"] = std::to_string(verify_samples);
  return m;
}

NFunction Scenario::make_phi() const { return NFunction::make(family, p, q); }

SolveConfig Scenario::make_solve_config() const {
  SolveConfig cfg{make_phi()};
  cfg.epsilon = epsilon;
  cfg.dt = dt;
  cfg.T_final = T_final;
  cfg.newton_tol = newton_tol;
  cfg.newton_max_iters = newton_max_iters;
  cfg.damping = damping;
  cfg.snapshot_stride = snapshot_stride;
  cfg.source = make_problem(*this).source;
  return cfg;
}

Problem make_problem(const Scenario& sc) {
  Problem prob;
  const int N = sc.N, n = sc.n;
  if (sc.preset == "sine") {
    prob.initial = [N](const Eigen::VectorXd& x, double) {
      double v = 1.0;
      for (int i = 0; i < x.size(); ++i) v *= std::sin(kPi * x[i]);
      return Eigen::VectorXd::Constant(N, v);
    };
    prob.boundary = [N](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(N); };
    if (sc.family == Family::Power && sc.p == 2.0) {
      // phi'(t)/t = 2: the run is the linear heat equation u_t = 2 Lap u
      prob.exact = [N, n](const Eigen::VectorXd& x, double t) {
        double v = std::exp(-2.0 * n * kPi * kPi * t);
        for (int i = 0; i < x.size(); ++i) v *= std::sin(kPi * x[i]);
        return Eigen::VectorXd::Constant(N, v);
      };
    }
  } else if (sc.preset == "zero") {
    prob.initial = [N](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(N); };
    prob.boundary = prob.initial;
    prob.exact = prob.initial;
  } else if (sc.preset == "constant") {
    const double c = sc.constant_value;
    prob.initial = [N, c](const Eigen::VectorXd&, double) {
      return Eigen::VectorXd::Constant(N, c);
    };
    prob.boundary = prob.initial;
    prob.exact = prob.initial;
  } else if (sc.preset == "manufactured") {
    if (sc.n != 1 || sc.N != 1)
      throw UsageError("preset 'manufactured' is defined for n=1, N=1");
    const ShiftedNFunction phi_eps(sc.make_phi(), sc.epsilon);
    prob.exact = [](const Eigen::VectorXd& x, double t) {
      return Eigen::VectorXd::Constant(1, std::exp(-t) * std::sin(kPi * x[0]));
    };
    prob.initial = prob.exact;
    prob.boundary = [](const Eigen::VectorXd&, double) { return Eigen::VectorXd::Zero(1); };
    // f = u*_t - d/dx[A^eps(u*_x)] = u*_t - phi_eps''(|u*_x|) u*_xx
    prob.source = [phi_eps](const Eigen::VectorXd& x, double t) {
      const double ut = -std::exp(-t) * std::sin(kPi * x[0]);
      const double ux = kPi * std::exp(-t) * std::cos(kPi * x[0]);
      const double uxx = -kPi * kPi * std::exp(-t) * std::sin(kPi * x[0]);
      return Eigen::VectorXd::Constant(1, ut - phi_eps.second_derivative(std::abs(ux)) * uxx);
    };
  } else if (sc.preset == "holder" || sc.preset == "affine") {
    // synthetic fields; no evolution problem attached
    prob.initial = nullptr;
  } else {
    throw UsageError("unknown problem preset: " + sc.preset);
  }
  return prob;
}

namespace {

SpaceTimeField synthetic_field(const Scenario& sc) {
  if (sc.n != 1 || sc.N != 1)
    throw UsageError("synthetic presets are defined for n=1, N=1");
  auto mesh = std::make_shared<const Mesh>(Mesh::make(sc.n, sc.M));
  const long steps = std::lround(sc.T_final / sc.dt);
  if (steps < 1) throw UsageError("synthetic field: T_final/dt must be at least 1");
  std::vector<double> times;
  for (long k = 0; k <= steps; ++k) times.push_back(k * sc.dt);

  // cumulative construction: the element gradient equals the profile at the
  // barycenter exactly, with the profile center snapped onto a barycenter so
  // the central element carries gradient 0
  const double h = mesh->h();
  const double c_snap = (std::floor(sc.center_x / h) + 0.5) * h;
  const double beta = sc.holder_exponent;
  Eigen::MatrixXd u(mesh->num_nodes(), 1);
  u(0, 0) = 0.0;
  for (int e = 0; e < sc.M; ++e) {
    const double xc = mesh->elements()[e].barycenter[0];
    const double g =
        sc.preset == "affine" ? 0.7 : std::pow(std::abs(xc - c_snap), beta);
    u(e + 1, 0) = u(e, 0) + h * g;
  }
  std::vector<Eigen::MatrixXd> slices(times.size(), u);
  return SpaceTimeField(std::move(mesh), 1, std::move(times), std::move(slices));
}

std::string snapshots_csv(const SpaceTimeField& field) {
  std::ostringstream os;
  os << (field.mesh().dim() == 1 ? "t,x,component_index,value" : "t,x,y,component_index,value")
     << "\n";
  for (int k = 0; k < field.num_times(); ++k)
    for (int i = 0; i < field.mesh().num_nodes(); ++i)
      for (int c = 0; c < field.components(); ++c) {
        os << fmt_full(field.time(k)) << ',' << fmt_full(field.mesh().coords()(i, 0));
        if (field.mesh().dim() == 2) os << ',' << fmt_full(field.mesh().coords()(i, 1));
        os << ',' << c << ',' << fmt_full(field.slice(k)(i, c)) << "\n";
      }
  return os.str();
}

std::string energy_csv(const std::vector<EnergySample>& series) {
  std::ostringstream os;
  os << "t,u_l2_sq,grad_modular\n";
  for (const auto& s : series)
    os << fmt_full(s.t) << ',' << fmt_full(s.u_l2_sq) << ',' << fmt_full(s.grad_modular) << "\n";
  return os.str();
}

double max_nodal_error(const SpaceTimeField& field, const SpaceTimeFn& exact) {
  double err = 0.0;
  const int k = field.num_times() - 1;
  for (int i = 0; i < field.mesh().num_nodes(); ++i) {
    const Eigen::VectorXd e = exact(field.mesh().node(i), field.time(k));
    err = std::max(err, (field.slice(k).row(i).transpose() - e).cwiseAbs().maxCoeff());
  }
  return err;
}

}  // namespace

SpaceTimeField scenario_field(const Scenario& sc) {
  if (sc.preset == "holder" || sc.preset == "affine") return synthetic_field(sc);
  const Problem prob = make_problem(sc);
  auto mesh = std::make_shared<const Mesh>(Mesh::make(sc.n, sc.M));
  SolveConfig cfg = sc.make_solve_config();
  return solve(std::move(mesh), cfg, prob.initial, prob.boundary).field;
}

int run_verify(const Scenario& sc, std::ostream& log) {
  const NFunction phi = sc.make_phi();
  const auto rows = verify_suite(phi, VerifyOptions{sc.verify_samples, sc.seed});
  std::ostringstream csv;
  csv << CheckRow::csv_header() << "\n";
  for (const auto& r : rows) csv << r.csv_row() << "\n";
  write_file(sc.output_dir, "verify.csv", csv.str());

  bool all_pass = true;
  for (const auto& r : rows) {
    if (!r.pass) {
      all_pass = false;
      log << "FAIL " << r.check_id << " margin=" << r.worst_margin << " band=[" << r.band_lo
          << "," << r.band_hi << "]\n";
    } else if (!sc.quiet) {
      log << "ok   " << r.check_id << " margin=" << r.worst_margin << "\n";
    }
  }
  if (!sc.quiet)
    log << "verify: " << rows.size() << " checks, " << (all_pass ? "all passed" : "FAILURES")
        << "\n";
  return all_pass ? 0 : 1;
}

int run_solve(const Scenario& sc, std::ostream& log) {
  const Problem prob = make_problem(sc);
  if (!prob.initial) throw UsageError("run_solve: preset '" + sc.preset + "' has no evolution problem");

  if (!sc.study_meshes.empty()) {
    if (!prob.exact) throw UsageError("run_solve: convergence study needs an exact solution");
    std::vector<double> errors;
    const double M0 = sc.study_meshes.front();
    for (double Md : sc.study_meshes) {
      Scenario level = sc;
      level.M = static_cast<int>(Md);
      level.dt = sc.dt * (M0 / Md) * (M0 / Md);  // keep the time error subdominant
      const SpaceTimeField field = scenario_field(level);
      errors.push_back(max_nodal_error(field, prob.exact));
      log << "M=" << level.M << " dt=" << level.dt << " max_error=" << errors.back() << "\n";
      if (errors.size() >= 2) {
        const std::size_t i = errors.size() - 1;
        const double order = std::log(errors[i - 1] / errors[i]) /
                             std::log(sc.study_meshes[i] / sc.study_meshes[i - 1]);
        log << "observed spatial order: " << order << "\n";
      }
    }
    return 0;
  }

  auto mesh = std::make_shared<const Mesh>(Mesh::make(sc.n, sc.M));
  const SolveConfig cfg = sc.make_solve_config();
  const SolveResult result = solve(std::move(mesh), cfg, prob.initial, prob.boundary);
  write_file(sc.output_dir, "snapshots.csv", snapshots_csv(result.field));
  write_file(sc.output_dir, "energy.csv", energy_csv(result.energy));
  if (!sc.quiet)
    log << "solved " << result.field.num_times() << " stored slices, max Newton iterations "
        << result.max_newton_iterations << "\n";
  if (prob.exact) {
    const double err = max_nodal_error(result.field, prob.exact);
    log << "final max error vs exact solution: " << err << "\n";
    if (sc.error_tol > 0.0 && err > sc.error_tol) {
      log << "FAIL error " << err << " exceeds tolerance " << sc.error_tol << "\n";
      return 1;
    }
  }
  return 0;
}

int run_diagnose(const Scenario& sc, std::ostream& log) {
  if (sc.diagnostics.empty())
    throw UsageError("run_diagnose: diag.list is empty, nothing to do");
  const NFunction phi = sc.make_phi();
  const SpaceTimeField field = scenario_field(sc);

  Eigen::VectorXd x0(sc.n);
  x0[0] = sc.center_x;
  if (sc.n == 2) x0[1] = sc.center_y;
  const double t0 = sc.center_t < 0.0 ? field.times().back() : sc.center_t;
  std::vector<double> radii = sc.radii;
  if (radii.empty()) radii = {sc.R / 2.0, sc.R / 4.0};

  std::ostringstream estimates;
  estimates << EstimateReport::csv_header() << "\n";
  auto stamp = [&](EstimateReport rep) {
    rep.ctx.dt = sc.dt;
    if (std::isnan(rep.ctx.eps)) rep.ctx.eps = sc.epsilon;
    estimates << rep.csv_row() << "\n";
    return rep;
  };

  for (const std::string& diag : sc.diagnostics) {
    if (diag == "sup_u") {
      for (double r : radii) {
        const EstimateReport rep = stamp(sup_u_check(field, phi, r, x0, t0));
        if (!sc.quiet)
          log << "sup_u r=" << r << " lhs=" << rep.lhs << " rhs=" << rep.rhs
              << " constant=" << rep.constant << "\n";
      }
    } else if (diag == "grad_sup") {
      for (double r : radii) {
        const EstimateReport rep = stamp(grad_sup_check(field, phi, r, x0, t0, sc.epsilon));
        if (!sc.quiet)
          log << "grad_sup r=" << r << " lhs=" << rep.lhs << " rhs=" << rep.rhs
              << " constant=" << rep.constant << "\n";
      }
    } else if (diag == "holder") {
      std::vector<double> fit_radii = sc.radii;
      if (fit_radii.empty())
        for (int k = 0; k < 5; ++k) fit_radii.push_back(sc.R / 2.0 * std::pow(0.7071, k));
      const HolderFit fit = holder_fit(field, phi, x0, t0, sc.R, fit_radii);
      std::ostringstream osc;
      osc << "r,scaled_r,osc\n";
      for (std::size_t i = 0; i < fit.radii.size(); ++i)
        osc << fmt_full(fit.radii[i]) << ',' << fmt_full(fit.scaled_radii[i]) << ','
            << fmt_full(fit.oscillations[i]) << "\n";
      write_file(sc.output_dir, "oscillation.csv", osc.str());
      EstimateReport rep{EstimateId::OscDecay, fit.oscillations.back(), fit.oscillations.front(),
                         fit.alpha, {}};
      rep.ctx.lambda = fit.lambda;
      rep.ctx.r = fit_radii.back();
      rep.ctx.R = sc.R;
      rep.ctx.h = field.mesh().h();
      rep.ctx.n = sc.n;
      rep.ctx.N = sc.N;
      rep.ctx.p = phi.p();
      rep.ctx.q = phi.q();
      stamp(rep);
      log << "holder fit alpha=" << fit.alpha << " residual=" << fit.residual
          << " zeros_excluded=" << fit.zeros_excluded << "\n";
    } else if (diag == "density") {
      const double lambda = lambda_intrinsic(field, phi, plain_cylinder(x0, t0, 2.0 * sc.R));
      const Cylinder cyl = intrinsic_cylinder(x0, t0, sc.R, lambda, phi);
      const DensityResult res = density_diagnostics(field, cyl, sc.sigma);
      EstimateReport rep{res.holds_nondeg ? EstimateId::DensityNondeg : EstimateId::DensityDeg,
                         res.fraction_small, sc.sigma,
                         res.fraction_small / sc.sigma, {}};
      rep.ctx.lambda = lambda;
      rep.ctx.r = sc.R;
      rep.ctx.R = 2.0 * sc.R;
      rep.ctx.h = field.mesh().h();
      rep.ctx.n = sc.n;
      rep.ctx.N = sc.N;
      rep.ctx.p = phi.p();
      rep.ctx.q = phi.q();
      stamp(rep);
      if (!sc.quiet)
        log << "density fraction=" << res.fraction_small << " sigma=" << sc.sigma
            << (res.holds_nondeg ? " (nondegenerate alternative)" : " (degenerate alternative)")
            << "\n";
    } else if (diag == "embedding") {
      const EstimateReport rep = stamp(embedding_check(field, 0, phi, sc.embed_m, sc.R, x0,
                                                       field.times().front(), t0));
      if (!sc.quiet)
        log << "embedding lhs=" << rep.lhs << " rhs=" << rep.rhs << " constant=" << rep.constant
            << "\n";
    } else if (diag == "sweep") {
      if (sc.eps_list.size() < 2)
        throw UsageError("diagnose: sweep requested but sweep.eps_list has fewer than 2 entries");
      const Problem prob = make_problem(sc);
      auto mesh = std::make_shared<const Mesh>(Mesh::make(sc.n, sc.M));
      const SweepReport report =
          epsilon_sweep(std::move(mesh), sc.make_solve_config(), prob.initial, prob.boundary,
                        sc.eps_list);
      std::ostringstream sweep;
      sweep << "eps_hi,eps_lo,v_distance_sq\n";
      for (const auto& pr : report.pairs)
        sweep << fmt_full(pr.eps_hi) << ',' << fmt_full(pr.eps_lo) << ','
              << fmt_full(pr.v_distance_sq) << "\n";
      write_file(sc.output_dir, "sweep.csv", sweep.str());
      for (const auto& pr : report.pairs)
        log << "sweep eps " << pr.eps_hi << " -> " << pr.eps_lo
            << " v_distance_sq=" << pr.v_distance_sq << " modular=" << pr.modular_distance
            << "\n";
      if (report.aborted) {
        log << "sweep aborted: " << report.abort_message << "\n";
        write_file(sc.output_dir, "estimates.csv", estimates.str());
        return 3;
      }
    } else {
      throw UsageError("unknown diagnostic: " + diag);
    }
  }
  write_file(sc.output_dir, "estimates.csv", estimates.str());
  return 0;
}

}  // namespace philab
