#include "philab/solver.hpp"

#include <Eigen/Sparse>
#include <cmath>
#include <sstream>

#include "philab/tensorops.hpp"

namespace philab {
namespace {

// Consistent P1 mass block for one element.
Eigen::MatrixXd element_mass(const Element& el) {
  if (el.nverts == 2) {
    Eigen::Matrix2d m;
    m << 2, 1, 1, 2;
    return el.measure / 6.0 * m;
  }
  Eigen::Matrix3d m;
  m << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  return el.measure / 12.0 * m;
}

Eigen::MatrixXd element_gradient(const Element& el, const Eigen::MatrixXd& u) {
  Eigen::MatrixXd du = Eigen::MatrixXd::Zero(u.cols(), el.hat_grads.rows());
  for (int v = 0; v < el.nverts; ++v)
    du.noalias() += u.row(el.nodes[v]).transpose() * el.hat_grads.col(v).transpose();
  return du;
}

}  // namespace

void SolveConfig::validate_for_solve() const {
  if (!(dt > 0.0)) throw UsageError("SolveConfig: dt must be positive");
  if (!(T_final >= dt)) throw UsageError("SolveConfig: T_final must be at least dt");
  if (!(newton_tol > 0.0)) throw UsageError("SolveConfig: newton_tol must be positive");
  if (newton_max_iters < 1) throw UsageError("SolveConfig: newton_max_iters must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) throw UsageError("SolveConfig: damping must be in (0,1)");
  if (!(epsilon > 0.0)) throw UsageError("SolveConfig: epsilon must be positive to solve");
  if (snapshot_stride < 1) throw UsageError("SolveConfig: snapshot_stride must be >= 1");
}

Eigen::MatrixXd interpolate_nodal(const Mesh& mesh, int components, const SpaceTimeFn& fn,
                                  double t) {
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(mesh.num_nodes(), components);
  if (!fn) return u;
  for (int i = 0; i < mesh.num_nodes(); ++i) {
    const Eigen::VectorXd v = fn(mesh.node(i), t);
    if (v.size() != components) throw UsageError("nodal callback returned wrong component count");
    u.row(i) = v.transpose();
  }
  return u;
}

Eigen::MatrixXd assemble_residual(const Mesh& mesh, const ShiftedNFunction& phi_eps,
                                  const Eigen::MatrixXd& u_new, const Eigen::MatrixXd& u_old,
                                  double dt, const SpaceTimeFn& source, double t_new) {
  const int N = static_cast<int>(u_new.cols());
  if (u_new.rows() != mesh.num_nodes() || u_old.rows() != mesh.num_nodes() ||
      u_old.cols() != N)
    throw UsageError("assemble_residual: nodal shape mismatch with mesh");
  if (!(dt > 0.0)) throw UsageError("assemble_residual: dt must be positive");

  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(mesh.num_nodes(), N);
  const Eigen::MatrixXd du_dt = (u_new - u_old) / dt;
  const auto& elements = mesh.elements();
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const Element& el = elements[e];
    const Eigen::MatrixXd du = element_gradient(el, u_new);
    const GradientMatrix flux = A_of(phi_eps, du);
    if (!flux.allFinite()) {
      std::ostringstream msg;
      msg << "assemble_residual: non-finite flux on element " << e;
      throw NumericError(msg.str());
    }
    const Eigen::MatrixXd mass = element_mass(el);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(N);
    if (source) f = source(el.barycenter, t_new);
    for (int v = 0; v < el.nverts; ++v) {
      const int node = el.nodes[v];
      r.row(node) += (el.measure * (flux * el.hat_grads.col(v))).transpose();
      for (int w = 0; w < el.nverts; ++w)
        r.row(node) += mass(v, w) * du_dt.row(el.nodes[w]);
      r.row(node) -= (el.measure / el.nverts) * f.transpose();
    }
  }
  for (int i = 0; i < mesh.num_nodes(); ++i)
    if (mesh.is_boundary(i)) r.row(i).setZero();
  if (!r.allFinite()) throw NumericError("assemble_residual: non-finite residual");
  return r;
}

double free_residual_norm(const Mesh& mesh, const Eigen::MatrixXd& residual) {
  double acc = 0.0;
  for (int node : mesh.free_nodes()) acc += residual.row(node).squaredNorm();
  return std::sqrt(acc);
}

namespace {

Eigen::SparseMatrix<double> assemble_jacobian(const Mesh& mesh, const ShiftedNFunction& phi_eps,
                                              const Eigen::MatrixXd& u_new, double dt) {
  const int N = static_cast<int>(u_new.cols());
  const int ndof = static_cast<int>(mesh.free_nodes().size()) * N;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.elements().size() * 9 * N * N);
  for (const Element& el : mesh.elements()) {
    const Eigen::MatrixXd du = element_gradient(el, u_new);
    const HessianTensor H = hessian(phi_eps, du);
    const Eigen::MatrixXd mass = element_mass(el);
    const int n = static_cast<int>(el.hat_grads.rows());
    for (int v = 0; v < el.nverts; ++v) {
      const int fv = mesh.free_index(el.nodes[v]);
      if (fv < 0) continue;
      for (int w = 0; w < el.nverts; ++w) {
        const int fw = mesh.free_index(el.nodes[w]);
        if (fw < 0) continue;
        for (int a = 0; a < N; ++a) {
          for (int b = 0; b < N; ++b) {
            double k = 0.0;
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j)
                k += H.m(i * N + a, j * N + b) * el.hat_grads(i, v) * el.hat_grads(j, w);
            k *= el.measure;
            if (a == b) k += mass(v, w) / dt;
            trip.emplace_back(fv * N + a, fw * N + b, k);
          }
        }
      }
    }
  }
  Eigen::SparseMatrix<double> J(ndof, ndof);
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

}  // namespace

NewtonResult newton_step_solve(const Mesh& mesh, const ShiftedNFunction& phi_eps,
                               const Eigen::MatrixXd& u_start, const Eigen::MatrixXd& u_old,
                               double dt, const SolveConfig& config, double t_new) {
  if (!(phi_eps.shift() > 0.0))
    throw UsageError("newton_step_solve: shifted flux requires epsilon > 0");
  const int N = static_cast<int>(u_start.cols());
  NewtonResult res;
  res.u = u_start;
  Eigen::MatrixXd r = assemble_residual(mesh, phi_eps, res.u, u_old, dt, config.source, t_new);
  double rn = free_residual_norm(mesh, r);
  res.history.push_back(rn);

  const auto& free_nodes = mesh.free_nodes();
  while (rn > config.newton_tol) {
    if (res.iterations >= config.newton_max_iters) {
      std::ostringstream msg;
      msg << "newton_step_solve: no convergence after " << res.iterations
          << " iterations; residual history:";
      for (double h : res.history) msg << " " << h;
      throw NumericError(msg.str());
    }
    const Eigen::SparseMatrix<double> J = assemble_jacobian(mesh, phi_eps, res.u, dt);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(J);
    if (ldlt.info() != Eigen::Success)
      throw NumericError("newton_step_solve: singular Newton system");
    Eigen::VectorXd rhs(static_cast<int>(free_nodes.size()) * N);
    for (std::size_t f = 0; f < free_nodes.size(); ++f)
      rhs.segment(static_cast<int>(f) * N, N) = -r.row(free_nodes[f]).transpose();
    const Eigen::VectorXd delta = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !delta.allFinite())
      throw NumericError("newton_step_solve: linear solve failed");

    // backtracking: accept only steps that do not increase the residual norm
    double alpha = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 30; ++halving) {
      Eigen::MatrixXd u_trial = res.u;
      for (std::size_t f = 0; f < free_nodes.size(); ++f)
        u_trial.row(free_nodes[f]) +=
            alpha * delta.segment(static_cast<int>(f) * N, N).transpose();
      Eigen::MatrixXd r_trial =
          assemble_residual(mesh, phi_eps, u_trial, u_old, dt, config.source, t_new);
      const double rn_trial = free_residual_norm(mesh, r_trial);
      if (rn_trial <= rn) {
        res.u = std::move(u_trial);
        r = std::move(r_trial);
        rn = rn_trial;
        accepted = true;
        break;
      }
      alpha *= config.damping;
    }
    if (!accepted)
      throw NumericError("newton_step_solve: line search failed to reduce the residual");
    ++res.iterations;
    res.history.push_back(rn);
  }
  res.residual_norm = rn;
  return res;
}

std::vector<EnergySample> energy_series(const SpaceTimeField& field,
                                        const ShiftedNFunction& phi_eps) {
  std::vector<EnergySample> out;
  out.reserve(field.num_times());
  const auto& elements = field.mesh().elements();
  for (int k = 0; k < field.num_times(); ++k) {
    double l2 = 0.0, modular = 0.0;
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const double meas = elements[e].measure;
      l2 += meas * field.barycenter_value(k, static_cast<int>(e)).squaredNorm();
      modular += meas * phi_eps.value(field.gradient(k, static_cast<int>(e)).norm());
    }
    out.push_back(EnergySample{field.time(k), l2, modular});
  }
  return out;
}

SolveResult solve(std::shared_ptr<const Mesh> mesh, const SolveConfig& config,
                  const SpaceTimeFn& initial, const SpaceTimeFn& boundary) {
  config.validate_for_solve();
  if (!initial || !boundary) throw UsageError("solve: initial and boundary data are required");
  const Mesh& m = *mesh;
  const Eigen::MatrixXd u0 = interpolate_nodal(m, static_cast<int>(initial(m.node(0), 0.0).size()),
                                               initial, 0.0);
  const int N = static_cast<int>(u0.cols());
  // compatibility on the parabolic boundary
  for (int i = 0; i < m.num_nodes(); ++i) {
    if (!m.is_boundary(i)) continue;
    const Eigen::VectorXd b = boundary(m.node(i), 0.0);
    if ((b.transpose() - u0.row(i)).norm() > 1e-12 * (1.0 + b.norm()))
      throw UsageError("solve: initial and boundary data disagree on the parabolic boundary");
  }

  const long steps = std::lround(config.T_final / config.dt);
  const ShiftedNFunction phi_eps(config.phi, config.epsilon);

  std::vector<double> times{0.0};
  std::vector<Eigen::MatrixXd> slices{u0};
  std::vector<EnergySample> energy;
  int max_newton = 0;

  Eigen::MatrixXd u_old = u0;
  for (long k = 1; k <= steps; ++k) {
    const double t_new = k * config.dt;
    Eigen::MatrixXd u_start = u_old;
    for (int i = 0; i < m.num_nodes(); ++i)
      if (m.is_boundary(i)) u_start.row(i) = boundary(m.node(i), t_new).transpose();
    NewtonResult nr;
    try {
      nr = newton_step_solve(m, phi_eps, u_start, u_old, config.dt, config, t_new);
    } catch (const NumericError& err) {
      std::ostringstream msg;
      msg << "solve: step " << k << " (t=" << t_new << ") failed: " << err.what();
      throw NumericError(msg.str());
    }
    max_newton = std::max(max_newton, nr.iterations);
    u_old = std::move(nr.u);
    if (k % config.snapshot_stride == 0 || k == steps) {
      times.push_back(t_new);
      slices.push_back(u_old);
    }
  }

  SpaceTimeField field(std::move(mesh), N, std::move(times), std::move(slices));
  auto series = energy_series(field, phi_eps);
  return SolveResult{std::move(field), std::move(series), max_newton};
}

namespace {

SweepPair sweep_distance(const NFunction& phi, const SpaceTimeField& hi, double eps_hi,
                         const SpaceTimeField& lo, double eps_lo) {
  if (hi.times() != lo.times())
    throw NumericError("epsilon_sweep: solved fields have mismatched time grids");
  const ShiftedNFunction phi_hi(phi, eps_hi), phi_lo(phi, eps_lo);
  double vd = 0.0, md = 0.0;
  const auto& elements = hi.mesh().elements();
  for (int k = 1; k < hi.num_times(); ++k) {
    const double w = hi.time(k) - hi.time(k - 1);
    for (std::size_t e = 0; e < elements.size(); ++e) {
      const Eigen::MatrixXd du_hi = hi.gradient(k, static_cast<int>(e));
      const Eigen::MatrixXd du_lo = lo.gradient(k, static_cast<int>(e));
      const double meas = elements[e].measure * w;
      vd += meas * (V_of(phi_hi, du_hi) - V_of(phi_lo, du_lo)).squaredNorm();
      md += meas * phi.value((du_hi - du_lo).norm());
    }
  }
  return SweepPair{eps_hi, eps_lo, vd, md};
}

}  // namespace

SweepReport epsilon_sweep(std::shared_ptr<const Mesh> mesh, const SolveConfig& config_base,
                          const SpaceTimeFn& initial, const SpaceTimeFn& boundary,
                          const std::vector<double>& eps_list) {
  if (eps_list.size() < 2)
    throw UsageError("epsilon_sweep: need at least two epsilon values");
  for (std::size_t i = 0; i + 1 < eps_list.size(); ++i)
    if (!(eps_list[i] > eps_list[i + 1] && eps_list[i + 1] > 0.0))
      throw UsageError("epsilon_sweep: eps_list must be strictly decreasing and positive");

  SweepReport report;
  report.eps = eps_list;
  SolveConfig cfg = config_base;
  std::vector<SpaceTimeField> fields;
  fields.reserve(eps_list.size());
  for (double eps : eps_list) {
    cfg.epsilon = eps;
    try {
      fields.push_back(solve(mesh, cfg, initial, boundary).field);
    } catch (const std::exception& err) {
      report.aborted = true;
      report.abort_message = err.what();
      return report;
    }
    if (fields.size() >= 2) {
      const std::size_t i = fields.size() - 2;
      report.pairs.push_back(
          sweep_distance(config_base.phi, fields[i], eps_list[i], fields[i + 1], eps_list[i + 1]));
    }
  }
  return report;
}

}  // namespace philab
