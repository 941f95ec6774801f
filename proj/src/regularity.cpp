#include "philab/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "philab/common.hpp"

namespace philab {
namespace {

struct RegionIndex {
  std::vector<int> slices;
  std::vector<int> elements;  // elements whose barycenter lies in the ball
  double space_measure = 0.0;
};

RegionIndex index_region(const SpaceTimeField& field, const Cylinder& cyl) {
  RegionIndex idx;
  const double tol = 1e-12 * std::max(1.0, std::abs(cyl.t0));
  for (int k = 0; k < field.num_times(); ++k) {
    const double t = field.time(k);
    if (t > cyl.t0 - cyl.time_depth - tol && t <= cyl.t0 + tol) idx.slices.push_back(k);
  }
  const auto& elements = field.mesh().elements();
  for (std::size_t e = 0; e < elements.size(); ++e) {
    if ((elements[e].barycenter - cyl.x0).norm() < cyl.r) {
      idx.elements.push_back(static_cast<int>(e));
      idx.space_measure += elements[e].measure;
    }
  }
  return idx;
}

void require_region(const RegionIndex& idx, const char* who) {
  if (idx.slices.empty() || idx.elements.empty())
    throw UsageError(std::string(who) + ": cylinder contains no stored slices or elements");
}

void require_inside_extent(const SpaceTimeField& field, const Cylinder& cyl, const char* who) {
  const Mesh& mesh = field.mesh();
  for (int i = 0; i < mesh.dim(); ++i)
    if (cyl.x0[i] - cyl.r < -1e-12 || cyl.x0[i] + cyl.r > 1.0 + 1e-12)
      throw UsageError(std::string(who) + ": ball leaves the spatial domain");
  const double tol = 1e-9 * std::max(1.0, std::abs(cyl.t0));
  if (cyl.t0 > field.times().back() + tol ||
      cyl.t0 - cyl.time_depth < field.times().front() - tol)
    throw UsageError(std::string(who) + ": time window leaves the stored extent");
}

double grad_sup_exponent(int n, double p, const char* who) {
  const double denom = (n + 2) * p - 2.0 * n;
  if (!(denom > 0.0))
    throw UsageError(std::string(who) + ": assumption violation, need p > 2n/(n+2)");
  return 2.0 / denom;
}

}  // namespace

Cylinder plain_cylinder(const Eigen::VectorXd& x0, double t0, double r) {
  if (!(r > 0.0)) throw UsageError("plain_cylinder: radius must be positive");
  return Cylinder{x0, t0, r, r * r};
}

Cylinder intrinsic_cylinder(const Eigen::VectorXd& x0, double t0, double r, double lambda,
                            const NFunction& phi) {
  if (!(r > 0.0)) throw UsageError("intrinsic_cylinder: radius must be positive");
  if (!(lambda > 0.0)) throw UsageError("intrinsic_cylinder: lambda must be positive");
  Cylinder c{x0, t0, r, r * r / phi.second_derivative(lambda)};
  c.lambda = lambda;
  return c;
}

std::string estimate_id_name(EstimateId id) {
  switch (id) {
    case EstimateId::SupU: return "sup_u";
    case EstimateId::SupGrad: return "sup_grad";
    case EstimateId::OscDecay: return "osc_decay";
    case EstimateId::Embedding: return "embedding";
    case EstimateId::DensityNondeg: return "density_nondeg";
    case EstimateId::DensityDeg: return "density_deg";
  }
  return "?";
}

std::string EstimateReport::csv_header() {
  return "estimate_id,lhs,rhs,constant,lambda,r,R,eps,h,dt,n,N,p,q";
}

std::string EstimateReport::csv_row() const {
  std::ostringstream os;
  os << estimate_id_name(id) << ',' << fmt_full(lhs) << ',' << fmt_full(rhs) << ','
     << fmt_full(constant) << ',' << fmt_full(ctx.lambda) << ',' << fmt_full(ctx.r) << ','
     << fmt_full(ctx.R) << ',' << fmt_full(ctx.eps) << ',' << fmt_full(ctx.h) << ','
     << fmt_full(ctx.dt) << ',' << ctx.n << ',' << ctx.N << ',' << fmt_full(ctx.p) << ','
     << fmt_full(ctx.q);
  return os.str();
}

double lambda_intrinsic(const SpaceTimeField& field, const NFunction& phi, const Cylinder& q2r) {
  const int n = field.mesh().dim();
  const double expo = grad_sup_exponent(n, phi.p(), "lambda_intrinsic");
  require_inside_extent(field, q2r, "lambda_intrinsic");
  const RegionIndex idx = index_region(field, q2r);
  require_region(idx, "lambda_intrinsic");
  double acc = 0.0;
  for (int k : idx.slices)
    for (int e : idx.elements)
      acc += field.mesh().elements()[e].measure * phi.value(field.gradient(k, e).norm());
  const double avg = acc / (idx.space_measure * idx.slices.size());
  return std::pow(avg + 1.0, expo);
}

EstimateReport sup_u_check(const SpaceTimeField& field, const NFunction& phi, double r,
                           const Eigen::VectorXd& x0, double t0) {
  const Mesh& mesh = field.mesh();
  const int n = mesh.dim();
  const double p = phi.p(), q = phi.q();
  const double chi0 = std::min((p * (n + 2) / n - 2.0) / q, 2.0 / n);
  if (!(chi0 > 0.0)) throw UsageError("sup_u_check: assumption violation, chi0 <= 0");
  const Cylinder inner = plain_cylinder(x0, t0, r);
  const Cylinder outer = plain_cylinder(x0, t0, 2.0 * r);
  require_inside_extent(field, outer, "sup_u_check");
  const RegionIndex in_idx = index_region(field, inner);
  const RegionIndex out_idx = index_region(field, outer);
  require_region(in_idx, "sup_u_check");
  require_region(out_idx, "sup_u_check");

  auto psi = [&](double s) { return std::max(s * s, phi.value(s)); };
  double lhs = 0.0;
  for (int k : in_idx.slices)
    for (int e : in_idx.elements)
      lhs = std::max(lhs, phi.value(field.barycenter_value(k, e).norm() / r));
  double acc = 0.0;
  for (int k : out_idx.slices)
    for (int e : out_idx.elements) {
      const double s = field.barycenter_value(k, e).norm() / r;
      acc += mesh.elements()[e].measure * psi(s) * std::pow(phi.value(s), chi0);
    }
  const double avg = acc / (out_idx.space_measure * out_idx.slices.size());
  const double rhs = std::pow(avg, 1.0 / chi0) + 1.0;

  EstimateReport rep{EstimateId::SupU, lhs, rhs, lhs / rhs, {}};
  rep.ctx.r = r;
  rep.ctx.R = 2.0 * r;
  rep.ctx.h = mesh.h();
  rep.ctx.n = n;
  rep.ctx.N = field.components();
  rep.ctx.p = p;
  rep.ctx.q = q;
  return rep;
}

EstimateReport grad_sup_check(const SpaceTimeField& field, const NFunction& phi, double r,
                              const Eigen::VectorXd& x0, double t0, double epsilon) {
  const Mesh& mesh = field.mesh();
  const int n = mesh.dim();
  const double expo = grad_sup_exponent(n, phi.p(), "grad_sup_check");
  const Cylinder inner = plain_cylinder(x0, t0, r);
  const Cylinder outer = plain_cylinder(x0, t0, 2.0 * r);
  require_inside_extent(field, outer, "grad_sup_check");
  const RegionIndex in_idx = index_region(field, inner);
  const RegionIndex out_idx = index_region(field, outer);
  require_region(in_idx, "grad_sup_check");
  require_region(out_idx, "grad_sup_check");

  const ShiftedNFunction phi_eps(phi, epsilon);
  double lhs = 0.0;
  for (int k : in_idx.slices)
    for (int e : in_idx.elements) lhs = std::max(lhs, field.gradient(k, e).norm());
  double acc = 0.0;
  for (int k : out_idx.slices)
    for (int e : out_idx.elements)
      acc += mesh.elements()[e].measure * phi_eps.value(field.gradient(k, e).norm());
  const double avg = acc / (out_idx.space_measure * out_idx.slices.size());
  const double rhs = std::pow(avg + 1.0, expo);

  EstimateReport rep{EstimateId::SupGrad, lhs, rhs, lhs / rhs, {}};
  rep.ctx.r = r;
  rep.ctx.R = 2.0 * r;
  rep.ctx.eps = epsilon;
  rep.ctx.h = mesh.h();
  rep.ctx.n = n;
  rep.ctx.N = field.components();
  rep.ctx.p = phi.p();
  rep.ctx.q = phi.q();
  return rep;
}

double oscillation(const SpaceTimeField& field, const Cylinder& cyl) {
  const RegionIndex idx = index_region(field, cyl);
  require_region(idx, "oscillation");
  std::vector<Eigen::VectorXd> grads;
  grads.reserve(idx.slices.size() * idx.elements.size());
  for (int k : idx.slices)
    for (int e : idx.elements) {
      const Eigen::MatrixXd g = field.gradient(k, e);
      grads.emplace_back(Eigen::Map<const Eigen::VectorXd>(g.data(), g.size()));
    }
  double osc = 0.0;
  for (std::size_t i = 0; i < grads.size(); ++i)
    for (std::size_t j = i + 1; j < grads.size(); ++j)
      osc = std::max(osc, (grads[i] - grads[j]).norm());
  return osc;
}

HolderFit holder_fit(const SpaceTimeField& field, const NFunction& phi,
                     const Eigen::VectorXd& x0, double t0, double R,
                     const std::vector<double>& radii) {
  if (radii.size() < 4) throw UsageError("holder_fit: need at least 4 radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > radii[i + 1] && radii[i + 1] > 0.0))
      throw UsageError("holder_fit: radii must be strictly decreasing and positive");

  HolderFit fit;
  fit.lambda = lambda_intrinsic(field, phi, plain_cylinder(x0, t0, 2.0 * R));
  const double d2 = phi.second_derivative(fit.lambda);
  const double scale = std::max(std::sqrt(d2), 1.0 / std::sqrt(d2)) / R;

  std::vector<double> xs, ys;
  for (double r : radii) {
    const Cylinder cyl = intrinsic_cylinder(x0, t0, r, fit.lambda, phi);
    require_inside_extent(field, cyl, "holder_fit");
    const double osc = oscillation(field, cyl);
    fit.radii.push_back(r);
    fit.scaled_radii.push_back(r * scale);
    fit.oscillations.push_back(osc);
    if (osc > 0.0) {
      xs.push_back(std::log(r * scale));
      ys.push_back(std::log(osc));
    } else {
      ++fit.zeros_excluded;
    }
  }
  if (xs.size() < 2)
    throw NumericError("holder_fit: fit-degenerate, fewer than 2 nonzero oscillations");

  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    throw NumericError("holder_fit: fit-degenerate, radii collapse in log space");
  fit.alpha = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.alpha * sx) / m;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double d = ys[i] - (fit.alpha * xs[i] + fit.intercept);
    rss += d * d;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

DensityResult density_diagnostics(const SpaceTimeField& field, const Cylinder& cyl,
                                  double sigma) {
  if (!(sigma > 0.0 && sigma < 0.5))
    throw UsageError("density_diagnostics: sigma must lie in (0, 1/2)");
  if (!(cyl.lambda > 0.0))
    throw UsageError("density_diagnostics: cylinder carries no lambda");
  const RegionIndex idx = index_region(field, cyl);
  require_region(idx, "density_diagnostics");
  const double threshold = (1.0 - sigma) * cyl.lambda;
  double small = 0.0, total = 0.0;
  for (int k : idx.slices)
    for (int e : idx.elements) {
      const double meas = field.mesh().elements()[e].measure;
      total += meas;
      if (field.gradient(k, e).norm() <= threshold) small += meas;
    }
  DensityResult res;
  res.fraction_small = small / total;
  res.holds_nondeg = res.fraction_small <= sigma;
  res.holds_deg = res.fraction_small > sigma;
  return res;
}

EstimateReport embedding_check(const SpaceTimeField& field, int component, const NFunction& phi,
                               double m, double r, const Eigen::VectorXd& x0, double t1,
                               double t2, double theta_override) {
  const Mesh& mesh = field.mesh();
  const int n = mesh.dim();
  const double p = phi.p(), q = phi.q();
  if (!(m > 0.0)) throw UsageError("embedding_check: need m > 0");
  if (!(p > std::max(1.0, m * n / (n + m))))
    throw UsageError("embedding_check: assumption violation, need p > max{1, mn/(n+m)}");
  if (component < 0 || component >= field.components())
    throw UsageError("embedding_check: component out of range");

  double theta = theta_override;
  if (theta < 0.0) {
    const double num = n * (n * m - n * q - m * q);
    const double den = (n + m) * (n * m - n * q - m * p);
    theta = num / den;
  }
  if (!(theta > 0.0 && theta < 1.0))
    throw UsageError("embedding_check: theta outside (0,1); pass an explicit theta");

  Cylinder window{x0, t2, r, t2 - t1};
  require_inside_extent(field, window, "embedding_check");
  const RegionIndex idx = index_region(field, window);
  require_region(idx, "embedding_check");

  const double pw = (n + m) / static_cast<double>(n);
  double lhs_acc = 0.0, mid_acc = 0.0;
  double esssup = 0.0;
  for (int k : idx.slices) {
    double slice_m = 0.0;
    for (int e : idx.elements) {
      const double meas = mesh.elements()[e].measure;
      const double fv = std::abs(field.barycenter_value(k, e)[component]) / r;
      const double df = field.gradient(k, e).row(component).norm();
      lhs_acc += meas * std::pow(phi.value(fv), pw);
      mid_acc += meas * (phi.value(df) + phi.value(fv));
      slice_m += meas * std::pow(fv, m);
    }
    esssup = std::max(esssup, slice_m / idx.space_measure);
  }
  const double denom = idx.space_measure * idx.slices.size();
  const double lhs = lhs_acc / denom;
  const double rhs = std::pow(mid_acc / denom, theta * pw) *
                     std::pow(phi.value(std::pow(esssup, 1.0 / m)), (1.0 - theta) * pw);

  EstimateReport rep{EstimateId::Embedding, lhs, rhs, 0.0, {}};
  rep.constant = rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  rep.ctx.r = r;
  rep.ctx.h = mesh.h();
  rep.ctx.n = n;
  rep.ctx.N = field.components();
  rep.ctx.p = p;
  rep.ctx.q = q;
  return rep;
}

}  // namespace philab
