#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "philab/field.hpp"
#include "philab/orlicz.hpp"

namespace philab {

/// Space-time cylinder B_r(x0) x (t0 - time_depth, t0]. Plain parabolic
/// cylinders have time_depth = r^2; intrinsic ones r^2/phi''(lambda) with
/// phi''(lambda) of the base (unshifted) growth function.
struct Cylinder {
  Eigen::VectorXd x0;
  double t0 = 0.0;
  double r = 0.0;
  double time_depth = 0.0;
  double lambda = std::numeric_limits<double>::quiet_NaN();

  bool contains(const Eigen::VectorXd& x, double t) const {
    const double tol = 1e-12 * std::max(1.0, std::abs(t0));
    return (x - x0).norm() < r && t > t0 - time_depth - tol && t <= t0 + tol;
  }
};

Cylinder plain_cylinder(const Eigen::VectorXd& x0, double t0, double r);
Cylinder intrinsic_cylinder(const Eigen::VectorXd& x0, double t0, double r, double lambda,
                            const NFunction& phi);

enum class EstimateId { SupU, SupGrad, OscDecay, Embedding, DensityNondeg, DensityDeg };
std::string estimate_id_name(EstimateId id);

struct EstimateContext {
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double r = std::numeric_limits<double>::quiet_NaN();
  double R = std::numeric_limits<double>::quiet_NaN();
  double eps = std::numeric_limits<double>::quiet_NaN();
  double h = std::numeric_limits<double>::quiet_NaN();
  double dt = std::numeric_limits<double>::quiet_NaN();
  int n = 0;
  int N = 0;
  double p = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
};

/// Both sides of one quantitative estimate plus the implied constant.
struct EstimateReport {
  EstimateId id;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;  // lhs/rhs, or the fitted exponent for OscDecay
  EstimateContext ctx;

  std::string csv_row() const;
  static std::string csv_header();
};

/// Gradient scale lambda = (avg_{Q} phi(|Du|) + 1)^{2/((n+2)p - 2n)}.
double lambda_intrinsic(const SpaceTimeField& field, const NFunction& phi,
                        const Cylinder& q2r);

/// sup_{Q_r} phi(|u/r|) against the averaged right-hand side with
/// psi(s) = max{s^2, phi(s)} and chi0 = min{(p(n+2)/n - 2)/q, 2/n}.
EstimateReport sup_u_check(const SpaceTimeField& field, const NFunction& phi, double r,
                           const Eigen::VectorXd& x0, double t0);

/// max |Du| over Q_r against (avg_{Q_2r} phi_eps(|Du|) + 1)^{2/((n+2)p-2n)}.
EstimateReport grad_sup_check(const SpaceTimeField& field, const NFunction& phi, double r,
                              const Eigen::VectorXd& x0, double t0, double epsilon);

/// Exact pairwise sup of |Du(z1) - Du(z2)| (Frobenius) over the cylinder.
double oscillation(const SpaceTimeField& field, const Cylinder& cyl);

struct HolderFit {
  double alpha = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
  int zeros_excluded = 0;
  double lambda = 0.0;
  std::vector<double> radii;
  std::vector<double> scaled_radii;
  std::vector<double> oscillations;
};

/// Least-squares slope of log(osc) against log(r * scale) over intrinsic
/// cylinders, scale = max{phi''(lambda)^{1/2}, phi''(lambda)^{-1/2}}/R.
HolderFit holder_fit(const SpaceTimeField& field, const NFunction& phi,
                     const Eigen::VectorXd& x0, double t0, double R,
                     const std::vector<double>& radii);

struct DensityResult {
  double fraction_small = 0.0;  // |{|Du| <= (1-sigma) lambda}| / |Q|
  bool holds_nondeg = false;
  bool holds_deg = false;
};

DensityResult density_diagnostics(const SpaceTimeField& field, const Cylinder& cyl,
                                  double sigma);

/// Parabolic Orlicz embedding diagnostic for one scalar component on
/// B_r(x0) x [t1,t2]. theta defaults to the explicit exponent
/// n(nm-nq-mq)/((n+m)(nm-nq-mp)) and may be overridden.
EstimateReport embedding_check(const SpaceTimeField& field, int component,
                               const NFunction& phi, double m, double r,
                               const Eigen::VectorXd& x0, double t1, double t2,
                               double theta_override = -1.0);

}  // namespace philab
