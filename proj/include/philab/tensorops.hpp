#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "philab/common.hpp"
#include "philab/orlicz.hpp"

namespace philab {

/// N x n matrix: row = component alpha, column = spatial index i.
using GradientMatrix = Eigen::MatrixXd;

/// Rank-4 tensor A[i][alpha][j][beta] stored as the symmetric (Nn)x(Nn)
/// matrix of the quadratic form on vec(Q), column-major flattening
/// idx(i,alpha) = i*N + alpha.
struct HessianTensor {
  Eigen::MatrixXd m;
  int N = 0;
  int n = 0;

  double entry(int i, int alpha, int j, int beta) const {
    return m(i * N + alpha, j * N + beta);
  }
};

namespace detail {

inline Eigen::VectorXd flatten(const GradientMatrix& Q) {
  return Eigen::Map<const Eigen::VectorXd>(Q.data(), Q.size());
}

template <class Phi>
HessianTensor hessian_impl(const Phi& phi, const GradientMatrix& Q) {
  const double r = Q.norm();
  const int N = static_cast<int>(Q.rows()), n = static_cast<int>(Q.cols());
  const double d1 = phi.derivative(r);
  const double d2 = phi.second_derivative(r);
  const double s1 = d1 / r;
  HessianTensor H{Eigen::MatrixXd::Identity(N * n, N * n) * s1, N, n};
  const Eigen::VectorXd v = flatten(Q);
  H.m.noalias() += ((d2 - s1) / (r * r)) * (v * v.transpose());
  return H;
}

}  // namespace detail

/// A(Q) = phi'(|Q|)/|Q| Q, continuously extended by A(0) = 0.
template <class Phi, class Derived>
GradientMatrix A_of(const Phi& phi, const Eigen::MatrixBase<Derived>& Q) {
  const GradientMatrix Qe = Q;
  const double r = Qe.norm();
  if (r == 0.0) return GradientMatrix::Zero(Qe.rows(), Qe.cols());
  return (phi.derivative(r) / r) * Qe;
}

/// V(Q) = sqrt(phi'(|Q|)/|Q|) Q, V(0) = 0.
template <class Phi, class Derived>
GradientMatrix V_of(const Phi& phi, const Eigen::MatrixBase<Derived>& Q) {
  const GradientMatrix Qe = Q;
  const double r = Qe.norm();
  if (r == 0.0) return GradientMatrix::Zero(Qe.rows(), Qe.cols());
  return std::sqrt(phi.derivative(r) / r) * Qe;
}

/// V_p^a(Q) = (a + |Q|)^{(p-2)/2} Q.
template <class Derived>
GradientMatrix Vp_of(double p, double a, const Eigen::MatrixBase<Derived>& Q) {
  if (!(a >= 0.0)) throw UsageError("Vp_of: shift must be nonnegative");
  const GradientMatrix Qe = Q;
  return std::pow(a + Qe.norm(), 0.5 * (p - 2.0)) * Qe;
}

template <class Derived>
HessianTensor hessian(const NFunction& phi, const Eigen::MatrixBase<Derived>& Q) {
  const GradientMatrix Qe = Q;
  if (Qe.norm() == 0.0)
    throw NumericError("hessian: singular at Q=0 for an unshifted N-function");
  return detail::hessian_impl(phi, Qe);
}

template <class Derived>
HessianTensor hessian(const ShiftedNFunction& phi, const Eigen::MatrixBase<Derived>& Q) {
  const GradientMatrix Qe = Q;
  if (Qe.norm() == 0.0) {
    if (phi.shift() == 0.0)
      throw NumericError("hessian: singular at Q=0 for shift a=0");
    const int N = static_cast<int>(Qe.rows()), n = static_cast<int>(Qe.cols());
    HessianTensor H{Eigen::MatrixXd::Identity(N * n, N * n) * phi.second_derivative(0.0), N, n};
    return H;
  }
  return detail::hessian_impl(phi, Qe);
}

struct EllipticityResult {
  double lambda_min;
  double lambda_max;
  double lower_bound;
  double upper_bound;
};

/// Extreme eigenvalues of hessian(phi, Q) against the band
/// [min{p-1,1}, max{q-1,1}] * phi'(|Q|)/|Q|. The spectrum of (defA) is
/// phi''(|Q|) on span vec(Q) and phi'(|Q|)/|Q| with multiplicity Nn-1.
template <class Phi, class Derived>
EllipticityResult ellipticity_check(const Phi& phi, const Eigen::MatrixBase<Derived>& Q) {
  const GradientMatrix Qe = Q;
  const double r = Qe.norm();
  if (!(r > 0.0)) throw NumericError("ellipticity_check: need |Q| > 0");
  const double s1 = phi.derivative(r) / r;
  const double d2 = phi.second_derivative(r);
  const double p = phi.p(), q = phi.q();
  const double lo = Qe.size() == 1 ? d2 : std::min(d2, s1);
  const double hi = Qe.size() == 1 ? d2 : std::max(d2, s1);
  return EllipticityResult{lo, hi, std::min(p - 1.0, 1.0) * s1, std::max(q - 1.0, 1.0) * s1};
}

struct MonotonicityTriple {
  double pairing;          // (A(P)-A(Q)) : (P-Q)
  double shifted_modular;  // phi_{|P|}(|P-Q|)
  double v_distance_sq;    // |V(P)-V(Q)|^2
};

template <class Phi>
MonotonicityTriple monotonicity_triple(const Phi& phi, const GradientMatrix& P,
                                       const GradientMatrix& Q) {
  if (P.norm() == 0.0 && Q.norm() == 0.0)
    throw UsageError("monotonicity_triple: P and Q must not both vanish");
  const GradientMatrix dA = A_of(phi, P) - A_of(phi, Q);
  const GradientMatrix dV = V_of(phi, P) - V_of(phi, Q);
  const double dist = (P - Q).norm();
  return MonotonicityTriple{dA.cwiseProduct(P - Q).sum(),
                            shifted(phi, P.norm()).value(dist), dV.squaredNorm()};
}

struct ADifferenceBounds {
  double a_diff;    // |A^a(Q) - A(Q)|
  double a_bound;   // phi'_{|Q|}(a)
  double v_diff_sq; // |V^a(Q) - V(Q)|^2
  double v_bound;   // c * phi_{|Q|}(a), c the recorded band constant
};

inline ADifferenceBounds a_difference_bounds(const NFunction& phi, double a,
                                             const GradientMatrix& Q,
                                             double v_band_constant = 8.0) {
  if (!(a >= 0.0)) throw UsageError("a_difference_bounds: shift must be nonnegative");
  if (!(Q.norm() > 0.0)) throw UsageError("a_difference_bounds: need |Q| > 0");
  const ShiftedNFunction phi_a(phi, a);
  const ShiftedNFunction phi_r(phi, Q.norm());
  return ADifferenceBounds{(A_of(phi_a, Q) - A_of(phi, Q)).norm(), phi_r.derivative(a),
                           (V_of(phi_a, Q) - V_of(phi, Q)).squaredNorm(),
                           v_band_constant * phi_r.value(a)};
}

namespace detail {
inline double holder_gamma1(const NFunction& phi) { return phi.gamma1().value_or(1.0); }
inline double holder_gamma1(const ShiftedNFunction& phi) {
  return phi.base().gamma1().value_or(1.0);
}
}  // namespace detail

/// ||D^2phi(Q) - D^2phi(P)||_F / [ (|Q-P|/|Q|)^gamma1 * phi''(|Q|) ],
/// defined for |Q-P| <= |Q|/2.
template <class Phi>
double hessian_holder_ratio(const Phi& phi, const GradientMatrix& Q, const GradientMatrix& P) {
  const double rQ = Q.norm();
  if (!(rQ > 0.0)) throw UsageError("hessian_holder_ratio: need |Q| > 0");
  const double dist = (Q - P).norm();
  if (dist > 0.5 * rQ)
    throw UsageError("hessian_holder_ratio: requires |Q-P| <= |Q|/2");
  if (dist == 0.0) return 0.0;
  const double num = (hessian(phi, Q).m - hessian(phi, P).m).norm();
  return num / (std::pow(dist / rQ, detail::holder_gamma1(phi)) * phi.second_derivative(rQ));
}

}  // namespace philab
