#pragma once

#include <optional>
#include <string>
#include <vector>

#include "philab/common.hpp"

namespace philab {

enum class Family { Power, PowerLog, MaxPowers, MinPowers };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Closed-form growth function normalized so phi(1) = 1:
///   Power(p)        t^p
///   PowerLog(p)     t^p log(1+t) / log 2            (upper exponent p+1)
///   MaxPowers(p,q)  max{t^p, t^q}
///   MinPowers(p,q)  min{t^p, t^q}
/// p is the lower growth exponent, q the upper one, L the almost-monotonicity
/// constant (1 for every family here). gamma1/c_h are the Hessian-Hoelder
/// exponent/constant, claimed only by the Power family.
class NFunction {
 public:
  static NFunction power(double p);
  static NFunction power_log(double p);
  static NFunction max_powers(double p, double q);
  static NFunction min_powers(double p, double q);
  static NFunction make(Family family, double p, double q);

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;  // t > 0 only

  Family family() const { return family_; }
  double p() const { return p_; }
  double q() const { return q_; }
  double L() const { return L_; }
  std::optional<double> gamma1() const { return gamma1_; }
  std::optional<double> c_h() const { return c_h_; }

  /// Kink location of phi' (MaxPowers/MinPowers only).
  std::optional<double> kink() const;
  /// The kink families have a jump in phi'; everything derived from
  /// Assumption 2 is only reported for them, never asserted.
  bool smooth() const { return family_ == Family::Power || family_ == Family::PowerLog; }
  bool convex() const { return family_ != Family::MinPowers; }

 private:
  NFunction(Family f, double p, double q);
  Family family_;
  double p_, q_;
  double L_ = 1.0;
  std::optional<double> gamma1_;
  std::optional<double> c_h_;
};

/// phi_a with phi_a'(t) = phi'(a+t) * t/(a+t). Power and Max/MinPowers have
/// closed-form values; PowerLog integrates phi_a' by adaptive Simpson.
/// Shifting is additive: (phi_a)_b = phi_{a+b}.
class ShiftedNFunction {
 public:
  ShiftedNFunction(NFunction base, double shift);

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;  // defined at t=0 iff shift > 0

  const NFunction& base() const { return base_; }
  double shift() const { return a_; }
  double p() const { return base_.p(); }
  double q() const { return base_.q(); }
  std::optional<double> kink() const;  // in t, i.e. at a + t = base kink

 private:
  NFunction base_;
  double a_;
};

inline ShiftedNFunction shifted(const NFunction& phi, double a) {
  return ShiftedNFunction(phi, a);
}
inline ShiftedNFunction shifted(const ShiftedNFunction& phi, double b) {
  return ShiftedNFunction(phi.base(), phi.shift() + b);
}

template <class Phi>
double eval(const Phi& phi, double t) {
  return phi.value(t);
}
template <class Phi>
double deriv(const Phi& phi, double t) {
  return phi.derivative(t);
}
template <class Phi>
double deriv2(const Phi& phi, double t) {
  return phi.second_derivative(t);
}

/// Legendre transform sup_{t>=0} (s t - phi(t)). Closed form for Power,
/// otherwise a 256-point log-grid scan on [1e-8,1e8] refined by golden
/// section around the best grid maxima.
double conjugate(const NFunction& phi, double s);
double conjugate_numeric(double (*f)(double, const void*), const void* ctx, double s);

/// phi(t) + phi*(s) - s*t; >= 0 up to the conjugate's numerical slack.
double young_gap(const NFunction& phi, double s, double t);

/// 400 log-spaced points in [1e-6, 1e6].
std::vector<double> default_t_grid();

struct RatioRange {
  double min_ratio;
  double max_ratio;
};

/// Extrema of t phi'(t)/phi(t) over the grid; callers assert [p,q].
/// Points within relative 1e-8 of a phi' kink are skipped.
template <class Phi>
RatioRange check_characteristic(const Phi& phi, const std::vector<double>& t_grid);

/// Extrema of t phi''(t)/phi'(t); callers assert [p-1, q-1].
template <class Phi>
RatioRange check_assumption2(const Phi& phi, const std::vector<double>& t_grid);

struct ShiftRatios {
  double value_over_deriv_t;    // phi_a(t) / (phi_a'(t) t)
  double value_over_d2_t2;      // phi_a(t) / (phi''(a+t) t^2)
  double sum_shift_vs_unshift;  // phi(a+t) / (phi_a(t) + phi(a))
};
ShiftRatios shift_equivalence_ratios(const NFunction& phi, double a, double t);

struct ShiftChangeSample {
  double a_norm;
  double b_norm;
  double ab_dist;  // |a - b| for the underlying matrices
  double t;
};

/// Smallest c with phi_{|a|}(t) <= c phi_{|b|}(t) + eta phi_{|a|}(|a-b|)
/// over the samples.
double change_of_shift_constant(const NFunction& phi, double eta,
                                const std::vector<ShiftChangeSample>& samples);

namespace detail {
bool skip_near_kink(std::optional<double> kink, double t, double rel = 1e-8);
}

template <class Phi>
RatioRange check_characteristic(const Phi& phi, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw UsageError("check_characteristic: empty t grid");
  RatioRange r{1e300, -1e300};
  for (double t : t_grid) {
    if (!(t > 0.0)) throw UsageError("check_characteristic: grid points must be positive");
    if (detail::skip_near_kink(phi.kink(), t)) continue;
    const double ratio = t * phi.derivative(t) / phi.value(t);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  return r;
}

template <class Phi>
RatioRange check_assumption2(const Phi& phi, const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw UsageError("check_assumption2: empty t grid");
  RatioRange r{1e300, -1e300};
  for (double t : t_grid) {
    if (!(t > 0.0)) throw UsageError("check_assumption2: grid points must be positive");
    if (detail::skip_near_kink(phi.kink(), t)) continue;
    const double ratio = t * phi.second_derivative(t) / phi.derivative(t);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
  }
  return r;
}

}  // namespace philab
