#include "philab/orlicz.hpp"

#include <algorithm>
#include <cmath>

namespace philab {
namespace {

const double kLog2 = std::log(2.0);

void require_finite_nonneg(double t, const char* what) {
  if (!std::isfinite(t) || t < 0.0)
    throw UsageError(std::string(what) + ": argument must be finite and nonnegative");
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Power: return "power";
    case Family::PowerLog: return "powerlog";
    case Family::MaxPowers: return "maxpowers";
    case Family::MinPowers: return "minpowers";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  if (name == "power") return Family::Power;
  if (name == "powerlog") return Family::PowerLog;
  if (name == "maxpowers") return Family::MaxPowers;
  if (name == "minpowers") return Family::MinPowers;
  throw UsageError("unknown N-function family: " + name);
}

NFunction::NFunction(Family f, double p, double q) : family_(f), p_(p), q_(q) {
  if (!(p > 1.0)) throw UsageError("NFunction: lower exponent p must exceed 1");
  if (!(q >= p)) throw UsageError("NFunction: need p <= q");
  if (!std::isfinite(p) || !std::isfinite(q)) throw UsageError("NFunction: exponents must be finite");
}

NFunction NFunction::power(double p) {
  NFunction f(Family::Power, p, p);
  f.gamma1_ = 1.0;
  f.c_h_ = 5.0;  // recorded empirical constant, see the verify suite
  return f;
}

NFunction NFunction::power_log(double p) { return NFunction(Family::PowerLog, p, p + 1.0); }

NFunction NFunction::max_powers(double p, double q) {
  if (!(p < q)) throw UsageError("max_powers: need p < q");
  return NFunction(Family::MaxPowers, p, q);
}

NFunction NFunction::min_powers(double p, double q) {
  if (!(p < q)) throw UsageError("min_powers: need p < q");
  return NFunction(Family::MinPowers, p, q);
}

NFunction NFunction::make(Family family, double p, double q) {
  switch (family) {
    case Family::Power:
      if (q != p) throw UsageError("power family requires p = q");
      return power(p);
    case Family::PowerLog: return power_log(p);
    case Family::MaxPowers: return max_powers(p, q);
    case Family::MinPowers: return min_powers(p, q);
  }
  throw UsageError("bad family");
}

std::optional<double> NFunction::kink() const {
  if (family_ == Family::MaxPowers || family_ == Family::MinPowers) return 1.0;
  return std::nullopt;
}

double NFunction::value(double t) const {
  require_finite_nonneg(t, "NFunction::value");
  switch (family_) {
    case Family::Power: return std::pow(t, p_);
    case Family::PowerLog: return std::pow(t, p_) * std::log1p(t) / kLog2;
    case Family::MaxPowers: return t <= 1.0 ? std::pow(t, p_) : std::pow(t, q_);
    case Family::MinPowers: return t <= 1.0 ? std::pow(t, q_) : std::pow(t, p_);
  }
  return 0.0;
}

double NFunction::derivative(double t) const {
  require_finite_nonneg(t, "NFunction::derivative");
  if (t == 0.0) return 0.0;
  switch (family_) {
    case Family::Power: return p_ * std::pow(t, p_ - 1.0);
    case Family::PowerLog:
      return (p_ * std::pow(t, p_ - 1.0) * std::log1p(t) + std::pow(t, p_) / (1.0 + t)) / kLog2;
    case Family::MaxPowers: {
      // at the kink: one-sided limit from the right
      const double e = t < 1.0 ? p_ : q_;
      return e * std::pow(t, e - 1.0);
    }
    case Family::MinPowers: {
      const double e = t < 1.0 ? q_ : p_;
      return e * std::pow(t, e - 1.0);
    }
  }
  return 0.0;
}

double NFunction::second_derivative(double t) const {
  require_finite_nonneg(t, "NFunction::second_derivative");
  if (t == 0.0)
    throw UsageError("NFunction::second_derivative: undefined at t=0 (C^2 on (0,inf) only)");
  switch (family_) {
    case Family::Power: return p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0);
    case Family::PowerLog:
      return (p_ * (p_ - 1.0) * std::pow(t, p_ - 2.0) * std::log1p(t) +
              2.0 * p_ * std::pow(t, p_ - 1.0) / (1.0 + t) - std::pow(t, p_) / ((1.0 + t) * (1.0 + t))) /
             kLog2;
    case Family::MaxPowers: {
      const double e = t < 1.0 ? p_ : q_;
      return e * (e - 1.0) * std::pow(t, e - 2.0);
    }
    case Family::MinPowers: {
      const double e = t < 1.0 ? q_ : p_;
      return e * (e - 1.0) * std::pow(t, e - 2.0);
    }
  }
  return 0.0;
}

namespace {

// phi_a(t) for phi(t) = t^e: int_0^t e s (a+s)^{e-2} ds
//   = a^e [ expm1(e L) - e/(e-1) expm1((e-1) L) ],  L = log1p(t/a).
// The two expm1 terms cancel to O((t/a)^2), so switch to the Taylor series in
// x = t/a below x = 0.05 to keep full relative precision.
double power_shift_value(double e, double a, double t) {
  if (t == 0.0) return 0.0;
  if (a == 0.0) return std::pow(t, e);
  const double x = t / a;
  if (x > 0.05) {
    const double L = std::log1p(x);
    return std::pow(a, e) * (std::expm1(e * L) - e / (e - 1.0) * std::expm1((e - 1.0) * L));
  }
  // sum_{k>=2} [binom(e,k) - e/(e-1) binom(e-1,k)] x^k
  double bin_e = e, bin_e1 = e - 1.0;  // binom(., 1)
  double xk = x, sum = 0.0;
  for (int k = 2; k <= 16; ++k) {
    bin_e *= (e - k + 1.0) / k;
    bin_e1 *= (e - k) / k;
    xk *= x;
    const double term = (bin_e - e / (e - 1.0) * bin_e1) * xk;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return std::pow(a, e) * sum;
}

// int_{s0}^{s1} e s (a+s)^{e-2} ds via the substitution s = s0 + sigma:
//   s0 e [(u0+tau)^{e-1} - u0^{e-1}]/(e-1) + power_shift_value(e, u0, tau)
// with u0 = a + s0, tau = s1 - s0.
double power_shift_segment(double e, double a, double s0, double s1) {
  if (s0 == 0.0) return power_shift_value(e, a, s1);
  const double u0 = a + s0, tau = s1 - s0;
  if (tau <= 0.0) return 0.0;
  const double ramp = s0 * e / (e - 1.0) * std::pow(u0, e - 1.0) *
                      std::expm1((e - 1.0) * std::log1p(tau / u0));
  return ramp + power_shift_value(e, u0, tau);
}

struct SimpsonCtx {
  const NFunction* base;
  double a;
};

double shifted_deriv_raw(const NFunction& base, double a, double t) {
  if (t == 0.0) return 0.0;
  return base.derivative(a + t) * t / (a + t);
}

double adaptive_simpson(const SimpsonCtx& c, double lo, double hi, double flo, double fmid,
                        double fhi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
  const double fl = shifted_deriv_raw(*c.base, c.a, lmid);
  const double fr = shifted_deriv_raw(*c.base, c.a, rmid);
  const double left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid);
  const double right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(c, lo, mid, flo, fl, fmid, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(c, mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth - 1);
}

double shifted_value_quadrature(const NFunction& base, double a, double t) {
  SimpsonCtx c{&base, a};
  const double tol = 1e-12 * std::max(1.0, base.value(a + t));
  const double f0 = 0.0, fm = shifted_deriv_raw(base, a, 0.5 * t), f1 = shifted_deriv_raw(base, a, t);
  const double whole = t / 6.0 * (f0 + 4.0 * fm + f1);
  return adaptive_simpson(c, 0.0, t, f0, fm, f1, whole, tol, 48);
}

}  // namespace

ShiftedNFunction::ShiftedNFunction(NFunction base, double shift) : base_(base), a_(shift) {
  if (!std::isfinite(shift) || shift < 0.0)
    throw UsageError("ShiftedNFunction: shift must be finite and nonnegative");
}

std::optional<double> ShiftedNFunction::kink() const {
  if (auto k = base_.kink(); k && *k > a_) return *k - a_;
  return std::nullopt;
}

double ShiftedNFunction::value(double t) const {
  require_finite_nonneg(t, "ShiftedNFunction::value");
  if (a_ == 0.0) return base_.value(t);  // shift zero is the identity shift
  if (t == 0.0) return 0.0;
  switch (base_.family()) {
    case Family::Power:
      return power_shift_value(base_.p(), a_, t);
    case Family::MaxPowers:
    case Family::MinPowers: {
      const bool max_family = base_.family() == Family::MaxPowers;
      const double e_low = max_family ? base_.p() : base_.q();
      const double e_high = max_family ? base_.q() : base_.p();
      const double s_star = 1.0 - a_;  // a + s crosses the kink here
      if (s_star <= 0.0) return power_shift_segment(e_high, a_, 0.0, t);
      if (t <= s_star) return power_shift_segment(e_low, a_, 0.0, t);
      return power_shift_segment(e_low, a_, 0.0, s_star) +
             power_shift_segment(e_high, a_, s_star, t);
    }
    case Family::PowerLog:
      return shifted_value_quadrature(base_, a_, t);
  }
  return 0.0;
}

double ShiftedNFunction::derivative(double t) const {
  require_finite_nonneg(t, "ShiftedNFunction::derivative");
  if (a_ == 0.0) return base_.derivative(t);
  return shifted_deriv_raw(base_, a_, t);
}

double ShiftedNFunction::second_derivative(double t) const {
  require_finite_nonneg(t, "ShiftedNFunction::second_derivative");
  if (a_ == 0.0) return base_.second_derivative(t);
  if (t == 0.0) return base_.derivative(a_) / a_;  // smooth shifted limit
  const double u = a_ + t;
  return base_.second_derivative(u) * t / u + base_.derivative(u) * a_ / (u * u);
}

namespace {

double golden_max(const NFunction& phi, double s, double lo, double hi, int iters) {
  const double invphi = 0.6180339887498948482;
  auto f = [&](double t) { return s * t - phi.value(t); };
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return std::max(fc, fd);
}

}  // namespace

double conjugate(const NFunction& phi, double s) {
  require_finite_nonneg(s, "conjugate");
  if (s == 0.0) return 0.0;  // supremum attained at t = 0
  if (phi.family() == Family::Power) {
    const double p = phi.p();
    return (p - 1.0) * std::pow(s / p, p / (p - 1.0));
  }
  constexpr int kGrid = 256;
  const double lo = std::log(1e-8), hi = std::log(1e8);
  double ts[kGrid], fs[kGrid];
  for (int i = 0; i < kGrid; ++i) {
    ts[i] = std::exp(lo + (hi - lo) * i / (kGrid - 1));
    fs[i] = s * ts[i] - phi.value(ts[i]);
  }
  // MinPowers is not convex, so the objective may be bimodal: refine the two
  // best local grid maxima instead of just the global argmax.
  int best = 0, second = -1;
  for (int i = 0; i < kGrid; ++i) {
    const bool local = (i == 0 || fs[i] >= fs[i - 1]) && (i == kGrid - 1 || fs[i] >= fs[i + 1]);
    if (!local) continue;
    if (fs[i] > fs[best]) {
      second = best;
      best = i;
    } else if (second < 0 || fs[i] > fs[second]) {
      second = i;
    }
  }
  double result = 0.0;
  for (int idx : {best, second}) {
    if (idx < 0) continue;
    const double a = ts[std::max(0, idx - 1)];
    const double b = ts[std::min(kGrid - 1, idx + 1)];
    result = std::max(result, golden_max(phi, s, a, b, 60));
  }
  return std::max(result, 0.0);
}

double young_gap(const NFunction& phi, double s, double t) {
  require_finite_nonneg(s, "young_gap");
  require_finite_nonneg(t, "young_gap");
  return phi.value(t) + conjugate(phi, s) - s * t;
}

std::vector<double> default_t_grid() {
  std::vector<double> g(400);
  const double lo = std::log(1e-6), hi = std::log(1e6);
  for (int i = 0; i < 400; ++i) g[i] = std::exp(lo + (hi - lo) * i / 399.0);
  return g;
}

bool detail::skip_near_kink(std::optional<double> kink, double t, double rel) {
  return kink && std::abs(t - *kink) <= rel * *kink;
}

ShiftRatios shift_equivalence_ratios(const NFunction& phi, double a, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw UsageError("shift_equivalence_ratios: need t > 0");
  require_finite_nonneg(a, "shift_equivalence_ratios");
  const ShiftedNFunction phi_a(phi, a);
  const double v = phi_a.value(t);
  return ShiftRatios{
      v / (phi_a.derivative(t) * t),
      v / (phi.second_derivative(a + t) * t * t),
      phi.value(a + t) / (v + phi.value(a)),
  };
}

double change_of_shift_constant(const NFunction& phi, double eta,
                                const std::vector<ShiftChangeSample>& samples) {
  if (!(eta > 0.0)) throw UsageError("change_of_shift_constant: eta must be positive");
  double c = 0.0;
  for (const auto& s : samples) {
    const double lhs = ShiftedNFunction(phi, s.a_norm).value(s.t);
    const double eta_term = eta * ShiftedNFunction(phi, s.a_norm).value(s.ab_dist);
    const double rhs_base = ShiftedNFunction(phi, s.b_norm).value(s.t);
    if (rhs_base <= 0.0) {
      if (lhs - eta_term > 0.0)
        throw NumericError("change_of_shift_constant: no finite c covers a sample with phi_b(t)=0");
      continue;
    }
    c = std::max(c, (lhs - eta_term) / rhs_base);
  }
  return c;
}

}  // namespace philab
