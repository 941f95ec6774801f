#include "philab/checks.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "philab/parallel.hpp"
#include "philab/rng.hpp"
#include "philab/tensorops.hpp"

namespace philab {

std::string CheckRow::csv_header() { return "check_id,samples,worst_margin,band_lo,band_hi,pass"; }

std::string CheckRow::csv_row() const {
  std::ostringstream os;
  os << check_id << ',' << samples << ',' << fmt_full(worst_margin) << ',' << fmt_full(band_lo)
     << ',' << fmt_full(band_hi) << ',' << (pass ? 1 : 0);
  return os.str();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Stats {
  double min_margin = kInf;
  double band_lo = kInf;
  double band_hi = -kInf;
  long count = 0;

  void margin(double m) {
    min_margin = std::min(min_margin, m);
    ++count;
  }
  void band(double b) {
    band_lo = std::min(band_lo, b);
    band_hi = std::max(band_hi, b);
  }
  void absorb(const Stats& o) {
    min_margin = std::min(min_margin, o.min_margin);
    band_lo = std::min(band_lo, o.band_lo);
    band_hi = std::max(band_hi, o.band_hi);
    count += o.count;
  }
};

/// Seeded, chunk-deterministic sample loop. body(rng, stats) once per sample.
template <class Body>
Stats sampled(const Rng& stream, long n, const Body& body) {
  constexpr long kChunk = 512;
  const long nchunks = (n + kChunk - 1) / kChunk;
  std::vector<Stats> partial(static_cast<std::size_t>(nchunks));
  parallel_chunks(n, kChunk, [&](long chunk, long begin, long end) {
    Rng rng = stream.fork(static_cast<std::uint64_t>(chunk));
    Stats s;
    for (long i = begin; i < end; ++i) body(rng, s);
    partial[static_cast<std::size_t>(chunk)] = s;
  });
  Stats total;
  for (const Stats& s : partial) total.absorb(s);
  return total;
}

GradientMatrix random_matrix(Rng& rng, int N, int n) {
  GradientMatrix m(N, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < N; ++i) m(i, j) = rng.normal();
  return m;
}

GradientMatrix random_matrix(Rng& rng) {
  const int N = rng.uniform_int(1, 3), n = rng.uniform_int(1, 3);
  return random_matrix(rng, N, n);
}

/// Degenerate regimes where the equivalence bands are tightest: near-collinear,
/// near-zero-partner and orthogonal pairs at three scales. These are injected
/// into every sample set, which is what makes the recorded band constants
/// stable under sample-count growth.
std::vector<std::pair<GradientMatrix, GradientMatrix>> targeted_pairs() {
  std::vector<std::pair<GradientMatrix, GradientMatrix>> v;
  GradientMatrix e = GradientMatrix::Zero(2, 2), f = GradientMatrix::Zero(2, 2);
  e(0, 0) = 1.0;
  f(1, 1) = 1.0;
  for (double scale : {1e-3, 0.37, 1.7, 1e3}) {
    v.emplace_back(scale * e, scale * (1.0 + 1e-6) * e);
    v.emplace_back(scale * e, scale * 1e-7 * e);
    v.emplace_back(scale * e, scale * f);
    v.emplace_back(scale * e, -scale * e);
  }
  return v;
}

bool kink_near(const NFunction& phi, double r, double rel = 1e-8) {
  return detail::skip_near_kink(phi.kink(), r, rel);
}

double young_scale(const NFunction& phi, double s, double t) {
  return phi.value(t) + conjugate(phi, s) + 1.0;
}

struct SuiteBuilder {
  const NFunction& phi;
  const VerifyOptions& opt;
  Rng master;
  std::vector<CheckRow> rows;

  SuiteBuilder(const NFunction& f, const VerifyOptions& o)
      : phi(f), opt(o), master(Rng::master(o.seed)) {}

  void add(const std::string& id, long samples, double margin, const Stats& s, bool asserted,
           double tol) {
    CheckRow row{id, samples, margin, s.band_lo, s.band_hi, true};
    if (row.band_lo > row.band_hi) row.band_lo = row.band_hi = 0.0;  // no band recorded
    if (asserted) {
      row.pass = margin >= -tol;
    } else {
      row.check_id += "_report";
      row.pass = std::isfinite(s.band_lo) && std::isfinite(s.band_hi);
    }
    rows.push_back(std::move(row));
  }
};

void check_characteristic_bands(SuiteBuilder& b) {
  const auto grid = default_t_grid();
  const double p = b.phi.p(), q = b.phi.q();
  {
    const RatioRange r = check_characteristic(b.phi, grid);
    Stats s;
    s.band(r.min_ratio);
    s.band(r.max_ratio);
    const double margin = std::min(r.min_ratio - p, q - r.max_ratio) / std::max(1.0, q);
    b.add("characteristic", static_cast<long>(grid.size()), margin, s, true, 1e-10);
  }
  {
    const RatioRange r = check_assumption2(b.phi, grid);
    Stats s;
    s.band(r.min_ratio);
    s.band(r.max_ratio);
    const double margin =
        std::min(r.min_ratio - (p - 1.0), (q - 1.0) - r.max_ratio) / std::max(1.0, q - 1.0);
    b.add("assumption2", static_cast<long>(grid.size()), margin, s, true, 1e-10);
  }
}

void check_scaling_bands(SuiteBuilder& b) {
  const Rng stream = b.master.substream("scaling_bands");
  const NFunction& phi = b.phi;
  const double p = phi.p(), q = phi.q();
  Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
    const double t = rng.log_uniform(1e-6, 1e6);
    const double c = rng.log_uniform(1e-4, 0.999);
    const double C = rng.log_uniform(1.001, 1e4);
    const double ft = phi.value(t);
    const double up = std::pow(c, p) * ft, dn = std::pow(c, q) * ft;
    const double fct = phi.value(c * t);
    st.margin(std::min(fct - dn, up - fct) / up);
    const double up2 = std::pow(C, q) * ft, dn2 = std::pow(C, p) * ft;
    const double fCt = phi.value(C * t);
    st.margin(std::min(fCt - dn2, up2 - fCt) / up2);
    st.band(fct / ft);
  });
  b.add("scaling_bands", b.opt.samples, s.min_margin, s, true, 1e-10);
}

void check_almost_monotone(SuiteBuilder& b) {
  const Rng stream = b.master.substream("almost_monotone");
  const NFunction& phi = b.phi;
  const double p = phi.p(), q = phi.q(), L = phi.L();
  Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
    double s0 = rng.log_uniform(1e-6, 1e6), t0 = rng.log_uniform(1e-6, 1e6);
    if (s0 > t0) std::swap(s0, t0);
    const double inc_l = phi.value(s0) / std::pow(s0, p), inc_r = L * phi.value(t0) / std::pow(t0, p);
    const double dec_l = phi.value(t0) / std::pow(t0, q), dec_r = L * phi.value(s0) / std::pow(s0, q);
    st.margin(std::min((inc_r - inc_l) / inc_r, (dec_r - dec_l) / dec_r));
  });
  b.add("almost_monotone", b.opt.samples, s.min_margin, s, true, 1e-10);
}

void check_young(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  {
    const Rng stream = b.master.substream("young_gap");
    Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
      const double t = rng.log_uniform(1e-3, 1e3), sv = rng.log_uniform(1e-3, 1e3);
      const double g = young_gap(phi, sv, t) / young_scale(phi, sv, t);
      st.margin(g);
      st.band(g);
    });
    b.add("young_gap", b.opt.samples, s.min_margin, s, true, 1e-9);
  }
  {
    const Rng stream = b.master.substream("young_equality");
    Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
      const double t = rng.log_uniform(1e-3, 1e3);
      if (kink_near(phi, t)) return;
      const double sv = phi.derivative(t);
      const double rel = std::abs(young_gap(phi, sv, t)) / young_scale(phi, sv, t);
      st.margin(1e-6 - rel);
      st.band(rel);
    });
    b.add("young_equality", b.opt.samples, s.min_margin, s, phi.convex(), 0.0);
  }
}

void check_hok24(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  const double lo = 0.25 * (phi.p() - 1.0), hi = 4.0 * (phi.q() - 1.0);
  Stats s;
  const long n = 100;
  for (long i = 0; i < n; ++i) {
    const double t = std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * i / (n - 1.0));
    if (kink_near(phi, t)) continue;
    const double ratio = conjugate(phi, phi.derivative(t)) / phi.value(t);
    s.margin(std::min(ratio - lo, hi - ratio) / hi);
    s.band(ratio);
  }
  b.add("hok24_band", n, s.min_margin, s, true, 1e-9);
}

void check_finite_differences(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  Stats s1, s2;
  const long n = 100;
  for (long i = 0; i < n; ++i) {
    const double t = std::exp(std::log(1e-3) + (std::log(1e3) - std::log(1e-3)) * i / (n - 1.0));
    const double h = 6e-6 * t;
    if (kink_near(phi, t, 1e-4)) continue;  // FD stencil must not straddle the kink
    const double fd1 = (phi.value(t + h) - phi.value(t - h)) / (2.0 * h);
    s1.margin(1e-6 - std::abs(fd1 - phi.derivative(t)) / std::abs(phi.derivative(t)));
    const double fd2 = (phi.derivative(t + h) - phi.derivative(t - h)) / (2.0 * h);
    s2.margin(1e-6 - std::abs(fd2 - phi.second_derivative(t)) / std::abs(phi.second_derivative(t)));
  }
  b.add("deriv_fd", n, s1.min_margin, s1, true, 0.0);
  b.add("deriv2_fd", n, s2.min_margin, s2, true, 0.0);
}

void check_shift_zero_identity(SuiteBuilder& b) {
  const Rng stream = b.master.substream("shift_zero");
  const NFunction& phi = b.phi;
  const ShiftedNFunction phi0(phi, 0.0);
  Stats s = sampled(stream, 1000, [&](Rng& rng, Stats& st) {
    const double t = rng.log_uniform(1e-6, 1e6);
    double d = std::abs(phi0.value(t) - phi.value(t));
    d = std::max(d, std::abs(phi0.derivative(t) - phi.derivative(t)));
    d = std::max(d, std::abs(phi0.second_derivative(t) - phi.second_derivative(t)));
    st.margin(-d);  // bit-identical: any nonzero difference fails
  });
  b.add("shift_zero_identity", 1000, s.min_margin, s, true, 0.0);
}

void check_shift_bands(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  // shifts widen the bands to include the quadratic exponent
  const double pl = std::min(phi.p(), 2.0), qh = std::max(phi.q(), 2.0);
  Rng rng = b.master.substream("shift_bands");
  std::vector<double> shifts{0.0, 0.01, 1.0, 100.0};
  for (int i = 0; i < 5; ++i) shifts.push_back(rng.log_uniform(1e-3, 1e3));
  const auto grid = default_t_grid();
  Stats s_char, s_ass2;
  for (double a : shifts) {
    const ShiftedNFunction phi_a(phi, a);
    const RatioRange rc = check_characteristic(phi_a, grid);
    s_char.margin(std::min(rc.min_ratio - pl, qh - rc.max_ratio) / qh);
    s_char.band(rc.min_ratio);
    s_char.band(rc.max_ratio);
    const RatioRange r2 = check_assumption2(phi_a, grid);
    s_ass2.margin(std::min(r2.min_ratio - (pl - 1.0), (qh - 1.0) - r2.max_ratio) / qh);
    s_ass2.band(r2.min_ratio);
    s_ass2.band(r2.max_ratio);
  }
  // the phi' jump of the kink families puts a Dirac mass into phi_a'', so the
  // integrated bands overshoot near the shifted kink: recorded, not asserted
  const long n = static_cast<long>(shifts.size() * grid.size());
  b.add("shift_characteristic", n, s_char.min_margin, s_char, phi.smooth(), 1e-9);
  b.add("shift_assumption2", n, s_ass2.min_margin, s_ass2, phi.smooth(), 1e-9);
}

void check_shift_equivalence(SuiteBuilder& b) {
  const Rng stream = b.master.substream("shift_equiv");
  const NFunction& phi = b.phi;
  Stats s1, s2, s3;
  constexpr double kLo = 1e-3, kHi = 1e3;
  Stats all = sampled(stream, 2000, [&](Rng& rng, Stats& st) {
    const double a = rng.uniform01() < 0.15 ? 0.0 : rng.log_uniform(1e-4, 1e2);
    const double t = rng.log_uniform(1e-3, 1e3);
    const ShiftRatios r = shift_equivalence_ratios(phi, a, t);
    for (double v : {r.value_over_deriv_t, r.value_over_d2_t2, r.sum_shift_vs_unshift}) {
      st.margin(std::min(v - kLo, kHi - v) / kHi);
      st.band(v);
    }
  });
  (void)s1;
  (void)s2;
  (void)s3;
  b.add("shift_equiv_ratios", 2000, all.min_margin, all, true, 1e-12);
}

void check_change_of_shift(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  auto gather = [&](long n) {
    Rng rng = b.master.substream("change_of_shift");
    std::vector<ShiftChangeSample> samples;
    samples.reserve(n);
    // deterministic scan of the (|a|,|b|,t) landscape with the minimal
    // distance |a-b| = ||a|-|b|| (the worst case: the eta-penalty is
    // smallest); this saturates the supremum so the recorded constant is
    // stable under sample-count growth
    for (int ia = 0; ia < 32; ++ia)
      for (int ib = 0; ib < 32; ++ib)
        for (int it = 0; it < 16; ++it) {
          const double na = std::pow(10.0, -3.0 + 6.0 * ia / 31.0);
          const double nb = std::pow(10.0, -3.0 + 6.0 * ib / 31.0);
          const double t = std::pow(10.0, -3.0 + 6.0 * it / 15.0);
          samples.push_back(ShiftChangeSample{na, nb, std::abs(na - nb), t});
        }
    for (long i = 0; i < n; ++i) {
      Eigen::Vector3d a, bb;
      for (int k = 0; k < 3; ++k) {
        a[k] = rng.normal();
        bb[k] = rng.normal();
      }
      const double scale = rng.log_uniform(1e-2, 1e2);
      samples.push_back(ShiftChangeSample{scale * a.norm(), scale * bb.norm(),
                                          scale * (a - bb).norm(), rng.log_uniform(1e-3, 1e3)});
    }
    return samples;
  };
  const double c1 = change_of_shift_constant(phi, 0.5, gather(b.opt.samples));
  const double c2 = change_of_shift_constant(phi, 0.5, gather(10 * b.opt.samples));
  Stats s;
  s.band(c1);
  s.band(c2);
  const double drift = std::abs(c2 - c1) / std::max(c1, 1e-12);
  b.add("change_of_shift_stability", 11 * b.opt.samples, 0.10 - drift, s, true, 0.0);
}

void check_monotonicity(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  const auto probes = targeted_pairs();
  auto run = [&](long n) {
    const Rng stream = b.master.substream("monotonicity");
    Stats s = sampled(stream, n, [&](Rng& rng, Stats& st) {
      const GradientMatrix P = random_matrix(rng);
      GradientMatrix Q = random_matrix(rng, static_cast<int>(P.rows()), static_cast<int>(P.cols()));
      if (rng.uniform01() < 0.1) Q = P + 1e-6 * P.norm() * Q;  // near-collinear regime
      if (P.norm() == 0.0 && Q.norm() == 0.0) return;
      const MonotonicityTriple m = monotonicity_triple(phi, P, Q);
      const double scale = (P.norm() + Q.norm()) * (P.norm() + Q.norm());
      st.margin(m.pairing / std::max(scale, 1e-300));
      if (m.v_distance_sq > 0.0 && m.pairing > 0.0) {
        const double rv = m.pairing / m.v_distance_sq;
        st.band(std::max(rv, 1.0 / rv));
      }
    });
    for (const auto& [P, Q] : probes) {
      const MonotonicityTriple m = monotonicity_triple(phi, P, Q);
      const double scale = (P.norm() + Q.norm()) * (P.norm() + Q.norm());
      s.margin(m.pairing / std::max(scale, 1e-300));
      if (m.v_distance_sq > 0.0 && m.pairing > 0.0) {
        const double rv = m.pairing / m.v_distance_sq;
        s.band(std::max(rv, 1.0 / rv));
      }
    }
    return s;
  };
  const Stats s = run(b.opt.samples);
  b.add("monotone_pairing", b.opt.samples, s.min_margin, s, phi.convex(), 1e-12);

  const Stats s10 = run(10 * b.opt.samples);
  Stats band;
  band.band(s.band_hi);
  band.band(s10.band_hi);
  const double drift = std::abs(s10.band_hi - s.band_hi) / std::max(s.band_hi, 1e-12);
  b.add("v_equivalence_stability", 11 * b.opt.samples, 0.10 - drift, band, phi.smooth(), 0.0);

  // pairing vs the shifted modular phi_{|P|}(|P-Q|)
  const Rng stream = b.master.substream("mono_modular");
  Stats sm = sampled(stream, 2000, [&](Rng& rng, Stats& st) {
    const GradientMatrix P = random_matrix(rng);
    const GradientMatrix Q = random_matrix(rng, static_cast<int>(P.rows()), static_cast<int>(P.cols()));
    if ((P - Q).norm() == 0.0 || (P.norm() == 0.0 && Q.norm() == 0.0)) return;
    const MonotonicityTriple m = monotonicity_triple(phi, P, Q);
    if (m.shifted_modular > 0.0 && m.pairing > 0.0) {
      const double r = m.pairing / m.shifted_modular;
      st.band(std::max(r, 1.0 / r));
      st.margin(1e3 - std::max(r, 1.0 / r));
    }
  });
  b.add("modular_equivalence_band", 2000, sm.min_margin, sm, phi.smooth(), 0.0);
}

void check_operator_bands(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  {
    const Rng stream = b.master.substream("a_lipschitz_band");
    Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
      const GradientMatrix P = random_matrix(rng);
      const GradientMatrix Q =
          random_matrix(rng, static_cast<int>(P.rows()), static_cast<int>(P.cols()));
      const double d = (P - Q).norm();
      if (d == 0.0 || P.norm() == 0.0) return;
      const double denom = shifted(phi, P.norm()).derivative(d);
      if (denom <= 0.0) return;
      const double r = (A_of(phi, P) - A_of(phi, Q)).norm() / denom;
      st.band(r);
      st.margin(std::min(r - 1e-3, 1e3 - r));
    });
    b.add("a_difference_band", b.opt.samples, s.min_margin, s, phi.smooth(), 0.0);
  }
  {
    const Rng stream = b.master.substream("de67");
    Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
      Eigen::Vector3d sv, tv;
      for (int k = 0; k < 3; ++k) {
        sv[k] = rng.normal();
        tv[k] = rng.normal();
      }
      const double scale = rng.log_uniform(1e-2, 1e2);
      sv *= scale;
      tv *= scale;
      const double dist = (sv - tv).norm(), sum = sv.norm() + tv.norm();
      if (dist == 0.0 || sum == 0.0) return;
      const double r = phi.second_derivative(sum) * dist / shifted(phi, sv.norm()).derivative(dist);
      st.band(r);
      st.margin(std::min(r - 1e-3, 1e3 - r));
    });
    b.add("shift_comparison_band", b.opt.samples, s.min_margin, s, phi.smooth(), 0.0);
  }
  {
    const Rng stream = b.master.substream("de619");
    Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
      Eigen::Vector3d s1, s2, t;
      for (int k = 0; k < 3; ++k) {
        s1[k] = rng.normal();
        s2[k] = rng.normal();
        t[k] = rng.normal();
      }
      const double lhs = shifted(phi, s2.norm()).derivative((s1 - s2).norm());
      const double rhs = shifted(phi, t.norm()).derivative((s1 - t).norm()) +
                         shifted(phi, t.norm()).derivative((s2 - t).norm());
      if (rhs <= 0.0) return;
      const double r = lhs / rhs;
      st.band(r);
      st.margin(1e3 - r);
    });
    b.add("triangle_shift_band", b.opt.samples, s.min_margin, s, phi.smooth(), 0.0);
  }
}

void check_ellipticity(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  const Rng stream = b.master.substream("ellipticity");
  Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
    const GradientMatrix Q = random_matrix(rng);
    const double r = Q.norm();
    if (r == 0.0 || kink_near(phi, r)) return;
    const EllipticityResult e = ellipticity_check(phi, Q);
    st.margin(std::min(e.lambda_min - e.lower_bound, e.upper_bound - e.lambda_max) /
              e.upper_bound);
    st.band(e.lambda_min / e.upper_bound);
    st.band(e.lambda_max / e.upper_bound);
  });
  b.add("ellipticity", b.opt.samples, s.min_margin, s, true, 1e-8);

  if (phi.family() == Family::Power) {
    const Rng stream2 = b.master.substream("eig_crosscheck");
    Stats sc = sampled(stream2, 2000, [&](Rng& rng, Stats& st) {
      const GradientMatrix Q = random_matrix(rng);
      const double r = Q.norm();
      if (r == 0.0) return;
      const HessianTensor H = hessian(phi, Q);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H.m);
      const double lam_lo = eig.eigenvalues().minCoeff();
      const double lam_hi = eig.eigenvalues().maxCoeff();
      const double d2 = phi.second_derivative(r), s1v = phi.derivative(r) / r;
      const double an_lo = Q.size() == 1 ? d2 : std::min(d2, s1v);
      const double an_hi = Q.size() == 1 ? d2 : std::max(d2, s1v);
      const double rel =
          std::max(std::abs(lam_lo - an_lo), std::abs(lam_hi - an_hi)) / std::max(an_hi, 1e-300);
      st.margin(1e-10 - rel);
      st.band(rel);
    });
    b.add("eig_crosscheck", 2000, sc.min_margin, sc, true, 0.0);
  }
}

void check_shift_difference(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  const Rng stream = b.master.substream("a_diff_bounds");
  Stats s1, s2;
  Stats both = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
    const GradientMatrix Q = random_matrix(rng);
    if (Q.norm() == 0.0) return;
    const double a = rng.uniform01() < 0.1 ? 0.0 : rng.log_uniform(1e-6, 1e3);
    const ADifferenceBounds d = a_difference_bounds(phi, a, Q);
    if (a == 0.0) {
      st.margin(-std::abs(d.a_diff) - std::abs(d.v_diff_sq));
      return;
    }
    st.margin((d.a_bound - d.a_diff) / std::max(d.a_bound, 1e-300));
    st.margin((d.v_bound - d.v_diff_sq) / std::max(d.v_bound, 1e-300));
    if (d.v_bound > 0.0) st.band(d.v_diff_sq / (d.v_bound / 8.0));  // observed constant
  });
  (void)s1;
  (void)s2;
  b.add("shift_difference_bounds", b.opt.samples, both.min_margin, both, phi.smooth(), 1e-12);
}

void check_line_integral(SuiteBuilder& b) {
  if (!b.phi.smooth()) return;  // phi' jumps at the kink: the identity needs C^2
  const NFunction& phi = b.phi;
  const Rng stream = b.master.substream("line_integral");
  auto run = [&](int nodes, double tol, const std::string& id) {
    Stats s = sampled(stream, 300, [&](Rng& rng, Stats& st) {
      const GradientMatrix P = random_matrix(rng);
      const GradientMatrix Q =
          random_matrix(rng, static_cast<int>(P.rows()), static_cast<int>(P.cols()));
      double seg_min = kInf;
      for (int k = 0; k <= 64; ++k)
        seg_min = std::min(seg_min, (k / 64.0 * P + (1.0 - k / 64.0) * Q).norm());
      if (seg_min < 0.25 * std::max(P.norm(), Q.norm())) return;  // keep away from the origin
      GradientMatrix acc = GradientMatrix::Zero(P.rows(), P.cols());
      const Eigen::VectorXd d =
          Eigen::Map<const Eigen::VectorXd>(GradientMatrix(P - Q).data(), P.size());
      for (int k = 0; k < nodes; ++k) {
        const double tau = (k + 0.5) / nodes;
        const HessianTensor H = hessian(phi, GradientMatrix(tau * P + (1.0 - tau) * Q));
        const Eigen::VectorXd f = H.m * d;
        acc += Eigen::Map<const GradientMatrix>(f.data(), P.rows(), P.cols()) / nodes;
      }
      const GradientMatrix exact = A_of(phi, P) - A_of(phi, Q);
      const double rel = (acc - exact).norm() / std::max(exact.norm(), 1e-300);
      st.margin(tol - rel);
      st.band(rel);
    });
    b.add(id, 300, s.min_margin, s, true, 0.0);
  };
  run(64, 1e-3, "hessian_line_integral_64");
  run(1024, 1e-6, "hessian_line_integral_1024");
}

void check_rotation_equivariance(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  const Rng stream = b.master.substream("rotation");
  Stats s = sampled(stream, 2000, [&](Rng& rng, Stats& st) {
    const int n = rng.uniform_int(2, 3);
    const GradientMatrix Q = random_matrix(rng, rng.uniform_int(1, 3), n);
    if (Q.norm() == 0.0 || kink_near(phi, Q.norm(), 1e-6)) return;
    // random rotation from a QR factorization
    Eigen::MatrixXd G(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) G(i, j) = rng.normal();
    const Eigen::MatrixXd R = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    const double e1 = (A_of(phi, GradientMatrix(Q * R)) - GradientMatrix(A_of(phi, Q) * R)).norm();
    const double e2 = std::abs(V_of(phi, GradientMatrix(Q * R)).norm() - V_of(phi, Q).norm());
    const double scale = std::max(1.0, A_of(phi, Q).norm() + V_of(phi, Q).norm());
    st.margin(1e-12 - (e1 + e2) / scale);
  });
  b.add("rotation_equivariance", 2000, s.min_margin, s, true, 0.0);
}

void check_hessian_holder(SuiteBuilder& b) {
  const NFunction& phi = b.phi;
  const Rng stream = b.master.substream("hessian_holder");
  const double c_h = phi.c_h().value_or(kInf);
  Stats s = sampled(stream, b.opt.samples, [&](Rng& rng, Stats& st) {
    const GradientMatrix Q = random_matrix(rng);
    const double rQ = Q.norm();
    if (rQ == 0.0 || kink_near(phi, rQ, 1e-3)) return;
    GradientMatrix D = random_matrix(rng, static_cast<int>(Q.rows()), static_cast<int>(Q.cols()));
    if (D.norm() == 0.0) return;
    D *= rng.uniform(0.0, 0.5) * rQ / D.norm();
    const GradientMatrix P = Q - D;
    if (phi.kink() && (kink_near(phi, P.norm(), 1e-3) ||
                       (std::min(P.norm(), rQ) < 1.0 && std::max(P.norm(), rQ) > 1.0)))
      return;
    const double ratio = hessian_holder_ratio(phi, Q, P);
    st.band(ratio);
    st.margin(c_h - ratio);
  });
  const bool asserted = phi.c_h().has_value();
  b.add("hessian_holder", b.opt.samples, asserted ? s.min_margin : 0.0, s, asserted, 0.0);
}

}  // namespace

std::vector<CheckRow> verify_suite(const NFunction& phi, const VerifyOptions& options) {
  SuiteBuilder b(phi, options);
  check_characteristic_bands(b);
  check_scaling_bands(b);
  check_almost_monotone(b);
  check_young(b);
  check_hok24(b);
  check_finite_differences(b);
  check_shift_zero_identity(b);
  check_shift_bands(b);
  check_shift_equivalence(b);
  check_change_of_shift(b);
  check_monotonicity(b);
  check_operator_bands(b);
  check_ellipticity(b);
  check_shift_difference(b);
  check_line_integral(b);
  check_rotation_equivariance(b);
  check_hessian_holder(b);
  return b.rows;
}

}  // namespace philab
