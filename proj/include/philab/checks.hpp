#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "philab/orlicz.hpp"

namespace philab {

/// One row of the verify-suite CSV. Rows whose id ends in "_report" are
/// informational (recorded bands for inequalities outside the assumptions of
/// the family at hand); all others are hard assertions with pass <=>
/// worst_margin >= 0.
struct CheckRow {
  std::string check_id;
  long samples = 0;
  double worst_margin = 0.0;
  double band_lo = 0.0;
  double band_hi = 0.0;
  bool pass = true;

  std::string csv_row() const;
  static std::string csv_header();
};

struct VerifyOptions {
  long samples = 10000;
  std::uint64_t seed = 42;
};

/// The full inequality suite for one growth function: characteristic bands,
/// scaling, Young/conjugate, shift identities, operator monotonicity and
/// ellipticity, shift-difference bounds, Hessian-Hoelder. Deterministic for a
/// fixed seed and any thread count.
std::vector<CheckRow> verify_suite(const NFunction& phi, const VerifyOptions& options);

}  // namespace philab
