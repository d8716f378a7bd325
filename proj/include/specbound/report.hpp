// Verdict carriers shared by the identity and inequality checks. Slack is
// rhs - lhs, so every law is phrased as lhs <= rhs and a pass means
// slack >= -tolerance. Monotone laws report the worst adjacent-pair violation
// against the same tolerance scale.

#pragma once

#include "specbound/core.hpp"

#include <optional>
#include <string>

namespace specbound {

struct ReportContext {
  std::optional<int> n;
  std::optional<double> p, q, z, t;
  std::optional<int> k;
  std::optional<double> rho;
};

struct InequalityReport {
  std::string law;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  ReportContext context;
  std::string note;  // e.g. "outside verified hypothesis range"
};

struct MonotonicityReport {
  std::string law;
  Vector grid;
  Vector ratio_values;
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool verdict = false;
  ReportContext context;
  std::string note;
};

// rel * max(|lhs|, |rhs|, 1): every inequality verdict's default budget.
inline double default_tolerance(double lhs, double rhs, double rel = 1e-9) {
  return rel * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

inline InequalityReport make_inequality_report(std::string law, double lhs, double rhs,
                                               double tol_rel, ReportContext context = {}) {
  InequalityReport r;
  r.law = std::move(law);
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.tolerance = default_tolerance(lhs, rhs, tol_rel);
  r.verdict = r.slack >= -r.tolerance;
  r.context = context;
  return r;
}

}  // namespace specbound
