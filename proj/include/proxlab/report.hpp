#pragma once

// Uniform result record for sampled inequality checks.
//
// Slack convention: every check evaluates a signed slack per sample, with
// slack >= 0 meaning the property held there.  For inequality checks the
// slack is RHS - LHS; for equality-style checks (axioms, agreement of two
// formulas) it is -|deviation|.  A sample counts as a violation when
// slack < -tolerance, and as a warning when slack lies in [-tolerance, 0).
// worst_slack is the minimum slack seen over all evaluated samples.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

namespace proxlab {

using ordered_json = nlohmann::ordered_json;

struct check_report {
  std::string inequality;
  std::int64_t samples = 0;  // evaluations performed
  std::int64_t violations = 0;
  std::int64_t warnings = 0;
  double worst_slack = std::numeric_limits<double>::infinity();
  double tolerance = 0.0;
  ordered_json worst_witness;  // inputs reproducing worst_slack

  bool clean() const { return violations == 0; }

  void record(double slack, const ordered_json& witness) {
    ++samples;
    if (slack < -tolerance) ++violations;
    else if (slack < 0.0) ++warnings;
    if (slack < worst_slack) {
      worst_slack = slack;
      worst_witness = witness;
    }
  }

  // Associative merge of chunk-local reports; call in chunk order so the
  // retained witness is deterministic (strictly smaller slack wins).
  void merge(const check_report& o) {
    samples += o.samples;
    violations += o.violations;
    warnings += o.warnings;
    if (o.worst_slack < worst_slack) {
      worst_slack = o.worst_slack;
      worst_witness = o.worst_witness;
    }
  }

  ordered_json to_json() const {
    ordered_json j;
    j["inequality"] = inequality;
    j["samples"] = samples;
    j["violations"] = violations;
    j["warnings"] = warnings;
    if (std::isfinite(worst_slack)) j["worst_slack"] = worst_slack;
    else j["worst_slack"] = nullptr;
    j["tolerance"] = tolerance;
    j["clean"] = clean();
    if (!worst_witness.is_null()) j["worst_witness"] = worst_witness;
    return j;
  }
};

namespace detail {
inline check_report make_report(const std::string& name, double tol) {
  check_report r;
  r.inequality = name;
  r.tolerance = tol;
  return r;
}
}  // namespace detail

}  // namespace proxlab
