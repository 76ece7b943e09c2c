#pragma once

// The quantitative rate machinery:
//   sigma(b, theta, k) = theta(ceil(b^2 (k+1)^2))
//   psi(b, theta, phi, k) = sigma(b, theta, ceil(2b / phi(1/(k+1)))) + 1
// and the empirical certification that psi really is a rate of convergence
// for a given uniform instance.
//
// The ceiling arguments are evaluated in exact dyadic-rational arithmetic
// (a double is mant * 2^e with integer mant), overflow-guarded in 128-bit
// intermediates.  Power moduli with integer exponent stay on the exact
// path; other moduli fall back to long double with a documented guard.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "proxlab/checkers.hpp"
#include "proxlab/mapping.hpp"
#include "proxlab/modulus.hpp"
#include "proxlab/ppa.hpp"
#include "proxlab/schedule.hpp"

namespace proxlab {

using theta_fn = std::function<std::uint64_t(std::uint64_t)>;

namespace detail {

using i128 = __int128;

inline constexpr i128 i128_max() {
  return static_cast<i128>((~static_cast<unsigned __int128>(0)) >> 1);
}

// v = mant * 2^e2 exactly, mant odd.
struct dyadic {
  i128 mant;
  int e2;
};

inline dyadic to_dyadic(double v) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw parameter_range_error("rates: values must be positive and finite");
  int e = 0;
  const double frac = std::frexp(v, &e);
  auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  int e2 = e - 53;
  while ((mant & 1) == 0) {
    mant >>= 1;
    ++e2;
  }
  return {static_cast<i128>(mant), e2};
}

inline i128 checked_mul(i128 a, i128 b) {
  if (a == 0 || b == 0) return 0;
  if (a > i128_max() / b) throw rate_overflow("rates: 128-bit overflow in rate arithmetic");
  return a * b;
}

inline i128 checked_shl(i128 a, int s) {
  for (int i = 0; i < s; ++i) {
    if (a > i128_max() / 2) throw rate_overflow("rates: 128-bit overflow in rate arithmetic");
    a <<= 1;
  }
  return a;
}

inline i128 checked_pow(i128 base, int q) {
  i128 r = 1;
  for (int i = 0; i < q; ++i) r = checked_mul(r, base);
  return r;
}

// ceil(num / 2^s) for positive num.
inline i128 ceil_shr(i128 num, int s) {
  if (s >= 127) return num > 0 ? 1 : 0;
  const i128 den = static_cast<i128>(1) << s;
  return (num + den - 1) >> s;
}

inline std::uint64_t ceil_div_u64(i128 num, i128 den) {
  if (num > i128_max() - den + 1) throw rate_overflow("rates: 128-bit overflow in ceiling");
  const i128 q = (num + den - 1) / den;
  if (q > static_cast<i128>(UINT64_MAX)) throw rate_overflow("rates: ceiling exceeds 64 bits");
  return static_cast<std::uint64_t>(q);
}

// ceil(v^2) for the exact dyadic v = mant * 2^e2, as uint64.
inline std::uint64_t ceil_square_u64(dyadic v) {
  while (v.e2 < 0 && (v.mant & 1) == 0) {
    v.mant >>= 1;
    ++v.e2;
  }
  const i128 m2 = checked_mul(v.mant, v.mant);
  i128 r;
  if (v.e2 >= 0) r = checked_shl(m2, 2 * v.e2);
  else r = ceil_shr(m2, -2 * v.e2);
  if (r > static_cast<i128>(UINT64_MAX)) throw rate_overflow("rates: ceiling exceeds 64 bits");
  return static_cast<std::uint64_t>(r < 1 ? 1 : r);
}

}  // namespace detail

// theta(ceil(b^2 (k+1)^2)); the ceiling is exact for every double b.
inline std::uint64_t sigma(double b, const theta_fn& theta, std::uint64_t k) {
  detail::dyadic d = detail::to_dyadic(b);
  d.mant = detail::checked_mul(d.mant, static_cast<detail::i128>(k) + 1);
  return theta(detail::ceil_square_u64(d));
}

inline std::uint64_t sigma(double b, const step_schedule& sched, std::uint64_t k) {
  return sigma(b, [&sched](std::uint64_t K) { return sched.theta(K); }, k);
}

// sigma(b, theta, ceil(2b / phi(1/(k+1)))) + 1.
inline std::uint64_t psi(double b, const theta_fn& theta, const modulus& phi, std::uint64_t k) {
  std::uint64_t inner = 0;
  const double q = phi.kind() == modulus::form::power ? phi.exponent() : 0.0;
  const bool exact_path = phi.kind() == modulus::form::power && q == std::floor(q) && q <= 64.0;
  if (exact_path) {
    // 2b / phi(1/(k+1)) = 2 b (k+1)^q / c, assembled exactly.
    const auto db = detail::to_dyadic(b);
    const auto dc = detail::to_dyadic(phi.coeff());
    detail::i128 num = detail::checked_mul(
        db.mant, detail::checked_pow(static_cast<detail::i128>(k) + 1, static_cast<int>(q)));
    detail::i128 den = dc.mant;
    const int e = db.e2 + 1 - dc.e2;
    if (e >= 0) num = detail::checked_shl(num, e);
    else den = detail::checked_shl(den, -e);
    inner = detail::ceil_div_u64(num, den);
  } else {
    const double t = 1.0 / (static_cast<double>(k) + 1.0);
    const double ph = phi(t);
    if (!(ph > 1e-300))
      throw parameter_range_error("rates: modulus value at 1/(k+1) is below 1e-300");
    // One-sided rounding: inflate by a few ulps so double rounding can only
    // push the ceiling up, never below the exact value.  A larger index is
    // still a valid rate index.
    const long double v = 2.0L * static_cast<long double>(b) / static_cast<long double>(ph) *
                          (1.0L + 1e-15L);
    if (!(v < 1.8e19L)) throw rate_overflow("rates: ceiling exceeds 64 bits");
    inner = static_cast<std::uint64_t>(std::ceil(v));
  }
  const std::uint64_t s = sigma(b, theta, inner);
  if (s == UINT64_MAX) throw rate_overflow("rates: psi exceeds 64 bits");
  return s + 1;
}

inline std::uint64_t psi(double b, const step_schedule& sched, const modulus& phi,
                         std::uint64_t k) {
  return psi(b, [&sched](std::uint64_t K) { return sched.theta(K); }, phi, k);
}

// --- certification -----------------------------------------------------------

struct rate_instance {
  mapping_family family;
  space X = space::euclidean(2);
  point x0;
  point p;  // the fixed point targeted by the rate statement
  double b = 1.0;
  modulus phi = modulus::power(1.0, 2.0);
  std::string id;
  // Sampled precondition controls.
  sample_spec precheck;
  std::vector<std::int64_t> probe_members{0, 1, 5};
};

struct rate_certificate {
  struct rate_row {
    std::uint64_t k = 0, Psi = 0;
    double measured = 0.0, threshold = 0.0;
    bool pass = false;
  };
  struct residual_row {
    std::uint64_t k = 0, Sigma = 0;
    double residual = 0.0, threshold = 0.0;
    bool pass = false;
  };

  enum class verdict_kind { pass, rate_failure, precondition_violation };

  std::string instance_id;
  double b = 0.0;
  nlohmann::ordered_json schedule_desc;
  nlohmann::ordered_json modulus_desc;
  double eps_eval = 0.0;
  std::uint64_t K = 0;
  std::uint64_t n_max = 0;
  verdict_kind verdict = verdict_kind::pass;
  std::vector<std::string> precondition_notes;
  std::vector<check_report> precondition_reports;
  std::vector<rate_row> rate_table;
  std::vector<residual_row> residual_table;
  std::vector<std::int64_t> first_crossing;  // n*(k) measured, -1 if never

  static const char* verdict_name(verdict_kind v) {
    switch (v) {
      case verdict_kind::pass: return "pass";
      case verdict_kind::rate_failure: return "rate-failure";
      case verdict_kind::precondition_violation: return "precondition-violation";
    }
    return "?";
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["instance"] = instance_id;
    j["b"] = b;
    j["schedule"] = schedule_desc;
    j["modulus"] = modulus_desc;
    j["eps_eval"] = eps_eval;
    j["K"] = K;
    j["n_max"] = n_max;
    j["verdict"] = verdict_name(verdict);
    j["precondition_notes"] = precondition_notes;
    auto pre = nlohmann::ordered_json::array();
    for (const auto& r : precondition_reports) pre.push_back(r.to_json());
    j["precondition_reports"] = pre;
    auto rt = nlohmann::ordered_json::array();
    for (const auto& r : rate_table) {
      nlohmann::ordered_json row;
      row["k"] = r.k;
      row["Psi"] = r.Psi;
      row["measured"] = r.measured;
      row["threshold"] = r.threshold;
      row["pass"] = r.pass;
      rt.push_back(row);
    }
    j["rate_table"] = rt;
    auto st = nlohmann::ordered_json::array();
    for (const auto& r : residual_table) {
      nlohmann::ordered_json row;
      row["k"] = r.k;
      row["Sigma"] = r.Sigma;
      row["residual"] = r.residual;
      row["threshold"] = r.threshold;
      row["pass"] = r.pass;
      st.push_back(row);
    }
    j["residual_table"] = st;
    j["first_crossing"] = first_crossing;
    return j;
  }

  std::string to_markdown() const;
};

inline rate_certificate certify_rate(const rate_instance& inst, std::uint64_t K) {
  rate_certificate cert;
  cert.instance_id = inst.id;
  cert.b = inst.b;
  cert.schedule_desc = inst.family.schedule.to_json();
  cert.modulus_desc = inst.phi.to_json();
  cert.K = K;
  if (!(inst.b > 0.0)) throw parameter_range_error("certify_rate: b must be > 0");
  inst.X.check_point(inst.x0);
  inst.X.check_point(inst.p);

  // Precondition 1: the start lies in the certified ball.
  const double d0 = inst.X.dist(inst.x0, inst.p);
  if (d0 > inst.b * (1.0 + 1e-12) + 1e-12) {
    cert.verdict = rate_certificate::verdict_kind::precondition_violation;
    cert.precondition_notes.push_back("d(x0, p) = " + std::to_string(d0) +
                                      " exceeds the declared bound b = " + std::to_string(inst.b));
    return cert;
  }

  // Precondition 2: sampled uniform (P2) with modulus gamma_n * phi on the
  // ball around p, for each probe member.
  const region C{inst.p, inst.b};
  for (std::int64_t n : inst.probe_members) {
    const mapping_handle Tn = inst.family.member(n);
    cert.eps_eval = std::max(cert.eps_eval, Tn.eps_eval);
    const double gn = inst.family.schedule.gamma(n);
    auto res = check_uniform_p2(Tn, inst.X, C, inst.phi.scaled(gn), inst.precheck);
    res.inequality.inequality = "uniform-p2[n=" + std::to_string(n) + "]";
    res.containment.inequality = "uniform-p2-containment[n=" + std::to_string(n) + "]";
    cert.precondition_reports.push_back(res.inequality);
    cert.precondition_reports.push_back(res.containment);
    if (!res.inequality.clean())
      cert.precondition_notes.push_back("member " + std::to_string(n) +
                                        " fails sampled uniform (P2) with the scaled modulus");
    if (!res.containment.clean())
      cert.precondition_notes.push_back("member " + std::to_string(n) +
                                        " does not map the certified ball into itself");
  }
  if (!cert.precondition_notes.empty()) {
    cert.verdict = rate_certificate::verdict_kind::precondition_violation;
    return cert;
  }

  // Tables of indices; the run must reach every Psi(k) and every Sigma(k).
  auto theta = [&inst](std::uint64_t Kv) { return inst.family.schedule.theta(Kv); };
  std::uint64_t n_needed = 0;
  std::vector<std::uint64_t> Psis(K + 1), Sigmas(K + 1);
  for (std::uint64_t k = 0; k <= K; ++k) {
    Psis[k] = psi(inst.b, theta, inst.phi, k);
    Sigmas[k] = sigma(inst.b, theta, k);
    n_needed = std::max({n_needed, Psis[k], Sigmas[k] + 1});
  }
  if (n_needed > static_cast<std::uint64_t>(k_max_iterations))
    throw parameter_range_error("certify_rate: required iterations exceed the 10^7 cap");
  cert.n_max = n_needed;

  run_options opts;
  opts.p = inst.p;
  const iteration_trace tr =
      run_ppa(inst.family, inst.X, inst.x0, static_cast<std::int64_t>(n_needed), opts);
  cert.eps_eval = std::max(cert.eps_eval, tr.eps_eval);

  // Precondition 3: residual monotonicity (C2) along the run.
  {
    auto res = monitor_residual(tr, static_cast<std::int64_t>(K));
    if (!res.monotone.clean()) {
      cert.verdict = rate_certificate::verdict_kind::precondition_violation;
      cert.precondition_notes.push_back("residual sequence is not nonincreasing along the run");
      cert.precondition_reports.push_back(res.monotone);
      return cert;
    }
    cert.precondition_reports.push_back(res.monotone);
  }

  bool all_pass = true;
  for (std::uint64_t k = 0; k <= K; ++k) {
    rate_certificate::rate_row row;
    row.k = k;
    row.Psi = Psis[k];
    row.threshold = 1.0 / (static_cast<double>(k) + 1.0) + 2.0 * cert.eps_eval;
    row.measured = tr.rows[static_cast<std::size_t>(Psis[k])].dist_to_p;
    row.pass = row.measured <= row.threshold;
    all_pass = all_pass && row.pass;
    cert.rate_table.push_back(row);

    rate_certificate::residual_row rrow;
    rrow.k = k;
    rrow.Sigma = Sigmas[k];
    rrow.threshold = 1.0 / (static_cast<double>(k) + 1.0) + 2.0 * cert.eps_eval;
    rrow.residual = tr.rows[static_cast<std::size_t>(Sigmas[k])].residual;
    rrow.pass = rrow.residual <= rrow.threshold;
    all_pass = all_pass && rrow.pass;
    cert.residual_table.push_back(rrow);
  }

  // Measured first crossing of d(x_n, p) <= 1/(k+1); always at or before
  // Psi(k) when the certificate passes.
  cert.first_crossing.assign(K + 1, -1);
  for (std::uint64_t k = 0; k <= K; ++k) {
    const double target = 1.0 / (static_cast<double>(k) + 1.0);
    for (std::size_t n = 0; n < tr.rows.size(); ++n) {
      if (tr.rows[n].dist_to_p <= target) {
        cert.first_crossing[k] = tr.rows[n].n;
        break;
      }
    }
  }

  cert.verdict = all_pass ? rate_certificate::verdict_kind::pass
                          : rate_certificate::verdict_kind::rate_failure;
  return cert;
}

inline std::string rate_certificate::to_markdown() const {
  std::string md;
  md += "# Rate certificate: " + instance_id + "\n\n";
  md += "- verdict: **" + std::string(verdict_name(verdict)) + "**\n";
  md += "- b = " + std::to_string(b) + ", K = " + std::to_string(K) +
        ", eps_eval = " + std::to_string(eps_eval) + "\n";
  md += "- schedule: " + schedule_desc.dump() + "\n";
  md += "- modulus: " + modulus_desc.dump() + "\n";
  md += "- iterations run: " + std::to_string(n_max) + "\n\n";
  if (!precondition_notes.empty()) {
    md += "## Precondition violations\n\n";
    for (const auto& note : precondition_notes) md += "- " + note + "\n";
    md += "\n";
  }
  if (!rate_table.empty()) {
    md += "## Iterate distance vs. rate bound\n\n";
    md += "| k | Psi(k) | d(x_Psi(k), p) | threshold | pass |\n";
    md += "|---|--------|----------------|-----------|------|\n";
    char buf[160];
    for (const auto& r : rate_table) {
      std::snprintf(buf, sizeof buf, "| %llu | %llu | %.6e | %.6e | %s |\n",
                    static_cast<unsigned long long>(r.k),
                    static_cast<unsigned long long>(r.Psi), r.measured, r.threshold,
                    r.pass ? "yes" : "NO");
      md += buf;
    }
    md += "\n## Residual vs. divergence bound\n\n";
    md += "| k | Sigma(k) | residual | threshold | pass |\n";
    md += "|---|----------|----------|-----------|------|\n";
    for (const auto& r : residual_table) {
      std::snprintf(buf, sizeof buf, "| %llu | %llu | %.6e | %.6e | %s |\n",
                    static_cast<unsigned long long>(r.k),
                    static_cast<unsigned long long>(r.Sigma), r.residual, r.threshold,
                    r.pass ? "yes" : "NO");
      md += buf;
    }
    md += "\n## Measured first crossing n*(k)\n\n";
    md += "| k | first n with d(x_n,p) <= 1/(k+1) | Psi(k) |\n";
    md += "|---|-----------------------------------|--------|\n";
    for (std::size_t k = 0; k < first_crossing.size(); ++k) {
      std::snprintf(buf, sizeof buf, "| %zu | %lld | %llu |\n", k,
                    static_cast<long long>(first_crossing[k]),
                    static_cast<unsigned long long>(rate_table[k].Psi));
      md += buf;
    }
  }
  return md;
}

// Near-fixed-point uniqueness probe.  Candidates z are produced by settling
// sampled starts under T; each near-fixed z must satisfy the eps-relaxed
// bound phi(max(d(z,p) - eps_z, 0)) <= eps_z (d(z,p) + eps_z) + tol, where
// eps_z = d(Tz, z) + eps_eval.  A far-from-p candidate with a tiny residual
// would violate it, flagging a second fixed point.
inline check_report unique_fixed_point_check(const mapping_handle& T, const space& X,
                                             const region& C, const modulus& phi,
                                             const point& p, const sample_spec& spec,
                                             int settle_iters = 64) {
  sample_spec local = spec;
  local.reg = C;
  local.validate();
  const double tol = check_tolerance(local, T.eps_eval);
  check_report proto = detail::make_report("unique-fixed-point", tol);
  return run_sampled_check(proto, local.count, local.seed,
                           [&, settle_iters](rng& g, std::int64_t i, check_report& rep) {
    point z = i == 0 ? p : X.sample(C, g);  // candidate 0 is p itself
    if (i != 0)
      for (int it = 0; it < settle_iters; ++it) z = T(z);
    const point tz = T(z);
    const double eps_z = X.dist(tz, z) + T.eps_eval;
    const double dzp = X.dist(z, p);
    const double lhs = phi(std::max(dzp - eps_z, 0.0));
    const double rhs = eps_z * (dzp + eps_z);
    ordered_json wit = detail::witness_points(X, {{"z", &z}});
    wit["near_fixed_eps"] = eps_z;
    wit["dist_to_p"] = dzp;
    rep.record(rhs - lhs, wit);
  });
}

}  // namespace proxlab
