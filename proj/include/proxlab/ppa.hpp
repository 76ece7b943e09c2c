#pragma once

// The abstract proximal point iteration x_{n+1} = T_n x_n and its
// trajectory monitors.
//
// Trace layout: rows n = 0..n_max.  Row n < n_max describes step n:
// gamma_n, d(x_n, x_{n+1}), the residual d(x_n, x_{n+1})/gamma_n,
// d(x_n, p) when a fixed point p is declared, and the running sum
// cum_sq = sum_{k<n} d(x_k, x_{k+1})^2.  The final row carries the
// terminal point's dist_to_p and total cum_sq; its step fields are NaN.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "proxlab/mapping.hpp"
#include "proxlab/report.hpp"
#include "proxlab/sampling.hpp"
#include "proxlab/serialize.hpp"

namespace proxlab {

inline constexpr std::int64_t k_max_iterations = 10000000;  // engine hard cap

struct trace_row {
  std::int64_t n = 0;
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double step_dist = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::quiet_NaN();
  double dist_to_p = std::numeric_limits<double>::quiet_NaN();
  double cum_sq = 0.0;
};

struct iteration_trace {
  std::vector<trace_row> rows;  // length n_max + 1
  // Retained iterates as (n, x_n); always includes n = 0 and n = n_max.
  // All iterates are kept up to the retention threshold, then a log-spaced
  // subset.
  std::vector<std::pair<std::int64_t, point>> points;
  std::optional<point> p;
  double eps_eval = 0.0;  // max member eps over the run
  std::int64_t n_max = 0;
  point x_final;

  const point* point_at(std::int64_t n) const {
    for (const auto& [idx, pt] : points)
      if (idx == n) return &pt;
    return nullptr;
  }
};

struct run_options {
  std::int64_t retain_all_up_to = 10000;
  std::optional<point> p;  // overrides the family's declared fixed point
};

inline iteration_trace run_ppa(const mapping_family& F, const space& X, const point& x0,
                               std::int64_t n_max, const run_options& opts = {}) {
  if (n_max < 0 || n_max > k_max_iterations)
    throw parameter_range_error("run_ppa: n_max must lie in [0, 10^7]");
  X.check_point(x0);
  iteration_trace tr;
  tr.n_max = n_max;
  tr.p = opts.p ? opts.p : F.fixed_point;
  if (tr.p) X.check_point(*tr.p);
  tr.rows.reserve(static_cast<std::size_t>(n_max) + 1);
  tr.points.emplace_back(0, x0);

  // Log-spaced retention once the full prefix is exceeded.
  std::int64_t next_kept = opts.retain_all_up_to;

  point x = x0;
  double cum_sq = 0.0;
  for (std::int64_t n = 0; n < n_max; ++n) {
    mapping_handle Tn = F.member(n);
    tr.eps_eval = std::max(tr.eps_eval, Tn.eps_eval);
    point x_next;
    try {
      x_next = Tn(x);
    } catch (const budget_exhausted& e) {
      throw budget_exhausted(std::string(e.what()) + " at iteration n = " + std::to_string(n));
    }
    const double gamma = F.schedule.gamma(n);
    const double step = X.dist(x, x_next);
    trace_row row;
    row.n = n;
    row.gamma = gamma;
    row.step_dist = step;
    row.residual = step / gamma;
    row.dist_to_p = tr.p ? X.dist(x, *tr.p) : std::numeric_limits<double>::quiet_NaN();
    row.cum_sq = cum_sq;
    tr.rows.push_back(row);
    cum_sq += step * step;
    x = std::move(x_next);
    const std::int64_t idx = n + 1;
    if (idx <= opts.retain_all_up_to || idx == n_max || idx >= next_kept) {
      tr.points.emplace_back(idx, x);
      if (idx >= next_kept)
        next_kept = std::max(next_kept + 1, static_cast<std::int64_t>(
                                                static_cast<double>(next_kept) * 1.1));
    }
  }
  trace_row last;
  last.n = n_max;
  last.gamma = n_max > 0 ? tr.rows.back().gamma : std::numeric_limits<double>::quiet_NaN();
  last.dist_to_p = tr.p ? X.dist(x, *tr.p) : std::numeric_limits<double>::quiet_NaN();
  last.cum_sq = cum_sq;
  tr.rows.push_back(last);
  tr.x_final = x;
  if (tr.points.back().first != n_max) tr.points.emplace_back(n_max, x);
  return tr;
}

// Monitor tolerance: fixed floor plus first-order evaluator error at scale b,
// where b is d(x0, p) when a fixed point is declared.
inline double monitor_tolerance(const iteration_trace& tr, double scale) {
  return 1e-8 + 4.0 * tr.eps_eval * scale;
}

// Fejer monotonicity of d(x_n, p), the per-step descent estimate
// d(x_{n+1},p)^2 <= d(x_n,p)^2 - d(x_n,x_{n+1})^2, and the cumulative bound
// sum_k d(x_k,x_{k+1})^2 <= d(x_0,p)^2.
struct fejer_reports {
  check_report monotone;
  check_report descent;
  check_report cumulative;
  bool clean() const { return monotone.clean() && descent.clean() && cumulative.clean(); }
};

inline fejer_reports monitor_fejer(const iteration_trace& tr) {
  if (!tr.p) throw parameter_range_error("monitor_fejer: trace has no fixed point");
  const double b = tr.rows.front().dist_to_p;
  const double tol = monitor_tolerance(tr, b);
  fejer_reports out;
  out.monotone = detail::make_report("fejer-monotonicity", tol);
  out.descent = detail::make_report("fejer-descent", tol);
  out.cumulative = detail::make_report("fejer-cumulative", tol);
  for (std::size_t n = 0; n + 1 < tr.rows.size(); ++n) {
    const double dn = tr.rows[n].dist_to_p;
    const double dn1 = tr.rows[n + 1].dist_to_p;
    const double step = tr.rows[n].step_dist;
    ordered_json wit;
    wit["n"] = tr.rows[n].n;
    out.monotone.record(dn - dn1, wit);
    out.descent.record(dn * dn - step * step - dn1 * dn1, wit);
    out.cumulative.record(b * b - tr.rows[n + 1].cum_sq, wit);
  }
  return out;
}

// Residual monotonicity d(x_n,x_{n+1})/gamma_n nonincreasing, plus the first
// crossing table: for each k <= K, the first n with residual <= 1/(k+1).
struct residual_report {
  check_report monotone;
  std::vector<std::int64_t> first_crossing;  // index k -> n, or -1 if never
};

inline residual_report monitor_residual(const iteration_trace& tr, std::int64_t K = 0) {
  residual_report out;
  // The residual divides by gamma_n, so the evaluator-error term scales by
  // the smallest step size on the trace.
  double gamma_min = HUGE_VAL;
  for (std::size_t n = 0; n + 1 < tr.rows.size(); ++n)
    gamma_min = std::min(gamma_min, tr.rows[n].gamma);
  const double scale = tr.p ? tr.rows.front().dist_to_p : 1.0;
  const double tol = 1e-8 + 4.0 * tr.eps_eval * scale / std::min(gamma_min, 1.0);
  out.monotone = detail::make_report("residual-monotonicity", tol);
  for (std::size_t n = 0; n + 2 < tr.rows.size(); ++n) {
    ordered_json wit;
    wit["n"] = tr.rows[n].n;
    out.monotone.record(tr.rows[n].residual - tr.rows[n + 1].residual, wit);
  }
  out.first_crossing.assign(static_cast<std::size_t>(K) + 1, -1);
  for (std::int64_t k = 0; k <= K; ++k) {
    const double target = 1.0 / (static_cast<double>(k) + 1.0);
    for (std::size_t n = 0; n + 1 < tr.rows.size(); ++n) {
      if (tr.rows[n].residual <= target) {
        out.first_crossing[static_cast<std::size_t>(k)] = tr.rows[n].n;
        break;
      }
    }
  }
  return out;
}

// Asymptotic regularity against later family members:
// d(x_n, T_m x_n) <= 2 d(x_n, x_{n+1}) + gamma_m * residual_n, checked at
// the retained iterates for each probe index m.
inline check_report monitor_asymptotic_regularity(const mapping_family& F, const space& X,
                                                  const iteration_trace& tr,
                                                  const std::vector<std::int64_t>& probes) {
  double scale = 1.0;
  if (tr.p) scale = tr.rows.front().dist_to_p;
  check_report rep = detail::make_report("asymptotic-regularity", monitor_tolerance(tr, scale));
  for (std::int64_t m : probes) {
    mapping_handle Tm = F.member(m);
    const double gm = F.schedule.gamma(m);
    for (const auto& [n, xn] : tr.points) {
      if (n >= tr.n_max) continue;
      const double resid = tr.rows[static_cast<std::size_t>(n)].residual;
      const double step = tr.rows[static_cast<std::size_t>(n)].step_dist;
      const double lhs = X.dist(xn, Tm(xn));
      ordered_json wit;
      wit["n"] = n;
      wit["m"] = m;
      rep.record(2.0 * step + gm * resid - lhs, wit);
    }
  }
  return rep;
}

}  // namespace proxlab
