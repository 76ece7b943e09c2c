#pragma once

// Sampled checkers for the mapping properties.
//
// Notation for slacks below: T is a map, x, y sampled points, z = Tx,
// w = Ty, and all checks record RHS - LHS of the inequality at hand.
//
// The joint checks draw the tuple (pair index, x, y) from the sample's
// substream before any check-specific draws, so the same base tuples are
// visited by the firm-nonexpansivity, the (P2) and the (C1) variants for a
// given seed.  That makes the implication chain observable on identical
// inputs.

#include <cstdint>
#include <utility>
#include <vector>

#include "proxlab/mapping.hpp"
#include "proxlab/modulus.hpp"
#include "proxlab/parallel.hpp"
#include "proxlab/report.hpp"
#include "proxlab/sampling.hpp"
#include "proxlab/serialize.hpp"
#include "proxlab/validators.hpp"

namespace proxlab {

// d(Tx,Ty) <= d((1-t)x + tTx, (1-t)y + tTy) for all t in [0,1].
inline check_report check_firmly_nonexpansive(const mapping_handle& T, const space& X,
                                              const sample_spec& spec) {
  spec.validate();
  check_report proto =
      detail::make_report("firmly-nonexpansive", check_tolerance(spec, T.eps_eval));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point tx = T(x), ty = T(y);
    const double dT = X.dist(tx, ty);
    std::vector<double> ts = spec.t_grid;
    ts.push_back(g.uniform01());
    for (double t : ts) {
      const point a = X.combine(x, tx, t);
      const point b = X.combine(y, ty, t);
      ordered_json wit = detail::witness_points(X, {{"x", &x}, {"y", &y}});
      wit["t"] = t;
      rep.record(X.dist(a, b) - dT, wit);
    }
  });
}

// Property (P2): 2 d(Tx,Ty)^2 <= d(x,Ty)^2 + d(y,Tx)^2 - d(x,Tx)^2 - d(y,Ty)^2.
inline check_report check_p2(const mapping_handle& T, const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("p2", check_tolerance(spec, T.eps_eval));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point tx = T(x), ty = T(y);
    const double dT = X.dist(tx, ty);
    const double a = X.dist(x, ty), b = X.dist(y, tx);
    const double rx = X.dist(x, tx), ry = X.dist(y, ty);
    const double slack = a * a + b * b - rx * rx - ry * ry - 2.0 * dT * dT;
    rep.record(slack, detail::witness_points(X, {{"x", &x}, {"y", &y}}));
  });
}

// Uniform variant results carry the inequality report plus a containment
// report for T mapping the checked ball into itself (the uniform notions
// are relative to a bounded set).
struct uniform_check_result {
  check_report inequality;
  check_report containment;
  bool clean() const { return inequality.clean() && containment.clean(); }
};

// Uniformly firmly nonexpansive with modulus phi:
// d(Tx,Ty)^2 <= d((1-t)x+tTx,(1-t)y+tTy)^2 - 2(1-t) phi(d(Tx,Ty)).
inline uniform_check_result check_uniform_fne(const mapping_handle& T, const space& X,
                                              const region& C, const modulus& phi,
                                              const sample_spec& spec) {
  sample_spec local = spec;
  local.reg = C;
  local.validate();
  const double tol = check_tolerance(local, T.eps_eval);
  uniform_check_result out;
  out.containment = detail::make_report("uniform-fne-containment", tol);
  out.inequality = detail::make_report("uniform-fne", tol);

  out.inequality = run_sampled_check(out.inequality, local.count, local.seed,
                                     [&](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(C, g);
    const point y = X.sample(C, g);
    const point tx = T(x), ty = T(y);
    const double dT = X.dist(tx, ty);
    const double ph = phi(dT);
    std::vector<double> ts = local.t_grid;
    ts.push_back(g.uniform01());
    for (double t : ts) {
      const point a = X.combine(x, tx, t);
      const point b = X.combine(y, ty, t);
      const double dab = X.dist(a, b);
      const double slack = dab * dab - 2.0 * (1.0 - t) * ph - dT * dT;
      ordered_json wit = detail::witness_points(X, {{"x", &x}, {"y", &y}});
      wit["t"] = t;
      rep.record(slack, wit);
    }
  });
  out.containment = run_sampled_check(out.containment, local.count, local.seed,
                                      [&](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(C, g);
    const point tx = T(x);
    rep.record(C.radius - X.dist(C.center, tx),
               detail::witness_points(X, {{"x", &x}}));
  });
  return out;
}

// Uniformly (P2) with modulus phi:
// 2 d(Tx,Ty)^2 <= d(x,Ty)^2 + d(y,Tx)^2 - d(x,Tx)^2 - d(y,Ty)^2 - 2 phi(d(Tx,Ty)).
inline uniform_check_result check_uniform_p2(const mapping_handle& T, const space& X,
                                             const region& C, const modulus& phi,
                                             const sample_spec& spec) {
  sample_spec local = spec;
  local.reg = C;
  local.validate();
  const double tol = check_tolerance(local, T.eps_eval);
  uniform_check_result out;
  out.containment = detail::make_report("uniform-p2-containment", tol);
  out.inequality = detail::make_report("uniform-p2", tol);

  out.inequality = run_sampled_check(out.inequality, local.count, local.seed,
                                     [&](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(C, g);
    const point y = X.sample(C, g);
    const point tx = T(x), ty = T(y);
    const double dT = X.dist(tx, ty);
    const double a = X.dist(x, ty), b = X.dist(y, tx);
    const double rx = X.dist(x, tx), ry = X.dist(y, ty);
    const double slack =
        a * a + b * b - rx * rx - ry * ry - 2.0 * dT * dT - 2.0 * phi(dT);
    rep.record(slack, detail::witness_points(X, {{"x", &x}, {"y", &y}}));
  });
  out.containment = run_sampled_check(out.containment, local.count, local.seed,
                                      [&](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(C, g);
    const point tx = T(x);
    rep.record(C.radius - X.dist(C.center, tx),
               detail::witness_points(X, {{"x", &x}}));
  });
  return out;
}

namespace detail {

struct joint_sample {
  std::int64_t n, m;
  point x, y;
};

// Shared head of every joint check: pair selection, then x, then y.
inline joint_sample draw_joint(const space& X, const sample_spec& spec,
                               const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                               rng& g) {
  const auto pick = pairs[static_cast<std::size_t>(g.uniform_index(pairs.size()))];
  joint_sample s;
  s.n = pick.first;
  s.m = pick.second;
  s.x = X.sample(spec.reg, g);
  s.y = X.sample(spec.reg, g);
  return s;
}

inline double max_eps(const mapping_family& F,
                      const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs) {
  double e = 0.0;
  for (const auto& [n, m] : pairs) {
    e = std::max(e, F.member(n).eps_eval);
    e = std::max(e, F.member(m).eps_eval);
  }
  return e;
}

}  // namespace detail

// Jointly firmly nonexpansive: whenever (1-alpha) gamma_n = (1-beta) gamma_m
// with alpha, beta in [0,1],
//   d(T_n x, T_m y) <= d((1-alpha)x + alpha T_n x, (1-beta)y + beta T_m y).
// For each sampled tuple the constraint is swept by drawing alpha from its
// feasible interval (1 - min(gamma_m/gamma_n, 1), 1], always including the
// endpoint alpha = 1 and a near-boundary value.
inline check_report check_jointly_fne(const mapping_family& F, const space& X,
                                      const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                                      const sample_spec& spec) {
  spec.validate();
  if (pairs.empty()) throw parameter_range_error("check_jointly_fne: empty index-pair list");
  check_report proto =
      detail::make_report("jointly-fne", check_tolerance(spec, detail::max_eps(F, pairs)));
  const std::size_t n_uniform = std::max<std::size_t>(spec.t_grid.size(), 1);
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&, n_uniform](rng& g, std::int64_t, check_report& rep) {
    const auto s = detail::draw_joint(X, spec, pairs, g);
    const mapping_handle Tn = F.member(s.n);
    const mapping_handle Tm = F.member(s.m);
    const double gn = F.schedule.gamma(s.n), gm = F.schedule.gamma(s.m);
    const point tx = Tn(s.x), ty = Tm(s.y);
    const double dT = X.dist(tx, ty);
    const double alpha_lo = 1.0 - std::min(gm / gn, 1.0);
    std::vector<double> alphas{1.0, alpha_lo + 1e-3 * (1.0 - alpha_lo)};
    for (std::size_t j = 0; j < n_uniform; ++j)
      alphas.push_back(g.uniform(alpha_lo + 1e-9 * (1.0 - alpha_lo), 1.0));
    for (double alpha : alphas) {
      const double beta = 1.0 - (1.0 - alpha) * gn / gm;
      const point a = X.combine(s.x, tx, alpha);
      const point b = X.combine(s.y, ty, beta);
      ordered_json wit = detail::witness_points(X, {{"x", &s.x}, {"y", &s.y}});
      wit["n"] = s.n;
      wit["m"] = s.m;
      wit["alpha"] = alpha;
      wit["beta"] = beta;
      rep.record(X.dist(a, b) - dT, wit);
    }
  });
}

// Jointly (P2) and the agreement between its metric and quasi-linearization
// forms.  With z = T_n x, w = T_m y the metric form reads
//   (1/gamma_m)(d(z,w)^2 + d(y,w)^2 - d(y,z)^2)
//     <= (1/gamma_n)(d(x,w)^2 - d(x,z)^2 - d(z,w)^2)
// and the quasi-linearization form reads
//   (1/gamma_m) <zw, yw> <= (1/gamma_n) <zw, xz>.
// The two slacks agree up to the exact factor 2; the agreement report
// records -(|metric_slack - 2 * quasilin_slack|) against a 1e-9 floor.
struct jointly_p2_result {
  check_report p2;
  check_report agreement;
  bool clean() const { return p2.clean() && agreement.clean(); }
};

inline jointly_p2_result check_jointly_p2(const mapping_family& F, const space& X,
                                          const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                                          const sample_spec& spec) {
  spec.validate();
  if (pairs.empty()) throw parameter_range_error("check_jointly_p2: empty index-pair list");
  const double eps = detail::max_eps(F, pairs);
  jointly_p2_result out;
  out.p2 = detail::make_report("jointly-p2", check_tolerance(spec, eps));
  out.agreement = detail::make_report("jointly-p2-form-agreement", 1e-9);

  out.p2 = run_sampled_check(out.p2, spec.count, spec.seed,
                             [&](rng& g, std::int64_t, check_report& rep) {
    const auto s = detail::draw_joint(X, spec, pairs, g);
    const mapping_handle Tn = F.member(s.n);
    const mapping_handle Tm = F.member(s.m);
    const double gn = F.schedule.gamma(s.n), gm = F.schedule.gamma(s.m);
    const point z = Tn(s.x), w = Tm(s.y);
    const double dzw = X.dist(z, w);
    const double dyw = X.dist(s.y, w), dyz = X.dist(s.y, z);
    const double dxw = X.dist(s.x, w), dxz = X.dist(s.x, z);
    const double slack = (dxw * dxw - dxz * dxz - dzw * dzw) / gn -
                         (dzw * dzw + dyw * dyw - dyz * dyz) / gm;
    ordered_json wit = detail::witness_points(X, {{"x", &s.x}, {"y", &s.y}});
    wit["n"] = s.n;
    wit["m"] = s.m;
    rep.record(slack, wit);
  });
  out.agreement = run_sampled_check(out.agreement, spec.count, spec.seed,
                                    [&](rng& g, std::int64_t, check_report& rep) {
    const auto s = detail::draw_joint(X, spec, pairs, g);
    const mapping_handle Tn = F.member(s.n);
    const mapping_handle Tm = F.member(s.m);
    const double gn = F.schedule.gamma(s.n), gm = F.schedule.gamma(s.m);
    const point z = Tn(s.x), w = Tm(s.y);
    const double dzw = X.dist(z, w);
    const double dyw = X.dist(s.y, w), dyz = X.dist(s.y, z);
    const double dxw = X.dist(s.x, w), dxz = X.dist(s.x, z);
    const double metric_slack = (dxw * dxw - dxz * dxz - dzw * dzw) / gn -
                                (dzw * dzw + dyw * dyw - dyz * dyz) / gm;
    const double ql_slack =
        X.quasilin(z, w, s.x, z) / gn - X.quasilin(z, w, s.y, w) / gm;
    ordered_json wit = detail::witness_points(X, {{"x", &s.x}, {"y", &s.y}});
    wit["n"] = s.n;
    wit["m"] = s.m;
    rep.record(-std::fabs(metric_slack - 2.0 * ql_slack), wit);
  });
  return out;
}

// Consequence (C1): d(T_n w, T_m w) <= (|gamma_n - gamma_m| / gamma_n) d(w, T_n w).
inline check_report check_c1(const mapping_family& F, const space& X,
                             const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                             const sample_spec& spec) {
  spec.validate();
  if (pairs.empty()) throw parameter_range_error("check_c1: empty index-pair list");
  check_report proto =
      detail::make_report("c1", check_tolerance(spec, detail::max_eps(F, pairs)));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&](rng& g, std::int64_t, check_report& rep) {
    const auto s = detail::draw_joint(X, spec, pairs, g);
    const mapping_handle Tn = F.member(s.n);
    const mapping_handle Tm = F.member(s.m);
    const double gn = F.schedule.gamma(s.n), gm = F.schedule.gamma(s.m);
    const point z = Tn(s.x), w = Tm(s.x);  // same argument for both members
    const double slack =
        (std::fabs(gn - gm) / gn) * X.dist(s.x, z) - X.dist(z, w);
    ordered_json wit = detail::witness_points(X, {{"x", &s.x}});
    wit["n"] = s.n;
    wit["m"] = s.m;
    rep.record(slack, wit);
  });
}

}  // namespace proxlab
