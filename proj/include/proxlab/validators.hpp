#pragma once

// Sampled validators for the geometry backends: metric axioms, geodesic
// parameterization, the CAT(0) comparison inequality, Busemann convexity,
// the quasi-linearization axioms, Cauchy-Schwarz and the four-point
// condition.  Every check draws its inputs from sample_spec and reports
// signed slacks; see report.hpp for the slack/violation convention.

#include <vector>

#include "proxlab/parallel.hpp"
#include "proxlab/report.hpp"
#include "proxlab/sampling.hpp"
#include "proxlab/serialize.hpp"

namespace proxlab {

namespace detail {

inline ordered_json witness_points(const space& X,
                                   std::initializer_list<std::pair<const char*, const point*>> pts) {
  ordered_json w;
  for (const auto& [name, p] : pts) w[name] = point_to_json(X, *p);
  return w;
}

}  // namespace detail

// d(x,y) = d(y,x), d(x,x) = 0, d >= 0, triangle inequality.
inline check_report validate_metric(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("metric-axioms", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point z = X.sample(spec.reg, g);
    const double dxy = X.dist(x, y), dyx = X.dist(y, x);
    const double dxz = X.dist(x, z), dzy = X.dist(z, y);
    auto wit = detail::witness_points(X, {{"x", &x}, {"y", &y}, {"z", &z}});
    rep.record(-std::fabs(dxy - dyx), wit);
    rep.record(dxy, wit);
    rep.record(-std::fabs(X.dist(x, x)), wit);
    rep.record(dxz + dzy - dxy, wit);  // triangle slack
  });
}

// d(x, combine(x,y,t)) = t d(x,y) and d(combine, y) = (1-t) d(x,y).
inline check_report validate_geodesic(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("geodesic-parameterization", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const double d = X.dist(x, y);
    std::vector<double> ts = spec.t_grid;
    ts.push_back(g.uniform01());
    for (double t : ts) {
      const point m = X.combine(x, y, t);
      ordered_json wit = detail::witness_points(X, {{"x", &x}, {"y", &y}});
      wit["t"] = t;
      rep.record(-std::fabs(X.dist(x, m) - t * d), wit);
      rep.record(-std::fabs(X.dist(m, y) - (1.0 - t) * d), wit);
    }
  });
}

// Comparison inequality:
// d(z,(1-t)x+ty)^2 <= (1-t)d(z,x)^2 + t d(z,y)^2 - t(1-t)d(x,y)^2.
inline check_report validate_cat0(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("cat0-comparison", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point z = X.sample(spec.reg, g);
    const double dzx = X.dist(z, x), dzy = X.dist(z, y), dxy = X.dist(x, y);
    std::vector<double> ts = spec.t_grid;
    ts.push_back(g.uniform01());
    for (double t : ts) {
      const point m = X.combine(x, y, t);
      const double dzm = X.dist(z, m);
      const double slack = (1.0 - t) * dzx * dzx + t * dzy * dzy -
                           t * (1.0 - t) * dxy * dxy - dzm * dzm;
      ordered_json wit = detail::witness_points(X, {{"x", &x}, {"y", &y}, {"z", &z}});
      wit["t"] = t;
      rep.record(slack, wit);
    }
  });
}

// Convexity of the metric along pairs of geodesics:
// d((1-t)x+ty, (1-t)u+tv) <= (1-t) d(x,u) + t d(y,v).
inline check_report validate_busemann(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("busemann-convexity", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point u = X.sample(spec.reg, g);
    const point v = X.sample(spec.reg, g);
    const double dxu = X.dist(x, u), dyv = X.dist(y, v);
    std::vector<double> ts = spec.t_grid;
    ts.push_back(g.uniform01());
    for (double t : ts) {
      const point a = X.combine(x, y, t);
      const point b = X.combine(u, v, t);
      const double slack = (1.0 - t) * dxu + t * dyv - X.dist(a, b);
      ordered_json wit = detail::witness_points(X, {{"x", &x}, {"y", &y}, {"u", &u}, {"v", &v}});
      wit["t"] = t;
      rep.record(slack, wit);
    }
  });
}

// Quasi-linearization axioms, exact identities of the defining formula:
//   (i)   <xy,xy> = d(x,y)^2
//   (ii)  <xy,uv> = <uv,xy>
//   (iii) <yx,uv> = -<xy,uv>
//   (iv)  <xy,uv> + <xy,vw> = <xy,uw>
inline check_report validate_quasilin_axioms(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("quasilinearization-axioms", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point u = X.sample(spec.reg, g);
    const point v = X.sample(spec.reg, g);
    const point w = X.sample(spec.reg, g);
    const double dxy = X.dist(x, y);
    const double q = X.quasilin(x, y, u, v);
    auto wit = detail::witness_points(X, {{"x", &x}, {"y", &y}, {"u", &u}, {"v", &v}, {"w", &w}});
    rep.record(-std::fabs(X.quasilin(x, y, x, y) - dxy * dxy), wit);
    rep.record(-std::fabs(q - X.quasilin(u, v, x, y)), wit);
    rep.record(-std::fabs(X.quasilin(y, x, u, v) + q), wit);
    rep.record(-std::fabs(q + X.quasilin(x, y, v, w) - X.quasilin(x, y, u, w)), wit);
  });
}

// Cauchy-Schwarz for the quasi-linearization: <xy,uv> <= d(x,y) d(u,v).
inline check_report validate_cauchy_schwarz(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("cauchy-schwarz", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point u = X.sample(spec.reg, g);
    const point v = X.sample(spec.reg, g);
    const double slack = X.dist(x, y) * X.dist(u, v) - X.quasilin(x, y, u, v);
    rep.record(slack, detail::witness_points(X, {{"x", &x}, {"y", &y}, {"u", &u}, {"v", &v}}));
  });
}

// Four-point condition, equivalent to Cauchy-Schwarz above:
// d(x,v)^2 + d(y,u)^2 <= d(x,u)^2 + d(y,v)^2 + d(x,y)^2 + d(u,v)^2.
inline check_report validate_four_point(const space& X, const sample_spec& spec) {
  spec.validate();
  check_report proto = detail::make_report("four-point", check_tolerance(spec));
  return run_sampled_check(proto, spec.count, spec.seed,
                           [&X, &spec](rng& g, std::int64_t, check_report& rep) {
    const point x = X.sample(spec.reg, g);
    const point y = X.sample(spec.reg, g);
    const point u = X.sample(spec.reg, g);
    const point v = X.sample(spec.reg, g);
    const double dxv = X.dist(x, v), dyu = X.dist(y, u);
    const double dxu = X.dist(x, u), dyv = X.dist(y, v);
    const double dxy = X.dist(x, y), duv = X.dist(u, v);
    const double slack = dxu * dxu + dyv * dyv + dxy * dxy + duv * duv -
                         dxv * dxv - dyu * dyu;
    rep.record(slack, detail::witness_points(X, {{"x", &x}, {"y", &y}, {"u", &u}, {"v", &v}}));
  });
}

// Full geometry suite in a fixed order.
inline std::vector<check_report> validate_space(const space& X, const sample_spec& spec) {
  return {validate_metric(X, spec),       validate_geodesic(X, spec),
          validate_cat0(X, spec),         validate_busemann(X, spec),
          validate_quasilin_axioms(X, spec), validate_cauchy_schwarz(X, spec),
          validate_four_point(X, spec)};
}

}  // namespace proxlab
