#pragma once

// Resolvent constructors.  Each returns a mapping_handle whose eps_eval
// states how far the returned point can be from the exact resolvent:
// 0 for closed forms, the configured target for iterative solvers.  The
// iterative solvers only stop on a certified bound, never on heuristics,
// and throw budget_exhausted when the iteration cap is hit first.
//
//   moreau_yosida(f, gamma):      J(x) = argmin_y f(y) + d(x,y)^2 / (2 gamma)
//   nonexpansive_resolvent(T):    J(x) = the fixed point of
//                                   y -> (1/(1+gamma)) x + (gamma/(1+gamma)) T y
//   monotone_resolvent(A):        J(x) = (id + gamma A)^{-1} x    (euclidean)

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "proxlab/linalg.hpp"
#include "proxlab/mapping.hpp"
#include "proxlab/problems.hpp"

namespace proxlab {

struct subproblem_config {
  double eps = 1e-8;             // certified accuracy target for iterative solves
  std::int64_t max_iter = 200000;
  enum class method { auto_select, closed_form, gradient_descent, contraction, linear_solve };
  method solver = method::auto_select;

  static subproblem_config from_json(const nlohmann::json& j) {
    subproblem_config c;
    c.eps = j.value("eps", 1e-8);
    c.max_iter = j.value("max_iter", static_cast<std::int64_t>(200000));
    const std::string m = j.value("method", std::string("auto"));
    if (m == "auto") c.solver = method::auto_select;
    else if (m == "closed_form") c.solver = method::closed_form;
    else if (m == "gradient_descent") c.solver = method::gradient_descent;
    else if (m == "contraction") c.solver = method::contraction;
    else if (m == "linear_solve") c.solver = method::linear_solve;
    else throw config_error("subproblem: unknown method \"" + m + "\"");
    if (!(c.eps > 0.0)) throw parameter_range_error("subproblem: eps must be > 0");
    if (c.max_iter < 1) throw parameter_range_error("subproblem: max_iter must be >= 1");
    return c;
  }
};

namespace detail {

// --- hyperboloid tangent-space helpers ------------------------------------

// log_y(a): tangent vector at y pointing to a with |v| = d(y,a).
inline std::vector<double> hyper_log(const space& X, const point& y, const point& a) {
  const double d = X.dist(y, a);
  std::vector<double> v(y.coords.size(), 0.0);
  if (d < 1e-14) return v;
  const double ch = std::cosh(d), sh = std::sinh(d);
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = d * (a.coords[i] - ch * y.coords[i]) / sh;
  return v;
}

inline point hyper_exp(const point& y, const std::vector<double>& v) {
  const double n2 = minkowski(v, v);
  const double n = std::sqrt(std::max(0.0, n2));
  point out = y;
  if (n < 1e-300) return out;
  const double ch = std::cosh(n), sh = std::sinh(n);
  for (std::size_t i = 0; i < out.coords.size(); ++i)
    out.coords[i] = ch * y.coords[i] + sh * v[i] / n;
  double s = 0.0;
  for (std::size_t i = 1; i < out.coords.size(); ++i) s += out.coords[i] * out.coords[i];
  out.coords[0] = std::sqrt(1.0 + s);
  return out;
}

// Minimizes g(y) = 1/2 sum_i w_i d(y, a_i)^2 on the hyperboloid by
// Riemannian gradient descent.  g is mu-strongly convex with
// mu = sum_i w_i (curvature <= 0 only helps), so |grad g(y)| <= mu * eps
// certifies d(y, argmin) <= eps.  Step size 1/L with the comparison bound
// L = sum_i w_i (1 + d(y, a_i)).
inline point hyper_weighted_mean(const space& X, const std::vector<double>& w,
                                 const std::vector<point>& a, double eps,
                                 std::int64_t max_iter) {
  double mu = 0.0;
  for (double wi : w) mu += wi;
  point y = a[0];
  for (std::int64_t it = 0; it < max_iter; ++it) {
    std::vector<double> grad(y.coords.size(), 0.0);
    double L = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto v = hyper_log(X, y, a[i]);
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] -= w[i] * v[j];
      L += w[i] * (1.0 + X.dist(y, a[i]));
    }
    const double gn = std::sqrt(std::max(0.0, minkowski(grad, grad)));
    if (gn <= mu * eps) return y;
    std::vector<double> step(grad.size());
    for (std::size_t j = 0; j < step.size(); ++j) step[j] = -grad[j] / L;
    y = hyper_exp(y, step);
  }
  throw budget_exhausted("hyperboloid weighted mean: gradient iteration budget exhausted");
}

// --- spider weighted mean ---------------------------------------------------

// Exact minimizer of 1/2 sum_i w_i d(y, a_i)^2 on a spider.  Restricted to
// ray r the objective is the quadratic
//   1/2 ( W s^2 - 2 B_r s + C ),  B_r = 2 * sum_{a_i on r} w_i o_i - S,
// with W = sum w_i, S = sum w_i o_i, so the best ray maximizes B_r and the
// offset is max(B_r, 0)/W.  Ties resolve to the smallest ray index.
inline point spider_weighted_mean(const space& X, const std::vector<double>& w,
                                  const std::vector<point>& a) {
  const int rays = X.dim();
  double W = 0.0, S = 0.0;
  std::vector<double> onray(static_cast<std::size_t>(rays), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    W += w[i];
    const double o = a[i].coords[0];
    S += w[i] * o;
    if (o > 0.0) onray[static_cast<std::size_t>(a[i].ray)] += w[i] * o;
  }
  int best_ray = 0;
  double best_B = -HUGE_VAL;
  for (int r = 0; r < rays; ++r) {
    const double B = 2.0 * onray[static_cast<std::size_t>(r)] - S;
    if (B > best_B) {
      best_B = B;
      best_ray = r;
    }
  }
  const double s = std::max(best_B, 0.0) / W;
  if (s <= 0.0) return X.origin();
  return point{{s}, best_ray};
}

}  // namespace detail

// Minimizer of f when it is well defined; used to attach fixed points to
// resolvent families (Fix(J_gamma f) = argmin f).
inline std::optional<point> problem_minimizer(const convex_problem& f, const space& X,
                                              const subproblem_config& cfg) {
  switch (f.k) {
    case convex_problem::kind::squared_distance_sum: {
      if (f.anchors.size() == 1) return f.anchors[0];
      switch (X.kind()) {
        case backend_kind::euclidean: {
          const std::size_t n = f.anchors[0].coords.size();
          std::vector<double> y(n, 0.0);
          double W = 0.0;
          for (std::size_t i = 0; i < f.anchors.size(); ++i) {
            W += f.weights[i];
            for (std::size_t j = 0; j < n; ++j) y[j] += f.weights[i] * f.anchors[i].coords[j];
          }
          for (auto& v : y) v /= W;
          return point{y, 0};
        }
        case backend_kind::spider:
          return detail::spider_weighted_mean(X, f.weights, f.anchors);
        case backend_kind::hyperboloid:
          return detail::hyper_weighted_mean(X, f.weights, f.anchors,
                                             std::min(cfg.eps, 1e-12), cfg.max_iter);
        default:
          return std::nullopt;
      }
    }
    case convex_problem::kind::distance_to_point:
      return f.anchors[0];
    case convex_problem::kind::quadratic: {
      try {
        auto c = f.lin;
        for (auto& v : c) v = -v;
        return point{linalg::solve(f.Q, c), 0};
      } catch (const parameter_range_error&) {
        return std::nullopt;  // singular Q: minimizer not unique / absent
      }
    }
    case convex_problem::kind::l1:
      return X.origin();
    case convex_problem::kind::ball_indicator:
      return f.anchors[0];
  }
  return std::nullopt;
}

inline mapping_handle moreau_yosida(const convex_problem& f, double gamma, const space& X,
                                    const subproblem_config& cfg = {}) {
  if (!(gamma > 0.0)) throw parameter_range_error("moreau_yosida: gamma must be > 0");
  f.validate(X);
  mapping_handle h;
  h.gamma = gamma;
  h.name = "moreau-yosida";
  h.eps_eval = 0.0;
  const auto fp = problem_minimizer(f, X, cfg);
  if (fp) h.fixed_point = *fp;

  switch (f.k) {
    case convex_problem::kind::squared_distance_sum: {
      if (f.anchors.size() == 1) {
        // One anchor: the minimizer lies on [x, a] at t = gamma w / (1 + gamma w).
        const point a = f.anchors[0];
        const double t = gamma * f.weights[0] / (1.0 + gamma * f.weights[0]);
        h.eval = [X, a, t](const point& x) { return X.combine(x, a, t); };
        return h;
      }
      if (X.kind() == backend_kind::euclidean) {
        auto w = f.weights;
        auto anchors = f.anchors;
        h.eval = [w, anchors, gamma](const point& x) {
          const std::size_t n = x.coords.size();
          double W = 1.0 / gamma;
          point y{std::vector<double>(n, 0.0), 0};
          for (std::size_t j = 0; j < n; ++j) y.coords[j] = x.coords[j] / gamma;
          for (std::size_t i = 0; i < anchors.size(); ++i) {
            W += w[i];
            for (std::size_t j = 0; j < n; ++j)
              y.coords[j] += w[i] * anchors[i].coords[j];
          }
          for (auto& v : y.coords) v /= W;
          return y;
        };
        return h;
      }
      if (X.kind() == backend_kind::spider) {
        // Exact: append x as an extra anchor with weight 1/gamma.
        auto w = f.weights;
        auto anchors = f.anchors;
        h.eval = [X, w, anchors, gamma](const point& x) {
          auto w2 = w;
          auto a2 = anchors;
          w2.push_back(1.0 / gamma);
          a2.push_back(x);
          return detail::spider_weighted_mean(X, w2, a2);
        };
        return h;
      }
      if (X.kind() == backend_kind::hyperboloid) {
        auto w = f.weights;
        auto anchors = f.anchors;
        h.eps_eval = cfg.eps;
        h.eval = [X, w, anchors, gamma, cfg](const point& x) {
          auto w2 = w;
          auto a2 = anchors;
          w2.push_back(1.0 / gamma);
          a2.push_back(x);
          return detail::hyper_weighted_mean(X, w2, a2, cfg.eps, cfg.max_iter);
        };
        return h;
      }
      throw backend_mismatch("moreau_yosida: unsupported backend for squared_distance_sum");
    }
    case convex_problem::kind::distance_to_point: {
      // Walk distance min(gamma, d(x,a)) from x toward a.
      const point a = f.anchors[0];
      h.eval = [X, a, gamma](const point& x) {
        const double d = X.dist(x, a);
        if (d <= gamma) return a;
        return X.combine(x, a, gamma / d);
      };
      return h;
    }
    case convex_problem::kind::quadratic: {
      // argmin 1/2 y'Qy + c'y + |x-y|^2/(2 gamma)  solves  (I + gamma Q) y = x - gamma c.
      const auto n = static_cast<std::size_t>(X.dim());
      std::vector<double> A(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          A[i * n + j] = (i == j ? 1.0 : 0.0) + gamma * f.Q[i * n + j];
      auto lin = f.lin;
      h.eval = [A, lin, gamma](const point& x) {
        std::vector<double> b(x.coords.size());
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = x.coords[i] - gamma * lin[i];
        return point{linalg::solve(A, b), 0};
      };
      return h;
    }
    case convex_problem::kind::l1: {
      const double thr = gamma * f.lambda;
      h.eval = [thr](const point& x) {
        point y = x;
        for (auto& v : y.coords) {
          if (v > thr) v -= thr;
          else if (v < -thr) v += thr;
          else v = 0.0;
        }
        return y;
      };
      return h;
    }
    case convex_problem::kind::ball_indicator: {
      const point c = f.anchors[0];
      const double R = f.radius;
      h.eval = [X, c, R](const point& x) {
        const double d = X.dist(x, c);
        if (d <= R) return x;
        return X.combine(c, x, R / d);
      };
      return h;
    }
  }
  throw std::logic_error("unreachable");
}

// Resolvent of a nonexpansive T.  The defining equation
//   y = (1/(1+gamma)) x + (gamma/(1+gamma)) T y
// is solved by Banach iteration with ratio q = gamma/(1+gamma) < 1; the
// a-posteriori bound d(y_k, y*) <= q/(1-q) d(y_{k-1}, y_k) certifies the
// stopping point.  If T itself is eps_T-accurate the limit can be off by
// another gamma * eps_T, reflected in the declared eps_eval.
inline mapping_handle nonexpansive_resolvent(const mapping_handle& T, double gamma,
                                             const space& X,
                                             const subproblem_config& cfg = {}) {
  if (!(gamma > 0.0)) throw parameter_range_error("nonexpansive_resolvent: gamma must be > 0");
  mapping_handle h;
  h.gamma = gamma;
  h.name = "nonexpansive-resolvent";
  h.eps_eval = cfg.eps + gamma * T.eps_eval;
  h.fixed_point = T.fixed_point;  // Fix(R_gamma) = Fix(T)
  const double q = gamma / (1.0 + gamma);
  h.eval = [T, X, q, cfg](const point& x) {
    point y = x;
    for (std::int64_t k = 0; k < cfg.max_iter; ++k) {
      const point ty = T(y);
      const point next = X.combine(x, ty, q);
      const double step = X.dist(y, next);
      y = next;
      if (q / (1.0 - q) * step <= cfg.eps) return y;
    }
    throw budget_exhausted("nonexpansive_resolvent: contraction budget exhausted");
  };
  return h;
}

inline mapping_handle nonexpansive_resolvent(const nonexpansive_map& T, double gamma,
                                             const space& X,
                                             const subproblem_config& cfg = {}) {
  T.validate(X);
  mapping_handle base;
  base.name = "nonexpansive-map";
  base.eps_eval = 0.0;
  base.eval = [T, X](const point& x) { return T.apply(X, x); };
  switch (T.k) {
    case nonexpansive_map::kind::identity: base.fixed_point = X.origin(); break;
    case nonexpansive_map::kind::constant: base.fixed_point = T.c; break;
    case nonexpansive_map::kind::rotation: base.fixed_point = X.origin(); break;
    case nonexpansive_map::kind::ball_projection: base.fixed_point = T.c; break;
    case nonexpansive_map::kind::toward:
      base.fixed_point = T.lam > 0.0 ? T.c : X.origin();
      break;
    case nonexpansive_map::kind::scale: base.fixed_point = X.origin(); break;
  }
  return nonexpansive_resolvent(base, gamma, X, cfg);
}

inline mapping_handle monotone_resolvent(const monotone_operator& A, double gamma,
                                         const space& X,
                                         const subproblem_config& cfg = {}) {
  if (!(gamma > 0.0)) throw parameter_range_error("monotone_resolvent: gamma must be > 0");
  A.validate(X);
  mapping_handle h;
  h.gamma = gamma;
  h.name = "monotone-resolvent";
  h.eps_eval = 0.0;
  const auto n = static_cast<std::size_t>(X.dim());

  switch (A.k) {
    case monotone_operator::kind::linear:
    case monotone_operator::kind::rotation: {
      std::vector<double> M = A.k == monotone_operator::kind::rotation
                                  ? std::vector<double>{0.0, -1.0, 1.0, 0.0}
                                  : A.M;
      std::vector<double> S(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          S[i * n + j] = (i == j ? 1.0 : 0.0) + gamma * M[i * n + j];
      h.eval = [S](const point& x) { return point{linalg::solve(S, x.coords), 0}; };
      h.fixed_point = X.origin();  // A 0 = 0 for both kinds
      return h;
    }
    case monotone_operator::kind::gradient:
      return moreau_yosida(*A.grad_of, gamma, X, cfg);
    case monotone_operator::kind::shifted_identity: {
      const point p = A.pstar;
      h.eval = [p, gamma](const point& x) {
        point y = x;
        for (std::size_t i = 0; i < y.coords.size(); ++i)
          y.coords[i] = (x.coords[i] + gamma * p.coords[i]) / (1.0 + gamma);
        return y;
      };
      h.fixed_point = p;
      return h;
    }
  }
  throw std::logic_error("unreachable");
}

// --- family construction ----------------------------------------------------

struct resolvent_spec {
  enum class kind { moreau_yosida, nonexpansive, monotone };
  kind k = kind::moreau_yosida;
  convex_problem problem;
  nonexpansive_map base_map;
  monotone_operator op;
};

inline mapping_family build_family(const resolvent_spec& spec, const step_schedule& sched,
                                   const space& X, const subproblem_config& cfg = {}) {
  mapping_family F;
  F.schedule = sched;
  switch (spec.k) {
    case resolvent_spec::kind::moreau_yosida: {
      spec.problem.validate(X);
      F.id = "moreau-yosida-family";
      F.fixed_point = problem_minimizer(spec.problem, X, cfg);
      const convex_problem f = spec.problem;
      F.member = [f, sched, X, cfg](std::int64_t n) {
        return moreau_yosida(f, sched.gamma(n), X, cfg);
      };
      return F;
    }
    case resolvent_spec::kind::nonexpansive: {
      spec.base_map.validate(X);
      F.id = "nonexpansive-resolvent-family";
      const nonexpansive_map T = spec.base_map;
      {
        auto probe = nonexpansive_resolvent(T, 1.0, X, cfg);
        F.fixed_point = probe.fixed_point;
      }
      F.member = [T, sched, X, cfg](std::int64_t n) {
        return nonexpansive_resolvent(T, sched.gamma(n), X, cfg);
      };
      return F;
    }
    case resolvent_spec::kind::monotone: {
      spec.op.validate(X);
      F.id = "monotone-resolvent-family";
      const monotone_operator A = spec.op;
      {
        auto probe = monotone_resolvent(A, 1.0, X, cfg);
        F.fixed_point = probe.fixed_point;
      }
      F.member = [A, sched, X, cfg](std::int64_t n) {
        return monotone_resolvent(A, sched.gamma(n), X, cfg);
      };
      return F;
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace proxlab
