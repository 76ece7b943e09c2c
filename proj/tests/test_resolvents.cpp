// Resolvent constructors against independent oracles: golden-section line
// search on geodesics, first-order optimality residuals, the defining
// equations solved by hand, and value-domination tests.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "proxlab/proxlab.hpp"

using namespace proxlab;

namespace {

// Golden-section minimizer of a unimodal h on [lo, hi].
double golden_min(const std::function<double(double)>& h, double lo, double hi) {
  const double r = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - r * (b - a), d = a + r * (b - a);
  double hc = h(c), hd = h(d);
  for (int i = 0; i < 120; ++i) {
    if (hc < hd) {
      b = d; d = c; hd = hc;
      c = b - r * (b - a); hc = h(c);
    } else {
      a = c; c = d; hc = hd;
      d = a + r * (b - a); hd = h(d);
    }
  }
  return 0.5 * (a + b);
}

double prox_objective(const space& X, const convex_problem& f, double gamma,
                      const point& x, const point& y) {
  const double d = X.dist(x, y);
  return f.value(X, y) + d * d / (2.0 * gamma);
}

convex_problem single_anchor(const point& a, double w = 1.0) {
  convex_problem f;
  f.k = convex_problem::kind::squared_distance_sum;
  f.weights = {w};
  f.anchors = {a};
  return f;
}

}  // namespace

TEST_CASE("single-anchor prox matches a golden-section oracle on every backend") {
  // The minimizer lies on the geodesic [x, a] (projection onto the segment
  // is nonexpansive and fixes both terms), so a 1-D search is an exact
  // oracle that knows nothing about the closed form.
  for (const space& X : {space::euclidean(3), space::hyperboloid(2), space::spider(4)}) {
    rng g(101);
    for (int trial = 0; trial < 100; ++trial) {
      const point a = X.sample(region{X.origin(), 2.0}, g);
      const point x = X.sample(region{X.origin(), 2.0}, g);
      const double w = g.uniform(0.5, 2.0);
      const double gamma = g.uniform(0.2, 3.0);
      const auto J = moreau_yosida(single_anchor(a, w), gamma, X);
      const point got = J(x);
      const convex_problem f = single_anchor(a, w);
      const double t_star = golden_min(
          [&](double t) { return prox_objective(X, f, gamma, x, X.combine(x, a, t)); },
          0.0, 1.0);
      const point want = X.combine(x, a, t_star);
      INFO(backend_name(X.kind()) << " trial " << trial);
      REQUIRE(X.dist(got, want) <= 1e-6);
    }
  }
}

TEST_CASE("multi-anchor prox satisfies first-order optimality in the plane") {
  const space X = space::euclidean(2);
  convex_problem f;
  f.k = convex_problem::kind::squared_distance_sum;
  f.weights = {1.0, 2.0, 0.5};
  f.anchors = {point{{1.0, 0.0}, 0}, point{{-1.0, 1.0}, 0}, point{{0.0, -2.0}, 0}};
  rng g(7);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = X.sample(region{X.origin(), 3.0}, g);
    const double gamma = g.uniform(0.1, 2.0);
    const point y = moreau_yosida(f, gamma, X)(x);
    // grad f(y) + (y - x)/gamma must vanish.
    for (std::size_t i = 0; i < 2; ++i) {
      double grad = (y.coords[i] - x.coords[i]) / gamma;
      for (std::size_t j = 0; j < 3; ++j)
        grad += f.weights[j] * (y.coords[i] - f.anchors[j].coords[i]);
      REQUIRE(std::fabs(grad) <= 1e-9);
    }
  }
}

TEST_CASE("quadratic prox satisfies its linear first-order system") {
  const space X = space::euclidean(3);
  convex_problem f;
  f.k = convex_problem::kind::quadratic;
  f.Q = {2.0, 0.5, 0.0,
         0.5, 1.0, 0.25,
         0.0, 0.25, 3.0};
  f.lin = {1.0, -2.0, 0.5};
  rng g(13);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = X.sample(region{X.origin(), 3.0}, g);
    const double gamma = g.uniform(0.1, 2.0);
    const point y = moreau_yosida(f, gamma, X)(x);
    // Qy + c + (y - x)/gamma = 0, expanded by hand.
    for (std::size_t i = 0; i < 3; ++i) {
      double r = f.lin[i] + (y.coords[i] - x.coords[i]) / gamma;
      for (std::size_t j = 0; j < 3; ++j) r += f.Q[i * 3 + j] * y.coords[j];
      REQUIRE(std::fabs(r) <= 1e-9);
    }
  }
}

TEST_CASE("l1 prox matches per-coordinate golden-section oracles") {
  const space X = space::euclidean(4);
  convex_problem f;
  f.k = convex_problem::kind::l1;
  f.lambda = 0.8;
  rng g(17);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = X.sample(region{X.origin(), 3.0}, g);
    const double gamma = g.uniform(0.1, 2.0);
    const point y = moreau_yosida(f, gamma, X)(x);
    for (std::size_t i = 0; i < 4; ++i) {
      const double xi = x.coords[i];
      const double vi = golden_min(
          [&](double v) {
            return f.lambda * std::fabs(v) + (v - xi) * (v - xi) / (2.0 * gamma);
          },
          -6.0, 6.0);
      REQUIRE(y.coords[i] == Catch::Approx(vi).margin(1e-6));
    }
  }
}

TEST_CASE("distance and indicator proxes reduce to their piecewise closed forms") {
  const space X = space::euclidean(2);
  const point a{{2.0, 0.0}, 0};
  convex_problem fd;
  fd.k = convex_problem::kind::distance_to_point;
  fd.anchors = {a};
  const auto Jd = moreau_yosida(fd, 1.5, X);
  // Inside the step radius the prox collapses to the anchor.
  REQUIRE(X.dist(Jd(point{{1.0, 0.0}, 0}), a) <= 1e-12);
  // Outside it walks exactly gamma toward the anchor.
  const point far{{-3.0, 0.0}, 0};
  const point y = Jd(far);
  REQUIRE(y.coords[0] == Catch::Approx(-1.5).margin(1e-12));
  REQUIRE(X.dist(far, y) == Catch::Approx(1.5).margin(1e-12));

  convex_problem fb;
  fb.k = convex_problem::kind::ball_indicator;
  fb.anchors = {X.origin()};
  fb.radius = 1.0;
  const auto Jb = moreau_yosida(fb, 0.7, X);  // gamma is irrelevant for indicators
  const point inside{{0.3, -0.4}, 0};
  REQUIRE(X.dist(Jb(inside), inside) <= 1e-12);
  const point outside{{3.0, 4.0}, 0};
  const point p = Jb(outside);
  REQUIRE(p.coords[0] == Catch::Approx(0.6).margin(1e-12));
  REQUIRE(p.coords[1] == Catch::Approx(0.8).margin(1e-12));
}

TEST_CASE("spider multi-anchor prox matches a per-ray search oracle") {
  const space S = space::spider(3);
  convex_problem f;
  f.k = convex_problem::kind::squared_distance_sum;
  f.weights = {1.0, 0.5, 2.0};
  f.anchors = {point{{1.0}, 0}, point{{2.0}, 1}, point{{0.5}, 2}};
  // Spider metric recomputed by hand for the oracle.
  auto sdist = [](int r1, double o1, int r2, double o2) {
    if (r1 == r2 || o1 == 0.0 || o2 == 0.0) return std::fabs(o1 - o2);
    return o1 + o2;
  };
  rng g(23);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = S.sample(region{S.origin(), 2.0}, g);
    const double gamma = g.uniform(0.2, 2.0);
    const point y = moreau_yosida(f, gamma, S)(x);
    double best = HUGE_VAL;
    int best_ray = -1;
    double best_off = 0.0;
    for (int r = 0; r < 3; ++r) {
      auto h = [&](double s) {
        double v = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
          const double d = sdist(r, s, f.anchors[i].ray, f.anchors[i].coords[0]);
          v += 0.5 * f.weights[i] * d * d;
        }
        const double dx = sdist(r, s, x.ray, x.coords[0]);
        return v + dx * dx / (2.0 * gamma);
      };
      const double s = golden_min(h, 0.0, 4.0);
      if (h(s) < best) {
        best = h(s);
        best_ray = r;
        best_off = s;
      }
    }
    const point want = best_off <= 1e-9 ? S.origin() : point{{best_off}, best_ray};
    INFO("trial " << trial << " ray " << best_ray << " off " << best_off);
    REQUIRE(S.dist(y, want) <= 1e-6);
  }
}

TEST_CASE("hyperboloid multi-anchor prox dominates sampled competitors") {
  const space H = space::hyperboloid(2);
  convex_problem f;
  f.k = convex_problem::kind::squared_distance_sum;
  rng ga(29);
  f.weights = {1.0, 1.5};
  f.anchors = {H.sample(region{H.origin(), 1.0}, ga), H.sample(region{H.origin(), 1.0}, ga)};
  rng g(31);
  for (int trial = 0; trial < 20; ++trial) {
    const point x = H.sample(region{H.origin(), 1.5}, g);
    const double gamma = g.uniform(0.3, 2.0);
    const point y = moreau_yosida(f, gamma, H)(x);
    const double gy = prox_objective(H, f, gamma, x, y);
    for (int probe = 0; probe < 200; ++probe) {
      const point z = H.sample(region{y, 0.5}, g);
      REQUIRE(prox_objective(H, f, gamma, x, z) >= gy - 1e-7);
    }
    // Geodesic perturbations toward the anchors and toward x cannot improve.
    for (const point* tgt : {&std::as_const(f).anchors[0], &std::as_const(f).anchors[1], &x}) {
      if (H.dist(y, *tgt) < 1e-9) continue;
      const point z = H.combine(y, *tgt, 1e-4 / H.dist(y, *tgt));
      REQUIRE(prox_objective(H, f, gamma, x, z) >= gy - 1e-10);
    }
  }
}

TEST_CASE("resolvent identity ties different step sizes together") {
  // J_gamma x = J_lambda( (1 - lambda/gamma) J_gamma x  (+)  (lambda/gamma) x ).
  for (const space& X : {space::euclidean(2), space::hyperboloid(2), space::spider(3)}) {
    rng g(37);
    const point a = X.sample(region{X.origin(), 1.5}, g);
    const convex_problem f = single_anchor(a);
    for (int trial = 0; trial < 50; ++trial) {
      const point x = X.sample(region{X.origin(), 2.0}, g);
      const double gamma = g.uniform(0.5, 3.0);
      const double lambda = g.uniform(0.1, gamma);
      const point jg = moreau_yosida(f, gamma, X)(x);
      const point z = X.combine(jg, x, lambda / gamma);
      const point jl = moreau_yosida(f, lambda, X)(z);
      REQUIRE(X.dist(jl, jg) <= 1e-9);
    }
  }
}

TEST_CASE("nonexpansive resolvent solves its defining equation") {
  // For the linear rotation map the fixed-point equation (I - qR) y = (1-q) x
  // is a 2x2 system solved here by hand.
  const space X = space::euclidean(2);
  nonexpansive_map rot;
  rot.k = nonexpansive_map::kind::rotation;
  rng g(41);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = X.sample(region{X.origin(), 3.0}, g);
    const double gamma = g.uniform(0.2, 4.0);
    const double q = gamma / (1.0 + gamma);
    const point y = nonexpansive_resolvent(rot, gamma, X)(x);
    // (I - qR) = [[1, q], [-q, 1]], det = 1 + q^2.
    const double det = 1.0 + q * q;
    const double b0 = (1.0 - q) * x.coords[0], b1 = (1.0 - q) * x.coords[1];
    const double w0 = (b0 - q * b1) / det;
    const double w1 = (q * b0 + b1) / det;
    REQUIRE(y.coords[0] == Catch::Approx(w0).margin(1e-7));
    REQUIRE(y.coords[1] == Catch::Approx(w1).margin(1e-7));
  }

  // On the spider: plug the returned point back into the equation.
  const space S = space::spider(3);
  nonexpansive_map tw;
  tw.k = nonexpansive_map::kind::toward;
  tw.c = point{{1.5}, 2};
  tw.lam = 0.7;
  rng gs(43);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = S.sample(region{S.origin(), 2.0}, gs);
    const double gamma = gs.uniform(0.2, 3.0);
    const double q = gamma / (1.0 + gamma);
    const point y = nonexpansive_resolvent(tw, gamma, S)(x);
    const point rhs = S.combine(x, tw.apply(S, y), q);
    REQUIRE(S.dist(y, rhs) <= 1e-7);
  }
}

TEST_CASE("monotone resolvents invert id plus gamma A") {
  const space X = space::euclidean(2);
  monotone_operator rot;
  rot.k = monotone_operator::kind::rotation;
  rng g(47);
  for (int trial = 0; trial < 100; ++trial) {
    const point x = X.sample(region{X.origin(), 3.0}, g);
    const double gamma = g.uniform(0.2, 3.0);
    const point y = monotone_resolvent(rot, gamma, X)(x);
    // y + gamma A y = x with A(y) = (-y1, y0).
    REQUIRE(y.coords[0] - gamma * y.coords[1] == Catch::Approx(x.coords[0]).margin(1e-10));
    REQUIRE(y.coords[1] + gamma * y.coords[0] == Catch::Approx(x.coords[1]).margin(1e-10));
  }

  monotone_operator shift;
  shift.k = monotone_operator::kind::shifted_identity;
  shift.pstar = point{{1.0, -2.0}, 0};
  for (int trial = 0; trial < 100; ++trial) {
    const point x = X.sample(region{X.origin(), 3.0}, g);
    const double gamma = g.uniform(0.2, 3.0);
    const point y = monotone_resolvent(shift, gamma, X)(x);
    REQUIRE(y.coords[0] + gamma * (y.coords[0] - 1.0) == Catch::Approx(x.coords[0]).margin(1e-10));
    REQUIRE(y.coords[1] + gamma * (y.coords[1] + 2.0) == Catch::Approx(x.coords[1]).margin(1e-10));
  }
}

TEST_CASE("declared fixed points are actually fixed") {
  const space X = space::euclidean(2);
  resolvent_spec rs;
  rs.k = resolvent_spec::kind::nonexpansive;
  rs.base_map.k = nonexpansive_map::kind::toward;
  rs.base_map.c = point{{0.5, -0.5}, 0};
  rs.base_map.lam = 0.4;
  const auto F = build_family(rs, step_schedule::constant(2.0), X);
  REQUIRE(F.fixed_point.has_value());
  const auto T0 = F.member(0);
  REQUIRE(X.dist(T0(*F.fixed_point), *F.fixed_point) <= 1e-7);

  convex_problem f;
  f.k = convex_problem::kind::squared_distance_sum;
  f.weights = {1.0, 3.0};
  f.anchors = {point{{0.0, 0.0}, 0}, point{{4.0, 0.0}, 0}};
  const auto J = moreau_yosida(f, 1.0, X);
  REQUIRE(J.fixed_point.has_value());
  REQUIRE(J.fixed_point->coords[0] == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(X.dist(J(*J.fixed_point), *J.fixed_point) <= 1e-12);
}

TEST_CASE("iteration budgets surface as budget_exhausted") {
  const space X = space::euclidean(2);
  nonexpansive_map rot;
  rot.k = nonexpansive_map::kind::rotation;
  subproblem_config cfg;
  cfg.eps = 1e-12;
  cfg.max_iter = 2;
  const auto R = nonexpansive_resolvent(rot, 5.0, X, cfg);
  REQUIRE_THROWS_AS(R(point{{1.0, 1.0}, 0}), budget_exhausted);
}

TEST_CASE("eps accounting tightens with the configured target") {
  const space X = space::euclidean(2);
  nonexpansive_map rot;
  rot.k = nonexpansive_map::kind::rotation;
  subproblem_config tight;
  tight.eps = 1e-12;
  subproblem_config loose;
  loose.eps = 1e-4;
  const auto Rt = nonexpansive_resolvent(rot, 1.0, X, tight);
  const auto Rl = nonexpansive_resolvent(rot, 1.0, X, loose);
  REQUIRE(Rt.eps_eval <= 1e-12);
  REQUIRE(Rl.eps_eval <= 1e-4);
  const point x{{2.0, -1.0}, 0};
  REQUIRE(X.dist(Rt(x), Rl(x)) <= 2e-4);
}
