// Step schedules, the proximal point engine, and the trajectory monitors.
// The engine oracle is the shifted-identity family, whose orbit has the
// closed form d(x_n, p*) = d(x_0, p*) / 2^n when gamma = 1.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "proxlab/proxlab.hpp"

using namespace proxlab;

namespace {

mapping_family shifted_identity_family(const space& X, const point& pstar, double gamma) {
  resolvent_spec rs;
  rs.k = resolvent_spec::kind::monotone;
  rs.op.k = monotone_operator::kind::shifted_identity;
  rs.op.pstar = pstar;
  return build_family(rs, step_schedule::constant(gamma), X);
}

}  // namespace

TEST_CASE("schedule values and divergence witnesses") {
  const auto c1 = step_schedule::constant(0.5);
  REQUIRE(c1.gamma(0) == 0.5);
  REQUIRE(c1.gamma(1000) == 0.5);
  // theta(K) = ceil(K / 0.25) = 4K; partial sum (4K+1)/4 >= K.
  REQUIRE(c1.theta(3) == 12);
  REQUIRE(verify_divergence_rate(c1, 20).violations == 0);

  const auto h = step_schedule::harmonic_sqrt(1.0);
  REQUIRE(h.gamma(3) == Catch::Approx(0.5).epsilon(1e-15));
  REQUIRE(h.theta(1) == 3);  // ceil(e)
  REQUIRE(verify_divergence_rate(h, 12).violations == 0);

  const auto tab = step_schedule::table({1.0, 1.0, 1.0, 1.0}, {0, 1, 2, 3});
  REQUIRE(tab.gamma(2) == 1.0);
  REQUIRE(tab.theta(2) == 1);
  REQUIRE(verify_divergence_rate(tab, 4).violations == 0);
}

TEST_CASE("schedule guards: exhaustion and overflow") {
  const auto tab = step_schedule::table({1.0, 0.5}, {1});
  REQUIRE_THROWS_AS(tab.gamma(2), parameter_range_error);
  REQUIRE_THROWS_AS(tab.theta(2), parameter_range_error);
  REQUIRE_THROWS_AS(tab.theta(0), parameter_range_error);

  REQUIRE_THROWS_AS(step_schedule::harmonic_sqrt(1.0).theta(43), rate_overflow);
  REQUIRE_THROWS_AS(step_schedule::constant(1e-10).theta(1), rate_overflow);
  REQUIRE_THROWS_AS(step_schedule::constant(-1.0), parameter_range_error);
  REQUIRE_THROWS_AS(step_schedule::table({}, {}), parameter_range_error);
  REQUIRE_THROWS_AS(step_schedule::table({0.0}, {}), parameter_range_error);
}

TEST_CASE("a bad divergence witness is reported, not asserted") {
  // Claimed theta far too small for the tiny steps: the report must show
  // violations rather than the library trusting the table.
  const auto bad = step_schedule::table(std::vector<double>(8, 0.1), {4});
  const auto rep = verify_divergence_rate(bad, 1);
  REQUIRE(rep.violations == 1);
  REQUIRE(rep.worst_slack < -0.9);
}

TEST_CASE("shifted-identity orbit follows its closed form") {
  const space X = space::euclidean(2);
  const point x0{{2.0, 0.0}, 0};
  const auto F = shifted_identity_family(X, X.origin(), 1.0);
  const auto tr = run_ppa(F, X, x0, 20);

  REQUIRE(tr.rows.size() == 21);
  REQUIRE(tr.p.has_value());
  for (std::int64_t n = 0; n <= 20; ++n) {
    const auto& row = tr.rows[static_cast<std::size_t>(n)];
    REQUIRE(row.n == n);
    REQUIRE(row.dist_to_p == Catch::Approx(2.0 * std::pow(0.5, n)).epsilon(1e-12));
    if (n < 20) {
      REQUIRE(row.gamma == 1.0);
      // step = d(x_n, x_{n+1}) = 2^{-n}; residual equals it at gamma = 1.
      REQUIRE(row.step_dist == Catch::Approx(std::pow(0.5, n)).epsilon(1e-12));
      REQUIRE(row.residual == Catch::Approx(std::pow(0.5, n)).epsilon(1e-12));
      // cum_sq = sum_{k<n} 4^{-k} = (1 - 4^{-n}) * 4/3.
      REQUIRE(row.cum_sq ==
              Catch::Approx((1.0 - std::pow(0.25, n)) * 4.0 / 3.0).margin(1e-12));
    }
  }
  REQUIRE(X.dist(tr.x_final, X.origin()) == Catch::Approx(2.0 * std::pow(0.5, 20)).epsilon(1e-12));
}

TEST_CASE("monitors are clean on the shifted-identity orbit") {
  const space X = space::euclidean(2);
  const auto F = shifted_identity_family(X, point{{1.0, -1.0}, 0}, 1.0);
  const auto tr = run_ppa(F, X, point{{3.0, 1.0}, 0}, 50);

  const auto fej = monitor_fejer(tr);
  REQUIRE(fej.monotone.violations == 0);
  REQUIRE(fej.descent.violations == 0);
  REQUIRE(fej.cumulative.violations == 0);

  // d(x0, p) = 2 sqrt(2), so residual_n = sqrt(2) 2^{-n}: the first n with
  // residual <= 1, 1/2, 1/3, 1/4 are 1, 2, 3, 3.
  const auto res = monitor_residual(tr, 3);
  REQUIRE(res.monotone.violations == 0);
  REQUIRE(res.first_crossing == std::vector<std::int64_t>{1, 2, 3, 3});

  const auto asreg = monitor_asymptotic_regularity(F, X, tr, {0, 1, 5});
  REQUIRE(asreg.violations == 0);
}

TEST_CASE("monitors are clean across backends and schedules") {
  // Prox family on the spider with decaying steps.
  {
    const space X = space::spider(3);
    resolvent_spec rs;
    rs.k = resolvent_spec::kind::moreau_yosida;
    rs.problem.k = convex_problem::kind::squared_distance_sum;
    rs.problem.weights = {1.0, 2.0};
    rs.problem.anchors = {point{{1.0}, 0}, point{{2.0}, 1}};
    const auto F = build_family(rs, step_schedule::harmonic_sqrt(1.0), X);
    const auto tr = run_ppa(F, X, point{{1.5}, 2}, 300);
    REQUIRE(monitor_fejer(tr).clean());
    REQUIRE(monitor_residual(tr).monotone.violations == 0);
    REQUIRE(monitor_asymptotic_regularity(F, X, tr, {0, 1, 5}).violations == 0);
  }
  // Rotation resolvents in the plane, constant steps.
  {
    const space X = space::euclidean(2);
    resolvent_spec rs;
    rs.k = resolvent_spec::kind::monotone;
    rs.op.k = monotone_operator::kind::rotation;
    const auto F = build_family(rs, step_schedule::constant(1.0), X);
    const auto tr = run_ppa(F, X, point{{3.0, 0.0}, 0}, 200);
    REQUIRE(monitor_fejer(tr).clean());
    REQUIRE(monitor_residual(tr).monotone.violations == 0);
    REQUIRE(monitor_asymptotic_regularity(F, X, tr, {0, 1, 5}).violations == 0);
  }
  // Iteratively evaluated resolvent: tolerance must absorb solver noise.
  {
    const space X = space::hyperboloid(2);
    resolvent_spec rs;
    rs.k = resolvent_spec::kind::nonexpansive;
    rs.base_map.k = nonexpansive_map::kind::toward;
    rng g(3);
    rs.base_map.c = X.sample(region{X.origin(), 1.0}, g);
    rs.base_map.lam = 0.5;
    const auto F = build_family(rs, step_schedule::constant(1.0), X);
    const auto tr = run_ppa(F, X, X.sample(region{X.origin(), 2.0}, g), 100);
    REQUIRE(tr.eps_eval > 0.0);
    REQUIRE(monitor_fejer(tr).clean());
    REQUIRE(monitor_residual(tr).monotone.violations == 0);
  }
}

TEST_CASE("a non-proximal orbit fails the descent monitor") {
  // Plain rotation iterates keep d(x_n, 0) constant; the monotonicity
  // report stays clean but the quadratic descent estimate must fail.
  const space X = space::euclidean(2);
  mapping_family F;
  F.id = "rotation-map";
  F.schedule = step_schedule::constant(1.0);
  F.fixed_point = X.origin();
  F.member = [&X](std::int64_t) {
    mapping_handle h;
    h.gamma = 1.0;
    h.name = "rotation";
    h.fixed_point = X.origin();
    h.eval = [](const point& x) { return point{{-x.coords[1], x.coords[0]}, 0}; };
    return h;
  };
  const auto tr = run_ppa(F, X, point{{1.0, 0.0}, 0}, 10);
  const auto fej = monitor_fejer(tr);
  REQUIRE(fej.monotone.violations == 0);
  REQUIRE(fej.descent.violations == 10);
  REQUIRE(fej.descent.worst_slack == Catch::Approx(-2.0).margin(1e-12));
  REQUIRE(fej.cumulative.violations > 0);
}

TEST_CASE("iterate retention keeps a full prefix then thins out") {
  const space X = space::euclidean(2);
  const auto F = shifted_identity_family(X, X.origin(), 1.0);
  run_options opts;
  opts.retain_all_up_to = 100;
  const auto tr = run_ppa(F, X, point{{1.0, 0.0}, 0}, 500, opts);
  for (std::int64_t n = 0; n <= 100; ++n) REQUIRE(tr.point_at(n) != nullptr);
  REQUIRE(tr.point_at(500) != nullptr);
  REQUIRE(tr.points.size() < 150);
  for (std::size_t i = 1; i < tr.points.size(); ++i)
    REQUIRE(tr.points[i - 1].first < tr.points[i].first);
}

TEST_CASE("engine guards") {
  const space X = space::euclidean(2);
  const auto F = shifted_identity_family(X, X.origin(), 1.0);
  REQUIRE_THROWS_AS(run_ppa(F, X, point{{1.0, 0.0}, 0}, -1), parameter_range_error);
  REQUIRE_THROWS_AS(run_ppa(F, X, point{{1.0, 0.0}, 0}, k_max_iterations + 1),
                    parameter_range_error);

  // Budget exhaustion inside a member surfaces with the iteration index.
  resolvent_spec rs;
  rs.k = resolvent_spec::kind::nonexpansive;
  rs.base_map.k = nonexpansive_map::kind::rotation;
  subproblem_config cfg;
  cfg.eps = 1e-12;
  cfg.max_iter = 2;
  const auto bad = build_family(rs, step_schedule::constant(5.0), X, cfg);
  try {
    run_ppa(bad, X, point{{1.0, 1.0}, 0}, 5);
    FAIL("expected budget_exhausted");
  } catch (const budget_exhausted& e) {
    REQUIRE(std::string(e.what()).find("at iteration n = 0") != std::string::npos);
  }
}

TEST_CASE("zero-iteration run is well formed") {
  const space X = space::euclidean(2);
  const auto F = shifted_identity_family(X, X.origin(), 1.0);
  const point x0{{1.0, 2.0}, 0};
  const auto tr = run_ppa(F, X, x0, 0);
  REQUIRE(tr.rows.size() == 1);
  REQUIRE(tr.points.size() == 1);
  REQUIRE(X.dist(tr.x_final, x0) == 0.0);
}
