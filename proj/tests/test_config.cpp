// Config parsing, JSON round-trips, and the output helpers.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "proxlab/proxlab.hpp"

using namespace proxlab;
using nlohmann::json;

TEST_CASE("full experiment config parses into the right pieces") {
  const json j = json::parse(R"({
    "space": {"kind": "spider", "rays": 3},
    "seed": 7,
    "schedule": {"kind": "harmonic-sqrt", "c": 1.0},
    "instance": {
      "id": "spider-prox",
      "constructor": "moreau_yosida",
      "problem": {
        "kind": "squared_distance_sum",
        "weights": [1.0, 2.0],
        "anchors": [[0, 1.0], [1, 2.0]]
      }
    },
    "x0": [2, 1.5],
    "b": 4.0,
    "modulus": {"kind": "power", "c": 1.0, "q": 2.0},
    "n_max": 250,
    "monitors": ["fejer", "residual"],
    "inequalities": ["jointly-fne", "c1"],
    "pairs": [[0, 1], [1, 0]],
    "probes": [0, 2],
    "K": 4,
    "samples": {"count": 123, "radius": 2.5, "t_grid": [0.0, 0.5, 1.0]},
    "subproblem": {"eps": 1e-9, "max_iter": 5000, "method": "auto"}
  })");
  const auto c = experiment_config::from_json(j);
  REQUIRE(c.X.kind() == backend_kind::spider);
  REQUIRE(c.id == "spider-prox");
  REQUIRE(c.seed == 7);
  REQUIRE(c.schedule.kind() == step_schedule::form::harmonic_sqrt);
  REQUIRE(c.constructor == experiment_config::ctor::moreau_yosida);
  REQUIRE(c.x0.has_value());
  REQUIRE(c.x0->ray == 2);
  REQUIRE(c.b == 4.0);
  REQUIRE(c.phi.has_value());
  REQUIRE(c.n_max == 250);
  REQUIRE(c.monitors == std::vector<std::string>{"fejer", "residual"});
  REQUIRE(c.inequalities.size() == 2);
  REQUIRE(c.index_pairs == std::vector<std::pair<std::int64_t, std::int64_t>>{{0, 1}, {1, 0}});
  REQUIRE(c.probes == std::vector<std::int64_t>{0, 2});
  REQUIRE(c.K == 4);
  REQUIRE(c.samples.count == 123);
  REQUIRE(c.samples.seed == 7);  // inherits the top-level seed
  REQUIRE(c.samples.reg.radius == 2.5);
  REQUIRE(c.samples.reg.center.ray == 2);  // defaults to x0
  REQUIRE(c.samples.t_grid.size() == 3);
  REQUIRE(c.sub.eps == 1e-9);

  const auto F = c.build_family();
  REQUIRE(F.fixed_point.has_value());           // weighted mean of the anchors
  REQUIRE(F.member(0).gamma.has_value());
  REQUIRE(F.member(3).gamma == Catch::Approx(0.5));
}

TEST_CASE("config rejections") {
  const auto parse = [](const char* text) {
    return experiment_config::from_json(json::parse(text));
  };
  REQUIRE_THROWS_AS(parse(R"({"seed": 1})"), config_error);
  REQUIRE_THROWS_AS(parse(R"({"space": {"kind": "euclidean", "dim": 2}})"), config_error);
  REQUIRE_THROWS_AS(parse(R"([1,2,3])"), config_error);
  REQUIRE_THROWS_AS(
      parse(R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1, "n_max": -5})"),
      config_error);
  REQUIRE_THROWS_AS(
      parse(R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1, "n_max": 99999999999})"),
      config_error);
  REQUIRE_THROWS_AS(
      parse(R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1, "b": 0.0})"),
      config_error);
  REQUIRE_THROWS_AS(
      parse(
          R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1,
              "instance": {"constructor": "bogus"}})"),
      config_error);
  REQUIRE_THROWS_AS(
      parse(
          R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1,
              "instance": {"constructor": "maps", "maps": []}})"),
      config_error);
  REQUIRE_THROWS_AS(
      parse(
          R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1,
              "pairs": [[0]]})"),
      config_error);
  // No instance section: building the family must fail loudly.
  const auto c = parse(R"({"space": {"kind": "euclidean", "dim": 2}, "seed": 1})");
  REQUIRE_THROWS_AS(c.build_family(), config_error);
}

TEST_CASE("raw map families cycle through the list") {
  const json j = json::parse(R"({
    "space": {"kind": "euclidean", "dim": 2},
    "seed": 3,
    "instance": {
      "id": "two-maps",
      "constructor": "maps",
      "maps": [
        {"kind": "constant", "value": [1.0, 0.0]},
        {"kind": "identity"}
      ]
    },
    "p": [0.0, 0.0]
  })");
  const auto c = experiment_config::from_json(j);
  const auto F = c.build_family();
  const point x{{5.0, 5.0}, 0};
  REQUIRE(F.member(0)(x).coords[0] == 1.0);   // constant map
  REQUIRE(F.member(1)(x).coords[0] == 5.0);   // identity
  REQUIRE(F.member(2)(x).coords[0] == 1.0);   // wraps around
  REQUIRE(F.fixed_point.has_value());         // p override
  REQUIRE(F.fixed_point->coords[0] == 0.0);
}

TEST_CASE("hyperboloid point parsing accepts spatial or ambient coordinates") {
  const space H = space::hyperboloid(2);
  const point a = point_from_json(H, json::parse("[0.3, -0.4]"));
  REQUIRE(a.coords.size() == 3);
  REQUIRE(a.coords[0] == Catch::Approx(std::sqrt(1.25)).epsilon(1e-15));
  const point b = point_from_json(H, point_to_json(H, a));
  REQUIRE(H.dist(a, b) <= 1e-12);
  REQUIRE_THROWS_AS(point_from_json(H, json::parse("[9.9, 0.3, -0.4]")), config_error);

  const space S = space::spider(3);
  const point hub = point_from_json(S, json::parse("[2, 0.0]"));
  REQUIRE(hub.ray == 0);  // canonicalized
  REQUIRE_THROWS_AS(point_from_json(S, json::parse("[1.0]")), config_error);
}

TEST_CASE("subproblem config rejects unknown methods") {
  REQUIRE_THROWS_AS(subproblem_config::from_json(json::parse(R"({"method": "magic"})")),
                    config_error);
  REQUIRE_THROWS_AS(subproblem_config::from_json(json::parse(R"({"eps": 0.0})")),
                    parameter_range_error);
  REQUIRE_THROWS_AS(subproblem_config::from_json(json::parse(R"({"max_iter": 0})")),
                    parameter_range_error);
}

TEST_CASE("double formatting round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 2.0, -0.0, 1e-300, 941.0, 6.02e23}) {
    const std::string s = format_double(v);
    REQUIRE(std::stod(s) == v);
  }
  // Shortest form: no trailing digits beyond what round-trips.
  REQUIRE(format_double(0.5) == "0.5");
  REQUIRE(format_double(2.0) == "2");
}

TEST_CASE("trace CSV has the fixed schema") {
  const space X = space::euclidean(2);
  resolvent_spec rs;
  rs.k = resolvent_spec::kind::monotone;
  rs.op.k = monotone_operator::kind::shifted_identity;
  rs.op.pstar = X.origin();
  const auto F = build_family(rs, step_schedule::constant(1.0), X);
  const auto tr = run_ppa(F, X, point{{2.0, 0.0}, 0}, 3);
  const std::string csv = trace_to_csv(tr);
  REQUIRE(csv.rfind("n,gamma,step_dist,residual,dist_to_p,cum_sq\n", 0) == 0);
  REQUIRE(csv.find("\n0,1,1,1,2,0\n") != std::string::npos);
  REQUIRE(csv.find("\n1,1,0.5,0.5,1,1\n") != std::string::npos);
  // 5 lines: header + rows 0..3.
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("atomic writes leave no temp file behind") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "proxlab-io-test";
  fs::remove_all(dir);
  const fs::path target = dir / "nested" / "out.txt";
  atomic_write_file(target, "payload\n");
  REQUIRE(fs::exists(target));
  REQUIRE(!fs::exists(target.string() + ".tmp"));
  std::ifstream in(target);
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "payload");
  // Overwrite through the same path.
  atomic_write_file(target, "second\n");
  std::ifstream in2(target);
  std::getline(in2, line);
  REQUIRE(line == "second");
  fs::remove_all(dir);
}

TEST_CASE("sample spec validation") {
  sample_spec s;
  s.reg = region{point{{0.0, 0.0}, 0}, 1.0};
  REQUIRE_NOTHROW(s.validate());
  s.count = 0;
  REQUIRE_THROWS_AS(s.validate(), parameter_range_error);
  s.count = 10;
  s.reg.radius = 0.0;
  REQUIRE_THROWS_AS(s.validate(), parameter_range_error);
  s.reg.radius = 1.0;
  s.t_grid = {0.5, 1.5};
  REQUIRE_THROWS_AS(s.validate(), parameter_range_error);
}

TEST_CASE("check report merge keeps the worst witness in chunk order") {
  check_report a = detail::make_report("demo", 1e-9);
  check_report b = a;
  ordered_json wa, wb;
  wa["tag"] = "a";
  wb["tag"] = "b";
  a.record(-1.0, wa);
  b.record(-1.0, wb);  // equal slack: earlier chunk wins
  check_report total = detail::make_report("demo", 1e-9);
  total.merge(a);
  total.merge(b);
  REQUIRE(total.samples == 2);
  REQUIRE(total.violations == 2);
  REQUIRE(total.worst_witness.at("tag") == "a");

  const auto j = total.to_json();
  REQUIRE(j.at("violations") == 2);
  REQUIRE(j.at("clean") == false);
}
