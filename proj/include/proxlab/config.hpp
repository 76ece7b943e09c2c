#pragma once

// Experiment configuration: one JSON file describes a space, an instance
// (problem/operator/map plus the resolvent constructor to apply, or a raw
// list of maps), a step schedule, and the run/check/certify parameters.
// The seed is mandatory; nothing in the library draws ambient randomness.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "proxlab/mapping.hpp"
#include "proxlab/modulus.hpp"
#include "proxlab/rates.hpp"
#include "proxlab/resolvents.hpp"
#include "proxlab/sampling.hpp"
#include "proxlab/serialize.hpp"

namespace proxlab {

struct experiment_config {
  space X = space::euclidean(2);
  std::string id = "experiment";

  enum class ctor { moreau_yosida, nonexpansive, monotone, maps, none };
  ctor constructor = ctor::none;
  resolvent_spec rspec;
  std::vector<nonexpansive_map> raw_maps;  // constructor == maps

  step_schedule schedule = step_schedule::constant(1.0);
  std::optional<point> x0, p;
  std::optional<double> b;
  std::optional<modulus> phi;
  std::int64_t n_max = 1000;
  std::vector<std::string> monitors;      // subset of fejer, residual, asreg
  std::vector<std::string> inequalities;  // for check-family
  std::vector<std::pair<std::int64_t, std::int64_t>> index_pairs;
  std::vector<std::int64_t> probes{0, 1, 5};
  std::uint64_t K = 10;
  std::uint64_t seed = 0;
  sample_spec samples;
  subproblem_config sub;

  static experiment_config from_json(const nlohmann::json& j) {
    experiment_config c;
    if (!j.is_object()) throw config_error("config: expected a JSON object");
    if (!j.contains("space")) throw config_error("config: missing \"space\"");
    c.X = space_from_json(j.at("space"));
    if (!j.contains("seed")) throw config_error("config: missing mandatory \"seed\"");
    c.seed = j.at("seed").get<std::uint64_t>();

    if (j.contains("schedule")) c.schedule = step_schedule::from_json(j.at("schedule"));

    if (j.contains("instance")) {
      const auto& inst = j.at("instance");
      c.id = inst.value("id", std::string("experiment"));
      const std::string ctor_s = inst.value("constructor", std::string());
      if (ctor_s == "moreau_yosida") {
        c.constructor = ctor::moreau_yosida;
        c.rspec.k = resolvent_spec::kind::moreau_yosida;
        c.rspec.problem = convex_problem::from_json(c.X, inst.at("problem"));
      } else if (ctor_s == "nonexpansive") {
        c.constructor = ctor::nonexpansive;
        c.rspec.k = resolvent_spec::kind::nonexpansive;
        c.rspec.base_map = nonexpansive_map::from_json(c.X, inst.at("map"));
      } else if (ctor_s == "monotone") {
        c.constructor = ctor::monotone;
        c.rspec.k = resolvent_spec::kind::monotone;
        c.rspec.op = monotone_operator::from_json(c.X, inst.at("operator"));
      } else if (ctor_s == "maps") {
        c.constructor = ctor::maps;
        if (!inst.contains("maps") || inst.at("maps").empty())
          throw config_error("config: constructor \"maps\" needs a nonempty \"maps\" list");
        for (const auto& m : inst.at("maps"))
          c.raw_maps.push_back(nonexpansive_map::from_json(c.X, m));
      } else {
        throw config_error("config: unknown instance constructor \"" + ctor_s + "\"");
      }
    }

    if (j.contains("x0")) c.x0 = point_from_json(c.X, j.at("x0"));
    if (j.contains("p")) c.p = point_from_json(c.X, j.at("p"));
    if (j.contains("b")) {
      c.b = j.at("b").get<double>();
      if (!(*c.b > 0.0)) throw config_error("config: b must be > 0");
    }
    if (j.contains("modulus")) c.phi = modulus::from_json(j.at("modulus"));
    c.n_max = j.value("n_max", static_cast<std::int64_t>(1000));
    if (c.n_max < 0 || c.n_max > k_max_iterations)
      throw config_error("config: n_max must lie in [0, 10^7]");
    if (j.contains("monitors")) c.monitors = j.at("monitors").get<std::vector<std::string>>();
    if (j.contains("inequalities"))
      c.inequalities = j.at("inequalities").get<std::vector<std::string>>();
    if (j.contains("pairs")) {
      for (const auto& pr : j.at("pairs")) {
        if (!pr.is_array() || pr.size() != 2)
          throw config_error("config: pairs entries must be [n, m]");
        c.index_pairs.emplace_back(pr.at(0).get<std::int64_t>(), pr.at(1).get<std::int64_t>());
      }
    } else {
      c.index_pairs = {{0, 0}, {0, 1}, {1, 0}, {1, 3}, {3, 1}, {2, 7}, {7, 2}, {5, 5}};
    }
    if (j.contains("probes")) c.probes = j.at("probes").get<std::vector<std::int64_t>>();
    c.K = j.value("K", static_cast<std::uint64_t>(10));
    if (j.contains("subproblem")) c.sub = subproblem_config::from_json(j.at("subproblem"));

    // Sampling defaults: centered at x0 (else the origin), radius b (else 1).
    c.samples.seed = c.seed;
    c.samples.reg.center = c.x0 ? *c.x0 : c.X.origin();
    c.samples.reg.radius = c.b ? *c.b : 1.0;
    if (j.contains("samples")) {
      const auto& s = j.at("samples");
      c.samples.count = s.value("count", static_cast<std::int64_t>(1000));
      if (s.contains("seed")) c.samples.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("center")) c.samples.reg.center = point_from_json(c.X, s.at("center"));
      if (s.contains("radius")) c.samples.reg.radius = s.at("radius").get<double>();
      if (s.contains("t_grid")) c.samples.t_grid = s.at("t_grid").get<std::vector<double>>();
    }
    c.samples.validate();
    return c;
  }

  mapping_family build_family() const {
    switch (constructor) {
      case ctor::none:
        throw config_error("config: no instance section");
      case ctor::maps: {
        mapping_family F;
        F.schedule = schedule;
        F.id = id;
        const space Xc = X;
        const auto maps = raw_maps;
        // Member n is maps[n mod size]; a single-entry list is a constant
        // family.
        F.member = [Xc, maps](std::int64_t n) {
          const auto& m = maps[static_cast<std::size_t>(n) % maps.size()];
          mapping_handle h;
          h.name = "raw-map";
          h.eval = [Xc, m](const point& x) { return m.apply(Xc, x); };
          if (m.k == nonexpansive_map::kind::identity) h.fixed_point = Xc.origin();
          if (m.k == nonexpansive_map::kind::constant) h.fixed_point = m.c;
          return h;
        };
        if (raw_maps.size() == 1 && raw_maps[0].k == nonexpansive_map::kind::identity)
          F.fixed_point = X.origin();
        if (p) F.fixed_point = *p;
        return F;
      }
      default: {
        mapping_family F = proxlab::build_family(rspec, schedule, X, sub);
        F.id = id;
        if (p) F.fixed_point = *p;
        return F;
      }
    }
  }
};

}  // namespace proxlab
