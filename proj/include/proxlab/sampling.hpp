#pragma once

// Sampling plan shared by validators and mapping checkers.

#include <cstdint>
#include <vector>

#include "proxlab/geometry.hpp"

namespace proxlab {

struct sample_spec {
  std::int64_t count = 1000;
  std::uint64_t seed = 1;
  region reg;
  // Deterministic curve parameters; checks that quantify over t evaluate
  // every grid value plus one uniform draw per sample.
  std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};

  void validate() const {
    if (count < 1) throw parameter_range_error("sample_spec: count must be >= 1");
    if (!(reg.radius > 0.0)) throw parameter_range_error("sample_spec: radius must be > 0");
    for (double t : t_grid)
      if (!(t >= 0.0 && t <= 1.0))
        throw parameter_range_error("sample_spec: t_grid values must lie in [0,1]");
  }
};

// Base tolerance for sampled checks: 1e-9 scaled by the squared region
// radius, plus first-order slack 4*eps*b for evaluator error eps.
inline double check_tolerance(const sample_spec& spec, double eps_eval = 0.0) {
  const double b = spec.reg.radius;
  return 1e-9 * (1.0 + b * b) + 4.0 * eps_eval * 2.0 * b;
}

}  // namespace proxlab
