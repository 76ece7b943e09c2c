#pragma once

// Mapping handles wrap opaque evaluators T: X -> X together with the
// metadata checkers and monitors need: a declared evaluation accuracy
// eps_eval (0 for closed forms), the step size the map was built with, and
// an optional known fixed point.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "proxlab/geometry.hpp"
#include "proxlab/schedule.hpp"

namespace proxlab {

// Thrown when an iterative evaluator hits its iteration cap before its
// certified stopping bound; never swallowed, since a silently inaccurate
// evaluation would poison every downstream check.
struct budget_exhausted : std::runtime_error {
  explicit budget_exhausted(const std::string& what) : std::runtime_error(what) {}
};

struct mapping_handle {
  std::function<point(const point&)> eval;
  double eps_eval = 0.0;
  std::optional<double> gamma;
  std::optional<point> fixed_point;
  std::string name;

  point operator()(const point& x) const { return eval(x); }
};

// Indexed family (T_n) sharing a step schedule.  member(n) may build its
// handle lazily; callers cache handles per index when iterating.
struct mapping_family {
  std::function<mapping_handle(std::int64_t)> member;
  step_schedule schedule = step_schedule::constant(1.0);
  std::optional<point> fixed_point;  // a common fixed point, when known
  std::string id;
};

}  // namespace proxlab
