#pragma once

// Step-size schedules (gamma_n) with sum gamma_n^2 = inf, together with a
// divergence witness theta: theta(K) is an index N with
// sum_{n <= N} gamma_n^2 >= K.  Having theta as data is what makes the rate
// bounds computable rather than merely asymptotic.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxlab/geometry.hpp"
#include "proxlab/report.hpp"

namespace proxlab {

struct rate_overflow : std::runtime_error {
  explicit rate_overflow(const std::string& what) : std::runtime_error(what) {}
};

class step_schedule {
 public:
  enum class form { constant, harmonic_sqrt, table };

  static step_schedule constant(double gamma) {
    if (!(gamma > 0.0)) throw parameter_range_error("schedule: gamma must be > 0");
    step_schedule s;
    s.form_ = form::constant;
    s.c_ = gamma;
    return s;
  }

  // gamma_n = c / sqrt(n+1); sum gamma_n^2 = c^2 H_{N+1} diverges and
  // H_{N+1} >= ln(N+2) gives theta(K) = ceil(exp(K/c^2)).
  static step_schedule harmonic_sqrt(double c) {
    if (!(c > 0.0)) throw parameter_range_error("schedule: c must be > 0");
    step_schedule s;
    s.form_ = form::harmonic_sqrt;
    s.c_ = c;
    return s;
  }

  // Explicit finite gamma table plus explicit theta table.  Indexing past
  // either table is an error; table schedules only suit finite experiments.
  static step_schedule table(std::vector<double> gammas, std::vector<std::uint64_t> thetas) {
    if (gammas.empty()) throw parameter_range_error("schedule: gamma table must be nonempty");
    for (double g : gammas)
      if (!(g > 0.0)) throw parameter_range_error("schedule: gammas must be > 0");
    step_schedule s;
    s.form_ = form::table;
    s.gammas_ = std::move(gammas);
    s.thetas_ = std::move(thetas);
    return s;
  }

  form kind() const { return form_; }
  double param() const { return c_; }

  double gamma(std::int64_t n) const {
    if (n < 0) throw parameter_range_error("schedule: index must be >= 0");
    switch (form_) {
      case form::constant: return c_;
      case form::harmonic_sqrt: return c_ / std::sqrt(static_cast<double>(n) + 1.0);
      case form::table:
        if (static_cast<std::size_t>(n) >= gammas_.size())
          throw parameter_range_error("schedule: gamma table exhausted at n = " + std::to_string(n));
        return gammas_[static_cast<std::size_t>(n)];
    }
    throw std::logic_error("unreachable");
  }

  std::uint64_t theta(std::uint64_t K) const {
    switch (form_) {
      case form::constant: {
        // smallest N with (N+1) gamma^2 >= K, i.e. N = ceil(K/gamma^2) - 1;
        // we return ceil(K/gamma^2) which also works and matches the
        // documented witness.
        const long double v = std::ceil(static_cast<long double>(K) / (static_cast<long double>(c_) * c_));
        if (!(v < 9.2e18L)) throw rate_overflow("theta overflow for constant schedule");
        return static_cast<std::uint64_t>(v);
      }
      case form::harmonic_sqrt: {
        const long double expo = static_cast<long double>(K) / (static_cast<long double>(c_) * c_);
        if (expo > 42.0L) throw rate_overflow("theta overflow for harmonic-sqrt schedule");
        return static_cast<std::uint64_t>(std::ceil(std::exp(expo)));
      }
      case form::table:
        if (static_cast<std::size_t>(K) > thetas_.size() || K == 0)
          throw parameter_range_error("schedule: theta table exhausted at K = " + std::to_string(K));
        return thetas_[static_cast<std::size_t>(K) - 1];
    }
    throw std::logic_error("unreachable");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    switch (form_) {
      case form::constant:
        j["kind"] = "constant";
        j["gamma"] = c_;
        break;
      case form::harmonic_sqrt:
        j["kind"] = "harmonic-sqrt";
        j["c"] = c_;
        break;
      case form::table:
        j["kind"] = "table";
        j["gammas"] = gammas_;
        j["thetas"] = thetas_;
        break;
    }
    return j;
  }

  static step_schedule from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return constant(j.at("gamma").get<double>());
    if (kind == "harmonic-sqrt") return harmonic_sqrt(j.at("c").get<double>());
    if (kind == "table")
      return table(j.at("gammas").get<std::vector<double>>(),
                   j.value("thetas", std::vector<std::uint64_t>{}));
    throw parameter_range_error("schedule: unknown kind \"" + kind + "\"");
  }

 private:
  step_schedule() = default;
  form form_ = form::constant;
  double c_ = 1.0;
  std::vector<double> gammas_;
  std::vector<std::uint64_t> thetas_;
};

// Checks the witness property sum_{n <= theta(K)} gamma_n^2 >= K for
// K = 1..K_max by accumulating the partial sums once up to the largest index.
inline check_report verify_divergence_rate(const step_schedule& s, std::uint64_t K_max) {
  check_report rep;
  rep.inequality = "divergence-witness";
  rep.tolerance = 0.0;
  std::uint64_t n_largest = 0;
  std::vector<std::uint64_t> idx(K_max);
  for (std::uint64_t K = 1; K <= K_max; ++K) {
    idx[K - 1] = s.theta(K);
    n_largest = std::max(n_largest, idx[K - 1]);
  }
  if (n_largest > 100000000ULL)
    throw rate_overflow("divergence witness check would need " + std::to_string(n_largest) +
                        " terms; reduce K_max");
  // partial[N] = sum_{n=0}^{N} gamma_n^2, computed incrementally.
  double sum = 0.0;
  std::uint64_t n = 0;
  std::vector<double> partial_at(K_max, 0.0);
  std::vector<std::uint64_t> order(K_max);
  for (std::uint64_t i = 0; i < K_max; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&idx](std::uint64_t a, std::uint64_t b) { return idx[a] < idx[b]; });
  for (std::uint64_t i : order) {
    while (n <= idx[i]) {
      const double gn = s.gamma(static_cast<std::int64_t>(n));
      sum += gn * gn;
      ++n;
    }
    partial_at[i] = sum;
  }
  for (std::uint64_t K = 1; K <= K_max; ++K) {
    const double slack = partial_at[K - 1] - static_cast<double>(K);
    ordered_json wit;
    wit["K"] = K;
    wit["theta"] = idx[K - 1];
    wit["partial_sum"] = partial_at[K - 1];
    rep.record(slack, wit);
  }
  return rep;
}

}  // namespace proxlab
