#pragma once

// Modulus functions phi: [0,inf) -> [0,inf) with phi(0) = 0, used by the
// uniform variants of the mapping checks and by the rate certificates.
// Two forms: power c*t^q and a piecewise-linear table.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxlab/geometry.hpp"

namespace proxlab {

class modulus {
 public:
  enum class form { power, table };

  static modulus power(double c, double q) {
    if (!(c > 0.0)) throw parameter_range_error("modulus: coefficient must be > 0");
    if (!(q > 0.0)) throw parameter_range_error("modulus: exponent must be > 0");
    modulus m;
    m.form_ = form::power;
    m.c_ = c;
    m.q_ = q;
    return m;
  }

  // knots must start at (0,0), be sorted in t and nondecreasing in value,
  // with positive values for t > 0.  Evaluation interpolates linearly and
  // extrapolates the last segment.
  static modulus table(std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2 || knots.front().first != 0.0 || knots.front().second != 0.0)
      throw parameter_range_error("modulus: table must start at (0,0) and have >= 2 knots");
    for (std::size_t i = 1; i < knots.size(); ++i) {
      if (!(knots[i].first > knots[i - 1].first))
        throw parameter_range_error("modulus: table abscissae must be strictly increasing");
      if (knots[i].second < knots[i - 1].second)
        throw parameter_range_error("modulus: table values must be nondecreasing");
      if (!(knots[i].second > 0.0))
        throw parameter_range_error("modulus: table values must be positive for t > 0");
    }
    modulus m;
    m.form_ = form::table;
    m.knots_ = std::move(knots);
    return m;
  }

  form kind() const { return form_; }
  double coeff() const { return c_; }
  double exponent() const { return q_; }

  double operator()(double t) const {
    if (t < 0.0) throw parameter_range_error("modulus: argument must be >= 0");
    if (form_ == form::power) return c_ * std::pow(t, q_);
    if (t >= knots_.back().first) {
      const auto& [t1, v1] = knots_[knots_.size() - 2];
      const auto& [t2, v2] = knots_.back();
      return v2 + (t - t2) * (v2 - v1) / (t2 - t1);
    }
    std::size_t i = 1;
    while (knots_[i].first < t) ++i;
    const auto& [t1, v1] = knots_[i - 1];
    const auto& [t2, v2] = knots_[i];
    return v1 + (t - t1) * (v2 - v1) / (t2 - t1);
  }

  // a * phi, for turning a base modulus into gamma-scaled instances.
  modulus scaled(double a) const {
    if (!(a > 0.0)) throw parameter_range_error("modulus: scale must be > 0");
    modulus m = *this;
    if (form_ == form::power) {
      m.c_ *= a;
    } else {
      for (auto& [t, v] : m.knots_) v *= a;
    }
    return m;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    if (form_ == form::power) {
      j["kind"] = "power";
      j["c"] = c_;
      j["q"] = q_;
    } else {
      j["kind"] = "table";
      auto arr = nlohmann::ordered_json::array();
      for (const auto& [t, v] : knots_) arr.push_back({t, v});
      j["knots"] = arr;
    }
    return j;
  }

  static modulus from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") return power(j.at("c").get<double>(), j.at("q").get<double>());
    if (kind == "table") {
      std::vector<std::pair<double, double>> knots;
      for (const auto& row : j.at("knots"))
        knots.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
      return table(std::move(knots));
    }
    throw parameter_range_error("modulus: unknown kind \"" + kind + "\"");
  }

 private:
  modulus() = default;
  form form_ = form::power;
  double c_ = 1.0, q_ = 2.0;
  std::vector<std::pair<double, double>> knots_;
};

}  // namespace proxlab
