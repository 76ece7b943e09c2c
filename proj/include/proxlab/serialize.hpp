#pragma once

// JSON encodings shared by configs, reports and the CLI.
//   space: {"kind":"euclidean","dim":2} | {"kind":"hyperboloid","dim":2}
//        | {"kind":"spider","rays":3}  | {"kind":"linf-plane","dim":2}
//   point: plain array of coordinates; spider points are [ray, offset].

#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "proxlab/geometry.hpp"

namespace proxlab {

struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

inline nlohmann::ordered_json space_to_json(const space& X) {
  nlohmann::ordered_json j;
  j["kind"] = backend_name(X.kind());
  if (X.kind() == backend_kind::spider) j["rays"] = X.dim();
  else j["dim"] = X.dim();
  return j;
}

inline space space_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("space: expected an object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") return space::euclidean(j.at("dim").get<int>());
  if (kind == "hyperboloid") return space::hyperboloid(j.at("dim").get<int>());
  if (kind == "spider") return space::spider(j.at("rays").get<int>());
  if (kind == "linf-plane") return space::linf_plane();
  throw config_error("space: unknown kind \"" + kind + "\"");
}

inline nlohmann::ordered_json point_to_json(const space& X, const point& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  if (X.kind() == backend_kind::spider) {
    j.push_back(p.ray);
    j.push_back(p.coords[0]);
  } else {
    for (double c : p.coords) j.push_back(c);
  }
  return j;
}

inline point point_from_json(const space& X, const nlohmann::json& j) {
  if (!j.is_array()) throw config_error("point: expected a JSON array");
  point p;
  if (X.kind() == backend_kind::spider) {
    if (j.size() != 2) throw config_error("point: spider points are [ray, offset]");
    p.ray = j.at(0).get<int>();
    p.coords = {j.at(1).get<double>()};
    if (p.coords[0] == 0.0) p.ray = 0;  // canonical hub
  } else {
    p.coords = j.get<std::vector<double>>();
    if (X.kind() == backend_kind::hyperboloid) {
      // Accept either ambient n+1 coordinates or n spatial ones; x0 is
      // recomputed from the spatial part so the sheet constraint holds
      // exactly up to roundoff.
      const auto n = static_cast<std::size_t>(X.dim());
      if (p.coords.size() == n) {
        double s = 0.0;
        for (double c : p.coords) s += c * c;
        p.coords.insert(p.coords.begin(), std::sqrt(1.0 + s));
      } else if (p.coords.size() == n + 1) {
        double s = 0.0;
        for (std::size_t i = 1; i < p.coords.size(); ++i) s += p.coords[i] * p.coords[i];
        const double x0 = std::sqrt(1.0 + s);
        if (std::fabs(x0 - p.coords[0]) > 1e-6)
          throw config_error("point: hyperboloid coordinates are off the sheet");
        p.coords[0] = x0;
      }
    }
  }
  X.check_point(p);
  return p;
}

}  // namespace proxlab
