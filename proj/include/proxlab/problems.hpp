#pragma once

// Problem descriptors the resolvent constructors understand.
//
// convex_problem kinds:
//   squared_distance_sum  f(x) = 1/2 sum_i w_i d(x, a_i)^2     (any backend)
//   distance_to_point     f(x) = d(x, a)                        (any backend)
//   quadratic             f(x) = 1/2 x'Qx + c'x                 (euclidean)
//   l1                    f(x) = lambda |x|_1                   (euclidean)
//   ball_indicator        f = i_B(center, radius)               (euclidean)
//
// monotone_operator kinds (euclidean only):
//   linear            A x = M x with M + M' positive semidefinite
//   gradient          A = grad f for a smooth convex_problem
//   shifted_identity  A x = x - p*
//   rotation          A = [[0,-1],[1,0]] (maximally monotone, not a gradient)

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "proxlab/geometry.hpp"
#include "proxlab/linalg.hpp"
#include "proxlab/rng.hpp"
#include "proxlab/serialize.hpp"

namespace proxlab {

struct convex_problem {
  enum class kind {
    squared_distance_sum,
    distance_to_point,
    quadratic,
    l1,
    ball_indicator
  };

  kind k = kind::squared_distance_sum;
  std::vector<double> weights;  // squared_distance_sum
  std::vector<point> anchors;   // squared_distance_sum / distance_to_point / ball center
  std::vector<double> Q;        // quadratic, row-major dim x dim
  std::vector<double> lin;      // quadratic linear term
  double lambda = 1.0;          // l1
  double radius = 1.0;          // ball_indicator

  void validate(const space& X) const {
    switch (k) {
      case kind::squared_distance_sum: {
        if (weights.size() != anchors.size())
          throw parameter_range_error("problem: weights/anchors length mismatch");
        if (anchors.empty())
          throw parameter_range_error("problem: need at least one anchor");
        for (double w : weights)
          if (!(w > 0.0)) throw parameter_range_error("problem: weights must be > 0");
        for (const auto& a : anchors) X.check_point(a);
        return;
      }
      case kind::distance_to_point: {
        if (anchors.size() != 1)
          throw parameter_range_error("problem: distance_to_point needs exactly one anchor");
        X.check_point(anchors[0]);
        return;
      }
      case kind::quadratic: {
        require_euclidean(X, "quadratic");
        const auto n = static_cast<std::size_t>(X.dim());
        if (Q.size() != n * n || lin.size() != n)
          throw parameter_range_error("problem: quadratic size mismatch");
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(Q[i * n + j] - Q[j * n + i]) > 1e-12)
              throw parameter_range_error("problem: Q must be symmetric");
        if (linalg::min_eigenvalue_symmetric(Q, n) < -1e-10)
          throw parameter_range_error("problem: Q must be positive semidefinite");
        return;
      }
      case kind::l1: {
        require_euclidean(X, "l1");
        if (!(lambda >= 0.0)) throw parameter_range_error("problem: lambda must be >= 0");
        return;
      }
      case kind::ball_indicator: {
        require_euclidean(X, "ball_indicator");
        if (anchors.size() != 1)
          throw parameter_range_error("problem: ball_indicator needs a center anchor");
        if (!(radius > 0.0)) throw parameter_range_error("problem: radius must be > 0");
        return;
      }
    }
  }

  // f(x); the ball indicator returns 0 inside and +inf outside (as HUGE_VAL).
  double value(const space& X, const point& x) const {
    switch (k) {
      case kind::squared_distance_sum: {
        double s = 0.0;
        for (std::size_t i = 0; i < anchors.size(); ++i) {
          const double d = X.dist(x, anchors[i]);
          s += 0.5 * weights[i] * d * d;
        }
        return s;
      }
      case kind::distance_to_point:
        return X.dist(x, anchors[0]);
      case kind::quadratic: {
        const auto qx = linalg::matvec(Q, x.coords);
        double s = 0.0;
        for (std::size_t i = 0; i < x.coords.size(); ++i)
          s += 0.5 * x.coords[i] * qx[i] + lin[i] * x.coords[i];
        return s;
      }
      case kind::l1: {
        double s = 0.0;
        for (double c : x.coords) s += std::fabs(c);
        return lambda * s;
      }
      case kind::ball_indicator:
        return X.dist(x, anchors[0]) <= radius ? 0.0 : HUGE_VAL;
    }
    throw std::logic_error("unreachable");
  }

  static void require_euclidean(const space& X, const char* what) {
    if (X.kind() != backend_kind::euclidean)
      throw backend_mismatch(std::string("problem: ") + what +
                             " is only defined on the euclidean backend");
  }

  nlohmann::ordered_json to_json(const space& X) const {
    nlohmann::ordered_json j;
    switch (k) {
      case kind::squared_distance_sum: {
        j["kind"] = "squared_distance_sum";
        j["weights"] = weights;
        auto arr = nlohmann::ordered_json::array();
        for (const auto& a : anchors) arr.push_back(point_to_json(X, a));
        j["anchors"] = arr;
        break;
      }
      case kind::distance_to_point:
        j["kind"] = "distance_to_point";
        j["anchor"] = point_to_json(X, anchors[0]);
        break;
      case kind::quadratic:
        j["kind"] = "quadratic";
        j["Q"] = Q;
        j["c"] = lin;
        break;
      case kind::l1:
        j["kind"] = "l1";
        j["lambda"] = lambda;
        break;
      case kind::ball_indicator:
        j["kind"] = "ball_indicator";
        j["center"] = point_to_json(X, anchors[0]);
        j["radius"] = radius;
        break;
    }
    return j;
  }

  static convex_problem from_json(const space& X, const nlohmann::json& j) {
    convex_problem p;
    const std::string kind_s = j.at("kind").get<std::string>();
    if (kind_s == "squared_distance_sum") {
      p.k = kind::squared_distance_sum;
      p.weights = j.at("weights").get<std::vector<double>>();
      for (const auto& a : j.at("anchors")) p.anchors.push_back(point_from_json(X, a));
    } else if (kind_s == "distance_to_point") {
      p.k = kind::distance_to_point;
      p.anchors.push_back(point_from_json(X, j.at("anchor")));
    } else if (kind_s == "quadratic") {
      p.k = kind::quadratic;
      p.Q = j.at("Q").get<std::vector<double>>();
      p.lin = j.at("c").get<std::vector<double>>();
    } else if (kind_s == "l1") {
      p.k = kind::l1;
      p.lambda = j.at("lambda").get<double>();
    } else if (kind_s == "ball_indicator") {
      p.k = kind::ball_indicator;
      p.anchors.push_back(point_from_json(X, j.at("center")));
      p.radius = j.at("radius").get<double>();
    } else {
      throw config_error("problem: unknown kind \"" + kind_s + "\"");
    }
    p.validate(X);
    return p;
  }
};

struct monotone_operator {
  enum class kind { linear, gradient, shifted_identity, rotation };

  kind k = kind::shifted_identity;
  std::vector<double> M;  // linear
  std::shared_ptr<convex_problem> grad_of;
  point pstar;  // shifted_identity

  void validate(const space& X) const {
    if (X.kind() != backend_kind::euclidean)
      throw backend_mismatch("monotone operators are only defined on the euclidean backend");
    const auto n = static_cast<std::size_t>(X.dim());
    switch (k) {
      case kind::linear: {
        if (M.size() != n * n) throw parameter_range_error("operator: M size mismatch");
        // Monotonicity of x -> Mx is (M + M')/2 >= 0; checked by sampling
        // <x - y, Mx - My> on random pairs.
        rng g(0x5EED5EEDULL);
        for (int trial = 0; trial < 64; ++trial) {
          std::vector<double> d(n);
          for (auto& c : d) c = g.normal();
          const auto Md = linalg::matvec(M, d);
          double ip = 0.0;
          for (std::size_t i = 0; i < n; ++i) ip += d[i] * Md[i];
          if (ip < -1e-9)
            throw parameter_range_error("operator: linear map fails monotonicity sampling");
        }
        return;
      }
      case kind::gradient:
        if (!grad_of) throw parameter_range_error("operator: gradient needs a problem");
        if (grad_of->k != convex_problem::kind::squared_distance_sum &&
            grad_of->k != convex_problem::kind::quadratic)
          throw parameter_range_error("operator: gradient only supports smooth problems");
        grad_of->validate(X);
        return;
      case kind::shifted_identity:
        X.check_point(pstar);
        return;
      case kind::rotation:
        if (n != 2) throw parameter_range_error("operator: rotation is 2-dimensional");
        return;
    }
  }

  std::vector<double> apply(const space& X, const std::vector<double>& x) const {
    const std::size_t n = x.size();
    switch (k) {
      case kind::linear:
        return linalg::matvec(M, x);
      case kind::gradient: {
        if (grad_of->k == convex_problem::kind::quadratic) {
          auto y = linalg::matvec(grad_of->Q, x);
          for (std::size_t i = 0; i < n; ++i) y[i] += grad_of->lin[i];
          return y;
        }
        // squared_distance_sum: grad = sum_i w_i (x - a_i)
        std::vector<double> y(n, 0.0);
        for (std::size_t j = 0; j < grad_of->anchors.size(); ++j)
          for (std::size_t i = 0; i < n; ++i)
            y[i] += grad_of->weights[j] * (x[i] - grad_of->anchors[j].coords[i]);
        (void)X;
        return y;
      }
      case kind::shifted_identity: {
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - pstar.coords[i];
        return y;
      }
      case kind::rotation:
        return {-x[1], x[0]};
    }
    throw std::logic_error("unreachable");
  }

  nlohmann::ordered_json to_json(const space& X) const {
    nlohmann::ordered_json j;
    switch (k) {
      case kind::linear:
        j["kind"] = "linear";
        j["M"] = M;
        break;
      case kind::gradient:
        j["kind"] = "gradient";
        j["problem"] = grad_of->to_json(X);
        break;
      case kind::shifted_identity:
        j["kind"] = "shifted_identity";
        j["pstar"] = point_to_json(X, pstar);
        break;
      case kind::rotation:
        j["kind"] = "rotation";
        break;
    }
    return j;
  }

  static monotone_operator from_json(const space& X, const nlohmann::json& j) {
    monotone_operator op;
    const std::string kind_s = j.at("kind").get<std::string>();
    if (kind_s == "linear") {
      op.k = kind::linear;
      op.M = j.at("M").get<std::vector<double>>();
    } else if (kind_s == "gradient") {
      op.k = kind::gradient;
      op.grad_of = std::make_shared<convex_problem>(convex_problem::from_json(X, j.at("problem")));
    } else if (kind_s == "shifted_identity") {
      op.k = kind::shifted_identity;
      op.pstar = point_from_json(X, j.at("pstar"));
    } else if (kind_s == "rotation") {
      op.k = kind::rotation;
    } else {
      throw config_error("operator: unknown kind \"" + kind_s + "\"");
    }
    op.validate(X);
    return op;
  }
};

// Descriptors for plain nonexpansive maps T used by the T-resolvent
// construction; all evaluate in closed form (eps_eval = 0).
struct nonexpansive_map {
  enum class kind { identity, constant, rotation, ball_projection, toward, scale };

  kind k = kind::identity;
  point c;              // constant value / projection center / toward target
  double angle = 1.5707963267948966;  // rotation angle (radians)
  double radius = 1.0;  // ball_projection
  double lam = 0.5;     // toward weight / scale factor, in [0,1]

  void validate(const space& X) const {
    switch (k) {
      case kind::identity:
        return;
      case kind::constant:
      case kind::toward:
        X.check_point(c);
        if (k == kind::toward && !(lam >= 0.0 && lam <= 1.0))
          throw parameter_range_error("map: toward weight must lie in [0,1]");
        return;
      case kind::rotation:
        if (X.kind() != backend_kind::euclidean || X.dim() != 2)
          throw backend_mismatch("map: rotation needs euclidean(2)");
        return;
      case kind::ball_projection:
        if (X.kind() != backend_kind::euclidean)
          throw backend_mismatch("map: ball_projection needs the euclidean backend");
        X.check_point(c);
        if (!(radius > 0.0)) throw parameter_range_error("map: radius must be > 0");
        return;
      case kind::scale:
        if (X.kind() != backend_kind::euclidean)
          throw backend_mismatch("map: scale needs the euclidean backend");
        if (!(lam >= 0.0 && lam <= 1.0))
          throw parameter_range_error("map: scale factor must lie in [0,1]");
        return;
    }
  }

  point apply(const space& X, const point& x) const {
    switch (k) {
      case kind::identity:
        return x;
      case kind::constant:
        return c;
      case kind::rotation: {
        const double ca = std::cos(angle), sa = std::sin(angle);
        return point{{ca * x.coords[0] - sa * x.coords[1],
                      sa * x.coords[0] + ca * x.coords[1]},
                     0};
      }
      case kind::ball_projection: {
        const double d = X.dist(x, c);
        if (d <= radius) return x;
        return X.combine(c, x, radius / d);
      }
      case kind::toward:
        return X.combine(x, c, lam);
      case kind::scale: {
        point y = x;
        for (auto& v : y.coords) v *= lam;
        return y;
      }
    }
    throw std::logic_error("unreachable");
  }

  nlohmann::ordered_json to_json(const space& X) const {
    nlohmann::ordered_json j;
    switch (k) {
      case kind::identity: j["kind"] = "identity"; break;
      case kind::constant:
        j["kind"] = "constant";
        j["value"] = point_to_json(X, c);
        break;
      case kind::rotation:
        j["kind"] = "rotation";
        j["angle"] = angle;
        break;
      case kind::ball_projection:
        j["kind"] = "ball_projection";
        j["center"] = point_to_json(X, c);
        j["radius"] = radius;
        break;
      case kind::toward:
        j["kind"] = "toward";
        j["target"] = point_to_json(X, c);
        j["weight"] = lam;
        break;
      case kind::scale:
        j["kind"] = "scale";
        j["factor"] = lam;
        break;
    }
    return j;
  }

  static nonexpansive_map from_json(const space& X, const nlohmann::json& j) {
    nonexpansive_map m;
    const std::string kind_s = j.at("kind").get<std::string>();
    if (kind_s == "identity") {
      m.k = kind::identity;
    } else if (kind_s == "constant") {
      m.k = kind::constant;
      m.c = point_from_json(X, j.at("value"));
    } else if (kind_s == "rotation") {
      m.k = kind::rotation;
      m.angle = j.value("angle", 1.5707963267948966);
    } else if (kind_s == "ball_projection") {
      m.k = kind::ball_projection;
      m.c = point_from_json(X, j.at("center"));
      m.radius = j.at("radius").get<double>();
    } else if (kind_s == "toward") {
      m.k = kind::toward;
      m.c = point_from_json(X, j.at("target"));
      m.lam = j.value("weight", 0.5);
    } else if (kind_s == "scale") {
      m.k = kind::scale;
      m.lam = j.at("factor").get<double>();
    } else {
      throw config_error("map: unknown kind \"" + kind_s + "\"");
    }
    m.validate(X);
    return m;
  }
};

}  // namespace proxlab
