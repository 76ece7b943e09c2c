#pragma once

// Geodesic space backends and the primitive operations everything else is
// built from: dist, combine (geodesic convex combination) and the
// quasi-linearization form.
//
// Point encoding per backend:
//   euclidean(n)    coords = n cartesian coordinates
//   hyperboloid(n)  coords = n+1 ambient coordinates on the sheet
//                   -x0^2 + x1^2 + ... + xn^2 = -1, x0 >= 1
//   spider(k)       ray in {0..k-1}, coords = {offset >= 0}; offset 0 is
//                   canonicalized to ray 0 (the hub)
//   linf_plane      coords = 2 cartesian coordinates, max-metric; geodesics
//                   are coordinatewise segments.  Deliberately not CAT(0);
//                   kept as a negative control for the validators.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "proxlab/rng.hpp"

namespace proxlab {

struct backend_mismatch : std::runtime_error {
  explicit backend_mismatch(const std::string& what) : std::runtime_error(what) {}
};

struct parameter_range_error : std::invalid_argument {
  explicit parameter_range_error(const std::string& what) : std::invalid_argument(what) {}
};

enum class backend_kind { euclidean, hyperboloid, spider, linf_plane };

inline const char* backend_name(backend_kind k) {
  switch (k) {
    case backend_kind::euclidean: return "euclidean";
    case backend_kind::hyperboloid: return "hyperboloid";
    case backend_kind::spider: return "spider";
    case backend_kind::linf_plane: return "linf-plane";
  }
  return "?";
}

struct point {
  std::vector<double> coords;
  int ray = 0;  // spider only; 0 otherwise

  bool operator==(const point& o) const { return ray == o.ray && coords == o.coords; }
};

// Closed ball used for sampling and for the uniform checks.
struct region {
  point center;
  double radius = 1.0;
};

namespace detail {

// Minkowski bilinear form on ambient R^{n+1}.
inline double minkowski(const std::vector<double>& a, const std::vector<double>& b) {
  double s = -a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

class space {
 public:
  static space euclidean(int n) {
    require(n >= 1, "euclidean dimension must be >= 1");
    return space(backend_kind::euclidean, n);
  }
  static space hyperboloid(int n) {
    require(n >= 1, "hyperboloid dimension must be >= 1");
    return space(backend_kind::hyperboloid, n);
  }
  static space spider(int rays) {
    require(rays >= 3, "spider needs at least 3 rays");
    return space(backend_kind::spider, rays);
  }
  static space linf_plane() { return space(backend_kind::linf_plane, 2); }

  backend_kind kind() const { return kind_; }
  // euclidean/hyperboloid: dimension; spider: ray count; linf: 2.
  int dim() const { return dim_; }

  point origin() const {
    switch (kind_) {
      case backend_kind::euclidean:
      case backend_kind::linf_plane:
        return point{std::vector<double>(static_cast<std::size_t>(dim_), 0.0), 0};
      case backend_kind::hyperboloid: {
        std::vector<double> c(static_cast<std::size_t>(dim_) + 1, 0.0);
        c[0] = 1.0;
        return point{c, 0};
      }
      case backend_kind::spider:
        return point{{0.0}, 0};
    }
    throw std::logic_error("unreachable");
  }

  // Membership check; throws backend_mismatch with a reason when the point
  // does not encode an element of this space.
  void check_point(const point& p) const {
    switch (kind_) {
      case backend_kind::euclidean:
      case backend_kind::linf_plane:
        if (p.coords.size() != static_cast<std::size_t>(dim_))
          throw backend_mismatch(std::string(backend_name(kind_)) + ": expected " +
                                 std::to_string(dim_) + " coordinates, got " +
                                 std::to_string(p.coords.size()));
        return;
      case backend_kind::hyperboloid: {
        if (p.coords.size() != static_cast<std::size_t>(dim_) + 1)
          throw backend_mismatch("hyperboloid: expected " + std::to_string(dim_ + 1) +
                                 " ambient coordinates, got " + std::to_string(p.coords.size()));
        if (!(p.coords[0] >= 1.0 - 1e-9))
          throw backend_mismatch("hyperboloid: x0 must be >= 1");
        const double q = detail::minkowski(p.coords, p.coords);
        if (std::fabs(q + 1.0) > 1e-6)
          throw backend_mismatch("hyperboloid: point is off the sheet, <x,x> = " +
                                 std::to_string(q));
        return;
      }
      case backend_kind::spider: {
        if (p.coords.size() != 1)
          throw backend_mismatch("spider: expected one offset coordinate");
        if (p.ray < 0 || p.ray >= dim_)
          throw backend_mismatch("spider: ray index " + std::to_string(p.ray) +
                                 " out of range [0," + std::to_string(dim_) + ")");
        if (!(p.coords[0] >= 0.0))
          throw backend_mismatch("spider: offset must be >= 0");
        if (p.coords[0] == 0.0 && p.ray != 0)
          throw backend_mismatch("spider: hub must be canonicalized to ray 0");
        return;
      }
    }
  }

  double dist(const point& a, const point& b) const {
    check_point(a);
    check_point(b);
    switch (kind_) {
      case backend_kind::euclidean: {
        double s = 0.0;
        for (std::size_t i = 0; i < a.coords.size(); ++i) {
          const double d = a.coords[i] - b.coords[i];
          s += d * d;
        }
        return std::sqrt(s);
      }
      case backend_kind::hyperboloid: {
        // d = arcosh(-<a,b>).  Computed as 2*asinh(sqrt(q)/2) with
        // q = <a-b, a-b>_L = -2 - 2<a,b>_L >= 0, which is accurate for
        // nearby points where the arcosh form cancels catastrophically.
        double q = 0.0;
        {
          double s = -(a.coords[0] - b.coords[0]) * (a.coords[0] - b.coords[0]);
          for (std::size_t i = 1; i < a.coords.size(); ++i) {
            const double d = a.coords[i] - b.coords[i];
            s += d * d;
          }
          q = s;
        }
        if (q < 0.0) q = 0.0;
        return 2.0 * std::asinh(0.5 * std::sqrt(q));
      }
      case backend_kind::spider: {
        const bool hub_a = a.coords[0] == 0.0;
        const bool hub_b = b.coords[0] == 0.0;
        if (hub_a || hub_b || a.ray == b.ray) {
          return std::fabs(a.coords[0] - b.coords[0]);
        }
        return a.coords[0] + b.coords[0];
      }
      case backend_kind::linf_plane: {
        double m = 0.0;
        for (std::size_t i = 0; i < a.coords.size(); ++i)
          m = std::max(m, std::fabs(a.coords[i] - b.coords[i]));
        return m;
      }
    }
    throw std::logic_error("unreachable");
  }

  // Geodesic convex combination (1-t) a + t b.  t in [0,1].  Endpoints are
  // returned exactly.  For linf_plane the chosen geodesic is the
  // coordinatewise segment (one of many geodesics of the max metric).
  point combine(const point& a, const point& b, double t) const {
    if (!(t >= 0.0 && t <= 1.0))
      throw parameter_range_error("combine: t must lie in [0,1], got " + std::to_string(t));
    check_point(a);
    check_point(b);
    if (t == 0.0) return a;
    if (t == 1.0) return b;
    switch (kind_) {
      case backend_kind::euclidean:
      case backend_kind::linf_plane: {
        point r = a;
        for (std::size_t i = 0; i < r.coords.size(); ++i)
          r.coords[i] = (1.0 - t) * a.coords[i] + t * b.coords[i];
        return r;
      }
      case backend_kind::hyperboloid: {
        const double d = dist(a, b);
        if (d < 1e-15) return a;
        // Unit tangent u at a toward b, then exp_a(t d u); renormalized back
        // onto the sheet by recomputing x0 from the spatial part.
        const double ch = std::cosh(d), sh = std::sinh(d);
        point r = a;
        const double cht = std::cosh(t * d), sht = std::sinh(t * d);
        for (std::size_t i = 0; i < r.coords.size(); ++i) {
          const double u = (b.coords[i] - ch * a.coords[i]) / sh;
          r.coords[i] = cht * a.coords[i] + sht * u;
        }
        double s = 0.0;
        for (std::size_t i = 1; i < r.coords.size(); ++i) s += r.coords[i] * r.coords[i];
        r.coords[0] = std::sqrt(1.0 + s);
        return r;
      }
      case backend_kind::spider: {
        const bool hub_a = a.coords[0] == 0.0;
        const bool hub_b = b.coords[0] == 0.0;
        if (hub_a && hub_b) return origin();
        if (hub_a || hub_b || a.ray == b.ray) {
          const int ray = hub_a ? b.ray : a.ray;
          const double off = (1.0 - t) * a.coords[0] + t * b.coords[0];
          if (off <= 0.0) return origin();
          return point{{off}, ray};
        }
        // Distinct rays: walk t*(s+u) from a through the hub.
        const double s = a.coords[0], u = b.coords[0];
        const double walked = t * (s + u);
        if (walked < s) return point{{s - walked}, a.ray};
        if (walked > s) return point{{walked - s}, b.ray};
        return origin();
      }
    }
    throw std::logic_error("unreachable");
  }

  // Quasi-linearization <ab, uv> = (d(a,v)^2 + d(b,u)^2 - d(a,u)^2 - d(b,v)^2)/2.
  double quasilin(const point& a, const point& b, const point& u, const point& v) const {
    const double dav = dist(a, v), dbu = dist(b, u), dau = dist(a, u), dbv = dist(b, v);
    return 0.5 * (dav * dav + dbu * dbu - dau * dau - dbv * dbv);
  }

  // Uniform sample from the closed ball `reg`.  Each backend draws by its
  // own natural measure; determinism follows from the caller-provided rng.
  point sample(const region& reg, rng& g) const {
    check_point(reg.center);
    if (!(reg.radius > 0.0)) throw parameter_range_error("sample: radius must be > 0");
    switch (kind_) {
      case backend_kind::euclidean:
      case backend_kind::linf_plane: {
        // Direction from a normal draw, radius by the ball volume law.
        const std::size_t n = reg.center.coords.size();
        std::vector<double> dir(n);
        double norm2 = 0.0;
        for (auto& x : dir) {
          x = g.normal();
          norm2 += x * x;
        }
        const double norm = std::sqrt(norm2);
        const double r = reg.radius * std::pow(g.uniform01(), 1.0 / static_cast<double>(n));
        point p = reg.center;
        if (norm > 0.0)
          for (std::size_t i = 0; i < n; ++i) p.coords[i] += r * dir[i] / norm;
        return p;
      }
      case backend_kind::hyperboloid: {
        // Exponential map at the center: pick a tangent direction from a
        // normal draw, a geodesic radius r <= reg.radius, and return
        // cosh(r) p + sinh(r) u with u a unit tangent at p.
        const int n = dim_;
        const point& p = reg.center;
        std::vector<double> v(p.coords.size(), 0.0);
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i) + 1] = g.normal();
        const double r = reg.radius * std::pow(g.uniform01(), 1.0 / static_cast<double>(n));
        // Project v onto the tangent space at p: v += <p,v>_L p.
        const double a = detail::minkowski(p.coords, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += a * p.coords[i];
        const double vn = std::sqrt(std::max(0.0, detail::minkowski(v, v)));
        if (vn < 1e-300 || r == 0.0) return p;
        point out = p;
        const double ch = std::cosh(r), sh = std::sinh(r);
        for (std::size_t i = 0; i < out.coords.size(); ++i)
          out.coords[i] = ch * p.coords[i] + sh * v[i] / vn;
        double s = 0.0;
        for (std::size_t i = 1; i < out.coords.size(); ++i) s += out.coords[i] * out.coords[i];
        out.coords[0] = std::sqrt(1.0 + s);
        return out;
      }
      case backend_kind::spider: {
        // Exact uniform draw from the ball by 1-d length measure across the
        // segments the ball meets.
        const double c_off = reg.center.coords[0];
        const int c_ray = reg.center.coords[0] == 0.0 ? -1 : reg.center.ray;
        const double R = reg.radius;
        const int k = dim_;
        // Segment lengths: along the center ray up to c_off+R; each other ray
        // gets max(0, R - c_off) past the hub.
        std::vector<double> len(static_cast<std::size_t>(k), 0.0);
        if (c_ray < 0) {
          for (auto& L : len) L = R;
        } else {
          len[static_cast<std::size_t>(c_ray)] = std::min(c_off, R) + R;  // both directions on own ray
          const double spill = R - c_off;
          if (spill > 0.0)
            for (int rr = 0; rr < k; ++rr)
              if (rr != c_ray) len[static_cast<std::size_t>(rr)] = spill;
        }
        double total = 0.0;
        for (double L : len) total += L;
        double pick = g.uniform01() * total;
        for (int rr = 0; rr < k; ++rr) {
          if (pick <= len[static_cast<std::size_t>(rr)] || rr == k - 1) {
            double off;
            if (c_ray == rr) {
              // Segment [max(0,c_off-R), c_off+R] on the center ray.
              const double lo = std::max(0.0, c_off - R);
              off = lo + pick;
            } else {
              off = pick;
            }
            if (off <= 0.0) return origin();
            return point{{off}, rr};
          }
          pick -= len[static_cast<std::size_t>(rr)];
        }
        return origin();
      }
    }
    throw std::logic_error("unreachable");
  }

 private:
  space(backend_kind k, int d) : kind_(k), dim_(d) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw parameter_range_error(msg);
  }

  backend_kind kind_;
  int dim_;
};

}  // namespace proxlab
