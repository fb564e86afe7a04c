#include "fastron/geometry.hpp"

#include <array>
#include <cmath>

#include "fastron/errors.hpp"

namespace fastron {

ConvexBody ConvexBody::box(const Vec3& center, const Vec3& half_extents, const Mat3& rotation) {
  ConvexBody body;
  body.kind = Kind::kBox;
  body.center = center;
  body.half_extents = half_extents;
  body.rotation = rotation;
  body.validate();
  return body;
}

ConvexBody ConvexBody::capsule(const Vec3& a, const Vec3& b, double radius) {
  ConvexBody body;
  body.kind = Kind::kCapsule;
  body.a = a;
  body.b = b;
  body.radius = radius;
  body.validate();
  return body;
}

void ConvexBody::validate() const {
  if (kind == Kind::kBox) {
    require(half_extents.minCoeff() > 0.0, "box half-extents must be positive");
  } else {
    require(radius > 0.0, "capsule radius must be positive");
  }
}

Vec3 ConvexBody::support(const Vec3& d) const {
  const Vec3 core = core_support(d);
  if (radius == 0.0) return core;
  const double n = d.norm();
  return n > 0.0 ? Vec3(core + (radius / n) * d) : core;
}

ConvexBody ConvexBody::transformed(const Pose& pose) const {
  ConvexBody out = *this;
  if (kind == Kind::kBox) {
    out.center = pose * center;
    out.rotation = pose.linear() * rotation;
  } else {
    out.a = pose * a;
    out.b = pose * b;
  }
  return out;
}

namespace {

// Simplex of Minkowski-difference points; closest-point routines reduce it
// to the vertices supporting the closest point to the origin.
struct Simplex {
  std::array<Vec3, 4> p;
  int n = 0;

  void set(std::initializer_list<Vec3> pts) {
    n = 0;
    for (const auto& v : pts) p[n++] = v;
  }
};

Vec3 closest_segment(Simplex& s) {
  const Vec3 a = s.p[0], b = s.p[1];
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? -a.dot(ab) / len2 : 0.0;
  if (t <= 0.0) {
    s.set({a});
    return a;
  }
  if (t >= 1.0) {
    s.set({b});
    return b;
  }
  return a + t * ab;
}

// Closest point of triangle (a, b, c) to the origin; writes the supporting
// vertices into `out`.
Vec3 closest_triangle(const Vec3& a, const Vec3& b, const Vec3& c, Simplex& out) {
  const Vec3 ab = b - a, ac = c - a;
  const double d1 = -ab.dot(a), d2 = -ac.dot(a);
  if (d1 <= 0.0 && d2 <= 0.0) {
    out.set({a});
    return a;
  }
  const double d3 = -ab.dot(b), d4 = -ac.dot(b);
  if (d3 >= 0.0 && d4 <= d3) {
    out.set({b});
    return b;
  }
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    out.set({a, b});
    return a + (d1 / (d1 - d3)) * ab;
  }
  const double d5 = -ab.dot(c), d6 = -ac.dot(c);
  if (d6 >= 0.0 && d5 <= d6) {
    out.set({c});
    return c;
  }
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    out.set({a, c});
    return a + (d2 / (d2 - d6)) * ac;
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    out.set({b, c});
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double sum = va + vb + vc;
  if (!(sum > 0.0)) {
    // Degenerate triangle: fall back to the best edge.
    Simplex e1, e2, e3;
    e1.set({a, b});
    e2.set({a, c});
    e3.set({b, c});
    Vec3 p1 = closest_segment(e1), p2 = closest_segment(e2), p3 = closest_segment(e3);
    if (p1.squaredNorm() <= p2.squaredNorm() && p1.squaredNorm() <= p3.squaredNorm()) {
      out = e1;
      return p1;
    }
    if (p2.squaredNorm() <= p3.squaredNorm()) {
      out = e2;
      return p2;
    }
    out = e3;
    return p3;
  }
  out.set({a, b, c});
  return a + (vb / sum) * ab + (vc / sum) * ac;
}

// Returns false when the origin lies inside the tetrahedron.
bool closest_tetrahedron(Simplex& s, Vec3& v) {
  const Vec3 a = s.p[0], b = s.p[1], c = s.p[2], d = s.p[3];
  const double volume = (b - a).dot((c - a).cross(d - a));
  const bool degenerate =
      std::abs(volume) <= 1e-14 * (b - a).norm() * (c - a).norm() * (d - a).norm();

  const std::array<std::array<Vec3, 4>, 4> faces = {{{a, b, c, d}, {a, c, d, b}, {a, d, b, c},
                                                     {b, d, c, a}}};
  bool any_outside = false;
  double best = INFINITY;
  Simplex best_s;
  for (const auto& f : faces) {
    const Vec3 n = (f[1] - f[0]).cross(f[2] - f[0]);
    const double side_origin = -n.dot(f[0]);
    const double side_opposite = n.dot(f[3] - f[0]);
    const bool outside = degenerate || side_origin * side_opposite < 0.0;
    if (!outside) continue;
    any_outside = true;
    Simplex cand;
    const Vec3 p = closest_triangle(f[0], f[1], f[2], cand);
    if (p.squaredNorm() < best) {
      best = p.squaredNorm();
      best_s = cand;
      v = p;
    }
  }
  if (!any_outside) return false;
  s = best_s;
  return true;
}

}  // namespace

GjkResult gjk_query(const ConvexBody& a, const ConvexBody& b, bool need_distance) {
  constexpr int kMaxIterations = 64;
  constexpr double kProgressTol = 1e-10;
  constexpr double kContactTol = 1e-12;

  GjkResult result;
  const double rsum = a.radius + b.radius;
  Vec3 v = a.centroid() - b.centroid();
  if (v.squaredNorm() == 0.0) v = Vec3::UnitX();

  Simplex s;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    result.iterations = iter + 1;
    const Vec3 w = a.core_support(-v) - b.core_support(v);
    const double vv = v.squaredNorm();
    const double vw = v.dot(w);

    // All of A-B lies in {x : x.v >= w.v}; a positive offset bounds the
    // distance from below.
    if (!need_distance && vw > 0.0 && vw * vw > rsum * rsum * vv) {
      result.intersect = false;
      return result;
    }
    if (s.n > 0 && vv - vw <= kProgressTol * vv) {
      const double dist = std::sqrt(vv);
      result.exact = true;
      result.separation = (dist <= kContactTol ? 0.0 : dist) - rsum;
      result.intersect = result.separation <= 0.0;
      return result;
    }

    s.p[s.n++] = w;
    bool inside = false;
    switch (s.n) {
      case 1: v = w; break;
      case 2: v = closest_segment(s); break;
      case 3: {
        Simplex out;
        v = closest_triangle(s.p[0], s.p[1], s.p[2], out);
        s = out;
        break;
      }
      default: inside = !closest_tetrahedron(s, v); break;
    }
    if (inside || v.squaredNorm() <= kContactTol * kContactTol) {
      result.exact = true;
      result.separation = -rsum;
      result.intersect = true;
      return result;
    }
    if (!need_distance && v.squaredNorm() <= rsum * rsum) {
      result.intersect = true;
      return result;
    }
  }
  result.intersect = true;
  return result;
}

}  // namespace fastron
