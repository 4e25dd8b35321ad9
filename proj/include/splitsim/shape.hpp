#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "splitsim/lattice.hpp"

namespace splitsim {

// Numbers of the form a + b*sqrt(k) for one fixed square-free k. Every edge
// normal of a built-in target polygon has squared length k times a rational
// square, so all offset-polygon geometry stays inside this field and the
// shape tests are exact.
struct QuadExt {
  Rational a;
  Rational b;
  long long k = 1;

  static QuadExt rational(Rational v, long long k) {
    return {std::move(v), Rational(0), k};
  }
  static QuadExt root(Rational coeff, long long k) {
    return {Rational(0), std::move(coeff), k};
  }

  QuadExt operator+(const QuadExt& o) const { return {a + o.a, b + o.b, k}; }
  QuadExt operator-(const QuadExt& o) const { return {a - o.a, b - o.b, k}; }
  QuadExt operator*(const Rational& s) const { return {a * s, b * s, k}; }
  QuadExt operator*(const QuadExt& o) const {
    return {a * o.a + b * o.b * Rational(k), a * o.b + b * o.a, k};
  }
  QuadExt operator/(const Rational& s) const { return {a / s, b / s, k}; }

  int sign() const {
    int sa = a.sign(), sb = b.sign();
    if (sb == 0) return sa;
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // a and b*sqrt(k) have opposite signs; compare magnitudes via squares.
    Rational lhs = a * a;
    Rational rhs = b * b * Rational(k);
    if (lhs == rhs) return 0;
    return lhs > rhs ? sa : sb;
  }
  bool operator<(const QuadExt& o) const { return (*this - o).sign() < 0; }
  bool operator<=(const QuadExt& o) const { return (*this - o).sign() <= 0; }
};

// Convex polygon in the plane given by vertices and matching half-planes
// a*x + b*y <= c, listed edge-by-edge. Built-ins are normalized so the
// largest vertex coordinate is 1, and every edge normal satisfies
// a^2 + b^2 = k * (rational square) for the polygon's single radical k.
struct Polygon {
  struct HalfPlane {
    Rational a, b, c;
    Rational norm_m;  // |(a, b)| = norm_m * sqrt(k)
  };
  std::string name;
  std::vector<std::pair<Rational, Rational>> vertices;
  std::vector<HalfPlane> edges;
  long long k = 1;

  bool contains(const Rational& x, const Rational& y) const {
    for (const auto& e : edges)
      if (e.a * x + e.b * y > e.c) return false;
    return true;
  }
};

namespace shape_detail {

inline void add_symmetric_edges(Polygon& p, long long a, long long b,
                                long long c) {
  // All eight sign/swap images of a*x + b*y <= c (duplicates removed).
  std::vector<std::pair<long long, long long>> normals = {
      {a, b}, {-a, b}, {a, -b}, {-a, -b}, {b, a}, {-b, a}, {b, -a}, {-b, -a}};
  for (auto [na, nb] : normals) {
    bool seen = false;
    for (const auto& e : p.edges)
      if (e.a == Rational(na) && e.b == Rational(nb)) seen = true;
    if (!seen) p.edges.push_back({Rational(na), Rational(nb), Rational(c),
                                  Rational(1)});
  }
}

}  // namespace shape_detail

// L1 ball of radius 1: |x| + |y| <= 1.
inline Polygon diamond_polygon() {
  Polygon p;
  p.name = "diamond";
  p.k = 2;
  p.vertices = {{Rational(1), Rational(0)},
                {Rational(0), Rational(1)},
                {Rational(-1), Rational(0)},
                {Rational(0), Rational(-1)}};
  shape_detail::add_symmetric_edges(p, 1, 1, 1);
  return p;
}

// Sup-norm ball of radius 1.
inline Polygon square_polygon() {
  Polygon p;
  p.name = "square";
  p.k = 1;
  p.vertices = {{Rational(1), Rational(1)},
                {Rational(-1), Rational(1)},
                {Rational(-1), Rational(-1)},
                {Rational(1), Rational(-1)}};
  shape_detail::add_symmetric_edges(p, 1, 0, 1);
  return p;
}

// Octagon with vertices (0, 1) and (5/6, 5/6) up to symmetry.
inline Polygon octagon_polygon() {
  Polygon p;
  p.name = "octagon";
  p.k = 26;
  Rational q(5, 6);
  p.vertices = {{Rational(1), Rational(0)},  {q, q},
                {Rational(0), Rational(1)},  {-q, q},
                {Rational(-1), Rational(0)}, {-q, -q},
                {Rational(0), Rational(-1)}, {q, -q}};
  shape_detail::add_symmetric_edges(p, 5, 1, 5);
  return p;
}

struct ShapeVerdict {
  bool inner_ok = true;
  bool outer_ok = true;
  // Squared distances, exact. Outer: worst distance of a scaled-cube corner
  // beyond the polygon boundary. Inner: worst depth inside the polygon of an
  // uncovered scaled-cube center.
  Rational worst_outer_excess_sq;
  Rational worst_inner_gap_sq;
  std::optional<Site> first_outer_violation;
  std::optional<Site> first_inner_violation;
};

// Does the scaled toppled set sandwich the polygon to within epsilon?
//
// Outer: every corner of every scaled cube f*(x + C) must satisfy each edge
// constraint relaxed by epsilon (half-plane offsets; exact via squaring).
// Inner: every lattice site whose scaled cube meets the inner offset region
// S_eps must belong to T, tested by clipping S_eps (whose vertices live in
// Q[sqrt(k)]) against the cube.
inline ShapeVerdict shape_check(const Region& toppled, const Rational& scale,
                                const Polygon& poly, const Rational& eps) {
  ShapeVerdict verdict;
  const Rational half(1, 2);
  const Rational eps_sq = eps * eps;

  // ---- outer containment ----
  for (const Site& s : toppled) {
    Rational x((long long)s[0]), y((long long)s[1]);
    for (const auto& e : poly.edges) {
      // Corner maximizing a*cx + b*cy.
      Rational cx = x + (e.a >= Rational(0) ? half : -half);
      Rational cy = y + (e.b >= Rational(0) ? half : -half);
      Rational lhs = scale * (e.a * cx + e.b * cy);
      if (lhs <= e.c) continue;
      Rational over = lhs - e.c;
      Rational dist_sq = over * over / (e.a * e.a + e.b * e.b);
      if (dist_sq > verdict.worst_outer_excess_sq) {
        verdict.worst_outer_excess_sq = dist_sq;
        if (dist_sq > eps_sq && !verdict.first_outer_violation)
          verdict.first_outer_violation = s;
      }
    }
  }
  if (verdict.worst_outer_excess_sq > eps_sq) verdict.outer_ok = false;

  // ---- inner coverage ----
  // Vertices of S_eps: each edge moves inward by eps, i.e. its bound becomes
  // c - eps * norm_m * sqrt(k); adjacent offset edges intersect in Q[sqrt(k)].
  long long k = poly.k;
  auto bound = [&](const Polygon::HalfPlane& e) {
    return QuadExt{e.c, -eps * e.norm_m, k};
  };
  size_t m = poly.edges.size();
  std::vector<std::array<QuadExt, 2>> inner_vertices;
  bool empty_inner = false;
  // Pair edges by adjacency: vertices are ordered, edge i runs from vertex i
  // to vertex i+1; but edges were assembled by symmetry, so recover adjacency
  // by intersecting every pair and keeping points feasible for all edges.
  for (size_t i = 0; i < m && !empty_inner; ++i)
    for (size_t j = i + 1; j < m; ++j) {
      const auto& ei = poly.edges[i];
      const auto& ej = poly.edges[j];
      Rational det = ei.a * ej.b - ej.a * ei.b;
      if (det.is_zero()) continue;
      QuadExt bi = bound(ei), bj = bound(ej);
      QuadExt vx = (bi * ej.b - bj * ei.b) / det;
      QuadExt vy = (bj * ei.a - bi * ej.a) / det;
      bool feasible = true;
      for (size_t l = 0; l < m && feasible; ++l) {
        const auto& el = poly.edges[l];
        QuadExt lhs = vx * el.a + vy * el.b;
        if ((bound(el) - lhs).sign() < 0) feasible = false;
      }
      if (feasible) inner_vertices.push_back({vx, vy});
    }
  if (inner_vertices.empty()) empty_inner = true;  // eps swallowed the shape

  if (!empty_inner) {
    // Order the offset-polygon vertices by angle once; they surround the
    // origin, and double precision is plenty for ordering well-separated
    // vertices (the geometry below stays exact).
    auto approx = [&](const QuadExt& v) {
      return v.a.to_double() + v.b.to_double() * std::sqrt((double)k);
    };
    std::sort(inner_vertices.begin(), inner_vertices.end(),
              [&](const auto& p, const auto& q) {
                return std::atan2(approx(p[1]), approx(p[0])) <
                       std::atan2(approx(q[1]), approx(q[0]));
              });

    long long reach = (Rational(1) / scale).floor().convert_to<long long>() + 2;
    for (long long sy = -reach; sy <= reach; ++sy)
      for (long long sx = -reach; sx <= reach; ++sx) {
        Site s = Site::of({(int32_t)sx, (int32_t)sy});
        if (toppled.count(s)) continue;
        Rational x((long long)sx), y((long long)sy);
        // Cheap exact prefilter: a cube that misses the base polygon cannot
        // meet the inner offset region.
        bool outside = false;
        for (const auto& e : poly.edges) {
          Rational cx = x + (e.a >= Rational(0) ? -half : half);
          Rational cy = y + (e.b >= Rational(0) ? -half : half);
          if (scale * (e.a * cx + e.b * cy) > e.c) {
            outside = true;
            break;
          }
        }
        if (outside) continue;

        // Clip S_eps against the scaled cube; nonempty result = violation.
        std::vector<std::array<QuadExt, 2>> clip = inner_vertices;
        auto clip_half = [&](int axis, const Rational& limit, int dir) {
          std::vector<std::array<QuadExt, 2>> out;
          size_t n = clip.size();
          QuadExt lim = QuadExt::rational(limit, k);
          for (size_t i = 0; i < n; ++i) {
            const auto& p = clip[i];
            const auto& q = clip[(i + 1) % n];
            QuadExt pv = p[axis] - lim, qv = q[axis] - lim;
            int ps = dir * pv.sign(), qs = dir * qv.sign();
            if (ps <= 0) out.push_back(p);
            if ((ps < 0 && qs > 0) || (ps > 0 && qs < 0)) {
              // Crossing point p + (q - p) * t with t = pv / (pv - qv);
              // invert pv - qv by its conjugate to stay in the field.
              QuadExt denom = pv - qv;
              Rational norm =
                  denom.a * denom.a - Rational(k) * denom.b * denom.b;
              QuadExt inv{denom.a / norm, -denom.b / norm, k};
              QuadExt t = pv * inv;
              out.push_back(
                  {p[0] + (q[0] - p[0]) * t, p[1] + (q[1] - p[1]) * t});
            }
          }
          clip = std::move(out);
        };
        clip_half(0, scale * (x - half), -1);
        if (!clip.empty()) clip_half(0, scale * (x + half), +1);
        if (!clip.empty()) clip_half(1, scale * (y - half), -1);
        if (!clip.empty()) clip_half(1, scale * (y + half), +1);
        if (clip.empty()) continue;

        verdict.inner_ok = false;
        if (!verdict.first_inner_violation) verdict.first_inner_violation = s;
        // Depth of the scaled cube center inside the base polygon.
        Rational cx = scale * x, cy = scale * y;
        std::optional<Rational> depth_sq;
        bool inside = true;
        for (const auto& e : poly.edges) {
          Rational slack = e.c - (e.a * cx + e.b * cy);
          if (slack < Rational(0)) {
            inside = false;
            break;
          }
          Rational dsq = slack * slack / (e.a * e.a + e.b * e.b);
          if (!depth_sq || dsq < *depth_sq) depth_sq = dsq;
        }
        if (inside && depth_sq && *depth_sq > verdict.worst_inner_gap_sq)
          verdict.worst_inner_gap_sq = *depth_sq;
      }
  }
  return verdict;
}

}  // namespace splitsim
