#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "splitsim/lattice.hpp"

namespace splitsim {

// Lattice Green function table: Delta g = -delta_0 with
// Delta f(x) = (1/2d) sum_{y~x} f(y) - f(x), solved by successive
// over-relaxation on a box with boundary values from the known asymptotics.
// For d = 2 the table is normalized to g(0) = 0 (so g(e1) = -1); for d = 3
// the origin value counts the walk's initial visit, and the expected number
// of returns is g(0) - 1.
struct GreenTable {
  int d = 2;
  int radius = 0;
  double tolerance = 0;
  double residual_max = 0;
  int iterations = 0;
  std::vector<double> values;

  int side() const { return 2 * radius + 1; }
  size_t index(const Site& s) const {
    size_t idx = 0;
    for (int i = 0; i < d; ++i)
      idx = idx * (size_t)side() + (size_t)(s[i] + radius);
    return idx;
  }
  bool in_box(const Site& s) const {
    for (int i = 0; i < d; ++i)
      if (s[i] < -radius || s[i] > radius) return false;
    return true;
  }
  bool interior(const Site& s) const {
    for (int i = 0; i < d; ++i)
      if (s[i] <= -radius || s[i] >= radius) return false;
    return true;
  }
  double at(const Site& s) const { return values[index(s)]; }

  // Expected number of returns to the origin (d >= 3 convention).
  double origin_returns() const { return at(Site::origin(d)) - 1.0; }

  double laplacian(const Site& s) const {
    double acc = 0;
    for (const Site& nb : neighbors(s)) acc += at(nb);
    return acc / (2.0 * d) - at(s);
  }
};

struct NonConvergence : std::runtime_error {
  explicit NonConvergence(const std::string& what) : std::runtime_error(what) {}
};

inline GreenTable compute_green(int d, int radius, double tol = 1e-8,
                                int max_iterations = 200000) {
  if (d != 2 && d != 3)
    throw std::invalid_argument("green table supports d = 2 and d = 3");
  if (radius < 10) throw std::invalid_argument("green table needs radius >= 10");
  GreenTable g;
  g.d = d;
  g.radius = radius;
  g.tolerance = tol;
  const size_t n = (size_t)g.side();
  const size_t total = d == 2 ? n * n : n * n * n;
  g.values.assign(total, 0.0);
  const long long R = radius;

  // Boundary values and initial guess from the continuum behavior:
  // -(2/pi) ln r for d = 2, (3/(2 pi)) / r for d = 3.
  {
    size_t idx = 0;
    if (d == 2) {
      for (long long x = -R; x <= R; ++x)
        for (long long y = -R; y <= R; ++y, ++idx) {
          double r2 = (double)(x * x + y * y);
          g.values[idx] = r2 == 0 ? 0.0 : -std::log(r2) / M_PI;
        }
    } else {
      for (long long x = -R; x <= R; ++x)
        for (long long y = -R; y <= R; ++y)
          for (long long z = -R; z <= R; ++z, ++idx) {
            double r2 = (double)(x * x + y * y + z * z);
            g.values[idx] = r2 == 0 ? 1.5 : 1.5 / (M_PI * std::sqrt(r2));
          }
    }
  }

  const size_t s1 = d == 2 ? n : n * n;  // stride of the first coordinate
  const size_t s2 = d == 2 ? 1 : n;
  const size_t s3 = 1;
  const size_t origin_idx = d == 2 ? (size_t)R * n + (size_t)R
                                   : ((size_t)R * n + (size_t)R) * n + (size_t)R;
  const double inv2d = 1.0 / (2.0 * d);
  double omega = 2.0 / (1.0 + std::sin(M_PI / (2.0 * radius + 2.0)));

  auto sweep = [&]() {
    double* v = g.values.data();
    if (d == 2) {
      for (size_t x = 1; x + 1 < n; ++x) {
        size_t row = x * s1;
        for (size_t y = 1; y + 1 < n; ++y) {
          size_t i = row + y;
          double target =
              (v[i - s1] + v[i + s1] + v[i - 1] + v[i + 1]) * inv2d;
          if (i == origin_idx) target += 1.0;
          v[i] += omega * (target - v[i]);
        }
      }
    } else {
      for (size_t x = 1; x + 1 < n; ++x)
        for (size_t y = 1; y + 1 < n; ++y) {
          size_t row = x * s1 + y * s2;
          for (size_t z = 1; z + 1 < n; ++z) {
            size_t i = row + z;
            double target = (v[i - s1] + v[i + s1] + v[i - s2] + v[i + s2] +
                             v[i - s3] + v[i + s3]) *
                            inv2d;
            if (i == origin_idx) target += 1.0;
            v[i] += omega * (target - v[i]);
          }
        }
    }
  };
  auto max_residual = [&]() {
    const double* v = g.values.data();
    double worst = 0;
    if (d == 2) {
      for (size_t x = 1; x + 1 < n; ++x)
        for (size_t y = 1; y + 1 < n; ++y) {
          size_t i = x * s1 + y;
          double lap =
              (v[i - s1] + v[i + s1] + v[i - 1] + v[i + 1]) * inv2d - v[i];
          double res = lap + (i == origin_idx ? 1.0 : 0.0);
          worst = std::max(worst, std::fabs(res));
        }
    } else {
      for (size_t x = 1; x + 1 < n; ++x)
        for (size_t y = 1; y + 1 < n; ++y)
          for (size_t z = 1; z + 1 < n; ++z) {
            size_t i = x * s1 + y * s2 + z;
            double lap = (v[i - s1] + v[i + s1] + v[i - s2] + v[i + s2] +
                          v[i - s3] + v[i + s3]) *
                             inv2d -
                         v[i];
            double res = lap + (i == origin_idx ? 1.0 : 0.0);
            worst = std::max(worst, std::fabs(res));
          }
    }
    return worst;
  };

  for (int it = 1; it <= max_iterations; ++it) {
    sweep();
    if (it % 8 == 0 || it == max_iterations) {
      g.residual_max = max_residual();
      g.iterations = it;
      if (g.residual_max <= tol) break;
    }
  }
  if (g.residual_max > tol)
    throw NonConvergence("residual " + std::to_string(g.residual_max) +
                         " above tolerance after " +
                         std::to_string(g.iterations) + " iterations");

  if (d == 2) {
    double shift = g.values[origin_idx];
    for (double& v : g.values) v -= shift;
  }
  return g;
}

// Monte Carlo oracle for the d = 3 return count: walks run until they either
// leave the ball of radius `escape_radius` (counting every intermediate
// return to the origin). The mean underestimates the true value by roughly
// 0.48 / escape_radius.
inline double expected_returns_mc(int d, uint64_t walks,
                                  long long escape_radius, uint64_t seed) {
  if (d != 3) throw std::invalid_argument("return-count oracle is for d = 3");
  std::mt19937_64 rng(seed);
  long long r2_cap = escape_radius * escape_radius;
  double total_returns = 0;
  for (uint64_t w = 0; w < walks; ++w) {
    long long x = 0, y = 0, z = 0;
    long long r2 = 0;
    while (r2 <= r2_cap) {
      switch (rng() % 6) {
        case 0: r2 += 2 * x + 1; ++x; break;
        case 1: r2 += -2 * x + 1; --x; break;
        case 2: r2 += 2 * y + 1; ++y; break;
        case 3: r2 += -2 * y + 1; --y; break;
        case 4: r2 += 2 * z + 1; ++z; break;
        default: r2 += -2 * z + 1; --z; break;
      }
      if (r2 == 0) total_returns += 1.0;
    }
  }
  return total_returns / (double)walks;
}

}  // namespace splitsim
