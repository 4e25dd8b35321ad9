#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "splitsim/affine.hpp"

namespace splitsim {

// Lattice dimension is a runtime value; 4 covers every workload here while
// keeping sites flat and hashable without allocation.
inline constexpr int kMaxDim = 4;

struct Site {
  int8_t d = 0;
  std::array<int32_t, kMaxDim> c{};

  static Site origin(int dim) {
    Site s;
    s.d = static_cast<int8_t>(dim);
    return s;
  }
  static Site of(std::initializer_list<int32_t> coords) {
    Site s;
    s.d = static_cast<int8_t>(coords.size());
    int i = 0;
    for (int32_t v : coords) s.c[i++] = v;
    return s;
  }

  int dim() const { return d; }
  int32_t operator[](int i) const { return c[i]; }
  int32_t& operator[](int i) { return c[i]; }

  long long coord_sum() const {
    long long s = 0;
    for (int i = 0; i < d; ++i) s += c[i];
    return s;
  }
  long long l1_norm() const {
    long long s = 0;
    for (int i = 0; i < d; ++i) s += c[i] < 0 ? -(long long)c[i] : c[i];
    return s;
  }
  long long linf_norm() const {
    long long m = 0;
    for (int i = 0; i < d; ++i) {
      long long a = c[i] < 0 ? -(long long)c[i] : c[i];
      m = std::max(m, a);
    }
    return m;
  }
  long long euclid_sq() const {
    long long s = 0;
    for (int i = 0; i < d; ++i) s += (long long)c[i] * c[i];
    return s;
  }

  Site offset(int axis, int32_t delta) const {
    Site s = *this;
    s.c[axis] += delta;
    return s;
  }

  bool operator==(const Site& o) const { return d == o.d && c == o.c; }
  bool operator!=(const Site& o) const { return !(*this == o); }
  // Lexicographic; in one dimension this is the usual numeric order.
  bool operator<(const Site& o) const {
    for (int i = 0; i < d; ++i)
      if (c[i] != o.c[i]) return c[i] < o.c[i];
    return false;
  }
};

struct SiteHash {
  size_t operator()(const Site& s) const {
    uint64_t h = 0x9e3779b97f4a7c15ull ^ (uint64_t)s.d;
    for (int i = 0; i < s.d; ++i) {
      h ^= (uint64_t)(uint32_t)s.c[i] + 0x9e3779b97f4a7c15ull + (h << 6) +
           (h >> 2);
    }
    return (size_t)h;
  }
};

using Region = std::unordered_set<Site, SiteHash>;
template <class V>
using SiteMap = std::unordered_map<Site, V, SiteHash>;

inline std::vector<Site> sorted_sites(const Region& r) {
  std::vector<Site> v(r.begin(), r.end());
  std::sort(v.begin(), v.end());
  return v;
}

// The 2d nearest neighbors in a fixed deterministic order: axis 0 minus,
// axis 0 plus, axis 1 minus, ... Single-site splitting orders and renders
// rely on this ordering being stable.
struct NeighborList {
  std::array<Site, 2 * kMaxDim> sites;
  int count = 0;
  const Site* begin() const { return sites.data(); }
  const Site* end() const { return sites.data() + count; }
};

inline NeighborList neighbors(const Site& x) {
  NeighborList out;
  for (int i = 0; i < x.d; ++i) {
    out.sites[out.count++] = x.offset(i, -1);
    out.sites[out.count++] = x.offset(i, +1);
  }
  return out;
}

// Sites not in X that have at least one neighbor in X.
inline Region outer_boundary(const Region& x) {
  Region out;
  for (const Site& s : x)
    for (const Site& nb : neighbors(s))
      if (!x.count(nb)) out.insert(nb);
  return out;
}

namespace detail {
inline void enumerate_diamond(int d, int axis, long long budget, Site& cur,
                              Region& out) {
  if (axis == d) {
    out.insert(cur);
    return;
  }
  for (long long v = -budget; v <= budget; ++v) {
    cur.c[axis] = (int32_t)v;
    enumerate_diamond(d, axis + 1, budget - (v < 0 ? -v : v), cur, out);
  }
  cur.c[axis] = 0;
}
}  // namespace detail

// L1 ball: all sites with |x_1| + ... + |x_d| <= r.
inline Region diamond_region(int d, long long r) {
  if (r < 0) throw std::invalid_argument("diamond radius must be >= 0");
  Region out;
  Site cur = Site::origin(d);
  detail::enumerate_diamond(d, 0, r, cur, out);
  return out;
}

// Axis-aligned cube of radius k around center: (2k+1)^d sites.
inline Region cube_region(const Site& center, long long k) {
  if (k < 0) throw std::invalid_argument("cube radius must be >= 0");
  Region out;
  Site cur = center;
  std::function<void(int)> rec = [&](int axis) {
    if (axis == center.d) {
      out.insert(cur);
      return;
    }
    for (long long v = -k; v <= k; ++v) {
      cur.c[axis] = (int32_t)(center.c[axis] + v);
      rec(axis + 1);
    }
  };
  rec(0);
  return out;
}

inline int parity(const Site& x) { return (int)(((x.coord_sum() % 2) + 2) % 2); }

// Diagonal front sets: stage 0 is the single site (k,...,k); stage i holds
// the sites on the layer with coordinate sum dk+i having at least i nearest
// neighbors in stage i-1. Stage d is the next diagonal site (k+1,...,k+1).
inline Region diagonal_front(int d, int k, int stage) {
  if (k < 0 || stage < 0 || stage > d)
    throw std::invalid_argument("diagonal_front: need k >= 0, 0 <= stage <= d");
  Site dk = Site::origin(d);
  for (int i = 0; i < d; ++i) dk.c[i] = k;
  Region cur{dk};
  for (int i = 1; i <= stage; ++i) {
    long long layer = (long long)d * k + i;
    SiteMap<int> votes;
    for (const Site& s : cur)
      for (const Site& nb : neighbors(s))
        if (nb.coord_sum() == layer) ++votes[nb];
    Region next;
    for (const auto& [site, n] : votes)
      if (n >= i) next.insert(site);
    cur = std::move(next);
  }
  return cur;
}

// Finite map from sites to masses over a uniform background value. Sites
// holding exactly the background are never stored.
class SparseConfiguration {
 public:
  SparseConfiguration() = default;
  SparseConfiguration(int d, AffineMass background)
      : d_(d), background_(std::move(background)) {}

  int dim() const { return d_; }
  const AffineMass& background() const { return background_; }
  const SiteMap<AffineMass>& cells() const { return cells_; }
  size_t explicit_count() const { return cells_.size(); }

  const AffineMass& at(const Site& x) const {
    auto it = cells_.find(x);
    return it == cells_.end() ? background_ : it->second;
  }
  bool is_explicit(const Site& x) const { return cells_.count(x) > 0; }

  void set(const Site& x, AffineMass m) {
    if (m == background_)
      cells_.erase(x);
    else
      cells_[x] = std::move(m);
  }
  void add(const Site& x, const AffineMass& delta) {
    auto it = cells_.find(x);
    if (it == cells_.end()) {
      AffineMass v = background_ + delta;
      if (v != background_) cells_.emplace(x, std::move(v));
    } else {
      it->second += delta;
      if (it->second == background_) cells_.erase(it);
    }
  }

  AffineMass total_over(const Region& region) const {
    AffineMass sum;
    for (const Site& x : region) sum += at(x);
    return sum;
  }

  bool operator==(const SparseConfiguration& o) const {
    return d_ == o.d_ && background_ == o.background_ && cells_ == o.cells_;
  }

 private:
  int d_ = 1;
  AffineMass background_;
  SiteMap<AffineMass> cells_;
};

}  // namespace splitsim
