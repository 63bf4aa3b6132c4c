#pragma once

// The descent cone in exponent space: the polyhedral cone spanned by the
// edges 2 delta_i - delta_j (i != j).  It has two equivalent descriptions:
//
//   edges:  x = sum of nonnegative multiples of 2 delta_i - delta_j,
//   faces:  for every subset I of coordinates,
//           delta_I*(x) = sum_i x_i + sum_{i in I} x_i >= 0.
//
// Membership is decided by the face inequalities; cone_certificate produces
// explicit edge weights (an exact rational phase-1 simplex with Bland's rule)
// or the violated face.  Everything here is exact.

#include <urnlab/linalg.hpp>
#include <urnlab/multi_index.hpp>
#include <urnlab/numeric.hpp>

#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace urnlab {

inline Vec<Rat> rat_point(const MultiIndex& a) {
  Vec<Rat> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = Rat(a[i]);
  return out;
}

// Value of the face functional for the coordinate subset given as a bitmask.
inline Rat face_value(const Vec<Rat>& x, unsigned subset) {
  Rat v(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    v += x[i];
    if (subset & (1u << i)) v += x[i];
  }
  return v;
}

// Face-side membership test; optionally reports a violated subset.
inline bool cone_contains(const Vec<Rat>& x, unsigned* violated = nullptr) {
  const int s = static_cast<int>(x.size());
  if (s > 24) throw std::invalid_argument("cone_contains: too many coordinates");
  for (unsigned subset = 0; subset < (1u << s); ++subset) {
    if (face_value(x, subset) < 0) {
      if (violated) *violated = subset;
      return false;
    }
  }
  return true;
}

inline bool cone_contains(const MultiIndex& a, unsigned* violated = nullptr) {
  return cone_contains(rat_point(a), violated);
}

struct ConeEdgeWeight {
  int i;  // 0-based: edge 2 delta_i - delta_j
  int j;
  Rat weight;  // > 0
};

struct ConeCertificate {
  bool inside = false;
  std::vector<ConeEdgeWeight> weights;  // edge combination when inside
  unsigned violated_face = 0;           // face subset when outside
};

// Edge-side decision: exact feasibility of x = E c, c >= 0 over the edge
// matrix E.  Independent of cone_contains, so the two sides can be checked
// against each other.
inline ConeCertificate cone_certificate(const Vec<Rat>& x) {
  const int s = static_cast<int>(x.size());
  ConeCertificate out;

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j)
      if (i != j) edges.push_back({i, j});
  const int n = static_cast<int>(edges.size());

  // phase-1 tableau: minimize the sum of artificial variables
  Mat<Rat> t(s, n + s + 1);
  std::vector<int> basis(s);
  for (int r = 0; r < s; ++r) {
    int sign = x[r] < 0 ? -1 : 1;
    for (int c = 0; c < n; ++c) {
      Rat e = edges[c].first == r ? Rat(2) : Rat(0);
      if (edges[c].second == r) e -= 1;
      t(r, c) = Rat(sign) * e;
    }
    t(r, n + r) = Rat(1);
    t(r, n + s) = Rat(sign) * x[r];
    basis[r] = n + r;
  }

  auto artificial = [&](int col) { return col >= n; };
  while (true) {
    int enter = -1;
    for (int c = 0; c < n + s && enter < 0; ++c) {
      bool basic = false;
      for (int r = 0; r < s; ++r) basic = basic || basis[r] == c;
      if (basic) continue;
      Rat reduced = artificial(c) ? Rat(1) : Rat(0);
      for (int r = 0; r < s; ++r)
        if (artificial(basis[r])) reduced -= t(r, c);
      if (reduced < 0) enter = c;  // Bland: first improving column
    }
    if (enter < 0) break;
    int leave = -1;
    Rat best_ratio(0);
    for (int r = 0; r < s; ++r) {
      if (!(t(r, enter) > 0)) continue;
      Rat ratio = t(r, n + s) / t(r, enter);
      if (leave < 0 || ratio < best_ratio ||
          (ratio == best_ratio && basis[r] < basis[leave])) {
        leave = r;
        best_ratio = ratio;
      }
    }
    if (leave < 0) throw std::logic_error("cone_certificate: unbounded phase-1 problem");
    Rat piv = t(leave, enter);
    for (int c = 0; c <= n + s; ++c) t(leave, c) = t(leave, c) / piv;
    for (int r = 0; r < s; ++r) {
      if (r == leave || t(r, enter) == 0) continue;
      Rat f = t(r, enter);
      for (int c = 0; c <= n + s; ++c) t(r, c) -= f * t(leave, c);
    }
    basis[leave] = enter;
  }

  Rat residual(0);
  for (int r = 0; r < s; ++r)
    if (artificial(basis[r])) residual += t(r, n + s);
  if (residual == 0) {
    out.inside = true;
    for (int r = 0; r < s; ++r)
      if (!artificial(basis[r]) && t(r, n + s) > 0)
        out.weights.push_back({edges[basis[r]].first, edges[basis[r]].second, t(r, n + s)});
  } else {
    out.inside = false;
    cone_contains(x, &out.violated_face);
  }
  return out;
}

inline ConeCertificate cone_certificate(const MultiIndex& a) {
  return cone_certificate(rat_point(a));
}

// Bundles the two descriptions of the cone in one fixed dimension: the
// spanning edges 2 delta_i - delta_j and the face functionals delta_I*,
// one per coordinate subset I (encoded as a bitmask).
struct ConeSigma {
  int s = 0;

  explicit ConeSigma(int dim) : s(dim) {
    if (dim < 1 || dim > 24) throw std::invalid_argument("ConeSigma: dimension out of range");
  }

  std::vector<MultiIndex> edges() const {
    std::vector<MultiIndex> out;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        if (i == j) continue;
        MultiIndex e(s, 0);
        e[i] = 2;
        e[j] = -1;
        out.push_back(std::move(e));
      }
    return out;
  }

  std::vector<unsigned> faces() const {
    std::vector<unsigned> out;
    for (unsigned mask = 0; mask < (1u << s); ++mask) out.push_back(mask);
    return out;
  }

  Rat face(const Vec<Rat>& x, unsigned subset) const { return face_value(x, subset); }
  bool contains(const Vec<Rat>& x, unsigned* violated = nullptr) const {
    return cone_contains(x, violated);
  }
  bool contains(const MultiIndex& a, unsigned* violated = nullptr) const {
    return cone_contains(a, violated);
  }
  ConeCertificate certificate(const Vec<Rat>& x) const { return cone_certificate(x); }
  ConeCertificate certificate(const MultiIndex& a) const { return cone_certificate(a); }
};

}  // namespace urnlab
