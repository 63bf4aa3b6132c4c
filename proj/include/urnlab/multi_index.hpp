#pragma once

// Multi-indices (exponent vectors of monomials in the eigencoordinates) and
// the canonical total order used everywhere: ascending total degree, ties
// broken colexicographically.  Under this order the basis of monomials of
// bounded degree is triangular for the drift operator: shifting one unit of
// exponent from a chain position to its predecessor strictly decreases the
// index, and every lower-degree monomial precedes every higher-degree one.

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace urnlab {

using MultiIndex = std::vector<int>;

inline int degree(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

inline bool order_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("order_less: multi-indices of different lengths");
  int da = degree(a), db = degree(b);
  if (da != db) return da < db;
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

struct OrderLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return order_less(a, b); }
};

inline MultiIndex unit_index(int s, int k) {  // k is 0-based
  MultiIndex a(s, 0);
  a[k] = 1;
  return a;
}

inline MultiIndex add(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

// Difference may leave the nonnegative orthant; callers test with is_nonneg.
inline MultiIndex sub(const MultiIndex& a, const MultiIndex& b) {
  MultiIndex out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

inline bool is_nonneg(const MultiIndex& a) {
  return std::all_of(a.begin(), a.end(), [](int v) { return v >= 0; });
}

inline std::vector<MultiIndex> monomials_of_degree(int s, int d) {
  std::vector<MultiIndex> out;
  MultiIndex cur(s, 0);
  // Enumerate compositions of d into s parts, then sort canonically.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == s - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[pos] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, d);
  std::sort(out.begin(), out.end(), OrderLess{});
  return out;
}

// All multi-indices of degree <= max_degree in canonical ascending order.
inline std::vector<MultiIndex> basis_upto(int s, int max_degree) {
  if (s <= 0) throw std::invalid_argument("basis_upto: need at least one variable");
  if (max_degree < 0) throw std::invalid_argument("basis_upto: negative degree bound");
  std::vector<MultiIndex> out;
  for (int d = 0; d <= max_degree; ++d) {
    auto layer = monomials_of_degree(s, d);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

// Position lookup for a basis produced by basis_upto (or any sorted basis).
class BasisIndex {
 public:
  explicit BasisIndex(std::vector<MultiIndex> basis) : basis_(std::move(basis)) {
    for (std::size_t i = 0; i < basis_.size(); ++i) pos_[basis_[i]] = static_cast<int>(i);
  }

  int size() const { return static_cast<int>(basis_.size()); }
  const MultiIndex& at(int i) const { return basis_[i]; }
  const std::vector<MultiIndex>& all() const { return basis_; }

  int find(const MultiIndex& a) const {  // -1 when absent
    auto it = pos_.find(a);
    return it == pos_.end() ? -1 : it->second;
  }

 private:
  std::vector<MultiIndex> basis_;
  std::map<MultiIndex, int, OrderLess> pos_;
};

inline std::string to_string(const MultiIndex& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + ")";
}

}  // namespace urnlab
