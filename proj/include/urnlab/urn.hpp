#pragma once

// The urn process itself: specification, validation, simulation, and exact
// small-n path enumeration.  A spec holds the replacement matrix R (row k is
// added to the urn when a ball of color k is drawn), the initial composition
// X0, and a display name.  Analysis code works with the time-normalized copy
// (R and X0 divided by the common row sum), under which the total content
// grows by exactly 1 per draw.

#include <urnlab/linalg.hpp>
#include <urnlab/numeric.hpp>
#include <urnlab/rng.hpp>

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace urnlab {

template <class R>
struct UrnSpecT {
  Mat<R> replacement;  // s x s
  Vec<R> initial;      // size s, nonnegative, not all zero
  std::string name;

  int colors() const { return static_cast<int>(initial.size()); }
};

using UrnSpec = UrnSpecT<double>;

enum class UrnDefect { InvalidShape, NotBalanced, NotTenable, Reducible };

inline const char* to_string(UrnDefect d) {
  switch (d) {
    case UrnDefect::InvalidShape: return "InvalidShape";
    case UrnDefect::NotBalanced: return "NotBalanced";
    case UrnDefect::NotTenable: return "NotTenable";
    case UrnDefect::Reducible: return "Reducible";
  }
  return "?";
}

struct ValidationIssue {
  UrnDefect kind;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  double balance = 0.0;  // common row sum when balanced

  bool ok() const { return issues.empty(); }
  bool has(UrnDefect kind) const {
    for (const auto& i : issues)
      if (i.kind == kind) return true;
    return false;
  }
  std::string describe() const {
    std::string s;
    for (const auto& i : issues) {
      if (!s.empty()) s += "; ";
      s += std::string(to_string(i.kind)) + ": " + i.message;
    }
    return s.empty() ? "ok" : s;
  }
};

namespace detail {

inline bool integral_value(double x) { return std::isfinite(x) && x == std::floor(x); }
inline bool integral_value(const Rat& x) { return is_integer(x); }

inline BigInt as_bigint(const Rat& x) { return rat_num(x); }
inline BigInt as_bigint(double x) { return BigInt(static_cast<long long>(std::llround(x))); }

// Strong connectivity of the digraph with an edge i -> j whenever the
// off-diagonal replacement entry R(i, j) is nonzero.
template <class R>
bool strongly_connected(const Mat<R>& m) {
  const int s = m.rows();
  auto reach_all = [&](bool transposed) {
    std::vector<bool> seen(s, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < s; ++w) {
        if (w == v || seen[w]) continue;
        const auto& entry = transposed ? m(w, v) : m(v, w);
        if (!(entry == R(0))) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == s;
  };
  return reach_all(false) && reach_all(true);
}

}  // namespace detail

// Checks, in order: shape, balance (row sums all equal, positive), tenability
// (nonnegative off-diagonal entries; a negative diagonal entry -r_kk is
// admissible only for integral data with r_kk dividing X0_k and every entry
// of column k), and irreducibility.  All failed conditions are reported, not
// just the first.
template <class R>
ValidationReport validate(const UrnSpecT<R>& u, double tol = 1e-9) {
  ValidationReport rep;
  const int s = u.colors();
  if (s == 0 || u.replacement.rows() != s || u.replacement.cols() != s) {
    rep.issues.push_back({UrnDefect::InvalidShape,
                          "replacement matrix must be square with one row per entry of X0"});
    return rep;
  }

  bool x0_ok = true;
  R total = R(0);
  for (int i = 0; i < s; ++i) {
    if (u.initial[i] < R(0)) x0_ok = false;
    total += u.initial[i];
  }
  if (!x0_ok || total == R(0)) {
    rep.issues.push_back({UrnDefect::InvalidShape, "X0 must be nonnegative with at least one ball"});
    x0_ok = false;
  }

  R m = R(0);
  for (int j = 0; j < s; ++j) m += u.replacement(0, j);
  bool balanced = true;
  for (int i = 1; i < s; ++i) {
    R row = R(0);
    for (int j = 0; j < s; ++j) row += u.replacement(i, j);
    if (!real_traits<R>::is_zero(row - m, tol * std::max(1.0, std::abs(approx(m))))) balanced = false;
  }
  if (!balanced) {
    rep.issues.push_back({UrnDefect::NotBalanced, "row sums differ"});
  } else if (!(approx(m) > 0)) {
    rep.issues.push_back({UrnDefect::NotBalanced, "common row sum must be positive"});
    balanced = false;
  } else {
    rep.balance = approx(m);
  }

  bool integral = x0_ok;
  for (int i = 0; i < s && integral; ++i) {
    if (!detail::integral_value(u.initial[i])) integral = false;
    for (int j = 0; j < s && integral; ++j)
      if (!detail::integral_value(u.replacement(i, j))) integral = false;
  }
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const R& v = u.replacement(i, j);
      if (i != j && v < R(0)) {
        rep.issues.push_back({UrnDefect::NotTenable, "negative off-diagonal entry at row " +
                                                         std::to_string(i + 1) + ", column " +
                                                         std::to_string(j + 1)});
      } else if (i == j && v < R(0)) {
        if (!integral) {
          rep.issues.push_back(
              {UrnDefect::NotTenable,
               "negative diagonal entry at row " + std::to_string(i + 1) +
                   ": the integer divisibility criterion does not apply to non-integral data"});
          continue;
        }
        BigInt a = -detail::as_bigint(v);
        bool divides = x0_ok && detail::as_bigint(u.initial[i]) % a == 0;
        for (int k = 0; k < s && divides; ++k)
          if (detail::as_bigint(u.replacement(k, i)) % a != 0) divides = false;
        if (!divides)
          rep.issues.push_back({UrnDefect::NotTenable,
                                "diagonal entry -" + a.str() + " at row " + std::to_string(i + 1) +
                                    " must divide X0 and the whole column " + std::to_string(i + 1)});
      }
    }
  }

  if (!detail::strongly_connected(u.replacement))
    rep.issues.push_back({UrnDefect::Reducible, "replacement digraph is not strongly connected"});
  return rep;
}

// Exact promotion of a double spec; doubles are dyadic so nothing is lost.
inline UrnSpecT<Rat> to_exact(const UrnSpec& u) {
  UrnSpecT<Rat> out;
  const int s = u.colors();
  out.replacement = Mat<Rat>(s, s);
  out.initial.resize(s);
  for (int i = 0; i < s; ++i) {
    out.initial[i] = rat_from_double(u.initial[i]);
    for (int j = 0; j < s; ++j) out.replacement(i, j) = rat_from_double(u.replacement(i, j));
  }
  out.name = u.name;
  return out;
}

template <class R>
bool is_integral(const UrnSpecT<R>& u) {
  for (int i = 0; i < u.colors(); ++i) {
    if (!detail::integral_value(u.initial[i])) return false;
    for (int j = 0; j < u.colors(); ++j)
      if (!detail::integral_value(u.replacement(i, j))) return false;
  }
  return true;
}

// Time-normalized copy: replacement and X0 divided by the common row sum, so
// one draw adds total 1.  The normalized process is exactly X_n / m pathwise.
template <class R>
UrnSpecT<R> normalized(const UrnSpecT<R>& u) {
  UrnSpecT<R> out = u;
  R m = R(0);
  for (int j = 0; j < u.colors(); ++j) m += u.replacement(0, j);
  for (int i = 0; i < u.colors(); ++i) {
    out.initial[i] = out.initial[i] / m;
    for (int j = 0; j < u.colors(); ++j) out.replacement(i, j) = out.replacement(i, j) / m;
  }
  return out;
}

// One draw: pick color k with probability x_k / |x|, add row k.  Throws if
// the update would leave the nonnegative orthant (untenable data).
template <class R>
int step(const UrnSpecT<R>& u, Vec<R>& x, RngStream& rng) {
  const int s = u.colors();
  R total = R(0);
  for (int i = 0; i < s; ++i) total += x[i];
  double ucut = rng.uniform01() * approx(total);
  double acc = 0.0;
  int k = s - 1;
  for (int i = 0; i < s; ++i) {
    acc += approx(x[i]);
    if (ucut < acc) {
      k = i;
      break;
    }
  }
  for (int j = 0; j < s; ++j) {
    x[j] += u.replacement(k, j);
    if (approx(x[j]) < 0)
      throw std::runtime_error("urn left the nonnegative orthant at color " + std::to_string(j + 1) +
                               "; spec is not tenable from this state");
  }
  return k;
}

struct Trajectory {
  std::vector<std::int64_t> n;
  std::vector<Vec<double>> x;  // composition at each recorded time
};

// Simulate one trajectory from stream (seed, stream), recording the
// composition at the requested times (which must be increasing; 0 allowed).
template <class R>
Trajectory simulate(const UrnSpecT<R>& u, const std::vector<std::int64_t>& record_at,
                    std::uint64_t seed, std::uint64_t stream) {
  RngStream rng(seed, stream);
  Vec<R> x = u.initial;
  Trajectory out;
  std::int64_t n = 0;
  auto record = [&](std::int64_t at) {
    out.n.push_back(at);
    Vec<double> row(u.colors());
    for (int i = 0; i < u.colors(); ++i) row[i] = approx(x[i]);
    out.x.push_back(std::move(row));
  };
  for (std::int64_t target : record_at) {
    if (target < n) throw std::invalid_argument("simulate: recording times must be increasing");
    while (n < target) {
      step(u, x, rng);
      ++n;
    }
    record(target);
  }
  return out;
}

struct EnumerationBudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact distribution of the composition after n draws.  States with equal
// composition are merged (the draw law depends only on the composition), so
// the state count stays polynomial in n.  `budget` bounds the number of
// expanded transitions.
inline std::map<Vec<Rat>, Rat> path_distribution(const UrnSpecT<Rat>& u, int n,
                                                 std::uint64_t budget = 20'000'000) {
  const int s = u.colors();
  std::map<Vec<Rat>, Rat> cur;
  cur[u.initial] = Rat(1);
  std::uint64_t work = 0;
  for (int t = 0; t < n; ++t) {
    std::map<Vec<Rat>, Rat> next;
    for (const auto& [x, p] : cur) {
      Rat total = std::accumulate(x.begin(), x.end(), Rat(0));
      for (int k = 0; k < s; ++k) {
        if (x[k] == 0) continue;
        if (++work > budget)
          throw EnumerationBudgetExceeded("path enumeration exceeded " + std::to_string(budget) +
                                          " transitions");
        Vec<Rat> y = x;
        for (int j = 0; j < s; ++j) {
          y[j] += u.replacement(k, j);
          if (y[j] < 0)
            throw std::runtime_error("path enumeration left the nonnegative orthant; spec is not tenable");
        }
        next[y] += p * (x[k] / total);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace urnlab
