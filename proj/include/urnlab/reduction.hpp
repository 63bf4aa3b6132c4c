#pragma once

// Spectral reduction of the drift operator on polynomial coordinates.
//
// The matrix of the drift operator on a degree-capped monomial basis is upper
// triangular with the resonance values <lambda, beta> on the diagonal.  This
// header decouples that matrix into its generalized eigenspaces with a
// triangular similarity sweep, which yields for every exponent alpha the
// reduced polynomial Q_alpha (the eigenprojection of u^alpha), its nilpotence
// index nu_alpha, the descent sets A_alpha and K_alpha that bound where
// (Phi - <lambda,alpha>) Q_alpha can land, and the weighted degree functional
// that in turn bounds nu_alpha on critically small urns.

#include <urnlab/cone.hpp>
#include <urnlab/multi_index.hpp>
#include <urnlab/phi.hpp>
#include <urnlab/polynomial.hpp>
#include <urnlab/spectral.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace urnlab {

// Two resonance values sit closer than the separation floor but farther than
// the clustering tolerance, so the decoupling divisions are unreliable.
struct ResonanceAmbiguity : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An enumeration (descent closure or candidate scan) outgrew its budget.
struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// m_functional received an exponent supported outside its block.
struct UnsupportedSupport : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ReductionOptions {
  double prune_tol = 1e-14;    // dropped when expanding operator images (float)
  double leak_tol = 1e-9;      // triangularity enforcement in phi_matrix
  double link_tol = 1e-7;      // resonance values within this are one cluster
  double ambiguity_gap = 1e-5; // distinct clusters closer than this are an error
  double zero_tol = 1e-8;      // relative zero test for nilpotency and supports
};

namespace detail {

template <class R>
bool re_equal(const R& a, const R& b, double tol) {
  if constexpr (real_traits<R>::exact)
    return a == b;
  else
    return std::abs(a - b) <= tol;
}

template <class R>
bool re_leq(const R& a, const R& b, double tol) {
  if constexpr (real_traits<R>::exact)
    return a <= b;
  else
    return a <= b + tol;
}

template <class R>
void check_exponent(const SpectralDecomposition<R>& dec, const MultiIndex& alpha,
                    const char* where) {
  if (static_cast<int>(alpha.size()) != dec.s)
    throw std::invalid_argument(std::string(where) + ": exponent length does not match dimension");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Power predicates: where an exponent's support sits in the spectrum.

template <class R>
bool is_small_power(const SpectralDecomposition<R>& dec, const MultiIndex& alpha,
                    double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "is_small_power");
  const R half = R(1) / R(2);
  for (int k = 0; k < dec.s; ++k)
    if (alpha[k] != 0 && !detail::re_leq(dec.eigenvalues[k].re, half, tol)) return false;
  return true;
}

template <class R>
bool is_strictly_small_power(const SpectralDecomposition<R>& dec, const MultiIndex& alpha,
                             double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "is_strictly_small_power");
  const R half = R(1) / R(2);
  for (int k = 0; k < dec.s; ++k) {
    if (alpha[k] == 0) continue;
    const R& re = dec.eigenvalues[k].re;
    if (detail::re_equal(re, half, tol) || !detail::re_leq(re, half, tol)) return false;
  }
  return true;
}

template <class R>
bool is_critical_power(const SpectralDecomposition<R>& dec, const MultiIndex& alpha,
                       double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "is_critical_power");
  const R one = R(1), half = R(1) / R(2);
  for (int k = 0; k < dec.s; ++k) {
    if (alpha[k] == 0) continue;
    const R& re = dec.eigenvalues[k].re;
    if (!detail::re_equal(re, one, tol) && !detail::re_equal(re, half, tol)) return false;
  }
  return true;
}

template <class R>
bool is_strictly_critical_power(const SpectralDecomposition<R>& dec, const MultiIndex& alpha,
                                double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "is_strictly_critical_power");
  const R half = R(1) / R(2);
  for (int k = 0; k < dec.s; ++k)
    if (alpha[k] != 0 && !detail::re_equal(dec.eigenvalues[k].re, half, tol)) return false;
  return true;
}

// Blocks whose eigenvalue has real part one half.
template <class R>
std::vector<int> critical_blocks(const SpectralDecomposition<R>& dec, double tol = 1e-7) {
  std::vector<int> out;
  const R half = R(1) / R(2);
  for (std::size_t bi = 0; bi < dec.blocks.size(); ++bi)
    if (detail::re_equal(dec.blocks[bi].eigenvalue.re, half, tol))
      out.push_back(static_cast<int>(bi));
  return out;
}

// Support contained in the content direction plus one designated block.
template <class R>
bool supported_on_block(const SpectralDecomposition<R>& dec, const MultiIndex& alpha, int block) {
  detail::check_exponent(dec, alpha, "supported_on_block");
  const auto& blk = dec.blocks.at(static_cast<std::size_t>(block));
  for (int k = 1; k < dec.s; ++k)
    if (alpha[k] != 0 && (k < blk.first || k >= blk.first + blk.size)) return false;
  return true;
}

// The critical block confining alpha's support (besides the content
// direction), when alpha is a critical power with such a block.
template <class R>
std::optional<int> quasi_monogenic_block(const SpectralDecomposition<R>& dec,
                                         const MultiIndex& alpha, double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "quasi_monogenic_block");
  if (!is_critical_power(dec, alpha, tol)) return std::nullopt;
  for (int bi : critical_blocks(dec, tol))
    if (supported_on_block(dec, alpha, bi)) return bi;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Descent sets.

// Closure of alpha under moving one unit from a chained position k to its
// predecessor k-1, intersected with the nonnegative orthant.  Every element
// keeps the per-eigenvalue coordinate sums, hence the degree and the
// resonance value.
template <class R>
std::vector<MultiIndex> chain_descents(const SpectralDecomposition<R>& dec,
                                       const MultiIndex& alpha, long budget = 4'000'000) {
  detail::check_exponent(dec, alpha, "chain_descents");
  std::set<MultiIndex, OrderLess> seen;
  std::vector<MultiIndex> queue{alpha};
  seen.insert(alpha);
  while (!queue.empty()) {
    MultiIndex cur = std::move(queue.back());
    queue.pop_back();
    for (int k = 1; k < dec.s; ++k) {
      if (!dec.chained[k] || cur[k] == 0) continue;
      MultiIndex nxt = cur;
      --nxt[k];
      ++nxt[k - 1];
      if (seen.insert(nxt).second) {
        if (static_cast<long>(seen.size()) > budget)
          throw BudgetExceeded("chain_descents: closure exceeded the budget");
        queue.push_back(nxt);
      }
    }
  }
  return {seen.begin(), seen.end()};
}

// Exponents beta < alpha with the same resonance value that some descent of
// alpha dominates modulo the cone: the places where applying the shifted
// operator to Q_alpha can land.
template <class R>
std::vector<MultiIndex> resonant_predecessors(const SpectralDecomposition<R>& dec,
                                              const MultiIndex& alpha,
                                              const std::vector<MultiIndex>& descents,
                                              long budget = 4'000'000, double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "resonant_predecessors");
  const Cx<R> target = resonance_value(dec, alpha);
  std::vector<MultiIndex> candidates = basis_upto(dec.s, degree(alpha));
  if (static_cast<long>(candidates.size()) * std::max<long>(1, descents.size()) > budget)
    throw BudgetExceeded("resonant_predecessors: candidate scan exceeded the budget");
  std::vector<MultiIndex> out;
  for (auto& beta : candidates) {
    if (!order_less(beta, alpha)) continue;
    Cx<R> rb = resonance_value(dec, beta);
    if constexpr (real_traits<R>::exact) {
      if (!(rb == target)) continue;
    } else {
      if (mag(rb - target) > tol * std::max(1.0, mag(target))) continue;
    }
    for (const auto& ap : descents)
      if (cone_contains(sub(ap, beta))) {
        out.push_back(beta);
        break;
      }
  }
  return out;
}

struct PowerSets {
  MultiIndex alpha;
  std::vector<MultiIndex> generators;  // one descent move per chained position
  std::vector<MultiIndex> a_set;       // descent closure of alpha
  std::vector<MultiIndex> k_set;       // resonant predecessors reachable via the cone
};

template <class R>
PowerSets compute_power_sets(const MultiIndex& alpha, const SpectralDecomposition<R>& dec,
                             long budget = 4'000'000, double tol = 1e-7) {
  detail::check_exponent(dec, alpha, "compute_power_sets");
  PowerSets out;
  out.alpha = alpha;
  for (int k = 1; k < dec.s; ++k) {
    if (!dec.chained[k]) continue;
    MultiIndex g(dec.s, 0);
    g[k] = 1;
    g[k - 1] = -1;
    out.generators.push_back(std::move(g));
  }
  out.a_set = chain_descents(dec, alpha, budget);
  out.k_set = resonant_predecessors(dec, alpha, out.a_set, budget, tol);
  return out;
}

// ---------------------------------------------------------------------------
// Reduced polynomials.

template <class R>
struct ReducedPolynomial {
  MultiIndex alpha;
  UPolynomial<R> q;
  int nu = 0;
  Cx<R> eigenvalue;  // <lambda, alpha>
};

template <class R>
struct StabilityReport {
  MultiIndex alpha;
  Cx<R> eigenvalue;
  std::vector<MultiIndex> k_set;
  std::vector<std::pair<MultiIndex, Cx<R>>> expansion;   // (Phi - c) Q_alpha over {Q_beta}
  std::vector<std::pair<MultiIndex, Cx<R>>> violations;  // expansion support outside k_set
  bool ok = true;
};

// Decouples the operator matrix on a degree-capped basis into resonance
// clusters with one triangular similarity sweep, then answers projection,
// nilpotence and stability queries from the decoupled form.  Queries are
// memoized; identical inputs give identical results in exact arithmetic.
template <class R>
class ReductionEngine {
 public:
  using K = Cx<R>;

  ReductionEngine(const SpectralDecomposition<R>& dec, int degree_cap, ReductionOptions opt = {})
      : dec_(dec),
        opt_(opt),
        cap_(degree_cap),
        phi_(phi_matrix(dec_, basis_upto(dec_.s, degree_cap), opt.prune_tol, opt.leak_tol)) {
    cluster();
    decouple();
  }

  const SpectralDecomposition<R>& decomposition() const { return dec_; }
  const PhiMatrix<R>& matrix() const { return phi_; }
  int degree_cap() const { return cap_; }
  int cluster_of(int pos) const { return cluster_of_[static_cast<std::size_t>(pos)]; }
  int cluster_count() const { return static_cast<int>(cluster_value_.size()); }
  const K& cluster_value(int c) const { return cluster_value_[static_cast<std::size_t>(c)]; }
  const Mat<K>& change_of_basis() const { return s_; }
  const Mat<K>& decoupled() const { return split_; }

  // Coordinates of Q_alpha over the basis: the alpha-cluster component of the
  // coordinate vector of u^alpha.  The entry at alpha's own position is one.
  Vec<K> coords(const MultiIndex& alpha) const {
    {
      std::lock_guard<std::mutex> hold(mu_);
      auto it = cache_.find(alpha);
      if (it != cache_.end()) return it->second;
    }
    const int pos = position(alpha);
    const int cl = cluster_of_[static_cast<std::size_t>(pos)];
    Vec<K> z(static_cast<std::size_t>(pos) + 1, K{});
    z[static_cast<std::size_t>(pos)] = K{R(1), R(0)};
    for (int i = pos - 1; i >= 0; --i) {
      K acc{};
      for (int j = i + 1; j <= pos; ++j) {
        if (z[static_cast<std::size_t>(j)] == K{}) continue;
        const K& sij = s_(i, j);
        if (sij == K{}) continue;
        acc += sij * z[static_cast<std::size_t>(j)];
      }
      z[static_cast<std::size_t>(i)] = -acc;
    }
    for (int i = 0; i < pos; ++i)
      if (cluster_of_[static_cast<std::size_t>(i)] != cl) z[static_cast<std::size_t>(i)] = K{};
    Vec<K> q(static_cast<std::size_t>(phi_.basis.size()), K{});
    for (int k = 0; k <= pos; ++k) {
      K acc{};
      for (int j = k; j <= pos; ++j) {
        if (z[static_cast<std::size_t>(j)] == K{}) continue;
        acc += s_(k, j) * z[static_cast<std::size_t>(j)];
      }
      q[static_cast<std::size_t>(k)] = acc;
    }
    std::lock_guard<std::mutex> hold(mu_);
    return cache_.emplace(alpha, std::move(q)).first->second;
  }

  // Smallest nu with (Phi - <lambda,alpha>)^{nu+1} Q_alpha = 0.
  int nilpotence(const MultiIndex& alpha) const {
    const int pos = position(alpha);
    const K c = phi_.resonance[static_cast<std::size_t>(pos)];
    Vec<K> q = coords(alpha);
    double scale = 1.0;
    if constexpr (!real_traits<R>::exact)
      for (const K& w : q) scale = std::max(scale, mag(w));
    Vec<K> w = apply_shifted(q, c, pos);
    int nu = 0;
    while (!vec_zero(w, scale)) {
      ++nu;
      if (nu > pos + 1) throw std::logic_error("nilpotence: shifted operator failed to vanish");
      w = apply_shifted(w, c, pos);
    }
    return nu;
  }

  UPolynomial<R> polynomial(const Vec<K>& coords) const {
    UPolynomial<R> p(dec_.s);
    for (std::size_t i = 0; i < coords.size(); ++i)
      if (!(coords[i] == K{})) p.add_term(phi_.basis.at(static_cast<int>(i)), coords[i]);
    return p;
  }

  ReducedPolynomial<R> reduce(const MultiIndex& alpha) const {
    ReducedPolynomial<R> out;
    out.alpha = alpha;
    out.eigenvalue = phi_.resonance[static_cast<std::size_t>(position(alpha))];
    out.q = polynomial(coords(alpha));
    out.nu = nilpotence(alpha);
    return out;
  }

  std::vector<MultiIndex> a_set(const MultiIndex& alpha, long budget = 4'000'000) const {
    return chain_descents(dec_, alpha, budget);
  }

  // Weights y with u^alpha = sum_j y[j] Q_{basis[j]}, one weight per basis
  // position up to alpha's own (where the weight is one).
  Vec<K> monomial_in_reduced_basis(const MultiIndex& alpha) const {
    const int pos = position(alpha);
    Vec<K> rhs(static_cast<std::size_t>(pos) + 1, K{});
    rhs[static_cast<std::size_t>(pos)] = K{R(1), R(0)};
    return expand_in_reduced_basis(rhs, pos);
  }

  std::vector<MultiIndex> k_set(const MultiIndex& alpha, long budget = 4'000'000) const {
    return resonant_predecessors(dec_, alpha, a_set(alpha, budget), budget, opt_.link_tol);
  }

  // Expands (Phi - <lambda,alpha>) Q_alpha in the reduced basis {Q_beta} and
  // checks that the support stays inside k_set(alpha).
  StabilityReport<R> stability(const MultiIndex& alpha) const {
    StabilityReport<R> rep;
    rep.alpha = alpha;
    const int pos = position(alpha);
    rep.eigenvalue = phi_.resonance[static_cast<std::size_t>(pos)];
    rep.k_set = k_set(alpha);
    Vec<K> q = coords(alpha);
    Vec<K> r = apply_shifted(q, rep.eigenvalue, pos);
    Vec<K> y = expand_in_reduced_basis(r, pos);
    double scale = 1.0;
    if constexpr (!real_traits<R>::exact)
      for (const K& w : y) scale = std::max(scale, mag(w));
    std::set<MultiIndex, OrderLess> allowed(rep.k_set.begin(), rep.k_set.end());
    for (int j = 0; j <= pos; ++j) {
      const K& w = y[static_cast<std::size_t>(j)];
      bool nonzero;
      if constexpr (real_traits<R>::exact)
        nonzero = !(w == K{});
      else
        nonzero = mag(w) > opt_.zero_tol * scale;
      if (!nonzero) continue;
      const MultiIndex& beta = phi_.basis.at(j);
      rep.expansion.emplace_back(beta, w);
      if (!allowed.count(beta)) {
        rep.violations.emplace_back(beta, w);
        rep.ok = false;
      }
    }
    return rep;
  }

  // (Phi - c) on coordinate vectors supported on positions [0, pos].
  Vec<K> apply_shifted(const Vec<K>& x, const K& c, int pos) const {
    Vec<K> out(x.size(), K{});
    for (int i = 0; i <= pos; ++i) {
      K acc{};
      for (int j = i; j <= pos; ++j) {
        if (x[static_cast<std::size_t>(j)] == K{}) continue;
        const K& t = phi_.t(i, j);
        if (t == K{}) continue;
        acc += t * x[static_cast<std::size_t>(j)];
      }
      acc -= c * x[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
  }

  int position(const MultiIndex& alpha) const {
    detail::check_exponent(dec_, alpha, "ReductionEngine");
    const int pos = phi_.basis.find(alpha);
    if (pos < 0)
      throw std::invalid_argument("ReductionEngine: exponent outside the basis; raise the degree cap");
    return pos;
  }

 private:
  // Back-substitution through the unit upper triangular matrix whose column l
  // holds coords(basis[l]): solves for y with sum_l y[l] Q_{basis[l]} = rhs.
  Vec<K> expand_in_reduced_basis(const Vec<K>& rhs, int pos) const {
    Vec<K> y(static_cast<std::size_t>(pos) + 1, K{});
    for (int j = pos; j >= 0; --j) {
      K acc = rhs[static_cast<std::size_t>(j)];
      for (int l = j + 1; l <= pos; ++l) {
        if (y[static_cast<std::size_t>(l)] == K{}) continue;
        acc -= coords(phi_.basis.at(l))[static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(l)];
      }
      y[static_cast<std::size_t>(j)] = acc;
    }
    return y;
  }

  void cluster() {
    const int n = phi_.basis.size();
    cluster_of_.assign(static_cast<std::size_t>(n), -1);
    if constexpr (real_traits<R>::exact) {
      for (int i = 0; i < n; ++i) {
        const K& v = phi_.resonance[static_cast<std::size_t>(i)];
        for (std::size_t c = 0; c < cluster_value_.size(); ++c)
          if (v == cluster_value_[c]) {
            cluster_of_[static_cast<std::size_t>(i)] = static_cast<int>(c);
            break;
          }
        if (cluster_of_[static_cast<std::size_t>(i)] < 0) {
          cluster_of_[static_cast<std::size_t>(i)] = static_cast<int>(cluster_value_.size());
          cluster_value_.push_back(v);
        }
      }
    } else {
      double scale = 1.0;
      for (const K& v : phi_.resonance) scale = std::max(scale, mag(v));
      std::vector<int> parent(static_cast<std::size_t>(n));
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
          parent[static_cast<std::size_t>(x)] =
              parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
          x = parent[static_cast<std::size_t>(x)];
        }
        return x;
      };
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (mag(phi_.resonance[static_cast<std::size_t>(i)] -
                  phi_.resonance[static_cast<std::size_t>(j)]) <= opt_.link_tol * scale)
            parent[static_cast<std::size_t>(find(j))] = find(i);
      for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (cluster_of_[static_cast<std::size_t>(r)] < 0) {
          cluster_of_[static_cast<std::size_t>(r)] = static_cast<int>(cluster_value_.size());
          cluster_value_.push_back(phi_.resonance[static_cast<std::size_t>(r)]);
        }
        cluster_of_[static_cast<std::size_t>(i)] = cluster_of_[static_cast<std::size_t>(r)];
      }
      for (std::size_t a = 0; a < cluster_value_.size(); ++a)
        for (std::size_t b = a + 1; b < cluster_value_.size(); ++b)
          if (mag(cluster_value_[a] - cluster_value_[b]) < opt_.ambiguity_gap * scale)
            throw ResonanceAmbiguity(
                "resonance values " + to_string(cluster_value_[a]) + " and " +
                to_string(cluster_value_[b]) +
                " are separated but too close for a reliable decoupling");
    }
  }

  // One triangular similarity sweep: eliminate every cross-cluster entry
  // (i, j), i < j, in order of increasing gap j - i.  Updating column j by
  // column i and row i by row j keeps the matrix upper triangular and never
  // reintroduces an eliminated entry.
  void decouple() {
    const int n = phi_.basis.size();
    split_ = phi_.t;
    s_ = Mat<K>::identity(n);
    for (int gap = 1; gap < n; ++gap) {
      for (int i = 0; i + gap < n; ++i) {
        const int j = i + gap;
        if (cluster_of_[static_cast<std::size_t>(i)] == cluster_of_[static_cast<std::size_t>(j)])
          continue;
        const K e = split_(i, j);
        if (e == K{}) continue;
        const K den = split_(j, j) - split_(i, i);
        if (den == K{})
          throw ResonanceAmbiguity("equal diagonal values across distinct resonance clusters");
        const K g = e / den;
        for (int k = 0; k <= i; ++k) split_(k, j) += g * split_(k, i);
        for (int l = j; l < n; ++l) split_(i, l) -= g * split_(j, l);
        split_(i, j) = K{};
        for (int k = 0; k <= i; ++k) s_(k, j) += g * s_(k, i);
      }
    }
  }

  bool vec_zero(const Vec<K>& w, double scale) const {
    if constexpr (real_traits<R>::exact) {
      for (const K& x : w)
        if (!(x == K{})) return false;
      return true;
    } else {
      for (const K& x : w)
        if (mag(x) > opt_.zero_tol * scale) return false;
      return true;
    }
  }

  SpectralDecomposition<R> dec_;
  ReductionOptions opt_;
  int cap_ = 0;
  PhiMatrix<R> phi_;
  std::vector<int> cluster_of_;
  std::vector<K> cluster_value_;
  Mat<K> s_;
  Mat<K> split_;
  mutable std::map<MultiIndex, Vec<K>, OrderLess> cache_;
  mutable std::mutex mu_;
};

template <class R>
ReducedPolynomial<R> reduced_polynomial(const MultiIndex& alpha,
                                        const SpectralDecomposition<R>& dec,
                                        ReductionOptions opt = {}) {
  detail::check_exponent(dec, alpha, "reduced_polynomial");
  ReductionEngine<R> engine(dec, degree(alpha), opt);
  return engine.reduce(alpha);
}

template <class R>
StabilityReport<R> verify_stability(const MultiIndex& alpha, const SpectralDecomposition<R>& dec,
                                    ReductionOptions opt = {}) {
  detail::check_exponent(dec, alpha, "verify_stability");
  ReductionEngine<R> engine(dec, degree(alpha), opt);
  return engine.stability(alpha);
}

// ---------------------------------------------------------------------------
// The weighted degree functional on a critical block.

// Weight q + 1/2 on the q-th position inside the block, weight zero on the
// content direction; defined for exponents supported there.
template <class R>
R m_functional(const SpectralDecomposition<R>& dec, const MultiIndex& gamma, int block) {
  detail::check_exponent(dec, gamma, "m_functional");
  if (block < 0 || block >= static_cast<int>(dec.blocks.size()))
    throw std::out_of_range("m_functional: block index out of range");
  const auto& blk = dec.blocks[static_cast<std::size_t>(block)];
  for (int k = 1; k < dec.s; ++k)
    if (gamma[k] != 0 && (k < blk.first || k >= blk.first + blk.size))
      throw UnsupportedSupport(
          "m_functional: exponent supported outside the content direction and block " +
          std::to_string(block));
  R acc{};
  const R half = R(1) / R(2);
  for (int q = 0; q < blk.size; ++q) {
    const int g = gamma[blk.first + q];
    if (g == 0) continue;
    acc += (real_traits<R>::from_int(q) + half) * real_traits<R>::from_int(g);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Bound verification.

template <class R>
struct BoundEntry {
  MultiIndex alpha;
  int block = -1;
  int r = 0;  // block size minus one
  int nu = 0;
  R m_value{};
  bool ok = true;
};

template <class R>
struct BoundReport {
  std::vector<BoundEntry<R>> entries;
  int violations = 0;
  bool ok = true;
};

// On a critically small urn: for every critical exponent confined to the
// content direction plus one critical block, the nilpotence index is bounded
// by the weighted degree functional, which is bounded by (r + 1/2) |alpha|;
// the classification bound (d + 1/2) |alpha| holds as well.
template <class R>
BoundReport<R> check_nilpotence_bounds(const SpectralDecomposition<R>& dec, int degree_cap,
                                       ReductionOptions opt = {}) {
  const UrnClassification<R> cls = classify(dec);
  if (cls.kind != UrnKind::CriticallySmall)
    throw std::invalid_argument("check_nilpotence_bounds: urn is not critically small");
  ReductionEngine<R> engine(dec, degree_cap, opt);
  BoundReport<R> out;
  const R half = R(1) / R(2);
  for (const auto& alpha : engine.matrix().basis.all()) {
    if (degree(alpha) == 0) continue;
    const auto block = quasi_monogenic_block(dec, alpha, opt.link_tol);
    if (!block) continue;
    BoundEntry<R> e;
    e.alpha = alpha;
    e.block = *block;
    e.r = dec.blocks[static_cast<std::size_t>(*block)].size - 1;
    e.nu = engine.nilpotence(alpha);
    e.m_value = m_functional(dec, alpha, *block);
    const R deg = real_traits<R>::from_int(degree(alpha));
    const R nu = real_traits<R>::from_int(e.nu);
    const R size_bound = (real_traits<R>::from_int(e.r) + half) * deg;
    const R class_bound = (real_traits<R>::from_int(cls.d) + half) * deg;
    e.ok = nu <= e.m_value && e.m_value <= size_bound && nu <= class_bound;
    if (!e.ok) {
      ++out.violations;
      out.ok = false;
    }
    out.entries.push_back(std::move(e));
  }
  return out;
}

struct ResonanceBoundReport {
  long strictly_small_checked = 0;  // (alpha, beta) pairs under the half-degree bound
  long critical_checked = 0;        // (alpha, beta) pairs under the resonance bound
  long descent_checked = 0;         // proper descents under the functional drop
  long difference_checked = 0;      // cone differences under the functional drop
  std::vector<std::string> violations;
  bool ok = true;
};

// Enumerates, for every exponent up to the cap, the reachable set
// (A_alpha - Sigma) intersected with the nonnegative orthant, and checks the
// resonance bounds: strictly small exponents cap real parts at |alpha| / 2
// with equality only at (|alpha|/2) delta_1; on critically small urns,
// critical exponents cap real parts at their own resonance with equality only
// at critical exponents, and the weighted degree functional drops by at least
// one on proper descents and on resonant cone differences.
template <class R>
ResonanceBoundReport check_resonance_bounds(const SpectralDecomposition<R>& dec, int degree_cap,
                                            ReductionOptions opt = {}, long budget = 4'000'000) {
  ResonanceBoundReport rep;
  const UrnClassification<R> cls = classify(dec);
  const bool critically_small = cls.kind == UrnKind::CriticallySmall;
  const R one = R(1);
  auto note = [&rep](std::string msg) {
    rep.violations.push_back(std::move(msg));
    rep.ok = false;
  };

  for (const auto& alpha : basis_upto(dec.s, degree_cap)) {
    const int deg = degree(alpha);
    if (deg == 0) continue;
    const bool strictly_small = is_strictly_small_power(dec, alpha, opt.link_tol);
    const bool critical = is_critical_power(dec, alpha, opt.link_tol);
    if (!strictly_small && !(critical && critically_small)) continue;

    const std::vector<MultiIndex> descents = chain_descents(dec, alpha, budget);
    std::vector<MultiIndex> reachable;
    {
      std::vector<MultiIndex> candidates = basis_upto(dec.s, deg);
      if (static_cast<long>(candidates.size()) * static_cast<long>(descents.size()) > budget)
        throw BudgetExceeded("check_resonance_bounds: candidate scan exceeded the budget");
      for (auto& beta : candidates)
        for (const auto& ap : descents)
          if (cone_contains(sub(ap, beta))) {
            reachable.push_back(std::move(beta));
            break;
          }
    }

    if (strictly_small) {
      const R bound = real_traits<R>::from_int(deg) / R(2);
      MultiIndex peak(dec.s, 0);
      peak[0] = deg / 2;
      for (const auto& beta : reachable) {
        ++rep.strictly_small_checked;
        const R re = resonance_value(dec, beta).re;
        if (!detail::re_leq(re, bound, opt.link_tol))
          note("half-degree bound fails at " + to_string(alpha) + " -> " + to_string(beta));
        else if (detail::re_equal(re, bound, opt.link_tol) && !(deg % 2 == 0 && beta == peak))
          note("half-degree equality away from the content axis at " + to_string(alpha) +
               " -> " + to_string(beta));
      }
    }

    if (critical && critically_small) {
      const R are = resonance_value(dec, alpha).re;
      for (const auto& beta : reachable) {
        ++rep.critical_checked;
        const R bre = resonance_value(dec, beta).re;
        if (!detail::re_leq(bre, are, opt.link_tol))
          note("resonance bound fails at " + to_string(alpha) + " -> " + to_string(beta));
        else if (detail::re_equal(bre, are, opt.link_tol) &&
                 !is_critical_power(dec, beta, opt.link_tol))
          note("resonance equality at a non-critical exponent: " + to_string(alpha) + " -> " +
               to_string(beta));
      }
      for (const auto& beta : resonant_predecessors(dec, alpha, descents, budget, opt.link_tol))
        if (!is_critical_power(dec, beta, opt.link_tol))
          note("non-critical landing exponent " + to_string(beta) + " for " + to_string(alpha));

      const auto block = quasi_monogenic_block(dec, alpha, opt.link_tol);
      if (block) {
        const R m_alpha = m_functional(dec, alpha, *block);
        const R dropped = m_alpha - one;
        for (const auto& ap : descents) {
          if (ap == alpha) continue;
          ++rep.descent_checked;
          if (!is_critical_power(dec, ap, opt.link_tol) || !supported_on_block(dec, ap, *block))
            note("descent " + to_string(ap) + " of " + to_string(alpha) + " leaves the block");
          else if (!detail::re_leq(m_functional(dec, ap, *block), dropped, opt.link_tol))
            note("functional fails to drop on descent " + to_string(ap) + " of " +
                 to_string(alpha));
        }
        for (const auto& beta : basis_upto(dec.s, deg)) {
          if (beta == alpha || !cone_contains(sub(alpha, beta))) continue;
          if (!detail::re_equal(resonance_value(dec, beta).re, are, opt.link_tol)) continue;
          ++rep.difference_checked;
          if (!is_critical_power(dec, beta, opt.link_tol) ||
              !supported_on_block(dec, beta, *block))
            note("difference " + to_string(beta) + " of " + to_string(alpha) + " leaves the block");
          else if (!detail::re_leq(m_functional(dec, beta, *block), dropped, opt.link_tol))
            note("functional fails to drop on difference " + to_string(beta) + " of " +
                 to_string(alpha));
        }
      }
    }
  }
  return rep;
}

}  // namespace urnlab
