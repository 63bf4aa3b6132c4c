#pragma once

// Sparse polynomials in the dual Jordan coordinates u_1..u_s.  Terms are kept
// in a map ordered by the canonical monomial order, so the leading term is
// the last entry and iteration enumerates supports in ascending order.

#include <urnlab/linalg.hpp>
#include <urnlab/multi_index.hpp>
#include <urnlab/numeric.hpp>
#include <urnlab/spectral.hpp>

#include <map>
#include <stdexcept>
#include <string>

namespace urnlab {

template <class R>
struct UPolynomial {
  using Coef = Cx<R>;

  int vars = 0;
  std::map<MultiIndex, Coef, OrderLess> terms;

  explicit UPolynomial(int s = 0) : vars(s) {}

  static UPolynomial monomial(MultiIndex a, Coef c = Coef{R(1), R(0)}) {
    UPolynomial p(static_cast<int>(a.size()));
    if (!(c == Coef{})) p.terms[std::move(a)] = c;
    return p;
  }
  static UPolynomial constant(int s, Coef c) { return monomial(MultiIndex(s, 0), c); }

  int degree() const { return terms.empty() ? 0 : urnlab::degree(terms.rbegin()->first); }

  Coef coeff(const MultiIndex& a) const {
    auto it = terms.find(a);
    return it == terms.end() ? Coef{} : it->second;
  }

  UPolynomial& add_term(const MultiIndex& a, const Coef& c) {
    auto [it, fresh] = terms.try_emplace(a, c);
    if (!fresh) it->second += c;
    if (it->second == Coef{}) terms.erase(it);
    return *this;
  }

  // Drop entries with magnitude at most tol (exact scalars drop only zeros,
  // which add_term already removed).
  UPolynomial& prune(double tol) {
    for (auto it = terms.begin(); it != terms.end();)
      it = is_zero(it->second, tol) ? terms.erase(it) : std::next(it);
    return *this;
  }

  friend UPolynomial operator+(const UPolynomial& a, const UPolynomial& b) {
    UPolynomial out = a;
    for (const auto& [m, c] : b.terms) out.add_term(m, c);
    return out;
  }
  friend UPolynomial operator-(const UPolynomial& a, const UPolynomial& b) {
    UPolynomial out = a;
    for (const auto& [m, c] : b.terms) out.add_term(m, -c);
    return out;
  }
  friend UPolynomial operator*(const Coef& c, const UPolynomial& p) {
    UPolynomial out(p.vars);
    if (c == Coef{}) return out;
    for (const auto& [m, w] : p.terms) out.terms[m] = c * w;
    return out;
  }
  friend UPolynomial operator*(const UPolynomial& a, const UPolynomial& b) {
    UPolynomial out(a.vars ? a.vars : b.vars);
    for (const auto& [ma, ca] : a.terms)
      for (const auto& [mb, cb] : b.terms) out.add_term(add(ma, mb), ca * cb);
    return out;
  }

  bool operator==(const UPolynomial& o) const { return terms == o.terms; }

  std::string str() const {
    if (terms.empty()) return "0";
    std::string s;
    for (const auto& [m, c] : terms) {
      if (!s.empty()) s += " + ";
      s += to_string(c) + "*u^" + to_string(m);
    }
    return s;
  }
};

// Value of f at a composition-space point: coordinates are mapped through U
// and the monomials evaluated there.
template <class R>
Cx<R> eval(const UPolynomial<R>& f, const SpectralDecomposition<R>& dec, const Vec<Cx<R>>& x) {
  if (f.vars != dec.s) throw std::invalid_argument("eval: variable count mismatch");
  Vec<Cx<R>> y(dec.s, Cx<R>{});
  for (int j = 0; j < dec.s; ++j)
    for (int i = 0; i < dec.s; ++i) y[j] += dec.u(j, i) * x[i];
  Cx<R> acc{};
  for (const auto& [m, c] : f.terms) {
    Cx<R> t = c;
    for (int j = 0; j < dec.s; ++j)
      if (m[j] > 0) t *= cx_pow(y[j], m[j]);
    acc += t;
  }
  return acc;
}

template <class R>
Vec<Cx<R>> complex_point(const Vec<R>& x) {
  Vec<Cx<R>> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = Cx<R>(x[i]);
  return out;
}

}  // namespace urnlab
