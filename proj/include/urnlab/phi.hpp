#pragma once

// The drift operator of the urn process acting on polynomials of the dual
// Jordan coordinates:
//
//   Phi(f)(v) = sum_k l_k(v) * (f(v + w_k) - f(v)),
//
// where l_k(v) = v_k is the mass of color k and w_k the normalized
// replacement row.  Phi governs the one-step change of expected values:
// E[f(X_{n+1}) | X_n] = f(X_n) + Phi(f)(X_n) / (total mass).
//
// On monomials u^beta the operator is triangular for the canonical order:
// the image lies in the span of u^gamma with gamma <= beta, the diagonal
// coefficient is the resonance value <lambda, beta>, and the only other
// same-degree images are the chain shifts beta - delta_j + delta_{j-1}.

#include <urnlab/multi_index.hpp>
#include <urnlab/polynomial.hpp>
#include <urnlab/spectral.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace urnlab {

struct StabilityViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t out = 1;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace detail

// Resonance value <lambda, beta> of a monomial.
template <class R>
Cx<R> resonance_value(const SpectralDecomposition<R>& dec, const MultiIndex& beta) {
  Cx<R> acc{};
  for (int i = 0; i < dec.s; ++i)
    if (beta[i] != 0) acc += Cx<R>{real_traits<R>::from_int(beta[i]), R(0)} * dec.eigenvalues[i];
  return acc;
}

template <class R>
UPolynomial<R> phi_apply(const SpectralDecomposition<R>& dec, const UPolynomial<R>& f,
                         double prune_tol = 1e-14) {
  using Coef = Cx<R>;
  const int s = dec.s;
  if (f.vars != s) throw std::invalid_argument("phi_apply: variable count mismatch");
  UPolynomial<R> out(s);

  for (const auto& [beta, c] : f.terms) {
    for (int k = 0; k < s; ++k) {
      // Expand prod_j (u_j + u_j(w_k))^{beta_j} - u^beta as terms t < beta.
      std::vector<std::pair<MultiIndex, Coef>> expansion{{MultiIndex(s, 0), Coef{R(1), R(0)}}};
      for (int j = 0; j < s; ++j) {
        if (beta[j] == 0) {
          continue;  // exponent stays zero in every term
        }
        const Coef& shift = dec.u_of_w(j, k);
        std::vector<std::pair<MultiIndex, Coef>> next;
        for (const auto& [t, w] : expansion) {
          for (int tj = beta[j]; tj >= 0; --tj) {
            Coef factor{real_traits<R>::from_int(detail::binomial(beta[j], tj)), R(0)};
            if (tj < beta[j]) {
              if (shift == Coef{}) break;  // zero shift forces tj = beta_j
              factor *= cx_pow(shift, beta[j] - tj);
            }
            MultiIndex t2 = t;
            t2[j] = tj;
            next.push_back({std::move(t2), w * factor});
          }
        }
        expansion = std::move(next);
      }
      for (const auto& [t, w] : expansion) {
        if (t == beta) continue;  // the subtracted f(v) term
        // multiply by l_k = sum_j v(k, j) u_j
        for (int j = 0; j < s; ++j) {
          const Coef& lkj = dec.v(k, j);
          if (lkj == Coef{}) continue;
          MultiIndex g = t;
          g[j] += 1;
          out.add_term(g, c * w * lkj);
        }
      }
    }
  }
  return out.prune(real_traits<R>::exact ? 0.0 : prune_tol);
}

// Matrix of Phi restricted to the span of an ascending, downward-closed list
// of monomials: column j holds the coefficients of Phi(u^{basis[j]}).  Any
// image coefficient escaping the span (or sitting above the diagonal) beyond
// leak_tol raises StabilityViolation.
template <class R>
struct PhiMatrix {
  BasisIndex basis;
  Mat<Cx<R>> t;                   // upper triangular
  std::vector<Cx<R>> resonance;   // <lambda, basis[j]> per column
};

template <class R>
PhiMatrix<R> phi_matrix(const SpectralDecomposition<R>& dec, std::vector<MultiIndex> basis,
                        double prune_tol = 1e-14, double leak_tol = 1e-9) {
  BasisIndex bi(std::move(basis));
  const int n = bi.size();
  PhiMatrix<R> out{std::move(bi), Mat<Cx<R>>(n, n), {}};
  out.resonance.reserve(n);
  for (int j = 0; j < n; ++j) {
    out.resonance.push_back(resonance_value(dec, out.basis.at(j)));
    UPolynomial<R> img = phi_apply(dec, UPolynomial<R>::monomial(out.basis.at(j)), prune_tol);
    for (const auto& [g, w] : img.terms) {
      int i = out.basis.find(g);
      if (i < 0 || i > j) {
        if (is_zero(w, leak_tol)) continue;
        throw StabilityViolation("Phi(u^" + to_string(out.basis.at(j)) + ") has coefficient " +
                                 to_string(w) + " at " + to_string(g) +
                                 ", outside the requested span");
      }
      out.t(i, j) = w;
    }
  }
  return out;
}

// The ordered prefix {beta : beta <= alpha}, the natural Phi-stable span of
// a monomial.  alpha must appear; it becomes the last element.
inline std::vector<MultiIndex> span_of(const MultiIndex& alpha) {
  std::vector<MultiIndex> out;
  for (auto& b : basis_upto(static_cast<int>(alpha.size()), degree(alpha))) {
    bool stop = b == alpha;
    if (order_less(b, alpha) || stop) out.push_back(std::move(b));
    if (stop) break;
  }
  return out;
}

}  // namespace urnlab
