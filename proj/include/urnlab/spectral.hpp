#pragma once

// Spectral analysis of the replacement operator.  The analysis works with the
// time-normalized matrix B = R/m, whose largest eigenvalue is exactly 1.
// Dual Jordan coordinates u_k are covectors on composition space; their
// coordinate columns form Jordan chains of B:
//
//   (B - lambda) u~_k = 0            for the first index of a block,
//   (B - lambda) u~_k = u~_{k-1}     for the chained indices after it.
//
// u_1 is always the all-ones covector (total content) and v_1, the first
// column of the dual basis V = U^{-1}, is the stationary composition.  Blocks
// are ordered: the content block first, then by descending real part,
// ascending imaginary part, descending size.
//
// Two arithmetic modes share the assembly code through a kernel policy:
// exact rationals (characteristic polynomial + rational root extraction,
// exact Gaussian kernels) and doubles (Eigen eigenvalues, SVD rank
// decisions).

#include <urnlab/linalg.hpp>
#include <urnlab/numeric.hpp>
#include <urnlab/urn.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace urnlab {

struct IllConditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExactSpectrumUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Coefficients of det(xI - A), ascending powers, monic (Faddeev-LeVerrier).
inline std::vector<Rat> char_poly(const Mat<Rat>& a) {
  const int n = a.rows();
  std::vector<Rat> c(n + 1);
  c[n] = 1;
  Mat<Rat> m = Mat<Rat>::identity(n);
  for (int k = 1; k <= n; ++k) {
    m = a * m;
    Rat tr(0);
    for (int i = 0; i < n; ++i) tr += m(i, i);
    c[n - k] = -tr / k;
    for (int i = 0; i < n; ++i) m(i, i) += c[n - k];
  }
  return c;
}

namespace detail {

inline std::optional<std::vector<BigInt>> divisors(BigInt v) {
  if (v < 0) v = -v;
  if (v == 0 || v > BigInt("1000000000000")) return std::nullopt;
  std::vector<BigInt> out;
  for (BigInt i = 1; i * i <= v; ++i) {
    if (v % i == 0) {
      out.push_back(i);
      out.push_back(v / i);
    }
  }
  return out;
}

inline Rat poly_eval(const std::vector<Rat>& c, const Rat& x) {
  Rat acc(0);
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

// Divide by (x - r); callers must know r is a root (remainder zero).
inline std::vector<Rat> poly_deflate(const std::vector<Rat>& c, const Rat& r) {
  const int deg = static_cast<int>(c.size()) - 1;
  std::vector<Rat> d(deg);
  Rat carry = c[deg];
  for (int i = deg - 1; i >= 0; --i) {
    d[i] = carry;
    carry = c[i] + r * carry;
  }
  return d;
}

}  // namespace detail

// Complete rational factorization of a rational-coefficient polynomial.
// Throws ExactSpectrumUnavailable when an irrational or complex factor
// remains (callers then fall back to floating point).
inline std::map<Rat, int> rational_roots(std::vector<Rat> c) {
  while (!c.empty() && c.back() == 0) c.pop_back();
  if (c.empty()) throw std::invalid_argument("rational_roots: zero polynomial");
  std::map<Rat, int> roots;
  while (c.size() > 1 && c[0] == 0) {
    ++roots[Rat(0)];
    c.erase(c.begin());
  }
  if (c.size() == 1) return roots;

  BigInt scale = 1;
  for (const Rat& q : c) scale = boost::multiprecision::lcm(scale, rat_den(q));
  BigInt lead = rat_num(c.back() * scale);
  BigInt tail = rat_num(c.front() * scale);

  auto num_div = detail::divisors(tail);
  auto den_div = detail::divisors(lead);
  if (!num_div || !den_div)
    throw ExactSpectrumUnavailable("rational root search out of range");

  for (const BigInt& p : *num_div) {
    for (const BigInt& q : *den_div) {
      for (int sign : {1, -1}) {
        if (c.size() == 1) break;
        Rat cand = Rat(sign * p, q);
        while (c.size() > 1 && detail::poly_eval(c, cand) == 0) {
          ++roots[cand];
          c = detail::poly_deflate(c, cand);
        }
      }
    }
  }
  if (c.size() > 1)
    throw ExactSpectrumUnavailable("spectrum has an irrational or non-real factor");
  return roots;
}

template <class R>
struct JordanBlockInfo {
  Cx<R> eigenvalue;
  int first = 0;  // index of the block's eigenvector row in U
  int size = 1;
};

template <class R>
struct SpectralDecomposition {
  int s = 0;
  Mat<R> b;                        // normalized replacement matrix R/m
  std::vector<Cx<R>> eigenvalues;  // one per index, in block order
  std::vector<char> chained;       // chained[k]: u_k feeds from u_{k-1}
  std::vector<JordanBlockInfo<R>> blocks;
  Mat<Cx<R>> u;       // rows: dual Jordan covectors; row 0 is all ones
  Mat<Cx<R>> v;       // columns: dual basis; column 0 is the stationary composition
  Mat<Cx<R>> u_of_w;  // (j, k): u_j evaluated on normalized replacement row k

  int block_of(int index) const {
    for (std::size_t bi = 0; bi < blocks.size(); ++bi)
      if (index >= blocks[bi].first && index < blocks[bi].first + blocks[bi].size)
        return static_cast<int>(bi);
    throw std::out_of_range("block_of: index outside decomposition");
  }
};

// ---------------------------------------------------------------------------
// Kernel policies: how to compute kernels and ranks in each arithmetic mode.

struct ExactLinPolicy {
  using Real = Rat;
  using K = Cx<Rat>;
  std::vector<Vec<K>> kernel_of(const Mat<K>& m) const { return kernel(m, 0.0); }
  int rank_of(Mat<K> m) const { return rank(std::move(m), 0.0); }
};

namespace detail {

inline Eigen::MatrixXcd eigen_from(const Mat<CxD>& m) {
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j) = std::complex<double>(m(i, j).re, m(i, j).im);
  return out;
}

}  // namespace detail

struct FloatLinPolicy {
  using Real = double;
  using K = CxD;
  double tol = 1e-9;  // relative singular value threshold for rank decisions

  std::vector<Vec<K>> kernel_of(const Mat<K>& m) const {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(detail::eigen_from(m), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double floor_ = sv.size() > 0 ? tol * sv(0) : 0.0;
    std::vector<Vec<K>> out;
    for (int j = 0; j < m.cols(); ++j) {
      if (j < sv.size() && sv(j) > floor_) continue;
      Vec<K> col(m.cols());
      for (int i = 0; i < m.cols(); ++i)
        col[i] = CxD{svd.matrixV()(i, j).real(), svd.matrixV()(i, j).imag()};
      out.push_back(std::move(col));
    }
    return out;
  }

  int rank_of(const Mat<K>& m) const {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(detail::eigen_from(m));
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double floor_ = tol * sv(0);
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
      if (sv(i) > floor_) ++r;
    return r;
  }
};

namespace detail {

template <class K>
Mat<K> columns_matrix(int dim, const std::vector<Vec<K>>& cols) {
  Mat<K> m(dim, static_cast<int>(cols.size()));
  for (int j = 0; j < static_cast<int>(cols.size()); ++j)
    for (int i = 0; i < dim; ++i) m(i, j) = cols[j][i];
  return m;
}

// Jordan chains of b at one eigenvalue.  Each returned chain is in dual
// order: eigenvector first, then the vectors it feeds from, so chain[q] =
// (b - lambda)^(size-1-q) top.  Chains come sorted by descending length.
template <class Policy>
std::vector<std::vector<Vec<typename Policy::K>>> jordan_chains(
    const Mat<typename Policy::K>& b, const Cx<typename Policy::Real>& lambda, int mult,
    const Policy& pol) {
  using K = typename Policy::K;
  const int s = b.rows();
  Mat<K> shifted = b;
  for (int i = 0; i < s; ++i) shifted(i, i) -= K{lambda.re, lambda.im};

  std::vector<Mat<K>> powers{Mat<K>::identity(s)};
  std::vector<std::vector<Vec<K>>> kernels{{}};  // kernels[p] = basis of ker (b-lambda)^p
  std::vector<int> dims{0};
  while (dims.back() < mult) {
    if (static_cast<int>(dims.size()) > s)
      throw IllConditioned("generalized eigenspace smaller than eigenvalue multiplicity");
    powers.push_back(powers.back() * shifted);
    kernels.push_back(pol.kernel_of(powers.back()));
    int d = static_cast<int>(kernels.back().size());
    if (d <= dims.back())
      throw IllConditioned("kernel dimensions stalled while building Jordan chains");
    dims.push_back(d);
  }
  const int pmax = static_cast<int>(dims.size()) - 1;

  struct Building {
    std::vector<Vec<K>> top_first;  // [top, N top, N^2 top, ...]
  };
  std::vector<Building> built;
  for (int p = pmax; p >= 1; --p) {
    std::vector<Vec<K>> mod = kernels[p - 1];
    for (const auto& ch : built) {
      // element of height p in an existing longer chain
      mod.push_back(ch.top_first[ch.top_first.size() - p]);
    }
    int have = static_cast<int>(built.size());
    int need = (dims[p] - dims[p - 1]) - have;
    int cur_rank = pol.rank_of(columns_matrix(s, mod));
    for (const auto& cand : kernels[p]) {
      if (need == 0) break;
      std::vector<Vec<K>> trial = mod;
      trial.push_back(cand);
      int r = pol.rank_of(columns_matrix(s, trial));
      if (r > cur_rank) {
        cur_rank = r;
        mod.push_back(cand);
        Building nb;
        nb.top_first.push_back(cand);
        for (int q = 1; q < p; ++q) nb.top_first.push_back(matvec(shifted, nb.top_first.back()));
        built.push_back(std::move(nb));
        --need;
      }
    }
    if (need != 0) throw IllConditioned("could not complete a Jordan chain basis");
  }

  std::stable_sort(built.begin(), built.end(), [](const Building& a, const Building& b2) {
    return a.top_first.size() > b2.top_first.size();
  });
  std::vector<std::vector<Vec<K>>> out;
  for (auto& ch : built) {
    std::reverse(ch.top_first.begin(), ch.top_first.end());
    out.push_back(std::move(ch.top_first));
  }
  return out;
}

// Shared assembly: chains -> ordered blocks -> U, V, invariant checks.
template <class R, class Policy>
SpectralDecomposition<R> assemble(const Mat<R>& b, const std::vector<std::pair<Cx<R>, int>>& spectrum,
                                  const Policy& pol, double check_tol) {
  using K = Cx<R>;
  const int s = b.rows();
  Mat<K> bc = complexify(b);

  struct PendingBlock {
    Cx<R> eigenvalue;
    std::vector<Vec<K>> rows;  // u-order
  };
  std::vector<PendingBlock> pend;
  int total = 0;
  for (const auto& [lambda, mult] : spectrum) {
    auto chains = jordan_chains(bc, lambda, mult, pol);
    for (auto& ch : chains) {
      pend.push_back({lambda, std::move(ch)});
      total += static_cast<int>(pend.back().rows.size());
    }
  }
  if (total != s) throw IllConditioned("Jordan blocks do not fill the space");

  const Cx<R> one{R(1), R(0)};
  int perron = -1;
  for (std::size_t i = 0; i < pend.size(); ++i) {
    if (pend[i].eigenvalue == one) {
      if (perron >= 0 || pend[i].rows.size() != 1)
        throw IllConditioned("content eigenvalue 1 is not simple; spec is reducible or degenerate");
      perron = static_cast<int>(i);
    }
  }
  if (perron < 0) throw IllConditioned("content eigenvalue 1 not found; spec is not balanced");
  // The all-ones covector spans the eigenspace at 1; use it exactly.
  pend[perron].rows[0] = Vec<K>(s, K{R(1), R(0)});

  std::stable_sort(pend.begin(), pend.end(), [&](const PendingBlock& x, const PendingBlock& y) {
    bool xp = x.eigenvalue == one, yp = y.eigenvalue == one;
    if (xp != yp) return xp;
    if (x.eigenvalue.re != y.eigenvalue.re) return y.eigenvalue.re < x.eigenvalue.re;
    if (x.eigenvalue.im != y.eigenvalue.im) return x.eigenvalue.im < y.eigenvalue.im;
    return x.rows.size() > y.rows.size();
  });

  SpectralDecomposition<R> dec;
  dec.s = s;
  dec.b = b;
  dec.u = Mat<K>(s, s);
  int row = 0;
  for (const auto& blk : pend) {
    dec.blocks.push_back({blk.eigenvalue, row, static_cast<int>(blk.rows.size())});
    for (std::size_t q = 0; q < blk.rows.size(); ++q) {
      dec.eigenvalues.push_back(blk.eigenvalue);
      dec.chained.push_back(q > 0 ? 1 : 0);
      for (int i = 0; i < s; ++i) dec.u(row, i) = blk.rows[q][i];
      ++row;
    }
  }

  Lu<K> lu(dec.u, 1e-12);
  if (lu.singular()) throw IllConditioned("dual covectors are not independent");
  dec.v = lu.inverse();

  // Invariant checks: dual pairing, chain relations, positive stationary
  // composition.  Exact mode verifies these exactly.
  Mat<K> uv = dec.u * dec.v;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      K want = i == j ? K{R(1), R(0)} : K{};
      if (!is_zero(uv(i, j) - want, check_tol))
        throw IllConditioned("dual basis check U*V = I failed");
    }
  const double rel = check_tol * std::max(1.0, max_mag(dec.u));
  for (int k = 0; k < s; ++k) {
    for (int i = 0; i < s; ++i) {
      K acc{};
      for (int j = 0; j < s; ++j) acc += bc(i, j) * dec.u(k, j);
      acc -= dec.eigenvalues[k] * dec.u(k, i);
      if (dec.chained[k]) acc -= dec.u(k - 1, i);
      if (!is_zero(acc, rel)) throw IllConditioned("Jordan chain relation failed");
    }
  }
  for (int i = 0; i < s; ++i) {
    if (!real_traits<R>::is_zero(dec.v(i, 0).im, check_tol) || !(approx(dec.v(i, 0).re) > 0))
      throw IllConditioned("stationary composition is not strictly positive");
  }

  dec.u_of_w = dec.u * transpose(bc);
  return dec;
}

}  // namespace detail

// Exact decomposition; requires a validated spec with rational entries whose
// normalized spectrum is rational.
inline SpectralDecomposition<Rat> decompose_exact(const UrnSpecT<Rat>& spec) {
  UrnSpecT<Rat> nu = normalized(spec);
  auto roots = rational_roots(char_poly(nu.replacement));
  int total = 0;
  std::vector<std::pair<Cx<Rat>, int>> spectrum;
  for (const auto& [r, mult] : roots) {
    spectrum.push_back({Cx<Rat>(r), mult});
    total += mult;
  }
  if (total != spec.colors())
    throw ExactSpectrumUnavailable("spectrum has an irrational or non-real factor");
  return detail::assemble(nu.replacement, spectrum, ExactLinPolicy{}, 0.0);
}

// Floating point decomposition.  Eigenvalues within eigen_tol of one another
// are clustered; clusters closer than 2*eigen_tol are rejected as ambiguous.
inline SpectralDecomposition<double> decompose_float(const UrnSpec& spec, double eigen_tol = 1e-7,
                                                     double rank_tol = 1e-9) {
  UrnSpec nu = normalized(spec);
  const int s = spec.colors();
  Eigen::MatrixXd bm(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) bm(i, j) = nu.replacement(i, j);
  Eigen::EigenSolver<Eigen::MatrixXd> es(bm);
  if (es.info() != Eigen::Success) throw IllConditioned("eigenvalue iteration failed");

  std::vector<std::complex<double>> ev(s);
  for (int i = 0; i < s; ++i) ev[i] = es.eigenvalues()(i);

  // single-linkage clustering at eigen_tol
  std::vector<int> parent(s);
  for (int i = 0; i < s; ++i) parent[i] = i;
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j)
      if (std::abs(ev[i] - ev[j]) <= eigen_tol) parent[find(i)] = find(j);

  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < s; ++i) groups[find(i)].push_back(i);

  std::vector<std::pair<CxD, int>> spectrum;
  for (const auto& [root, members] : groups) {
    std::complex<double> mean(0, 0);
    for (int i : members) mean += ev[i];
    mean /= static_cast<double>(members.size());
    if (std::abs(mean.imag()) <= eigen_tol) mean = {mean.real(), 0.0};
    spectrum.push_back({CxD{mean.real(), mean.imag()}, static_cast<int>(members.size())});
  }

  // Snap the content eigenvalue to exactly 1 (balance guarantees it).
  int nearest = -1;
  double best = 1e300;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    double d = std::hypot(spectrum[i].first.re - 1.0, spectrum[i].first.im);
    if (d < best) {
      best = d;
      nearest = static_cast<int>(i);
    }
  }
  if (nearest < 0 || best > eigen_tol)
    throw IllConditioned("content eigenvalue 1 not found; spec is not balanced");
  spectrum[nearest].first = CxD{1.0, 0.0};

  // Enforce conjugate symmetry on cluster means for determinism.
  for (auto& [val, mult] : spectrum) {
    if (val.im <= 0) continue;
    for (auto& [other, om] : spectrum) {
      if (std::abs(other.re - val.re) <= eigen_tol && std::abs(other.im + val.im) <= eigen_tol &&
          other.im < 0) {
        double re = 0.5 * (val.re + other.re);
        double im = 0.5 * (val.im - other.im);
        val = CxD{re, im};
        other = CxD{re, -im};
      }
    }
  }

  for (std::size_t i = 0; i < spectrum.size(); ++i)
    for (std::size_t j = i + 1; j < spectrum.size(); ++j) {
      double d = std::hypot(spectrum[i].first.re - spectrum[j].first.re,
                            spectrum[i].first.im - spectrum[j].first.im);
      if (d <= 2 * eigen_tol)
        throw IllConditioned("eigenvalue clusters are inseparable at the requested tolerance");
    }

  Mat<double> b(s, s);
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) b(i, j) = bm(i, j);
  return detail::assemble(b, spectrum, FloatLinPolicy{rank_tol}, 1e-8);
}

// ---------------------------------------------------------------------------
// Classification

enum class UrnKind { StrictlySmall, CriticallySmall, Large };

inline const char* to_string(UrnKind k) {
  switch (k) {
    case UrnKind::StrictlySmall: return "StrictlySmall";
    case UrnKind::CriticallySmall: return "CriticallySmall";
    case UrnKind::Large: return "Large";
  }
  return "?";
}

template <class R>
struct UrnClassification {
  UrnKind kind = UrnKind::StrictlySmall;
  bool has_sigma2 = false;  // false only for single-color urns
  R sigma2{};               // largest non-content real part (normalized units)
  int d = 0;                // largest critical Jordan block size - 1
  int nu = 0;               // 0 strictly small, 2d+1 critically small
  std::vector<Cx<R>> critical;  // distinct eigenvalues with real part 1/2
};

template <class R>
bool is_critical_re(const R& re, double tol) {
  if constexpr (real_traits<R>::exact) {
    (void)tol;
    return re == R(1) / R(2);
  } else {
    return std::abs(re - 0.5) <= tol;
  }
}

template <class R>
UrnClassification<R> classify(const SpectralDecomposition<R>& dec, double tol = 1e-7) {
  UrnClassification<R> out;
  const R half = R(1) / R(2);
  for (std::size_t bi = 1; bi < dec.blocks.size(); ++bi) {
    const auto& blk = dec.blocks[bi];
    if (!out.has_sigma2 || out.sigma2 < blk.eigenvalue.re) {
      out.sigma2 = blk.eigenvalue.re;
      out.has_sigma2 = true;
    }
    if (is_critical_re(blk.eigenvalue.re, tol)) {
      out.d = std::max(out.d, blk.size - 1);
      bool seen = false;
      for (const auto& c : out.critical) seen = seen || c == blk.eigenvalue;
      if (!seen) out.critical.push_back(blk.eigenvalue);
    }
  }
  if (!out.has_sigma2) {
    out.kind = UrnKind::StrictlySmall;  // single color: no non-content spectrum
    return out;
  }
  if (is_critical_re(out.sigma2, tol)) {
    out.kind = UrnKind::CriticallySmall;
    out.nu = 2 * out.d + 1;
  } else if (out.sigma2 < half) {
    out.kind = UrnKind::StrictlySmall;
  } else {
    out.kind = UrnKind::Large;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spectral projections of composition-space vectors

template <class R>
Vec<Cx<R>> project_indices(const SpectralDecomposition<R>& dec, const std::vector<int>& idx,
                           const Vec<Cx<R>>& x) {
  Vec<Cx<R>> out(dec.s, Cx<R>{});
  for (int k : idx) {
    Cx<R> coef{};
    for (int i = 0; i < dec.s; ++i) coef += dec.u(k, i) * x[i];
    for (int i = 0; i < dec.s; ++i) out[i] += dec.v(i, k) * coef;
  }
  return out;
}

enum class SpectralPart { Content, SmallPart, CriticalPart };

template <class R>
Vec<Cx<R>> project(const SpectralDecomposition<R>& dec, SpectralPart part, const Vec<Cx<R>>& x,
                   double tol = 1e-7) {
  std::vector<int> idx;
  for (const auto& blk : dec.blocks) {
    bool content = blk.first == 0;
    bool critical = is_critical_re(blk.eigenvalue.re, tol);
    bool take = (part == SpectralPart::Content && content) ||
                (part == SpectralPart::SmallPart && !content && !critical &&
                 blk.eigenvalue.re < R(1) / R(2)) ||
                (part == SpectralPart::CriticalPart && critical);
    if (!take) continue;
    for (int k = blk.first; k < blk.first + blk.size; ++k) idx.push_back(k);
  }
  return project_indices(dec, idx, x);
}

}  // namespace urnlab
