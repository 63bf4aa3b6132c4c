#pragma once

// Exact moment evolution and growth-rate checks.  The one-step identity
// E[f(X_{n+1}) | X_n] = f(X_n) + Phi(f)(X_n) / (u_1(X0) + n) turns expected
// monomial values over a downward-closed basis into a deterministic linear
// recursion: the vector of E u^beta(X_n) is advanced by the (triangular)
// matrix of Phi divided by the current total content.  On top of the
// recursion sit observable conversions (composition monomials in the
// original units), decade-trend proxies for the n^a log^b n growth bounds,
// and the scaled covariance estimate.

#include <urnlab/linalg.hpp>
#include <urnlab/multi_index.hpp>
#include <urnlab/numeric.hpp>
#include <urnlab/phi.hpp>
#include <urnlab/polynomial.hpp>
#include <urnlab/reduction.hpp>
#include <urnlab/spectral.hpp>
#include <urnlab/urn.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace urnlab {

// The n log^nu n covariance scaling only applies below the large regime.
struct NotSmall : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct MomentOptions {
  double prune_tol = 1e-14;  // dropped when expanding operator images (float)
  double leak_tol = 1e-9;    // triangularity enforcement in phi_matrix
  long max_basis = 20'000;   // largest tracked monomial basis
};

enum class SeriesMode { Exact, MonteCarlo, Oracle };

template <class R>
struct MomentSeries {
  std::string label;
  SeriesMode mode = SeriesMode::Exact;
  std::vector<long> n;
  std::vector<Cx<R>> values;
};

namespace detail {

inline std::vector<MultiIndex> moment_basis(int s, int degree_cap, long max_basis) {
  std::vector<MultiIndex> basis = basis_upto(s, degree_cap);
  if (static_cast<long>(basis.size()) > max_basis)
    throw BudgetExceeded("moment recursion: basis of " + std::to_string(basis.size()) +
                         " monomials exceeds the budget of " + std::to_string(max_basis));
  return basis;
}

}  // namespace detail

// Drives the moment vector mu[j] = E u^{basis[j]}(X_n / m) forward in n.
// Construction fixes the monomial basis (every exponent up to degree_cap);
// advancing costs one triangular matrix-vector product per draw.
template <class R>
class MomentRecursion {
 public:
  MomentRecursion(const SpectralDecomposition<R>& dec, const UrnSpecT<R>& spec, int degree_cap,
                  MomentOptions opt = {})
      : phi_(phi_matrix(dec, detail::moment_basis(dec.s, degree_cap, opt.max_basis),
                        opt.prune_tol, opt.leak_tol)) {
    if (dec.s != spec.colors())
      throw std::invalid_argument("moment recursion: decomposition and spec disagree on colors");
    const UrnSpecT<R> norm = normalized(spec);
    mass_ = R(0);
    for (const R& xi : norm.initial) mass_ += xi;
    Vec<Cx<R>> y(static_cast<std::size_t>(dec.s), Cx<R>{});
    for (int j = 0; j < dec.s; ++j)
      for (int i = 0; i < dec.s; ++i)
        y[static_cast<std::size_t>(j)] += dec.u(j, i) * Cx<R>{norm.initial[static_cast<std::size_t>(i)], R(0)};
    mu_.assign(static_cast<std::size_t>(phi_.basis.size()), Cx<R>{});
    for (int p = 0; p < phi_.basis.size(); ++p) {
      const MultiIndex& b = phi_.basis.at(p);
      Cx<R> t{R(1), R(0)};
      for (int j = 0; j < dec.s; ++j)
        if (b[static_cast<std::size_t>(j)] > 0)
          t *= cx_pow(y[static_cast<std::size_t>(j)], b[static_cast<std::size_t>(j)]);
      mu_[static_cast<std::size_t>(p)] = t;
    }
  }

  const BasisIndex& basis() const { return phi_.basis; }
  long n() const { return n_; }
  // Initial normalized content u_1(X0 / m); the content at time n is this plus n.
  const R& initial_content() const { return mass_; }
  // E u^{basis[j]}(X_n / m) for every tracked position.
  const Vec<Cx<R>>& moments() const { return mu_; }

  void advance(long target) {
    if (target < n_)
      throw std::invalid_argument("moment recursion cannot run backwards");
    while (n_ < target) step();
  }

  // E f(X_n / m); every monomial of f must lie in the tracked basis.
  Cx<R> expectation(const UPolynomial<R>& f) const {
    Cx<R> acc{};
    for (const auto& [b, c] : f.terms) {
      const int pos = phi_.basis.find(b);
      if (pos < 0)
        throw std::invalid_argument("moment recursion: observable term u^" + to_string(b) +
                                    " is outside the tracked basis");
      acc += c * mu_[static_cast<std::size_t>(pos)];
    }
    return acc;
  }

  // Expectation of a coordinate vector over a prefix of the basis.
  Cx<R> expectation(const Vec<Cx<R>>& coords) const {
    if (coords.size() > mu_.size())
      throw std::invalid_argument("moment recursion: coordinate vector is longer than the basis");
    Cx<R> acc{};
    for (std::size_t i = 0; i < coords.size(); ++i) acc += coords[i] * mu_[i];
    return acc;
  }

 private:
  void step() {
    const int dim = phi_.basis.size();
    const R denom = mass_ + real_traits<R>::from_int(n_);
    const Cx<R> w{R(1) / denom, R(0)};
    Vec<Cx<R>> inc(static_cast<std::size_t>(dim), Cx<R>{});
    for (int j = 0; j < dim; ++j) {
      Cx<R> acc{};
      for (int i = 0; i <= j; ++i) {
        const Cx<R>& t = phi_.t(i, j);
        if (t == Cx<R>{}) continue;
        acc += t * mu_[static_cast<std::size_t>(i)];
      }
      inc[static_cast<std::size_t>(j)] = acc * w;
    }
    for (int j = 0; j < dim; ++j) mu_[static_cast<std::size_t>(j)] += inc[static_cast<std::size_t>(j)];
    ++n_;
  }

  PhiMatrix<R> phi_;
  R mass_{};
  long n_ = 0;
  Vec<Cx<R>> mu_;
};

// E f(X_n / m) for n = 0..n_max.
template <class R>
MomentSeries<R> exact_moment_series(const UPolynomial<R>& f, long n_max,
                                    const SpectralDecomposition<R>& dec, const UrnSpecT<R>& spec,
                                    const MomentOptions& opt = {}) {
  if (f.vars != dec.s)
    throw std::invalid_argument("exact_moment_series: variable count mismatch");
  if (n_max < 0) throw std::invalid_argument("exact_moment_series: negative horizon");
  MomentRecursion<R> rec(dec, spec, f.degree(), opt);
  MomentSeries<R> out;
  out.label = f.str();
  out.mode = SeriesMode::Exact;
  out.n.reserve(static_cast<std::size_t>(n_max) + 1);
  out.values.reserve(static_cast<std::size_t>(n_max) + 1);
  for (long n = 0; n <= n_max; ++n) {
    rec.advance(n);
    out.n.push_back(n);
    out.values.push_back(rec.expectation(f));
  }
  return out;
}

// The composition monomial x^gamma rewritten as a polynomial in the dual
// coordinates u_1..u_s (for the normalized process x = X / m).
template <class R>
UPolynomial<R> composition_monomial(const SpectralDecomposition<R>& dec, const MultiIndex& gamma) {
  if (static_cast<int>(gamma.size()) != dec.s)
    throw std::invalid_argument("composition_monomial: exponent length mismatch");
  UPolynomial<R> out = UPolynomial<R>::constant(dec.s, Cx<R>{R(1), R(0)});
  for (int i = 0; i < dec.s; ++i) {
    if (gamma[static_cast<std::size_t>(i)] < 0)
      throw std::invalid_argument("composition_monomial: negative exponent");
    if (gamma[static_cast<std::size_t>(i)] == 0) continue;
    UPolynomial<R> lin(dec.s);
    for (int j = 0; j < dec.s; ++j) lin.add_term(unit_index(dec.s, j), dec.v(i, j));
    for (int k = 0; k < gamma[static_cast<std::size_t>(i)]; ++k) out = out * lin;
  }
  return out;
}

// E X_n^gamma in the original (unnormalized) units, n = 0..n_max.
template <class R>
MomentSeries<R> composition_moment_series(const MultiIndex& gamma, long n_max,
                                          const SpectralDecomposition<R>& dec,
                                          const UrnSpecT<R>& spec, const MomentOptions& opt = {}) {
  MomentSeries<R> out =
      exact_moment_series(composition_monomial(dec, gamma), n_max, dec, spec, opt);
  R m = R(0);
  for (int j = 0; j < spec.colors(); ++j) m += spec.replacement(0, j);
  Cx<R> scale{R(1), R(0)};
  for (int k = 0; k < degree(gamma); ++k) scale *= Cx<R>{m, R(0)};
  for (Cx<R>& v : out.values) v *= scale;
  out.label = "X^" + to_string(gamma);
  return out;
}

// k-th moment of the standard normal distribution: (k-1)!! for even k, 0 odd.
inline double gaussian_moment(int k) {
  if (k < 0) throw std::invalid_argument("gaussian_moment: negative order");
  if (k % 2 == 1) return 0.0;
  double out = 1.0;
  for (int j = k - 1; j >= 2; j -= 2) out *= j;
  return out;
}

// n in {2^lo, ..., 2^hi}: wide enough to separate the comparison decades.
inline std::vector<long> default_moment_grid(int lo = 4, int hi = 17) {
  if (lo < 1 || hi < lo || hi > 62)
    throw std::invalid_argument("default_moment_grid: bad exponent range");
  std::vector<long> grid;
  grid.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int j = lo; j <= hi; ++j) grid.push_back(1L << j);
  return grid;
}

inline double growth_bound(long n, double exponent, double log_exponent) {
  const double x = static_cast<double>(n);
  return std::pow(x, exponent) * std::pow(std::log(x + 2.0), log_exponent);
}

// Decade-window comparison of |value| against n^exponent log^log_exponent(n+2).
// `bounded` compares the last decade of the grid with the first decade at or
// beyond n = 100 (transients excluded); `divergent` compares it with the very
// first decade, where a genuine growth factor has had the longest run.
struct MomentTrend {
  std::string label;
  double exponent = 0.0;
  double log_exponent = 0.0;
  std::vector<long> grid;
  std::vector<double> ratios;
  double early_max = 0.0;  // max ratio over [grid front, 10x grid front]
  double head_max = 0.0;   // max ratio over the first decade at or beyond n = 100
  double tail_max = 0.0;   // max ratio over [grid back / 10, grid back]
  double sup = 0.0;
  bool bounded = false;    // tail_max <= 2 head_max
  bool divergent = false;  // tail_max >= 2 early_max, with a nonzero tail
};

inline MomentTrend trend_against_bound(std::string label, std::vector<long> grid,
                                       const std::vector<double>& magnitude, double exponent,
                                       double log_exponent) {
  if (grid.size() != magnitude.size())
    throw std::invalid_argument("trend_against_bound: grid and magnitude sizes differ");
  if (grid.size() < 4) throw std::invalid_argument("trend_against_bound: grid too short");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= 0)
      throw std::invalid_argument("trend_against_bound: grid values must be positive");
    if (i > 0 && grid[i] <= grid[i - 1])
      throw std::invalid_argument("trend_against_bound: grid must be strictly increasing");
  }
  MomentTrend t;
  t.label = std::move(label);
  t.exponent = exponent;
  t.log_exponent = log_exponent;
  t.grid = std::move(grid);
  t.ratios.reserve(t.grid.size());
  for (std::size_t i = 0; i < t.grid.size(); ++i)
    t.ratios.push_back(magnitude[i] / growth_bound(t.grid[i], exponent, log_exponent));
  long head = -1;
  for (long n : t.grid)
    if (n >= 100) {
      head = n;
      break;
    }
  if (head < 0)
    throw std::invalid_argument("trend_against_bound: no grid point at or beyond n = 100");
  const long early = t.grid.front();
  const long last = t.grid.back();
  if (10 * head >= last / 10 || 10 * early >= last / 10)
    throw std::invalid_argument("trend_against_bound: comparison decades overlap; extend the grid");
  for (std::size_t i = 0; i < t.grid.size(); ++i) {
    const long n = t.grid[i];
    const double r = t.ratios[i];
    t.sup = std::max(t.sup, r);
    if (n <= 10 * early) t.early_max = std::max(t.early_max, r);
    if (n >= head && n <= 10 * head) t.head_max = std::max(t.head_max, r);
    if (n >= last / 10) t.tail_max = std::max(t.tail_max, r);
  }
  t.bounded = t.tail_max <= 2.0 * t.head_max;
  t.divergent = t.tail_max > 0.0 && t.tail_max >= 2.0 * t.early_max;
  return t;
}

// |E Q_alpha(X_n / m)| against n^{Re <lambda,alpha>} log^{nu_alpha}(n+2).
template <class R>
MomentTrend reduced_moment_trend(const MultiIndex& alpha, const std::vector<long>& grid,
                                 const SpectralDecomposition<R>& dec, const UrnSpecT<R>& spec,
                                 const MomentOptions& opt = {}) {
  ReductionOptions ropt;
  ropt.prune_tol = opt.prune_tol;
  ropt.leak_tol = opt.leak_tol;
  ReductionEngine<R> engine(dec, degree(alpha), ropt);
  const Vec<Cx<R>> q = engine.coords(alpha);
  const Cx<R> eigenvalue = resonance_value(dec, alpha);
  const int nu = engine.nilpotence(alpha);
  MomentRecursion<R> rec(dec, spec, degree(alpha), opt);
  std::vector<double> mags;
  mags.reserve(grid.size());
  for (long n : grid) {
    rec.advance(n);
    mags.push_back(mag(rec.expectation(q)));
  }
  return trend_against_bound("Q^" + to_string(alpha), grid, mags, approx(eigenvalue.re),
                             static_cast<double>(nu));
}

struct PowerMomentReport {
  std::vector<MomentTrend> trends;
  std::vector<std::string> violations;
  bool ok = false;
};

// Checks every strictly small power against n^{|alpha|/2} and every strictly
// critical power against (n log^{2d+1}(n+2))^{|alpha|/2} over the grid.
template <class R>
PowerMomentReport power_moment_trends(const SpectralDecomposition<R>& dec,
                                      const UrnSpecT<R>& spec, int degree_cap,
                                      const std::vector<long>& grid,
                                      const MomentOptions& opt = {}) {
  const UrnClassification<R> cls = classify(dec);
  if (cls.kind == UrnKind::Large)
    throw NotSmall("power moment bounds apply to small urns only");
  MomentRecursion<R> rec(dec, spec, degree_cap, opt);
  std::vector<Vec<Cx<R>>> snapshots;
  snapshots.reserve(grid.size());
  for (long n : grid) {
    rec.advance(n);
    snapshots.push_back(rec.moments());
  }
  PowerMomentReport rep;
  const BasisIndex& basis = rec.basis();
  for (int p = 0; p < basis.size(); ++p) {
    const MultiIndex& alpha = basis.at(p);
    if (degree(alpha) == 0) continue;
    double log_exponent = 0.0;
    if (is_strictly_small_power(dec, alpha)) {
      log_exponent = 0.0;
    } else if (is_strictly_critical_power(dec, alpha)) {
      log_exponent = (2.0 * cls.d + 1.0) * degree(alpha) / 2.0;
    } else {
      continue;
    }
    std::vector<double> mags;
    mags.reserve(grid.size());
    for (const auto& snap : snapshots) mags.push_back(mag(snap[static_cast<std::size_t>(p)]));
    MomentTrend t = trend_against_bound("u^" + to_string(alpha), grid, mags,
                                        degree(alpha) / 2.0, log_exponent);
    if (!t.bounded)
      rep.violations.push_back(t.label + ": tail ratio " + std::to_string(t.tail_max) +
                               " exceeds twice the settled head ratio " +
                               std::to_string(t.head_max));
    rep.trends.push_back(std::move(t));
  }
  rep.ok = rep.violations.empty();
  return rep;
}

// Cov(X_n) / (n log^nu(n+2)) in the original units, with a half-horizon
// stability diagnostic.
struct CovarianceEstimate {
  Mat<double> sigma;
  int nu = 0;
  long n = 0;
  double rel_change = 0.0;  // max entry change from the n/2 estimate, relative to the final scale
};

template <class R>
CovarianceEstimate estimate_sigma(const SpectralDecomposition<R>& dec, const UrnSpecT<R>& spec,
                                  long n_max, const MomentOptions& opt = {}) {
  const UrnClassification<R> cls = classify(dec);
  if (cls.kind == UrnKind::Large)
    throw NotSmall("covariance scaling applies to small urns only");
  if (n_max < 8) throw std::invalid_argument("estimate_sigma: horizon too short");
  const int s = dec.s;
  MomentRecursion<R> rec(dec, spec, 2, opt);
  R m = R(0);
  for (int j = 0; j < s; ++j) m += spec.replacement(0, j);
  const double m2 = approx(m) * approx(m);
  std::vector<UPolynomial<R>> lin;
  lin.reserve(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) lin.push_back(composition_monomial(dec, unit_index(s, i)));
  auto scaled_cov = [&](long n) {
    rec.advance(n);
    Vec<Cx<R>> first(static_cast<std::size_t>(s), Cx<R>{});
    for (int i = 0; i < s; ++i) first[static_cast<std::size_t>(i)] = rec.expectation(lin[static_cast<std::size_t>(i)]);
    Mat<double> c(s, s);
    const double denom =
        static_cast<double>(n) * std::pow(std::log(static_cast<double>(n) + 2.0), cls.nu);
    for (int i = 0; i < s; ++i)
      for (int j = i; j < s; ++j) {
        MultiIndex g = add(unit_index(s, i), unit_index(s, j));
        Cx<R> second = rec.expectation(composition_monomial(dec, g));
        Cx<R> cov = second - first[static_cast<std::size_t>(i)] * first[static_cast<std::size_t>(j)];
        const double value = m2 * approx(cov.re) / denom;
        c(i, j) = value;
        c(j, i) = value;
      }
    return c;
  };
  CovarianceEstimate out;
  const Mat<double> half = scaled_cov(n_max / 2);
  out.sigma = scaled_cov(n_max);
  out.nu = cls.nu;
  out.n = n_max;
  double scale = 0.0;
  double diff = 0.0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      scale = std::max(scale, std::abs(out.sigma(i, j)));
      diff = std::max(diff, std::abs(out.sigma(i, j) - half(i, j)));
    }
  out.rel_change = scale > 0.0 ? diff / scale : 0.0;
  return out;
}

}  // namespace urnlab
