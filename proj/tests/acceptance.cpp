// End-to-end acceptance gate over the shipped fixture set.  Each numbered
// check prints one PASS/FAIL line with its key figures; the process exits
// nonzero if any check fails.  Usage: acceptance [fixtures-dir]

#include <urnlab/cone.hpp>
#include <urnlab/io.hpp>
#include <urnlab/moments.hpp>
#include <urnlab/montecarlo.hpp>
#include <urnlab/reduction.hpp>
#include <urnlab/rng.hpp>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace urnlab;

namespace {

using Clock = std::chrono::steady_clock;

double secs(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Fixtures {
  UrnSpec strict;    // [[2,1],[1,2]], second eigenvalue below half the balance
  UrnSpec critical;  // [[3,1],[1,3]], second eigenvalue exactly half
  UrnSpec negdiag;   // [[-1,2],[1,0]], tenable with a negative diagonal
  UrnSpec large;     // [[4,1],[1,4]], second eigenvalue above half
  UrnSpec jordan;    // 4 colors, critical 2-chain
};

Fixtures load_fixtures(const std::string& dir) {
  Fixtures f;
  f.strict = load_urn_spec(dir + "/strictly_small2.json");
  f.critical = load_urn_spec(dir + "/critically_small2.json");
  f.negdiag = load_urn_spec(dir + "/negdiag2.json");
  f.large = load_urn_spec(dir + "/large2.json");
  f.jordan = load_urn_spec(dir + "/critical_jordan4.json");
  return f;
}

Rat rat_pow(const Rat& x, int e) {
  Rat out(1);
  for (int i = 0; i < e; ++i) out *= x;
  return out;
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// ---------------------------------------------------------------------------
// 1. Exact moment series against brute-force path enumeration.

Outcome check_series_vs_paths(const Fixtures& fx) {
  const auto t0 = Clock::now();
  long comparisons = 0;
  std::vector<std::string> bad;
  for (const UrnSpec* spec : {&fx.strict, &fx.critical, &fx.negdiag}) {
    const UrnSpecT<Rat> qspec = to_exact(*spec);
    const auto dec = decompose_exact(qspec);
    const std::vector<MultiIndex> gammas = basis_upto(2, 3);
    std::vector<MomentSeries<Rat>> series;
    series.reserve(gammas.size());
    for (const MultiIndex& g : gammas)
      series.push_back(composition_moment_series<Rat>(g, 10, dec, qspec));
    for (int n = 0; n <= 10; ++n) {
      const auto dist = path_distribution(qspec, n);
      for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        Rat want(0);
        for (const auto& [x, p] : dist) {
          Rat term = p;
          for (int i = 0; i < 2; ++i) term *= rat_pow(x[i], gammas[gi][i]);
          want += term;
        }
        const Cx<Rat>& got = series[gi].values[static_cast<std::size_t>(n)];
        if (!(got.re == want) || !(got.im == Rat(0)))
          bad.push_back(spec->name + " X^" + to_string(gammas[gi]) + " at n=" + std::to_string(n));
        ++comparisons;
      }
    }
  }
  const double elapsed = secs(t0);
  Outcome out;
  out.ok = bad.empty() && elapsed < 30.0;
  out.detail = fmt("%ld exact comparisons over 3 specs", comparisons);
  if (!bad.empty()) out.detail += "; first mismatch " + bad.front();
  if (elapsed >= 30.0) out.detail += fmt("; over the 30s budget (%.1fs)", elapsed);
  return out;
}

// ---------------------------------------------------------------------------
// 2. Classification of the fixture suite, exact arithmetic.

Outcome check_classification(const Fixtures& fx) {
  std::vector<std::string> bad;
  auto classify_exact = [](const UrnSpec& s) {
    return classify(decompose_exact(to_exact(s)));
  };

  const auto cs = classify_exact(fx.strict);
  if (cs.kind != UrnKind::StrictlySmall) bad.push_back(fx.strict.name + ": " + to_string(cs.kind));

  const auto cc = classify_exact(fx.critical);
  if (cc.kind != UrnKind::CriticallySmall || cc.d != 0 || cc.nu != 1)
    bad.push_back(fx.critical.name + ": " + to_string(cc.kind) + fmt(" d=%d nu=%d", cc.d, cc.nu));

  const auto vn = validate(to_exact(fx.negdiag));
  const auto cn = classify_exact(fx.negdiag);
  if (!vn.ok()) bad.push_back(fx.negdiag.name + " not tenable: " + vn.describe());
  if (cn.kind != UrnKind::StrictlySmall) bad.push_back(fx.negdiag.name + ": " + to_string(cn.kind));

  const auto cl = classify_exact(fx.large);
  if (cl.kind != UrnKind::Large) bad.push_back(fx.large.name + ": " + to_string(cl.kind));

  const auto cj = classify_exact(fx.jordan);
  if (cj.kind != UrnKind::CriticallySmall || cj.d != 1 || cj.nu != 3)
    bad.push_back(fx.jordan.name + ": " + to_string(cj.kind) + fmt(" d=%d nu=%d", cj.d, cj.nu));

  Outcome out;
  out.ok = bad.empty();
  out.detail = "strict/critical/large kinds, negative diagonal tenable, 4-color chain d=1 nu=3";
  if (!bad.empty()) out.detail = bad.front();
  return out;
}

// ---------------------------------------------------------------------------
// 3. Drift operator: pointwise identity and span stability.

Cx<double> phi_pointwise(const SpectralDecomposition<double>& dec, const UPolynomial<double>& f,
                         const Vec<Cx<double>>& v) {
  Cx<double> acc{};
  for (int k = 0; k < dec.s; ++k) {
    Vec<Cx<double>> shifted = v;
    for (int j = 0; j < dec.s; ++j) shifted[j] += Cx<double>(dec.b(k, j));
    acc += v[k] * (eval(f, dec, shifted) - eval(f, dec, v));
  }
  return acc;
}

Outcome check_operator(const Fixtures& fx) {
  const UrnSpec* all[] = {&fx.strict, &fx.critical, &fx.negdiag, &fx.large, &fx.jordan};
  double worst = 0.0;
  std::vector<std::string> bad;
  int stream = 0;
  for (const UrnSpec* spec : all) {
    const auto dec = decompose_float(*spec);
    RngStream rng(20260817, static_cast<std::uint64_t>(10 + stream++));
    for (int trial = 0; trial < 100; ++trial) {
      UPolynomial<double> f(dec.s);
      for (const MultiIndex& m : basis_upto(dec.s, 4)) {
        const int c = static_cast<int>(rng.next_u64() % 7) - 3;
        if (c != 0) f.add_term(m, Cx<double>{static_cast<double>(c), 0.0});
      }
      Vec<Cx<double>> v(static_cast<std::size_t>(dec.s));
      for (int i = 0; i < dec.s; ++i)
        v[static_cast<std::size_t>(i)] =
            Cx<double>{static_cast<double>(1 + rng.next_u64() % 9), 0.0};
      const Cx<double> got = eval(phi_apply(dec, f), dec, v);
      const Cx<double> want = phi_pointwise(dec, f, v);
      const double rel = mag(got - want) / std::max(1.0, mag(want));
      worst = std::max(worst, rel);
      if (rel > 1e-8)
        bad.push_back(spec->name + fmt(" trial %d deviates by %.2e", trial, rel));
    }
  }
  int columns = 0;
  for (const UrnSpec* spec : all) {
    try {
      const auto dq = decompose_exact(to_exact(*spec));
      columns += phi_matrix(dq, basis_upto(dq.s, 6), 0.0, 0.0).basis.size();
    } catch (const StabilityViolation& e) {
      bad.push_back(spec->name + " span leak: " + e.what());
    }
  }
  Outcome out;
  out.ok = bad.empty();
  out.detail = fmt("500 point identities (max rel %.1e), %d exactly stable spans", worst, columns);
  if (!bad.empty()) out.detail = bad.front();
  return out;
}

// ---------------------------------------------------------------------------
// 4. Reduced polynomials: annihilation order, content products, basis.

Outcome check_reduced_polynomials(const Fixtures& fx) {
  std::vector<std::string> bad;
  long annihilated = 0;
  long round_trips = 0;
  for (const UrnSpec* spec : {&fx.strict, &fx.critical, &fx.negdiag, &fx.jordan}) {
    const auto dq = decompose_exact(to_exact(*spec));
    const int s = dq.s;
    ReductionEngine<Rat> engine(dq, 6);
    const BasisIndex& basis = engine.matrix().basis;

    for (const MultiIndex& alpha : basis.all()) {
      if (degree(alpha) == 0) continue;
      const ReducedPolynomial<Rat> rp = engine.reduce(alpha);

      // (Phi - <lambda,alpha>)^p Q_alpha must stay nonzero up to p = nu and
      // vanish exactly at p = nu + 1, applied in raw polynomial space.
      UPolynomial<Rat> r = rp.q;
      bool early = false;
      for (int p = 0; p < rp.nu; ++p) {
        r = phi_apply(dq, r) - rp.eigenvalue * r;
        if (r.terms.empty()) {
          bad.push_back(spec->name + " u^" + to_string(alpha) +
                        fmt(" vanishes at order %d, claimed nu %d", p + 1, rp.nu));
          early = true;
          break;
        }
      }
      if (early) continue;
      const UPolynomial<Rat> last = phi_apply(dq, r) - rp.eigenvalue * r;
      if (!last.terms.empty()) {
        bad.push_back(spec->name + " u^" + to_string(alpha) +
                      fmt(" survives order %d", rp.nu + 1));
        continue;
      }

      // Unit diagonal and triangular support of the reduced basis.
      const int pos = basis.find(alpha);
      const Vec<Cx<Rat>> q = engine.coords(alpha);
      if (!(q[static_cast<std::size_t>(pos)] == Cx<Rat>{Rat(1), Rat(0)}))
        bad.push_back(spec->name + " u^" + to_string(alpha) + " has a non-unit diagonal");
      for (std::size_t i = static_cast<std::size_t>(pos) + 1; i < q.size(); ++i)
        if (!(q[i] == Cx<Rat>{}))
          bad.push_back(spec->name + " u^" + to_string(alpha) + " leaks above its position");
      ++annihilated;
    }

    // Content powers reduce to the ascending product u1 (u1+1) ... (u1+c-1).
    for (int c = 1; c <= 4; ++c) {
      MultiIndex alpha(static_cast<std::size_t>(s), 0);
      alpha[0] = c;
      const ReducedPolynomial<Rat> rp = engine.reduce(alpha);
      UPolynomial<Rat> want = UPolynomial<Rat>::constant(s, Cx<Rat>{Rat(1), Rat(0)});
      for (int j = 0; j < c; ++j)
        want = want * (UPolynomial<Rat>::monomial(unit_index(s, 0)) +
                       UPolynomial<Rat>::constant(s, Cx<Rat>{Rat(j), Rat(0)}));
      if (!(rp.q == want) || rp.nu != 0)
        bad.push_back(spec->name + fmt(" content power c=%d mismatches the product form", c));
    }

    // Invertibility: each monomial recombines exactly from its reduced basis.
    const int rt_cap = s == 2 ? 6 : 4;
    for (const MultiIndex& alpha : basis.all()) {
      if (degree(alpha) > rt_cap) continue;
      const int pos = basis.find(alpha);
      const Vec<Cx<Rat>> y = engine.monomial_in_reduced_basis(alpha);
      Vec<Cx<Rat>> acc(static_cast<std::size_t>(basis.size()), Cx<Rat>{});
      for (int j = 0; j <= pos; ++j) {
        if (y[static_cast<std::size_t>(j)] == Cx<Rat>{}) continue;
        const Vec<Cx<Rat>> qj = engine.coords(basis.at(j));
        for (std::size_t i = 0; i < acc.size(); ++i)
          acc[i] += y[static_cast<std::size_t>(j)] * qj[i];
      }
      bool match = true;
      for (std::size_t i = 0; i < acc.size(); ++i) {
        const Cx<Rat> want =
            static_cast<int>(i) == pos ? Cx<Rat>{Rat(1), Rat(0)} : Cx<Rat>{};
        if (!(acc[i] == want)) match = false;
      }
      if (!match)
        bad.push_back(spec->name + " u^" + to_string(alpha) + " fails to recombine");
      ++round_trips;
    }
  }
  Outcome out;
  out.ok = bad.empty();
  out.detail = fmt("%ld exponents annihilated at order nu+1, products exact, %ld recombinations",
                   annihilated, round_trips);
  if (!bad.empty()) out.detail = bad.front() + fmt(" (+%zu more)", bad.size() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// 5. Shifted images stay inside the allowed support sets.

Outcome check_support_sets(const Fixtures& fx) {
  std::vector<std::string> bad;
  long checked = 0;
  for (const UrnSpec* spec : {&fx.strict, &fx.critical, &fx.negdiag}) {
    const auto dq = decompose_exact(to_exact(*spec));
    ReductionEngine<Rat> engine(dq, 5);
    for (const MultiIndex& alpha : engine.matrix().basis.all()) {
      if (degree(alpha) == 0) continue;
      const auto rep = engine.stability(alpha);
      if (!rep.ok)
        bad.push_back(spec->name + " u^" + to_string(alpha) +
                      fmt(" has %zu terms outside its set", rep.violations.size()));
      ++checked;
    }
  }
  {
    const auto dd = decompose_float(fx.jordan);
    ReductionEngine<double> engine(dd, 5);
    for (const MultiIndex& alpha : engine.matrix().basis.all()) {
      if (degree(alpha) == 0) continue;
      const auto rep = engine.stability(alpha);
      if (!rep.ok)
        bad.push_back(fx.jordan.name + " u^" + to_string(alpha) +
                      fmt(" has %zu terms outside its set", rep.violations.size()));
      ++checked;
    }
  }
  Outcome out;
  out.ok = bad.empty();
  out.detail = fmt("%ld shifted expansions confined (coefficient threshold 1e-8)", checked);
  if (!bad.empty()) out.detail = bad.front() + fmt(" (+%zu more)", bad.size() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// 6. Resonance and nilpotence bounds with weighted-degree identities.

Outcome check_bounds(const Fixtures& fx) {
  std::vector<std::string> bad;
  std::ostringstream counts;

  const UrnSpec* all[] = {&fx.strict, &fx.critical, &fx.negdiag, &fx.large, &fx.jordan};
  for (const UrnSpec* spec : all) {
    const auto dq = decompose_exact(to_exact(*spec));
    const auto rep = check_resonance_bounds(dq, 6);
    if (!rep.ok)
      bad.push_back(spec->name + " resonance: " + rep.violations.front());
    if (spec == &fx.jordan) {
      counts << "pairs " << rep.strictly_small_checked + rep.critical_checked << ", descents "
             << rep.descent_checked << ", differences " << rep.difference_checked;
      if (rep.strictly_small_checked <= 0 || rep.critical_checked <= 0 ||
          rep.descent_checked <= 0 || rep.difference_checked <= 0)
        bad.push_back(fx.jordan.name + " resonance enumeration left a clause empty");
    }
    if (spec == &fx.strict && rep.strictly_small_checked <= 0)
      bad.push_back(fx.strict.name + " enumerated no small pairs");
    if (spec == &fx.critical && rep.critical_checked <= 0)
      bad.push_back(fx.critical.name + " enumerated no critical pairs");
  }

  // Weighted-degree values on the critical chain: unit drop along the chain,
  // and 2k-3 for a squared coordinate against the content direction.
  {
    const auto dq = decompose_exact(to_exact(fx.jordan));
    const auto crit = critical_blocks(dq);
    int block = -1;
    for (int bi : crit)
      if (dq.blocks[static_cast<std::size_t>(bi)].size == 2) block = bi;
    if (block < 0) {
      bad.push_back(fx.jordan.name + " has no critical 2-chain");
    } else {
      const int f = dq.blocks[static_cast<std::size_t>(block)].first;
      MultiIndex chain(4, 0), sq_lo(4, 0), sq_hi(4, 0);
      chain[static_cast<std::size_t>(f) + 1] = 1;
      chain[static_cast<std::size_t>(f)] = -1;
      sq_lo[static_cast<std::size_t>(f)] = 2;
      sq_lo[0] = -1;
      sq_hi[static_cast<std::size_t>(f) + 1] = 2;
      sq_hi[0] = -1;
      if (!(m_functional(dq, chain, block) == Rat(1)))
        bad.push_back("chain step functional is not 1");
      if (!(m_functional(dq, sq_lo, block) == Rat(1)))
        bad.push_back("squared head functional is not 1");
      if (!(m_functional(dq, sq_hi, block) == Rat(3)))
        bad.push_back("squared tail functional is not 3");
    }
  }
  {
    const auto dq = decompose_exact(to_exact(fx.critical));
    const auto crit = critical_blocks(dq);
    if (crit.size() != 1) {
      bad.push_back(fx.critical.name + " critical block count is off");
    } else {
      MultiIndex sq(2, 0);
      sq[static_cast<std::size_t>(dq.blocks[static_cast<std::size_t>(crit[0])].first)] = 2;
      sq[0] = -1;
      if (!(m_functional(dq, sq, crit[0]) == Rat(1)))
        bad.push_back(fx.critical.name + " squared functional is not 1");
    }
  }

  long bound_entries = 0;
  for (const UrnSpec* spec : {&fx.critical, &fx.jordan}) {
    const auto dq = decompose_exact(to_exact(*spec));
    const auto rep = check_nilpotence_bounds(dq, 6);
    if (!rep.ok || rep.entries.empty())
      bad.push_back(spec->name + fmt(" nilpotence bounds: %d violations", rep.violations));
    bound_entries += static_cast<long>(rep.entries.size());
  }

  Outcome out;
  out.ok = bad.empty();
  out.detail = counts.str() + fmt("; functional identities exact; %ld bounded indices",
                                  bound_entries);
  if (!bad.empty()) out.detail = bad.front() + fmt(" (+%zu more)", bad.size() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// 7. Growth trends against the n^a log^b envelopes.

Outcome check_growth_trends(const Fixtures& fx) {
  std::vector<std::string> bad;
  std::vector<long> grid = default_moment_grid(4, 16);
  grid.push_back(100000);
  long trends = 0;
  double slowest = 0.0;
  for (const UrnSpec* spec : {&fx.strict, &fx.negdiag, &fx.critical, &fx.jordan}) {
    const auto t0 = Clock::now();
    const auto dec = decompose_float(*spec);
    const auto rep = power_moment_trends(dec, *spec, 4, grid);
    if (!rep.ok) bad.push_back(spec->name + ": " + rep.violations.front());
    if (rep.trends.empty()) bad.push_back(spec->name + " produced no trends");
    trends += static_cast<long>(rep.trends.size());
    const double elapsed = secs(t0);
    slowest = std::max(slowest, elapsed);
    if (elapsed >= 120.0) bad.push_back(spec->name + fmt(" took %.0fs", elapsed));
  }

  // On the critical fixture the even powers need the log factor: with it the
  // ratio settles, without it the ratio keeps climbing.
  {
    const auto dec = decompose_float(fx.critical);
    MomentRecursion<double> rec(dec, fx.critical, 4);
    std::vector<Vec<Cx<double>>> snaps;
    snaps.reserve(grid.size());
    for (long n : grid) {
      rec.advance(n);
      snaps.push_back(rec.moments());
    }
    for (int c : {2, 4}) {
      MultiIndex alpha{0, c};
      const int pos = rec.basis().find(alpha);
      std::vector<double> mags;
      mags.reserve(grid.size());
      for (const auto& snap : snaps) mags.push_back(mag(snap[static_cast<std::size_t>(pos)]));
      const MomentTrend bare =
          trend_against_bound("u^" + to_string(alpha), grid, mags, c / 2.0, 0.0);
      if (!bare.divergent)
        bad.push_back(fmt("u^(0,%d) does not diverge against the bare power bound", c));
    }
  }

  Outcome out;
  out.ok = bad.empty();
  out.detail = fmt("%ld trends bounded over 4 specs (slowest %.1fs); bare power bounds diverge",
                   trends, slowest);
  if (!bad.empty()) out.detail = bad.front() + fmt(" (+%zu more)", bad.size() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// 8. Sampled standardized moments against the Gaussian limit.

Outcome check_sampled_moments(const Fixtures& fx) {
  const auto t0 = Clock::now();
  std::vector<std::string> bad;
  std::ostringstream note;
  const Vec<double> w{1.0, -1.0};
  const long horizon = 10000;
  const long samples = 200000;

  auto run_mc = [&](const UrnSpec& spec, const char* tag) {
    const auto dec = decompose_float(spec);
    const McMoments mc = mc_standardized_moments(spec, dec, w, horizon, samples, 20260817, 6);
    double worst = 0.0;
    for (const StandardizedMoment& sm : mc.standardized) {
      if (sm.k < 3) continue;
      const double dev = std::abs(sm.value - sm.reference);
      const double pull = sm.std_error > 0.0 ? dev / sm.std_error : 0.0;
      worst = std::max(worst, pull);
      if (dev > 4.0 * sm.std_error)
        bad.push_back(fmt("%s k=%d: %.5f vs %.0f is %.1f errors out", tag, sm.k, sm.value,
                          sm.reference, pull));
    }
    note << tag << " worst " << fmt("%.1f", worst) << " errors";
    return worst;
  };

  run_mc(fx.strict, "strict");
  note << "; ";
  run_mc(fx.critical, "critical");

  // Scaled variance stability on the critical fixture, exact recursion.
  {
    const auto dec = decompose_float(fx.critical);
    MomentRecursion<double> rec(dec, fx.critical, 2);
    const UPolynomial<double> L =
        composition_monomial(dec, MultiIndex{1, 0}) - composition_monomial(dec, MultiIndex{0, 1});
    const UPolynomial<double> L2 = L * L;
    double m = 0.0;
    for (int j = 0; j < 2; ++j) m += fx.critical.replacement(0, j);
    auto scaled_var = [&](long n) {
      rec.advance(n);
      const Cx<double> mean = rec.expectation(L);
      const Cx<double> second = rec.expectation(L2);
      const double var = m * m * (second.re - mean.re * mean.re);
      return var / (static_cast<double>(n) * std::log(static_cast<double>(n)));
    };
    const double r1 = scaled_var(5000);
    const double r2 = scaled_var(10000);
    const double drift = std::abs(r2 / r1 - 1.0);
    note << fmt("; scaled variance %.4f -> %.4f (drift %.2f%%)", r1, r2, 100.0 * drift);
    if (drift > 0.10) bad.push_back(fmt("scaled variance drifts by %.1f%%", 100.0 * drift));
  }

  const double elapsed = secs(t0);
  if (elapsed >= 300.0) bad.push_back(fmt("over the 300s budget (%.0fs)", elapsed));
  Outcome out;
  out.ok = bad.empty();
  out.detail = note.str();
  if (!bad.empty()) out.detail += "; " + bad.front();
  if (bad.size() > 1) out.detail += fmt(" (+%zu more)", bad.size() - 1);
  return out;
}

// ---------------------------------------------------------------------------
// 9. Degenerate direction: the total-mass observable has zero variance.

Outcome check_degenerate_direction(const Fixtures& fx) {
  std::vector<std::string> bad;
  for (const UrnSpec* spec :
       {&fx.strict, &fx.critical, &fx.negdiag, &fx.large, &fx.jordan}) {
    const UrnSpecT<Rat> qspec = to_exact(*spec);
    const auto dq = decompose_exact(qspec);
    MomentRecursion<Rat> rec(dq, qspec, 2);
    UPolynomial<Rat> L(dq.s);
    for (int i = 0; i < dq.s; ++i)
      L = L + composition_monomial(dq, unit_index(dq.s, i));
    const UPolynomial<Rat> L2 = L * L;
    for (long n = 0; n <= 100; ++n) {
      rec.advance(n);
      const Cx<Rat> mean = rec.expectation(L);
      const Cx<Rat> second = rec.expectation(L2);
      const Rat want = rec.initial_content() + Rat(n);
      if (!(mean.re == want) || !(mean.im == Rat(0))) {
        bad.push_back(spec->name + fmt(" mean moves off the deterministic line at n=%ld", n));
        break;
      }
      if (!(second.re == want * want) || !(second.im == Rat(0))) {
        bad.push_back(spec->name + fmt(" has nonzero variance at n=%ld", n));
        break;
      }
    }
  }
  Outcome out;
  out.ok = bad.empty();
  out.detail = "5 specs, n <= 100: mean a+n and variance 0, exact";
  if (!bad.empty()) out.detail = bad.front();
  return out;
}

// ---------------------------------------------------------------------------
// 10. Cone membership: face and edge definitions agree.

Outcome check_cone(const Fixtures&) {
  std::vector<std::string> bad;
  long inside_count = 0;
  long total = 0;
  for (int s = 2; s <= 4; ++s) {
    RngStream rng(20260817, static_cast<std::uint64_t>(30 + s));
    for (int trial = 0; trial < 1000; ++trial) {
      Vec<Rat> x(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i)
        x[static_cast<std::size_t>(i)] = Rat(static_cast<int>(rng.next_u64() % 10) - 4);
      const bool by_faces = cone_contains(x);
      const ConeCertificate cert = cone_certificate(x);
      ++total;
      if (by_faces != cert.inside) {
        bad.push_back(fmt("s=%d trial %d: faces say %d, edges say %d", s, trial, int(by_faces),
                          int(cert.inside)));
        continue;
      }
      if (cert.inside) {
        ++inside_count;
        Vec<Rat> acc(static_cast<std::size_t>(s), Rat(0));
        for (const ConeEdgeWeight& ew : cert.weights) {
          if (!(ew.weight > 0)) bad.push_back(fmt("s=%d trial %d: non-positive weight", s, trial));
          acc[static_cast<std::size_t>(ew.i)] += Rat(2) * ew.weight;
          acc[static_cast<std::size_t>(ew.j)] -= ew.weight;
        }
        if (!(acc == x)) bad.push_back(fmt("s=%d trial %d: weights do not recombine", s, trial));
      } else if (!(face_value(x, cert.violated_face) < 0)) {
        bad.push_back(fmt("s=%d trial %d: cited face is not violated", s, trial));
      }
    }
  }
  Outcome out;
  out.ok = bad.empty();
  out.detail = fmt("%ld points, %ld inside: memberships agree, certificates verified", total,
                   inside_count);
  if (!bad.empty()) out.detail = bad.front() + fmt(" (+%zu more)", bad.size() - 1);
  return out;
}

bool run(int id, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  std::printf("[%s] %2d  %-46s %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", id, title,
              o.detail.c_str(), secs(t0));
  std::fflush(stdout);
  return o.ok;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "fixtures";
  Fixtures fx;
  try {
    fx = load_fixtures(dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load fixtures from %s: %s\n", dir.c_str(), e.what());
    return 1;
  }

  int failed = 0;
  failed += !run(1, "exact series vs path enumeration", [&] { return check_series_vs_paths(fx); });
  failed += !run(2, "spectral classification of the fixture suite",
                 [&] { return check_classification(fx); });
  failed += !run(3, "drift operator identity and span stability", [&] { return check_operator(fx); });
  failed += !run(4, "reduced polynomials: order, products, basis",
                 [&] { return check_reduced_polynomials(fx); });
  failed += !run(5, "shifted images confined to support sets", [&] { return check_support_sets(fx); });
  failed += !run(6, "resonance and nilpotence bounds", [&] { return check_bounds(fx); });
  failed += !run(7, "moment growth against the scaled envelopes",
                 [&] { return check_growth_trends(fx); });
  failed += !run(8, "sampled moments against the Gaussian limit",
                 [&] { return check_sampled_moments(fx); });
  failed += !run(9, "degenerate direction has zero variance",
                 [&] { return check_degenerate_direction(fx); });
  failed += !run(10, "cone membership: faces and edges agree", [&] { return check_cone(fx); });

  if (failed == 0)
    std::printf("all 10 checks passed\n");
  else
    std::printf("%d of 10 checks failed\n", failed);
  return failed == 0 ? 0 : 1;
}
