#pragma once

// Monte Carlo verification harness for directional observables Y_n = <w, X_n>.
// Trajectory i draws from the counter-based stream (seed, i), so results are
// reproducible and independent of the thread count; bootstrap resamples get
// their own streams above the trajectory range.  Standardized sample moments
// come with bootstrap standard errors and the Gaussian reference values.

#include <urnlab/moments.hpp>
#include <urnlab/numeric.hpp>
#include <urnlab/rng.hpp>
#include <urnlab/spectral.hpp>
#include <urnlab/urn.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace urnlab {

// The requested direction carries no asymptotic variance, so standardizing
// by its standard deviation is meaningless.
struct DegenerateDirection : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Single-pass mean and sum of squared deviations, mergeable across shards.
struct RunningMoments {
  long count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  void merge(const RunningMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double d = other.mean - mean;
    const long total = count + other.count;
    mean += d * static_cast<double>(other.count) / static_cast<double>(total);
    m2 += other.m2 + d * d * (static_cast<double>(count) * static_cast<double>(other.count) /
                              static_cast<double>(total));
    count = total;
  }

  double variance() const {
    return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
  }
};

namespace detail {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static partition of [0, count) across the pool; the body must only touch
// state owned by its index.  The first exception wins and is rethrown.
template <class F>
void parallel_for(long count, int threads, F&& body) {
  const long want = std::min<long>(resolve_threads(threads), std::max<long>(1, count));
  if (want <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(want));
  std::mutex error_lock;
  std::exception_ptr first_error;
  const long chunk = count / want;
  const long rem = count % want;
  long start = 0;
  for (long t = 0; t < want; ++t) {
    const long len = chunk + (t < rem ? 1 : 0);
    pool.emplace_back([&, start, len] {
      try {
        for (long i = start; i < start + len; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(error_lock);
        if (!first_error) first_error = std::current_exception();
      }
    });
    start += len;
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// One trajectory of n draws, returning <w, X_n>.  The draw arithmetic matches
// step() exactly (fresh total, same scan order), so a trajectory from stream
// (seed, i) reproduces the simulate() path bit for bit.
inline double sample_direction(const UrnSpec& spec, const Vec<double>& w, long n,
                               RngStream& rng) {
  const int s = spec.colors();
  Vec<double> x = spec.initial;
  for (long t = 0; t < n; ++t) {
    double total = 0.0;
    for (int i = 0; i < s; ++i) total += x[static_cast<std::size_t>(i)];
    const double ucut = rng.uniform01() * total;
    double acc = 0.0;
    int k = s - 1;
    for (int i = 0; i < s; ++i) {
      acc += x[static_cast<std::size_t>(i)];
      if (ucut < acc) {
        k = i;
        break;
      }
    }
    for (int j = 0; j < s; ++j) {
      x[static_cast<std::size_t>(j)] += spec.replacement(k, j);
      if (x[static_cast<std::size_t>(j)] < 0)
        throw std::runtime_error("urn left the nonnegative orthant at color " +
                                 std::to_string(j + 1) + "; spec is not tenable from this state");
    }
  }
  double y = 0.0;
  for (int j = 0; j < s; ++j) y += w[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  return y;
}

struct SampleSummary {
  double mean_offset = 0.0;  // mean of the (pre-centered) values
  double variance = 0.0;     // population central second moment
  std::vector<double> standardized;  // index k-1 holds m_k / variance^{k/2}
};

// Central and standardized moments from raw power sums S_j = sum z^j.
inline SampleSummary summarize_sums(const std::vector<double>& sums, long count, int k_max) {
  const double m = static_cast<double>(count);
  const double mu = sums[1] / m;
  std::vector<double> central(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (int k = 1; k <= k_max; ++k) {
    double acc = 0.0;
    double sign_pow = 1.0;  // (-mu)^{k-j} built from j = k downward
    for (int j = k; j >= 0; --j) {
      const double raw = j == 0 ? 1.0 : sums[static_cast<std::size_t>(j)] / m;
      acc += static_cast<double>(binomial(k, j)) * raw * sign_pow;
      sign_pow *= -mu;
    }
    central[static_cast<std::size_t>(k)] = acc;
  }
  SampleSummary out;
  out.mean_offset = mu;
  out.variance = k_max >= 2 ? central[2] : 0.0;
  if (out.variance <= 0.0)
    throw DegenerateDirection("sample variance vanished; nothing to standardize");
  const double sd = std::sqrt(out.variance);
  out.standardized.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k)
    out.standardized.push_back(central[static_cast<std::size_t>(k)] / std::pow(sd, k));
  return out;
}

inline std::vector<double> power_sums(const std::vector<double>& values, int k_max) {
  std::vector<double> sums(static_cast<std::size_t>(k_max) + 1, 0.0);
  for (double z : values) {
    double p = 1.0;
    for (int k = 1; k <= k_max; ++k) {
      p *= z;
      sums[static_cast<std::size_t>(k)] += p;
    }
  }
  return sums;
}

}  // namespace detail

struct StandardizedMoment {
  int k = 0;
  double value = 0.0;
  double std_error = 0.0;  // bootstrap standard error (0 when bootstrap is disabled)
  double reference = 0.0;  // Gaussian limit: 0 for odd k, (k-1)!! for even k
};

struct McMoments {
  long n = 0;
  long samples = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double mean_std_error = 0.0;
  double variance = 0.0;  // sample variance of Y_n
  double variance_std_error = 0.0;
  std::vector<StandardizedMoment> standardized;  // k = 1..k_max
};

// Simulates `samples` trajectories to time n, forms Y = <w, X_n>, and returns
// standardized sample moments with bootstrap standard errors.  Refuses
// directions whose scaled asymptotic variance vanishes.
inline McMoments mc_standardized_moments(const UrnSpec& spec,
                                         const SpectralDecomposition<double>& dec,
                                         const Vec<double>& w, long n, long samples,
                                         std::uint64_t seed, int k_max = 6, int threads = 0,
                                         int bootstrap = 200) {
  if (static_cast<int>(w.size()) != spec.colors())
    throw std::invalid_argument("mc_standardized_moments: direction length mismatch");
  if (n < 1) throw std::invalid_argument("mc_standardized_moments: need at least one draw");
  if (samples < 2) throw std::invalid_argument("mc_standardized_moments: need at least two samples");
  if (k_max < 2 || k_max > 12)
    throw std::invalid_argument("mc_standardized_moments: moment order out of range");
  if (bootstrap != 0 && bootstrap < 2)
    throw std::invalid_argument("mc_standardized_moments: bootstrap needs at least two resamples");

  const CovarianceEstimate est = estimate_sigma(dec, spec, std::max<long>(8, n));
  double gamma = 0.0;
  double scale = 0.0;
  for (int i = 0; i < spec.colors(); ++i)
    for (int j = 0; j < spec.colors(); ++j) {
      gamma += w[static_cast<std::size_t>(i)] * est.sigma(i, j) * w[static_cast<std::size_t>(j)];
      scale = std::max(scale, std::abs(est.sigma(i, j)));
    }
  if (!(gamma > 1e-9 * std::max(scale, 1e-300)))
    throw DegenerateDirection(
        "direction carries no asymptotic variance; the observable is deterministic at this scaling");

  std::vector<double> ys(static_cast<std::size_t>(samples), 0.0);
  detail::parallel_for(samples, threads, [&](long i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    ys[static_cast<std::size_t>(i)] = detail::sample_direction(spec, w, n, rng);
  });

  RunningMoments agg;
  for (double y : ys) agg.add(y);

  std::vector<double> centered(ys);
  for (double& z : centered) z -= agg.mean;

  const detail::SampleSummary headline =
      detail::summarize_sums(detail::power_sums(centered, k_max), samples, k_max);

  McMoments out;
  out.n = n;
  out.samples = samples;
  out.seed = seed;
  out.mean = agg.mean;
  out.variance = agg.variance();
  out.standardized.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k)
    out.standardized.push_back({k, headline.standardized[static_cast<std::size_t>(k - 1)], 0.0,
                                gaussian_moment(k)});

  if (bootstrap > 0) {
    std::vector<detail::SampleSummary> replicates(static_cast<std::size_t>(bootstrap));
    detail::parallel_for(bootstrap, threads, [&](long b) {
      RngStream rng(seed, static_cast<std::uint64_t>(samples) + 1 + static_cast<std::uint64_t>(b));
      std::vector<double> sums(static_cast<std::size_t>(k_max) + 1, 0.0);
      for (long i = 0; i < samples; ++i) {
        const double z =
            centered[static_cast<std::size_t>(rng.next_u64() % static_cast<std::uint64_t>(samples))];
        double p = 1.0;
        for (int k = 1; k <= k_max; ++k) {
          p *= z;
          sums[static_cast<std::size_t>(k)] += p;
        }
      }
      replicates[static_cast<std::size_t>(b)] = detail::summarize_sums(sums, samples, k_max);
    });
    auto spread = [&](auto&& pick) {
      RunningMoments acc;
      for (const auto& rep : replicates) acc.add(pick(rep));
      return std::sqrt(acc.variance());
    };
    out.mean_std_error = spread([](const detail::SampleSummary& r) { return r.mean_offset; });
    out.variance_std_error = spread([](const detail::SampleSummary& r) { return r.variance; });
    for (int k = 1; k <= k_max; ++k)
      out.standardized[static_cast<std::size_t>(k - 1)].std_error = spread(
          [&](const detail::SampleSummary& r) { return r.standardized[static_cast<std::size_t>(k - 1)]; });
  }
  return out;
}

}  // namespace urnlab
