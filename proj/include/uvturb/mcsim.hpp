#pragma once

// Monte-Carlo sampling of the cascaded fading channel. Independent of the
// analytic densities: it only draws Gamma variates.
//
// Every stream owns a SplitMix64 generator seeded from (seed, stream index),
// so results depend on the seed and stream layout but not on how the streams
// are scheduled onto threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

#include "uvturb/channel.hpp"
#include "uvturb/errors.hpp"
#include "uvturb/modem.hpp"

namespace uvturb {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state = 0) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(state_ += kGolden); }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Generator for lane `stream` of a run seeded with `seed`.
  static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL)));
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

struct SimConfig {
  std::uint64_t sample_count = 1000000;
  std::uint64_t rng_seed = 20240601;
  unsigned stream_count = 8;
  unsigned threads = 0;  // 0: hardware concurrency
  int histogram_bins = 50;
};

/// Gamma variate with the given shape and mean.
inline double sample_gamma(double shape, double mean, SplitMix64& rng) {
  std::gamma_distribution<double> dist(shape, mean / shape);
  return dist(rng);
}

/// Gamma-Gamma power: product of unit-mean Gamma(alpha) and Gamma(beta, mean).
inline double sample_gamma_gamma(const GammaGammaParams& p, SplitMix64& rng) {
  return sample_gamma(p.alpha, 1.0, rng) * sample_gamma(p.beta, p.mean_power, rng);
}

/// Received power: common-volume power from link 1, then link 2 around
/// p_v * E2.
inline double sample_nlos(const NlosChannel& ch, SplitMix64& rng) {
  const double pv = sample_gamma_gamma(ch.link1, rng);
  return sample_gamma_gamma({ch.alpha2, ch.beta2, pv * ch.e2}, rng);
}

namespace detail {

inline unsigned worker_count(const SimConfig& cfg) {
  unsigned n = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  return std::max(1u, std::min(n, cfg.stream_count));
}

inline std::uint64_t stream_share(const SimConfig& cfg, unsigned stream) {
  const std::uint64_t base = cfg.sample_count / cfg.stream_count;
  return base + (stream < cfg.sample_count % cfg.stream_count ? 1 : 0);
}

inline void validate(const SimConfig& cfg) {
  if (cfg.sample_count == 0) throw DomainError("mcsim: sample_count must be positive");
  if (cfg.stream_count == 0) throw DomainError("mcsim: stream_count must be positive");
  if (cfg.histogram_bins <= 0) throw DomainError("mcsim: histogram_bins must be positive");
}

// Runs body(stream) for every stream on a small pool.
inline void for_each_stream(const SimConfig& cfg, const std::function<void(unsigned)>& body) {
  const unsigned workers = worker_count(cfg);
  if (workers == 1) {
    for (unsigned s = 0; s < cfg.stream_count; ++s) body(s);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (unsigned s = w; s < cfg.stream_count; s += workers) body(s);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Normalized irradiance samples p_r / Omega_r, concatenated in stream order.
inline std::vector<double> sample_normalized(const NlosChannel& ch, const SimConfig& cfg) {
  detail::validate(cfg);
  std::vector<std::vector<double>> lanes(cfg.stream_count);
  detail::for_each_stream(cfg, [&](unsigned s) {
    auto rng = SplitMix64::for_stream(cfg.rng_seed, s);
    auto& out = lanes[s];
    out.resize(detail::stream_share(cfg, s));
    for (double& v : out) v = sample_nlos(ch, rng) / ch.omega_r;
  });
  std::vector<double> all;
  all.reserve(cfg.sample_count);
  for (const auto& lane : lanes) all.insert(all.end(), lane.begin(), lane.end());
  return all;
}

/// Monte-Carlo estimates for several (SNR, scheme) points from one shared
/// set of fading draws. Index as [snr][scheme].
inline std::vector<std::vector<ErrorRateResult>> empirical_error_rates(const NlosChannel& ch,
                                                                        const std::vector<double>& snrs,
                                                                        const std::vector<Modulation>& schemes,
                                                                        const SimConfig& cfg) {
  detail::validate(cfg);
  for (double g : snrs) detail::check_snr(g);
  for (const auto& m : schemes) detail::check_modulation(m);
  const std::size_t points = snrs.size() * schemes.size();
  // Per-stream running sums of the conditional error and its square.
  std::vector<std::vector<double>> sum(cfg.stream_count, std::vector<double>(points));
  std::vector<std::vector<double>> sum_sq(cfg.stream_count, std::vector<double>(points));
  detail::for_each_stream(cfg, [&](unsigned s) {
    auto rng = SplitMix64::for_stream(cfg.rng_seed, s);
    auto& acc = sum[s];
    auto& acc2 = sum_sq[s];
    const std::uint64_t n = detail::stream_share(cfg, s);
    for (std::uint64_t k = 0; k < n; ++k) {
      const double i = sample_nlos(ch, rng) / ch.omega_r;
      for (std::size_t a = 0; a < snrs.size(); ++a) {
        const double g = snrs[a] * i * i;
        for (std::size_t b = 0; b < schemes.size(); ++b) {
          const double pe = conditional_error(schemes[b], g);
          acc[a * schemes.size() + b] += pe;
          acc2[a * schemes.size() + b] += pe * pe;
        }
      }
    }
  });

  const double n = static_cast<double>(cfg.sample_count);
  std::vector<std::vector<ErrorRateResult>> out(snrs.size(), std::vector<ErrorRateResult>(schemes.size()));
  for (std::size_t p = 0; p < points; ++p) {
    double s1 = 0.0, s2 = 0.0;
    for (unsigned s = 0; s < cfg.stream_count; ++s) {
      s1 += sum[s][p];
      s2 += sum_sq[s][p];
    }
    const double mean = s1 / n;
    const double var = std::max(0.0, s2 / n - mean * mean);
    auto& r = out[p / schemes.size()][p % schemes.size()];
    r.probability = mean;
    r.method = Method::monte_carlo;
    r.standard_error = std::sqrt(var / n);
    r.perturbation_applied = ch.perturbation_applied;
  }
  return out;
}

/// Monte-Carlo error rate. Refuses to report estimates resting on fewer than
/// about 100 expected error events.
inline ErrorRateResult empirical_error_rate(const NlosChannel& ch, double snr, const Modulation& m,
                                            const SimConfig& cfg) {
  auto r = empirical_error_rates(ch, {snr}, {m}, cfg)[0][0];
  const double expected_errors = r.probability * static_cast<double>(cfg.sample_count);
  if (expected_errors < 100.0) {
    std::ostringstream msg;
    msg << "empirical_error_rate: only " << expected_errors << " expected error events from "
        << cfg.sample_count << " samples (need at least 100); raise sample_count";
    throw StatisticalPowerError(msg.str());
  }
  return r;
}

struct Histogram {
  std::vector<double> edges;    // bins + 1 edges
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;      // includes samples outside the edges
};

/// Histogram with logarithmically spaced bins on [lo, hi].
inline Histogram log_histogram(const std::vector<double>& samples, double lo, double hi, int bins) {
  if (!(lo > 0.0 && hi > lo) || bins <= 0) throw DomainError("log_histogram: need 0 < lo < hi and bins > 0");
  Histogram h;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  const double llo = std::log(lo), step = (std::log(hi) - llo) / bins;
  // lo * (hi/lo)^(k/bins) lands exactly on round edges like 1 or 10, which
  // exp of an accumulated log does not.
  for (int k = 0; k <= bins; ++k) h.edges[k] = lo * std::pow(hi / lo, static_cast<double>(k) / bins);
  h.edges.front() = lo;
  h.edges.back() = hi;
  for (double v : samples) {
    ++h.total;
    if (!(v >= lo && v < hi)) continue;
    int k = static_cast<int>((std::log(v) - llo) / step);
    k = std::clamp(k, 0, bins - 1);
    while (k > 0 && v < h.edges[k]) --k;
    while (k < bins - 1 && v >= h.edges[k + 1]) ++k;
    ++h.counts[k];
  }
  return h;
}

/// Two-sided Kolmogorov-Smirnov statistic of samples against a CDF.
template <typename Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, (k + 1) / n - f, f - k / n});
  }
  return d;
}

}  // namespace uvturb
