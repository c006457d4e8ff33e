#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "closed_form.hpp"
#include "grid.hpp"

namespace spreadadi {

struct McConfig {
    std::size_t n_paths = 1'000'000;
    std::uint64_t seed = 20240531;
    bool antithetic = false;
    unsigned threads = 1;
};

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;  ///< independent samples (pairs when antithetic)
};

/// Name of the generator scheme, for run manifests.
inline constexpr const char* kMcGenerator = "mt19937_64 per 16384-sample batch, seeded by splitmix64(seed, batch)";

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

struct BatchSums {
    double sum = 0.0;          // raw payoff sum, kept separate so price is exactly monotone in k
    double shifted = 0.0;      // sum of (x - shift)
    double shifted_sq = 0.0;   // sum of (x - shift)^2
};

// Fixed-shape pairwise reduction; independent of how batches were scheduled.
inline BatchSums tree_sum(const std::vector<BatchSums>& v, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return v[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    const BatchSums a = tree_sum(v, lo, mid);
    const BatchSums b = tree_sum(v, mid, hi);
    return {a.sum + b.sum, a.shifted + b.shifted, a.shifted_sq + b.shifted_sq};
}

}  // namespace detail

/// Risk-neutral spread price by exact lognormal terminal sampling,
/// S_i(T) = S_i exp((r - s_i^2/2) T + s_i sqrt(T) Z_i) with corr(Z1, Z2) = rho.
/// Results depend only on (inputs, seed, n_paths, antithetic), never on `threads`.
inline McEstimate mc_spread_price(double S1, double S2, const SpreadPayoff& payoff, const MarketParams& params,
                                  double T, const McConfig& cfg) {
    params.validate();
    if (!(S1 > 0.0) || !(S2 > 0.0)) throw std::domain_error("mc_spread_price: spots must be positive");
    if (!(T > 0.0)) throw std::domain_error("mc_spread_price: maturity must be positive");
    if (cfg.n_paths < 2) throw std::domain_error("mc_spread_price: need at least 2 paths");

    constexpr std::size_t kBatch = 16384;
    // Antithetic mode averages each path with its mirror; a sample is then one pair.
    const std::size_t n_samples = cfg.antithetic ? std::max<std::size_t>(cfg.n_paths / 2, 2) : cfg.n_paths;
    const std::size_t n_batches = (n_samples + kBatch - 1) / kBatch;

    const double sq = std::sqrt(T);
    const double f1 = S1 * std::exp((params.r - 0.5 * params.sigma1 * params.sigma1) * T);
    const double f2 = S2 * std::exp((params.r - 0.5 * params.sigma2 * params.sigma2) * T);
    const double v1 = params.sigma1 * sq;
    const double v2 = params.sigma2 * sq;
    const double rho_c = std::sqrt(std::max(1.0 - params.rho * params.rho, 0.0));

    auto terminal_payoff = [&](double z1, double z2) {
        const double w2 = params.rho * z1 + rho_c * z2;
        return payoff(f1 * std::exp(v1 * z1), f2 * std::exp(v2 * w2));
    };
    // Shift by the median-path payoff: variance is then exact zero for deterministic paths.
    const double shift = terminal_payoff(0.0, 0.0);

    std::vector<detail::BatchSums> batches(n_batches);
    auto run_batch = [&](std::size_t b) {
        std::mt19937_64 rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(b)));
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::size_t begin = b * kBatch;
        const std::size_t end = std::min(begin + kBatch, n_samples);
        detail::BatchSums s;
        for (std::size_t i = begin; i < end; ++i) {
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            double x = terminal_payoff(z1, z2);
            if (cfg.antithetic) x = 0.5 * (x + terminal_payoff(-z1, -z2));
            s.sum += x;
            const double d = x - shift;
            s.shifted += d;
            s.shifted_sq += d * d;
        }
        batches[b] = s;
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n_batches)));
    if (workers == 1) {
        for (std::size_t b = 0; b < n_batches; ++b) run_batch(b);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t b = w; b < n_batches; b += workers) run_batch(b);
            });
        for (auto& t : pool) t.join();
    }

    const detail::BatchSums tot = detail::tree_sum(batches, 0, n_batches);
    const auto n = static_cast<double>(n_samples);
    const double disc = std::exp(-params.r * T);
    const double var = std::max((tot.shifted_sq - tot.shifted * tot.shifted / n) / (n - 1.0), 0.0);

    McEstimate est;
    est.price = disc * (tot.sum / n);
    est.std_error = disc * std::sqrt(var / n);
    est.n_samples = n_samples;
    return est;
}

}  // namespace spreadadi
