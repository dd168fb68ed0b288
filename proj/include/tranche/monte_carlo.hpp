#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tranche/parallel.hpp"
#include "tranche/portfolio.hpp"
#include "tranche/rng.hpp"
#include "tranche/tranche_profile.hpp"

namespace tranche {

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// fixed batch size so partial sums (and thus the estimate) are independent of
// the number of worker threads
inline constexpr std::uint64_t mc_batch_size = 16384;

struct McPartial {
    double sum = 0.0;
    double sum_sq = 0.0;
};

} // namespace detail

/// Seeded Monte Carlo estimate of the expected tranche loss.
///
/// Sample s draws the factors and one idiosyncratic variate per loan from the
/// counter-based stream at offsets s*(m+n)..; loan i defaults when its latent
/// variable falls below the loan's threshold. Bit-identical for fixed
/// (portfolio, tranche, samples, seed) regardless of thread count.
inline McResult mc_expected_tranche_loss(const Portfolio& portfolio, const TrancheSpec& t,
                                         std::uint64_t samples, std::uint64_t seed,
                                         std::size_t threads) {
    if (samples < 1)
        throw std::invalid_argument("mc_expected_tranche_loss: need at least one sample");
    const PreparedPortfolio prepared(portfolio);
    const std::size_t n = prepared.size();
    const std::size_t m = prepared.factor_count();
    const std::uint64_t stride = static_cast<std::uint64_t>(n) + m;

    // per-loan idiosyncratic default boundary is (threshold - w.phi) / scale;
    // precompute scale = sqrt(1 - |w|^2) once
    std::vector<double> idio_scale(n);
    for (std::size_t i = 0; i < n; ++i) {
        double norm_sq = 0.0;
        for (const double w : prepared.loadings(i))
            norm_sq += w * w;
        idio_scale[i] = std::sqrt(1.0 - norm_sq);
    }

    const std::uint64_t batches = (samples + detail::mc_batch_size - 1) / detail::mc_batch_size;
    std::vector<detail::McPartial> partials(batches);

    parallel_batches(batches, threads, [&](std::size_t b) {
        const std::uint64_t first = static_cast<std::uint64_t>(b) * detail::mc_batch_size;
        const std::uint64_t last = std::min(first + detail::mc_batch_size, samples);
        std::vector<double> factors(m);
        detail::McPartial part;
        for (std::uint64_t s = first; s < last; ++s) {
            const std::uint64_t base = s * stride;
            for (std::size_t k = 0; k < m; ++k)
                factors[k] = rng::standard_normal(seed, base + k);
            double loss = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double idio = rng::standard_normal(seed, base + m + i);
                double latent = idio_scale[i] * idio;
                const auto loadings = prepared.loadings(i);
                for (std::size_t k = 0; k < m; ++k)
                    latent += loadings[k] * factors[k];
                if (latent < prepared.threshold(i))
                    loss += prepared.loan_lgd(i);
            }
            const double value = tranche_profile(t, loss);
            part.sum += value;
            part.sum_sq += value * value;
        }
        partials[b] = part;
    });

    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& part : partials) {
        sum += part.sum;
        sum_sq += part.sum_sq;
    }

    McResult result;
    result.samples = samples;
    result.seed = seed;
    result.estimate = sum / static_cast<double>(samples);
    if (samples > 1) {
        const double count = static_cast<double>(samples);
        double var = (sum_sq - count * result.estimate * result.estimate) / (count - 1.0);
        if (var < 0.0)
            var = 0.0;
        result.std_error = std::sqrt(var / count);
    }
    return result;
}

inline McResult mc_expected_tranche_loss(const Portfolio& portfolio, const TrancheSpec& t,
                                         std::uint64_t samples, std::uint64_t seed) {
    return mc_expected_tranche_loss(portfolio, t, samples, seed, worker_thread_count());
}

} // namespace tranche
