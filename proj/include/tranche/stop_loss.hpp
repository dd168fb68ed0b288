#pragma once

#include <cstddef>
#include <stdexcept>

#include "tranche/gram_charlier.hpp"
#include "tranche/hermite.hpp"
#include "tranche/normal.hpp"
#include "tranche/tranche_profile.hpp"

namespace tranche {

/// Gaussian-weighted Hermite tail integral over [k, inf):
/// He_{n-1}(k) pdf(k) for n >= 1, and the plain tail probability for n = 0.
inline double hermite_tail_integral(int n, double k) {
    if (n < 0)
        throw std::invalid_argument("hermite_tail_integral: negative degree");
    if (n == 0)
        return std_normal_tail(k);
    const double pdf = std_normal_pdf(k);
    if (pdf == 0.0)
        return 0.0; // the Gaussian factor beats any polynomial growth
    return hermite(n - 1, k) * pdf;
}

/// Expected exceedance E[(L - K)+] under the truncated expansion.
///
/// With z-score k = (K - mean)/std, integrating (z - k) He_n(z) pdf(z) over
/// [k, inf) term by term via the tail identity and z He_n = He_{n+1} + n He_{n-1}
/// collapses to:
///   n = 0: pdf(k) - k tail(k)
///   n = 1: tail(k)
///   n >= 2: He_{n-2}(k) pdf(k)
/// so the stop-loss is std times the coefficient-weighted sum of these.
inline double stop_loss(const GCExpansion& expansion, double strike) {
    const double k = (strike - expansion.mean) / expansion.std;
    const double pdf = std_normal_pdf(k);
    const double tail = std_normal_tail(k);
    double total = expansion.coeffs[0] * (pdf - k * tail);
    if (expansion.order() >= 1)
        total += expansion.coeffs[1] * tail;
    if (pdf > 0.0 && expansion.order() >= 2) {
        double he_prev = 1.0; // He_0(k)
        double he_cur = k;    // He_1(k)
        for (int n = 2; n <= expansion.order(); ++n) {
            // he_prev holds He_{n-2}(k)
            total += expansion.coeffs[static_cast<std::size_t>(n)] * he_prev * pdf;
            const double next = k * he_cur - static_cast<double>(n - 1) * he_prev;
            he_prev = he_cur;
            he_cur = next;
        }
    }
    return expansion.std * total;
}

/// Expected tranche loss under one conditional expansion: the call-spread
/// decomposition (stop_loss(a) - stop_loss(b)) / (b - a). Returned unclamped.
inline double conditional_tranche_loss(const GCExpansion& expansion, const TrancheSpec& t) {
    return (stop_loss(expansion, t.attach) - stop_loss(expansion, t.detach)) / t.width();
}

} // namespace tranche
