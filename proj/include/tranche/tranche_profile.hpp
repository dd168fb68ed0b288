#pragma once

#include <algorithm>
#include <stdexcept>

namespace tranche {

/// Attachment/detachment pair bounding a tranche; 0 <= attach < detach <= 1.
struct TrancheSpec {
    double attach = 0.0;
    double detach = 1.0;

    TrancheSpec() = default;
    TrancheSpec(double a, double b) : attach(a), detach(b) {
        if (!(a >= 0.0 && a < b && b <= 1.0))
            throw std::invalid_argument("TrancheSpec: need 0 <= attach < detach <= 1");
    }

    double width() const { return detach - attach; }
};

/// Fraction of the tranche notional wiped out at portfolio loss x:
/// min(b-a, max(x-a, 0)) / (b-a).
inline double tranche_profile(const TrancheSpec& t, double x) {
    return std::min(t.width(), std::max(x - t.attach, 0.0)) / t.width();
}

} // namespace tranche
