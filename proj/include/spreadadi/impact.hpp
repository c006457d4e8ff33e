#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spreadadi {

/// Price impact on asset 1: lambda = epsilon * lambda_hat, active only while
/// S1 sits inside [s_low, s_high].
struct ImpactParams {
    double epsilon = 0.01;
    double beta = 100.0;   ///< decay coefficient, per year^(3/2)
    double s_low = 60.0;
    double s_high = 140.0;

    void validate() const {
        if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
            throw std::domain_error("ImpactParams: epsilon must be finite and nonnegative");
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw std::domain_error("ImpactParams: beta must be finite and nonnegative");
        if (!(s_low >= 0.0) || !(s_low < s_high))
            throw std::domain_error("ImpactParams: need 0 <= s_low < s_high");
    }
};

/// Normalized impact 1 - exp(-beta (T - t)^{3/2}) inside the band, 0 outside.
/// The band edges are inclusive and the indicator is not smoothed.
inline double lambda_hat(double t, double S1, double T, const ImpactParams& p) {
    if (S1 < p.s_low || S1 > p.s_high) return 0.0;
    const double tau = std::max(T - t, 0.0);
    return -std::expm1(-p.beta * tau * std::sqrt(tau));
}

}  // namespace spreadadi
