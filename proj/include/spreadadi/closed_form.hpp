#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spreadadi {

/// Lognormal two-asset market: volatilities, correlation and the risk-free rate.
struct MarketParams {
    double sigma1 = 0.15;  ///< volatility of asset 1, per sqrt(year)
    double sigma2 = 0.10;  ///< volatility of asset 2, per sqrt(year)
    double rho = 0.7;      ///< correlation of the driving Brownian motions
    double r = 0.04;       ///< risk-free rate, per year

    void validate() const {
        // Zero volatility is admitted: it is the deterministic limit used by tests.
        if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2))
            throw std::domain_error("MarketParams: volatilities must be finite and nonnegative");
        if (!(rho >= -1.0 && rho <= 1.0))
            throw std::domain_error("MarketParams: correlation must lie in [-1, 1]");
        if (!(r >= 0.0) || !std::isfinite(r))
            throw std::domain_error("MarketParams: rate must be finite and nonnegative");
    }
};

/// Standardized moneyness pair of an exchange-type formula.
struct MargrabeTerms {
    double d_plus = 0.0;
    double d_minus = 0.0;
    double sigma_eff = 0.0;
};

/// Standard normal CDF. Evaluated through erfc so the left tail keeps full
/// relative accuracy; absolute error is at the level of double rounding.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

namespace detail {

// d+- for an exchange of `numeraire` for `asset` with effective volatility sigma.
// sigma == 0 collapses the distribution to a point; d+- then carry the sign of
// log-moneyness so that Phi(d+-) become indicators.
inline MargrabeTerms exchange_terms(double asset, double numeraire, double sigma, double T) {
    MargrabeTerms t;
    t.sigma_eff = sigma;
    const double log_moneyness = std::log(asset / numeraire);
    const double vol_sqrt_t = sigma * std::sqrt(T);
    if (vol_sqrt_t == 0.0) {
        const double inf = HUGE_VAL;
        const double d = log_moneyness > 0.0 ? inf : (log_moneyness < 0.0 ? -inf : 0.0);
        t.d_plus = d;
        t.d_minus = d;
        return t;
    }
    t.d_plus = log_moneyness / vol_sqrt_t + 0.5 * vol_sqrt_t;
    t.d_minus = log_moneyness / vol_sqrt_t - 0.5 * vol_sqrt_t;
    return t;
}

inline double exchange_value(double asset, double numeraire, const MargrabeTerms& t) {
    if (std::isinf(t.d_plus))
        return t.d_plus > 0.0 ? asset - numeraire : 0.0;
    if (t.sigma_eff == 0.0 && t.d_plus == 0.0)
        return 0.0;  // at-the-money with no volatility
    return asset * norm_cdf(t.d_plus) - numeraire * norm_cdf(t.d_minus);
}

inline void check_common(double S1, double S2, const MarketParams& params, double T) {
    params.validate();
    if (!(S1 > 0.0) || !(S2 > 0.0))
        throw std::domain_error("closed form: spot prices must be positive");
    if (!(T > 0.0))
        throw std::domain_error("closed form: maturity must be positive");
}

}  // namespace detail

/// Effective spread volatility sqrt(s1^2 + s2^2 - 2 rho s1 s2). Clamped at zero
/// because rounding can push the radicand slightly negative when rho = 1, s1 = s2.
inline double exchange_volatility(const MarketParams& p) {
    const double var = p.sigma1 * p.sigma1 + p.sigma2 * p.sigma2 - 2.0 * p.rho * p.sigma1 * p.sigma2;
    return std::sqrt(std::max(var, 0.0));
}

inline MargrabeTerms margrabe_terms(double S1, double S2, const MarketParams& params, double T) {
    detail::check_common(S1, S2, params, T);
    return detail::exchange_terms(S1, S2, exchange_volatility(params), T);
}

/// Margrabe exchange-option value S1 Phi(d+) - S2 Phi(d-). Rate independent.
inline double margrabe_price(double S1, double S2, const MarketParams& params, double T) {
    const MargrabeTerms t = margrabe_terms(S1, S2, params, T);
    return detail::exchange_value(S1, S2, t);
}

/// Kirk's spread approximation S1 Phi(d+) - (S2 + k) Phi(d-), with S2 + k treated
/// as lognormal. No discount factor is applied; spot inputs are used as given.
inline double kirk_price(double S1, double S2, double k, const MarketParams& params, double T) {
    detail::check_common(S1, S2, params, T);
    if (!(S2 + k > 0.0))
        throw std::domain_error("kirk_price: S2 + k must be positive");
    const double w = S2 / (S2 + k);
    const double var = params.sigma1 * params.sigma1 + w * w * params.sigma2 * params.sigma2 -
                       2.0 * w * params.rho * params.sigma1 * params.sigma2;
    const double sigma = std::sqrt(std::max(var, 0.0));
    const MargrabeTerms t = detail::exchange_terms(S1, S2 + k, sigma, T);
    return detail::exchange_value(S1, S2 + k, t);
}

}  // namespace spreadadi
