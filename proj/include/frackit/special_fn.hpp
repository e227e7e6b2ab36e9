#pragma once

// Real-argument special functions: reciprocal gamma, Pochhammer symbols and
// the Prabhakar (three-parameter) Mittag-Leffler family.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"
#include "series.hpp"

namespace frackit {

/// sin(pi*x), exactly zero at integers.
inline double sin_pi(double x) {
    double r = std::fmod(x, 2.0);  // (-2, 2)
    if (r > 1.0) r -= 2.0;
    if (r < -1.0) r += 2.0;
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    if (r > 0.5) return std::sin(std::numbers::pi * (1.0 - r));
    if (r < -0.5) return -std::sin(std::numbers::pi * (1.0 + r));
    return std::sin(std::numbers::pi * r);
}

inline bool is_nonpositive_integer(double x) {
    return x <= 0.0 && x == std::floor(x);
}

namespace detail {

// Boost's tgamma/lgamma use a 13-term Lanczos sum tuned for doubles.
inline double log_gamma_positive(double x) { return boost::math::lgamma(x); }

inline double gamma_positive(double x) { return boost::math::tgamma(x); }

}  // namespace detail

/// 1/Gamma(x). Entire; exactly 0 at x = 0, -1, -2, ...
inline double recip_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x >= 0.5) {
        if (x > 171.0) return std::exp(-detail::log_gamma_positive(x));
        return 1.0 / detail::gamma_positive(x);
    }
    // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
    const double s = sin_pi(x);
    const double y = 1.0 - x;
    if (y > 171.0) {
        const double mag = std::exp(detail::log_gamma_positive(y) + std::log(std::abs(s)) -
                                    std::log(std::numbers::pi));
        return s < 0.0 ? -mag : mag;
    }
    return detail::gamma_positive(y) * s / std::numbers::pi;
}

/// Gamma(x); +-inf at the poles.
inline double gamma_fn(double x) {
    if (is_nonpositive_integer(x)) return std::numeric_limits<double>::infinity();
    if (x >= 0.5 && x <= 171.0) return detail::gamma_positive(x);
    return 1.0 / recip_gamma(x);
}

/// Rising factorial delta (delta+1) ... (delta+tau-1).
inline double pochhammer(double delta, long tau) {
    if (tau < 0) throw DomainError("pochhammer: tau must be nonnegative");
    double p = 1.0;
    for (long k = 0; k < tau; ++k) {
        p *= delta + static_cast<double>(k);
        if (!std::isfinite(p))
            throw OverflowError("pochhammer: overflow at tau = " + std::to_string(k + 1), k + 1);
    }
    return p;
}

/// Parameters (beta, gamma, delta) of E^delta_{beta,gamma}.
struct MLParams {
    double beta = 1.0;
    double gamma_ = 1.0;
    double delta = 1.0;

    void validate() const {
        if (!(beta > 0.0)) throw DomainError("MLParams: beta must be > 0");
        if (!(delta > 0.0)) throw DomainError("MLParams: delta must be > 0");
        if (!(gamma_ >= 0.0)) throw DomainError("MLParams: gamma must be >= 0");
    }
};

namespace detail {

// Term generator for sum_{tau} (delta)_tau z^tau / (Gamma(beta tau + gamma) tau!).
// Terms must be requested with nondecreasing index.
class PrabhakarTerms {
public:
    PrabhakarTerms(const MLParams& p, double z) : p_(p), z_(z) {}

    double operator()(long tau) {
        while (k_ < tau) {
            coef_ *= (p_.delta + static_cast<double>(k_)) * z_ / static_cast<double>(k_ + 1);
            if (std::abs(coef_) > 1e250) {  // keep the magnitude in log_scale_
                log_scale_ += std::log(std::abs(coef_));
                coef_ = coef_ < 0.0 ? -1.0 : 1.0;
            }
            ++k_;
        }
        const double arg = p_.beta * static_cast<double>(tau) + p_.gamma_;
        if (coef_ == 0.0) return 0.0;
        if (arg <= 170.0 && log_scale_ == 0.0) return coef_ * recip_gamma(arg);
        const double rg = recip_gamma(std::min(arg, 170.0));
        if (rg == 0.0) return 0.0;
        const double log_rg = arg <= 170.0 ? std::log(std::abs(rg)) : -std::lgamma(arg);
        const double mag = std::exp(std::log(std::abs(coef_)) + log_scale_ + log_rg);
        return (coef_ < 0.0) != (arg <= 170.0 && rg < 0.0) ? -mag : mag;
    }

private:
    MLParams p_;
    double z_;
    long k_ = 0;
    double coef_ = 1.0;  // (delta)_k z^k / k!, divided by exp(log_scale_)
    double log_scale_ = 0.0;
};

}  // namespace detail

/// Series for E^delta_{beta,gamma}(z) with the first `first` terms omitted.
/// Useful where E(z) - E(0) is needed without cancellation.
inline SeriesValue ml_generalized_tail(const MLParams& params, double z, long first,
                                       const SeriesConfig& cfg = {}) {
    params.validate();
    if (!std::isfinite(z)) throw DomainError("ml_generalized: z must be finite");
    detail::PrabhakarTerms terms(params, z);
    return sum_series(terms, cfg, first, "ml_generalized");
}

/// Prabhakar function E^delta_{beta,gamma}(z) by its power series.
inline SeriesValue ml_generalized(const MLParams& params, double z, const SeriesConfig& cfg = {}) {
    return ml_generalized_tail(params, z, 0, cfg);
}

/// Two-parameter E_{alpha,beta}(z).
inline SeriesValue ml_two_param(double alpha, double beta, double z, const SeriesConfig& cfg = {}) {
    return ml_generalized({alpha, beta, 1.0}, z, cfg);
}

/// Classical E_nu(z).
inline SeriesValue ml_classic(double nu, double z, const SeriesConfig& cfg = {}) {
    return ml_generalized({nu, 1.0, 1.0}, z, cfg);
}

/// E^delta_{beta,gamma} for many arguments: the coefficients
/// (delta)_tau / (tau! Gamma(beta tau + gamma)) are computed once and cached.
/// Same termination rule as ml_generalized. Not safe for concurrent use of
/// one instance (the cache grows lazily).
class PrabhakarSeries {
public:
    explicit PrabhakarSeries(const MLParams& params, const SeriesConfig& cfg = {}) : p_(params), cfg_(cfg) {
        p_.validate();
    }

    const MLParams& params() const noexcept { return p_; }

    SeriesValue operator()(double z, long first = 0) {
        CompensatedSum acc;
        double max_term = 0.0, tail = 0.0;
        int small_run = 0;
        double zpow = first == 0 ? 1.0 : std::pow(z, static_cast<double>(first));
        for (long k = first, used = 0; used < cfg_.max_terms; ++k, ++used) {
            const double tk = coef(k) * zpow;
            if (!std::isfinite(tk)) return ml_generalized_tail(p_, z, first, cfg_);
            acc.add(tk);
            const double mag = std::abs(tk);
            max_term = std::max(max_term, mag);
            if (mag < cfg_.eps_rel * std::abs(acc.value()) + cfg_.eps_abs) {
                tail += mag;
                if (++small_run >= cfg_.consecutive_small) {
                    SeriesValue out;
                    out.value = acc.value();
                    out.abs_error_estimate = tail;
                    out.terms_used = used + 1;
                    out.cancellation_ratio = detail::cancellation_ratio(max_term, out.value);
                    out.cancellation_threshold = cfg_.cancellation_threshold;
                    return out;
                }
            } else {
                small_run = 0;
                tail = 0.0;
            }
            zpow *= z;
        }
        throw NonConvergence("ml_generalized: no convergence within " + std::to_string(cfg_.max_terms) + " terms",
                             acc.value());
    }

private:
    double coef(long k) {
        while (static_cast<long>(coef_.size()) <= k) {
            const long t = static_cast<long>(coef_.size());
            if (t > 0) ratio_ *= (p_.delta + static_cast<double>(t - 1)) / static_cast<double>(t);
            const double arg = p_.beta * static_cast<double>(t) + p_.gamma_;
            double c;
            if (arg <= 170.0)
                c = ratio_ * recip_gamma(arg);
            else
                c = std::exp(std::log(ratio_) - std::lgamma(arg));
            coef_.push_back(c);
        }
        return coef_[static_cast<std::size_t>(k)];
    }

    MLParams p_;
    SeriesConfig cfg_;
    double ratio_ = 1.0;  // (delta)_t / t!
    std::vector<double> coef_;
};

/// d/ds E^n_{nu,1}(lambda s^nu)
///   = sum_{k>=1} (n)_k lambda^k s^{k nu - 1} / (Gamma(k nu) k!).
/// Weakly singular like s^{nu-1} as s -> 0+.
inline SeriesValue ml_deriv_kernel(double nu, double lambda, long n, double s,
                                   const SeriesConfig& cfg = {}) {
    if (!(nu > 0.0)) throw DomainError("ml_deriv_kernel: nu must be > 0");
    if (n < 1) throw DomainError("ml_deriv_kernel: n must be a positive integer");
    if (!(s > 0.0)) throw DomainError("ml_deriv_kernel: s must be > 0");
    const double w = lambda * std::pow(s, nu);
    double coef = 1.0;  // (n)_k w^k / k!
    long k_at = 0;
    auto term = [&](long k) {
        while (k_at < k) {
            coef *= (static_cast<double>(n) + static_cast<double>(k_at)) * w /
                    static_cast<double>(k_at + 1);
            ++k_at;
        }
        return coef * recip_gamma(nu * static_cast<double>(k));
    };
    SeriesValue out = sum_series(term, cfg, 1, "ml_deriv_kernel");
    out.value /= s;
    out.abs_error_estimate /= s;
    return out;
}

}  // namespace frackit
