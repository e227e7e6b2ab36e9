#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "errors.hpp"

namespace frackit {

struct SeriesConfig {
    int consecutive_small = 3;
    double eps_rel = 1e-15;
    double eps_abs = 1e-300;
    long max_terms = 10'000;
    double cancellation_threshold = 1e8;
};

/// Result of a truncated series (or other certified approximation).
struct SeriesValue {
    double value = 0.0;
    double abs_error_estimate = 0.0;
    long terms_used = 0;
    double cancellation_ratio = 1.0;
    double cancellation_threshold = 1e8;

    bool cancellation_warning() const noexcept {
        return !(cancellation_ratio <= cancellation_threshold);
    }
};

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

namespace detail {

inline double cancellation_ratio(double max_term, double value) {
    if (max_term == 0.0) return 1.0;
    if (value == 0.0) return std::numeric_limits<double>::infinity();
    const double r = max_term / std::abs(value);
    return r < 1.0 ? 1.0 : r;
}

}  // namespace detail

/// Sums term(k) for k = first, first+1, ... until `consecutive_small`
/// consecutive terms fall below eps_rel*|partial| + eps_abs.
///
/// Throws NonConvergence (carrying the partial sum) at the term cap.
template <class TermFn>
SeriesValue sum_series(TermFn&& term, const SeriesConfig& cfg, long first = 0,
                       const char* name = "series") {
    CompensatedSum acc;
    double max_term = 0.0;
    double tail = 0.0;  // |term| over the current run of small terms
    int small_run = 0;
    long used = 0;
    for (long k = first; used < cfg.max_terms; ++k, ++used) {
        const double tk = term(k);
        if (!std::isfinite(tk))
            throw NonConvergence(std::string(name) + ": non-finite term at index " +
                                     std::to_string(k),
                                 acc.value());
        acc.add(tk);
        const double mag = std::abs(tk);
        if (mag > max_term) max_term = mag;
        if (mag < cfg.eps_rel * std::abs(acc.value()) + cfg.eps_abs) {
            tail += mag;
            if (++small_run >= cfg.consecutive_small) {
                SeriesValue out;
                out.value = acc.value();
                out.abs_error_estimate = tail;
                out.terms_used = used + 1;
                out.cancellation_ratio = detail::cancellation_ratio(max_term, out.value);
                out.cancellation_threshold = cfg.cancellation_threshold;
                return out;
            }
        } else {
            small_run = 0;
            tail = 0.0;
        }
    }
    throw NonConvergence(std::string(name) + ": no convergence within " +
                             std::to_string(cfg.max_terms) + " terms",
                         acc.value());
}

}  // namespace frackit
