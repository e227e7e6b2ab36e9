#pragma once

// Numerical Laplace transforms used as independent oracles.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "errors.hpp"
#include "grid.hpp"
#include "series.hpp"

namespace frackit {

using cplx = std::complex<double>;

struct ForwardOptions {
    double horizon = 40.0;       ///< integrate over [0, horizon]
    double tail_sup = -1.0;      ///< bound on |f| beyond the horizon; < 0: use |f(horizon)|
    double tail_tolerance = 1e-10;
    double rel_tolerance = 1e-12;
};

namespace detail {

inline void check_tail(double s, double horizon, double tail_sup, double tol) {
    const double bound = std::exp(-s * horizon) * tail_sup / s;
    if (bound > tol) {
        const double need = std::log(tail_sup / (s * tol)) / s;
        std::ostringstream os;
        os << "laplace_forward: tail bound " << bound << " at s = " << s << " exceeds " << tol
           << "; horizon must be at least " << need;
        throw NumericalError(os.str(), bound);
    }
}

// 1 - exp(-x)(1+x), accurate for small x
inline double one_minus_exp_one_plus(double x) {
    if (x < 1e-2) {
        const double x2 = x * x;
        return x2 * (0.5 - x / 3.0 + x2 / 8.0 - x2 * x / 30.0 + x2 * x2 / 144.0);
    }
    return -std::expm1(-x) - x * std::exp(-x);
}

}  // namespace detail

/// int_0^T e^{-st} f(t) dt for a callable f; integrable endpoint
/// singularities t^{theta-1} (theta > 0) at 0 are allowed.
template <class F>
double laplace_forward(F&& f, double s, const ForwardOptions& opt = {}) {
    if (!(s > 0.0)) throw DomainError("laplace_forward: s must be > 0");
    const double T = opt.horizon;
    const double sup = opt.tail_sup >= 0.0 ? opt.tail_sup : std::abs(f(T));
    detail::check_tail(s, T, sup, opt.tail_tolerance);
    auto integrand = [&](double t) { return std::exp(-s * t) * f(t); };
    const double split = std::min(T, 1.0 / s);
    boost::math::quadrature::tanh_sinh<double> ts;
    double value = ts.integrate(integrand, 0.0, split, opt.rel_tolerance);
    if (T > split) {
        value += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, split, T, 20,
                                                                                opt.rel_tolerance);
    }
    return value;
}

/// Exact transform of the piecewise-linear interpolant of `f` over its
/// grid, with the tail beyond the last node bounded by tail_sup.
inline double laplace_forward(const SampledFunction& f, double s, double tail_sup = -1.0,
                              double tail_tolerance = 1e-10) {
    if (!(s > 0.0)) throw DomainError("laplace_forward: s must be > 0");
    if (f.size() < 2) throw DomainError("laplace_forward: need at least two nodes");
    const TimeGrid& g = f.grid;
    const double sup = tail_sup >= 0.0 ? tail_sup : std::abs(f.values.back());
    detail::check_tail(s, g.back(), sup, tail_tolerance);
    CompensatedSum acc;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
        const double a = g[k], h = g[k + 1] - a;
        const double x = s * h;
        const double ea = std::exp(-s * a);
        const double m0 = ea * -std::expm1(-x) / s;                     // int e^{-st}
        const double m1 = ea * detail::one_minus_exp_one_plus(x) / (s * s);  // int (t-a) e^{-st}
        const double fa = f.values[k], fb = f.values[k + 1];
        acc.add(fa * m0 + (fb - fa) / h * m1);
    }
    return acc.value();
}

/// Transform at complex s with Re s > 0, by adaptive quadrature on [0, T].
template <class F>
cplx laplace_forward_complex(F&& f, cplx s, const ForwardOptions& opt = {}) {
    if (!(s.real() > 0.0)) throw DomainError("laplace_forward_complex: Re s must be > 0");
    const double T = opt.horizon;
    const double sup = opt.tail_sup >= 0.0 ? opt.tail_sup : std::abs(f(T));
    detail::check_tail(s.real(), T, sup, opt.tail_tolerance);
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    auto re = [&](double t) { return std::exp(-s.real() * t) * std::cos(s.imag() * t) * f(t); };
    auto im = [&](double t) { return -std::exp(-s.real() * t) * std::sin(s.imag() * t) * f(t); };
    return {GK::integrate(re, 0.0, T, 25, opt.rel_tolerance), GK::integrate(im, 0.0, T, 25, opt.rel_tolerance)};
}

namespace detail {

template <class F>
cplx talbot_sum(F& transform, double t, int nodes) {
    const double m = static_cast<double>(nodes);
    const double r = 2.0 * m / (5.0 * t);
    cplx total = 0.5 * std::exp(r * t) * cplx(transform(cplx(r, 0.0)));
    for (int k = 1; k < nodes; ++k) {
        for (int sign : {1, -1}) {
            const double th = sign * static_cast<double>(k) * std::numbers::pi / m;
            const double cot = std::cos(th) / std::sin(th);
            const cplx s(r * th * cot, r * th);
            const double sigma = th + (th * cot - 1.0) * cot;
            total += 0.5 * std::exp(t * s) * cplx(transform(s)) * cplx(1.0, sigma);
        }
    }
    return total * (r / m);
}

}  // namespace detail

/// Inverse transform by the fixed Talbot contour with `nodes` points on each
/// half of the contour. F must accept std::complex<double>. In double
/// precision the e^{rt} factor costs digits beyond about 40 nodes; 32 is a
/// good default.
///
/// Throws NonConvergence when halving the node count changes the result by
/// more than 1e-3 relative, and NumericalError when the imaginary residue of
/// the symmetric contour sum exceeds 1e-8 of the value.
template <class F>
double laplace_invert(F&& transform, double t, int nodes = 32) {
    if (!(t > 0.0)) throw DomainError("laplace_invert: t must be > 0");
    if (nodes < 4) throw DomainError("laplace_invert: need at least 4 nodes");
    const cplx full = detail::talbot_sum(transform, t, nodes);
    const double value = full.real();
    const double scale = std::max(std::abs(value), 1e-300);
    if (std::abs(full.imag()) > 1e-8 * scale + 1e-14)
        throw NumericalError("laplace_invert: imaginary residue " + std::to_string(full.imag()) +
                                 " too large",
                             value);
    const double coarse = detail::talbot_sum(transform, t, nodes / 2).real();
    if (std::abs(coarse - value) > 1e-3 * scale + 1e-12)
        throw NonConvergence("laplace_invert: no decay under node doubling", value);
    return value;
}

/// Talbot sum without the convergence checks (for convergence studies).
template <class F>
double laplace_invert_unchecked(F&& transform, double t, int nodes) {
    return detail::talbot_sum(transform, t, nodes).real();
}

/// Bromwich-line inversion with Euler summation (Abate-Whitt). Needs F only
/// on Re s = A/(2t) > 0, so it can invert transforms that are themselves
/// computed by forward quadrature. Discretization error ~ e^{-A}.
template <class F>
double laplace_invert_euler(F&& transform, double t, double A = 18.4, int n = 15, int m = 11) {
    if (!(t > 0.0)) throw DomainError("laplace_invert_euler: t must be > 0");
    const double x = A / (2.0 * t);
    const double h = std::numbers::pi / t;
    const double u = std::exp(A / 2.0) / t;
    std::vector<double> partial(static_cast<std::size_t>(n + m + 1));
    double sum = 0.5 * cplx(transform(cplx(x, 0.0))).real();
    for (int k = 1; k <= n + m; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        sum += sign * cplx(transform(cplx(x, h * k))).real();
        partial[static_cast<std::size_t>(k)] = sum;
    }
    // binomial average of partial sums n..n+m
    double avg = 0.0, binom = 1.0;
    for (int k = 0; k <= m; ++k) {
        avg += binom * partial[static_cast<std::size_t>(n + k)];
        binom *= static_cast<double>(m - k) / static_cast<double>(k + 1);
    }
    return u * avg / std::pow(2.0, m);
}

}  // namespace frackit
