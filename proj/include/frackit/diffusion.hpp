#pragma once

// Fundamental solution of the time-fractional diffusion equation
//
//     D_t^alpha N = c Laplacian N,   N(x, 0) = delta(x),
//
// (Caputo derivative, 0 < alpha <= 1) and the one-sided Levy stable density.
// Everything is radially symmetric and evaluated through ascending series of
// the underlying H-functions, with integral representations where the series
// cancel too badly.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "frac_ops.hpp"
#include "grid.hpp"
#include "series.hpp"
#include "special_fn.hpp"

namespace frackit {

struct DiffusionQuery {
    int n = 1;           ///< spatial dimension
    double alpha = 1.0;  ///< in (0, 1]
    double c_nu = 1.0;   ///< diffusivity
    double r = 0.0;      ///< |x|
    double t = 1.0;

    void validate() const {
        if (n < 1) throw DomainError("diffusion.dim must be >= 1");
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("diffusion.alpha must lie in (0, 1]");
        if (!(c_nu > 0.0) || !std::isfinite(c_nu)) throw DomainError("diffusion.c must be > 0");
        if (!(r >= 0.0) || !std::isfinite(r)) throw DomainError("diffusion.r must be >= 0");
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("diffusion.t must be > 0");
    }
};

struct LevyQuery {
    double rho = 0.5;
    double t = 1.0;

    void validate() const {
        if (!(rho > 0.0 && rho < 1.0)) throw DomainError("levy.rho must lie in (0, 1)");
        if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("levy.t must be > 0");
    }
};

namespace detail {

/// {log|Gamma(x)|, sign Gamma(x)}; sign 0 at the poles.
inline std::pair<double, int> signed_log_gamma(double x) {
    if (is_nonpositive_integer(x)) return {0.0, 0};
    if (x > 0.0) return {std::lgamma(x), 1};
    // Gamma(x) Gamma(1-x) = pi / sin(pi x) with Gamma(1-x) > 0
    return {std::lgamma(x), sin_pi(x) > 0.0 ? 1 : -1};
}

/// (1/pi) int_0^pi A(phi) exp(-(A(phi) - A(0)) y) dphi with Zolotarev's
///   A(phi) = (sin(rho phi)/sin phi)^{1/(1-rho)} sin((1-rho) phi)/sin(rho phi).
/// Returns {integral, A(0)}; the full Kanter integral is integral * exp(-A(0) y).
inline std::pair<double, double> kanter_integral(double rho, double y) {
    const double e = 1.0 / (1.0 - rho);
    const double a0 = std::pow(rho, e) * (1.0 - rho) / rho;
    auto log_a = [&](double phi) {
        if (phi < 1e-8) return std::log(a0);
        return e * (std::log(std::sin(rho * phi)) - std::log(std::sin(phi))) +
               std::log(std::sin((1.0 - rho) * phi)) - std::log(std::sin(rho * phi));
    };
    auto integrand = [&](double phi) {
        if (phi >= std::numbers::pi) return 0.0;
        const double a = std::exp(log_a(phi));
        const double arg = (a - a0) * y;
        if (!std::isfinite(a) || arg > 745.0) return 0.0;
        return a * std::exp(-arg);
    };
    // The integrand is concentrated in phi < O(y^{-1/2}) for large y.
    const double split = std::min(std::numbers::pi, 8.0 / std::sqrt(std::max(y, 1e-300)));
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double v = GK::integrate(integrand, 0.0, split, 8, 1e-14);
    // the remainder is negligible next to the head for large y; only the
    // head's magnitude matters for its error target
    if (split < std::numbers::pi) {
        double err = 0.0;
        const double rest = GK::integrate(integrand, split, std::numbers::pi, 0, 1e-14, &err);
        v += (err <= 1e-15 * std::abs(v)) ? rest : GK::integrate(integrand, split, std::numbers::pi, 8, 1e-14);
    }
    return {v / std::numbers::pi, a0};
}

/// M-Wright function M_nu(z), z >= 0, 0 < nu < 1, through its stable
/// subordination M_nu(z) = z^{-1-1/nu} L_nu(z^{-1/nu}) / nu.
inline double mwright_integral(double nu, double z) {
    if (z == 0.0) return recip_gamma(1.0 - nu);
    const double y = std::pow(z, 1.0 / (1.0 - nu));
    if (y * std::pow(nu, 1.0 / (1.0 - nu)) * (1.0 - nu) / nu > 800.0) return 0.0;  // underflows
    const auto [k, a0] = kanter_integral(nu, y);
    return k / (1.0 - nu) * std::exp(nu / (1.0 - nu) * std::log(z) - a0 * y);
}

/// Coefficients 1/(l! Gamma(1 - nu - nu l)) of the M-Wright series, stored as
/// (log magnitude, sign); extended on demand.
class MWrightSeries {
public:
    MWrightSeries(double nu, SeriesConfig cfg) : nu_(nu), cfg_(cfg) {}

    /// sum_l (-z)^l / (l! Gamma(1 - nu - nu l)), z >= 0
    SeriesValue operator()(double z) {
        if (z == 0.0) {
            SeriesValue v;
            v.value = recip_gamma(1.0 - nu_);
            v.cancellation_threshold = cfg_.cancellation_threshold;
            return v;
        }
        const double lz = std::log(z);
        return sum_series(
            [&](long l) {
                const auto& [lc, sg] = coef(static_cast<std::size_t>(l));
                if (sg == 0) return 0.0;
                const double mag = std::exp(lc + static_cast<double>(l) * lz);
                return ((l % 2 == 0) ? sg : -sg) * mag;
            },
            cfg_, 0, "propagator_1d series");
    }

private:
    const std::pair<double, int>& coef(std::size_t l) {
        while (coefs_.size() <= l) {
            const double k = static_cast<double>(coefs_.size());
            const auto [lg, sg] = signed_log_gamma(1.0 - nu_ - nu_ * k);
            coefs_.emplace_back(-lg - std::lgamma(k + 1.0), sg);
        }
        return coefs_[l];
    }

    double nu_;
    SeriesConfig cfg_;
    std::vector<std::pair<double, int>> coefs_;
};

inline void check_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError(std::string(who) + ": alpha must lie in (0, 1]");
}

inline void check_positive(double v, const char* who, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(who) + ": " + name + " must be > 0");
}

}  // namespace detail

/// Largest A = x^2/(c t^alpha) at which the 1-D series is used directly.
inline constexpr double kSeriesDomainA = 10.0;

/// 1-D propagator for fixed (alpha, c) with cached series coefficients:
///   N = 1/(2 sqrt(c) t^{alpha/2}) M_{alpha/2}(|x| / sqrt(c t^alpha)).
/// Beyond A = kSeriesDomainA the exact subordination integral replaces the
/// ascending series.
class Propagator1D {
public:
    /// `series_domain`: largest A evaluated by the series.
    Propagator1D(double alpha, double c_nu, SeriesConfig cfg = {}, double series_domain = kSeriesDomainA)
        : alpha_(alpha), c_(c_nu), series_domain_(series_domain), series_(alpha / 2.0, cfg), cfg_(cfg) {
        detail::check_alpha(alpha, "propagator_1d");
        detail::check_positive(c_nu, "propagator_1d", "c");
    }

    /// Pure series evaluation for any A.
    SeriesValue series(double x, double t) {
        detail::check_positive(t, "propagator_1d", "t");
        const double sc = std::sqrt(c_ * std::pow(t, alpha_));
        SeriesValue v = series_(std::abs(x) / sc);
        const double pre = 0.5 / sc;
        v.value *= pre;
        v.abs_error_estimate *= pre;
        return v;
    }

    SeriesValue operator()(double x, double t) {
        detail::check_positive(t, "propagator_1d", "t");
        const double sc = std::sqrt(c_ * std::pow(t, alpha_));
        const double z = std::abs(x) / sc;
        if (z * z <= series_domain_) return series(x, t);
        SeriesValue v;
        v.cancellation_threshold = cfg_.cancellation_threshold;
        if (alpha_ == 1.0) {
            v.value = 0.5 / sc * std::exp(-z * z / 4.0) / std::sqrt(std::numbers::pi);
        } else {
            v.value = 0.5 / sc * detail::mwright_integral(alpha_ / 2.0, z);
            v.abs_error_estimate = 1e-13 * v.value;
        }
        return v;
    }

private:
    double alpha_;
    double c_;
    double series_domain_;
    detail::MWrightSeries series_;
    SeriesConfig cfg_;
};

/// 1-D propagator, series
///   N = 1/(2 sqrt(c) t^{alpha/2}) sum_l (-1)^l A^{l/2} / (l! Gamma(1 - alpha(l+1)/2)),
/// A = x^2/(c t^alpha), for A <= kSeriesDomainA; subordination integral beyond.
inline SeriesValue propagator_1d(double alpha, double c_nu, double x, double t, const SeriesConfig& cfg = {}) {
    return Propagator1D(alpha, c_nu, cfg)(x, t);
}

/// The ascending series alone, whatever A.
inline SeriesValue propagator_1d_series(double alpha, double c_nu, double x, double t, const SeriesConfig& cfg = {}) {
    return Propagator1D(alpha, c_nu, cfg).series(x, t);
}

/// 3-D propagator
///   N = c^{-3/2} / (4 pi t^{3 alpha/2} A^{1/2}) sum_l (-1)^l A^{l/2} / (l! Gamma(1 - alpha(1 + l/2))),
/// A = r^2/(c t^alpha).
inline SeriesValue propagator_3d(double alpha, double c_nu, double r, double t, const SeriesConfig& cfg = {}) {
    detail::check_alpha(alpha, "propagator_3d");
    detail::check_positive(c_nu, "propagator_3d", "c");
    detail::check_positive(t, "propagator_3d", "t");
    if (!(r > 0.0)) throw DomainError("propagator_3d: r must be > 0 (the solution is singular at the origin)");
    const double A = r * r / (c_nu * std::pow(t, alpha));
    const double lz = 0.5 * std::log(A);
    SeriesValue v = sum_series(
        [&](long l) {
            const auto [lg, sg] = detail::signed_log_gamma(1.0 - alpha * (1.0 + 0.5 * static_cast<double>(l)));
            if (sg == 0) return 0.0;
            const double mag = std::exp(static_cast<double>(l) * lz - lg - std::lgamma(static_cast<double>(l) + 1.0));
            return ((l % 2 == 0) ? sg : -sg) * mag;
        },
        cfg, 0, "propagator_3d series");
    const double pre = std::pow(c_nu, -1.5) / (4.0 * std::numbers::pi * std::pow(t, 1.5 * alpha) * std::sqrt(A));
    v.value *= pre;
    v.abs_error_estimate *= pre;
    return v;
}

/// Small-r asymptote in two dimensions,
///   N ~ ln(t^{alpha/2} / (r/sqrt(c))) / (c pi Gamma(1-alpha) t^alpha).
/// Asymptotic for r << sqrt(c) t^{alpha/2}, not exact.
inline double propagator_2d_smallx(double alpha, double c_nu, double r, double t) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("propagator_2d_smallx: alpha must lie in (0, 1); alpha = 1 is the ordinary 2-D Gaussian");
    detail::check_positive(c_nu, "propagator_2d_smallx", "c");
    detail::check_positive(t, "propagator_2d_smallx", "t");
    detail::check_positive(r, "propagator_2d_smallx", "r");
    const double x = r / std::sqrt(c_nu);
    return std::log(std::pow(t, alpha / 2.0) / x) / (c_nu * std::numbers::pi * gamma_fn(1.0 - alpha) * std::pow(t, alpha));
}

/// Radial propagator in n dimensions. n = 1 uses propagator_1d; odd n >= 3 sums
/// both residue families of
///   N = pi^{-n/2} (4 t^alpha)^{-n/2} [ sum_l Gamma(1-n/2-l) (-X)^l / (l! Gamma(1-alpha n/2-alpha l))
///       + X^{1-n/2} sum_l Gamma(n/2-1-l) (-X)^l / (l! Gamma(1-alpha-alpha l)) ],
/// X = r^2/(4 t^alpha), at c = 1, then applies N(r;c) = c^{-n/2} N(r/sqrt(c);1).
inline SeriesValue propagator(const DiffusionQuery& q, const SeriesConfig& cfg = {}) {
    q.validate();
    if (q.n == 1) return propagator_1d(q.alpha, q.c_nu, q.r, q.t, cfg);
    if (q.n == 2)
        throw DomainError("propagator: dim = 2 has no convergent series; use propagator_2d_smallx for the small-r asymptote");
    if (q.n % 2 == 0) throw DomainError("propagator: even dim " + std::to_string(q.n) + " is unsupported");
    if (q.r == 0.0) throw DomainError("propagator: r must be > 0 for dim >= 2 (singular at the origin)");

    const double h = 0.5 * q.n;
    const double alpha = q.alpha;
    const double r1 = q.r / std::sqrt(q.c_nu);
    const double X = r1 * r1 / (4.0 * std::pow(q.t, alpha));
    const double lx = std::log(X);
    auto family = [&](double g0, double rg0, double rg_step) {
        return sum_series(
            [&](long l) {
                const double k = static_cast<double>(l);
                const auto [lr, sr] = detail::signed_log_gamma(rg0 - rg_step * k);
                if (sr == 0) return 0.0;
                const auto [lg, sg] = detail::signed_log_gamma(g0 - k);
                const double mag = std::exp(lg - lr + k * lx - std::lgamma(k + 1.0));
                const int sign = sg * sr * ((l % 2 == 0) ? 1 : -1);
                return sign * mag;
            },
            cfg, 0, "propagator series");
    };
    const SeriesValue s1 = family(1.0 - h, 1.0 - alpha * h, alpha);
    const SeriesValue s2 = family(h - 1.0, 1.0 - alpha, alpha);
    const double w2 = std::pow(X, 1.0 - h);
    const double pre = std::pow(q.c_nu, -h) * std::pow(std::numbers::pi, -h) * std::pow(4.0 * std::pow(q.t, alpha), -h);

    SeriesValue v;
    v.value = pre * (s1.value + w2 * s2.value);
    v.abs_error_estimate = std::abs(pre) * (s1.abs_error_estimate + w2 * s2.abs_error_estimate);
    v.terms_used = s1.terms_used + s2.terms_used;
    const double largest = std::max(s1.cancellation_ratio * std::abs(s1.value),
                                    s2.cancellation_ratio * std::abs(w2 * s2.value));
    v.cancellation_ratio = detail::cancellation_ratio(largest, s1.value + w2 * s2.value);
    v.cancellation_threshold = cfg.cancellation_threshold;
    return v;
}

/// Mean-square displacement in one dimension, 2 c t^alpha / Gamma(1+alpha).
inline double msd_1d(double alpha, double c_nu, double t) {
    detail::check_alpha(alpha, "msd_1d");
    detail::check_positive(c_nu, "msd_1d", "c");
    detail::check_positive(t, "msd_1d", "t");
    return 2.0 * c_nu * std::pow(t, alpha) * recip_gamma(1.0 + alpha);
}

/// Residue series of the one-sided stable density,
///   Phi_rho(t) = sum_{k>=1} (-1)^{k+1} Gamma(k rho + 1) sin(pi k rho) t^{-k rho - 1} / (pi k!).
/// Converges for all t > 0 but cancels badly for small t.
inline SeriesValue levy_density_series(const LevyQuery& q, const SeriesConfig& cfg = {}) {
    q.validate();
    const double lt = std::log(q.t);
    const double rho = q.rho;
    SeriesValue v = sum_series(
        [&](long k) {
            const double kk = static_cast<double>(k);
            const double s = sin_pi(kk * rho);
            if (s == 0.0) return 0.0;
            const double mag = std::exp(std::lgamma(kk * rho + 1.0) - std::lgamma(kk + 1.0) - (kk * rho + 1.0) * lt);
            return ((k % 2 == 1) ? 1.0 : -1.0) * s * mag / std::numbers::pi;
        },
        cfg, 1, "levy series");
    return v;
}

/// Kanter's integral representation
///   Phi_rho(t) = rho/(1-rho) t^{-1/(1-rho)} (1/pi) int_0^pi A(phi) exp(-A(phi) t^{-rho/(1-rho)}) dphi.
inline double levy_density_integral(const LevyQuery& q) {
    q.validate();
    const double rho = q.rho;
    const double y = std::pow(q.t, -rho / (1.0 - rho));
    if (y * std::pow(rho, 1.0 / (1.0 - rho)) * (1.0 - rho) / rho > 800.0) return 0.0;  // underflows
    const auto [k, a0] = detail::kanter_integral(rho, y);
    return rho / (1.0 - rho) * k * std::exp(-std::log(q.t) / (1.0 - rho) - a0 * y);
}

/// One-sided stable density with Laplace transform exp(-u^rho). rho = 1/2 is
/// elementary; elsewhere the residue series is used unless it cancels, then
/// the integral representation.
inline SeriesValue levy_density(const LevyQuery& q, const SeriesConfig& cfg = {}) {
    q.validate();
    SeriesValue v;
    v.cancellation_threshold = cfg.cancellation_threshold;
    if (q.rho == 0.5) {
        v.value = std::exp(-1.5 * std::log(q.t) - 0.25 / q.t) / (2.0 * std::sqrt(std::numbers::pi));
        return v;
    }
    if (q.t >= 0.5) {
        try {
            SeriesValue s = levy_density_series(q, cfg);
            if (s.cancellation_ratio < 1e4 || q.t >= 2.0) return s;
        } catch (const NonConvergence&) {
        }
    }
    v.value = levy_density_integral(q);
    v.abs_error_estimate = 1e-13 * v.value;
    return v;
}

/// Residue series of H^{2,0}_{1,2}[x | (a,A); (b1,B1), (b2,B2)] for simple
/// poles:
///   sum_k (-1)^k/(k! B1) Gamma(b2 - B2 (b1+k)/B1) / Gamma(a - A (b1+k)/B1) x^{(b1+k)/B1}
///   + the same with 1 <-> 2.
inline SeriesValue fox_h20_12(double x, double a, double A, double b1, double B1, double b2, double B2,
                              const SeriesConfig& cfg = {}) {
    if (!(x > 0.0)) throw DomainError("fox_h20_12: x must be > 0");
    if (!(A > 0.0 && B1 > 0.0 && B2 > 0.0)) throw DomainError("fox_h20_12: A, B1, B2 must be > 0");
    const double lx = std::log(x);
    auto family = [&](double bi, double Bi, double bj, double Bj) {
        return sum_series(
            [&](long k) {
                const double kk = static_cast<double>(k);
                const double p = (bi + kk) / Bi;
                const double g_arg = bj - Bj * p;
                if (is_nonpositive_integer(g_arg))
                    throw DomainError("fox_h20_12: coincident poles (logarithmic case) are not supported");
                const auto [lr, sr] = detail::signed_log_gamma(a - A * p);
                if (sr == 0) return 0.0;
                const auto [lg, sg] = detail::signed_log_gamma(g_arg);
                const double mag = std::exp(lg - lr + p * lx - std::lgamma(kk + 1.0)) / Bi;
                return sg * sr * ((k % 2 == 0) ? 1 : -1) * mag;
            },
            cfg, 0, "fox_h20_12 series");
    };
    const SeriesValue f1 = family(b1, B1, b2, B2);
    const SeriesValue f2 = family(b2, B2, b1, B1);
    SeriesValue v;
    v.value = f1.value + f2.value;
    v.abs_error_estimate = f1.abs_error_estimate + f2.abs_error_estimate;
    v.terms_used = f1.terms_used + f2.terms_used;
    v.cancellation_ratio = detail::cancellation_ratio(
        std::max(f1.cancellation_ratio * std::abs(f1.value), f2.cancellation_ratio * std::abs(f2.value)), v.value);
    v.cancellation_threshold = cfg.cancellation_threshold;
    return v;
}

/// Discrete residual of D_t^alpha N - c N_xx over nodes with t >= t_from.
/// `t_grid` starts at 0 (the Caputo derivative needs the whole history; see
/// pde_history_grid) and N(x, 0) = 0 away from the origin. Nodes whose
/// x-stencil touches x = 0 are skipped (the datum is singular there). The
/// result is normalized by max |N| over the evaluated nodes, 0 when N vanishes.
template <class Field>
double pde_residual_1d(double alpha, double c_nu, const std::vector<double>& x_grid, const TimeGrid& t_grid,
                       double t_from, Field&& field) {
    detail::check_alpha(alpha, "pde_residual_1d");
    detail::check_positive(c_nu, "pde_residual_1d", "c");
    if (x_grid.size() < 3) throw DomainError("pde_residual_1d: x grid needs at least 3 nodes");
    if (t_grid.size() < 3) throw DomainError("pde_residual_1d: t grid needs at least 3 nodes");
    const double hx = x_grid[1] - x_grid[0];
    for (std::size_t j = 1; j < x_grid.size(); ++j)
        if (std::abs(x_grid[j] - x_grid[j - 1] - hx) > 1e-9 * std::abs(hx))
            throw DomainError("pde_residual_1d: x grid must be uniform");
    const std::size_t nt = t_grid.size();
    const std::size_t nx = x_grid.size();
    const std::size_t i0 = std::max<std::size_t>(1, t_grid.lower_index(t_from));
    const std::size_t i_end = (alpha < 1.0) ? nt : nt - 1;
    if (i0 >= i_end) throw DomainError("pde_residual_1d: no t nodes at or after t_from");

    std::optional<CaputoL1> l1;
    if (alpha < 1.0) l1.emplace(alpha, t_grid, i0);

    std::vector<std::vector<double>> N(nx), Dt(nx);
    for (std::size_t j = 0; j < nx; ++j) {
        // history only matters for the fractional derivative
        N[j].assign(nt, 0.0);
        for (std::size_t i = (l1 ? 1 : i0 - 1); i < nt; ++i) N[j][i] = field(x_grid[j], t_grid[i]);
        if (l1) {
            Dt[j] = l1->apply(N[j]);
        } else {
            Dt[j].assign(nt, 0.0);
            for (std::size_t i = i0; i < i_end; ++i) {
                const double hm = t_grid[i] - t_grid[i - 1], hp = t_grid[i + 1] - t_grid[i];
                Dt[j][i] = (hm * hm * N[j][i + 1] - hp * hp * N[j][i - 1] + (hp * hp - hm * hm) * N[j][i]) /
                           (hm * hp * (hm + hp));
            }
        }
    }
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = i0; i < i_end; ++i) {
        for (std::size_t j = 1; j + 1 < nx; ++j) {
            if (x_grid[j - 1] * x_grid[j + 1] <= 0.0) continue;
            const double nxx = (N[j + 1][i] - 2.0 * N[j][i] + N[j - 1][i]) / (hx * hx);
            worst = std::max(worst, std::abs(Dt[j][i] - c_nu * nxx));
            scale = std::max(scale, std::abs(N[j][i]));
        }
    }
    return scale == 0.0 ? 0.0 : worst / scale;
}

/// History grid for pde_residual_1d: graded on [0, t_from] so the early-time
/// singularity of the propagator is resolved, uniform with step h after.
inline TimeGrid pde_history_grid(double t_from, double t_max, double h, double grading = 3.0) {
    return TimeGrid::graded_then_uniform(t_from, t_max, h, grading);
}

/// pde_residual_1d applied to the 1-D propagator.
inline double pde_residual_1d(double alpha, double c_nu, const std::vector<double>& x_grid, const TimeGrid& t_grid,
                              double t_from) {
    // absolute series error stays near 1e-16 e^{sqrt(A)}, harmless here
    Propagator1D p(alpha, c_nu, {}, 40.0);
    return pde_residual_1d(alpha, c_nu, x_grid, t_grid, t_from, [&](double x, double t) { return p(x, t).value; });
}

}  // namespace frackit
