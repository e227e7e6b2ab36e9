#pragma once

// Fractional integrals/derivatives of sampled data and the weakly singular
// convolution engine shared by the reaction solvers.
//
// All quadratures here are product rules: the data f is interpolated
// piecewise-linearly and integrated exactly against the kernel, using the
// first two iterated antiderivatives of the kernel,
//     P1(s) = int_0^s K,   P2(s) = int_0^s P1.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "special_fn.hpp"

namespace frackit {

/// I^nu [u^{rho-1}](t) = Gamma(rho)/Gamma(rho+nu) t^{rho+nu-1}; nu = 0 is the identity.
inline double rl_integral_power(double nu, double rho, double t) {
    if (!(nu >= 0.0) || !(rho > 0.0)) throw DomainError("rl_integral_power: need nu >= 0, rho > 0");
    if (!(t >= 0.0)) throw DomainError("rl_integral_power: t must be >= 0");
    if (nu == 0.0) return std::pow(t, rho - 1.0);
    return gamma_fn(rho) * recip_gamma(rho + nu) * std::pow(t, rho + nu - 1.0);
}

/// Kernel K given through its iterated antiderivatives (both vanish at 0).
struct IntegratedKernel {
    std::function<double(double)> p1;
    std::function<double(double)> p2;
};

/// K(s) = s^{theta-1} g(s), g continuous on [0, T].
struct WeaklySingularKernel {
    double theta = 1.0;
    std::function<double(double)> g;
};

/// The RL kernel s^{nu-1}/Gamma(nu) in integrated form.
inline IntegratedKernel power_kernel(double nu) {
    if (!(nu > 0.0)) throw DomainError("power_kernel: nu must be > 0");
    const double c1 = recip_gamma(nu + 1.0);
    const double c2 = recip_gamma(nu + 2.0);
    return {[=](double s) { return c1 * std::pow(s, nu); },
            [=](double s) { return c2 * std::pow(s, nu + 1.0); }};
}

/// Kernel antiderivatives prepared for product rules on one grid. Uniform
/// grids tabulate P1, P2 at the N+1 lags k*h; other grids keep the kernels
/// and evaluate them at t_i - t_j on demand.
class KernelTable {
public:
    using PairFn = std::function<std::pair<double, double>(double)>;

    explicit KernelTable(const TimeGrid& grid) : grid_(&grid), step_(grid.uniform_step()) {
        if (step_) {
            p1_.assign(grid.size(), 0.0);
            p2_.assign(grid.size(), 0.0);
        }
    }

    KernelTable(const TimeGrid& grid, const IntegratedKernel& k) : KernelTable(grid) { add(1.0, k); }

    /// this += coef * kernel
    void add(double coef, const IntegratedKernel& k) {
        add_pair(coef, [k](double s) { return std::pair{k.p1(s), k.p2(s)}; });
    }

    /// Add a kernel given by one callable returning {P1(s), P2(s)}.
    template <class F>
    void add_pair(double coef, F&& pair_fn) {
        if (step_) {
            for (std::size_t m = 1; m < p1_.size(); ++m) {
                const auto [a, b] = pair_fn(*step_ * static_cast<double>(m));
                p1_[m] += coef * a;
                p2_[m] += coef * b;
            }
        } else {
            parts_.emplace_back(coef, PairFn(std::forward<F>(pair_fn)));
        }
    }

    void add(double coef, const KernelTable& other) {
        if (other.grid_ != grid_) throw DomainError("KernelTable::add: tables built on different grids");
        if (step_) {
            for (std::size_t m = 0; m < p1_.size(); ++m) {
                p1_[m] += coef * other.p1_[m];
                p2_[m] += coef * other.p2_[m];
            }
        } else {
            for (const auto& [c, fn] : other.parts_) parts_.emplace_back(coef * c, fn);
        }
    }

    const TimeGrid& grid() const { return *grid_; }
    bool uniform() const noexcept { return step_.has_value(); }

    /// Weights w such that int_0^{t_i} f(u) K(t_i - u) du = sum_j w[j] f_j
    /// for piecewise-linear f. `w` is resized to i+1.
    void row_weights(std::size_t i, std::vector<double>& w) const {
        const TimeGrid& g = *grid_;
        w.assign(i + 1, 0.0);
        std::vector<double> q1(i + 1, 0.0), q2(i + 1, 0.0);  // P at lag t_i - t_j
        for (std::size_t j = 0; j < i; ++j) {
            if (step_) {
                q1[j] = p1_[i - j];
                q2[j] = p2_[i - j];
            } else {
                const double lag = g[i] - g[j];
                for (const auto& [c, fn] : parts_) {
                    const auto [a, b] = fn(lag);
                    q1[j] += c * a;
                    q2[j] += c * b;
                }
            }
        }
        for (std::size_t j = 0; j < i; ++j) {
            const double h = g[j + 1] - g[j];
            const double m0 = q1[j] - q1[j + 1];
            const double q = q2[j] - q2[j + 1] - h * q1[j + 1];
            w[j] += m0 - q / h;
            w[j + 1] += q / h;
        }
    }

    /// Uniform grids: weights of the left/right node of the cell whose
    /// nearer end sits at lag m*h.
    double left_weight(std::size_t m) const {
        const double h = *step_;
        return p1_[m + 1] - p1_[m] - (p2_[m + 1] - p2_[m] - h * p1_[m]) / h;
    }
    double right_weight(std::size_t m) const {
        const double h = *step_;
        return (p2_[m + 1] - p2_[m] - h * p1_[m]) / h;
    }

    /// Product-rule convolution of node values f with the kernel.
    std::vector<double> convolve(std::span<const double> f) const {
        const std::size_t n = grid_->size();
        if (f.size() != n) throw DomainError("KernelTable::convolve: length mismatch");
        std::vector<double> out(n, 0.0);
        if (step_) {
            std::vector<double> a(n), b(n);
            for (std::size_t m = 0; m + 1 < n; ++m) {
                a[m] = left_weight(m);
                b[m] = right_weight(m);
            }
            for (std::size_t i = 1; i < n; ++i) {
                double acc = 0.0;
                for (std::size_t m = 0; m < i; ++m) acc += a[m] * f[i - m - 1] + b[m] * f[i - m];
                out[i] = acc;
            }
        } else {
            std::vector<double> w;
            for (std::size_t i = 1; i < n; ++i) {
                row_weights(i, w);
                double acc = 0.0;
                for (std::size_t j = 0; j <= i; ++j) acc += w[j] * f[j];
                out[i] = acc;
            }
        }
        return out;
    }

private:
    const TimeGrid* grid_;
    std::optional<double> step_;
    std::vector<double> p1_;
    std::vector<double> p2_;
    std::vector<std::pair<double, PairFn>> parts_;
};

/// Riemann-Liouville integral of order nu of piecewise-linear data.
inline SampledFunction rl_integral_sampled(double nu, const SampledFunction& f) {
    if (!(nu > 0.0)) throw DomainError("rl_integral_sampled: nu must be > 0");
    if (f.size() == 0) throw DomainError("rl_integral_sampled: empty grid");
    const KernelTable table(f.grid, power_kernel(nu));
    return SampledFunction(f.grid, table.convolve(f.values));
}

/// L1 discretization of the Caputo derivative of order alpha in (0,1) on a
/// fixed grid: I^{1-alpha} applied to the derivative of the piecewise-linear
/// interpolant. Weights for rows >= first_row are precomputed, so applying it
/// to many functions on the same grid is cheap.
class CaputoL1 {
public:
    CaputoL1(double alpha, const TimeGrid& grid, std::size_t first_row = 1) : grid_(grid), first_(first_row) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("caputo_derivative_sampled: alpha must lie in (0,1)");
        if (grid.size() == 0) throw DomainError("caputo_derivative_sampled: empty grid");
        const std::size_t n = grid.size();
        const double e = 1.0 - alpha;
        const double scale = recip_gamma(2.0 - alpha);
        if (first_ == 0) first_ = 1;
        if (const auto h = grid.uniform_step()) {
            uniform_.resize(n);  // w[m] = ((m+1)h)^e - (mh)^e
            for (std::size_t m = 0; m + 1 < n; ++m)
                uniform_[m] = scale * (std::pow(*h * static_cast<double>(m + 1), e) -
                                       std::pow(*h * static_cast<double>(m), e));
        } else {
            for (std::size_t i = first_; i < n; ++i) {
                std::vector<double> row(i);
                for (std::size_t k = 0; k < i; ++k)
                    row[k] = scale * (std::pow(grid[i] - grid[k], e) - std::pow(grid[i] - grid[k + 1], e));
                rows_.push_back(std::move(row));
            }
        }
    }

    /// Derivative at every node; rows before first_row are left at 0.
    std::vector<double> apply(std::span<const double> f) const {
        const std::size_t n = grid_.size();
        if (f.size() != n) throw DomainError("caputo_derivative_sampled: value count does not match grid");
        std::vector<double> slope(n > 0 ? n - 1 : 0);
        for (std::size_t k = 0; k + 1 < n; ++k) slope[k] = (f[k + 1] - f[k]) / (grid_[k + 1] - grid_[k]);
        std::vector<double> out(n, 0.0);
        for (std::size_t i = first_; i < n; ++i) {
            double acc = 0.0;
            if (!uniform_.empty()) {
                for (std::size_t m = 0; m < i; ++m) acc += slope[i - m - 1] * uniform_[m];
            } else {
                const auto& row = rows_[i - first_];
                for (std::size_t k = 0; k < i; ++k) acc += slope[k] * row[k];
            }
            out[i] = acc;
        }
        return out;
    }

private:
    TimeGrid grid_;
    std::size_t first_;
    std::vector<double> uniform_;
    std::vector<std::vector<double>> rows_;
};

/// Caputo derivative of order alpha in (0,1) by the L1 rule.
inline SampledFunction caputo_derivative_sampled(double alpha, const SampledFunction& f) {
    return SampledFunction(f.grid, CaputoL1(alpha, f.grid).apply(f.values));
}

/// int_0^t f(u) K(t-u) du on the grid of f, K in integrated form.
inline SampledFunction singular_convolve(const SampledFunction& f, const IntegratedKernel& k) {
    const KernelTable table(f.grid, k);
    return SampledFunction(f.grid, table.convolve(f.values));
}

/// int_0^t f(u) (t-u)^{theta-1} g(t-u) du. The power factor is integrated
/// exactly per subinterval; the product f(u) g(t-u) is interpolated linearly.
inline SampledFunction singular_convolve(const SampledFunction& f, const WeaklySingularKernel& k) {
    if (!(k.theta > 0.0))
        throw DomainError("singular_convolve: kernel exponent theta must be > 0");
    if (!k.g) throw DomainError("singular_convolve: kernel factor g is empty");
    const TimeGrid& grid = f.grid;
    const std::size_t n = grid.size();
    const double th = k.theta;
    const IntegratedKernel pw{[th](double s) { return std::pow(s, th) / th; },
                              [th](double s) { return std::pow(s, th + 1.0) / (th * (th + 1.0)); }};
    const KernelTable table(grid, pw);
    std::vector<double> out(n, 0.0);
    if (const auto h = grid.uniform_step()) {
        std::vector<double> gv(n), a(n), b(n);
        for (std::size_t m = 0; m < n; ++m) gv[m] = k.g(*h * static_cast<double>(m));
        for (std::size_t m = 0; m + 1 < n; ++m) {
            a[m] = table.left_weight(m) * gv[m + 1];
            b[m] = table.right_weight(m) * gv[m];
        }
        for (std::size_t i = 1; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t m = 0; m < i; ++m) acc += a[m] * f.values[i - m - 1] + b[m] * f.values[i - m];
            out[i] = acc;
        }
    } else {
        std::vector<double> w;
        for (std::size_t i = 1; i < n; ++i) {
            table.row_weights(i, w);
            double acc = 0.0;
            for (std::size_t j = 0; j <= i; ++j) acc += w[j] * f.values[j] * k.g(grid[i] - grid[j]);
            out[i] = acc;
        }
    }
    return SampledFunction(grid, std::move(out));
}

/// Convenience overload sampling a callable f on `grid` first.
template <class F>
    requires std::is_invocable_r_v<double, F, double>
SampledFunction singular_convolve(F&& f, const WeaklySingularKernel& k, const TimeGrid& grid) {
    return singular_convolve(SampledFunction::sample(grid, f), k);
}

}  // namespace frackit
