#pragma once

// Solvers for the unified fractional reaction equation
//
//     N(t) - N0 f(t) = - sum_j a_j I^{nu_j} N(t),
//
// where I^nu is the Riemann-Liouville integral. Closed-form (Mittag-Leffler
// series) solvers and a direct Volterra discretization live side by side so
// each can be checked against the other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "frac_ops.hpp"
#include "grid.hpp"
#include "laplace_lab.hpp"
#include "series.hpp"
#include "special_fn.hpp"

namespace frackit {

namespace forcing {

struct Unit {};

/// t^{rho-1}
struct PowerLaw {
    double rho = 1.0;
};

/// t^{gamma-1} E^delta_{nu,gamma}(-(c t)^nu)
struct MittagLeffler {
    double nu = 1.0;
    double gamma_ = 1.0;
    double delta = 1.0;
    double c = 1.0;
};

struct Tabulated {
    SampledFunction samples;
};

}  // namespace forcing

/// Right-hand side f(t) of the reaction equation.
class Forcing {
public:
    using Variant = std::variant<forcing::Unit, forcing::PowerLaw, forcing::MittagLeffler, forcing::Tabulated>;

    Forcing() = default;
    Forcing(forcing::Unit u) : v_(u) {}
    Forcing(forcing::PowerLaw p) : v_(p) { validate(); }
    Forcing(forcing::MittagLeffler m) : v_(m) { validate(); }
    Forcing(forcing::Tabulated t) : v_(std::move(t)) { validate(); }

    static Forcing unit() { return forcing::Unit{}; }
    static Forcing power_law(double rho) { return forcing::PowerLaw{rho}; }
    static Forcing mittag_leffler(double nu, double gamma_, double delta, double c) {
        return forcing::MittagLeffler{nu, gamma_, delta, c};
    }
    static Forcing tabulated(SampledFunction f) { return forcing::Tabulated{std::move(f)}; }

    const Variant& variant() const noexcept { return v_; }

    void validate() const {
        std::visit(
            [](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, forcing::PowerLaw>) {
                    if (!(f.rho > 0.0)) throw DomainError("forcing.rho must be > 0");
                } else if constexpr (std::is_same_v<T, forcing::MittagLeffler>) {
                    if (!(f.nu > 0.0)) throw DomainError("forcing.nu must be > 0");
                    if (!(f.gamma_ > 0.0)) throw DomainError("forcing.gamma must be > 0");
                    if (!(f.delta > 0.0)) throw DomainError("forcing.delta must be > 0");
                    if (!(f.c > 0.0)) throw DomainError("forcing.c must be > 0");
                } else if constexpr (std::is_same_v<T, forcing::Tabulated>) {
                    if (f.samples.size() < 2) throw DomainError("forcing.table needs at least two samples");
                }
            },
            v_);
    }

    double operator()(double t, const SeriesConfig& cfg = {}) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, forcing::Unit>) {
                    return 1.0;
                } else if constexpr (std::is_same_v<T, forcing::PowerLaw>) {
                    return std::pow(t, f.rho - 1.0);
                } else if constexpr (std::is_same_v<T, forcing::MittagLeffler>) {
                    const double z = -std::pow(f.c * t, f.nu);
                    return std::pow(t, f.gamma_ - 1.0) *
                           ml_generalized({f.nu, f.gamma_, f.delta}, z, cfg).value;
                } else {
                    return f.samples(t);
                }
            },
            v_);
    }

    /// Laplace transform f~(s).
    double laplace(double s) const {
        return std::visit(
            [&](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, forcing::Unit>) {
                    return 1.0 / s;
                } else if constexpr (std::is_same_v<T, forcing::PowerLaw>) {
                    return gamma_fn(f.rho) * std::pow(s, -f.rho);
                } else if constexpr (std::is_same_v<T, forcing::MittagLeffler>) {
                    // s^{-gamma} (1 + c^nu s^{-nu})^{-delta}
                    const double x = std::pow(f.c, f.nu) * std::pow(s, -f.nu);
                    return std::pow(s, -f.gamma_) * std::pow(1.0 + x, -f.delta);
                } else {
                    return laplace_forward(f.samples, s);
                }
            },
            v_);
    }

    /// Node values on `grid`. Forcings unbounded at t = 0 are rejected since
    /// the product rules interpolate f linearly.
    std::vector<double> sample(const TimeGrid& grid, const SeriesConfig& cfg = {}) const {
        std::vector<double> v(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            v[i] = (*this)(grid[i], cfg);
            if (!std::isfinite(v[i]))
                throw DomainError("forcing is unbounded at t = " + std::to_string(grid[i]) +
                                  "; grid solvers need a bounded forcing (rho >= 1, gamma >= 1)");
        }
        return v;
    }

private:
    Variant v_ = forcing::Unit{};
};

/// One term a * I^nu of the reaction equation.
struct ReactionTerm {
    double a = 1.0;
    double nu = 1.0;
};

struct ReactionProblem {
    double N0 = 1.0;
    std::vector<ReactionTerm> terms;
    Forcing forcing;

    void validate(double nu_cap = 10.0) const {
        if (!std::isfinite(N0)) throw DomainError("problem.N0 must be finite");
        if (terms.empty()) throw DomainError("problem.terms must not be empty");
        for (const auto& t : terms) {
            if (!(t.a > 0.0) || !std::isfinite(t.a)) throw DomainError("problem.terms: every a_j must be > 0");
            if (!(t.nu > 0.0) || !(t.nu <= nu_cap))
                throw DomainError("problem.terms: every nu_j must lie in (0, " + std::to_string(nu_cap) + "]");
        }
        forcing.validate();
    }
};

struct SolverConfig {
    int max_layers = 200;
    double layer_tolerance = 1e-14;
    int divergence_run = 3;
    SeriesConfig series;

    void validate() const {
        if (max_layers < 1) throw DomainError("solver.max_layers must be >= 1");
        if (!(layer_tolerance > 0.0)) throw DomainError("solver.layer_tolerance must be > 0");
    }
};

/// Solution samples plus truncation diagnostics.
struct Solution {
    SampledFunction N;
    std::vector<double> err_est;  ///< per node; zero where no estimate exists
    int layers_used = 0;
    bool cancellation_warning = false;
};

/// Weak composition of l into parts.size() nonnegative parts.
struct Composition {
    std::vector<int> parts;
    double weight = 1.0;  ///< l! / prod(parts!)
};

/// All weak compositions of l into m parts with multinomial weights, first
/// part descending: (2,0), (1,1), (0,2), ...
inline std::vector<Composition> enumerate_compositions(int l, int m, double max_count = 1e7) {
    if (l < 0) throw DomainError("enumerate_compositions: l must be >= 0");
    if (m < 1) throw DomainError("enumerate_compositions: m must be >= 1");
    // C(l+m-1, m-1)
    double count = 1.0;
    for (int k = 1; k < m; ++k) count = count * static_cast<double>(l + k) / static_cast<double>(k);
    if (count > max_count)
        throw DomainError("enumerate_compositions: " + std::to_string(count) + " compositions exceed bound");
    std::vector<Composition> out;
    out.reserve(static_cast<std::size_t>(count + 0.5));
    std::vector<int> parts(static_cast<std::size_t>(m), 0);
    auto rec = [&](auto&& self, int pos, int remaining, double weight) -> void {
        if (pos == m - 1) {
            parts[static_cast<std::size_t>(pos)] = remaining;
            out.push_back({parts, weight});
            return;
        }
        // binomial C(remaining, r) built incrementally from r = remaining down
        double binom = 1.0;
        for (int r = remaining; r >= 0; --r) {
            parts[static_cast<std::size_t>(pos)] = r;
            self(self, pos + 1, remaining - r, weight * binom);
            binom = binom * static_cast<double>(r) / static_cast<double>(remaining - r + 1);
        }
    };
    rec(rec, 0, l, 1.0);
    return out;
}

namespace detail {

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline Solution finish(const TimeGrid& grid, std::vector<double> values, double N0) {
    for (double& x : values) x *= N0;
    Solution sol{SampledFunction(grid, std::move(values)), {}, 0, false};
    sol.err_est.assign(grid.size(), 0.0);
    return sol;
}

// Kernel d/ds E^n_{nu,1}(lambda s^nu) (plus the unit mass at s = 0 handled
// by the caller) as a {P1, P2} pair:
//   P1 = E^n_{nu,1}(w) - 1,  P2 = s (E^n_{nu,2}(w) - 1),  w = lambda s^nu.
inline KernelTable::PairFn ml_derivative_pair(double nu, double lambda, double n, const SeriesConfig& cfg) {
    auto e1 = std::make_shared<PrabhakarSeries>(MLParams{nu, 1.0, n}, cfg);
    auto e2 = std::make_shared<PrabhakarSeries>(MLParams{nu, 2.0, n}, cfg);
    return [=](double s) {
        const double w = lambda * std::pow(s, nu);
        return std::pair{(*e1)(w, 1).value, s * (*e2)(w, 1).value};
    };
}

// Kernel s^{xi-1} E^delta_{beta,xi}(lambda s^beta), xi > 0:
//   P1 = s^xi E^delta_{beta,xi+1}(w),  P2 = s^{xi+1} E^delta_{beta,xi+2}(w).
inline KernelTable::PairFn ml_power_pair(double beta, double xi, double delta, double lambda,
                                         const SeriesConfig& cfg) {
    auto e1 = std::make_shared<PrabhakarSeries>(MLParams{beta, xi + 1.0, delta}, cfg);
    auto e2 = std::make_shared<PrabhakarSeries>(MLParams{beta, xi + 2.0, delta}, cfg);
    return [=](double s) {
        const double w = lambda * std::pow(s, beta);
        const double sx = std::pow(s, xi);
        return std::pair{sx * (*e1)(w).value, sx * s * (*e2)(w).value};
    };
}

}  // namespace detail

/// General solution through the layered Mittag-Leffler expansion: layer l
/// collects all weak compositions r of l into n-1 parts, each contributing
///   (-1)^l l!/prod r! prod a_{mu+1}^{r_mu}
///       int_0^t f(u) (t-u)^{xi-1} E^{l+1}_{nu_1,xi}(-a_1 (t-u)^{nu_1}) du,
/// xi = sum nu_{mu+1} r_mu. The xi = 0 term is f(t) plus the convolution
/// with d/ds E_{nu_1}(-a_1 s^{nu_1}).
inline Solution solve_theorem1(const ReactionProblem& problem, const TimeGrid& grid, const SolverConfig& cfg = {}) {
    problem.validate();
    cfg.validate();
    const double nu1 = problem.terms[0].nu;
    const double a1 = problem.terms[0].a;
    const std::size_t n_terms = problem.terms.size();

    // f = t^{rho-1}: every convolution is exact,
    //   f * s^{xi-1} E^d_{nu,xi}(-a s^nu) = Gamma(rho) t^{xi+rho-1} E^d_{nu,xi+rho}(-a t^nu).
    std::optional<double> rho;
    if (std::holds_alternative<forcing::Unit>(problem.forcing.variant())) rho = 1.0;
    if (const auto* pw = std::get_if<forcing::PowerLaw>(&problem.forcing.variant())) rho = pw->rho;

    std::vector<double> f;
    std::vector<double> total;
    if (rho) {
        if (*rho < 1.0) throw DomainError("forcing is unbounded at t = 0; grid solvers need rho >= 1");
        f.assign(grid.size(), 0.0);
        total.resize(grid.size());
        PrabhakarSeries e0(MLParams{nu1, *rho, 1.0}, cfg.series);
        const double g_rho = gamma_fn(*rho);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double t = grid[i];
            total[i] = (t == 0.0) ? problem.forcing(0.0) : g_rho * std::pow(t, *rho - 1.0) * e0(-a1 * std::pow(t, nu1)).value;
        }
    } else {
        f = problem.forcing.sample(grid, cfg.series);
        total = f;
        KernelTable k0(grid);
        k0.add_pair(1.0, detail::ml_derivative_pair(nu1, -a1, 1.0, cfg.series));
        const auto conv = k0.convolve(f);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += conv[i];
    }
    Solution sol;
    std::vector<double> last_layer(grid.size(), 0.0);
    int layers = 1;
    if (n_terms > 1) {
        double prev_norm = detail::max_abs(total);
        int rising = 0;
        bool converged = false;
        for (int l = 1; l <= cfg.max_layers; ++l) {
            // group compositions by exponent xi
            std::map<double, double> by_xi;
            for (const auto& comp : enumerate_compositions(l, static_cast<int>(n_terms - 1))) {
                double xi = 0.0, coef = comp.weight * ((l % 2 == 0) ? 1.0 : -1.0);
                for (std::size_t mu = 0; mu < comp.parts.size(); ++mu) {
                    const int r = comp.parts[mu];
                    if (r == 0) continue;
                    xi += problem.terms[mu + 1].nu * r;
                    coef *= std::pow(problem.terms[mu + 1].a, r);
                }
                by_xi[std::round(xi * 1e12) / 1e12] += coef;
            }
            std::vector<double> layer(grid.size(), 0.0);
            if (rho) {
                const double g_rho = gamma_fn(*rho);
                for (const auto& [xi, coef] : by_xi) {
                    PrabhakarSeries e(MLParams{nu1, xi + *rho, l + 1.0}, cfg.series);
                    for (std::size_t i = 1; i < grid.size(); ++i) {
                        const double t = grid[i];
                        const SeriesValue v = e(-a1 * std::pow(t, nu1));
                        const double term = coef * g_rho * std::pow(t, xi + *rho - 1.0) * v.value;
                        if (std::abs(term) * 1e-16 * v.cancellation_ratio > 1e-10) sol.cancellation_warning = true;
                        layer[i] += term;
                    }
                }
            } else {
                KernelTable layer_kernel(grid);
                for (const auto& [xi, coef] : by_xi) {
                    auto e1 = std::make_shared<PrabhakarSeries>(MLParams{nu1, xi + 1.0, l + 1.0}, cfg.series);
                    auto e2 = std::make_shared<PrabhakarSeries>(MLParams{nu1, xi + 2.0, l + 1.0}, cfg.series);
                    bool* warn = &sol.cancellation_warning;
                    layer_kernel.add_pair(coef, [=, xi = xi, coef = coef](double s) {
                        const double w = -a1 * std::pow(s, nu1);
                        const SeriesValue v1 = (*e1)(w);
                        const double sx = std::pow(s, xi);
                        // rounding error of this term relative to O(1) solution values
                        if (std::abs(coef * sx * v1.value) * 1e-16 * v1.cancellation_ratio > 1e-10) *warn = true;
                        return std::pair{sx * v1.value, sx * s * (*e2)(w).value};
                    });
                }
                layer = layer_kernel.convolve(f);
            }
            for (std::size_t i = 0; i < total.size(); ++i) total[i] += layer[i];
            last_layer = layer;
            layers = l + 1;
            const double norm = detail::max_abs(layer);
            if (norm <= cfg.layer_tolerance * detail::max_abs(total)) {
                converged = true;
                break;
            }
            // a layer as large as the solution itself that keeps growing
            rising = (norm >= prev_norm && norm >= detail::max_abs(total)) ? rising + 1 : 0;
            if (rising >= cfg.divergence_run) {
                for (double& x : total) x *= problem.N0;
                throw Divergence("solve_theorem1: layer contributions grew for " +
                                     std::to_string(rising) + " consecutive layers (l = " + std::to_string(l) + ")",
                                 total.back());
            }
            prev_norm = norm;
        }
        if (!converged) {
            throw NonConvergence("solve_theorem1: layer tolerance not met within " +
                                     std::to_string(cfg.max_layers) + " layers",
                                 total.back() * problem.N0);
        }
    }
    const bool warn = sol.cancellation_warning;
    sol = detail::finish(grid, std::move(total), problem.N0);
    sol.layers_used = layers;
    sol.cancellation_warning = warn;
    for (std::size_t i = 0; i < grid.size(); ++i) sol.err_est[i] = std::abs(problem.N0 * last_layer[i]);
    return sol;
}

/// Equation with a_j = C(n,j) c^{j nu}, nu_j = j nu:
///   N = N0 [ f(t) + int_0^t f(u) d/ds E^n_{nu,1}(-c^nu s^nu)|_{s=t-u} du ].
inline Solution solve_binomial_cascade(double nu, double c, int n, const Forcing& f, const TimeGrid& grid,
                                       const SolverConfig& cfg = {}, double N0 = 1.0) {
    if (!(nu > 0.0)) throw DomainError("cascade.nu must be > 0");
    if (!(c > 0.0)) throw DomainError("cascade.c must be > 0");
    if (n < 1) throw DomainError("cascade.n must be >= 1");
    f.validate();
    const std::vector<double> fv = f.sample(grid, cfg.series);
    KernelTable k(grid);
    k.add_pair(1.0, detail::ml_derivative_pair(nu, -std::pow(c, nu), n, cfg.series));
    auto conv = k.convolve(fv);
    for (std::size_t i = 0; i < conv.size(); ++i) conv[i] += fv[i];
    Solution sol = detail::finish(grid, std::move(conv), N0);
    sol.layers_used = 1;
    return sol;
}

/// Terms of the binomial cascade as a general problem.
inline std::vector<ReactionTerm> binomial_cascade_terms(double nu, double c, int n) {
    std::vector<ReactionTerm> terms;
    double binom = 1.0;
    for (int j = 1; j <= n; ++j) {
        binom = binom * static_cast<double>(n - j + 1) / static_cast<double>(j);
        terms.push_back({binom * std::pow(c, j * nu), j * nu});
    }
    return terms;
}

/// Equation with a_r = a^r, nu_r = r nu (r = 1..n). With beta = (n+1) nu
/// and A = a^{n+1}:
///   N = N0 [ f + f * d/ds E_{beta,1}(A s^beta) - a f * s^{nu-1} E_{beta,nu}(A s^beta) ].
inline Solution solve_geometric(double nu, double a, int n, const Forcing& f, const TimeGrid& grid,
                                const SolverConfig& cfg = {}, double N0 = 1.0) {
    if (!(nu > 0.0)) throw DomainError("geometric.nu must be > 0");
    if (!(a > 0.0)) throw DomainError("geometric.a must be > 0");
    if (n < 1) throw DomainError("geometric.n must be >= 1");
    f.validate();
    const std::vector<double> fv = f.sample(grid, cfg.series);
    const double beta = (n + 1) * nu;
    const double A = std::pow(a, n + 1);
    KernelTable k(grid);
    k.add_pair(1.0, detail::ml_derivative_pair(beta, A, 1.0, cfg.series));
    k.add_pair(-a, detail::ml_power_pair(beta, nu, 1.0, A, cfg.series));
    auto conv = k.convolve(fv);
    for (std::size_t i = 0; i < conv.size(); ++i) conv[i] += fv[i];
    Solution sol = detail::finish(grid, std::move(conv), N0);
    sol.layers_used = 1;
    return sol;
}

inline std::vector<ReactionTerm> geometric_terms(double nu, double a, int n) {
    std::vector<ReactionTerm> terms;
    for (int r = 1; r <= n; ++r) terms.push_back({std::pow(a, r), r * nu});
    return terms;
}

/// t^{gamma-1} E^{delta+n}_{nu,gamma}(-(c t)^nu): the response of the binomial
/// cascade to a Mittag-Leffler forcing with matching nu and c.
inline double closed_form_cor22(double nu, double gamma_, double delta, double c, int n, double t,
                                const SeriesConfig& cfg = {}) {
    if (!(nu > 0.0) || !(gamma_ > 0.0) || !(delta > 0.0) || !(c > 0.0) || n < 0)
        throw DomainError("closed_form_cor22: parameters must be positive");
    if (!(t >= 0.0)) throw DomainError("closed_form_cor22: t must be >= 0");
    if (t == 0.0 && gamma_ < 1.0) throw DomainError("closed_form_cor22: t = 0 needs gamma >= 1");
    return std::pow(t, gamma_ - 1.0) * ml_generalized({nu, gamma_, delta + n}, -std::pow(c * t, nu), cfg).value;
}

/// t^{rho-1} Gamma(rho) E^n_{nu,rho}(-(c t)^nu): the response of the binomial
/// cascade to the power-law forcing t^{rho-1}.
inline double closed_form_cor23(double nu, double rho, double c, int n, double t, const SeriesConfig& cfg = {}) {
    if (!(nu > 0.0) || !(rho > 0.0) || !(c > 0.0) || n < 1)
        throw DomainError("closed_form_cor23: parameters must be positive");
    if (!(t >= 0.0)) throw DomainError("closed_form_cor23: t must be >= 0");
    if (t == 0.0 && rho < 1.0) throw DomainError("closed_form_cor23: t = 0 needs rho >= 1");
    return std::pow(t, rho - 1.0) * gamma_fn(rho) *
           ml_generalized({nu, rho, static_cast<double>(n)}, -std::pow(c * t, nu), cfg).value;
}

/// Direct product-trapezoidal discretization of the integral equation,
/// solved by forward substitution. Independent of every series above.
inline Solution solve_volterra_direct(const ReactionProblem& problem, const TimeGrid& grid) {
    problem.validate();
    const std::vector<double> f = problem.forcing.sample(grid);
    KernelTable k(grid);
    for (const auto& term : problem.terms) k.add(term.a, power_kernel(term.nu));
    const std::size_t n = grid.size();
    std::vector<double> N(n, 0.0);
    N[0] = problem.N0 * f[0];
    if (k.uniform()) {
        std::vector<double> a(n), b(n);
        for (std::size_t m = 0; m + 1 < n; ++m) {
            a[m] = k.left_weight(m);
            b[m] = k.right_weight(m);
        }
        const double diag = 1.0 + (n > 1 ? b[0] : 0.0);
        if (!(diag > 0.0)) throw NumericalError("solve_volterra_direct: singular diagonal", 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            double acc = a[0] * N[i - 1];
            for (std::size_t m = 1; m < i; ++m) acc += a[m] * N[i - m - 1] + b[m] * N[i - m];
            N[i] = (problem.N0 * f[i] - acc) / diag;
        }
    } else {
        std::vector<double> w;
        for (std::size_t i = 1; i < n; ++i) {
            k.row_weights(i, w);
            double acc = 0.0;
            for (std::size_t j = 0; j < i; ++j) acc += w[j] * N[j];
            const double diag = 1.0 + w[i];
            if (!(diag > 0.0)) throw NumericalError("solve_volterra_direct: singular diagonal", N[i - 1]);
            N[i] = (problem.N0 * f[i] - acc) / diag;
        }
    }
    Solution sol{SampledFunction(grid, std::move(N)), std::vector<double>(n, 0.0), 0, false};
    return sol;
}

/// Volterra solution on a graded grid t_k = t_max (k/N)^grading. Grading
/// concentrates nodes where the solution behaves like t^{nu_j}, restoring
/// near second-order accuracy; sample the result at any t in [0, t_max].
inline Solution volterra_oracle(const ReactionProblem& problem, double t_max, std::size_t intervals = 2048,
                                double grading = 2.5) {
    return solve_volterra_direct(problem, TimeGrid::graded(t_max, intervals, grading));
}

/// |N~(s) (1 + sum a_j s^{-nu_j}) - N0 f~(s)| with N~ from the exact
/// transform of the piecewise-linear solution. Throws NumericalError naming
/// s when the grid horizon is too short for e^{-sT}|N(T)|/s < tail_tolerance.
inline std::vector<double> laplace_domain_residual(const ReactionProblem& problem, const SampledFunction& solution,
                                                   std::span<const double> s_values, double tail_tolerance = 1e-8) {
    problem.validate();
    std::vector<double> out;
    out.reserve(s_values.size());
    for (double s : s_values) {
        if (!(s > 0.0)) throw DomainError("laplace_domain_residual: s must be > 0");
        const double Ns = laplace_forward(solution, s, -1.0, tail_tolerance);
        double denom = 1.0;
        for (const auto& t : problem.terms) denom += t.a * std::pow(s, -t.nu);
        out.push_back(std::abs(Ns * denom - problem.N0 * problem.forcing.laplace(s)));
    }
    return out;
}

/// Pointwise residual N + sum a_j I^{nu_j} N - N0 f of a sampled solution,
/// with the integrals taken by the product rule.
inline std::vector<double> integral_equation_residual(const ReactionProblem& problem, const SampledFunction& N) {
    problem.validate();
    const std::vector<double> f = problem.forcing.sample(N.grid);
    std::vector<double> r(N.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = N.values[i] - problem.N0 * f[i];
    for (const auto& t : problem.terms) {
        const auto I = rl_integral_sampled(t.nu, N);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += t.a * I.values[i];
    }
    return r;
}

}  // namespace frackit
