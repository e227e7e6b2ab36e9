#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "errors.hpp"

namespace frackit {

/// Strictly increasing time nodes starting at 0.
class TimeGrid {
public:
    TimeGrid() = default;

    explicit TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
        if (nodes_.empty()) throw DomainError("TimeGrid: empty grid");
        if (nodes_.front() != 0.0) throw DomainError("TimeGrid: first node must be 0");
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (!(nodes_[i] > nodes_[i - 1]) || !std::isfinite(nodes_[i]))
                throw DomainError("TimeGrid: nodes must be finite and strictly increasing");
        }
        detect_uniform();
    }

    static TimeGrid uniform(double t_max, std::size_t intervals) {
        if (!(t_max > 0.0) || intervals == 0)
            throw DomainError("TimeGrid::uniform: need t_max > 0 and at least one interval");
        std::vector<double> t(intervals + 1);
        const double h = t_max / static_cast<double>(intervals);
        for (std::size_t i = 0; i <= intervals; ++i) t[i] = h * static_cast<double>(i);
        return TimeGrid(std::move(t));
    }

    /// t_k = t_max (k/N)^exponent, clustering nodes near 0.
    static TimeGrid graded(double t_max, std::size_t intervals, double exponent) {
        if (!(t_max > 0.0) || intervals == 0 || !(exponent >= 1.0))
            throw DomainError("TimeGrid::graded: need t_max > 0, intervals >= 1, exponent >= 1");
        std::vector<double> t(intervals + 1);
        for (std::size_t i = 0; i <= intervals; ++i)
            t[i] = t_max * std::pow(static_cast<double>(i) / static_cast<double>(intervals), exponent);
        return TimeGrid(std::move(t));
    }

    /// Graded on [0, t_split] (t_split (k/M)^exponent, M chosen so the last
    /// graded step is about h), then uniform with step h up to t_max.
    static TimeGrid graded_then_uniform(double t_split, double t_max, double h, double exponent) {
        if (!(t_split > 0.0 && t_max > t_split && h > 0.0) || !(exponent >= 1.0))
            throw DomainError("TimeGrid::graded_then_uniform: need 0 < t_split < t_max, h > 0, exponent >= 1");
        const auto m = static_cast<std::size_t>(std::ceil(exponent * t_split / h));
        std::vector<double> t = graded(t_split, m, exponent).nodes_;
        const auto n = static_cast<std::size_t>(std::llround((t_max - t_split) / h));
        for (std::size_t i = 1; i <= n; ++i) t.push_back(t_split + h * static_cast<double>(i));
        return TimeGrid(std::move(t));
    }

    std::size_t size() const noexcept { return nodes_.size(); }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double back() const { return nodes_.back(); }
    std::span<const double> nodes() const noexcept { return nodes_; }

    /// Step size when the grid is uniform.
    std::optional<double> uniform_step() const noexcept { return step_; }

    /// Index of the first node >= t - tol (or size()).
    std::size_t lower_index(double t) const {
        return static_cast<std::size_t>(std::lower_bound(nodes_.begin(), nodes_.end(), t) -
                                        nodes_.begin());
    }

private:
    void detect_uniform() {
        if (nodes_.size() < 2) return;
        const double h = nodes_.back() / static_cast<double>(nodes_.size() - 1);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            if (std::abs(nodes_[i] - h * static_cast<double>(i)) > 1e-12 * nodes_.back()) return;
        }
        step_ = h;
    }

    std::vector<double> nodes_;
    std::optional<double> step_;
};

/// Node values on a TimeGrid, piecewise-linear in between.
struct SampledFunction {
    TimeGrid grid;
    std::vector<double> values;

    SampledFunction() = default;
    SampledFunction(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
        if (values.size() != grid.size())
            throw DomainError("SampledFunction: values and grid differ in length");
        for (double x : values)
            if (!std::isfinite(x)) throw DomainError("SampledFunction: non-finite value");
    }

    template <class F>
    static SampledFunction sample(const TimeGrid& g, F&& f) {
        std::vector<double> v(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g[i]);
        return SampledFunction(g, std::move(v));
    }

    std::size_t size() const noexcept { return values.size(); }

    double operator()(double t) const {
        if (!(t >= 0.0) || t > grid.back() * (1.0 + 1e-14))
            throw DomainError("SampledFunction: t outside the tabulated range");
        const std::size_t j = grid.lower_index(t);
        if (j == 0) return values.front();
        if (j >= size()) return values.back();
        const double t0 = grid[j - 1], t1 = grid[j];
        const double w = (t - t0) / (t1 - t0);
        return values[j - 1] + w * (values[j] - values[j - 1]);
    }
};

}  // namespace frackit
