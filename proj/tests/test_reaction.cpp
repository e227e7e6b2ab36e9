#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "frackit/acceptance.hpp"
#include "frackit/reaction.hpp"

using namespace frackit;
using acceptance::check_times;
using acceptance::sample;

namespace {

constexpr double kE2Half1 = 0.15437156137190844;   // E^2_{0.5,1}(-1)
constexpr double kE2Half2 = 0.29920440906029443;   // Gamma(2) E^2_{0.5,2}(-1)

const TimeGrid& grid2() {
    static const TimeGrid g = TimeGrid::uniform(2.0, 2048);
    return g;
}

ReactionProblem problem(std::vector<ReactionTerm> terms, Forcing f = Forcing::unit(), double N0 = 1.0) {
    return {N0, std::move(terms), std::move(f)};
}

std::vector<double> exact_on(const std::vector<double>& ts, auto&& f) {
    std::vector<double> v;
    for (double t : ts) v.push_back(f(t));
    return v;
}

double ml_half(double t) { return ml_classic(0.5, -std::sqrt(t)).value; }

}  // namespace

TEST(Compositions, BinomialRow) {
    const auto c = enumerate_compositions(2, 2);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0].parts, (std::vector<int>{2, 0}));
    EXPECT_EQ(c[1].parts, (std::vector<int>{1, 1}));
    EXPECT_EQ(c[2].parts, (std::vector<int>{0, 2}));
    EXPECT_EQ(c[0].weight, 1.0);
    EXPECT_EQ(c[1].weight, 2.0);
    EXPECT_EQ(c[2].weight, 1.0);
}

TEST(Compositions, EmptySum) {
    const auto c = enumerate_compositions(0, 3);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].parts, (std::vector<int>{0, 0, 0}));
    EXPECT_EQ(c[0].weight, 1.0);
}

TEST(Compositions, CountAndWeightSum) {
    for (int l = 0; l <= 6; ++l)
        for (int m = 1; m <= 4; ++m) {
            const auto c = enumerate_compositions(l, m);
            const double count = std::round(std::tgamma(l + m) / (std::tgamma(l + 1) * std::tgamma(m)));
            EXPECT_EQ(static_cast<double>(c.size()), count);
            double w = 0.0;
            for (const auto& x : c) {
                EXPECT_EQ(std::accumulate(x.parts.begin(), x.parts.end(), 0), l);
                EXPECT_GE(x.weight, 1.0);
                w += x.weight;
            }
            EXPECT_DOUBLE_EQ(w, std::pow(m, l));
        }
    EXPECT_EQ(enumerate_compositions(3, 3).size(), 10u);
}

TEST(Compositions, GuardsAndErrors) {
    EXPECT_THROW(enumerate_compositions(-1, 2), DomainError);
    EXPECT_THROW(enumerate_compositions(2, 0), DomainError);
    EXPECT_THROW(enumerate_compositions(40, 12, 1e6), DomainError);
}

TEST(LayeredSolver, ClassicalDecay) {
    const auto s = solve_theorem1(problem({{1.0, 1.0}}, Forcing::unit(), 2.5), grid2());
    EXPECT_NEAR(s.N(1.0), 2.5 * std::exp(-1.0), 1e-12);
}

TEST(LayeredSolver, SingleFractionalTerm) {
    const auto s = solve_theorem1(problem({{1.0, 0.5}}), grid2());
    const auto ts = check_times();
    EXPECT_LT(relative_error(sample(s.N, ts), exact_on(ts, ml_half)), 1e-12);
}

TEST(LayeredSolver, TwoTermsAgainstVolterra) {
    const auto p = problem({{1.0, 0.6}, {0.5, 0.9}});
    const auto s = solve_theorem1(p, grid2());
    const auto v = volterra_oracle(p, 2.0);
    for (double t : {0.5, 1.0, 2.0}) EXPECT_NEAR(s.N(t) / v.N(t), 1.0, 1e-5) << t;
    EXPECT_LT(relative_error(sample(s.N, check_times()), sample(v.N, check_times())), 1e-5);
}

TEST(LayeredSolver, EquallySpacedOrdersMatchCascade) {
    // nu_j = j nu with binomial coefficients
    const auto terms = binomial_cascade_terms(0.4, 0.2, 3);
    const auto s = solve_theorem1(problem(terms), grid2());
    const auto c = solve_binomial_cascade(0.4, 0.2, 3, Forcing::unit(), grid2());
    EXPECT_LT(relative_error(sample(s.N, check_times()), sample(c.N, check_times())), 1e-5);
}

TEST(LayeredSolver, CancellationFlaggedWhenLayersGrow) {
    // larger c pushes the layer series far outside its comfortable range:
    // partial sums cancel and the result is flagged
    const auto s = solve_theorem1(problem(binomial_cascade_terms(0.4, 0.5, 3)), grid2());
    EXPECT_TRUE(s.cancellation_warning);
    EXPECT_FALSE(solve_theorem1(problem(binomial_cascade_terms(0.4, 0.2, 3)), grid2()).cancellation_warning);
}

TEST(LayeredSolver, GeometricTermsMatchGeometricSolver) {
    const auto s = solve_theorem1(problem(geometric_terms(0.6, 0.8, 2)), grid2());
    const auto g = solve_geometric(0.6, 0.8, 2, Forcing::unit(), grid2());
    EXPECT_LT(relative_error(sample(s.N, check_times()), sample(g.N, check_times())), 1e-5);
}

TEST(LayeredSolver, TabulatedForcingMatchesUnit) {
    const auto tab = Forcing::tabulated(SampledFunction::sample(grid2(), [](double) { return 1.0; }));
    const auto p = problem({{1.0, 0.7}, {0.3, 1.2}});
    const auto a = solve_theorem1(p, grid2());
    auto q = p;
    q.forcing = tab;
    const auto b = solve_theorem1(q, grid2());
    EXPECT_LT(relative_error(a.N.values, b.N.values), 1e-5);
}

TEST(LayeredSolver, LinearInN0) {
    const auto p1 = problem({{1.0, 0.6}, {0.5, 0.9}});
    auto p2 = p1;
    p2.N0 = 2.0;
    const auto a = solve_theorem1(p1, grid2());
    const auto b = solve_theorem1(p2, grid2());
    for (std::size_t i = 0; i < a.N.size(); ++i) EXPECT_EQ(b.N.values[i], 2.0 * a.N.values[i]);
}

TEST(LayeredSolver, PositiveAndNonIncreasing) {
    const auto s = solve_theorem1(problem({{1.0, 0.6}, {0.5, 0.9}, {0.2, 1.7}}), grid2());
    for (std::size_t i = 1; i < s.N.size(); ++i) {
        EXPECT_GT(s.N.values[i], 0.0);
        EXPECT_LE(s.N.values[i], s.N.values[i - 1] + 1e-13);
    }
}

TEST(LayeredSolver, ResidualSubstitution) {
    const auto p = problem({{1.0, 0.6}, {0.5, 0.9}});
    const auto s = solve_theorem1(p, grid2());
    const auto r = integral_equation_residual(p, s.N);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i]));
    for (double v : s.N.values) scale = std::max(scale, std::abs(v));
    EXPECT_LT(worst, 1e-4 * scale);
}

TEST(LayeredSolver, RejectsForcingUnboundedAtZero) {
    EXPECT_THROW(solve_theorem1(problem({{1.0, 0.5}}, Forcing::power_law(0.5)), grid2()), DomainError);
}

TEST(LayeredSolver, ReportsDivergence) {
    // the s-domain condition fails badly: the layer series grows for many l
    SolverConfig cfg;
    cfg.max_layers = 60;
    EXPECT_THROW(solve_theorem1(problem({{0.1, 1.0}, {50.0, 0.3}}), grid2(), cfg), NumericalError);
}

TEST(LayeredSolver, LayerCapRaisesNonConvergence) {
    SolverConfig cfg;
    cfg.max_layers = 2;
    EXPECT_THROW(solve_theorem1(problem({{1.0, 0.6}, {0.5, 0.9}}), grid2(), cfg), NonConvergence);
}

TEST(LayeredSolver, ValidatesProblem) {
    EXPECT_THROW(solve_theorem1(problem({}), grid2()), DomainError);
    EXPECT_THROW(solve_theorem1(problem({{-1.0, 0.5}}), grid2()), DomainError);
    EXPECT_THROW(solve_theorem1(problem({{1.0, 0.0}}), grid2()), DomainError);
    EXPECT_THROW(Forcing::power_law(0.0), DomainError);
    EXPECT_THROW(Forcing::mittag_leffler(0.5, 1.0, -1.0, 1.0), DomainError);
}

TEST(BinomialCascade, ClassicalDecay) {
    const auto s = solve_binomial_cascade(1.0, 1.0, 1, Forcing::unit(), grid2());
    const auto ts = check_times();
    EXPECT_LT(relative_error(sample(s.N, ts), exact_on(ts, [](double t) { return std::exp(-t); })), 1e-6);
}

TEST(BinomialCascade, MittagLefflerForcingClosedForm) {
    // the forcing behaves like 1 - c sqrt(t) at 0, so grade the grid
    const auto f = Forcing::mittag_leffler(0.5, 1.0, 1.0, 1.0);
    const auto s = solve_binomial_cascade(0.5, 1.0, 2, f, TimeGrid::graded(2.0, 2048, 2.5));
    const auto ts = check_times();
    const auto ref = exact_on(ts, [](double t) { return closed_form_cor22(0.5, 1.0, 1.0, 1.0, 2, t); });
    EXPECT_LT(relative_error(sample(s.N, ts), ref), 1e-5);
}

TEST(BinomialCascade, PowerLawForcingClosedForm) {
    const auto s = solve_binomial_cascade(0.5, 1.0, 2, Forcing::power_law(2.0), grid2());
    const auto ts = check_times();
    const auto ref = exact_on(ts, [](double t) { return closed_form_cor23(0.5, 2.0, 1.0, 2, t); });
    EXPECT_LT(relative_error(sample(s.N, ts), ref), 1e-5);
}

TEST(BinomialCascade, AgreesWithVolterra) {
    const auto s = solve_binomial_cascade(0.7, 0.9, 2, Forcing::unit(), grid2());
    const auto v = volterra_oracle(problem(binomial_cascade_terms(0.7, 0.9, 2)), 2.0);
    EXPECT_LT(relative_error(sample(s.N, check_times()), sample(v.N, check_times())), 1e-5);
}

TEST(BinomialCascade, RejectsBadParameters) {
    EXPECT_THROW(solve_binomial_cascade(0.0, 1.0, 1, Forcing::unit(), grid2()), DomainError);
    EXPECT_THROW(solve_binomial_cascade(0.5, -1.0, 1, Forcing::unit(), grid2()), DomainError);
    EXPECT_THROW(solve_binomial_cascade(0.5, 1.0, 0, Forcing::unit(), grid2()), DomainError);
}

TEST(ClosedForms, Examples) {
    EXPECT_DOUBLE_EQ(closed_form_cor22(0.5, 1.0, 1.0, 1.0, 1, 0.0), 1.0);
    EXPECT_NEAR(closed_form_cor22(1.0, 1.0, 1.0, 1.0, 0, 0.8), std::exp(-0.8), 1e-14);
    EXPECT_NEAR(closed_form_cor22(0.5, 1.0, 1.0, 1.0, 1, 1.0), kE2Half1, 1e-14);
    EXPECT_NEAR(closed_form_cor23(1.0, 1.0, 1.0, 1, 1.3), std::exp(-1.3), 1e-14);
    EXPECT_NEAR(closed_form_cor23(0.5, 1.0, 1.0, 1, 1.7), ml_half(1.7), 1e-14);
    EXPECT_NEAR(closed_form_cor23(0.5, 2.0, 1.0, 2, 1.0), kE2Half2, 1e-14);
    EXPECT_THROW(closed_form_cor23(0.5, 0.5, 1.0, 1, 0.0), DomainError);
}

TEST(Geometric, ClassicalDecay) {
    const auto s = solve_geometric(1.0, 1.0, 1, Forcing::unit(), grid2());
    const auto ts = check_times();
    EXPECT_LT(relative_error(sample(s.N, ts), exact_on(ts, [](double t) { return std::exp(-t); })), 1e-6);
}

TEST(Geometric, SingleStepEqualsCascade) {
    const double nu = 0.7, a = 0.6;
    const auto g = solve_geometric(nu, a, 1, Forcing::unit(), grid2());
    const auto c = solve_binomial_cascade(nu, std::pow(a, 1.0 / nu), 1, Forcing::unit(), grid2());
    EXPECT_LT(relative_error(sample(g.N, check_times()), sample(c.N, check_times())), 1e-5);
}

TEST(Geometric, AgreesWithVolterra) {
    const auto g = solve_geometric(0.6, 0.8, 2, Forcing::unit(), grid2());
    const auto v = volterra_oracle(problem(geometric_terms(0.6, 0.8, 2)), 2.0);
    EXPECT_LT(relative_error(sample(g.N, check_times()), sample(v.N, check_times())), 1e-5);
}

TEST(Volterra, OdeCaseSecondOrder) {
    auto err = [](std::size_t n) {
        const auto v = solve_volterra_direct(problem({{1.0, 1.0}}), TimeGrid::uniform(2.0, n));
        double e = 0.0;
        for (std::size_t i = 0; i < v.N.size(); ++i) e = std::max(e, std::abs(v.N.values[i] - std::exp(-v.N.grid[i])));
        return e;
    };
    const double e1 = err(256), e2 = err(512);
    EXPECT_LT(e2, 1e-5);
    EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(Volterra, FractionalDecay) {
    const auto v = solve_volterra_direct(problem({{1.0, 0.5}}), TimeGrid::uniform(1.0, 1024));
    EXPECT_NEAR(v.N(1.0), ml_half(1.0), 1e-5);
}

TEST(LaplaceResidual, OdeCase) {
    const auto p = problem({{1.0, 1.0}});
    const auto s = solve_theorem1(p, TimeGrid::uniform(30.0, 30000));
    const std::vector<double> sv{2.0};
    EXPECT_LT(laplace_domain_residual(p, s.N, sv)[0], 1e-6);
}

TEST(LaplaceResidual, FractionalCase) {
    const auto p = problem({{1.0, 0.5}});
    const auto s = solve_theorem1(p, TimeGrid::graded(10.0, 2560, 2.5));
    const std::vector<double> sv{2.0, 5.0, 10.0, 1e4};
    const auto r = laplace_domain_residual(p, s.N, sv);
    for (double x : r) EXPECT_LT(x, 1e-5);
}

TEST(LaplaceResidual, ShortHorizonIsReported) {
    const auto p = problem({{1.0, 0.5}});
    const auto s = solve_theorem1(p, TimeGrid::uniform(1.0, 256));
    const std::vector<double> sv{0.5};
    try {
        laplace_domain_residual(p, s.N, sv);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("s = 0.5"), std::string::npos) << e.what();
    }
}
