#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "frackit/diffusion.hpp"
#include "frackit/laplace_lab.hpp"

using namespace frackit;
using std::numbers::pi;

namespace {

constexpr double kOriginHalf = 0.40802446954913149;  // 1/(2 Gamma(0.75))
constexpr double kThreeDim = 0.068412895395471952;   // n=3, alpha=0.5, r=0.5, t=1

double gauss1(double x, double t) { return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * pi * t); }

}  // namespace

TEST(Propagator, HeatKernelAtOrigin) {
    EXPECT_NEAR(propagator({1, 1.0, 1.0, 0.0, 1.0}).value, 0.5 / std::sqrt(pi), 1e-15);
}

TEST(Propagator, OriginValueAtHalfOrder) {
    EXPECT_NEAR(propagator_1d(0.5, 1.0, 0.0, 1.0).value, kOriginHalf, 1e-15);
}

TEST(Propagator, Symmetric) {
    for (double alpha : {0.3, 0.5, 0.9})
        for (double x : {0.1, 0.7, 2.5, 6.0})
            EXPECT_EQ(propagator_1d(alpha, 1.3, x, 0.8).value, propagator_1d(alpha, 1.3, -x, 0.8).value);
}

TEST(Propagator, GaussianLimit1D) {
    for (double t : {0.5, 1.0, 2.0})
        for (double x = 0.0; x * x <= 10.0 * t; x += 0.25)
            EXPECT_NEAR(propagator_1d(1.0, 1.0, x, t).value / gauss1(x, t), 1.0, 1e-10) << x << ' ' << t;
}

TEST(Propagator, GaussianLimit3D) {
    for (double t : {0.5, 1.0, 2.0})
        for (double r = 0.25; r * r <= 10.0 * t; r += 0.25) {
            const double g = std::exp(-r * r / (4.0 * t)) * std::pow(4.0 * pi * t, -1.5);
            EXPECT_NEAR(propagator_3d(1.0, 1.0, r, t).value / g, 1.0, 1e-10) << r << ' ' << t;
        }
}

TEST(Propagator, ThreeDimOracle) {
    EXPECT_NEAR(propagator_3d(0.5, 1.0, 0.5, 1.0).value, kThreeDim, 1e-14);
}

// N~(r, s) = s^{alpha-1} exp(-r s^{alpha/2} / sqrt(c)) / (4 pi c r)
TEST(Propagator, ThreeDimAgainstLaplaceInversion) {
    for (double alpha : {0.5, 0.8})
        for (double r : {0.3, 0.5, 1.0}) {
            auto F = [=](cplx s) { return std::pow(s, alpha - 1.0) * std::exp(-r * std::pow(s, alpha / 2.0)) / (4.0 * pi * r); };
            // fixed Talbot loses digits to e^{rt} rounding beyond about 40 nodes
            const double want = laplace_invert(F, 1.0, 32);
            EXPECT_NEAR(propagator_3d(alpha, 1.0, r, 1.0).value / want, 1.0, 1e-8) << alpha << ' ' << r;
        }
}

TEST(Propagator, GeneralOddDimensionMatches3D) {
    for (double r : {0.2, 0.5, 1.0, 1.5, 2.0})
        for (double t : {0.5, 0.8, 1.0, 1.5, 2.0}) {
            const double a = propagator({3, 0.6, 1.0, r, t}).value;
            const double b = propagator_3d(0.6, 1.0, r, t).value;
            EXPECT_NEAR(a / b, 1.0, 1e-10) << r << ' ' << t;
        }
}

TEST(Propagator, SelfSimilar) {
    for (double alpha : {0.4, 0.75, 1.0})
        for (double t : {0.3, 2.0})
            for (double x : {0.2, 1.0, 2.2}) {
                const double lhs = propagator_1d(alpha, 1.0, x, t).value;
                const double rhs = std::pow(t, -alpha / 2.0) * propagator_1d(alpha, 1.0, x * std::pow(t, -alpha / 2.0), 1.0).value;
                EXPECT_NEAR(lhs / rhs, 1.0, 1e-12);
            }
}

TEST(Propagator, DiffusivityScaling) {
    for (int n : {1, 3, 5})
        for (double c : {0.5, 2.0}) {
            const double r = 0.7, t = 1.2;
            const double lhs = propagator({n, 0.6, c, r, t}).value;
            const double rhs = std::pow(c, -n / 2.0) * propagator({n, 0.6, 1.0, r / std::sqrt(c), t}).value;
            EXPECT_NEAR(lhs / rhs, 1.0, 1e-12) << n << ' ' << c;
        }
}

TEST(Propagator, PositiveInSeriesDomain) {
    for (double alpha : {0.2, 0.5, 0.8})
        for (double A = 0.0; A <= 10.0; A += 0.5) {
            const SeriesValue v = propagator_1d(alpha, 1.0, std::sqrt(A), 1.0);
            EXPECT_TRUE(v.value >= 0.0 || v.cancellation_warning()) << alpha << ' ' << A;
        }
}

TEST(Propagator, SeriesAndIntegralAgreeAtDomainEdge) {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const double x = std::sqrt(kSeriesDomainA) * 1.01;
        const double a = propagator_1d_series(alpha, 1.0, x, 1.0).value;
        const double b = propagator_1d(alpha, 1.0, x, 1.0).value;
        EXPECT_NEAR(a / b, 1.0, 1e-11) << alpha;
    }
}

TEST(Propagator, ThreeDimSmallRadius) {
    // N ~ 1/(4 pi Gamma(1-alpha) c t^alpha r), i.e. proportional to A^{-1/2}, as r -> 0
    const double t = 1.3, r = 1e-4;
    EXPECT_NEAR(propagator_3d(0.5, 1.0, r, t).value * 4.0 * pi * std::tgamma(0.5) * std::pow(t, 0.5) * r, 1.0, 1e-2);
}

TEST(Propagator, RejectsUnsupportedQueries) {
    EXPECT_THROW(propagator({2, 0.5, 1.0, 0.3, 1.0}), DomainError);
    EXPECT_THROW(propagator({4, 0.5, 1.0, 0.3, 1.0}), DomainError);
    EXPECT_THROW(propagator({3, 0.5, 1.0, 0.0, 1.0}), DomainError);
    EXPECT_THROW(propagator({1, 1.5, 1.0, 0.3, 1.0}), DomainError);
    EXPECT_THROW(propagator({1, 0.5, 0.0, 0.3, 1.0}), DomainError);
    EXPECT_THROW(propagator({1, 0.5, 1.0, 0.3, 0.0}), DomainError);
}

TEST(Propagator, Normalized) {
    boost::math::quadrature::exp_sinh<double> es;
    for (double alpha : {0.5, 0.75, 1.0}) {
        Propagator1D p(alpha, 1.0);
        for (double t : {0.5, 1.0, 2.0}) {
            const double m = 2.0 * es.integrate([&](double x) { return p(x, t).value; }, 1e-13);
            EXPECT_NEAR(m, 1.0, 1e-6) << alpha << ' ' << t;
        }
    }
}

TEST(Propagator, SecondMomentIsMsd) {
    boost::math::quadrature::exp_sinh<double> es;
    Propagator1D p(0.75, 1.0);
    const double m2 = 2.0 * es.integrate([&](double x) { return x * x * p(x, 1.0).value; }, 1e-13);
    EXPECT_NEAR(m2 / msd_1d(0.75, 1.0, 1.0), 1.0, 1e-4);
}

TEST(SmallRadius2D, LogarithmicLaw) {
    const double x = std::exp(-1.0);
    EXPECT_NEAR(propagator_2d_smallx(0.5, 1.0, x, 1.0), 1.0 / (pi * std::tgamma(0.5)), 1e-15);
    EXPECT_NEAR(propagator_2d_smallx(0.5, 1.0, x, 1.0), 0.1795871, 1e-7);
    EXPECT_NEAR(propagator_2d_smallx(0.5, 1.0, std::pow(2.0, 0.25), 2.0), 0.0, 1e-15);
    const double step = std::numbers::ln2 / (pi * std::tgamma(0.5) * std::pow(2.0, 0.5));
    EXPECT_NEAR(propagator_2d_smallx(0.5, 1.0, 0.01, 2.0) - propagator_2d_smallx(0.5, 1.0, 0.02, 2.0), step, 1e-14);
}

TEST(Msd, Examples) {
    EXPECT_NEAR(msd_1d(1.0, 3.0, 2.0), 12.0, 1e-14);
    EXPECT_NEAR(msd_1d(0.5, 1.0, 1.0), 4.0 / std::sqrt(pi), 4e-15);
}

TEST(Levy, HalfOrderElementary) {
    EXPECT_NEAR(levy_density({0.5, 1.0}).value, std::exp(-0.25) / (2.0 * std::sqrt(pi)), 1e-16);
    EXPECT_NEAR(levy_density({0.5, 1.0}).value, 0.2196956, 1e-7);
}

TEST(Levy, SeriesAndIntegralAgree) {
    for (double rho : {0.3, 0.7})
        for (double t : {0.8, 1.5, 3.0}) {
            const double a = levy_density_series({rho, t}).value;
            const double b = levy_density_integral({rho, t});
            EXPECT_NEAR(a / b, 1.0, 1e-10) << rho << ' ' << t;
        }
}

TEST(Levy, LaplaceTransformAtUnitArgument) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    auto phi = [](double t) { return t <= 0.0 ? 0.0 : levy_density({0.7, t}).value; };
    const double v = ts.integrate([&](double t) { return std::exp(-t) * phi(t); }, 0.0, 1.0, 1e-13) +
                     es.integrate([&](double t) { return std::exp(-(t + 1.0)) * phi(t + 1.0); }, 1e-13);
    EXPECT_NEAR(v, std::exp(-1.0), 1e-5);
}

TEST(Levy, RejectsBadQueries) {
    EXPECT_THROW(levy_density({1.0, 1.0}), DomainError);
    EXPECT_THROW(levy_density({0.5, 0.0}), DomainError);
}

TEST(FoxH, ReducesToExponential) {
    // Gamma(b2 + s)/Gamma(a + s) = 1 when a = b2: H = x^{b1} e^{-x}
    for (double x : {0.1, 1.0, 3.0})
        EXPECT_NEAR(fox_h20_12(x, 0.3, 1.0, 0.1, 1.0, 0.3, 1.0).value, std::pow(x, 0.1) * std::exp(-x), 1e-13);
}

TEST(FoxH, RejectsLogarithmicCase) {
    EXPECT_THROW(fox_h20_12(1.0, 0.5, 1.0, 0.0, 1.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(fox_h20_12(0.0, 0.5, 1.0, 0.1, 1.0, 0.3, 1.0), DomainError);
}

TEST(PdeResidual, ZeroFieldHasZeroResidual) {
    std::vector<double> xs;
    for (int j = -20; j <= 20; ++j) xs.push_back(0.1 * j);
    const auto g = pde_history_grid(0.5, 1.0, 1.0 / 32);
    EXPECT_EQ(pde_residual_1d(0.5, 1.0, xs, g, 0.5, [](double, double) { return 0.0; }), 0.0);
    EXPECT_EQ(pde_residual_1d(1.0, 1.0, xs, g, 0.5, [](double, double) { return 0.0; }), 0.0);
}

TEST(PdeResidual, DecreasesUnderRefinement) {
    for (double alpha : {0.5, 1.0}) {
        double prev = INFINITY;
        for (int m : {32, 64}) {
            const double h = 1.0 / m;
            std::vector<double> xs;
            for (int j = -3 * m; j <= 3 * m; ++j) xs.push_back(j * h);
            const double r = pde_residual_1d(alpha, 1.0, xs, pde_history_grid(0.5, 1.0, h), 0.5);
            EXPECT_LT(r, prev) << alpha << ' ' << m;
            prev = r;
        }
    }
}

TEST(PdeResidual, RejectsBadGrids) {
    const auto g = pde_history_grid(0.5, 1.0, 0.1);
    EXPECT_THROW(pde_residual_1d(0.5, 1.0, {0.0, 1.0}, g, 0.5), DomainError);
    EXPECT_THROW(pde_residual_1d(0.5, 1.0, {0.0, 1.0, 3.0}, g, 0.5), DomainError);
}
