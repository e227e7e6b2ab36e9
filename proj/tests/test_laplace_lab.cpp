#include <cmath>
#include <functional>
#include <numbers>

#include <gtest/gtest.h>

#include "frackit/laplace_lab.hpp"
#include "frackit/special_fn.hpp"

using namespace frackit;

TEST(LaplaceForward, ElementaryPairs) {
    EXPECT_NEAR(laplace_forward([](double) { return 1.0; }, 2.0), 0.5, 1e-10);
    EXPECT_NEAR(laplace_forward([](double t) { return std::exp(-t); }, 1.0, {40.0, 1.0}), 0.5, 1e-10);
}

TEST(LaplaceForward, WeaklySingularIntegrand) {
    // t^{-1/2}/Gamma(1/2) <-> s^{-1/2}
    auto f = [](double t) { return recip_gamma(0.5) / std::sqrt(t); };
    EXPECT_NEAR(laplace_forward(f, 1.0, {60.0, 1.0}), 1.0, 1e-9);
    EXPECT_NEAR(laplace_forward(f, 4.0, {60.0, 1.0}), 0.5, 1e-9);
}

TEST(LaplaceForward, TailBoundNamesRequiredHorizon) {
    try {
        laplace_forward([](double) { return 1.0; }, 0.1, {10.0, 1.0});
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("horizon must be at least"), std::string::npos);
    }
}

TEST(LaplaceForward, SampledMatchesCallable) {
    const auto g = TimeGrid::uniform(40.0, 40000);
    const auto f = SampledFunction::sample(g, [](double t) { return t * std::exp(-t); });
    EXPECT_NEAR(laplace_forward(f, 1.5, 0.0), 1.0 / (2.5 * 2.5), 1e-7);
}

TEST(LaplaceForward, RejectsNonPositiveS) {
    EXPECT_THROW(laplace_forward([](double) { return 1.0; }, 0.0), DomainError);
}

TEST(LaplaceInvert, ElementaryPairs) {
    EXPECT_NEAR(laplace_invert([](cplx s) { return 1.0 / s; }, 1.0), 1.0, 1e-10);
    EXPECT_NEAR(laplace_invert([](cplx s) { return 1.0 / (s + 1.0); }, 1.0), std::exp(-1.0), 1e-10);
}

TEST(LaplaceInvert, PrabhakarPair) {
    // s^{-1.5} (1 + s^{-0.5})^{-2} <-> t^{0.5} E^2_{0.5,1.5}(-t^{0.5})
    auto F = [](cplx s) { return std::pow(s, -1.5) * std::pow(1.0 + std::pow(s, -0.5), -2.0); };
    EXPECT_NEAR(laplace_invert(F, 1.0), 0.27321201478389857, 1e-9);
}

TEST(LaplaceInvert, PrabhakarFamily) {
    for (double a : {-0.5, -1.0})
        for (double beta : {0.5, 0.8})
            for (double gamma : {0.7, 1.5})
                for (double delta : {1.0, 2.0}) {
                    auto F = [=](cplx s) { return std::pow(s, -gamma) * std::pow(1.0 - a * std::pow(s, -beta), -delta); };
                    for (double t : {0.5, 1.0, 2.0}) {
                        const double ref = std::pow(t, gamma - 1.0) *
                                           ml_generalized({beta, gamma, delta}, a * std::pow(t, beta)).value;
                        EXPECT_NEAR(laplace_invert(F, t) / ref, 1.0, 1e-6)
                            << a << ' ' << beta << ' ' << gamma << ' ' << delta << ' ' << t;
                    }
                }
}

TEST(LaplaceInvert, NodeDoublingShrinksError) {
    const std::vector<std::pair<std::function<cplx(cplx)>, std::function<double(double)>>> pairs = {
        {[](cplx s) { return 1.0 / s; }, [](double) { return 1.0; }},
        {[](cplx s) { return 1.0 / (s + 1.0); }, [](double t) { return std::exp(-t); }},
        {[](cplx s) { return 1.0 / ((s + 1.0) * (s + 1.0)); }, [](double t) { return t * std::exp(-t); }},
    };
    for (const auto& [F, f] : pairs) {
        for (double t : {0.5, 1.0, 2.0}) {
            const double e8 = std::abs(laplace_invert_unchecked(F, t, 8) - f(t));
            const double e16 = std::abs(laplace_invert_unchecked(F, t, 16) - f(t));
            EXPECT_LT(e16 * 10.0, e8) << t;
        }
    }
}

TEST(LaplaceInvert, DetectsNonConvergence) {
    // a pole far right of the contour breaks the Talbot assumptions
    EXPECT_THROW(laplace_invert([](cplx s) { return 1.0 / (s - 30.0); }, 1.0), NumericalError);
}

TEST(LaplaceInvert, RejectsBadArguments) {
    EXPECT_THROW(laplace_invert([](cplx s) { return 1.0 / s; }, 0.0), DomainError);
    EXPECT_THROW(laplace_invert([](cplx s) { return 1.0 / s; }, 1.0, 2), DomainError);
}

// forward quadrature at complex s, then Bromwich inversion
TEST(LaplaceRoundtrip, ForwardThenInverse) {
    const std::vector<std::function<double(double)>> fs = {
        [](double) { return 1.0; },
        [](double t) { return std::exp(-t); },
        [](double t) { return t * std::exp(-t); },
    };
    for (const auto& f : fs) {
        auto F = [&](cplx s) { return laplace_forward_complex(f, s, {40.0, 1.0, 1e-12, 1e-13}); };
        for (double t : {0.5, 1.0, 2.0}) EXPECT_NEAR(laplace_invert_euler(F, t), f(t), 1e-6) << t;
    }
}

TEST(LaplaceInvertEuler, AnalyticPairs) {
    EXPECT_NEAR(laplace_invert_euler([](cplx s) { return 1.0 / (s + 1.0); }, 1.0), std::exp(-1.0), 1e-7);
    EXPECT_NEAR(laplace_invert_euler([](cplx s) { return std::pow(s, -1.5); }, 2.0),
                std::sqrt(2.0) * recip_gamma(1.5), 1e-7);
}
