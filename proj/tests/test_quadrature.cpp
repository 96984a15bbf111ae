#include "koszul/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace koszul;
using namespace koszul::quadrature;

namespace {

const double kPi = std::numbers::pi;

Integrand constant_one() {
    return [](std::span<const Complex>) -> std::optional<double> { return 1.0; };
}

Integrand modulus_sq() {
    return [](std::span<const Complex> z) -> std::optional<double> { return std::norm(z[0]); };
}

Integrand inverse_modulus() {
    return [](std::span<const Complex> z) -> std::optional<double> {
        const double r = std::abs(z[0]);
        if (r == 0.0) return std::nullopt;
        return 1.0 / r;
    };
}

Integrand inverse_sqrt_modulus() {
    return [](std::span<const Complex> z) -> std::optional<double> {
        const double r = std::abs(z[0]);
        if (r == 0.0) return std::nullopt;
        return 1.0 / std::sqrt(r);
    };
}

}  // namespace

TEST(Domain, Volumes) {
    EXPECT_DOUBLE_EQ(Domain::unit_polydisc(1).volume(), kPi);
    EXPECT_DOUBLE_EQ(Domain::polydisc({0.0, 0.0}, {0.5, 2.0}).volume(), kPi * kPi);
    EXPECT_DOUBLE_EQ(Domain::ball({0.0, 0.0}, 1.0).volume(), kPi * kPi / 2.0);
    EXPECT_NEAR(Domain::ball({0.0, 0.0, 0.0}, 2.0).volume(), std::pow(kPi, 3) * 64.0 / 6.0, 1e-9);
}

TEST(Domain, InvalidShapes) {
    EXPECT_THROW(Domain::polydisc({}, {}), DimensionError);
    EXPECT_THROW(Domain::polydisc({0.0}, {0.0}), std::invalid_argument);
    EXPECT_THROW(Domain::ball({0.0}, -1.0), std::invalid_argument);
    EXPECT_THROW(Domain::ball({}, 1.0), DimensionError);
}

TEST(Domain, SamplesStayInside) {
    SplitMix64 eng(41);
    const auto ball = Domain::ball({0.0, 0.0}, 1.0);
    const auto pd = Domain::polydisc({Complex(1.0, 1.0), Complex(-2.0)}, {0.5, 0.25});
    for (int t = 0; t < 20000; ++t) {
        const auto b = ball.sample(eng);
        EXPECT_LT(std::norm(b[0]) + std::norm(b[1]), 1.0);
        const auto p = pd.sample(eng);
        EXPECT_TRUE(pd.contains(p));
        EXPECT_LT(std::abs(p[0] - Complex(1.0, 1.0)), 0.5);
        EXPECT_LT(std::abs(p[1] - Complex(-2.0)), 0.25);
    }
    EXPECT_FALSE(ball.contains(std::vector<Complex>{1.0, 0.0}));
}

TEST(Domain, RadialMomentsAreUniform) {
    // uniform in the unit disc: E|z|^2 = 1/2; in the unit ball of C^2: E|z|^2 = 2/3
    SplitMix64 eng(42);
    const auto disc = Domain::unit_polydisc(1);
    const auto ball = Domain::ball({0.0, 0.0}, 1.0);
    const int n = 200000;
    double sd = 0.0, sb = 0.0;
    for (int t = 0; t < n; ++t) {
        sd += std::norm(disc.sample(eng)[0]);
        const auto b = ball.sample(eng);
        sb += std::norm(b[0]) + std::norm(b[1]);
    }
    EXPECT_NEAR(sd / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
    EXPECT_NEAR(sb / n, 2.0 / 3.0, 4.0 * std::sqrt(1.0 / 18.0 / n));
}

TEST(Sampling, DeterministicPerIndex) {
    const auto d = Domain::ball({0.0, 0.0}, 1.0);
    EXPECT_EQ(sample_point(d, 9, 123), sample_point(d, 9, 123));
    EXPECT_NE(sample_point(d, 9, 123), sample_point(d, 9, 124));
    EXPECT_NE(sample_point(d, 9, 123), sample_point(d, 10, 123));
}

TEST(Integrate, DiscAreaWithinThreeSigma) {
    const auto ind = [](std::span<const Complex> z) -> std::optional<double> { return std::norm(z[0]) < 1.0 ? 1.0 : 0.0; };
    const auto e = integrate(ind, Domain::polydisc({0.0}, {1.5}), {200000, 3, 1});
    EXPECT_NEAR(e.mean, kPi, 3.0 * e.standard_error);
    EXPECT_GT(e.standard_error, 0.0);
}

TEST(Integrate, ConstantOnBallIsExact) {
    const auto e = integrate(constant_one(), Domain::ball({0.0, 0.0}, 1.0), {1000, 1, 1});
    EXPECT_DOUBLE_EQ(e.mean, kPi * kPi / 2.0);
    EXPECT_EQ(e.standard_error, 0.0);
}

TEST(Integrate, SecondMomentOfDisc) {
    const auto e = integrate(modulus_sq(), Domain::unit_polydisc(1), {200000, 4, 1});
    EXPECT_NEAR(e.mean / kPi, 0.5, 3.0 * e.standard_error / kPi);
}

TEST(Integrate, IntegrableSingularity) {
    const auto e = integrate(inverse_modulus(), Domain::unit_polydisc(1), {400000, 5, 1});
    EXPECT_TRUE(std::isfinite(e.mean));
    EXPECT_NEAR(e.mean, 2.0 * kPi, 0.02 * 2.0 * kPi);
}

TEST(Integrate, ErrorShrinksLikeInverseRoot) {
    for (const auto& f : {modulus_sq(), inverse_sqrt_modulus()}) {
        const auto a = integrate(f, Domain::unit_polydisc(1), {10000, 6, 1});
        const auto b = integrate(f, Domain::unit_polydisc(1), {1000000, 6, 1});
        const double ratio = a.standard_error / b.standard_error;
        EXPECT_GT(ratio, 10.0 * 0.7);
        EXPECT_LT(ratio, 10.0 * 1.5);
    }
}

TEST(Integrate, BitExactAcrossWorkerCounts) {
    const auto d = Domain::ball({Complex(0.1, 0.0), 0.0}, 0.9);
    const auto f = [](std::span<const Complex> z) -> std::optional<double> { return std::exp(-std::norm(z[0])) + z[1].real(); };
    const auto one = integrate(f, d, {50000, 7, 1});
    for (unsigned w : {2u, 3u, 8u}) {
        const auto many = integrate(f, d, {50000, 7, w});
        EXPECT_EQ(one.mean, many.mean);
        EXPECT_EQ(one.standard_error, many.standard_error);
        EXPECT_EQ(one.max_integrand, many.max_integrand);
    }
}

TEST(Integrate, RejectionsAreCountedNotClamped) {
    const auto f = [](std::span<const Complex> z) -> std::optional<double> {
        if (z[0].real() < 0.0) return std::nullopt;
        return 2.0;
    };
    const auto e = integrate(f, Domain::unit_polydisc(1), {20000, 8, 1});
    EXPECT_NEAR(e.rejected_fraction(), 0.5, 0.02);
    EXPECT_EQ(e.accepted() + e.rejected, e.samples);
    EXPECT_DOUBLE_EQ(e.mean, 2.0 * kPi);
}

TEST(Integrate, Failures) {
    const auto none = [](std::span<const Complex>) -> std::optional<double> { return std::nullopt; };
    EXPECT_THROW(integrate(none, Domain::unit_polydisc(1), {1000, 1, 1}), AllSamplesRejected);
    EXPECT_THROW(integrate(constant_one(), Domain::unit_polydisc(1), {10, 1, 1}), std::invalid_argument);
    const auto boom = [](std::span<const Complex>) -> std::optional<double> { throw std::runtime_error("boom"); };
    EXPECT_THROW(integrate(boom, Domain::unit_polydisc(1), {10000, 1, 3}), std::runtime_error);
}

TEST(Integrate, ManyIntegrandsShareSamples) {
    const auto d = Domain::unit_polydisc(1);
    const auto both = integrate_many({constant_one(), modulus_sq()}, d, {30000, 9, 2});
    EXPECT_EQ(both[0].mean, integrate(constant_one(), d, {30000, 9, 1}).mean);
    EXPECT_EQ(both[1].mean, integrate(modulus_sq(), d, {30000, 9, 1}).mean);
}
