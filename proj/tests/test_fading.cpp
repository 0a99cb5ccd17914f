//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file tests/test_fading.cpp
//---------------------------------------------------------------------------//
#include <cmath>
#include <vector>

#include <boost/math/distributions/gamma.hpp>
#include <gtest/gtest.h>

#include "fdcr/fading.hpp"
#include "fdcr/params.hpp"
#include "oracles.hpp"

namespace fdcr
{
namespace
{
struct Moments
{
    double mean{0};
    double var{0};
};

template<class F>
Moments moments(int n, F draw)
{
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i)
    {
        double const x = draw();
        s += x;
        ss += x * x;
    }
    double const mean = s / n;
    return {mean, ss / n - mean * mean};
}

TEST(RngStream, UniformRangeAndDeterminism)
{
    RngStream a(42, 7), b(42, 7), c(42, 8);
    int same_as_other_stream = 0;
    for (int i = 0; i < 10000; ++i)
    {
        double const u = a.uniform();
        EXPECT_GT(u, 0.0);
        EXPECT_LT(u, 1.0);
        EXPECT_EQ(u, b.uniform());
        same_as_other_stream += u == c.uniform();
    }
    EXPECT_EQ(0, same_as_other_stream);
    EXPECT_EQ(10000u, a.counter());
}

TEST(RngStream, CounterSkipsAhead)
{
    RngStream a(3, 1);
    for (int i = 0; i < 100; ++i)
        a.next_u64();
    auto const want = a.next_u64();
    RngStream b(3, 1, 100);
    EXPECT_EQ(want, b.next_u64());
}

TEST(SampleGain, ExponentialForShapeOne)
{
    RngStream rng(1, 0);
    GammaGain const g{1, 2.5};
    int const n = 1'000'000;
    auto m = moments(n, [&] { return sample_gain(g, rng); });
    // sd of the mean is scale / sqrt(n)
    EXPECT_NEAR(2.5, m.mean, 3 * 2.5 / std::sqrt(n));
}

TEST(SampleGain, GammaMoments)
{
    RngStream rng(2, 0);
    GammaGain const g{3, 1.0 / 3};
    int const n = 1'000'000;
    std::vector<double> xs(n);
    for (auto& x : xs)
        x = sample_gain(g, rng);
    double s = 0;
    for (double x : xs)
        s += x;
    double const mean = s / n;
    double ss = 0, s4 = 0;
    for (double x : xs)
    {
        ss += (x - mean) * (x - mean);
        s4 += std::pow(x - mean, 4);
    }
    double const var = ss / n;
    // Var 1/3; sd of the sample variance ~ sqrt((mu4 - var^2) / n)
    double const mu4 = s4 / n;
    EXPECT_NEAR(1.0, mean, 3 * std::sqrt(1.0 / 3 / n));
    EXPECT_NEAR(1.0 / 3, var, 3 * std::sqrt((mu4 - var * var) / n));

    int below = 0;
    for (double x : xs)
        below += x <= 1.0;
    EXPECT_NEAR(0.576810, static_cast<double>(below) / n, 0.002);
}

TEST(SampleGain, KolmogorovSmirnovPerLink)
{
    SystemConfig raw;
    raw.m = {3, 2, 1, 1, 4, 1};
    auto const links = derive_link_stats(validate(raw));
    RngStream rng(11, 0);
    std::size_t const n = 100'000;
    std::vector<std::vector<double>> per_link(kNumLinks);
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const g = block_sample(links, rng);
        for (int k = 0; k < kNumLinks; ++k)
            per_link[k].push_back(g[k]);
    }
    for (int k = 0; k < kNumLinks; ++k)
    {
        boost::math::gamma_distribution<double> const dist(
            links[k].m, links[k].Omega / links[k].m);
        double const d = oracle::ks_statistic(
            per_link[k], [&](double x) { return boost::math::cdf(dist, x); });
        EXPECT_LT(d, oracle::ks_critical_1pct(n)) << "link " << k + 1;
    }
}

TEST(SampleGamma, KolmogorovSmirnovNonInteger)
{
    for (double shape : {0.4, 1.0, 2.7, 9.5})
    {
        RngStream rng(5, static_cast<std::uint64_t>(shape * 10));
        std::vector<double> xs(100'000);
        for (auto& x : xs)
            x = sample_gamma(shape, 2.0, rng);
        boost::math::gamma_distribution<double> const dist(shape, 2.0);
        double const d = oracle::ks_statistic(
            xs, [&](double x) { return boost::math::cdf(dist, x); });
        EXPECT_LT(d, oracle::ks_critical_1pct(xs.size())) << shape;
    }
    RngStream rng(1, 1);
    EXPECT_THROW(sample_gamma(0, 1, rng), std::domain_error);
    EXPECT_THROW(sample_gain(GammaGain{0, 1}, rng), std::domain_error);
}

TEST(BlockSample, DeterministicMeansAndIndependence)
{
    SystemConfig raw;
    auto const links = derive_link_stats(validate(raw));
    {
        RngStream a(9, 4), b(9, 4);
        for (int i = 0; i < 100; ++i)
            EXPECT_EQ(block_sample(links, a), block_sample(links, b));
    }

    RngStream rng(123, 0);
    int const n = 1'000'000;
    std::array<double, kNumLinks> sum{}, sq{};
    std::array<std::array<double, kNumLinks>, kNumLinks> cross{};
    for (int i = 0; i < n; ++i)
    {
        auto g = block_sample(links, rng);
        for (int k = 0; k < kNumLinks; ++k)
        {
            g[k] /= links[k].Omega;  // unit mean
            sum[k] += g[k];
            sq[k] += g[k] * g[k];
            for (int j = 0; j < k; ++j)
                cross[k][j] += g[k] * g[j];
        }
    }
    for (int k = 0; k < kNumLinks; ++k)
    {
        EXPECT_NEAR(1.0, sum[k] / n, 0.01) << k;
        for (int j = 0; j < k; ++j)
        {
            double const mk = sum[k] / n, mj = sum[j] / n;
            double const cov = cross[k][j] / n - mk * mj;
            double const corr = cov
                                / std::sqrt((sq[k] / n - mk * mk)
                                            * (sq[j] / n - mj * mj));
            EXPECT_LT(std::abs(corr), 0.01) << k << ',' << j;
        }
    }
}

}  // namespace
}  // namespace fdcr
