//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/fading.hpp
//! Counter-based random streams and Nakagami-m power-gain sampling.
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "params.hpp"

namespace fdcr
{
//---------------------------------------------------------------------------//
/*!
 * Gamma distribution of a power gain |h|^2.
 *
 * Nakagami-m amplitude fading makes the power gain gamma distributed with
 * shape m; the scale is mean/m.
 */
struct GammaGain
{
    int shape{1};
    double scale{1.0};

    double mean() const { return shape * scale; }
    double rate() const { return 1.0 / scale; }

    static GammaGain from_mean(int shape, double mean)
    {
        return {shape, mean / shape};
    }
};

//---------------------------------------------------------------------------//
/*!
 * Counter-based pseudo-random stream.
 *
 * Draw n of stream (seed, stream_id) is a SplitMix64 finalizer applied to a
 * key derived from both ids plus n times the golden-ratio increment, so any
 * position is reachable without replaying the sequence and streams with
 * distinct ids never share state.
 */
class RngStream
{
  public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream_id,
              std::uint64_t counter = 0)
        : seed_{seed}
        , stream_id_{stream_id}
        , key_{mix(seed ^ mix(stream_id + 0x632BE59BD9B4E019ULL))}
        , counter_{counter}
    {
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t counter() const { return counter_; }

    std::uint64_t next_u64()
    {
        ++counter_;
        return mix(key_ + counter_ * kGolden);
    }

    //! Uniform on the open interval (0, 1).
    double uniform()
    {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    //! Standard normal (Box-Muller, one draw per call).
    double normal()
    {
        double const u1 = uniform();
        double const u2 = uniform();
        return std::sqrt(-2 * std::log(u1)) * std::cos(kTwoPi * u2);
    }

  private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
    static constexpr double kTwoPi = 6.283185307179586476925286766559;

    static std::uint64_t mix(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_{0};
    std::uint64_t stream_id_{0};
    std::uint64_t key_{mix(0x632BE59BD9B4E019ULL)};
    std::uint64_t counter_{0};
};

//---------------------------------------------------------------------------//
// Samplers
//---------------------------------------------------------------------------//

/*!
 * Gamma variate of arbitrary positive shape (Marsaglia-Tsang).
 *
 * Shapes below one use the U^{1/a} boost.
 */
inline double sample_gamma(double shape, double scale, RngStream& rng)
{
    if (!(shape > 0) || !(scale > 0))
    {
        throw std::domain_error("sample_gamma requires shape, scale > 0");
    }
    if (shape < 1)
    {
        double const u = rng.uniform();
        return sample_gamma(shape + 1, scale, rng) * std::pow(u, 1 / shape);
    }
    double const d = shape - 1.0 / 3.0;
    double const c = 1 / std::sqrt(9 * d);
    for (;;)
    {
        double x, v;
        do
        {
            x = rng.normal();
            v = 1 + c * x;
        } while (v <= 0);
        v = v * v * v;
        double const u = rng.uniform();
        if (u < 1 - 0.0331 * x * x * x * x)
            return d * v * scale;
        if (std::log(u) < 0.5 * x * x + d * (1 - v + std::log(v)))
            return d * v * scale;
    }
}

//! Draw one |h|^2; integer shapes use the Erlang sum of exponentials.
inline double sample_gain(GammaGain const& g, RngStream& rng)
{
    if (g.shape < 1 || !(g.scale > 0))
    {
        throw std::domain_error("GammaGain requires shape >= 1, scale > 0");
    }
    double acc = 0;
    for (int i = 0; i < g.shape; ++i)
    {
        acc -= std::log(rng.uniform());
    }
    return acc * g.scale;
}

//! One block of SNR-scaled gains, link i having mean Omega_i.
inline std::array<double, kNumLinks>
block_sample(LinkStats const& links, RngStream& rng)
{
    std::array<double, kNumLinks> out{};
    for (int i = 0; i < kNumLinks; ++i)
    {
        out[i] = sample_gain(GammaGain::from_mean(links[i].m, links[i].Omega),
                             rng);
    }
    return out;
}

}  // namespace fdcr
