// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace relaydmt {

/// SplitMix64 finaliser. Bijective on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/**
 * Counter-based random stream.
 *
 * Output k of stream (seed, index) is a pure function of the triple
 * (seed, index, k), so a Monte Carlo trial draws the same numbers no matter
 * which worker runs it or in which order trials are visited.
 * Satisfies UniformRandomBitGenerator.
 */
class CounterRng {
public:
    using result_type = std::uint64_t;

    constexpr CounterRng(std::uint64_t seed, std::uint64_t index) noexcept
        : key_(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL)))
    {
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept
    {
        return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
    }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() noexcept
    {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double gaussian() noexcept
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Zero-mean circular complex Gaussian with E|z|^2 = variance.
    std::complex<double> complex_gaussian(double variance) noexcept
    {
        const double s = std::sqrt(0.5 * variance);
        const double re = gaussian();
        const double im = gaussian();
        return {s * re, s * im};
    }

    constexpr std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace relaydmt
