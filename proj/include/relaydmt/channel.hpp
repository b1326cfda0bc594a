// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "errors.hpp"
#include "rng.hpp"

namespace relaydmt {

/// Links of the two-relay network, in the order used by every array below.
enum class Link : int { SD = 0, SR1 = 1, SR2 = 2, R1D = 3, R2D = 4 };

inline constexpr int link_count = 5;

inline const char* link_name(Link l)
{
    static constexpr const char* names[link_count] = {"sd", "sr1", "sr2", "r1d", "r2d"};
    return names[static_cast<int>(l)];
}

/// Per-link fading variances of the half-duplex two-relay network.
struct NetworkConfig {
    int relay_count = 2;
    std::array<double, link_count> variance{1.0, 1.0, 1.0, 1.0, 1.0};

    double var(Link l) const { return variance[static_cast<int>(l)]; }
    double lambda(Link l) const { return 1.0 / var(l); }

    /// Transmit power split 2/(K+1) between source and the K relays.
    double power_factor() const { return 2.0 / (relay_count + 1); }

    void validate() const
    {
        if (relay_count != 2)
            throw config_error("relay_count must be 2");
        for (int i = 0; i < link_count; ++i) {
            if (!(variance[i] > 0.0) || !std::isfinite(variance[i]))
                throw config_error(std::string("variance of link ") + link_name(static_cast<Link>(i)) +
                                   " must be positive");
        }
    }

    /// Variances c / d^mu from link distances (pathloss exponent in [2, 5]).
    static NetworkConfig from_geometry(const std::array<double, link_count>& distance, double mu,
                                       double c = 1.0)
    {
        if (!(mu >= 2.0 && mu <= 5.0))
            throw config_error("pathloss exponent must lie in [2, 5]");
        if (!(c > 0.0))
            throw config_error("pathloss constant must be positive");
        NetworkConfig cfg;
        for (int i = 0; i < link_count; ++i) {
            if (!(distance[i] > 0.0))
                throw config_error("link distances must be positive");
            cfg.variance[i] = c / std::pow(distance[i], mu);
        }
        return cfg;
    }
};

/// One draw of the five complex link gains.
struct FadingRealization {
    std::complex<double> sd, sr1, sr2, r1d, r2d;

    std::complex<double> gain(Link l) const
    {
        switch (l) {
        case Link::SD: return sd;
        case Link::SR1: return sr1;
        case Link::SR2: return sr2;
        case Link::R1D: return r1d;
        default: return r2d;
        }
    }
};

/// Draws the five gains from `rng` in link order.
inline FadingRealization sample_fading(CounterRng& rng, const NetworkConfig& cfg)
{
    FadingRealization f;
    f.sd = rng.complex_gaussian(cfg.var(Link::SD));
    f.sr1 = rng.complex_gaussian(cfg.var(Link::SR1));
    f.sr2 = rng.complex_gaussian(cfg.var(Link::SR2));
    f.r1d = rng.complex_gaussian(cfg.var(Link::R1D));
    f.r2d = rng.complex_gaussian(cfg.var(Link::R2D));
    return f;
}

/// Target spectral efficiency R = r log2(1 + snr * var_sd), bits/s/Hz.
inline double rate(double snr, double r, double var_sd)
{
    if (!(snr > 0.0))
        throw domain_error("snr must be positive");
    if (!(r >= 0.0 && r < 0.5))
        throw domain_error("multiplexing gain must lie in [0, 1/2)");
    if (!(var_sd > 0.0))
        throw domain_error("variance must be positive");
    return r * std::log2(1.0 + snr * var_sd);
}

struct RatePoint {
    double snr = 1.0;  // linear
    double r = 0.0;
    double R = 0.0;    // bits/s/Hz
    double rho0 = 2.0 / 3.0;

    static RatePoint make(double snr, double r, double var_sd, int relay_count = 2)
    {
        RatePoint p;
        p.snr = snr;
        p.r = r;
        p.R = rate(snr, r, var_sd);
        p.rho0 = 2.0 / (relay_count + 1) * snr;
        return p;
    }
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Subset of {R1, R2} that decoded the source message.
struct DecodingSet {
    bool r1 = false;
    bool r2 = false;

    int size() const { return int(r1) + int(r2); }
    static DecodingSet none() { return {}; }
    static DecodingSet both() { return {true, true}; }
    bool operator==(const DecodingSet&) const = default;
};

/// 1/2 log2(1 + rho0 |a|^2) >= R. Equality counts as success.
inline bool relay_decodes(std::complex<double> alpha_sr, const RatePoint& p)
{
    return 0.5 * std::log2(1.0 + p.rho0 * std::norm(alpha_sr)) >= p.R;
}

inline DecodingSet decoding_set(const FadingRealization& f, const RatePoint& p)
{
    return {relay_decodes(f.sr1, p), relay_decodes(f.sr2, p)};
}

/// Exponential CDF of |a|^2 evaluated at the decoding threshold (2^{2R}-1)/rho0.
inline double relay_failure_prob(const RatePoint& p, double lambda_sr)
{
    const double threshold = std::expm1(2.0 * p.R * std::numbers::ln2) / p.rho0;
    return -std::expm1(-lambda_sr * threshold);
}

struct DecodingSetProbs {
    double none = 0.0;
    double only_r1 = 0.0;
    double only_r2 = 0.0;
    double both = 0.0;

    double by_size(int k) const
    {
        switch (k) {
        case 0: return none;
        case 1: return only_r1 + only_r2;
        case 2: return both;
        default: return 0.0;
        }
    }
    double total() const { return none + only_r1 + only_r2 + both; }
};

inline DecodingSetProbs decoding_set_probs(const RatePoint& p, double lambda_sr1, double lambda_sr2)
{
    if (!(lambda_sr1 > 0.0) || !(lambda_sr2 > 0.0))
        throw domain_error("exponential parameters must be positive");
    const double f1 = relay_failure_prob(p, lambda_sr1);
    const double f2 = relay_failure_prob(p, lambda_sr2);
    // success probabilities straight from the exponential tail, no 1-f cancellation
    const double threshold = std::expm1(2.0 * p.R * std::numbers::ln2) / p.rho0;
    const double s1 = std::exp(-lambda_sr1 * threshold);
    const double s2 = std::exp(-lambda_sr2 * threshold);
    return {f1 * f2, s1 * f2, f1 * s2, s1 * s2};
}

} // namespace relaydmt
