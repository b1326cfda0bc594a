// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_dilog.h>

#include "channel.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "waveform.hpp"

namespace relaydmt {

enum class Scheme { STC_SYNC, TDA_INDEP, TDA_REPETITION, TDA_LINMOD, ASTC, MIX_AF };

inline const char* scheme_name(Scheme s)
{
    switch (s) {
    case Scheme::STC_SYNC: return "STC_SYNC";
    case Scheme::TDA_INDEP: return "TDA_INDEP";
    case Scheme::TDA_REPETITION: return "TDA_REPETITION";
    case Scheme::TDA_LINMOD: return "TDA_LINMOD";
    case Scheme::ASTC: return "ASTC";
    default: return "MIX_AF";
    }
}

inline Scheme parse_scheme(const std::string& name)
{
    for (Scheme s : {Scheme::STC_SYNC, Scheme::TDA_INDEP, Scheme::TDA_REPETITION, Scheme::TDA_LINMOD,
                     Scheme::ASTC, Scheme::MIX_AF}) {
        if (name == scheme_name(s))
            return s;
    }
    throw config_error("unknown scheme '" + name + "'");
}

/// Value of a mutual-information evaluator with its bound pair (bits/s/Hz).
struct MiValue {
    double value = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool warning = false;
    std::string note;
};

/// Relay delays and signal bandwidth.
struct DelayConfig {
    double tau1 = 0.0;
    double tau2 = 0.0;
    double bandwidth = 1.0;  // B_w

    double t0() const { return std::abs(tau1 - tau2); }
    double t0_bw() const { return t0() * bandwidth; }

    /// floor(T0 Bw) / ceil(T0 Bw); 0 when T0 Bw < 1.
    double delta1() const
    {
        const double x = t0_bw();
        if (x <= 0.0)
            return 0.0;
        return std::floor(x) / std::ceil(x);
    }

    void validate() const
    {
        if (!(tau1 >= 0.0) || !(tau2 >= 0.0))
            throw config_error("delays must be nonnegative");
        if (!(bandwidth > 0.0))
            throw config_error("bandwidth must be positive");
    }

    static DelayConfig from_product(double t0_bw)
    {
        return {0.0, t0_bw, 1.0};
    }
};

namespace detail {

inline double log2p(double x) { return std::log1p(x) / std::numbers::ln2; }

/// Imaginary part of Li2(r e^{i theta}).
inline double dilog_im(double r, double theta)
{
    gsl_sf_result re, im;
    const int status = gsl_sf_complex_dilog_e(r, theta, &re, &im);
    if (status != GSL_SUCCESS)
        throw numeric_error("complex dilogarithm failed");
    return im.val;
}

/**
 * Integral of ln(A + B cos(theta)) over [theta0, theta1], A > B >= 0.
 *
 * Uses A + B cos = c |1 + q e^{i theta}|^2 with c = (A + sqrt(A^2 - B^2))/2, q = B/(2c),
 * and d/dtheta Li2(-q e^{i theta}) = -i ln(1 + q e^{i theta}).
 * `a_minus_b` = A - B is passed separately so that A^2 - B^2 keeps full accuracy.
 */
inline double log_cos_integral(double A, double B, double a_minus_b, double theta0, double theta1)
{
    const double root = std::sqrt(a_minus_b * (A + B));
    const double c = 0.5 * (A + root);
    const double q = B / (A + root);
    double result = (theta1 - theta0) * std::log(c);
    if (q > 0.0) {
        // -q e^{i t} = q e^{i (t + pi)}
        result -= 2.0 * (dilog_im(q, theta1 + std::numbers::pi) - dilog_im(q, theta0 + std::numbers::pi));
    }
    return result;
}

/**
 * Mean over u in [-pi P, pi P] of log2(A + B cos(u + phi)) (P > 0).
 * Whole periods use the closed form, the remainder the dilogarithm antiderivative.
 */
inline double mean_log_cos(double A, double B, double a_minus_b, double phi, double P)
{
    const double periods = std::floor(P);
    const double frac = P - periods;
    const double root = std::sqrt(a_minus_b * (A + B));
    const double full = std::log(0.5 * (A + root));  // mean over one period
    double total = 2.0 * std::numbers::pi * periods * full;
    if (frac > 0.0) {
        const double u0 = -std::numbers::pi * P;
        const double u1 = u0 + 2.0 * std::numbers::pi * frac;
        // reduce the angle so the dilogarithm sees moderate arguments
        const double shift = std::remainder(u0 + phi, 2.0 * std::numbers::pi) - (u0 + phi);
        total += log_cos_integral(A, B, a_minus_b, u0 + phi + shift, u1 + phi + shift);
    }
    return total / (2.0 * std::numbers::pi * P) / std::numbers::ln2;
}

} // namespace detail

/// 1/2 log2(1 + rho0 |a_SD|^2) + 1/2 log2(1 + rho0 sum_{k in D} |a_RkD|^2).
inline double i_stc(const FadingRealization& f, DecodingSet d, double rho0)
{
    double relay = 0.0;
    if (d.r1)
        relay += std::norm(f.r1d);
    if (d.r2)
        relay += std::norm(f.r2d);
    return 0.5 * detail::log2p(rho0 * std::norm(f.sd)) + 0.5 * detail::log2p(rho0 * relay);
}

/// (1/2pi) int_0^{2pi} log2(1 + a sin x + b cos x) dx = log2((1 + sqrt(1 - a^2 - b^2)) / 2).
inline double closed_log_integral(double a, double b)
{
    const double s = a * a + b * b;
    if (!(s < 1.0))
        throw domain_error("closed_log_integral needs a^2 + b^2 < 1");
    return std::log2(0.5 * (1.0 + std::sqrt(1.0 - s)));
}

/// Independent-codeword delay diversity.
inline MiValue i_tda(const FadingRealization& f, DecodingSet d, const DelayConfig& delays, double rho0)
{
    MiValue out;
    if (d.size() < 2) {
        out.value = out.lower = out.upper = i_stc(f, d, rho0);
        return out;
    }
    const double x = std::norm(f.sd);
    const double y1 = std::norm(f.r1d);
    const double y2 = std::norm(f.r2d);
    const double nu = y1 + y2;
    const double direct = 0.5 * detail::log2p(rho0 * x);
    const double P = delays.t0_bw();
    const double cross = std::abs(f.r1d) * std::abs(f.r2d);
    if (P <= 0.0) {
        out.value = direct + 0.5 * detail::log2p(rho0 * std::norm(f.r1d + f.r2d));
    } else {
        const double phi = std::arg(std::conj(f.r1d) * f.r2d);
        const double A = 1.0 + rho0 * nu;
        const double B = 2.0 * rho0 * cross;
        const double amb = 1.0 + rho0 * std::pow(std::abs(f.r1d) - std::abs(f.r2d), 2);
        out.value = direct + 0.5 * detail::mean_log_cos(A, B, amb, phi, P);
    }
    const double delta1 = delays.delta1();
    out.upper = direct + 0.5 * detail::log2p(2.0 * rho0 * nu);
    out.lower = 0.5 * delta1 * (std::log2(0.5 * (1.0 + rho0 * nu)) + detail::log2p(rho0 * x));
    if (P < 1.0) {
        out.warning = true;
        out.note = "T0*Bw < 1: lower bound is trivial";
    }
    return out;
}

/// Repetition-coded delay diversity (source and relays send the same codeword).
inline MiValue i_rtda(const FadingRealization& f, DecodingSet d, const DelayConfig& delays, double rho0)
{
    MiValue out;
    const double x = std::norm(f.sd);
    if (d.size() < 2) {
        double g = x;
        if (d.r1)
            g += std::norm(f.r1d);
        if (d.r2)
            g += std::norm(f.r2d);
        out.value = out.lower = out.upper = 0.5 * detail::log2p(rho0 * g);
        return out;
    }
    const double y1 = std::norm(f.r1d);
    const double y2 = std::norm(f.r2d);
    const double nu = y1 + y2;
    const double P = delays.t0_bw();
    if (P <= 0.0) {
        out.value = 0.5 * detail::log2p(rho0 * (x + std::norm(f.r1d + f.r2d)));
    } else {
        const double phi = std::arg(std::conj(f.r1d) * f.r2d);
        const double A = 1.0 + rho0 * (x + nu);
        const double B = 2.0 * rho0 * std::abs(f.r1d) * std::abs(f.r2d);
        const double amb = 1.0 + rho0 * (x + std::pow(std::abs(f.r1d) - std::abs(f.r2d), 2));
        out.value = 0.5 * detail::mean_log_cos(A, B, amb, phi, P);
    }
    out.upper = 0.5 * detail::log2p(rho0 * (x + 2.0 * nu));
    out.lower = 0.5 * delays.delta1() * std::log2(0.5 * (1.0 + rho0 * (x + nu)));
    if (P < 1.0) {
        out.warning = true;
        out.note = "T0*Bw < 1: lower bound is trivial";
    }
    return out;
}

/// Linearly modulated delay diversity with single-symbol taps rho12, rho21.
inline MiValue i_ltda(const FadingRealization& f, DecodingSet d, const CorrelationSet& corr, double rho0)
{
    if (!(std::abs(corr.rho12) < 1.0))
        throw domain_error("i_ltda needs |rho12| < 1");
    MiValue out;
    if (d.size() < 2) {
        out.value = out.lower = out.upper = i_stc(f, d, rho0);
        return out;
    }
    const double direct = 0.5 * detail::log2p(rho0 * std::norm(f.sd));
    const double p12 = corr.rho12;
    const double a = rho0 * (std::norm(f.r1d + f.r2d * p12) + std::norm(f.r2d) * (1.0 - p12 * p12));
    const double b = 2.0 * corr.rho21 * std::abs(f.r1d) * std::abs(f.r2d) * rho0;
    const double disc = std::max(0.0, (1.0 + a - b) * (1.0 + a + b));
    const double i2 = std::log2(1.0 + a + std::sqrt(disc)) - 1.0;
    out.value = direct + 0.5 * i2;
    out.lower = direct + 0.5 * (detail::log2p(a) - 1.0);
    out.upper = direct + 0.5 * detail::log2p(a);
    return out;
}

/// Single-path link through a waveform with first-lag autocorrelation a1.
inline MiValue i_esd(std::complex<double> alpha, double a1, double rho0)
{
    if (!(std::abs(a1) < 0.5))
        throw domain_error("i_esd needs |a1| < 1/2");
    const double xp = rho0 * std::norm(alpha);
    const double ratio = 2.0 * xp * a1 / (1.0 + xp);
    MiValue out;
    out.value = detail::log2p(xp) + std::log2(1.0 + std::sqrt((1.0 - ratio) * (1.0 + ratio))) - 1.0;
    out.upper = detail::log2p(xp);
    out.lower = out.upper - 1.0;
    return out;
}

/// Number of nodes used when a caller does not choose one.
inline constexpr int default_quad_points = 512;

/**
 * (1/2pi) int log2 det(I + rho0 diag(a)^H T~_E(w) diag(a)) dw over [-pi, pi] for the
 * two relay-to-destination gains. Bounds use the certified eigenvalue range in `eig`.
 */
inline MiValue i_emaca_spectral(std::complex<double> a1, std::complex<double> a2, const CorrelationSet& corr,
                                const EigenBounds& eig, double rho0, int quad_points = default_quad_points)
{
    if (quad_points < 512)
        throw config_error("quad_points must be >= 512");
    const double g1 = std::norm(a1);
    const double g2 = std::norm(a2);
    auto integrand = [&](double w) {
        const SpectralMatrix2 m = spectral_matrix(corr, w);
        const double det = std::max(0.0, m.det());
        return std::log1p(rho0 * (m.t11 * g1 + m.t22 * g2) + rho0 * rho0 * g1 * g2 * det);
    };
    MiValue out;
    out.value = quad::gauss_legendre_nodes(integrand, -std::numbers::pi, std::numbers::pi, quad_points) /
                (2.0 * std::numbers::pi * std::numbers::ln2);
    out.lower = detail::log2p(rho0 * g1 * eig.certified_min) + detail::log2p(rho0 * g2 * eig.certified_min);
    out.upper = detail::log2p(rho0 * g1 * eig.certified_max) + detail::log2p(rho0 * g2 * eig.certified_max);
    if (!eig.pd) {
        out.warning = true;
        out.note = "spectral matrix not certified positive definite; lower bound degenerate";
    }
    return out;
}

inline MiValue i_emaca_spectral(const FadingRealization& f, const CorrelationSet& corr, const EigenBounds& eig,
                                double rho0, int quad_points = default_quad_points)
{
    return i_emaca_spectral(f.r1d, f.r2d, corr, eig, rho0, quad_points);
}

/// Asynchronous space-time coding: half the direct link plus half the relay phase.
inline MiValue i_astc(const FadingRealization& f, DecodingSet d, const CorrelationSet& corr,
                      const EigenBounds& eig, double rho0, int quad_points = default_quad_points)
{
    const MiValue sd = i_esd(f.sd, corr.a1, rho0);
    MiValue relay;
    if (d.size() == 2)
        relay = i_emaca_spectral(f, corr, eig, rho0, quad_points);
    else if (d.r1)
        relay = i_esd(f.r1d, corr.a1, rho0);
    else if (d.r2)
        relay = i_esd(f.r2d, corr.a1, rho0);
    MiValue out;
    out.value = 0.5 * (sd.value + relay.value);
    out.lower = 0.5 * (sd.lower + relay.lower);
    out.upper = 0.5 * (sd.upper + relay.upper);
    out.warning = relay.warning;
    out.note = relay.note;
    return out;
}

/// log2(1 + rho0 (g1 + g2)).
inline double i_af_pair(double g1, double g2, double rho0)
{
    if (g1 < 0.0 || g2 < 0.0)
        throw domain_error("gains must be nonnegative");
    return detail::log2p(rho0 * (g1 + g2));
}

} // namespace relaydmt
