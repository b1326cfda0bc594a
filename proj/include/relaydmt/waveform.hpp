// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace relaydmt {

/// Minimum grid density accepted for correlation integrals.
inline constexpr int min_samples_per_symbol = 64;

/// Default threshold on the grid minimum eigenvalue for declaring T~_E positive definite.
inline constexpr double pd_tolerance = 1e-6;

/**
 * Time-limited real pulse on [0, M*Ts], stored as M*S+1 uniform samples and
 * interpreted as the piecewise-linear interpolant of those samples (zero outside).
 */
struct Waveform {
    std::vector<double> samples;
    int span = 1;                 // M
    int samples_per_symbol = 64;  // S
    double symbol_period = 1.0;   // Ts

    double step() const { return symbol_period / samples_per_symbol; }
    double duration() const { return span * symbol_period; }

    void validate() const
    {
        if (span < 1)
            throw config_error("waveform span must be >= 1");
        if (samples_per_symbol < min_samples_per_symbol)
            throw config_error("waveform needs at least " + std::to_string(min_samples_per_symbol) +
                               " samples per symbol");
        if (!(symbol_period > 0.0))
            throw config_error("symbol period must be positive");
        if (samples.size() != static_cast<std::size_t>(span) * samples_per_symbol + 1)
            throw config_error("waveform must have span*samples_per_symbol+1 samples, got " +
                               std::to_string(samples.size()));
    }
};

namespace detail {

// Integral over [lo, hi] of the product of two linear functions given by their
// endpoint values (Simpson is exact for quadratics).
inline double linear_product(double f0, double f1, double g0, double g1, double width)
{
    const double fm = 0.5 * (f0 + f1);
    const double gm = 0.5 * (g0 + g1);
    return width * (f0 * g0 + 4.0 * fm * gm + f1 * g1) / 6.0;
}

} // namespace detail

/// Integral of s(t)^2 for the interpolant of the samples.
inline double energy(const Waveform& s)
{
    const double h = s.step();
    double e = 0.0;
    for (std::size_t k = 0; k + 1 < s.samples.size(); ++k) {
        const double a = s.samples[k];
        const double b = s.samples[k + 1];
        e += h * (a * a + a * b + b * b) / 3.0;
    }
    return e;
}

/**
 * Autocorrelation r(x) = int s(u) s(u+x) du of the interpolant.
 * Both factors are linear between consecutive breakpoints of the two shifted grids,
 * so the integral is exact up to rounding.
 */
inline double autocorrelation(const Waveform& s, double x)
{
    const double L = s.duration();
    const double h = s.step();
    x = std::abs(x);  // r is even
    if (x >= L)
        return 0.0;
    const int n = static_cast<int>(s.samples.size());
    const double lo = 0.0;
    const double hi = L - x;

    std::vector<double> cuts;
    cuts.reserve(2 * n + 2);
    cuts.push_back(lo);
    cuts.push_back(hi);
    for (int k = 1; k < n - 1; ++k) {
        const double a = k * h;
        if (a > lo && a < hi)
            cuts.push_back(a);
        const double b = k * h - x;
        if (b > lo && b < hi)
            cuts.push_back(b);
    }
    std::sort(cuts.begin(), cuts.end());

    auto eval = [&](double t, int seg) {
        const double w = t / h - seg;
        return s.samples[seg] + (s.samples[seg + 1] - s.samples[seg]) * w;
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double u0 = cuts[i];
        const double u1 = cuts[i + 1];
        if (u1 - u0 <= 1e-15 * L)
            continue;
        const double um = 0.5 * (u0 + u1);
        const int sa = std::clamp(static_cast<int>(std::floor(um / h)), 0, n - 2);
        const int sb = std::clamp(static_cast<int>(std::floor((um + x) / h)), 0, n - 2);
        sum += detail::linear_product(eval(u0, sa), eval(u1, sa), eval(u0 + x, sb), eval(u1 + x, sb),
                                      u1 - u0);
    }
    return sum;
}

/**
 * Correlation coefficients of a common relay waveform for relative delay tau.
 *
 * auto_lag[m] = r(m Ts), m = 0..M; cross_lag[m + M] = r(m Ts - tau), m = -M..M.
 * The named coefficients are the low-order taps used by the two-symbol model.
 */
struct CorrelationSet {
    int span = 1;
    double tau = 0.5;
    std::vector<double> auto_lag{1.0, 0.0};
    std::vector<double> cross_lag{0.0, 0.0, 0.0};

    double a1 = 0.0, d1 = 0.0;
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, f1 = 0.0;
    double rho12 = 0.0, rho21 = 0.0;

    double cross(int m) const
    {
        if (m < -span || m > span)
            return 0.0;
        return cross_lag[m + span];
    }
    double autoc(int m) const
    {
        m = std::abs(m);
        return m > span ? 0.0 : auto_lag[m];
    }

    /// Fill named taps from the lag tables.
    void name_taps()
    {
        a1 = d1 = autoc(1);
        c0 = cross(0);
        c1 = cross(1);
        c2 = cross(2);
        f1 = cross(-1);
        rho12 = c0;
        rho21 = c1;
    }

    /// All shifts orthogonal: T~_E(w) is the identity.
    static CorrelationSet orthogonal(int span = 1)
    {
        CorrelationSet c;
        c.span = span;
        c.tau = 1.0;
        c.auto_lag.assign(span + 1, 0.0);
        c.auto_lag[0] = 1.0;
        c.cross_lag.assign(2 * span + 1, 0.0);
        c.name_taps();
        return c;
    }

    /// Single-symbol correlation set from the two overlap coefficients.
    static CorrelationSet single_symbol(double rho12, double rho21)
    {
        CorrelationSet c = orthogonal(1);
        c.cross_lag[1] = rho12;
        c.cross_lag[2] = rho21;
        c.name_taps();
        return c;
    }
};

inline CorrelationSet correlations(const Waveform& s, double tau)
{
    s.validate();
    if (!(tau > 0.0) || tau > s.symbol_period)
        throw domain_error("delay must lie in (0, Ts]");
    CorrelationSet c;
    c.span = s.span;
    c.tau = tau;
    c.auto_lag.resize(s.span + 1);
    for (int m = 0; m <= s.span; ++m)
        c.auto_lag[m] = autocorrelation(s, m * s.symbol_period);
    c.cross_lag.resize(2 * s.span + 1);
    for (int m = -s.span; m <= s.span; ++m)
        c.cross_lag[m + s.span] = autocorrelation(s, m * s.symbol_period - tau);
    c.name_taps();
    return c;
}

/// 2x2 Hermitian matrix [[t11, t12], [conj(t12), t22]].
struct SpectralMatrix2 {
    double omega = 0.0;
    double t11 = 1.0;
    double t22 = 1.0;
    std::complex<double> t12{};

    double trace() const { return t11 + t22; }
    double det() const { return t11 * t22 - std::norm(t12); }
};

struct SpectralPair {
    SpectralMatrix2 unit;      // T~_E(w)
    SpectralMatrix2 weighted;  // T_E(w) = diag(a)^H T~_E diag(a)
};

/// Unit-gain spectral matrix T~_E(w).
inline SpectralMatrix2 spectral_matrix(const CorrelationSet& c, double omega)
{
    SpectralMatrix2 m;
    m.omega = omega;
    double diag = c.autoc(0);
    for (int k = 1; k <= c.span; ++k)
        diag += 2.0 * c.autoc(k) * std::cos(k * omega);
    m.t11 = m.t22 = diag;
    std::complex<double> off{};
    for (int k = -c.span; k <= c.span; ++k)
        off += c.cross(k) * std::polar(1.0, -k * omega);
    m.t12 = off;
    return m;
}

inline SpectralPair spectral_matrix(const CorrelationSet& c, double g1, double g2, double omega)
{
    SpectralPair p;
    p.unit = spectral_matrix(c, omega);
    p.weighted = p.unit;
    p.weighted.t11 *= g1;
    p.weighted.t22 *= g2;
    p.weighted.t12 *= std::sqrt(g1 * g2);
    return p;
}

/// Eigenvalues (descending) of a 2x2 Hermitian matrix from trace and determinant.
inline std::pair<double, double> eigen2(const SpectralMatrix2& m)
{
    const double half_tr = 0.5 * m.trace();
    const double half_diff = 0.5 * (m.t11 - m.t22);
    const double disc = std::hypot(half_diff, std::abs(m.t12));
    const double nu1 = half_tr + disc;
    double nu2 = half_tr - disc;
    // det/nu1 keeps relative accuracy of the small eigenvalue
    if (nu1 > 0.0 && half_tr > 0.0)
        nu2 = m.det() / nu1;
    return {nu1, nu2};
}

struct EigenBounds {
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    double omega_at_min = 0.0;
    double omega_at_max = 0.0;
    int omega_points = 0;
    double lipschitz = 0.0;      // bound on |d nu / d omega|
    double certified_min = 1.0;  // lambda_min - lipschitz * grid_step / 2, clamped at 0
    double certified_max = 1.0;  // lambda_max + lipschitz * grid_step / 2
    double trace_deviation = 0.0;  // max |tr T~_E(w) - 2| on the grid
    double max_bound = 2.0;        // 2(2M+1)
    double energy_error = 0.0;
    bool pd = true;
    bool max_bound_ok = true;
    bool energy_ok = true;
};

/// Derivative bound from coefficient magnitudes (Weyl + row sums of dT/dw).
inline double spectral_lipschitz(const CorrelationSet& c)
{
    double diag = 0.0;
    for (int k = 1; k <= c.span; ++k)
        diag += 2.0 * k * std::abs(c.autoc(k));
    double off = 0.0;
    for (int k = -c.span; k <= c.span; ++k)
        off += std::abs(k) * std::abs(c.cross(k));
    return diag + off;
}

/// Grid scan of the eigenvalues of T~_E(w) over w_k = -pi + 2 pi k / N, k = 0..N.
inline EigenBounds certify_pd(const CorrelationSet& c, int omega_points, double tolerance = pd_tolerance)
{
    if (omega_points < 256)
        throw config_error("omega_points must be >= 256");
    EigenBounds b;
    b.omega_points = omega_points;
    b.lambda_min = std::numeric_limits<double>::infinity();
    b.lambda_max = -std::numeric_limits<double>::infinity();
    const double dw = 2.0 * std::numbers::pi / omega_points;
    for (int k = 0; k <= omega_points; ++k) {
        const double w = -std::numbers::pi + k * dw;
        const SpectralMatrix2 m = spectral_matrix(c, w);
        const auto [nu1, nu2] = eigen2(m);
        if (nu2 < b.lambda_min) {
            b.lambda_min = nu2;
            b.omega_at_min = w;
        }
        if (nu1 > b.lambda_max) {
            b.lambda_max = nu1;
            b.omega_at_max = w;
        }
        b.trace_deviation = std::max(b.trace_deviation, std::abs(m.trace() - 2.0));
    }
    b.lipschitz = spectral_lipschitz(c);
    b.certified_min = std::max(0.0, b.lambda_min - 0.5 * b.lipschitz * dw);
    b.certified_max = b.lambda_max + 0.5 * b.lipschitz * dw;
    b.max_bound = 2.0 * (2 * c.span + 1);
    b.max_bound_ok = b.lambda_max <= b.max_bound + 1e-9;
    b.pd = b.lambda_min > tolerance;
    return b;
}

inline EigenBounds certify_pd(const Waveform& s, double tau, int omega_points,
                              double tolerance = pd_tolerance)
{
    EigenBounds b = certify_pd(correlations(s, tau), omega_points, tolerance);
    b.energy_error = std::abs(energy(s) - 1.0);
    b.energy_ok = b.energy_error <= 1e-9;
    return b;
}

// ---- generators -----------------------------------------------------------

/// Scale samples to unit energy.
inline Waveform normalized(Waveform s)
{
    const double e = energy(s);
    if (!(e > 0.0))
        throw config_error("waveform has zero energy");
    const double g = 1.0 / std::sqrt(e);
    for (double& v : s.samples)
        v *= g;
    return s;
}

/// 1/sqrt(Ts) on [0, Ts].
inline Waveform rectangular(int samples_per_symbol = 64, double symbol_period = 1.0)
{
    Waveform s;
    s.span = 1;
    s.samples_per_symbol = samples_per_symbol;
    s.symbol_period = symbol_period;
    s.samples.assign(samples_per_symbol + 1, 1.0 / std::sqrt(symbol_period));
    s.validate();
    return s;
}

/// sqrt(2/Ts) sin(pi t / Ts) on [0, Ts].
inline Waveform half_sine(int samples_per_symbol = 64, double symbol_period = 1.0)
{
    Waveform s;
    s.span = 1;
    s.samples_per_symbol = samples_per_symbol;
    s.symbol_period = symbol_period;
    s.samples.resize(samples_per_symbol + 1);
    for (int k = 0; k <= samples_per_symbol; ++k)
        s.samples[k] = std::sin(std::numbers::pi * k / samples_per_symbol);
    s = normalized(std::move(s));
    s.validate();
    return s;
}

/// Square-root raised cosine impulse response at time t (Ts = 1), unnormalised.
inline double srrc_value(double t, double beta)
{
    constexpr double pi = std::numbers::pi;
    if (std::abs(t) < 1e-12)
        return 1.0 - beta + 4.0 * beta / pi;
    if (beta > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-12) {
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
    }
    const double num = std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
    const double den = pi * t * (1.0 - 16.0 * beta * beta * t * t);
    return num / den;
}

/// SRRC pulse truncated to M symbols, centred on the window, unit energy.
inline Waveform truncated_srrc(double rolloff, int span, int samples_per_symbol = 64,
                               double symbol_period = 1.0)
{
    if (!(rolloff >= 0.0 && rolloff <= 1.0))
        throw config_error("rolloff must lie in [0, 1]");
    Waveform s;
    s.span = span;
    s.samples_per_symbol = samples_per_symbol;
    s.symbol_period = symbol_period;
    const int n = span * samples_per_symbol + 1;
    if (span < 1)
        throw config_error("waveform span must be >= 1");
    s.samples.resize(n);
    const double centre = 0.5 * span;
    for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / samples_per_symbol - centre;
        s.samples[k] = srrc_value(t, rolloff);
    }
    s = normalized(std::move(s));
    s.validate();
    return s;
}

/**
 * Text import: `# span=M` and `# samples_per_symbol=S` header lines
 * (optionally `# symbol_period=T`), then one sample per line.
 */
inline Waveform read_waveform(std::istream& in)
{
    Waveform s;
    s.span = 0;
    s.samples_per_symbol = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        if (line[first] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            std::string key = line.substr(first + 1, eq - first - 1);
            key.erase(0, key.find_first_not_of(" \t"));
            key.erase(key.find_last_not_of(" \t") + 1);
            const std::string value = line.substr(eq + 1);
            try {
                if (key == "span")
                    s.span = std::stoi(value);
                else if (key == "samples_per_symbol")
                    s.samples_per_symbol = std::stoi(value);
                else if (key == "symbol_period")
                    s.symbol_period = std::stod(value);
            } catch (const std::exception&) {
                throw config_error("bad waveform header at line " + std::to_string(lineno));
            }
            continue;
        }
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v))
            throw config_error("bad waveform sample at line " + std::to_string(lineno));
        s.samples.push_back(v);
    }
    if (s.span == 0 || s.samples_per_symbol == 0)
        throw config_error("waveform header must give span and samples_per_symbol");
    s.validate();
    return s;
}

inline Waveform read_waveform(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open waveform file " + path);
    return read_waveform(in);
}

} // namespace relaydmt
