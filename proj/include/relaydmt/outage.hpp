// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <functional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "channel.hpp"
#include "errors.hpp"
#include "mutualinfo.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "waveform.hpp"

namespace relaydmt {

/// Decoding-set cardinality a curve refers to.
enum class ConditionalCase { D0, D1, D2, Overall };

/// joint: Pr[I < R, |D| = k]; conditional: Pr[I < R | |D| = k].
enum class Measure { Joint, Conditional };

inline const char* case_name(ConditionalCase c)
{
    switch (c) {
    case ConditionalCase::D0: return "0";
    case ConditionalCase::D1: return "1";
    case ConditionalCase::D2: return "2";
    default: return "overall";
    }
}

inline ConditionalCase parse_case(const std::string& s)
{
    if (s == "0") return ConditionalCase::D0;
    if (s == "1") return ConditionalCase::D1;
    if (s == "2") return ConditionalCase::D2;
    if (s == "overall") return ConditionalCase::Overall;
    throw config_error("conditional case must be 0, 1, 2 or overall");
}

inline int case_size(ConditionalCase c)
{
    return c == ConditionalCase::Overall ? -1 : static_cast<int>(c);
}

/// Everything a scheme needs besides the fading draw.
struct SchemeContext {
    NetworkConfig net;
    CorrelationSet corr = CorrelationSet::orthogonal(1);
    EigenBounds eig;
    DelayConfig delays;
    int quad_points = default_quad_points;
};

struct MixingResult {
    std::string branch;
    double mi = 0.0;
};

/// Mixed AF/DF protocol for a given decoding set.
inline MixingResult mixing_protocol_mi(const FadingRealization& f, DecodingSet d, const SchemeContext& ctx,
                                       double rho0)
{
    const double x = std::norm(f.sd);
    const double y1 = std::norm(f.r1d);
    const double y2 = std::norm(f.r2d);
    switch (d.size()) {
    case 0: return {"af_one_relay", 0.5 * i_af_pair(x, y1, rho0)};
    case 1:
        if (d.r1)
            return {"df_r1_af_r2", 0.5 * (i_af_pair(x, y1, rho0) + detail::log2p(rho0 * y2))};
        return {"df_r2_af_r1", 0.5 * (i_af_pair(x, y2, rho0) + detail::log2p(rho0 * y1))};
    default: return {"astc", i_astc(f, d, ctx.corr, ctx.eig, rho0, ctx.quad_points).value};
    }
}

inline MixingResult mixing_protocol_mi(const FadingRealization& f, const RatePoint& p, const SchemeContext& ctx)
{
    return mixing_protocol_mi(f, decoding_set(f, p), ctx, p.rho0);
}

/// Mutual information of `scheme` for one realization and decoding set.
inline double scheme_mi(Scheme scheme, const FadingRealization& f, DecodingSet d, const SchemeContext& ctx,
                        double rho0)
{
    switch (scheme) {
    case Scheme::STC_SYNC: return i_stc(f, d, rho0);
    case Scheme::TDA_INDEP: return i_tda(f, d, ctx.delays, rho0).value;
    case Scheme::TDA_REPETITION: return i_rtda(f, d, ctx.delays, rho0).value;
    case Scheme::TDA_LINMOD: return i_ltda(f, d, ctx.corr, rho0).value;
    case Scheme::ASTC: return i_astc(f, d, ctx.corr, ctx.eig, rho0, ctx.quad_points).value;
    default: return mixing_protocol_mi(f, d, ctx, rho0).mi;
    }
}

// ---- curves ---------------------------------------------------------------

struct OutagePoint {
    double snr_db = 0.0;
    double outage = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t trials = 0;  // 0 for analytic points
    std::uint64_t events = 0;
    bool censored = false;
};

struct FitResult {
    bool ok = false;
    double slope = 0.0;
    double stderr_slope = 0.0;
    double intercept = 0.0;
    double lo_db = 0.0;
    double hi_db = 0.0;
    int used = 0;
    std::string reason;
};

struct OutageCurve {
    Scheme scheme = Scheme::STC_SYNC;
    double r = 0.0;
    ConditionalCase cond = ConditionalCase::Overall;
    Measure measure = Measure::Joint;
    std::vector<OutagePoint> points;
};

/// Wilson score interval for k successes out of n.
inline std::pair<double, double> wilson_interval(std::uint64_t k, std::uint64_t n, double z = 1.959963984540054)
{
    if (n == 0)
        return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = k / nn;
    const double z2 = z * z;
    const double den = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / den;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// Least-squares slope of -log10(outage) against log10(snr) on [lo_db, hi_db].
inline FitResult slope_fit(const OutageCurve& curve, double lo_db, double hi_db)
{
    FitResult fit;
    fit.lo_db = lo_db;
    fit.hi_db = hi_db;
    std::vector<double> xs, ys;
    int in_window = 0, censored = 0;
    for (const auto& p : curve.points) {
        if (p.snr_db < lo_db - 1e-9 || p.snr_db > hi_db + 1e-9)
            continue;
        ++in_window;
        if (p.censored || !(p.outage > 0.0)) {
            ++censored;
            continue;
        }
        if (p.ci_high - p.ci_low >= 0.3 * p.outage)
            continue;
        xs.push_back(p.snr_db / 10.0);
        ys.push_back(-std::log10(p.outage));
    }
    if (in_window > 0 && 2 * censored > in_window) {
        fit.reason = "censored points dominate the window";
        return fit;
    }
    fit.used = static_cast<int>(xs.size());
    if (fit.used < 4) {
        fit.reason = "fewer than 4 usable points";
        return fit;
    }
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    if ((*mx - *mn) * 10.0 < 15.0 - 1e-9) {
        fit.reason = "usable points span less than 15 dB";
        return fit;
    }
    const double n = fit.used;
    double sx = 0, sy = 0;
    for (int i = 0; i < fit.used; ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double xm = sx / n, ym = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < fit.used; ++i) {
        sxx += (xs[i] - xm) * (xs[i] - xm);
        sxy += (xs[i] - xm) * (ys[i] - ym);
    }
    fit.slope = sxy / sxx;
    fit.intercept = ym - fit.slope * xm;
    double sse = 0;
    for (int i = 0; i < fit.used; ++i) {
        const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
        sse += e * e;
    }
    fit.stderr_slope = fit.used > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    fit.ok = true;
    return fit;
}

inline FitResult slope_fit(const OutageCurve& curve)
{
    if (curve.points.empty())
        return slope_fit(curve, 0.0, 0.0);
    return slope_fit(curve, curve.points.front().snr_db, curve.points.back().snr_db);
}

// ---- Monte Carlo ----------------------------------------------------------

struct McSpec {
    Scheme scheme = Scheme::STC_SYNC;
    double r = 0.0;
    std::vector<double> snr_db;
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    ConditionalCase cond = ConditionalCase::Overall;
    Measure measure = Measure::Joint;
    SchemeContext ctx;
    int workers = 1;
};

/**
 * Monte Carlo outage over an SNR grid. Trial t always uses stream (seed, t) and
 * the same draw serves every grid point, so counts do not depend on the
 * worker partition.
 */
inline OutageCurve mc_outage(const McSpec& spec)
{
    if (spec.trials < 10000)
        throw config_error("Monte Carlo needs at least 10^4 trials");
    if (spec.snr_db.empty())
        throw config_error("empty SNR grid");
    if (spec.workers < 1)
        throw config_error("workers must be >= 1");
    spec.ctx.net.validate();
    const std::size_t np = spec.snr_db.size();
    const double var_sd = spec.ctx.net.var(Link::SD);
    std::vector<RatePoint> rp(np);
    std::vector<DecodingSetProbs> probs(np);
    for (std::size_t i = 0; i < np; ++i) {
        rp[i] = RatePoint::make(db_to_linear(spec.snr_db[i]), spec.r, var_sd, spec.ctx.net.relay_count);
        probs[i] = decoding_set_probs(rp[i], spec.ctx.net.lambda(Link::SR1), spec.ctx.net.lambda(Link::SR2));
    }
    const bool forced = spec.measure == Measure::Conditional && spec.cond != ConditionalCase::Overall;
    const int want = case_size(spec.cond);

    auto run = [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& counts) {
        counts.assign(np, 0);
        for (std::uint64_t t = begin; t < end; ++t) {
            CounterRng rng(spec.seed, t);
            const FadingRealization f = sample_fading(rng, spec.ctx.net);
            const double pick = rng.uniform();
            for (std::size_t i = 0; i < np; ++i) {
                DecodingSet d;
                if (forced) {
                    if (want == 2) {
                        d = DecodingSet::both();
                    } else if (want == 1) {
                        const double p1 = probs[i].only_r1, p2 = probs[i].only_r2;
                        const double share = (p1 + p2 > 0.0) ? p1 / (p1 + p2) : 0.5;
                        d = pick < share ? DecodingSet{true, false} : DecodingSet{false, true};
                    }
                } else {
                    d = decoding_set(f, rp[i]);
                    if (want >= 0 && d.size() != want)
                        continue;
                }
                if (scheme_mi(spec.scheme, f, d, spec.ctx, rp[i].rho0) < rp[i].R)
                    ++counts[i];
            }
        }
    };

    const int workers = static_cast<int>(std::min<std::uint64_t>(spec.workers, spec.trials));
    std::vector<std::vector<std::uint64_t>> partial(workers);
    if (workers == 1) {
        run(0, spec.trials, partial[0]);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const std::uint64_t b = spec.trials * w / workers;
            const std::uint64_t e = spec.trials * (w + 1) / workers;
            pool.emplace_back(run, b, e, std::ref(partial[w]));
        }
        for (auto& th : pool)
            th.join();
    }

    OutageCurve curve;
    curve.scheme = spec.scheme;
    curve.r = spec.r;
    curve.cond = spec.cond;
    curve.measure = spec.measure;
    for (std::size_t i = 0; i < np; ++i) {
        std::uint64_t k = 0;
        for (const auto& c : partial)
            k += c[i];
        OutagePoint p;
        p.snr_db = spec.snr_db[i];
        p.trials = spec.trials;
        p.events = k;
        p.outage = static_cast<double>(k) / spec.trials;
        if (k == 0) {
            p.censored = true;
            p.ci_low = 0.0;
            p.ci_high = std::min(1.0, 3.0 / spec.trials);
        } else {
            std::tie(p.ci_low, p.ci_high) = wilson_interval(k, spec.trials);
        }
        curve.points.push_back(p);
    }
    return curve;
}

// ---- semi-analytic oracles ------------------------------------------------

/// Result of a semi-analytic outage evaluation.
struct AnalyticOutage {
    double set_prob = 1.0;     // Pr[|D| = k] (1 for overall)
    double conditional = 0.0;  // Pr[I < R | |D| = k]
    double joint = 0.0;        // Pr[I < R, |D| = k]
    bool converged = true;

    double value(Measure m) const { return m == Measure::Joint ? joint : conditional; }
};

namespace detail {

/// Pr[ln(1 + rho X) < l] for X ~ Exp(lambda).
inline double log_cdf(double lambda, double rho, double l)
{
    if (l <= 0.0)
        return 0.0;
    return -std::expm1(-lambda * std::expm1(l) / rho);
}

/// Density of S = ln(1 + rho X) for X ~ Exp(lambda).
inline double log_pdf(double lambda, double rho, double s)
{
    return lambda / rho * std::exp(s - lambda * std::expm1(s) / rho);
}

/// Density of Y1 + Y2 for independent exponentials (rates l1, l2), stable near l1 = l2.
inline double hypoexp_pdf(double l1, double l2, double y)
{
    if (y < 0.0)
        return 0.0;
    const double lo = std::min(l1, l2);
    const double delta = std::abs(l1 - l2);
    const double shape = delta * y > 1e-300 ? -std::expm1(-delta * y) / delta : y;
    return l1 * l2 * std::exp(-lo * y) * shape;
}

/// Integral on [0, L] with a convergence check between `panels` and 2*`panels`.
template <class F>
double checked_integral(F&& f, double L, int panels, bool& converged)
{
    if (L <= 0.0)
        return 0.0;
    const double coarse = quad::gauss_legendre(f, 0.0, L, panels);
    const double fine = quad::gauss_legendre(f, 0.0, L, 2 * panels);
    if (std::abs(fine - coarse) > 1e-7 * std::abs(fine) + 1e-300)
        converged = false;
    return fine;
}

struct OracleSetup {
    double rho = 0.0;
    double L = 0.0;  // natural-log threshold 2 R ln 2
    double l_sd = 1.0, l_sr1 = 1.0, l_sr2 = 1.0, l_r1d = 1.0, l_r2d = 1.0;
    DecodingSetProbs probs;
};

inline OracleSetup oracle_setup(double snr, double r, const NetworkConfig& net)
{
    net.validate();
    const RatePoint p = RatePoint::make(snr, r, net.var(Link::SD), net.relay_count);
    OracleSetup s;
    s.rho = p.rho0;
    s.L = 2.0 * p.R * std::numbers::ln2;
    s.l_sd = net.lambda(Link::SD);
    s.l_sr1 = net.lambda(Link::SR1);
    s.l_sr2 = net.lambda(Link::SR2);
    s.l_r1d = net.lambda(Link::R1D);
    s.l_r2d = net.lambda(Link::R2D);
    s.probs = decoding_set_probs(p, s.l_sr1, s.l_sr2);
    return s;
}

inline constexpr int oracle_panels = 48;

/// Pr[S_sd + S_relay < L] for a single relay link with rate l_rd.
inline double two_path_outage(const OracleSetup& s, double l_rd, bool& conv)
{
    auto g = [&](double t) { return log_pdf(l_rd, s.rho, t) * log_cdf(s.l_sd, s.rho, s.L - t); };
    return checked_integral(g, s.L, oracle_panels, conv);
}

/// Assemble conditional/joint values from per-set conditionals.
inline AnalyticOutage assemble(const OracleSetup& s, ConditionalCase cond, double c0, double c1_r1, double c1_r2,
                               double c2, bool conv)
{
    AnalyticOutage out;
    out.converged = conv;
    const double p1 = s.probs.only_r1, p2 = s.probs.only_r2;
    const double joint1 = p1 * c1_r1 + p2 * c1_r2;
    const double cond1 = (p1 + p2 > 0.0) ? joint1 / (p1 + p2) : 0.5 * (c1_r1 + c1_r2);
    switch (cond) {
    case ConditionalCase::D0:
        out.set_prob = s.probs.none;
        out.conditional = c0;
        out.joint = s.probs.none * c0;
        break;
    case ConditionalCase::D1:
        out.set_prob = p1 + p2;
        out.conditional = cond1;
        out.joint = joint1;
        break;
    case ConditionalCase::D2:
        out.set_prob = s.probs.both;
        out.conditional = c2;
        out.joint = s.probs.both * c2;
        break;
    default:
        out.set_prob = 1.0;
        out.joint = s.probs.none * c0 + joint1 + s.probs.both * c2;
        out.conditional = out.joint;
        break;
    }
    return out;
}

} // namespace detail

/// Synchronous STC outage through the exponential-sum densities.
inline AnalyticOutage analytic_outage_stc(double snr, double r, const NetworkConfig& net, ConditionalCase cond)
{
    using namespace detail;
    const OracleSetup s = oracle_setup(snr, r, net);
    bool conv = true;
    const bool need0 = cond == ConditionalCase::D0 || cond == ConditionalCase::Overall;
    const bool need1 = cond == ConditionalCase::D1 || cond == ConditionalCase::Overall;
    const bool need2 = cond == ConditionalCase::D2 || cond == ConditionalCase::Overall;
    const double c0 = need0 ? log_cdf(s.l_sd, s.rho, s.L) : 0.0;
    const double c11 = need1 ? two_path_outage(s, s.l_r1d, conv) : 0.0;
    const double c12 = need1 ? two_path_outage(s, s.l_r2d, conv) : 0.0;
    double c2 = 0.0;
    if (need2) {
        // density of ln(1 + rho (Y1 + Y2))
        auto g = [&](double t) {
            const double y = std::expm1(t) / s.rho;
            return hypoexp_pdf(s.l_r1d, s.l_r2d, y) * std::exp(t) / s.rho * log_cdf(s.l_sd, s.rho, s.L - t);
        };
        c2 = checked_integral(g, s.L, oracle_panels, conv);
    }
    return assemble(s, cond, c0, c11, c12, c2, conv);
}

/**
 * ASTC outage with mutually orthogonal shifts: the relay phase is two parallel
 * paths, so |D| = 2 is a three-path sum S_sd + S_1 + S_2 < L.
 */
inline AnalyticOutage analytic_outage_astc_parallel(double snr, double r, const NetworkConfig& net,
                                                    ConditionalCase cond)
{
    using namespace detail;
    if (cond == ConditionalCase::D0 || cond == ConditionalCase::D1)
        return analytic_outage_stc(snr, r, net, cond);
    const OracleSetup s = oracle_setup(snr, r, net);
    auto p12 = [&](double l) {
        auto inner = [&](double t) { return log_pdf(s.l_r1d, s.rho, t) * log_cdf(s.l_sd, s.rho, l - t); };
        return l > 0.0 ? quad::gauss_legendre(inner, 0.0, l, 24) : 0.0;
    };
    auto outer = [&](double t) { return log_pdf(s.l_r2d, s.rho, t) * p12(s.L - t); };
    double c2 = 0.0;
    bool conv = true;
    if (s.L > 0.0) {
        const double coarse = quad::gauss_legendre(outer, 0.0, s.L, 12);
        c2 = quad::gauss_legendre(outer, 0.0, s.L, 24);
        conv = std::abs(c2 - coarse) <= 1e-6 * std::abs(c2) + 1e-300;
    }
    if (cond == ConditionalCase::D2)
        return assemble(s, cond, 0.0, 0.0, 0.0, c2, conv);
    // |D| = 0 and |D| = 1 terms coincide with the synchronous ones for orthogonal shifts
    const AnalyticOutage d0 = analytic_outage_stc(snr, r, net, ConditionalCase::D0);
    const AnalyticOutage d1 = analytic_outage_stc(snr, r, net, ConditionalCase::D1);
    AnalyticOutage out;
    out.converged = conv && d0.converged && d1.converged;
    out.joint = d0.joint + d1.joint + s.probs.both * c2;
    out.conditional = out.joint;
    return out;
}

struct TdaOracleOptions {
    int panels = 12;        // GL panels per relay-gain axis
    int phase_points = 8;   // trapezoid nodes over the relative phase
};

/**
 * Delay-diversity outage (independent or repetition coding). The |D| = 2 term is a
 * (s1, s2, phase) tensor integral; the direct-link gain is integrated in closed form
 * through its exponential CDF at the threshold where the MI reaches R.
 */
inline AnalyticOutage analytic_outage_tda(Scheme scheme, double snr, double r, const NetworkConfig& net,
                                          const DelayConfig& delays, ConditionalCase cond,
                                          const TdaOracleOptions& opt = {})
{
    using namespace detail;
    if (scheme != Scheme::TDA_INDEP && scheme != Scheme::TDA_REPETITION)
        throw config_error("analytic delay-diversity oracle supports TDA_INDEP and TDA_REPETITION");
    const double P = delays.t0_bw();
    const double delta1 = delays.delta1();
    if (!(delta1 > 0.0))
        throw config_error("analytic delay-diversity oracle needs T0*Bw >= 1");
    const OracleSetup s = oracle_setup(snr, r, net);
    bool conv = true;
    const bool rep = scheme == Scheme::TDA_REPETITION;
    const bool need1 = cond == ConditionalCase::D1 || cond == ConditionalCase::Overall;
    const bool need2 = cond == ConditionalCase::D2 || cond == ConditionalCase::Overall;
    const double c0 = log_cdf(s.l_sd, s.rho, s.L);

    double c11 = 0.0, c12 = 0.0;
    if (need1) {
        if (!rep) {
            c11 = two_path_outage(s, s.l_r1d, conv);
            c12 = two_path_outage(s, s.l_r2d, conv);
        } else {
            // X + Y < expm1(L)/rho
            const double tsum = std::expm1(s.L) / s.rho;
            auto single = [&](double l_rd) {
                auto g = [&](double t) {
                    const double y = std::expm1(t) / s.rho;
                    return log_pdf(l_rd, s.rho, t) * -std::expm1(-s.l_sd * std::max(0.0, tsum - y));
                };
                return checked_integral(g, s.L, oracle_panels, conv);
            };
            c11 = single(s.l_r1d);
            c12 = single(s.l_r2d);
        }
    }

    double c2 = 0.0;
    if (need2 && s.L > 0.0) {
        const double smax = s.L / delta1 + std::numbers::ln2;
        const bool integer_span = P == std::floor(P);
        const int nphi = integer_span ? 1 : std::max(1, opt.phase_points);
        const double target = s.L / std::numbers::ln2;  // 2R in bits

        auto relay_term = [&](double y1, double y2, double extra, double phi) {
            const double A = 1.0 + s.rho * (extra + y1 + y2);
            const double B = 2.0 * s.rho * std::sqrt(y1 * y2);
            const double amb = 1.0 + s.rho * (extra + std::pow(std::sqrt(y1) - std::sqrt(y2), 2));
            return mean_log_cos(A, B, amb, phi, P);
        };

        auto cond_prob = [&](double y1, double y2, double phi) -> double {
            if (!rep) {
                const double J = relay_term(y1, y2, 0.0, phi);
                const double l = s.L - J * std::numbers::ln2;
                return log_cdf(s.l_sd, s.rho, l);
            }
            // repetition: find s0 with mean log2(1 + rho x + ...) = 2R
            auto h = [&](double s0) { return relay_term(y1, y2, std::expm1(s0) / s.rho, phi) - target; };
            if (h(0.0) >= 0.0)
                return 0.0;
            if (h(s.L) < 0.0)
                return log_cdf(s.l_sd, s.rho, s.L);
            std::uintmax_t iters = 100;
            const auto root = boost::math::tools::toms748_solve(h, 0.0, s.L, boost::math::tools::eps_tolerance<double>(44),
                                                                iters);
            return log_cdf(s.l_sd, s.rho, 0.5 * (root.first + root.second));
        };

        using rule = boost::math::quadrature::gauss<double, quad::panel_order>;
        std::vector<double> nodes, weights;
        {
            const auto& x = rule::abscissa();
            const auto& w = rule::weights();
            const double h = smax / opt.panels;
            for (int p = 0; p < opt.panels; ++p) {
                const double mid = (p + 0.5) * h;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    if (x[i] == 0.0) {
                        nodes.push_back(mid);
                        weights.push_back(w[i] * 0.5 * h);
                        continue;
                    }
                    nodes.push_back(mid - 0.5 * h * x[i]);
                    weights.push_back(w[i] * 0.5 * h);
                    nodes.push_back(mid + 0.5 * h * x[i]);
                    weights.push_back(w[i] * 0.5 * h);
                }
            }
        }
        const std::size_t nn = nodes.size();
        std::vector<double> dens1(nn), dens2(nn), gain(nn);
        for (std::size_t i = 0; i < nn; ++i) {
            gain[i] = std::expm1(nodes[i]) / s.rho;
            dens1[i] = log_pdf(s.l_r1d, s.rho, nodes[i]) * weights[i];
            dens2[i] = log_pdf(s.l_r2d, s.rho, nodes[i]) * weights[i];
        }
        // rows are independent; a fixed row order keeps the sum reproducible
        std::vector<double> rows(nn, 0.0);
        auto do_rows = [&](std::size_t b, std::size_t e) {
            for (std::size_t i = b; i < e; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < nn; ++j) {
                    // cheap exclusion: the Delta1 lower bound already clears the target
                    const double nu = gain[i] + gain[j];
                    if (delta1 * std::log2(0.5 * (1.0 + s.rho * nu)) >= target)
                        continue;
                    double ph = 0.0;
                    for (int k = 0; k < nphi; ++k)
                        ph += cond_prob(gain[i], gain[j], 2.0 * std::numbers::pi * k / nphi);
                    acc += dens2[j] * ph / nphi;
                }
                rows[i] = dens1[i] * acc;
            }
        };
        const unsigned hw = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < hw; ++w)
            pool.emplace_back(do_rows, nn * w / hw, nn * (w + 1) / hw);
        for (auto& th : pool)
            th.join();
        for (double v : rows)
            c2 += v;
    }
    return assemble(s, cond, c0, c11, c12, c2, conv);
}

/// Analytic curve over an SNR grid (trials = 0, zero-width intervals).
template <class Oracle>
OutageCurve analytic_curve(Scheme scheme, double r, const std::vector<double>& snr_db, ConditionalCase cond,
                           Measure measure, Oracle&& oracle)
{
    OutageCurve curve;
    curve.scheme = scheme;
    curve.r = r;
    curve.cond = cond;
    curve.measure = measure;
    for (double db : snr_db) {
        const AnalyticOutage a = oracle(db_to_linear(db));
        if (!a.converged)
            throw numeric_error("outage quadrature did not converge at " + std::to_string(db) + " dB");
        OutagePoint p;
        p.snr_db = db;
        p.outage = a.value(measure);
        p.ci_low = p.ci_high = p.outage;
        p.censored = !(p.outage > 0.0);
        curve.points.push_back(p);
    }
    return curve;
}

} // namespace relaydmt
