// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <relaydmt/outage.hpp>

#include "support.hpp"

using namespace relaydmt;
using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double ln2 = std::numbers::ln2;

std::vector<double> grid(double lo, double hi, double step)
{
    std::vector<double> g;
    for (double x = lo; x <= hi + 1e-9; x += step)
        g.push_back(x);
    return g;
}

// Pr[(1 + rho X)(1 + rho Y) < 2^{2R}] with X ~ Exp(lx) and density py of Y, integrated directly in y.
template <class Py>
double product_outage(double rho, double R, double lx, Py py)
{
    const double g = std::exp2(2 * R);
    const double ymax = (g - 1) / rho;
    auto f = [&](double y) {
        const double xmax = (g / (1 + rho * y) - 1) / rho;
        return py(y) * -std::expm1(-lx * std::max(0.0, xmax));
    };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, ymax, 15, 1e-13);
}

AnalyticOutage stc(double snr_db, double r, ConditionalCase c, const NetworkConfig& net = {})
{
    return analytic_outage_stc(db_to_linear(snr_db), r, net, c);
}

FitResult analytic_slope(Scheme scheme, double r, ConditionalCase c, Measure m, double lo, double hi)
{
    const NetworkConfig net;
    auto oracle = [&](double snr) {
        switch (scheme) {
        case Scheme::ASTC:
        case Scheme::MIX_AF: return analytic_outage_astc_parallel(snr, r, net, c);
        default: return analytic_outage_stc(snr, r, net, c);
        }
    };
    return slope_fit(analytic_curve(scheme, r, grid(lo, hi, 5), c, m, oracle));
}

OutageCurve synthetic(std::vector<double> db, auto law)
{
    OutageCurve c;
    for (double x : db) {
        OutagePoint p;
        p.snr_db = x;
        p.outage = law(db_to_linear(x));
        p.ci_low = p.ci_high = p.outage;
        c.points.push_back(p);
    }
    return c;
}

McSpec mc_spec(Scheme s, double r, ConditionalCase c, Measure m, std::uint64_t trials = 100000)
{
    McSpec spec;
    spec.scheme = s;
    spec.r = r;
    spec.snr_db = grid(0, 15, 5);
    spec.trials = trials;
    spec.seed = 2024;
    spec.cond = c;
    spec.measure = m;
    return spec;
}

void expect_within_3sigma(const OutageCurve& mc, const std::vector<double>& exact, const std::string& what)
{
    ASSERT_EQ(mc.points.size(), exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double p = exact[i];
        const double sigma = std::sqrt(p * (1 - p) / mc.points[i].trials);
        EXPECT_NEAR(mc.points[i].outage, p, 3 * sigma + 1e-12) << what << " at " << mc.points[i].snr_db << " dB";
    }
}

const ConditionalCase all_cases[] = {ConditionalCase::D0, ConditionalCase::D1, ConditionalCase::D2,
                                     ConditionalCase::Overall};

} // namespace

TEST(Wilson, KnownInterval)
{
    // 5 of 100 at 95%: textbook Wilson interval (0.02154, 0.11175)
    const auto [lo, hi] = wilson_interval(5, 100);
    EXPECT_NEAR(lo, 0.021543, 1e-6);
    EXPECT_NEAR(hi, 0.111750, 1e-6);
    for (std::uint64_t k : {0, 1, 50, 99, 100}) {
        const auto [a, b] = wilson_interval(k, 100);
        EXPECT_LE(a, k / 100.0 + 1e-15);
        EXPECT_GE(b, k / 100.0 - 1e-15);
    }
}

TEST(McOutage, DirectLinkMatchesExponentialCdf)
{
    for (double r : {0.1, 0.25}) {
        const auto curve = mc_outage(mc_spec(Scheme::STC_SYNC, r, ConditionalCase::D0, Measure::Conditional));
        std::vector<double> exact;
        for (double db : grid(0, 15, 5)) {
            const auto p = RatePoint::make(db_to_linear(db), r, 1.0);
            exact.push_back(-std::expm1(-(std::exp2(2 * p.R) - 1) / p.rho0));
        }
        expect_within_3sigma(curve, exact, "r=" + std::to_string(r));
    }
}

TEST(McOutage, ZeroRateIsCensored)
{
    const auto curve = mc_outage(mc_spec(Scheme::STC_SYNC, 0.0, ConditionalCase::Overall, Measure::Joint, 10000));
    for (const auto& p : curve.points) {
        EXPECT_EQ(p.outage, 0.0);
        EXPECT_TRUE(p.censored);
        EXPECT_EQ(p.ci_low, 0.0);
        EXPECT_DOUBLE_EQ(p.ci_high, 3.0 / 10000);
    }
    EXPECT_FALSE(slope_fit(curve).ok);
}

TEST(McOutage, WorkerCountDoesNotChangeResult)
{
    auto spec = mc_spec(Scheme::TDA_INDEP, 0.2, ConditionalCase::Overall, Measure::Joint, 20000);
    spec.ctx.delays = DelayConfig::from_product(2.5);
    const auto a = mc_outage(spec);
    spec.workers = 8;
    const auto b = mc_outage(spec);
    spec.workers = 3;
    const auto c = mc_outage(spec);
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].events, b.points[i].events);
        EXPECT_EQ(a.points[i].events, c.points[i].events);
    }
}

TEST(McOutage, RejectsTooFewTrials)
{
    EXPECT_THROW(mc_outage(mc_spec(Scheme::STC_SYNC, 0.2, ConditionalCase::Overall, Measure::Joint, 9999)),
                 config_error);
}

TEST(Oracle, LogCdfExample)
{
    EXPECT_NEAR(detail::log_cdf(1.0, 1.0, 2 * ln2), 1 - std::exp(-3.0), 1e-15);
    EXPECT_NEAR(detail::log_cdf(1.0, 1.0, 2 * ln2), 0.950213, 1e-6);
    const auto a = stc(0.0, 0.0, ConditionalCase::D0);
    EXPECT_EQ(a.conditional, 0.0);
}

TEST(Oracle, HypoexponentialNormalised)
{
    for (auto [l1, l2] : {std::pair{2.0, 1.0}, std::pair{1.0, 1.0}, std::pair{1.0, 1.0 + 1e-9}}) {
        const double total = gauss_kronrod<double, 61>::integrate(
            [&](double y) { return detail::hypoexp_pdf(l1, l2, y); }, 0.0, std::numeric_limits<double>::infinity(), 15,
            1e-14);
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
    for (double y : {0.1, 1.0, 7.0})
        EXPECT_NEAR(detail::hypoexp_pdf(2.0, 1.0, y), 2.0 * (std::exp(-y) - std::exp(-2 * y)), 1e-15);
}

TEST(Oracle, StcMatchesDirectIntegration)
{
    NetworkConfig net;
    net.variance = {1.0, 0.8, 1.3, 2.0, 0.5};
    for (double db : {0.0, 10.0, 25.0})
        for (double r : {0.1, 0.3}) {
            const auto p = RatePoint::make(db_to_linear(db), r, 1.0);
            const double rho = p.rho0;
            const double l1 = net.lambda(Link::R1D), l2 = net.lambda(Link::R2D);
            auto exp_pdf = [](double l) { return [l](double y) { return l * std::exp(-l * y); }; };
            const double d1a = product_outage(rho, p.R, 1.0, exp_pdf(l1));
            const double d1b = product_outage(rho, p.R, 1.0, exp_pdf(l2));
            const double d2 = product_outage(rho, p.R, 1.0, [&](double y) {
                return l1 * l2 / (l1 - l2) * (std::exp(-l2 * y) - std::exp(-l1 * y));
            });
            const auto probs = decoding_set_probs(p, net.lambda(Link::SR1), net.lambda(Link::SR2));
            const double tol = 1e-9;
            EXPECT_NEAR(stc(db, r, ConditionalCase::D2, net).conditional, d2, tol * std::max(d2, 1e-3));
            EXPECT_NEAR(stc(db, r, ConditionalCase::D1, net).joint, probs.only_r1 * d1a + probs.only_r2 * d1b,
                        tol * std::max(d1a, 1e-3));
            const double overall = probs.none * -std::expm1(-(std::exp2(2 * p.R) - 1) / rho) + probs.only_r1 * d1a +
                                   probs.only_r2 * d1b + probs.both * d2;
            EXPECT_NEAR(stc(db, r, ConditionalCase::Overall, net).joint, overall, tol * std::max(overall, 1e-3));
        }
}

TEST(Oracle, EqualRatesUseLimitForm)
{
    const auto p = RatePoint::make(db_to_linear(12.0), 0.2, 1.0);
    const double d2 = product_outage(p.rho0, p.R, 1.0, [](double y) { return y * std::exp(-y); });
    EXPECT_NEAR(stc(12.0, 0.2, ConditionalCase::D2).conditional, d2, 1e-10);
}

TEST(Oracle, McAgreesForAllCasesAndMeasures)
{
    for (Measure m : {Measure::Joint, Measure::Conditional})
        for (ConditionalCase c : all_cases) {
            const auto mc = mc_outage(mc_spec(Scheme::STC_SYNC, 0.25, c, m));
            std::vector<double> exact;
            for (double db : grid(0, 15, 5))
                exact.push_back(stc(db, 0.25, c).value(m));
            expect_within_3sigma(mc, exact, std::string("STC case ") + case_name(c));
        }
}

TEST(Oracle, DelayDiversityMcAgrees)
{
    const NetworkConfig net;
    const auto delays = DelayConfig::from_product(3.0);
    for (Scheme s : {Scheme::TDA_INDEP, Scheme::TDA_REPETITION}) {
        auto spec = mc_spec(s, 0.25, ConditionalCase::D2, Measure::Conditional);
        spec.ctx.delays = delays;
        const auto mc = mc_outage(spec);
        std::vector<double> exact;
        for (double db : spec.snr_db)
            exact.push_back(analytic_outage_tda(s, db_to_linear(db), 0.25, net, delays, ConditionalCase::D2).conditional);
        expect_within_3sigma(mc, exact, scheme_name(s));
    }
    EXPECT_THROW(analytic_outage_tda(Scheme::TDA_INDEP, 10.0, 0.2, net, DelayConfig::from_product(0.5),
                                     ConditionalCase::D2),
                 config_error);
}

TEST(Oracle, AstcParallelMcAgrees)
{
    // every trial runs the spectral quadrature, so use the minimum trial count
    auto spec = mc_spec(Scheme::ASTC, 0.25, ConditionalCase::D2, Measure::Conditional, 20000);
    spec.ctx.eig = certify_pd(spec.ctx.corr, 256);
    const auto mc = mc_outage(spec);
    std::vector<double> exact;
    for (double db : spec.snr_db)
        exact.push_back(analytic_outage_astc_parallel(db_to_linear(db), 0.25, NetworkConfig{}, ConditionalCase::D2)
                            .conditional);
    expect_within_3sigma(mc, exact, "ASTC");
}

TEST(Oracle, TotalProbabilityLaw)
{
    for (double db : {0.0, 10.0, 30.0}) {
        double sum = 0.0;
        for (ConditionalCase c : {ConditionalCase::D0, ConditionalCase::D1, ConditionalCase::D2}) {
            const auto a = stc(db, 0.2, c);
            sum += a.set_prob * a.conditional;
        }
        EXPECT_NEAR(sum, stc(db, 0.2, ConditionalCase::Overall).joint, 1e-14);
    }
    // Monte Carlo: overall equals the set-weighted conditionals within the combined error
    const auto overall = mc_outage(mc_spec(Scheme::STC_SYNC, 0.2, ConditionalCase::Overall, Measure::Joint));
    std::vector<OutageCurve> parts;
    for (ConditionalCase c : {ConditionalCase::D0, ConditionalCase::D1, ConditionalCase::D2}) {
        auto spec = mc_spec(Scheme::STC_SYNC, 0.2, c, Measure::Conditional);
        spec.seed = 7000 + static_cast<int>(c);
        parts.push_back(mc_outage(spec));
    }
    for (std::size_t i = 0; i < overall.points.size(); ++i) {
        const double db = overall.points[i].snr_db;
        const auto probs = decoding_set_probs(RatePoint::make(db_to_linear(db), 0.2, 1.0), 1.0, 1.0);
        double mix = 0.0, var = 0.0;
        for (int k = 0; k < 3; ++k) {
            const double q = parts[k].points[i].outage, w = probs.by_size(k);
            mix += w * q;
            var += w * w * q * (1 - q) / parts[k].points[i].trials;
        }
        const double p = overall.points[i].outage;
        var += p * (1 - p) / overall.points[i].trials;
        EXPECT_NEAR(p, mix, 3 * std::sqrt(var)) << db << " dB";
    }
}

TEST(Oracle, MonotoneInSnrAndRate)
{
    const NetworkConfig net;
    const auto delays = DelayConfig::from_product(2.5);
    for (ConditionalCase c : all_cases) {
        double prev = 2.0;
        for (double db = 0; db <= 60; db += 5) {
            const double v = stc(db, 0.2, c).conditional;
            EXPECT_LE(v, prev + 1e-15);
            prev = v;
        }
        prev = -1.0;
        for (double r = 0.0; r < 0.5; r += 0.05) {
            const double v = stc(20, r, c).conditional;
            EXPECT_GE(v, prev - 1e-15);
            prev = v;
        }
    }
    for (Scheme s : {Scheme::TDA_INDEP, Scheme::TDA_REPETITION}) {
        double prev = 2.0;
        for (double db = 0; db <= 30; db += 10) {
            const double v =
                analytic_outage_tda(s, db_to_linear(db), 0.2, net, delays, ConditionalCase::Overall).joint;
            EXPECT_LE(v, prev + 1e-12);
            prev = v;
        }
    }
}

TEST(SlopeFit, ExactPowerLaws)
{
    const auto a = slope_fit(synthetic(grid(0, 40, 5), [](double s) { return 1.0 / (s * s); }));
    ASSERT_TRUE(a.ok);
    EXPECT_NEAR(a.slope, 2.0, 1e-6);
    const double r = 0.25;
    const auto b = slope_fit(synthetic(grid(10, 50, 10), [&](double s) { return 0.3 * std::pow(s, -3 + 6 * r); }));
    ASSERT_TRUE(b.ok);
    EXPECT_NEAR(b.slope, 1.5, 1e-9);
    EXPECT_NEAR(b.stderr_slope, 0.0, 1e-9);
}

TEST(SlopeFit, Refusals)
{
    EXPECT_FALSE(slope_fit(synthetic(grid(0, 10, 5), [](double s) { return 1 / s; })).ok);  // 3 points
    auto narrow = slope_fit(synthetic(grid(0, 12, 3), [](double s) { return 1 / s; }));
    EXPECT_FALSE(narrow.ok);
    EXPECT_EQ(narrow.reason, "usable points span less than 15 dB");

    auto c = synthetic(grid(0, 35, 5), [](double s) { return 1 / s; });
    for (int i = 3; i < 8; ++i) {
        c.points[i].outage = 0.0;
        c.points[i].censored = true;
    }
    const auto f = slope_fit(c);
    EXPECT_FALSE(f.ok);
    EXPECT_EQ(f.reason, "censored points dominate the window");

    auto wide = synthetic(grid(0, 35, 5), [](double s) { return 1 / s; });
    for (auto& p : wide.points) {
        p.ci_low = 0.8 * p.outage;
        p.ci_high = 1.2 * p.outage;  // width 0.4 of the estimate
    }
    EXPECT_FALSE(slope_fit(wide).ok);
}

TEST(Slopes, SynchronousOverallNearTheory)
{
    const auto fit = analytic_slope(Scheme::STC_SYNC, 0.1, ConditionalCase::Overall, Measure::Joint, 40, 80);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.slope, 3 * (1 - 2 * 0.1), 0.15);
}

class ConditionalRows : public ::testing::TestWithParam<double> {};

TEST_P(ConditionalRows, NoRelayDecodes)
{
    const double r = GetParam();
    const auto fit = analytic_slope(Scheme::STC_SYNC, r, ConditionalCase::D0, Measure::Joint, 40, 80);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.slope, 3 - 6 * r, 0.15);
}

TEST_P(ConditionalRows, OneRelayDecodes)
{
    const double r = GetParam();
    const auto fit = analytic_slope(Scheme::STC_SYNC, r, ConditionalCase::D1, Measure::Joint, 40, 80);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.slope, 3 - 4 * r, 0.15);
}

TEST_P(ConditionalRows, BothRelaysDecodeSynchronous)
{
    const double r = GetParam();
    const auto fit = analytic_slope(Scheme::STC_SYNC, r, ConditionalCase::D2, Measure::Joint, 40, 80);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.slope, 3 - 4 * r, 0.15);
}

TEST_P(ConditionalRows, BothRelaysDecodeAsynchronous)
{
    const double r = GetParam();
    const auto fit = analytic_slope(Scheme::ASTC, r, ConditionalCase::D2, Measure::Conditional, 40, 80);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.slope, 3 - 2 * r, 0.15);
}

TEST_P(ConditionalRows, OrderedByDecodingSetSize)
{
    const double r = GetParam();
    const double s0 = analytic_slope(Scheme::STC_SYNC, r, ConditionalCase::D0, Measure::Joint, 40, 80).slope;
    const double s1 = analytic_slope(Scheme::STC_SYNC, r, ConditionalCase::D1, Measure::Joint, 40, 80).slope;
    const double s2 = analytic_slope(Scheme::ASTC, r, ConditionalCase::D2, Measure::Conditional, 40, 80).slope;
    EXPECT_LE(s0, s1);
    EXPECT_LE(s1, s2);
}

INSTANTIATE_TEST_SUITE_P(Rates, ConditionalRows, ::testing::Values(0.1, 0.2));

TEST(Slopes, RepetitionContainment)
{
    const NetworkConfig net;
    const double r = 0.1;
    for (double p : {2.5, 3.0}) {
        const auto delays = DelayConfig::from_product(p);
        auto oracle = [&](double snr) {
            return analytic_outage_tda(Scheme::TDA_REPETITION, snr, r, net, delays, ConditionalCase::D2);
        };
        const auto fit = slope_fit(analytic_curve(Scheme::TDA_REPETITION, r, grid(40, 80, 10), ConditionalCase::D2,
                                                  Measure::Conditional, oracle));
        ASSERT_TRUE(fit.ok);
        const double d1 = delays.delta1();
        EXPECT_GE(fit.slope, 3 - 6 * r / d1 - 0.2) << p;
        EXPECT_LE(fit.slope, 3 - 6 * r + 0.2) << p;
    }
}

TEST(Mixing, BranchesAndDelegation)
{
    SchemeContext ctx;
    ctx.corr = correlations(truncated_srrc(0.5, 2), 0.3);
    ctx.eig = certify_pd(ctx.corr, 1024);
    const auto f = relaydmt::testing::draw(17, 4);
    const double rho = 20.0;
    const auto both = mixing_protocol_mi(f, DecodingSet::both(), ctx, rho);
    EXPECT_EQ(both.branch, "astc");
    EXPECT_EQ(both.mi, i_astc(f, DecodingSet::both(), ctx.corr, ctx.eig, rho).value);
    EXPECT_EQ(mixing_protocol_mi(f, DecodingSet{}, ctx, rho).branch, "af_one_relay");
    EXPECT_EQ(mixing_protocol_mi(f, DecodingSet{true, false}, ctx, rho).branch, "df_r1_af_r2");
    EXPECT_EQ(mixing_protocol_mi(f, DecodingSet{false, true}, ctx, rho).branch, "df_r2_af_r1");

    FadingRealization dead = f;
    dead.r1d = dead.r2d = 0.0;
    const double direct = 0.5 * std::log2(1 + rho * std::norm(f.sd));
    EXPECT_NEAR(mixing_protocol_mi(dead, DecodingSet{}, ctx, rho).mi, direct, 1e-14);
    EXPECT_NEAR(mixing_protocol_mi(dead, DecodingSet{true, false}, ctx, rho).mi, direct, 1e-14);
}

TEST(Mixing, BothDecodeSlopeForPdWaveform)
{
    const double r = 0.2;
    const auto fit = analytic_slope(Scheme::MIX_AF, r, ConditionalCase::D2, Measure::Conditional, 40, 80);
    ASSERT_TRUE(fit.ok);
    EXPECT_NEAR(fit.slope, 3 - 2 * r, 0.15);
}
