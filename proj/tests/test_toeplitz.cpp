// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <relaydmt/toeplitz.hpp>

#include "support.hpp"

using namespace relaydmt;
using relaydmt::testing::draw;
using boost::math::quadrature::gauss_kronrod;

namespace {

double interp(const Waveform& s, double t)
{
    if (t < 0.0 || t > s.duration())
        return 0.0;
    const double u = t / s.step();
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(u), s.samples.size() - 2);
    const double f = u - k;
    return (1 - f) * s.samples[k] + f * s.samples[k + 1];
}

// Inner product of the pulses launched at times t1 and t2.
double overlap(const Waveform& s, double t1, double t2)
{
    const double lo = std::max(t1, t2), hi = std::min(t1, t2) + s.duration();
    if (hi <= lo)
        return 0.0;
    const int pieces = 2 * s.span * s.samples_per_symbol;
    double sum = 0.0;
    for (int i = 0; i < pieces; ++i) {
        const double a = lo + (hi - lo) * i / pieces, b = lo + (hi - lo) * (i + 1) / pieces;
        sum += gauss_kronrod<double, 15>::integrate(
            [&](double t) { return interp(s, t - t1) * interp(s, t - t2); }, a, b, 6, 1e-13);
    }
    return sum;
}

// Gram matrix of the relay pulse trains (block i, relay j launched at i*Ts + j*tau), weighted by gains.
Eigen::MatrixXcd gram_oracle(const Waveform& s, double tau, cplx a1, cplx a2, int n)
{
    const cplx a[2] = {a1, a2};
    Eigen::MatrixXcd G(2 * n, 2 * n);
    for (int r = 0; r < 2 * n; ++r)
        for (int c = 0; c < 2 * n; ++c) {
            const int i = r / 2, j = r % 2, k = c / 2, l = c % 2;
            G(r, c) = std::conj(a[j]) * a[l] * overlap(s, i + j * tau, k + l * tau);
        }
    return G;
}

Eigen::MatrixXcd dense(const IsiTapSet& t, int n)
{
    const auto v = dense_block_matrix(t, n);
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), 2 * n, 2 * n);
}

} // namespace

TEST(BuildTaps, OrthogonalUnitGains)
{
    const auto t = build_taps(CorrelationSet::orthogonal(2), 1.0, 1.0);
    ASSERT_EQ(t.max_lag(), 0);
    const Mat2 h0 = t.at(0);
    EXPECT_EQ(h0[0], cplx(1.0));
    EXPECT_EQ(h0[1], cplx(0.0));
    EXPECT_EQ(h0[3], cplx(1.0));
    EXPECT_EQ(t.at(1), Mat2{});
}

TEST(BuildTaps, SingleRelayHasNoCrossTerms)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    const auto t = build_taps(corr, cplx(0.6, -0.8), 0.0);
    for (int k = -2; k <= 2; ++k) {
        EXPECT_EQ(t.at(k)[1], cplx(0.0));
        EXPECT_EQ(t.at(k)[2], cplx(0.0));
    }
    EXPECT_EQ(t.at(2), Mat2{});
}

TEST(BuildTaps, HermitianPairs)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    const auto f = draw(3, 1);
    const auto t = build_taps(corr, f.r1d, f.r2d);
    for (int k = -3; k <= 3; ++k) {
        const Mat2 a = t.at(-k), b = adjoint(t.at(k));
        for (int e = 0; e < 4; ++e)
            EXPECT_LT(std::abs(a[e] - b[e]), 1e-16);
    }
}

TEST(BlockMatrix, MatchesPulseGram)
{
    const Waveform s = truncated_srrc(0.5, 2);
    const double tau = 0.3;
    const auto f = draw(4, 2);
    const int n = 6;
    const auto G = gram_oracle(s, tau, f.r1d, f.r2d, n);
    const auto T = dense(build_taps(correlations(s, tau), f.r1d, f.r2d), n);
    EXPECT_LT((G - T).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BlockMatrix, BandedEigenvaluesMatchDense)
{
    const auto corr = correlations(truncated_srrc(0.3, 3), 0.45);
    for (int t = 0; t < 5; ++t) {
        const auto f = draw(5, t);
        const auto taps = build_taps(corr, f.r1d, f.r2d);
        for (int n : {1, 2, 7, 40}) {
            const auto w = block_eigenvalues(taps, n);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense(taps, n), Eigen::EigenvaluesOnly);
            for (int k = 0; k < 2 * n; ++k)
                EXPECT_NEAR(w[k], es.eigenvalues()(k), 1e-11);
        }
    }
}

TEST(BlockMatrix, LogDetOracle)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    for (int t = 0; t < 5; ++t) {
        const auto f = draw(6, t);
        const auto taps = build_taps(corr, f.r1d, f.r2d);
        const int n = 50;
        const double rho = 25.0;
        const Eigen::MatrixXcd M = Eigen::MatrixXcd::Identity(2 * n, 2 * n) + rho * dense(taps, n);
        Eigen::LLT<Eigen::MatrixXcd> llt(M);
        ASSERT_EQ(llt.info(), Eigen::Success);
        const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
        EXPECT_NEAR(finite_n_mi(taps, n, rho), logdet / std::log(2.0) / n, 1e-11);
    }
}

TEST(BlockMatrix, PositiveSemidefinite)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    const auto rect = correlations(rectangular(), 0.5);
    for (int t = 0; t < 20; ++t) {
        const auto f = draw(7, t);
        for (const auto* c : {&corr, &rect}) {
            const auto w = block_eigenvalues(build_taps(*c, f.r1d, f.r2d), 128);
            EXPECT_GE(*std::min_element(w.begin(), w.end()), -1e-9);
        }
    }
}

TEST(FiniteN, SingleBlockExamples)
{
    const double rho = 3.0;
    EXPECT_NEAR(finite_n_mi(build_taps(CorrelationSet::orthogonal(1), 1.0, 1.0), 1, rho), 2 * std::log2(1 + rho),
                1e-14);
    const auto corr = CorrelationSet::single_symbol(0.4, 0.35);
    const cplx a1(0.9, 0.3), a2(-0.2, 1.1);
    const double g1 = std::norm(a1), g2 = std::norm(a2);
    EXPECT_NEAR(finite_n_mi(build_taps(corr, a1, a2), 1, rho),
                std::log2((1 + rho * g1) * (1 + rho * g2) - rho * rho * 0.16 * g1 * g2), 1e-13);
}

TEST(FiniteN, RejectsAboveCap)
{
    const auto taps = build_taps(CorrelationSet::orthogonal(1), 1.0, 1.0);
    EXPECT_THROW(finite_n_mi(taps, 4097, 1.0), config_error);
    EXPECT_THROW(finite_n_mi(taps, 9, 1.0, 8), config_error);
    EXPECT_THROW(finite_n_mi(taps, 0, 1.0), config_error);
}

TEST(FiniteN, RelabelInvariance)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    CorrelationSet swapped = corr;
    std::reverse(swapped.cross_lag.begin(), swapped.cross_lag.end());
    swapped.name_taps();
    for (int t = 0; t < 10; ++t) {
        const auto f = draw(8, t);
        for (int n : {3, 64})
            EXPECT_NEAR(finite_n_mi(build_taps(corr, f.r1d, f.r2d), n, 40.0),
                        finite_n_mi(build_taps(swapped, f.r2d, f.r1d), n, 40.0), 1e-10);
    }
}

TEST(Convergence, OrthogonalIsExactAtEveryN)
{
    const auto f = draw(9, 0);
    const auto st = convergence_study(CorrelationSet::orthogonal(1), f.r1d, f.r2d, {1, 8, 32}, 10.0);
    for (const auto& p : st.points)
        EXPECT_LT(p.abs_err, 1e-12);
}

TEST(Convergence, SingleRelayApproachesEsd)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    ASSERT_EQ(corr.autoc(2), 0.0);
    const cplx a(0.7, -0.9);
    const double rho = 100.0;
    const double esd = i_esd(a, corr.a1, rho).value;
    const double mi = finite_n_mi(build_taps(corr, a, 0.0), 512, rho);
    EXPECT_LT(std::abs(mi - esd) / esd, 0.01);
    const auto st = convergence_study(corr, a, 0.0, {8, 512}, rho);
    EXPECT_NEAR(st.mi_inf, esd, 1e-9);
}

TEST(Convergence, SrrcTwentyRealizations)
{
    const auto corr = correlations(truncated_srrc(0.5, 2), 0.3);
    const double rho = 10.0;
    for (int t = 0; t < 20; ++t) {
        const auto f = draw(10, t);
        const auto st = convergence_study(corr, f.r1d, f.r2d, {8, 32, 128, 512}, rho);
        EXPECT_TRUE(st.converged) << "realization " << t << " rel " << st.points.back().rel_err;
        EXPECT_LT(st.points.back().rel_err, 0.01);
        EXPECT_EQ(st.inversions, 0);
    }
    EXPECT_THROW(convergence_study(corr, 1.0, 1.0, {32, 8}, rho), config_error);
}
