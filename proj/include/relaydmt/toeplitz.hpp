// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <lapacke.h>

#include "errors.hpp"
#include "mutualinfo.hpp"
#include "waveform.hpp"

namespace relaydmt {

/// Default memory guard on the number of blocks.
inline constexpr int default_block_cap = 4096;

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<cplx, 4>;

inline Mat2 adjoint(const Mat2& m)
{
    return {std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])};
}

/**
 * ISI taps H_E(k), k = 0..L (negative lags follow from H_E(-k) = H_E(k)^H).
 * Entry (j, l) of H_E(k) couples relay j at block i+k with relay l at block i.
 */
struct IsiTapSet {
    std::vector<Mat2> taps;

    int max_lag() const { return static_cast<int>(taps.size()) - 1; }

    Mat2 at(int k) const
    {
        if (std::abs(k) > max_lag())
            return Mat2{};
        return k >= 0 ? taps[k] : adjoint(taps[-k]);
    }
};

inline IsiTapSet build_taps(const CorrelationSet& corr, cplx a1, cplx a2)
{
    IsiTapSet t;
    const int L = corr.span;
    t.taps.resize(L + 1);
    const double g1 = std::norm(a1);
    const double g2 = std::norm(a2);
    for (int k = 0; k <= L; ++k) {
        Mat2& h = t.taps[k];
        h[0] = corr.autoc(k) * g1;
        h[1] = corr.cross(k) * std::conj(a1) * a2;
        h[2] = corr.cross(-k) * std::conj(a2) * a1;
        h[3] = corr.autoc(k) * g2;
    }
    // the k = 0 block is Hermitian by construction: cross(0) is real
    // drop trailing all-zero taps so the band stays as narrow as possible
    while (t.taps.size() > 1) {
        const Mat2& h = t.taps.back();
        if (std::abs(h[0]) + std::abs(h[1]) + std::abs(h[2]) + std::abs(h[3]) != 0.0)
            break;
        t.taps.pop_back();
    }
    return t;
}

/// Entry (row, col) of the 2n x 2n block matrix in interleaved ordering (2*block + relay).
inline cplx block_entry(const IsiTapSet& t, int row, int col)
{
    const int bk = row / 2, jr = row % 2;
    const int bl = col / 2, jc = col % 2;
    return t.at(bk - bl)[2 * jr + jc];
}

/// Dense column-major copy of the block matrix (tests and small n).
inline std::vector<cplx> dense_block_matrix(const IsiTapSet& t, int n)
{
    const int N = 2 * n;
    std::vector<cplx> a(static_cast<std::size_t>(N) * N);
    for (int c = 0; c < N; ++c)
        for (int r = 0; r < N; ++r)
            a[static_cast<std::size_t>(c) * N + r] = block_entry(t, r, c);
    return a;
}

/// Eigenvalues (ascending) of the 2n x 2n Hermitian banded block matrix.
inline std::vector<double> block_eigenvalues(const IsiTapSet& t, int n, int cap = default_block_cap)
{
    if (n < 1)
        throw config_error("block count must be >= 1");
    if (n > cap)
        throw config_error("block count " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
    const int N = 2 * n;
    const int kd = std::min(N - 1, 2 * t.max_lag() + 1);
    const int ldab = kd + 1;
    // upper band storage: ab[kd + i - j + j * ldab] = A(i, j)
    std::vector<lapack_complex_double> ab(static_cast<std::size_t>(ldab) * N);
    for (int j = 0; j < N; ++j) {
        for (int i = std::max(0, j - kd); i <= j; ++i) {
            const cplx v = block_entry(t, i, j);
            ab[static_cast<std::size_t>(kd + i - j) + static_cast<std::size_t>(j) * ldab] =
                lapack_make_complex_double(v.real(), v.imag());
        }
    }
    std::vector<double> w(N);
    const lapack_int info =
        LAPACKE_zhbev(LAPACK_COL_MAJOR, 'N', 'U', N, kd, ab.data(), ldab, w.data(), nullptr, 1);
    if (info != 0)
        throw numeric_error("banded Hermitian eigensolver failed, info=" + std::to_string(info));
    return w;
}

/// (1/n) sum_k log2(1 + rho0 nu_k) over the 2n eigenvalues.
inline double finite_n_mi(const IsiTapSet& t, int n, double rho0, int cap = default_block_cap)
{
    const std::vector<double> w = block_eigenvalues(t, n, cap);
    double s = 0.0;
    for (double v : w)
        s += std::log1p(rho0 * std::max(v, 0.0));
    return s / (n * std::numbers::ln2);
}

struct ConvergencePoint {
    int n = 0;
    double mi = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
};

struct ConvergenceStudy {
    double mi_inf = 0.0;
    std::vector<ConvergencePoint> points;
    bool converged = false;  // relative error at the largest n below `tolerance`
    int inversions = 0;      // times the error grew from one n to the next
};

/// Finite-n MI against the spectral limit on one realization.
inline ConvergenceStudy convergence_study(const CorrelationSet& corr, cplx a1, cplx a2, const std::vector<int>& n_list,
                                          double rho0, int quad_points = 1024, double tolerance = 0.01,
                                          int cap = default_block_cap)
{
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw config_error("n_list must be strictly ascending");
    const IsiTapSet taps = build_taps(corr, a1, a2);
    const EigenBounds eig = certify_pd(corr, 256);
    ConvergenceStudy out;
    out.mi_inf = i_emaca_spectral(a1, a2, corr, eig, rho0, quad_points).value;
    for (int n : n_list) {
        ConvergencePoint p;
        p.n = n;
        p.mi = finite_n_mi(taps, n, rho0, cap);
        p.abs_err = std::abs(p.mi - out.mi_inf);
        p.rel_err = out.mi_inf > 0.0 ? p.abs_err / out.mi_inf : p.abs_err;
        if (!out.points.empty() && p.abs_err > out.points.back().abs_err)
            ++out.inversions;
        out.points.push_back(p);
    }
    out.converged = !out.points.empty() && out.points.back().rel_err < tolerance;
    return out;
}

} // namespace relaydmt
