// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "errors.hpp"

namespace relaydmt {

using Rational = boost::rational<std::int64_t>;

inline double to_double(const Rational& q) { return boost::rational_cast<double>(q); }

inline std::string to_string(const Rational& q)
{
    if (q.denominator() == 1)
        return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

enum class TradeoffScheme { STC_SYNC, TDA_INDEP, TDA_REPETITION, TDA_LINMOD, ASTC, MIX_AF, NAF, DDF, DF };

inline const std::vector<TradeoffScheme>& all_tradeoff_schemes()
{
    static const std::vector<TradeoffScheme> v{
        TradeoffScheme::STC_SYNC, TradeoffScheme::TDA_INDEP, TradeoffScheme::TDA_REPETITION,
        TradeoffScheme::TDA_LINMOD, TradeoffScheme::ASTC, TradeoffScheme::MIX_AF,
        TradeoffScheme::NAF, TradeoffScheme::DDF, TradeoffScheme::DF};
    return v;
}

inline const char* tradeoff_name(TradeoffScheme s)
{
    switch (s) {
    case TradeoffScheme::STC_SYNC: return "STC_SYNC";
    case TradeoffScheme::TDA_INDEP: return "TDA_INDEP";
    case TradeoffScheme::TDA_REPETITION: return "TDA_REPETITION";
    case TradeoffScheme::TDA_LINMOD: return "TDA_LINMOD";
    case TradeoffScheme::ASTC: return "ASTC";
    case TradeoffScheme::MIX_AF: return "MIX_AF";
    case TradeoffScheme::NAF: return "NAF";
    case TradeoffScheme::DDF: return "DDF";
    default: return "DF";
    }
}

inline TradeoffScheme parse_tradeoff_scheme(const std::string& name)
{
    for (TradeoffScheme s : all_tradeoff_schemes())
        if (name == tradeoff_name(s))
            return s;
    throw config_error("unknown tradeoff scheme '" + name + "'");
}

/// d(r) = (p0 + p1 r) / (q0 + q1 r) on [lo, hi].
struct Piece {
    Rational lo, hi;
    Rational p0, p1;
    Rational q0{1}, q1{0};

    Rational eval(const Rational& r) const { return (p0 + p1 * r) / (q0 + q1 * r); }
    double eval(double r) const
    {
        return (to_double(p0) + to_double(p1) * r) / (to_double(q0) + to_double(q1) * r);
    }
};

inline Piece linear(Rational lo, Rational hi, Rational a, Rational b)
{
    return {lo, hi, a, b, Rational(1), Rational(0)};
}

/// Piecewise curve on [lo, hi] (hi excluded when `hi_open`).
struct Curve {
    std::vector<Piece> pieces;
    bool hi_open = false;

    Rational lo() const { return pieces.front().lo; }
    Rational hi() const { return pieces.back().hi; }

    bool contains(const Rational& r) const { return r >= lo() && (hi_open ? r < hi() : r <= hi()); }
    bool contains(double r) const
    {
        return r >= to_double(lo()) && (hi_open ? r < to_double(hi()) : r <= to_double(hi()));
    }

    const Piece& piece_at(double r) const
    {
        for (const auto& p : pieces)
            if (r <= to_double(p.hi))
                return p;
        return pieces.back();
    }
    const Piece& piece_at(const Rational& r) const
    {
        for (const auto& p : pieces)
            if (r <= p.hi)
                return p;
        return pieces.back();
    }

    Rational eval(const Rational& r) const
    {
        if (!contains(r))
            throw domain_error("multiplexing gain " + to_string(r) + " outside the curve domain");
        return piece_at(r).eval(r);
    }
    double eval(double r) const
    {
        if (!contains(r))
            throw domain_error("multiplexing gain outside the curve domain");
        return piece_at(r).eval(r);
    }

    std::vector<Rational> breakpoints() const
    {
        std::vector<Rational> b{lo()};
        for (const auto& p : pieces)
            b.push_back(p.hi);
        return b;
    }
};

/// Lower/upper curve pair; equal except for repetition-coded delay diversity.
struct TradeoffCurves {
    TradeoffScheme scheme = TradeoffScheme::STC_SYNC;
    int K = 2;
    Curve low, high;
};

/// floor(x)/ceil(x) for a rational delay-bandwidth product.
inline Rational delta1_of(const Rational& t0_bw)
{
    if (t0_bw <= Rational(0))
        return Rational(0);
    const std::int64_t fl = t0_bw.numerator() / t0_bw.denominator();
    const std::int64_t ce = (t0_bw.numerator() % t0_bw.denominator() == 0) ? fl : fl + 1;
    return Rational(fl, ce);
}

inline TradeoffCurves tradeoff_curves(TradeoffScheme scheme, int K, const Rational& delta1 = Rational(1))
{
    if (K != 1 && K != 2)
        throw config_error("relay count K must be 1 or 2");
    const Rational half(1, 2);
    const Rational k(K);
    TradeoffCurves c;
    c.scheme = scheme;
    c.K = K;
    Curve line;
    line.hi_open = true;
    switch (scheme) {
    case TradeoffScheme::STC_SYNC:
    case TradeoffScheme::TDA_INDEP:
    case TradeoffScheme::TDA_LINMOD:
    case TradeoffScheme::ASTC:
        line.pieces = {linear(0, half, k + 1, -2 * (k + 1))};
        c.low = c.high = line;
        return c;
    case TradeoffScheme::DF:
        if (K != 1)
            throw config_error("DF reference curve is defined for K = 1");
        line.pieces = {linear(0, half, 2, -4)};
        c.low = c.high = line;
        return c;
    case TradeoffScheme::TDA_REPETITION: {
        if (K != 2)
            throw config_error("repetition-coded delay diversity curve is defined for K = 2");
        if (delta1 < Rational(0) || delta1 > Rational(1))
            throw config_error("Delta1 must lie in [0, 1]");
        c.high.hi_open = c.low.hi_open = true;
        c.high.pieces = {linear(0, half, 3, -6)};
        if (delta1 == Rational(0)) {
            c.low.pieces = {linear(0, half, 0, 0)};
        } else if (delta1 == Rational(1)) {
            c.low = c.high;
        } else {
            // 3 - 6r/Delta1 reaches 0 at r = Delta1/2 < 1/2, then clamped
            const Rational z = delta1 / 2;
            c.low.pieces = {linear(0, z, 3, -6 / delta1), linear(z, half, 0, 0)};
        }
        return c;
    }
    case TradeoffScheme::MIX_AF:
        line.pieces = K == 1 ? std::vector<Piece>{linear(0, Rational(1, 4), 2, -2), linear(Rational(1, 4), half, 3, -6)}
                             : std::vector<Piece>{linear(0, Rational(1, 6), 3, -2), linear(Rational(1, 6), half, 4, -8)};
        c.low = c.high = line;
        return c;
    case TradeoffScheme::NAF:
        line.hi_open = false;
        line.pieces = {linear(0, half, k + 1, -(2 * k + 1)), linear(half, 1, 1, -1)};
        c.low = c.high = line;
        return c;
    case TradeoffScheme::DDF: {
        line.hi_open = false;
        const Rational b1(1, K + 1);
        line.pieces = {linear(0, b1, k + 1, -(k + 1)),
                       Piece{b1, half, k + 1, -(2 * k + 1), Rational(1), Rational(-1)},
                       Piece{half, Rational(1), Rational(1), Rational(-1), Rational(0), Rational(1)}};
        c.low = c.high = line;
        return c;
    }
    }
    throw config_error("unhandled scheme");
}

/// (d_low, d_high) at r.
inline std::pair<double, double> d_curve(TradeoffScheme scheme, int K, double r, const Rational& delta1 = Rational(1))
{
    const TradeoffCurves c = tradeoff_curves(scheme, K, delta1);
    return {c.low.eval(r), c.high.eval(r)};
}

inline std::pair<Rational, Rational> d_curve_exact(TradeoffScheme scheme, int K, const Rational& r,
                                                   const Rational& delta1 = Rational(1))
{
    const TradeoffCurves c = tradeoff_curves(scheme, K, delta1);
    return {c.low.eval(r), c.high.eval(r)};
}

struct TradeoffSample {
    double r = 0.0;
    double d_low = 0.0;
    double d_high = 0.0;
    bool breakpoint = false;
};

/// Samples on lo + k*step plus every breakpoint inside the domain.
inline std::vector<TradeoffSample> sample_curve(const TradeoffCurves& c, const Rational& step)
{
    if (step <= Rational(0))
        throw config_error("r step must be positive");
    std::vector<Rational> rs;
    const Curve& cv = c.high;
    for (Rational r = cv.lo(); cv.contains(r); r += step)
        rs.push_back(r);
    for (const Curve* k : {&c.low, &c.high})
        for (const Rational& b : k->breakpoints())
            if (cv.contains(b))
                rs.push_back(b);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    std::vector<TradeoffSample> out;
    auto is_break = [&](const Rational& r) {
        for (const Curve* k : {&c.low, &c.high}) {
            const auto b = k->breakpoints();
            if (std::find(b.begin(), b.end(), r) != b.end())
                return true;
        }
        return false;
    };
    for (const Rational& r : rs)
        out.push_back({to_double(r), to_double(c.low.eval(r)), to_double(c.high.eval(r)), is_break(r)});
    return out;
}

// ---- crossings ------------------------------------------------------------

struct Crossing {
    std::string kind;  // cross | touch | coincident
    bool exact = true;
    Rational r;        // exact location (or start of a coincident range)
    Rational r_end;    // end of a coincident range
    double value = 0.0;
};

namespace detail {

inline std::optional<std::int64_t> exact_isqrt(std::int64_t v)
{
    if (v < 0)
        return std::nullopt;
    auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(v))));
    for (std::int64_t t = std::max<std::int64_t>(0, s - 2); t <= s + 2; ++t)
        if (t * t == v)
            return t;
    return std::nullopt;
}

struct Root {
    Rational r;
    double value;
    bool exact;
};

/// Real roots of c0 + c1 r + c2 r^2 (not identically zero).
inline std::vector<Root> quadratic_roots(const Rational& c0, const Rational& c1, const Rational& c2)
{
    std::vector<Root> roots;
    if (c2 == Rational(0)) {
        if (c1 != Rational(0)) {
            const Rational r = -c0 / c1;
            roots.push_back({r, to_double(r), true});
        }
        return roots;
    }
    const Rational disc = c1 * c1 - 4 * c2 * c0;
    if (disc < Rational(0))
        return roots;
    const auto sn = exact_isqrt(disc.numerator());
    const auto sd = exact_isqrt(disc.denominator());
    if (sn && sd) {
        const Rational s(*sn, *sd);
        for (const Rational& r : {(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)})
            roots.push_back({r, to_double(r), true});
    } else {
        const double s = std::sqrt(to_double(disc));
        for (double sign : {-1.0, 1.0}) {
            const double v = (-to_double(c1) + sign * s) / (2 * to_double(c2));
            roots.push_back({Rational(0), v, false});
        }
    }
    return roots;
}

} // namespace detail

/// Points where the upper curves of two schemes meet on their common domain.
inline std::vector<Crossing> crossings(const TradeoffCurves& a, const TradeoffCurves& b)
{
    const Curve& A = a.high;
    const Curve& B = b.high;
    const Rational lo = std::max(A.lo(), B.lo());
    const Rational hi = std::min(A.hi(), B.hi());
    const bool hi_open = (A.hi() == hi && A.hi_open) || (B.hi() == hi && B.hi_open);
    std::vector<Crossing> out;
    if (lo >= hi)
        return out;

    auto diff = [&](double r) { return A.eval(r) - B.eval(r); };
    const double eps = 1e-9;

    std::vector<detail::Root> roots;
    std::vector<std::pair<Rational, Rational>> same;
    for (const auto& pa : A.pieces) {
        for (const auto& pb : B.pieces) {
            const Rational l = std::max({pa.lo, pb.lo, lo});
            const Rational h = std::min({pa.hi, pb.hi, hi});
            if (l > h)
                continue;
            // (pa.p0 + pa.p1 r)(pb.q0 + pb.q1 r) - (pb.p0 + pb.p1 r)(pa.q0 + pa.q1 r)
            const Rational c0 = pa.p0 * pb.q0 - pb.p0 * pa.q0;
            const Rational c1 = pa.p0 * pb.q1 + pa.p1 * pb.q0 - pb.p0 * pa.q1 - pb.p1 * pa.q0;
            const Rational c2 = pa.p1 * pb.q1 - pb.p1 * pa.q1;
            if (c0 == Rational(0) && c1 == Rational(0) && c2 == Rational(0)) {
                if (l < h)
                    same.emplace_back(l, h);
                continue;
            }
            for (const auto& root : detail::quadratic_roots(c0, c1, c2)) {
                const bool inside = root.exact ? (root.r >= l && root.r <= h)
                                               : (root.value >= to_double(l) - 1e-15 && root.value <= to_double(h) + 1e-15);
                if (inside)
                    roots.push_back(root);
            }
        }
    }

    // merge adjacent coincident ranges
    std::sort(same.begin(), same.end());
    std::vector<std::pair<Rational, Rational>> merged;
    for (const auto& s : same) {
        if (!merged.empty() && merged.back().second >= s.first)
            merged.back().second = std::max(merged.back().second, s.second);
        else
            merged.push_back(s);
    }
    auto in_same = [&](double v) {
        for (const auto& m : merged)
            if (v >= to_double(m.first) - 1e-15 && v <= to_double(m.second) + 1e-15)
                return true;
        return false;
    };
    for (const auto& m : merged) {
        Crossing c;
        c.kind = "coincident";
        c.r = m.first;
        c.r_end = m.second;
        c.value = to_double(m.first);
        out.push_back(c);
    }

    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
    std::vector<detail::Root> uniq;
    for (const auto& r : roots) {
        if (!uniq.empty() && std::abs(uniq.back().value - r.value) < 1e-12)
            continue;
        uniq.push_back(r);
    }
    for (const auto& r : uniq) {
        if (in_same(r.value))
            continue;
        if (hi_open && r.exact && r.r == hi)
            continue;
        Crossing c;
        c.exact = r.exact;
        c.r = r.r;
        c.value = r.value;
        const double left = r.value - eps;
        const double right = r.value + eps;
        const bool has_left = left >= to_double(lo);
        const bool has_right = hi_open ? right < to_double(hi) : right <= to_double(hi);
        if (has_left && has_right && (diff(left) > 0) != (diff(right) > 0) && diff(left) != 0 && diff(right) != 0)
            c.kind = "cross";
        else
            c.kind = "touch";
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.value < y.value; });
    return out;
}

} // namespace relaydmt
