// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

namespace relaydmt::quad {

/// Nodes per Gauss-Legendre panel.
inline constexpr int panel_order = 16;

/// Single 16-point Gauss-Legendre panel on [a, b].
template <class F>
double gl_panel(F&& f, double a, double b)
{
    using rule = boost::math::quadrature::gauss<double, panel_order>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            sum += w[i] * f(mid);
        } else {
            sum += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
        }
    }
    return half * sum;
}

/// Composite Gauss-Legendre with `panels` equal panels.
template <class F>
double gauss_legendre(F&& f, double a, double b, int panels)
{
    panels = std::max(panels, 1);
    const double h = (b - a) / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * h;
        const double hi = (p + 1 == panels) ? b : lo + h;
        sum += gl_panel(f, lo, hi);
    }
    return sum;
}

/// Composite rule with at least `nodes` nodes in total.
template <class F>
double gauss_legendre_nodes(F&& f, double a, double b, int nodes)
{
    return gauss_legendre(f, a, b, (nodes + panel_order - 1) / panel_order);
}

} // namespace relaydmt::quad
