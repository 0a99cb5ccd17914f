//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/quadrature.hpp
//! Adaptive Gauss-Kronrod (7/15) integration.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace fdcr::quad
{
struct QuadResult
{
    double value{0};
    double error{0};
    bool converged{true};
};

namespace detail
{
inline constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

template<class F>
QuadResult gk15(F&& f, double a, double b)
{
    double const c = 0.5 * (a + b);
    double const h = 0.5 * (b - a);
    double const fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j)
    {
        double const dx = h * kXgk[j];
        double const fsum = f(c - dx) + f(c + dx);
        kron += kWgk[j] * fsum;
        if (j % 2 == 1)
        {
            gauss += kWg[j / 2] * fsum;
        }
    }
    return {kron * h, std::abs((kron - gauss) * h), true};
}

template<class F>
QuadResult adapt(F& f, double a, double b, double abs_tol, double rel_tol,
                 int depth, QuadResult whole)
{
    if (whole.error <= std::max(abs_tol, rel_tol * std::abs(whole.value))
        || depth <= 0)
    {
        whole.converged = whole.error
                          <= std::max(abs_tol, rel_tol * std::abs(whole.value));
        return whole;
    }
    double const mid = 0.5 * (a + b);
    auto left = adapt(f, a, mid, 0.5 * abs_tol, rel_tol, depth - 1,
                      gk15(f, a, mid));
    auto right = adapt(f, mid, b, 0.5 * abs_tol, rel_tol, depth - 1,
                       gk15(f, mid, b));
    return {left.value + right.value, left.error + right.error,
            left.converged && right.converged};
}
}  // namespace detail

/*!
 * Integrate f over [a, b] by recursive bisection until the Kronrod/Gauss
 * difference on each piece meets its share of the tolerance.
 */
template<class F>
QuadResult integrate(F f, double a, double b, double abs_tol = 1e-12,
                     double rel_tol = 1e-10, int max_depth = 40)
{
    if (a == b)
        return {};
    return detail::adapt(f, a, b, abs_tol, rel_tol, max_depth,
                         detail::gk15(f, a, b));
}

//! Integrate over [a, inf) via x = a + u/(1-u).
template<class F>
QuadResult integrate_to_inf(F f, double a, double abs_tol = 1e-12,
                            double rel_tol = 1e-10, int max_depth = 40)
{
    auto g = [&](double u) {
        double const one_m = 1 - u;
        if (one_m <= 0)
            return 0.0;
        double const x = a + u / one_m;
        double const fx = f(x);
        return fx == 0 ? 0.0 : fx / (one_m * one_m);
    };
    return integrate(g, 0.0, 1.0, abs_tol, rel_tol, max_depth);
}

}  // namespace fdcr::quad
