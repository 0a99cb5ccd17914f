//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/specfun.hpp
//! Incomplete gamma, Beta and Kummer 1F1 kernels.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdcr
{
//---------------------------------------------------------------------------//
//! Value of a special-function evaluation plus its convergence state.
struct SpecfunResult
{
    double value{0};
    bool converged{true};
    int terms_used{0};
};

namespace specfun
{
inline constexpr double kRelTol = 1e-12;
inline constexpr int kMaxTerms = 10000;

namespace detail
{
// Series terms are accumulated well below kRelTol so the reported tolerance
// holds after the prefactor multiplication.
inline constexpr double kSeriesEps = 1e-17;
inline constexpr double kTiny = 1e-300;

inline bool is_small_integer(double a)
{
    return a == std::floor(a) && a <= 1000;
}

// P(a,x) by the power series, valid for x < a + 1
inline SpecfunResult lower_gamma_series(double a, double x)
{
    double term = 1.0;
    double sum = 1.0;
    int n = 1;
    for (; n <= kMaxTerms; ++n)
    {
        term *= x / (a + n);
        sum += term;
        if (term < sum * kSeriesEps)
            break;
    }
    double const logpre = a * std::log(x) - x - std::lgamma(a + 1);
    return {std::exp(logpre) * sum, n <= kMaxTerms, n};
}

// Q(a,x) by the Legendre continued fraction (modified Lentz), x >= a + 1
inline SpecfunResult upper_gamma_cf(double a, double x)
{
    double b = x + 1 - a;
    double c = 1 / kTiny;
    double d = 1 / b;
    double h = d;
    int i = 1;
    for (; i <= kMaxTerms; ++i)
    {
        double const an = -i * (i - a);
        b += 2;
        d = an * d + b;
        if (std::abs(d) < kTiny)
            d = kTiny;
        c = b + an / c;
        if (std::abs(c) < kTiny)
            c = kTiny;
        d = 1 / d;
        double const del = d * c;
        h *= del;
        if (std::abs(del - 1) < 1e-16)
            break;
    }
    double const logpre = a * std::log(x) - x - std::lgamma(a);
    return {std::exp(logpre) * h, i <= kMaxTerms, i};
}

// Q(n,x) = e^{-x} sum_{k<n} x^k/k! for integer n, summed from the largest
// term down (terms increase with k when x >= n - 1)
inline SpecfunResult upper_gamma_poisson(int n, double x)
{
    double term
        = std::exp(-x + (n - 1) * std::log(x) - std::lgamma(static_cast<double>(n)));
    double sum = term;
    for (int k = n - 1; k >= 1; --k)
    {
        term *= k / x;
        sum += term;
    }
    return {sum, true, n};
}

inline SpecfunResult complement(SpecfunResult r)
{
    r.value = 1 - r.value;
    return r;
}
}  // namespace detail

//---------------------------------------------------------------------------//
inline double log_gamma(double x)
{
    return std::lgamma(x);
}

/*!
 * Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
 *
 * Integer shapes with x >= a use the finite Poisson sum for the complement.
 */
inline SpecfunResult reg_lower_gamma_result(double a, double x)
{
    if (!(a > 0) || !(x >= 0))
    {
        throw std::domain_error("reg_lower_gamma requires a > 0, x >= 0");
    }
    if (x == 0)
        return {0.0, true, 0};
    if (std::isinf(x))
        return {1.0, true, 0};

    if (x < a + 1 && !(detail::is_small_integer(a) && x >= a))
    {
        return detail::lower_gamma_series(a, x);
    }
    if (detail::is_small_integer(a))
    {
        return detail::complement(
            detail::upper_gamma_poisson(static_cast<int>(a), x));
    }
    return detail::complement(detail::upper_gamma_cf(a, x));
}

//! Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline SpecfunResult reg_upper_gamma_result(double a, double x)
{
    if (!(a > 0) || !(x >= 0))
    {
        throw std::domain_error("reg_upper_gamma requires a > 0, x >= 0");
    }
    if (x == 0)
        return {1.0, true, 0};
    if (std::isinf(x))
        return {0.0, true, 0};

    if (x < a + 1 && !(detail::is_small_integer(a) && x >= a))
    {
        return detail::complement(detail::lower_gamma_series(a, x));
    }
    if (detail::is_small_integer(a))
    {
        return detail::upper_gamma_poisson(static_cast<int>(a), x);
    }
    return detail::upper_gamma_cf(a, x);
}

inline double reg_lower_gamma(double a, double x)
{
    return reg_lower_gamma_result(a, x).value;
}

inline double reg_upper_gamma(double a, double x)
{
    return reg_upper_gamma_result(a, x).value;
}

//---------------------------------------------------------------------------//
//! Beta function via log-gamma.
inline SpecfunResult beta_fn_result(double a, double b)
{
    if (!(a > 0) || !(b > 0))
    {
        throw std::domain_error("beta_fn requires a, b > 0");
    }
    double const v
        = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
    return {v, std::isfinite(v) && v > 0, 0};
}

inline double beta_fn(double a, double b)
{
    return beta_fn_result(a, b).value;
}

//---------------------------------------------------------------------------//
namespace detail
{
// Plain power series of 1F1(a; b; x)
inline SpecfunResult kummer_series(double a, double b, double x)
{
    double term = 1.0;
    double sum = 1.0;
    int k = 0;
    for (; k < kMaxTerms; ++k)
    {
        term *= (a + k) / (b + k) * x / (k + 1);
        sum += term;
        if (term == 0)
            break;
        bool const past_peak = std::abs((a + k + 1) * x)
                               < std::abs((b + k + 1) * (k + 2));
        if (past_peak && std::abs(term) < kSeriesEps * std::abs(sum))
            break;
    }
    return {sum, k < kMaxTerms && std::isfinite(sum), k + 1};
}

/*!
 * log 1F1(a; b; x) for a, b > 0 and x >= 0 (all terms positive).
 *
 * Rescales the running sum so arguments far beyond exp overflow still work.
 */
inline SpecfunResult log_kummer_positive(double a, double b, double x)
{
    if (x == 0)
        return {0.0, true, 0};
    constexpr double kBig = 1e280;
    double const log_big = std::log(kBig);
    double term = 1.0;
    double sum = 1.0;
    double log_scale = 0;
    int k = 0;
    for (; k < kMaxTerms; ++k)
    {
        double const ratio = (a + k) / (b + k) * x / (k + 1);
        term *= ratio;
        sum += term;
        if (sum > kBig)
        {
            sum /= kBig;
            term /= kBig;
            log_scale += log_big;
        }
        if (ratio < 1 && term < kSeriesEps * sum)
            break;
    }
    return {std::log(sum) + log_scale, k < kMaxTerms, k + 1};
}
}  // namespace detail

/*!
 * Kummer confluent hypergeometric function 1F1(a; b; x).
 *
 * Negative arguments go through 1F1(a;b;x) = e^x 1F1(b-a;b;-x), which turns
 * the alternating series into a positive one when b > a.
 */
inline SpecfunResult kummer_1f1_result(double a, double b, double x)
{
    if (b <= 0 && b == std::floor(b))
    {
        throw std::domain_error("kummer_1f1: b must not be a non-positive integer");
    }
    if (x == 0)
        return {1.0, true, 0};
    if (x < 0)
    {
        bool const a_poly = a <= 0 && a == std::floor(a);
        if (!a_poly)
        {
            auto r = detail::kummer_series(b - a, b, -x);
            r.value *= std::exp(x);
            r.converged = r.converged && std::isfinite(r.value);
            return r;
        }
    }
    return detail::kummer_series(a, b, x);
}

inline double kummer_1f1(double a, double b, double x)
{
    return kummer_1f1_result(a, b, x).value;
}

}  // namespace specfun
}  // namespace fdcr
