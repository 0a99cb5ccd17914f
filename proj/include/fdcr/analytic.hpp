//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/analytic.hpp
//! Closed-form distributions: harvested energy, per-link level
//! probabilities and the MRC SINR at the primary receiver.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "params.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"

namespace fdcr
{
//---------------------------------------------------------------------------//
/*!
 * W = coef1*Y1 + coef2*Y2 with independent Y_i ~ Gamma(shape_i, rate_i).
 *
 * The effective rate of the i-th summand is rate_i / coef_i.
 */
struct GammaSumSpec
{
    int shape1{1};
    double rate1{1.0};
    double coef1{1.0};
    int shape2{1};
    double rate2{1.0};
    double coef2{1.0};

    double eff_rate1() const { return rate1 / coef1; }
    double eff_rate2() const { return rate2 / coef2; }
};

//! How the ST's mode-I transmission enters the primary receiver SINR.
enum class Interference
{
    off,    //!< Interference term dropped (mode I treated like mode II)
    exact,  //!< ST->PR interference kept
};

//! Per-link discretized harvest distributions over levels 0..L.
struct LevelDistributions
{
    std::vector<double> link1;
    std::vector<double> link2;
};

namespace analytic
{
//! Relative rate separation below which the equal-rate branch applies.
inline constexpr double kEqualRateTol = 1e-9;

namespace detail
{
inline double log_beta(double a, double b)
{
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// log of e^{-base*x} 1F1(a; c; x*(base - other)) for a, c > 0, x >= 0,
// folding the exponential through the Kummer transformation when needed
inline double log_exp_kummer(double a, double c, double x, double base,
                             double other, bool& ok)
{
    double const z = x * (base - other);
    if (z >= 0)
    {
        auto r = specfun::detail::log_kummer_positive(a, c, z);
        ok = ok && r.converged;
        return -base * x + r.value;
    }
    auto r = specfun::detail::log_kummer_positive(c - a, c, -z);
    ok = ok && r.converged;
    return -other * x + r.value;
}

// Decimal digits lost to cancellation in the partial-fraction expansion
inline double pf_digits_lost(int m1, int m2, double b1, double b2)
{
    double const gap = std::abs(b1 - b2) / std::max(b1, b2);
    return (m1 + m2 - 1) * std::log10(1 / gap);
}

inline double clamp01(double p)
{
    return std::clamp(p, 0.0, 1.0);
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Partial-fraction coefficient of the density of Y1 + Y2.
 *
 * With distinct rates the density is
 *   f(z) = sum_mu sum_{nu=1}^{m_mu} A(mu,nu) z^{nu-1} e^{-b_mu z} / (nu-1)!
 * and mu selects which pole (1 or 2) the term belongs to.
 */
inline double weight_A(int mu, int nu, std::array<int, 2> shapes,
                       std::array<double, 2> rates)
{
    if (mu != 1 && mu != 2)
        throw std::out_of_range("weight_A: mu must be 1 or 2");
    int const m_mu = shapes[mu - 1];
    int const m_o = shapes[2 - mu];
    double const b_mu = rates[mu - 1];
    double const b_o = rates[2 - mu];
    if (nu < 1 || nu > m_mu)
        throw std::out_of_range("weight_A: nu outside 1..m_mu");
    double const gap = b_o - b_mu;
    if (std::abs(gap) < kEqualRateTol * std::max(b_mu, b_o))
        throw std::domain_error("weight_A: equal rates have no partial "
                                "fraction expansion");

    int const m_sum = shapes[0] + shapes[1];
    double const log_mag = shapes[0] * std::log(rates[0])
                           + shapes[1] * std::log(rates[1])
                           + std::lgamma(m_sum - nu) - std::lgamma(m_o)
                           - std::lgamma(m_mu - nu + 1)
                           + (nu - m_sum) * std::log(std::abs(gap));
    int const gap_power = nu - m_sum;
    bool negative = ((m_mu - nu) % 2 != 0);
    if (gap < 0 && (gap_power % 2 != 0))
        negative = !negative;
    double const mag = std::exp(log_mag);
    return negative ? -mag : mag;
}

/*!
 * CDF of W = coef1*Y1 + coef2*Y2.
 *
 * Distinct, well separated rates use the partial-fraction expansion. Equal
 * rates collapse to a single Erlang. Nearly equal rates would cancel
 * catastrophically in the expansion, so they condition on Y2 and integrate
 * in closed form through 1F1 instead.
 */
inline SpecfunResult gamma_sum_cdf_result(GammaSumSpec const& spec, double w)
{
    if (!(w > 0))
        return {0.0, true, 0};
    int const m1 = spec.shape1;
    int const m2 = spec.shape2;
    double const b1 = spec.eff_rate1();
    double const b2 = spec.eff_rate2();

    if (std::abs(b1 - b2) < kEqualRateTol * std::max(b1, b2))
    {
        auto r = specfun::reg_lower_gamma_result(m1 + m2, 0.5 * (b1 + b2) * w);
        r.value = detail::clamp01(r.value);
        return r;
    }

    SpecfunResult out{0, true, 0};
    if (detail::pf_digits_lost(m1, m2, b1, b2) < 6)
    {
        std::array<int, 2> const shapes{m1, m2};
        std::array<double, 2> const rates{b1, b2};
        double acc = 0;
        for (int mu = 1; mu <= 2; ++mu)
        {
            double const b = rates[mu - 1];
            for (int nu = 1; nu <= shapes[mu - 1]; ++nu)
            {
                auto p = specfun::reg_lower_gamma_result(nu, b * w);
                out.converged = out.converged && p.converged;
                acc += weight_A(mu, nu, shapes, rates) / std::pow(b, nu)
                       * p.value;
                ++out.terms_used;
            }
        }
        out.value = detail::clamp01(acc);
        return out;
    }

    // F(w) = P(m2, b2 w) - sum_k b1^k/k! int_0^w f2(y) (w-y)^k e^{-b1(w-y)} dy
    auto head = specfun::reg_lower_gamma_result(m2, b2 * w);
    double acc = head.value;
    bool ok = head.converged;
    double const log_w = std::log(w);
    for (int k = 0; k < m1; ++k)
    {
        double const c = m2 + k + 1;
        double const log_t = k * std::log(b1) - std::lgamma(k + 1.0)
                             + m2 * std::log(b2) - std::lgamma(m2)
                             + (m2 + k) * log_w + detail::log_beta(m2, k + 1)
                             + detail::log_exp_kummer(m2, c, w, b1, b2, ok);
        acc -= std::exp(log_t);
    }
    return {detail::clamp01(acc), ok, m1};
}

inline double gamma_sum_cdf(GammaSumSpec const& spec, double w)
{
    return gamma_sum_cdf_result(spec, w).value;
}

//! Density reconstructed from the partial-fraction weights.
inline double gamma_sum_pdf_pf(GammaSumSpec const& spec, double w)
{
    if (!(w > 0))
        return 0;
    std::array<int, 2> const shapes{spec.shape1, spec.shape2};
    std::array<double, 2> const rates{spec.eff_rate1(), spec.eff_rate2()};
    double acc = 0;
    for (int mu = 1; mu <= 2; ++mu)
    {
        double const b = rates[mu - 1];
        for (int nu = 1; nu <= shapes[mu - 1]; ++nu)
        {
            acc += weight_A(mu, nu, shapes, rates)
                   * std::exp((nu - 1) * std::log(w) - b * w
                              - std::lgamma(static_cast<double>(nu)));
        }
    }
    return acc;
}

//---------------------------------------------------------------------------//
// Harvested energy
//---------------------------------------------------------------------------//

//! E_I = (eta N0 / 2)(X1 + X2) with X_i the SNR-scaled gains of links 1, 2.
inline GammaSumSpec energy_mode1_spec(LinkStats const& links,
                                      SystemConfig const& cfg)
{
    double const c = 0.5 * cfg.eta * cfg.N0;
    auto const& l1 = link(links, kLinkAC);
    auto const& l2 = link(links, kLinkCD);
    return {l1.m, l1.beta, c, l2.m, l2.beta, c};
}

//! E_II = (eta N0 / 2)(X1 + 2 X2): link 2 keeps charging in slot two.
inline GammaSumSpec energy_mode2_spec(LinkStats const& links,
                                      SystemConfig const& cfg)
{
    auto spec = energy_mode1_spec(links, cfg);
    spec.coef2 *= 2;
    return spec;
}

inline SpecfunResult cdf_energy_mode1_result(double x, LinkStats const& links,
                                             SystemConfig const& cfg)
{
    return gamma_sum_cdf_result(energy_mode1_spec(links, cfg), x);
}

inline SpecfunResult cdf_energy_mode2_result(double x, LinkStats const& links,
                                             SystemConfig const& cfg)
{
    return gamma_sum_cdf_result(energy_mode2_spec(links, cfg), x);
}

inline double
cdf_energy_mode1(double x, LinkStats const& links, SystemConfig const& cfg)
{
    return cdf_energy_mode1_result(x, links, cfg).value;
}

inline double
cdf_energy_mode2(double x, LinkStats const& links, SystemConfig const& cfg)
{
    return cdf_energy_mode2_result(x, links, cfg).value;
}

//---------------------------------------------------------------------------//
// Discretized per-link harvest
//---------------------------------------------------------------------------//

namespace detail
{
inline void require_harvest_link(int link_id)
{
    if (link_id != kLinkAC && link_id != kLinkCD)
        throw std::out_of_range("harvest level: link must be 1 or 2");
}

// Probability that Gamma(m, 1) lands in [lo, hi), using whichever tail keeps
// the difference well conditioned
inline double gamma_cell(int m, double lo, double hi)
{
    if (lo >= m)
        return specfun::reg_upper_gamma(m, lo) - specfun::reg_upper_gamma(m, hi);
    return specfun::reg_lower_gamma(m, hi) - specfun::reg_lower_gamma(m, lo);
}
}  // namespace detail

/*!
 * Probability that link \c link_id harvests exactly x levels in half a block.
 *
 * Mass at or above level L is folded into level L.
 */
inline double level_prob(int link_id, int x, BatteryModel const& battery,
                         LinkStats const& links, SystemConfig const& cfg)
{
    detail::require_harvest_link(link_id);
    if (x < 0 || x > battery.L)
        throw std::out_of_range("level_prob: level outside 0..L");
    auto const& l = link(links, link_id);
    double const k = 2 * l.beta / (cfg.eta * cfg.N0);
    double const lo = k * battery.level_energy(x);
    if (x == battery.L)
        return specfun::reg_upper_gamma(l.m, lo);
    double const hi = k * battery.level_energy(x + 1);
    return std::max(0.0, detail::gamma_cell(l.m, lo, hi));
}

inline std::vector<double>
level_distribution(int link_id, BatteryModel const& battery,
                   LinkStats const& links, SystemConfig const& cfg)
{
    detail::require_harvest_link(link_id);
    std::vector<double> p(battery.L + 1);
    for (int x = 0; x <= battery.L; ++x)
    {
        p[x] = level_prob(link_id, x, battery, links, cfg);
    }
    return p;
}

inline LevelDistributions level_distributions(BatteryModel const& battery,
                                              LinkStats const& links,
                                              SystemConfig const& cfg)
{
    return {level_distribution(kLinkAC, battery, links, cfg),
            level_distribution(kLinkCD, battery, links, cfg)};
}

/*!
 * Pr{ i + mu + nu < t  and  min(i + mu + 2 nu, L) = j }.
 *
 * mu and nu are the first-slot levels of links 1 and 2; in mode II link 2
 * delivers nu again during the second slot. Requires i < t <= j.
 */
inline double partial_charge_helper(int i, int j, LevelDistributions const& lv,
                                    BatteryModel const& battery)
{
    int const t = battery.t;
    int const L = battery.L;
    if (i < 0 || i > t - 1 || j < t)
        throw std::out_of_range("partial_charge_helper: need 0 <= i < t <= j");
    if (j > L)
        return 0;
    double acc = 0;
    for (int nu = 0; nu <= t - 1 - i; ++nu)
    {
        for (int mu = 0; mu <= t - 1 - i - nu; ++mu)
        {
            if (std::min(i + mu + 2 * nu, L) == j)
                acc += lv.link1[mu] * lv.link2[nu];
        }
    }
    return acc;
}

inline double partial_charge_helper(int i, int j, LinkStats const& links,
                                    BatteryModel const& battery,
                                    SystemConfig const& cfg)
{
    return partial_charge_helper(
        i, j, level_distributions(battery, links, cfg), battery);
}

//---------------------------------------------------------------------------//
// Combined SINR at the primary receiver
//---------------------------------------------------------------------------//

//! Shapes and rates of gamma_ad (4), gamma_db (5) and gamma_ab (6).
struct SinrTriple
{
    int m4{1};
    double b4{1};
    int m5{1};
    double b5{1};
    int m6{1};
    double b6{1};
};

inline SinrTriple sinr_triple(LinkStats const& links)
{
    auto const& l4 = link(links, kLinkAD);
    auto const& l5 = link(links, kLinkDB);
    auto const& l6 = link(links, kLinkAB);
    return {l4.m, l4.beta, l5.m, l5.beta, l6.m, l6.beta};
}

/*!
 * Closed-form CDF of gamma_ab + min(gamma_ad, gamma_db) for integer shapes.
 *
 * F(x) = P(m6, b6 x) - sum_{a<m4} sum_{b<m5} b4^a b5^b b6^m6 / (a! b! G(m6))
 *          B(a+b+1, m6) e^{-(b4+b5)x} x^{a+b+m6}
 *          1F1(m6; a+b+m6+1; x(b4+b5-b6))
 */
inline SpecfunResult combined_sinr_cdf_closed(double x, SinrTriple const& s)
{
    if (!(x > 0))
        return {0.0, true, 0};
    auto head = specfun::reg_lower_gamma_result(s.m6, s.b6 * x);
    double acc = head.value;
    bool ok = head.converged;
    int terms = 0;
    double const log_x = std::log(x);
    double const bmin = s.b4 + s.b5;
    for (int a = 0; a < s.m4; ++a)
    {
        for (int b = 0; b < s.m5; ++b)
        {
            double const c = a + b + s.m6 + 1;
            double const log_t
                = a * std::log(s.b4) + b * std::log(s.b5)
                  + s.m6 * std::log(s.b6) - std::lgamma(a + 1.0)
                  - std::lgamma(b + 1.0) - std::lgamma(s.m6)
                  + detail::log_beta(a + b + 1, s.m6) + (a + b + s.m6) * log_x
                  + detail::log_exp_kummer(s.m6, c, x, bmin, s.b6, ok);
            acc -= std::exp(log_t);
            ++terms;
        }
    }
    return {detail::clamp01(acc), ok, terms};
}

//! Same CDF by direct quadrature of f_ab convolved with the min CDF.
inline SpecfunResult combined_sinr_cdf_quadrature(double x, SinrTriple const& s)
{
    if (!(x > 0))
        return {0.0, true, 0};
    double const log_norm = s.m6 * std::log(s.b6) - std::lgamma(s.m6);
    auto integrand = [&](double z) {
        if (z <= 0)
            return 0.0;
        double const f6
            = std::exp(log_norm + (s.m6 - 1) * std::log(z) - s.b6 * z);
        double const y = x - z;
        double const surv = specfun::reg_upper_gamma(s.m4, s.b4 * y)
                            * specfun::reg_upper_gamma(s.m5, s.b5 * y);
        return f6 * (1 - surv);
    };
    auto r = quad::integrate(integrand, 0.0, x, 1e-13, 1e-11);
    return {detail::clamp01(r.value), r.converged, 0};
}

/*!
 * CDF of gamma_db,I-based combined SINR with the ST interference kept.
 *
 * Given the normalized interference Y = 2 E_t |h_cb|^2 / N0 = y, gamma_db,I
 * is gamma with rate b5 (1 + y); the conditional CDF is the closed form
 * above and Y ~ Gamma(m3, Omega3/m3) is integrated out numerically.
 */
inline SpecfunResult combined_sinr_cdf_interference(double x,
                                                    SinrTriple const& s,
                                                    int m3, double b3)
{
    if (!(x > 0))
        return {0.0, true, 0};
    double const log_norm = m3 * std::log(b3) - std::lgamma(m3);
    bool ok = true;
    auto integrand = [&](double y) {
        if (y <= 0)
            return 0.0;
        double const fy
            = std::exp(log_norm + (m3 - 1) * std::log(y) - b3 * y);
        if (fy == 0)
            return 0.0;
        SinrTriple cond = s;
        cond.b5 = s.b5 * (1 + y);
        auto c = combined_sinr_cdf_closed(x, cond);
        ok = ok && c.converged;
        return fy * c.value;
    };
    auto r = quad::integrate_to_inf(integrand, 0.0, 1e-13, 1e-11);
    return {detail::clamp01(r.value), ok && r.converged, 0};
}

inline SpecfunResult cdf_combined_sinr_result(double x, LinkStats const& links,
                                              Interference mode)
{
    auto const s = sinr_triple(links);
    if (mode == Interference::off)
        return combined_sinr_cdf_closed(x, s);
    auto const& l3 = link(links, kLinkCB);
    return combined_sinr_cdf_interference(x, s, l3.m, l3.beta);
}

inline double
cdf_combined_sinr(double x, LinkStats const& links, Interference mode)
{
    return cdf_combined_sinr_result(x, links, mode).value;
}

}  // namespace analytic
}  // namespace fdcr
