//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/params.hpp
//! System parameters, unit conversion and per-link Nakagami statistics.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace fdcr
{
//---------------------------------------------------------------------------//
//! Raised for any invalid configuration input.
class ConfigError : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

//---------------------------------------------------------------------------//
/*!
 * Link numbering used throughout the library.
 *
 * Power gains: 1 PT->ST, 2 ST<->HAP, 3 ST->PR, 4 PT->HAP, 5 HAP->PR, 6 PT->PR.
 */
enum LinkId : int
{
    kLinkAC = 1,
    kLinkCD = 2,
    kLinkCB = 3,
    kLinkAD = 4,
    kLinkDB = 5,
    kLinkAB = 6,
};

inline constexpr int kNumLinks = 6;

//---------------------------------------------------------------------------//
/*!
 * Physical parameters of the network.
 *
 * Everything is linear (watts, joules over a unit block). Nodes lie on a line
 * in the order PT, ST, HAP, PR, so only the three spacings are independent;
 * \c d_ad and \c d_ab are filled by \c validate (a nonzero value supplied by
 * the caller must agree with the topology). When \c k is set the PT power is
 * derived as \c k*P_d.
 */
struct SystemConfig
{
    double P_a{0.1};
    double P_d{0.1};
    std::optional<double> k{};
    double eta{0.5};
    double N0{1e-5};
    double H_dd{1e-5};
    double gamma0{3.0};
    double alpha{3.0};
    double d_ac{3.0};
    double d_cd{3.0};
    double d_db{14.0};
    double d_ad{0.0};
    double d_ab{0.0};
    std::array<int, kNumLinks> m{3, 3, 3, 1, 1, 1};

    // Battery
    double C{5.0};
    int L{400};
    double E_t{2.0};

    //! Non-cooperative PT->PR baseline occupies the whole block
    bool baseline_full_block{true};

    double d_cb() const { return d_cd + d_db; }
    int shape(int link_id) const { return m.at(link_id - 1); }
};

//---------------------------------------------------------------------------//
//! Nakagami statistics of one link, SNR-scaled.
struct LinkStat
{
    int link_id{0};
    int m{1};
    double Omega{1.0};
    double beta{1.0};
};

using LinkStats = std::array<LinkStat, kNumLinks>;

inline LinkStat const& link(LinkStats const& links, int link_id)
{
    return links.at(link_id - 1);
}

//---------------------------------------------------------------------------//
/*!
 * Discrete battery with L+1 levels.
 *
 * Level j holds j*C/L of energy. The threshold level is the smallest j >= 1
 * whose energy is not below E_t.
 */
struct BatteryModel
{
    double C{5.0};
    int L{400};
    double E_t{2.0};
    double eps1{5.0 / 400};
    int t{160};

    double level_energy(int j) const { return j * C / L; }
};

//---------------------------------------------------------------------------//
// Unit conversion
//---------------------------------------------------------------------------//

inline double dbm_to_watts(double p_dbm)
{
    return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double p_watts)
{
    return 10.0 * std::log10(p_watts) + 30.0;
}

//---------------------------------------------------------------------------//
// Validation
//---------------------------------------------------------------------------//

namespace detail
{
inline void require(bool ok, std::string const& what)
{
    if (!ok)
    {
        throw ConfigError(what);
    }
}

inline bool close_rel(double a, double b)
{
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

inline void require_positive(double v, char const* name)
{
    require(std::isfinite(v) && v > 0,
            std::string(name) + " must be finite and positive");
}
}  // namespace detail

//! Smallest level whose energy is at least E_t.
inline int threshold_level(double C, int L, double E_t)
{
    double const eps1 = C / L;
    int t = static_cast<int>(std::ceil(E_t / eps1));
    // Guard against E_t/eps1 landing one ulp above an integer
    if (t > 1 && (t - 1) * eps1 >= E_t)
    {
        --t;
    }
    return std::clamp(t, 1, L);
}

inline BatteryModel make_battery(double C, int L, double E_t)
{
    using detail::require;
    detail::require_positive(C, "battery capacity C");
    require(L >= 1, "battery level count L must be at least 1");
    detail::require_positive(E_t, "energy threshold E_t");
    require(E_t <= C, "energy threshold exceeds capacity");

    BatteryModel b;
    b.C = C;
    b.L = L;
    b.E_t = E_t;
    b.eps1 = C / L;
    b.t = threshold_level(C, L, E_t);
    return b;
}

inline BatteryModel make_battery(SystemConfig const& cfg)
{
    return make_battery(cfg.C, cfg.L, cfg.E_t);
}

/*!
 * Check every invariant and fill derived quantities.
 *
 * Throws ConfigError with a message naming the offending field.
 */
inline SystemConfig validate(SystemConfig raw)
{
    using detail::require;
    using detail::require_positive;

    require_positive(raw.P_d, "P_d");
    if (raw.k)
    {
        require_positive(*raw.k, "power ratio k");
        double const derived = *raw.k * raw.P_d;
        require(raw.P_a <= 0 || detail::close_rel(raw.P_a, derived),
                "P_a disagrees with k*P_d");
        raw.P_a = derived;
    }
    require_positive(raw.P_a, "P_a");
    require(std::isfinite(raw.eta) && raw.eta > 0 && raw.eta <= 1,
            "eta must lie in (0, 1]");
    require_positive(raw.N0, "N0");
    require(std::isfinite(raw.H_dd) && raw.H_dd >= 0,
            "H_dd must be finite and non-negative");
    require_positive(raw.gamma0, "gamma0");
    require_positive(raw.alpha, "alpha");
    require_positive(raw.d_ac, "d_ac");
    require_positive(raw.d_cd, "d_cd");
    require_positive(raw.d_db, "d_db");
    for (int i = 0; i < kNumLinks; ++i)
    {
        require(raw.m[i] >= 1,
                "Nakagami shape m_" + std::to_string(i + 1)
                    + " must be an integer >= 1");
    }

    double const d_ad = raw.d_ac + raw.d_cd;
    double const d_ab = d_ad + raw.d_db;
    require(raw.d_ad <= 0 || detail::close_rel(raw.d_ad, d_ad),
            "inconsistent topology: d_ad != d_ac + d_cd");
    require(raw.d_ab <= 0 || detail::close_rel(raw.d_ab, d_ab),
            "inconsistent topology: d_ab != d_ad + d_db");
    raw.d_ad = d_ad;
    raw.d_ab = d_ab;

    // Throws on C/L/E_t problems
    make_battery(raw);
    return raw;
}

//---------------------------------------------------------------------------//
/*!
 * Per-link SNR-scaled means.
 *
 * Omega_3 is not a received SNR; it is the mean of 2*E_t*|h_cb|^2/N0, the
 * ST interference seen at the PR normalized to the noise floor.
 */
inline LinkStats derive_link_stats(SystemConfig const& cfg)
{
    auto const pl = [&](double d) { return std::pow(d, -cfg.alpha); };
    double const d_ad = cfg.d_ac + cfg.d_cd;
    double const d_ab = d_ad + cfg.d_db;
    double const li = cfg.N0 + cfg.P_d * cfg.H_dd;

    std::array<double, kNumLinks> const omega{
        cfg.P_a * pl(cfg.d_ac) / cfg.N0,
        cfg.P_d * pl(cfg.d_cd) / cfg.N0,
        2 * cfg.E_t * pl(cfg.d_cb()) / cfg.N0,
        cfg.P_a * pl(d_ad) / li,
        cfg.P_d * pl(cfg.d_db) / cfg.N0,
        cfg.P_a * pl(d_ab) / cfg.N0,
    };

    LinkStats out;
    for (int i = 0; i < kNumLinks; ++i)
    {
        out[i].link_id = i + 1;
        out[i].m = cfg.m[i];
        out[i].Omega = omega[i];
        out[i].beta = cfg.m[i] / omega[i];
    }
    return out;
}

//! Raw distance of each link, same numbering as LinkId.
inline std::array<double, kNumLinks> link_distances(SystemConfig const& cfg)
{
    double const d_ad = cfg.d_ac + cfg.d_cd;
    return {cfg.d_ac, cfg.d_cd, cfg.d_cb(), d_ad, cfg.d_db, d_ad + cfg.d_db};
}

//! Fixed-rate spectral efficiency log2(1 + gamma0).
inline double rate_r0(SystemConfig const& cfg)
{
    return std::log2(1.0 + cfg.gamma0);
}

}  // namespace fdcr
