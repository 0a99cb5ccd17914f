//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/config_io.hpp
//! Flat key = value configuration files (a TOML subset).
//---------------------------------------------------------------------------//
#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>

#include "params.hpp"

namespace fdcr
{
namespace config_io
{
namespace detail
{
inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

//! Drop a trailing comment that is not inside a string.
inline std::string_view strip_comment(std::string_view s)
{
    bool quoted = false;
    for (std::size_t i = 0; i < s.size(); ++i)
    {
        if (s[i] == '"')
            quoted = !quoted;
        else if (s[i] == '#' && !quoted)
            return s.substr(0, i);
    }
    return s;
}

[[noreturn]] inline void fail(int line, std::string const& msg)
{
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

inline double parse_number(std::string_view s, int line)
{
    s = trim(s);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    double v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty())
        fail(line, "expected a number, got '" + std::string(s) + "'");
    return v;
}

inline int parse_int(std::string_view s, int line)
{
    s = trim(s);
    int v = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty())
        fail(line, "expected an integer, got '" + std::string(s) + "'");
    return v;
}

inline std::string_view unquote(std::string_view s, int line)
{
    if (s.size() < 2 || s.back() != '"')
        fail(line, "unterminated string");
    return s.substr(1, s.size() - 2);
}

/*!
 * Power value: a bare number is watts, a string carries a unit,
 * e.g. "22 dBm" or "0.1 W".
 */
inline double parse_power(std::string_view s, int line)
{
    s = trim(s);
    if (s.empty() || s.front() != '"')
        return parse_number(s, line);
    auto body = trim(unquote(s, line));
    auto ends_with = [&](std::string_view suffix) {
        return body.size() > suffix.size()
               && body.substr(body.size() - suffix.size()) == suffix;
    };
    if (ends_with("dBm"))
        return dbm_to_watts(parse_number(body.substr(0, body.size() - 3), line));
    if (ends_with("mW"))
        return 1e-3 * parse_number(body.substr(0, body.size() - 2), line);
    if (ends_with("W"))
        return parse_number(body.substr(0, body.size() - 1), line);
    fail(line, "power needs a dBm, mW or W suffix: '" + std::string(body) + "'");
}

inline bool parse_bool(std::string_view s, int line)
{
    s = trim(s);
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    fail(line, "expected true or false, got '" + std::string(s) + "'");
}

inline std::array<int, kNumLinks> parse_shapes(std::string_view s, int line)
{
    s = trim(s);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        fail(line, "m must be an array like [3, 3, 3, 1, 1, 1]");
    s = s.substr(1, s.size() - 2);
    std::array<int, kNumLinks> out{};
    int n = 0;
    while (!trim(s).empty())
    {
        auto comma = s.find(',');
        auto item = s.substr(0, comma);
        if (n == kNumLinks)
            fail(line, "m has more than 6 entries");
        out[n++] = parse_int(item, line);
        if (comma == std::string_view::npos)
            break;
        s.remove_prefix(comma + 1);
    }
    if (n != kNumLinks)
        fail(line, "m needs exactly 6 entries, got " + std::to_string(n));
    return out;
}

inline void assign(SystemConfig& cfg, std::string_view key,
                   std::string_view value, int line)
{
    auto num = [&] { return parse_number(value, line); };
    auto pow = [&] { return parse_power(value, line); };
    if (key == "P_a")
        cfg.P_a = pow();
    else if (key == "P_d")
        cfg.P_d = pow();
    else if (key == "N0")
        cfg.N0 = pow();
    else if (key == "k")
        cfg.k = num();
    else if (key == "eta")
        cfg.eta = num();
    else if (key == "H_dd")
        cfg.H_dd = num();
    else if (key == "gamma0")
        cfg.gamma0 = num();
    else if (key == "alpha")
        cfg.alpha = num();
    else if (key == "d_ac")
        cfg.d_ac = num();
    else if (key == "d_cd")
        cfg.d_cd = num();
    else if (key == "d_db")
        cfg.d_db = num();
    else if (key == "d_ad")
        cfg.d_ad = num();
    else if (key == "d_ab")
        cfg.d_ab = num();
    else if (key == "m")
        cfg.m = parse_shapes(value, line);
    else if (key == "C")
        cfg.C = num();
    else if (key == "L")
        cfg.L = parse_int(value, line);
    else if (key == "E_t")
        cfg.E_t = num();
    else if (key == "baseline_full_block")
        cfg.baseline_full_block = parse_bool(value, line);
    else
        fail(line, "unknown key '" + std::string(key) + "'");
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Read a config on top of \p base. The result is not validated.
 *
 * Blank lines, # comments and a leading [system] table header are accepted.
 */
inline SystemConfig read_config(std::istream& in, SystemConfig base = {})
{
    using namespace detail;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw))
    {
        ++line;
        auto s = trim(strip_comment(raw));
        if (s.empty() || s == "[system]")
            continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos)
            fail(line, "expected key = value");
        auto key = trim(s.substr(0, eq));
        auto value = trim(s.substr(eq + 1));
        if (key.empty() || value.empty())
            fail(line, "expected key = value");
        assign(base, key, value, line);
    }
    return base;
}

inline SystemConfig read_config_file(std::string const& path,
                                     SystemConfig base = {})
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config '" + path + "'");
    try
    {
        return read_config(in, base);
    }
    catch (ConfigError const& e)
    {
        throw ConfigError(path + ": " + e.what());
    }
}

inline SystemConfig parse_config(std::string const& text, SystemConfig base = {})
{
    std::istringstream in(text);
    return read_config(in, base);
}

//! Serialize every field; powers are written in watts.
inline std::string write_config(SystemConfig const& cfg)
{
    using detail::fmt;
    std::ostringstream os;
    os << "P_a = " << fmt(cfg.P_a) << '\n'
       << "P_d = " << fmt(cfg.P_d) << '\n';
    if (cfg.k)
        os << "k = " << fmt(*cfg.k) << '\n';
    os << "eta = " << fmt(cfg.eta) << '\n'
       << "N0 = " << fmt(cfg.N0) << '\n'
       << "H_dd = " << fmt(cfg.H_dd) << '\n'
       << "gamma0 = " << fmt(cfg.gamma0) << '\n'
       << "alpha = " << fmt(cfg.alpha) << '\n'
       << "d_ac = " << fmt(cfg.d_ac) << '\n'
       << "d_cd = " << fmt(cfg.d_cd) << '\n'
       << "d_db = " << fmt(cfg.d_db) << '\n'
       << "d_ad = " << fmt(cfg.d_ad) << '\n'
       << "d_ab = " << fmt(cfg.d_ab) << '\n'
       << "m = [";
    for (int i = 0; i < kNumLinks; ++i)
        os << (i ? ", " : "") << cfg.m[i];
    os << "]\n"
       << "C = " << fmt(cfg.C) << '\n'
       << "L = " << cfg.L << '\n'
       << "E_t = " << fmt(cfg.E_t) << '\n'
       << "baseline_full_block = "
       << (cfg.baseline_full_block ? "true" : "false") << '\n';
    return os.str();
}

}  // namespace config_io
}  // namespace fdcr
