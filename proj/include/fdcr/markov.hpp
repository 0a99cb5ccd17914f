//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/markov.hpp
//! Discrete battery chain: update rule, transition matrix, stationary law.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "analytic.hpp"
#include "params.hpp"

namespace fdcr
{
//---------------------------------------------------------------------------//
enum class Mode
{
    I,   //!< ST transmits and spends t levels
    II,  //!< ST keeps harvesting through the second slot
};

struct BlockDecision
{
    Mode mode{Mode::II};
    int next_level{0};
    int consumed{0};  //!< Levels spent (t in mode I, else 0)
};

//! Row-stochastic (L+1)x(L+1) matrix, V(i, j) = Pr{j next | i now}.
using TransitionMatrix = Eigen::MatrixXd;

struct StationaryDistribution
{
    Eigen::VectorXd pi;
    double residual{0};  //!< ||V^T pi - pi||_inf
};

//---------------------------------------------------------------------------//
/*!
 * Largest level strictly below E, capped at L.
 *
 * Exact grid points map one level down, so E = 4 eps1 gives level 3.
 */
inline int discretize_energy(double E, BatteryModel const& battery)
{
    if (!(E > 0))
        return 0;
    double const r = E / battery.eps1;
    if (r > battery.L + 1)
        return battery.L;
    int j = static_cast<int>(std::ceil(r)) - 1;
    return std::clamp(j, 0, battery.L);
}

//! One block of level arithmetic with the capacity clamp.
inline BlockDecision step_battery(int level, int lvl_I, int lvl_II_extra,
                                  BatteryModel const& battery)
{
    int const L = battery.L;
    int const t = battery.t;
    // Sums are clamped before adding so huge per-link levels cannot overflow
    int const after_I = std::min(level + std::min(lvl_I, L), L);
    if (level + std::min(lvl_I, L) >= t)
    {
        return {Mode::I, after_I - t, t};
    }
    int const after_II = std::min(after_I + std::min(lvl_II_extra, L), L);
    return {Mode::II, after_II, 0};
}

namespace markov
{
inline constexpr double kRowSumTol = 1e-9;

/*!
 * Build V by pushing the joint per-link level distribution through
 * step_battery.
 *
 * Link-1 level mu and link-2 level nu are harvested in slot one; mode II
 * adds nu again in slot two. Mode-I outcomes depend only on mu + nu, so that
 * part runs over the distribution of the sum; mode II (only reachable while
 * i + mu + nu < t) enumerates the pairs. Throws std::logic_error if any row
 * misses 1.
 */
inline TransitionMatrix
build_transition_matrix(LevelDistributions const& lv,
                        BatteryModel const& battery)
{
    int const L = battery.L;
    int const t = battery.t;
    int const n = L + 1;
    TransitionMatrix V = TransitionMatrix::Zero(n, n);

    // Pr{mu + nu = k}, sums of L or more folded into L
    std::vector<double> sum_dist(n, 0.0);
    for (int nu = 0; nu <= L; ++nu)
    {
        if (lv.link2[nu] == 0)
            continue;
        for (int mu = 0; mu <= L; ++mu)
            sum_dist[std::min(mu + nu, L)] += lv.link1[mu] * lv.link2[nu];
    }

    for (int i = 0; i < n; ++i)
    {
        for (int k = std::max(0, t - i); k <= L; ++k)
        {
            auto const d = step_battery(i, k, 0, battery);
            V(i, d.next_level) += sum_dist[k];
        }
        for (int nu = 0; nu < t - i; ++nu)
        {
            for (int mu = 0; mu + nu < t - i; ++mu)
            {
                auto const d = step_battery(i, mu + nu, nu, battery);
                V(i, d.next_level) += lv.link1[mu] * lv.link2[nu];
            }
        }
    }

    for (int i = 0; i < n; ++i)
    {
        double const sum = V.row(i).sum();
        if (std::abs(sum - 1) > kRowSumTol)
        {
            throw std::logic_error("transition matrix row "
                                   + std::to_string(i) + " sums to "
                                   + std::to_string(sum));
        }
    }
    return V;
}

inline TransitionMatrix build_transition_matrix(LinkStats const& links,
                                                BatteryModel const& battery,
                                                SystemConfig const& cfg)
{
    return build_transition_matrix(
        analytic::level_distributions(battery, links, cfg), battery);
}

inline double stationary_residual(TransitionMatrix const& V,
                                  Eigen::VectorXd const& pi)
{
    return (V.transpose() * pi - pi).cwiseAbs().maxCoeff();
}

/*!
 * Solve (V^T - I + B) pi = b with B all ones and b a ones vector.
 *
 * Throws std::runtime_error when the system is singular, i.e. the chain has
 * more than one closed class.
 */
inline StationaryDistribution stationary_distribution(TransitionMatrix const& V)
{
    auto const n = V.rows();
    Eigen::MatrixXd A = V.transpose() - Eigen::MatrixXd::Identity(n, n)
                        + Eigen::MatrixXd::Ones(n, n);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
    if (!(lu.rcond() > 1e-13))
    {
        throw std::runtime_error("stationary distribution: singular system, "
                                 "chain is not irreducible");
    }
    Eigen::VectorXd pi = lu.solve(Eigen::VectorXd::Ones(n));
    for (auto& p : pi)
    {
        if (p < 0)
        {
            if (p < -1e-12)
                throw std::runtime_error("stationary distribution: negative "
                                         "component");
            p = 0;
        }
    }
    pi /= pi.sum();
    return {pi, stationary_residual(V, pi)};
}

/*!
 * Stationary law by iterating the lazy chain (I + V)/2 from uniform.
 *
 * Laziness removes periodicity without changing the fixed point.
 */
inline StationaryDistribution
power_iteration(TransitionMatrix const& V, int max_steps = 100000,
                double tol = 1e-15)
{
    auto const n = V.rows();
    Eigen::MatrixXd const Vt = V.transpose();
    Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / n);
    for (int step = 0; step < max_steps; ++step)
    {
        Eigen::VectorXd next = 0.5 * (pi + Vt * pi);
        next /= next.sum();
        double const change = (next - pi).cwiseAbs().maxCoeff();
        pi = std::move(next);
        if (change < tol)
            break;
    }
    return {pi, stationary_residual(V, pi)};
}

//! Write V and pi as CSV (matrix rows, then a "pi" row).
inline void dump_chain_csv(TransitionMatrix const& V,
                           StationaryDistribution const& pi,
                           std::string const& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < V.rows(); ++i)
    {
        out << "V" << i;
        for (Eigen::Index j = 0; j < V.cols(); ++j)
            out << ',' << V(i, j);
        out << '\n';
    }
    out << "pi";
    for (auto p : pi.pi)
        out << ',' << p;
    out << '\n';
    if (!out)
        throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace markov
}  // namespace fdcr
