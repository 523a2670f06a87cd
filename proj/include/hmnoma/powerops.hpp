// SPDX-License-Identifier: Apache-2.0
//
// hmnoma: downlink NOMA and massive MIMO comparison toolkit
// Copyright (C) 2026 The hmnoma authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef HMNOMA_POWEROPS_HPP
#define HMNOMA_POWEROPS_HPP

#include "hmnoma/beamrate.hpp"

#include <memory>
#include <span>
#include <vector>

namespace hmnoma
{
    struct PowerAllocation
    {
        std::vector<double> p;
        double budget = 0.0;
        double objective = 0.0; // sum rate, bits/symbol
        double water_level = 0.0;

        double total() const;
    };

    /// Maximizes tau sum log2(1 + g_k p_k) s.t. sum p <= budget by sort-and-threshold:
    /// p_k = max(0, nu - 1/g_k) with the level nu set by the budget. Zero gains get zero power.
    /// Throws DomainError when no gain is positive or any gain is negative.
    PowerAllocation waterfill(std::span<const double> gains, double budget, double tau = 1.0);

    /// NOMA sum-rate optimum: every edge gets zero power and the centers water-fill over
    /// gains beta_k (M + 1 - K/2) (gamma-weighted when estimates are used).
    PowerAllocation noma_sumrate_alloc(std::span<const double> beta, int antennas, double budget, double tau);
    PowerAllocation noma_sumrate_alloc(std::span<const double> beta, std::span<const double> gamma,
                                       int antennas, double budget, double tau);

    /// mMIMO sum-rate optimum of the closed-form ZF bound. The bound's denominators depend only on
    /// sum(p), and the objective grows with it, so the budget is spent in full and the problem is
    /// water-filling over (M-K) beta gamma / (beta (1-gamma) P + 1).
    PowerAllocation mmimo_sumrate_alloc(std::span<const double> beta, std::span<const double> gamma,
                                        int antennas, double budget, double tau);
    PowerAllocation mmimo_sumrate_alloc(std::span<const double> beta, int antennas, double budget, double tau);

    struct TwoUserZf
    {
        double p1 = 0.0;
        double p2 = 0.0;
        bool edge_served = false; // p_max >= (beta1 - beta2) / (beta1 beta2 (M - 2))
    };

    TwoUserZf two_user_zf_powers(double beta1, double beta2, int antennas, double budget);

    struct TwoUserRates
    {
        double mmimo = 0.0;
        double noma = 0.0;
        bool edge_served = false;
    };

    TwoUserRates two_user_max_rates(double beta1, double beta2, int antennas, double budget, double tau);

    struct CrossoverRoots
    {
        double lower = 0.0; // a1
        double upper = 0.0; // a2
    };

    CrossoverRoots crossover_roots(double beta1, double beta2, double budget);

    /// Smallest M from which the two-user mMIMO optimum beats NOMA: ceil(a2).
    int crossover_antennas(double beta1, double beta2, double budget);

    /// Sum-rate allocation for a beam layout with exact ZF among its basis: paired edges are
    /// switched off and the served users water-fill over beta_k |h_k^H v_k|^2.
    PowerAllocation layout_sumrate_alloc(const LinkGains &g, double budget, double tau = 1.0);

    /// LOS sum-rate allocation. mMIMO water-fills over beta_k / [(H^H H)^{-1}]_kk; NOMA and
    /// HmNOMA go through `layout_sumrate_alloc` with ZF over the layout's basis.
    PowerAllocation los_sumrate_alloc(const CMatrix &h, std::span<const double> beta, double budget,
                                      Scheme scheme, const BeamLayout &layout);
    PowerAllocation los_sumrate_alloc(const CMatrix &h, std::span<const double> beta, double budget,
                                      Scheme scheme);

    // ---- max-min with rate ratio ----

    // SINR structure seen by the power control. `interference_over_gain` returns I_k(p) such
    // that SINR_k = p_k / I_k(p); I_k must be positive, monotone and scalable.
    class SinrModel
    {
    public:
        virtual ~SinrModel() = default;

        virtual int users() const = 0;
        virtual UserClass user_class(int k) const = 0;
        virtual double tau() const = 0;

        /// With `sic` set, paired edges also need their symbol decodable at the partner
        /// center, so I_k is the larger of the two requirements.
        virtual double interference_over_gain(std::span<const double> p, int k, bool sic) const = 0;

        double sinr(std::span<const double> p, int k, bool sic) const;
        double rate(std::span<const double> p, int k, bool sic) const;
    };

    // Instantaneous SINRs of a beam layout
    class BeamSinrModel final : public SinrModel
    {
    public:
        BeamSinrModel(LinkGains gains, double tau);

        int users() const override { return gains_.users(); }
        UserClass user_class(int k) const override;
        double tau() const override { return tau_; }
        double interference_over_gain(std::span<const double> p, int k, bool sic) const override;

        const LinkGains &gains() const { return gains_; }

    private:
        LinkGains gains_;
        double tau_;
    };

    // NLOS mMIMO closed-form bound: I_k = (beta_k (1 - gamma_k) sum(p) + 1) / ((M - K) beta_k gamma_k)
    class ZfBoundSinrModel final : public SinrModel
    {
    public:
        ZfBoundSinrModel(std::vector<double> beta, std::vector<double> gamma, int antennas, double tau);

        int users() const override { return static_cast<int>(beta_.size()); }
        UserClass user_class(int k) const override;
        double tau() const override { return tau_; }
        double interference_over_gain(std::span<const double> p, int k, bool sic) const override;

        // I_k = a_k sum(p) + b_k
        double slope(int k) const;
        double offset(int k) const;

    private:
        std::vector<double> beta_;
        std::vector<double> gamma_;
        std::vector<UserClass> cls_;
        int antennas_;
        double tau_;
    };

    // NLOS NOMA upper-bound forms with groups (k, k + K/2)
    class NomaBoundSinrModel final : public SinrModel
    {
    public:
        NomaBoundSinrModel(std::vector<double> beta, std::vector<double> gamma, int antennas, double tau);

        int users() const override { return static_cast<int>(beta_.size()); }
        UserClass user_class(int k) const override;
        double tau() const override { return tau_; }
        double interference_over_gain(std::span<const double> p, int k, bool sic) const override;

    private:
        std::vector<double> beta_;
        std::vector<double> center_gain_;
        double tau_;
    };

    enum class RatioMode
    {
        Rate, // R_edge >= c mu
        Sinr  // SINR_center = sinr_ratio * SINR_edge
    };

    struct MaxMinOptions
    {
        double rate_ratio = 0.05;
        RatioMode mode = RatioMode::Rate;
        double sinr_ratio = 100.0;
        bool sic_constraint = true;
        double tol = 1e-6;       // bisection width on mu, bits
        int max_iterations = 10000; // power-control cap per feasibility check
        bool trace = false;
    };

    struct BisectionStep
    {
        double lo = 0.0;
        double hi = 0.0;
        bool feasible = false;
        int iterations = 0;
    };

    struct MaxMinSolution
    {
        double mu = 0.0;
        double rate_ratio = 0.0;
        std::vector<double> p;
        bool feasible = false;
        int bisection_steps = 0;
        int power_iterations = 0;
        std::vector<BisectionStep> trace;
    };

    struct FeasibilityResult
    {
        bool feasible = false;
        std::vector<double> p;
        int iterations = 0;
    };

    /// Fixed-point power control p <- t_k I_k(p) from p = 0. Feasible iff it converges with
    /// sum(p) <= budget.
    FeasibilityResult power_control(const SinrModel &model, std::span<const double> targets,
                                    double budget, bool sic, int max_iterations);

    /// SINR targets for a center rate target mu.
    std::vector<double> sinr_targets(const SinrModel &model, double mu, const MaxMinOptions &opt);

    /// Maximizes mu s.t. every center reaches mu, every edge c mu, sum p <= budget, by bisection on
    /// mu with a power-control feasibility check. Throws DomainError if c is outside (0, 1).
    MaxMinSolution maxmin_solve(const SinrModel &model, double budget, const MaxMinOptions &opt = {});

} // namespace hmnoma

#endif
