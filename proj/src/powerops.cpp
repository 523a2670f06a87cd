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

#include "hmnoma/powerops.hpp"
#include "hmnoma/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hmnoma
{
    namespace
    {
        std::size_t idx(int k) { return static_cast<std::size_t>(k); }

        constexpr double kInf = std::numeric_limits<double>::infinity();
    } // namespace

    double PowerAllocation::total() const
    {
        return std::accumulate(p.begin(), p.end(), 0.0);
    }

    PowerAllocation waterfill(std::span<const double> gains, double budget, double tau)
    {
        if (gains.empty())
            throw DomainError("waterfill: no gains");
        if (!(budget >= 0.0))
            throw DomainError("waterfill: budget must be non-negative");
        std::vector<int> order;
        for (std::size_t k = 0; k < gains.size(); ++k)
        {
            if (!(gains[k] >= 0.0) || !std::isfinite(gains[k]))
                throw DomainError("waterfill: gains must be finite and non-negative");
            if (gains[k] > 0.0)
                order.push_back(static_cast<int>(k));
        }
        if (order.empty())
            throw DomainError("waterfill: at least one positive gain required");
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return gains[idx(a)] > gains[idx(b)]; });

        // Largest active set whose weakest member still sits below the water level
        double inv_sum = 0.0;
        std::vector<double> prefix(order.size());
        for (std::size_t i = 0; i < order.size(); ++i)
        {
            inv_sum += 1.0 / gains[idx(order[i])];
            prefix[i] = inv_sum;
        }
        double level = budget + prefix[0];
        for (std::size_t n = order.size(); n >= 1; --n)
        {
            const double nu = (budget + prefix[n - 1]) / static_cast<double>(n);
            if (nu > 1.0 / gains[idx(order[n - 1])] || n == 1)
            {
                level = nu;
                break;
            }
        }

        PowerAllocation out;
        out.budget = budget;
        out.water_level = level;
        out.p.assign(gains.size(), 0.0);
        for (int k : order)
        {
            out.p[idx(k)] = std::max(0.0, level - 1.0 / gains[idx(k)]);
            out.objective += tau * std::log2(1.0 + gains[idx(k)] * out.p[idx(k)]);
        }
        return out;
    }

    PowerAllocation noma_sumrate_alloc(std::span<const double> beta, std::span<const double> gamma,
                                       int antennas, double budget, double tau)
    {
        const int K = static_cast<int>(beta.size());
        if (K < 2 || K % 2 != 0 || gamma.size() != beta.size())
            throw ContractViolation("noma_sumrate_alloc: even user count with matching gamma required");
        const int half = K / 2;
        std::vector<double> gains(idx(half));
        for (int k = 0; k < half; ++k)
            gains[idx(k)] = beta[idx(k)] * noma_center_gain(antennas, K, gamma[idx(k)]);
        const PowerAllocation centers = waterfill(gains, budget, tau);

        PowerAllocation out;
        out.budget = budget;
        out.water_level = centers.water_level;
        out.p.assign(idx(K), 0.0);
        std::copy(centers.p.begin(), centers.p.end(), out.p.begin());
        const auto rates = rate_noma_nlos_ub(out.p, beta, gamma, antennas, tau);
        out.objective = std::accumulate(rates.begin(), rates.end(), 0.0);
        return out;
    }

    PowerAllocation noma_sumrate_alloc(std::span<const double> beta, int antennas, double budget, double tau)
    {
        const std::vector<double> ones(beta.size(), 1.0);
        return noma_sumrate_alloc(beta, ones, antennas, budget, tau);
    }

    PowerAllocation mmimo_sumrate_alloc(std::span<const double> beta, std::span<const double> gamma,
                                        int antennas, double budget, double tau)
    {
        const int K = static_cast<int>(beta.size());
        if (antennas <= K)
            throw DomainError("mmimo_sumrate_alloc: requires M > K");
        if (gamma.size() != beta.size())
            throw ContractViolation("mmimo_sumrate_alloc: gamma size mismatch");
        std::vector<double> gains(beta.size());
        for (std::size_t k = 0; k < beta.size(); ++k)
            gains[k] = (antennas - K) * beta[k] * gamma[k] / (beta[k] * (1.0 - gamma[k]) * budget + 1.0);
        PowerAllocation out = waterfill(gains, budget, tau);
        const auto rates = rate_mmimo_nlos_lb(out.p, beta, gamma, antennas, tau);
        out.objective = std::accumulate(rates.begin(), rates.end(), 0.0);
        return out;
    }

    PowerAllocation mmimo_sumrate_alloc(std::span<const double> beta, int antennas, double budget, double tau)
    {
        const std::vector<double> ones(beta.size(), 1.0);
        return mmimo_sumrate_alloc(beta, ones, antennas, budget, tau);
    }

    // ---- two users ----

    TwoUserZf two_user_zf_powers(double beta1, double beta2, int antennas, double budget)
    {
        if (antennas <= 2)
            throw DomainError("two_user_zf_powers: requires M > 2");
        if (!(beta1 >= beta2 && beta2 > 0.0))
            throw DomainError("two_user_zf_powers: requires beta1 >= beta2 > 0");
        const double mbar = antennas - 2.0;
        const double unconstrained =
            (beta1 - beta2 + budget * beta1 * beta2 * mbar) / (2.0 * beta1 * beta2 * mbar);
        TwoUserZf out;
        out.p1 = std::min(budget, unconstrained);
        out.p2 = budget - out.p1;
        out.edge_served = budget >= (beta1 - beta2) / (beta1 * beta2 * mbar);
        return out;
    }

    TwoUserRates two_user_max_rates(double beta1, double beta2, int antennas, double budget, double tau)
    {
        const TwoUserZf zf = two_user_zf_powers(beta1, beta2, antennas, budget);
        const double mbar = antennas - 2.0;
        TwoUserRates out;
        out.edge_served = zf.edge_served;
        if (zf.edge_served)
        {
            const double s = beta1 + beta2 + budget * beta1 * beta2 * mbar;
            out.mmimo = tau * std::log2(s * s / (4.0 * beta1 * beta2));
        }
        else
        {
            out.mmimo = tau * std::log2(1.0 + budget * beta1 * mbar);
        }
        out.noma = tau * std::log2(1.0 + budget * beta1 * antennas);
        return out;
    }

    CrossoverRoots crossover_roots(double beta1, double beta2, double budget)
    {
        if (!(beta1 > beta2 && beta2 > 0.0 && budget > 0.0))
            throw DomainError("crossover_roots: requires beta1 > beta2 > 0 and budget > 0");
        const double centre = 2.0 + (beta1 - beta2) / (budget * beta1 * beta2);
        const double half_width = 2.0 * std::sqrt(2.0) / std::sqrt(budget * beta2);
        return {centre - half_width, centre + half_width};
    }

    int crossover_antennas(double beta1, double beta2, double budget)
    {
        if (!(beta1 >= beta2 && beta2 > 0.0 && budget > 0.0))
            throw DomainError("crossover_antennas: requires beta1 >= beta2 > 0 and budget > 0");
        const double centre = 2.0 + (beta1 - beta2) / (budget * beta1 * beta2);
        const double half_width = 2.0 * std::sqrt(2.0) / std::sqrt(budget * beta2);
        return static_cast<int>(std::ceil(centre + half_width));
    }

    // ---- layouts / LOS ----

    PowerAllocation layout_sumrate_alloc(const LinkGains &g, double budget, double tau)
    {
        const auto &l = g.layout;
        std::vector<double> gains(idx(g.users()), 0.0);
        for (int k = 0; k < g.users(); ++k)
        {
            const int b = l.beam_of[idx(k)];
            if (b < 0 || l.is_paired_edge(k))
                continue;
            gains[idx(k)] = g.gain(k, b);
        }
        return waterfill(gains, budget, tau);
    }

    PowerAllocation los_sumrate_alloc(const CMatrix &h, std::span<const double> beta, double budget,
                                      Scheme scheme, const BeamLayout &layout)
    {
        if (scheme == Scheme::MMimo)
        {
            const Eigen::VectorXd diag = gram_inverse_diagonal(h);
            std::vector<double> gains(beta.size());
            for (std::size_t k = 0; k < beta.size(); ++k)
                gains[k] = beta[k] / diag(static_cast<Eigen::Index>(k));
            return waterfill(gains, budget);
        }
        const Beamformer bf = build_beamformer(h, layout, scheme);
        return layout_sumrate_alloc(link_gains(h, bf, beta), budget);
    }

    PowerAllocation los_sumrate_alloc(const CMatrix &h, std::span<const double> beta, double budget,
                                      Scheme scheme)
    {
        const int K = static_cast<int>(h.cols());
        if (scheme == Scheme::HmNoma)
            throw ContractViolation("los_sumrate_alloc: HmNOMA needs an explicit layout");
        return los_sumrate_alloc(h, beta, budget, scheme,
                                 scheme == Scheme::Noma ? BeamLayout::noma(K) : BeamLayout::mmimo(K));
    }

    // ---- SINR models ----

    double SinrModel::sinr(std::span<const double> p, int k, bool sic) const
    {
        const double i = interference_over_gain(p, k, sic);
        return std::isfinite(i) ? p[idx(k)] / i : 0.0;
    }

    double SinrModel::rate(std::span<const double> p, int k, bool sic) const
    {
        return tau() * std::log2(1.0 + sinr(p, k, sic));
    }

    BeamSinrModel::BeamSinrModel(LinkGains gains, double tau) : gains_(std::move(gains)), tau_(tau)
    {
        gains_.layout.validate();
    }

    UserClass BeamSinrModel::user_class(int k) const
    {
        return gains_.layout.cls[idx(k)];
    }

    double BeamSinrModel::interference_over_gain(std::span<const double> p, int k, bool sic) const
    {
        const auto &l = gains_.layout;
        const int b = l.beam_of[idx(k)];
        if (b < 0 || !(gains_.gain(k, b) > 0.0))
            return kInf;
        const int skip = l.is_paired_center(k) ? l.sic_partner[idx(k)] : -1;
        double interference = 1.0;
        for (int j = 0; j < users(); ++j)
        {
            const int bj = l.beam_of[idx(j)];
            if (j == k || j == skip || bj < 0)
                continue;
            interference += p[idx(j)] * gains_.gain(k, bj);
        }
        double need = interference / gains_.gain(k, b);
        if (sic && l.is_paired_edge(k))
        {
            const int c = l.sic_partner[idx(k)];
            if (!(gains_.gain(c, b) > 0.0))
                return kInf;
            double at_center = 1.0;
            for (int j = 0; j < users(); ++j)
            {
                const int bj = l.beam_of[idx(j)];
                if (j == k || bj < 0)
                    continue;
                at_center += p[idx(j)] * gains_.gain(c, bj);
            }
            need = std::max(need, at_center / gains_.gain(c, b));
        }
        return need;
    }

    ZfBoundSinrModel::ZfBoundSinrModel(std::vector<double> beta, std::vector<double> gamma, int antennas, double tau)
        : beta_(std::move(beta)), gamma_(std::move(gamma)), antennas_(antennas), tau_(tau)
    {
        if (gamma_.size() != beta_.size())
            throw ContractViolation("ZfBoundSinrModel: gamma size mismatch");
        if (antennas_ <= static_cast<int>(beta_.size()))
            throw DomainError("ZfBoundSinrModel: requires M > K");
        cls_ = default_partition(static_cast<int>(beta_.size()));
    }

    UserClass ZfBoundSinrModel::user_class(int k) const
    {
        return cls_[idx(k)];
    }

    double ZfBoundSinrModel::slope(int k) const
    {
        const int K = users();
        return (1.0 - gamma_[idx(k)]) / ((antennas_ - K) * gamma_[idx(k)]);
    }

    double ZfBoundSinrModel::offset(int k) const
    {
        const int K = users();
        return 1.0 / ((antennas_ - K) * beta_[idx(k)] * gamma_[idx(k)]);
    }

    double ZfBoundSinrModel::interference_over_gain(std::span<const double> p, int k, bool) const
    {
        const double total = std::accumulate(p.begin(), p.end(), 0.0);
        return slope(k) * total + offset(k);
    }

    NomaBoundSinrModel::NomaBoundSinrModel(std::vector<double> beta, std::vector<double> gamma, int antennas, double tau)
        : beta_(std::move(beta)), tau_(tau)
    {
        const int K = static_cast<int>(beta_.size());
        if (K < 2 || K % 2 != 0 || gamma.size() != beta_.size())
            throw ContractViolation("NomaBoundSinrModel: even user count with matching gamma required");
        center_gain_.resize(idx(K / 2));
        for (int k = 0; k < K / 2; ++k)
            center_gain_[idx(k)] = noma_center_gain(antennas, K, gamma[idx(k)]);
    }

    UserClass NomaBoundSinrModel::user_class(int k) const
    {
        return k < users() / 2 ? UserClass::Center : UserClass::Edge;
    }

    double NomaBoundSinrModel::interference_over_gain(std::span<const double> p, int k, bool sic) const
    {
        const int half = users() / 2;
        if (k < half)
            return 1.0 / (beta_[idx(k)] * center_gain_[idx(k)]);
        const int c = k - half;
        double need = (p[idx(c)] * beta_[idx(k)] + 1.0) / beta_[idx(k)];
        if (sic)
        {
            const double gc = beta_[idx(c)] * center_gain_[idx(c)];
            need = std::max(need, (p[idx(c)] * gc + 1.0) / gc);
        }
        return need;
    }

    // ---- max-min ----

    FeasibilityResult power_control(const SinrModel &model, std::span<const double> targets,
                                    double budget, bool sic, int max_iterations)
    {
        const int K = model.users();
        FeasibilityResult out;
        std::vector<double> p(idx(K), 0.0), q(idx(K), 0.0);
        for (int it = 1; it <= max_iterations; ++it)
        {
            double total = 0.0, delta = 0.0, peak = 0.0;
            for (int k = 0; k < K; ++k)
            {
                const double t = targets[idx(k)];
                q[idx(k)] = t > 0.0 ? t * model.interference_over_gain(p, k, sic) : 0.0;
                if (!std::isfinite(q[idx(k)]))
                {
                    out.iterations = it;
                    return out;
                }
                total += q[idx(k)];
                delta = std::max(delta, std::abs(q[idx(k)] - p[idx(k)]));
                peak = std::max(peak, q[idx(k)]);
            }
            out.iterations = it;
            // Iterates increase monotonically, so overshooting the budget is final
            if (total > budget * (1.0 + 1e-12))
                return out;
            std::swap(p, q);
            if (delta <= 1e-13 * peak || peak == 0.0)
            {
                out.feasible = true;
                out.p = std::move(p);
                return out;
            }
        }
        return out;
    }

    std::vector<double> sinr_targets(const SinrModel &model, double mu, const MaxMinOptions &opt)
    {
        const double tau = model.tau();
        const double center = std::exp2(mu / tau) - 1.0;
        const double edge = opt.mode == RatioMode::Rate ? std::exp2(opt.rate_ratio * mu / tau) - 1.0
                                                        : center / opt.sinr_ratio;
        std::vector<double> t(idx(model.users()));
        for (int k = 0; k < model.users(); ++k)
            t[idx(k)] = model.user_class(k) == UserClass::Center ? center : edge;
        return t;
    }

    MaxMinSolution maxmin_solve(const SinrModel &model, double budget, const MaxMinOptions &opt)
    {
        if (!(opt.rate_ratio > 0.0 && opt.rate_ratio < 1.0))
            throw DomainError("maxmin_solve: rate ratio c must lie in (0, 1)");
        if (!(budget > 0.0))
            throw DomainError("maxmin_solve: budget must be positive");
        const int K = model.users();

        // mu can not exceed what any single center reaches with the whole budget
        double hi = kInf;
        bool any_center = false;
        for (int k = 0; k < K; ++k)
        {
            std::vector<double> solo(idx(K), 0.0);
            solo[idx(k)] = budget;
            const double r = model.rate(solo, k, opt.sic_constraint);
            if (model.user_class(k) == UserClass::Center)
            {
                hi = any_center ? std::min(hi, r) : r;
                any_center = true;
            }
            else if (!any_center && opt.mode == RatioMode::Rate)
            {
                hi = std::min(hi, r / opt.rate_ratio);
            }
        }
        if (!std::isfinite(hi))
            hi = 0.0;

        MaxMinSolution sol;
        sol.rate_ratio = opt.rate_ratio;
        sol.p.assign(idx(K), 0.0);
        double lo = 0.0;
        while (hi - lo > opt.tol)
        {
            const double mid = 0.5 * (lo + hi);
            const auto targets = sinr_targets(model, mid, opt);
            FeasibilityResult fr = power_control(model, targets, budget, opt.sic_constraint, opt.max_iterations);
            ++sol.bisection_steps;
            sol.power_iterations += fr.iterations;
            if (opt.trace)
                sol.trace.push_back({lo, hi, fr.feasible, fr.iterations});
            if (fr.feasible)
            {
                lo = mid;
                sol.p = std::move(fr.p);
            }
            else
            {
                hi = mid;
            }
        }
        sol.mu = lo;
        sol.feasible = lo > 0.0;
        return sol;
    }

} // namespace hmnoma
