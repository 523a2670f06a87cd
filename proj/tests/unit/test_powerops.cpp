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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hmnoma/beamrate.hpp"
#include "hmnoma/channel.hpp"
#include "hmnoma/powerops.hpp"
#include "hmnoma/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

using namespace hmnoma;

namespace
{
    double sum_log(const std::vector<double> &g, const std::vector<double> &p)
    {
        double r = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            r += std::log2(1.0 + g[k] * p[k]);
        return r;
    }

    // Exhaustive search over the simplex sum(p) <= P with step P / n
    double grid_waterfill(const std::vector<double> &g, double P, int n)
    {
        const double h = P / n;
        double best = 0.0;
        if (g.size() == 2)
        {
            for (int i = 0; i <= n; ++i)
                best = std::max(best, sum_log(g, {i * h, (n - i) * h}));
        }
        else
        {
            for (int i = 0; i <= n; ++i)
                for (int j = 0; i + j <= n; ++j)
                    best = std::max(best, sum_log(g, {i * h, j * h, (n - i - j) * h}));
        }
        return best;
    }

    double kkt_residual(const std::vector<double> &g, const PowerAllocation &a)
    {
        double level = -1.0, worst = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (a.p[k] > 0.0)
            {
                const double m = g[k] / (1.0 + g[k] * a.p[k]);
                if (level < 0.0)
                    level = m;
                worst = std::max(worst, std::abs(m - level) / level);
            }
        for (std::size_t k = 0; k < g.size(); ++k)
            if (a.p[k] == 0.0)
                worst = std::max(worst, (g[k] - level) / level);
        return worst;
    }
} // namespace

TEST_CASE("waterfill examples")
{
    const auto a = waterfill(std::vector<double>{1.0, 1.0}, 2.0);
    CHECK(a.p[0] == doctest::Approx(1.0));
    CHECK(a.p[1] == doctest::Approx(1.0));

    const auto b = waterfill(std::vector<double>{4.0, 1.0}, 1.0);
    CHECK(b.p[0] == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(b.p[1] == doctest::Approx(0.125).epsilon(1e-12));
    CHECK(b.water_level == doctest::Approx(1.125));
    CHECK(std::abs(b.objective - grid_waterfill({4.0, 1.0}, 1.0, 10000)) < 1e-3);

    const auto c = waterfill(std::vector<double>{10.0, 0.001}, 0.1);
    CHECK(c.p[0] == doctest::Approx(0.1));
    CHECK(c.p[1] == 0.0);

    const auto t = waterfill(std::vector<double>{4.0, 1.0}, 1.0, 0.9);
    CHECK(t.objective == doctest::Approx(0.9 * b.objective));

    const auto z = waterfill(std::vector<double>{0.0, 2.0, 0.0}, 3.0);
    CHECK(z.p == std::vector<double>{0.0, 3.0, 0.0});

    CHECK_THROWS_AS(waterfill(std::vector<double>{}, 1.0), DomainError);
    CHECK_THROWS_AS(waterfill(std::vector<double>{0.0, 0.0}, 1.0), DomainError);
    CHECK_THROWS_AS(waterfill(std::vector<double>{1.0, -1.0}, 1.0), DomainError);
}

TEST_CASE("waterfill against a grid search and the KKT conditions")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> lg(-3.0, 2.0), lp(-1.0, 1.5);
    for (int t = 0; t < 60; ++t)
    {
        const int K = t % 2 ? 2 : 3;
        std::vector<double> g(static_cast<std::size_t>(K));
        for (auto &x : g)
            x = std::pow(10.0, lg(rng));
        const double P = std::pow(10.0, lp(rng));
        const auto a = waterfill(g, P);
        CHECK(a.total() == doctest::Approx(P).epsilon(1e-12));
        CHECK(kkt_residual(g, a) < 1e-8);
        const double grid = grid_waterfill(g, P, 1000);
        CHECK(a.objective >= grid - 1e-12);
        CHECK(a.objective - grid < 1e-3);
    }
}

TEST_CASE("NOMA sum-rate allocation switches edges off")
{
    const std::vector<double> beta = {1.0, 0.5, 0.02, 0.01};
    const auto a = noma_sumrate_alloc(beta, 10, 4.0, 0.9);
    CHECK(a.p[2] == 0.0);
    CHECK(a.p[3] == 0.0);
    CHECK(a.total() == doctest::Approx(4.0));

    const auto eq = noma_sumrate_alloc(std::vector<double>{0.3, 0.3, 0.01, 0.02}, 10, 2.0, 1.0);
    CHECK(eq.p[0] == doctest::Approx(1.0));
    CHECK(eq.p[1] == doctest::Approx(1.0));

    const auto two = noma_sumrate_alloc(std::vector<double>{0.4, 0.01}, 25, 3.0, 0.98);
    CHECK(two.p[0] == 3.0);
    CHECK(two.objective == doctest::Approx(0.98 * std::log2(1.0 + 3.0 * 0.4 * 25.0)));
}

namespace
{
    double noma_sum(const std::vector<double> &beta, const std::vector<double> &p, int M)
    {
        const auto r = rate_noma_nlos_ub(p, beta, M, 1.0);
        return std::accumulate(r.begin(), r.end(), 0.0);
    }
} // namespace

TEST_CASE("NOMA allocation beats exhaustive search on two users")
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 40; ++t)
    {
        const double b1 = 0.2 + u(rng), b2 = b1 * (0.01 + 0.5 * u(rng));
        const double P = 0.5 + 20.0 * u(rng);
        const int M = 2 + static_cast<int>(20 * u(rng));
        const std::vector<double> beta = {b1, b2};
        const auto a = noma_sumrate_alloc(beta, M, P, 1.0);
        const int n = 1000;
        double best = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j)
                best = std::max(best, noma_sum(beta, {i * P / n, j * P / n}, M));
        CHECK(a.objective >= best - 1e-12);
        CHECK(a.objective - best < 1e-3);
    }
}

TEST_CASE("NOMA allocation beats exhaustive search on four users")
{
    // Rates grow with total power, so the search runs over the sum(p) = P face
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 2; ++t)
    {
        const std::vector<double> beta = {0.5 + u(rng), 0.3 + u(rng), 0.02 * u(rng) + 0.01, 0.05 * u(rng) + 0.01};
        const double P = 1.0 + 5.0 * u(rng);
        const int M = 6;
        const auto a = noma_sumrate_alloc(beta, M, P, 1.0);
        const int n = 400;
        const double h = P / n;
        const double g1 = beta[0] * (M - 1), g2 = beta[1] * (M - 1);
        double best = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; i + j <= n; ++j)
            {
                const double p1 = i * h, p2 = j * h;
                const double centers = std::log2(1.0 + p1 * g1) + std::log2(1.0 + p2 * g2);
                const double i3 = p1 * beta[2] + 1.0, i4 = p2 * beta[3] + 1.0;
                for (int l = 0; i + j + l <= n; ++l)
                {
                    const double e1 = l * h, e2 = (n - i - j - l) * h;
                    best = std::max(best, centers + std::log2(1.0 + e1 * beta[2] / i3) + std::log2(1.0 + e2 * beta[3] / i4));
                }
            }
        CHECK(a.objective >= best - 1e-12);
        CHECK(a.objective - best < 1e-3);
    }
}

TEST_CASE("mMIMO NLOS sum-rate allocation")
{
    const std::vector<double> beta = {1.0, 0.1, 0.01};
    const auto a = mmimo_sumrate_alloc(beta, 10, 5.0, 0.97);
    const auto w = waterfill(std::vector<double>{7.0, 0.7, 0.07}, 5.0, 0.97);
    CHECK(a.objective == doctest::Approx(w.objective).epsilon(1e-14));

    const std::vector<double> gamma = {0.9, 0.5, 0.3};
    const auto e = mmimo_sumrate_alloc(beta, gamma, 10, 5.0, 1.0);
    CHECK(e.total() == doctest::Approx(5.0));
    const auto r = rate_mmimo_nlos_lb(e.p, beta, gamma, 10, 1.0);
    CHECK(std::accumulate(r.begin(), r.end(), 0.0) == doctest::Approx(e.objective).epsilon(1e-12));
}

TEST_CASE("two-user ZF powers")
{
    const auto eq = two_user_zf_powers(0.3, 0.3, 10, 4.0);
    CHECK(eq.p1 == doctest::Approx(2.0));

    const auto a = two_user_zf_powers(1.0, 0.1, 12, 1.0);
    CHECK(a.p1 == doctest::Approx(0.95).epsilon(1e-12));
    CHECK(a.p2 == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(a.edge_served);

    // Grid oracle on p1 at 1e-5 resolution
    double best = -1.0, arg = 0.0;
    for (int i = 0; i <= 100000; ++i)
    {
        const double p1 = i * 1e-5;
        const double r = std::log2(1.0 + 10.0 * p1) + std::log2(1.0 + 10.0 * 0.1 * (1.0 - p1));
        if (r > best)
        {
            best = r;
            arg = p1;
        }
    }
    CHECK(std::abs(arg - a.p1) < 1e-4);

    const auto tiny = two_user_zf_powers(1.0, 0.1, 12, 0.01);
    CHECK(tiny.p1 == 0.01);
    CHECK(tiny.p2 == 0.0);
    CHECK_FALSE(tiny.edge_served);
    const auto r = two_user_max_rates(1.0, 0.1, 12, 0.01, 0.9);
    CHECK(r.mmimo == doctest::Approx(0.9 * std::log2(1.0 + 0.01 * 10.0)));

    CHECK_THROWS_AS(two_user_zf_powers(1.0, 0.1, 2, 1.0), DomainError);
    CHECK_THROWS_AS(two_user_zf_powers(0.1, 1.0, 8, 1.0), DomainError);
}

TEST_CASE("two-user closed forms agree with water-filling")
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t)
    {
        const double b1 = 0.1 + u(rng), b2 = b1 * (0.005 + u(rng) * 0.9);
        const double P = std::pow(10.0, 3.0 * u(rng) - 1.0);
        const int M = 3 + static_cast<int>(40 * u(rng));
        const double tau = 0.9 + 0.1 * u(rng);
        const auto r = two_user_max_rates(b1, b2, M, P, tau);
        const auto w = waterfill(std::vector<double>{b1 * (M - 2), b2 * (M - 2)}, P, tau);
        CHECK(r.mmimo == doctest::Approx(w.objective).epsilon(1e-9));
        CHECK(r.noma == doctest::Approx(tau * std::log2(1.0 + P * b1 * M)).epsilon(1e-14));
        const auto zf = two_user_zf_powers(b1, b2, M, P);
        CHECK(zf.p1 == doctest::Approx(w.p[0]).epsilon(1e-9));
    }
}

namespace
{
    // First M from which mMIMO never loses again
    int sweep_crossover(double b1, double b2, double P)
    {
        int last_loss = 2;
        for (int M = 3; M < 5000; ++M)
        {
            const auto r = two_user_max_rates(b1, b2, M, P, 1.0);
            if (r.mmimo < r.noma)
                last_loss = M;
        }
        return last_loss + 1;
    }
} // namespace

TEST_CASE("crossover antennas")
{
    CHECK(crossover_antennas(1.0, 1.0, 1.0) == 5);
    CHECK(crossover_antennas(1.0, 0.1, 1.0) == 20);
    CHECK(sweep_crossover(1.0, 1.0, 1.0) == 5);
    CHECK(sweep_crossover(1.0, 0.1, 1.0) == 20);

    const auto roots = crossover_roots(1.0, 0.1, 1.0);
    CHECK(roots.upper == doctest::Approx(19.944).epsilon(1e-4));
    CHECK(roots.lower < roots.upper);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 50; ++t)
    {
        const double b1 = 0.5 + u(rng), b2 = b1 * (0.02 + 0.9 * u(rng)), P = 0.2 + 10.0 * u(rng);
        const int mstar = crossover_antennas(b1, b2, P);
        CHECK(sweep_crossover(b1, b2, P) <= mstar);
        const auto at = two_user_max_rates(b1, b2, mstar, P, 1.0);
        CHECK(at.mmimo >= at.noma);
    }
}

TEST_CASE("two-user NOMA sum rate grows with center power")
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 100; ++t)
    {
        const double b1 = 0.1 + u(rng), b2 = b1 * u(rng) * 0.9 + 1e-3, P = 0.1 + 10.0 * u(rng);
        const int M = 2 + static_cast<int>(30 * u(rng));
        REQUIRE(M * b1 > b2);
        const double p1 = P * (0.01 + 0.98 * u(rng)), h = 1e-6 * P;
        auto f = [&](double x) { return noma_sum({b1, b2}, {x, P - x}, M); };
        CHECK((f(p1 + h) - f(p1 - h)) / (2.0 * h) > 0.0);
    }
}

TEST_CASE("LOS sum-rate allocation")
{
    const CMatrix orth = gen_los({0.0, std::asin(0.5), std::asin(-0.5), std::asin(1.0)}, 4, 0.5).h;
    const std::vector<double> beta = {1.0, 0.5, 0.05, 0.02};
    const auto a = los_sumrate_alloc(orth, beta, 2.0, Scheme::MMimo);
    const auto w = waterfill(std::vector<double>{4.0, 2.0, 0.2, 0.08}, 2.0);
    for (int k = 0; k < 4; ++k)
        CHECK(a.p[k] == doctest::Approx(w.p[k]).epsilon(1e-9));

    const CMatrix h = gen_los({0.3, 1.9, 2.2, 4.4}, 16, 0.5).h;
    const auto n = los_sumrate_alloc(h, beta, 2.0, Scheme::Noma);
    CHECK(n.p[2] == 0.0);
    CHECK(n.p[3] == 0.0);
    CHECK_THROWS_AS(los_sumrate_alloc(h, beta, 2.0, Scheme::HmNoma), ContractViolation);

    // Nearly parallel users: ZF has to burn most of the gain
    const double s = 0.4;
    const CMatrix par = gen_los({std::asin(s), std::asin(s + 0.001)}, 16, 0.5).h;
    const std::vector<double> b2 = {1.0, 0.05};
    const auto pm = los_sumrate_alloc(par, b2, 10.0, Scheme::MMimo);
    const auto pn = los_sumrate_alloc(par, b2, 10.0, Scheme::Noma);
    CHECK(pn.objective > pm.objective);
}

TEST_CASE("ZF-bound feasibility matches the linear solve")
{
    // p_k = t_k (a_k S + b_k) with S = sum p gives S = sum(t b) / (1 - sum(t a))
    const std::vector<double> beta = {1.0, 0.6, 0.04, 0.01}, gamma = {0.9, 0.8, 0.6, 0.5};
    const ZfBoundSinrModel model(beta, gamma, 12, 0.9);
    const std::vector<double> t = {3.0, 2.5, 0.4, 0.2};
    double ta = 0.0, tb = 0.0;
    for (int k = 0; k < 4; ++k)
    {
        ta += t[k] * model.slope(k);
        tb += t[k] * model.offset(k);
    }
    REQUIRE(ta < 1.0);
    const double S = tb / (1.0 - ta);
    const auto fr = power_control(model, t, 1e6, false, 10000);
    REQUIRE(fr.feasible);
    for (int k = 0; k < 4; ++k)
        CHECK(std::abs(fr.p[k] - t[k] * (model.slope(k) * S + model.offset(k))) < 1e-8 * S);
    CHECK_FALSE(power_control(model, t, 0.5 * S, false, 10000).feasible);
}

namespace
{
    LinkGains random_gains(std::mt19937_64 &rng, int M, int K, const BeamLayout &layout)
    {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<double> beta(static_cast<std::size_t>(K));
        for (int k = 0; k < K; ++k)
            beta[k] = k < K / 2 ? 1e-10 * (2.0 + 8.0 * u(rng)) : 1e-11 * (0.3 + 0.7 * u(rng));
        const CMatrix h = gen_nlos(M, K, rng).h;
        return link_gains(h, build_beamformer(h, layout, Scheme::Noma), beta);
    }
} // namespace

TEST_CASE("max-min degenerate and symmetric cases")
{
    // One center: mu is its full-budget rate
    const CMatrix h1 = gen_los({0.8}, 8, 0.5).h;
    const BeamSinrModel solo(link_gains(h1, build_beamformer(h1, BeamLayout::mmimo(1), Scheme::MMimo), std::vector<double>{0.5}), 1.0);
    const auto s1 = maxmin_solve(solo, 3.0);
    CHECK(s1.feasible);
    CHECK(std::abs(s1.mu - std::log2(1.0 + 3.0 * 0.5 * 8.0)) < 1e-6);

    // Two equal users on orthogonal channels with c -> 1: equal split
    const CMatrix h2 = gen_los({0.0, std::numbers::pi / 2}, 2, 0.5).h;
    const BeamSinrModel sym(link_gains(h2, build_beamformer(h2, BeamLayout::mmimo(2), Scheme::MMimo), std::vector<double>{1.0, 1.0}), 1.0);
    MaxMinOptions opt;
    opt.rate_ratio = 1.0 - 1e-12;
    const auto s2 = maxmin_solve(sym, 4.0, opt);
    CHECK(std::abs(s2.mu - std::log2(1.0 + 2.0 * 2.0)) < 1e-5);
    CHECK(s2.p[0] == doctest::Approx(s2.p[1]).epsilon(1e-5));

    opt.rate_ratio = 1.0;
    CHECK_THROWS_AS(maxmin_solve(sym, 4.0, opt), DomainError);
    opt.rate_ratio = 0.0;
    CHECK_THROWS_AS(maxmin_solve(sym, 4.0, opt), DomainError);
}

TEST_CASE("max-min solutions meet their constraints")
{
    std::mt19937_64 rng(7);
    const double P = 1e11;
    for (int t = 0; t < 30; ++t)
    {
        const auto layout = t % 2 ? BeamLayout::noma(10) : BeamLayout::mmimo(10);
        const BeamSinrModel model(random_gains(rng, 12, 10, layout), 0.9);
        MaxMinOptions opt;
        opt.mode = t % 3 == 0 ? RatioMode::Sinr : RatioMode::Rate;
        opt.sic_constraint = t % 4 != 1;
        const auto sol = maxmin_solve(model, P, opt);
        REQUIRE(sol.feasible);
        CHECK(std::accumulate(sol.p.begin(), sol.p.end(), 0.0) <= P * (1.0 + 1e-9));
        const auto targets = sinr_targets(model, sol.mu, opt);
        for (int k = 0; k < 10; ++k)
        {
            const double need = 0.9 * std::log2(1.0 + targets[k]);
            CHECK(model.rate(sol.p, k, opt.sic_constraint) >= need - 1e-6);
        }
    }
}

TEST_CASE("feasibility is monotone in mu")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const MaxMinOptions opt;
    for (int t = 0; t < 20; ++t)
    {
        const BeamSinrModel model(random_gains(rng, 12, 10, BeamLayout::noma(10)), 0.9);
        const double P = 1e11;
        const double mu_star = maxmin_solve(model, P, opt).mu;
        for (int s = 0; s < 10; ++s)
        {
            const double a = 2.0 * mu_star * u(rng), b = a * u(rng);
            const bool fa = power_control(model, sinr_targets(model, a, opt), P, true, 10000).feasible;
            const bool fb = power_control(model, sinr_targets(model, b, opt), P, true, 10000).feasible;
            if (fa)
                CHECK(fb);
        }
    }
}

TEST_CASE("max-min trace and edge targets")
{
    std::mt19937_64 rng(9);
    const BeamSinrModel model(random_gains(rng, 12, 10, BeamLayout::mmimo(10)), 0.9);
    MaxMinOptions opt;
    opt.trace = true;
    const auto sol = maxmin_solve(model, 1e11, opt);
    REQUIRE(!sol.trace.empty());
    CHECK(static_cast<int>(sol.trace.size()) == sol.bisection_steps);
    CHECK(sol.trace.back().hi - sol.trace.back().lo <= 2.0 * opt.tol);

    const auto t = sinr_targets(model, 1.8, opt);
    CHECK(t[0] == doctest::Approx(std::exp2(1.8 / 0.9) - 1.0));
    CHECK(t[7] == doctest::Approx(std::exp2(0.05 * 1.8 / 0.9) - 1.0));
    opt.mode = RatioMode::Sinr;
    const auto ts = sinr_targets(model, 1.8, opt);
    CHECK(ts[7] == doctest::Approx(ts[0] / 100.0));
}

TEST_CASE("NOMA bound model with the SIC constraint")
{
    const std::vector<double> beta = {1.0, 0.02}, gamma = {1.0, 1.0};
    const NomaBoundSinrModel model(beta, gamma, 10, 1.0);
    const std::vector<double> p = {2.0, 5.0};
    CHECK(model.sinr(p, 0, true) == doctest::Approx(2.0 * 10.0).epsilon(1e-12));
    CHECK(model.sinr(p, 1, false) == doctest::Approx(5.0 * 0.02 / (2.0 * 0.02 + 1.0)).epsilon(1e-12));
    CHECK(model.sinr(p, 1, true) <= model.sinr(p, 1, false));
}
