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

// Acceptance gate. Prints one PASS/FAIL line per criterion; exit status is nonzero if any
// selected criterion fails.
//
//   acceptance                 all criteria
//   acceptance --criterion 4   only criterion 4

#include "hmnoma/beamrate.hpp"
#include "hmnoma/channel.hpp"
#include "hmnoma/harness.hpp"
#include "hmnoma/pairing.hpp"
#include "hmnoma/powerops.hpp"
#include "hmnoma/rng.hpp"
#include "hmnoma/sysmodel.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

using namespace hmnoma;

namespace
{
    struct Verdict
    {
        bool pass = false;
        std::string detail;
    };

    std::string num(double x, int prec = 6)
    {
        std::ostringstream s;
        s.precision(prec);
        s << x;
        return s.str();
    }

    double seconds_since(std::chrono::steady_clock::time_point t0)
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }

    double sum_log(const std::vector<double> &g, const std::vector<double> &p)
    {
        double r = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            r += std::log2(1.0 + g[k] * p[k]);
        return r;
    }

    // ---- 1: closed-form solvers against exhaustive grids ----

    Verdict criterion1()
    {
        const auto t0 = std::chrono::steady_clock::now();
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const int n = 1000; // grid step = budget / 1000
        double wf_gap = 0.0, zf_gap = 0.0, noma_gap = 0.0;
        for (int t = 0; t < 100; ++t)
        {
            // water-filling, 2 or 3 users
            const int K = 2 + t % 2;
            std::vector<double> g(static_cast<std::size_t>(K));
            for (auto &x : g)
                x = std::pow(10.0, 5.0 * u(rng) - 3.0);
            const double P = std::pow(10.0, 2.5 * u(rng) - 1.0);
            const auto wf = waterfill(g, P);
            double best = 0.0;
            const double h = P / n;
            if (K == 2)
                for (int i = 0; i <= n; ++i)
                    best = std::max(best, sum_log(g, {i * h, (n - i) * h}));
            else
                for (int i = 0; i <= n; ++i)
                    for (int j = 0; i + j <= n; ++j)
                        best = std::max(best, sum_log(g, {i * h, j * h, (n - i - j) * h}));
            wf_gap = std::max(wf_gap, std::abs(wf.objective - best));

            // two-user ZF powers: the ZF bound objective over p1
            const double b1 = 0.05 + u(rng), b2 = b1 * (0.005 + 0.99 * u(rng));
            const double PZ = std::pow(10.0, 3.0 * u(rng) - 1.0);
            const int M = 3 + static_cast<int>(40 * u(rng));
            const auto zf = two_user_zf_powers(b1, b2, M, PZ);
            const std::vector<double> gz = {b1 * (M - 2), b2 * (M - 2)};
            double zbest = 0.0;
            for (int i = 0; i <= n; ++i)
                for (int j = 0; i + j <= n; ++j)
                    zbest = std::max(zbest, sum_log(gz, {i * PZ / n, j * PZ / n}));
            zf_gap = std::max(zf_gap, std::abs(sum_log(gz, {zf.p1, zf.p2}) - zbest));

            // NOMA sum-rate allocation, one group
            const double c1 = 0.05 + u(rng), c2 = c1 * (0.005 + 0.99 * u(rng));
            const double PN = std::pow(10.0, 3.0 * u(rng) - 1.0);
            const int MN = 2 + static_cast<int>(40 * u(rng));
            const std::vector<double> beta = {c1, c2};
            const auto na = noma_sumrate_alloc(beta, MN, PN, 1.0);
            double nbest = 0.0;
            for (int i = 0; i <= n; ++i)
                for (int j = 0; i + j <= n; ++j)
                {
                    const auto r = rate_noma_nlos_ub(std::vector<double>{i * PN / n, j * PN / n}, beta, MN, 1.0);
                    nbest = std::max(nbest, r[0] + r[1]);
                }
            noma_gap = std::max(noma_gap, std::abs(na.objective - nbest));
        }
        const double secs = seconds_since(t0);
        const bool ok = wf_gap < 1e-3 && zf_gap < 1e-3 && noma_gap < 1e-3 && secs < 60.0;
        return {ok, "max |closed - grid| bits: waterfill " + num(wf_gap, 3) + ", two-user ZF " + num(zf_gap, 3) +
                        ", NOMA " + num(noma_gap, 3) + " (tol 1e-3); " + num(secs, 3) + " s"};
    }

    // ---- 2: random-matrix expectations ----

    Verdict criterion2()
    {
        auto rng = make_rng(202);
        const int draws = 100000;
        bool ok = true;
        std::string detail;
        for (auto [M, K] : {std::pair{30, 10}, {25, 2}, {12, 6}})
        {
            const auto mm = effective_gain_stats(M, K, draws, rng);
            const auto no = effective_gain_stats(M, K / 2, draws, rng);
            const double em = M - K + 1, en = M + 1 - K / 2;
            const double dm = std::abs(mm.mean / em - 1.0), dn = std::abs(no.mean / en - 1.0);
            ok = ok && dm < 0.02 && dn < 0.02;
            detail += "(" + std::to_string(M) + "," + std::to_string(K) + ") mMIMO " + num(mm.mean, 5) + "/" + num(em) +
                      " NOMA " + num(no.mean, 5) + "/" + num(en) + "; ";
        }
        return {ok, detail + "tol 2%"};
    }

    // ---- 3: two-user crossover antennas ----

    Verdict criterion3()
    {
        SystemConfig cfg;
        const auto d = fixed_user_drop(cfg, {100.0, 350.0});
        const double P = cfg.budget();
        const int mstar = crossover_antennas(d.beta[0], d.beta[1], P);
        const auto roots = crossover_roots(d.beta[0], d.beta[1], P);
        // sign change of the closed-form sweep
        int first_win = -1;
        for (int M = 3; M <= 60; ++M)
        {
            const auto r = two_user_max_rates(d.beta[0], d.beta[1], M, P, 1.0);
            if (r.mmimo >= r.noma && first_win < 0)
                first_win = M;
            if (r.mmimo < r.noma)
                first_win = -1;
        }
        const bool sweep_ok = first_win == mstar;
        const bool ok = mstar == 9 && sweep_ok;
        return {ok, "M* = " + std::to_string(mstar) + " (required 9), sweep sign change at " + std::to_string(first_win) +
                        ", a2 = " + num(roots.upper, 6) + ", P*beta2 = " + num(P * d.beta[1], 4) + ", beta1/beta2 = " +
                        num(10.0 * std::log10(d.beta[0] / d.beta[1]), 4) + " dB"};
    }

    // ---- 4-6: sum-rate crossovers ----

    double worst_relative_se(const ResultTable &t)
    {
        double worst = 0.0;
        for (const auto &r : t.rows)
            if (r.series == "mMIMO" || r.series == "NOMA")
                worst = std::max(worst, r.std_error / r.value);
        return worst;
    }

    Verdict crossover_check(const std::string &id, double lo, double hi, double budget_s)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const auto spec = preset(id);
        const auto t = run_experiment(spec);
        const double secs = seconds_since(t0);
        const auto x = find_crossover(t, "NOMA", "mMIMO");
        const double se = worst_relative_se(t);
        if (!x)
            return {false, id + ": no crossover found"};
        const bool ok = x->interpolated >= lo && x->interpolated <= hi && se < 0.01 && secs < budget_s;
        return {ok, id + ": crossover " + to_string(spec.sweep).data() + " = " + num(x->interpolated, 4) + " (first grid point " +
                        num(x->first_point) + ", bracket [" + num(lo) + ", " + num(hi) + "]), worst std-error " +
                        num(100.0 * se, 3) + "% of mean, " + std::to_string(spec.trials) + " drops/point, " +
                        num(secs, 3) + " s"};
    }

    Verdict criterion4()
    {
        return crossover_check("fig3", 14.0, 18.0, 300.0);
    }

    Verdict criterion5()
    {
        return crossover_check("fig6", 24.0, 32.0, 900.0);
    }

    Verdict criterion6()
    {
        const auto spec = preset("fig7");
        const auto t = run_experiment(spec);
        const auto x = find_crossover(t, "mMIMO", "NOMA");
        const auto pc = t.find("Pc", 36.0);
        if (!x || !pc)
            return {false, "fig7: crossover or P^c(36) missing"};
        const auto m36 = t.find("mMIMO", 36.0), n36 = t.find("NOMA", 36.0);
        const bool ok = x->interpolated >= 15.0 && x->interpolated <= 21.0 && pc->value > 0.05 && m36->value > n36->value;
        return {ok, "fig7: average crossover M = " + num(x->interpolated, 4) + " (first grid point " + num(x->first_point) +
                        ", bracket [15, 21]); P^c(36) = " + num(pc->value, 4) + " +- " + num(pc->std_error, 2) +
                        " with mMIMO " + num(m36->value, 5) + " > NOMA " + num(n36->value, 5)};
    }

    // ---- 7: hybrid dominance on the threshold sweep ----

    Verdict criterion7()
    {
        const auto spec = preset("fig8");
        const auto t = run_experiment(spec);
        const double alpha = 1.0 / (2.0 * spec.config.antennas);
        ResultRow best;
        best.value = -1.0;
        for (const auto &r : t.series("HmNOMA"))
            if (r.value > best.value)
                best = r;
        const double mm = t.series("mMIMO").front().value, nm = t.series("NOMA").front().value;
        const double n_alpha = best.sweep / alpha;
        const bool dominant = best.value >= std::max(mm, nm) - best.std_error;
        const bool in_range = best.sweep > 0.0 && n_alpha <= 10.0 + 1e-9;
        const bool near_alpha = std::abs(n_alpha - 1.0) <= 1.0 + 1e-9 && n_alpha > 0.5;
        return {dominant && in_range && near_alpha,
                "fig8 (M=36): best HmNOMA " + num(best.value, 5) + " +- " + num(best.std_error, 2) + " at nu = " +
                    num(n_alpha, 3) + " alpha; mMIMO " + num(mm, 5) + ", NOMA " + num(nm, 5) +
                    "; peak within one grid step of alpha: " + (near_alpha ? "yes" : "no")};
    }

    // ---- 8: max-min ----

    Verdict criterion8()
    {
        const auto s9 = preset("fig9");
        const auto t9 = run_experiment(s9);
        const auto s10 = preset("fig10");
        const auto t10 = run_experiment(s10);
        auto best_of = [](const ResultTable &t)
        {
            ResultRow best;
            best.value = -1.0;
            for (const auto &r : t.series("HmNOMA"))
                if (r.value > best.value)
                    best = r;
            return best;
        };
        const auto b9 = best_of(t9), b10 = best_of(t10);
        const double m9 = t9.series("mMIMO").front().value, n9 = t9.series("NOMA").front().value;
        const double m10 = t10.series("mMIMO").front().value;
        const double g9 = 100.0 * (b9.value / m9 - 1.0), g10 = 100.0 * (b10.value / m10 - 1.0);
        const double viol = std::max(t9.max_constraint_violation, t10.max_constraint_violation);
        const bool ok = viol <= 1e-6 && g9 > 0.0 && m9 > n9 && g10 > 4.0;
        return {ok, "max constraint violation " + num(viol, 3) + " bits; fig9 mu: mMIMO " + num(m9, 5) + ", NOMA " +
                        num(n9, 5) + ", HmNOMA best " + num(b9.value, 5) + " at nu = " + num(b9.sweep, 3) + " (gain " +
                        num(g9, 3) + "%); fig10 gain " + num(g10, 3) + "% at nu = " +
                        num(b10.sweep * 2.0 * s10.config.antennas, 3) + " alpha (gate 4%)"};
    }

    // ---- 9: invariants ----

    Verdict criterion9()
    {
        const auto t0 = std::chrono::steady_clock::now();
        auto rng = make_rng(909);
        std::uniform_real_distribution<double> u(0.0, 1.0);

        double nulling = 0.0;
        for (int t = 0; t < 2000; ++t)
        {
            const int M = 8 + static_cast<int>(u(rng) * 60), B = 1 + static_cast<int>(u(rng) * std::min(M, 16));
            const CMatrix h = gen_nlos(M, B, rng).h;
            const CMatrix x = h.adjoint() * zf_beamformer(h).v;
            for (int i = 0; i < B; ++i)
                for (int j = 0; j < B; ++j)
                    if (i != j)
                        nulling = std::max(nulling, std::abs(x(i, j)));
        }

        int groups = 0, sic_ok = 0;
        for (int t = 0; t < 10000; ++t)
        {
            const int M = 64, K = 10;
            const CMatrix h = gen_nlos(M, K, rng).h;
            std::vector<double> beta(K), p(K);
            for (int k = 0; k < K; ++k)
            {
                beta[k] = k < K / 2 ? 0.5 + u(rng) : 0.5 * u(rng);
                p[k] = u(rng);
            }
            const auto g = link_gains(h, build_beamformer(h, BeamLayout::noma(K), Scheme::Noma), beta);
            for (int c = 0; c < K / 2; ++c)
            {
                ++groups;
                sic_ok += sic_condition(g, p, c) ? 1 : 0;
            }
        }

        auto f8 = preset("fig8");
        f8.trials = 300;
        f8.values = {0.0};
        const auto t8 = run_experiment(f8);
        const auto h0 = t8.find("HmNOMA", 0.0), m0 = t8.find("mMIMO", 0.0);
        bool bitwise = h0 && m0 && h0->value == m0->value && h0->std_error == m0->std_error;
        int rate_mismatch = 0;
        for (int t = 0; t < 500; ++t)
        {
            std::vector<double> phi(6), beta(6), p(6);
            for (int k = 0; k < 6; ++k)
            {
                phi[k] = 2.0 * std::numbers::pi * u(rng);
                beta[k] = k < 3 ? u(rng) + 0.1 : 0.01 * u(rng);
                p[k] = u(rng);
            }
            const auto cls = default_partition(6);
            const CMatrix h = gen_los(phi, 36, 0.5).h;
            const auto layout = hmnoma_partition(pair_los(phi, cls, 0.0), cls, 36);
            const auto a = evaluate_rates(link_gains(h, build_beamformer(h, layout, Scheme::HmNoma), beta), p, 1.0, Scheme::HmNoma);
            const auto b = evaluate_rates(link_gains(h, build_beamformer(h, BeamLayout::mmimo(6), Scheme::MMimo), beta), p, 1.0,
                                          Scheme::MMimo);
            for (int k = 0; k < 6; ++k)
                rate_mismatch += a.users[k].rate != b.users[k].rate;
        }
        bitwise = bitwise && rate_mismatch == 0;

        double kkt = 0.0;
        for (int t = 0; t < 2000; ++t)
        {
            const int K = 1 + static_cast<int>(u(rng) * 40);
            std::vector<double> g(static_cast<std::size_t>(K));
            for (auto &x : g)
                x = std::pow(10.0, 8.0 * u(rng) - 4.0);
            const auto a = waterfill(g, std::pow(10.0, 6.0 * u(rng) - 3.0));
            double level = -1.0;
            for (int k = 0; k < K; ++k)
                if (a.p[k] > 0.0)
                {
                    const double m = g[k] / (1.0 + g[k] * a.p[k]);
                    if (level < 0.0)
                        level = m;
                    kkt = std::max(kkt, std::abs(m - level) / level);
                }
            for (int k = 0; k < K; ++k)
                if (a.p[k] == 0.0)
                    kkt = std::max(kkt, std::max(0.0, (g[k] - level) / level));
        }
        const double secs = seconds_since(t0);
        const bool ok = nulling < 1e-9 && sic_ok == groups && bitwise && kkt < 1e-8 && secs < 30.0;
        return {ok, "ZF nulling " + num(nulling, 3) + "; SIC " + std::to_string(sic_ok) + "/" + std::to_string(groups) +
                        " groups; HmNOMA(nu=0) == mMIMO bitwise: " + (bitwise ? "yes" : "no") + "; KKT residual " +
                        num(kkt, 3) + "; " + num(secs, 3) + " s"};
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Acceptance criteria"};
    int only = 0;
    app.add_option("--criterion", only, "Run one criterion (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::function<Verdict()>> checks = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                          criterion6, criterion7, criterion8, criterion9};
    bool all = true;
    for (int c = 1; c <= 9; ++c)
    {
        if (only != 0 && c != only)
            continue;
        Verdict v;
        try
        {
            v = checks[static_cast<std::size_t>(c - 1)]();
        }
        catch (const std::exception &e)
        {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::cout << "criterion " << c << ": " << (v.pass ? "PASS" : "FAIL") << " | " << v.detail << std::endl;
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
