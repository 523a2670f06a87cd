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

#include "hmnoma/harness.hpp"

#include "hmnoma/beamrate.hpp"
#include "hmnoma/channel.hpp"
#include "hmnoma/config_io.hpp"
#include "hmnoma/pairing.hpp"
#include "hmnoma/rng.hpp"
#include "hmnoma/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace hmnoma
{
    namespace
    {
        constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

        std::size_t idx(int i)
        {
            return static_cast<std::size_t>(i);
        }

        template <class Fn>
        void parallel_for(int n, int threads, Fn &&fn)
        {
            int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
            workers = std::clamp(workers, 1, std::max(n, 1));
            if (workers == 1)
            {
                for (int i = 0; i < n; ++i)
                    fn(i);
                return;
            }
            std::atomic<int> next{0};
            std::exception_ptr error;
            std::mutex error_lock;
            auto body = [&]
            {
                for (int i = next++; i < n; i = next++)
                {
                    try
                    {
                        fn(i);
                    }
                    catch (...)
                    {
                        std::lock_guard<std::mutex> lk(error_lock);
                        if (!error)
                            error = std::current_exception();
                        next = n;
                    }
                }
            };
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back(body);
            for (auto &t : pool)
                t.join();
            if (error)
                std::rethrow_exception(error);
        }

        std::string fmt(double x)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.9g", x);
            return buf;
        }

        std::vector<double> step_range(double from, double to, double step)
        {
            std::vector<double> v;
            const int n = static_cast<int>(std::floor((to - from) / step + 1e-9));
            for (int i = 0; i <= n; ++i)
                v.push_back(from + step * i);
            return v;
        }

        // Mean and standard error over finite per-drop values
        struct Moments
        {
            double mean = 0.0;
            double se = 0.0;
            int n = 0;
        };

        Moments moments(const std::vector<double> &x)
        {
            Moments m;
            double sum = 0.0;
            for (double v : x)
                if (std::isfinite(v))
                {
                    sum += v;
                    ++m.n;
                }
            if (m.n == 0)
                return m;
            m.mean = sum / m.n;
            if (m.n > 1)
            {
                double ss = 0.0;
                for (double v : x)
                    if (std::isfinite(v))
                        ss += (v - m.mean) * (v - m.mean);
                m.se = std::sqrt(ss / (m.n - 1) / m.n);
            }
            return m;
        }

        MaxMinOptions solver_options(const ExperimentSpec &spec)
        {
            MaxMinOptions opt = spec.maxmin;
            opt.rate_ratio = spec.config.rate_ratio;
            opt.sinr_ratio = spec.config.sinr_ratio;
            opt.trace = spec.verbose;
            return opt;
        }

        double max_violation(const SinrModel &model, const MaxMinSolution &sol, const MaxMinOptions &opt)
        {
            if (!sol.feasible)
                return 0.0;
            const auto t = sinr_targets(model, sol.mu, opt);
            double worst = 0.0;
            for (int k = 0; k < model.users(); ++k)
            {
                const double need = model.tau() * std::log2(1.0 + t[idx(k)]);
                worst = std::max(worst, need - model.rate(sol.p, k, opt.sic_constraint));
            }
            return worst;
        }

        // ---- sweep point ----

        struct Point
        {
            double x = 0.0;
            SystemConfig cfg;
            double nu = 0.0;
            double tau = 1.0;
            std::vector<bool> ok; // per series
        };

        struct DropOut
        {
            std::vector<double> values; // point-major, series-minor
            double violation = 0.0;
            std::vector<int> singular; // per point, scheme evaluations skipped
            std::vector<std::string> trace;
        };

        double default_threshold(const SystemConfig &cfg)
        {
            return cfg.scenario == Scenario::LOS ? 1.0 / (2.0 * cfg.antennas) : 0.3;
        }

        // Realization of one drop at fixed (K, M). Holds the true channels and the
        // channels each scheme's beams are built from.
        struct Realization
        {
            CMatrix truth;
            CMatrix mmimo_csi; // also used by the hybrid scheme
            CMatrix noma_csi;
        };

        class DropEvaluator
        {
        public:
            DropEvaluator(const ExperimentSpec &spec, const std::vector<Point> &points,
                          const std::vector<Scheme> &schemes, bool with_pc)
                : spec_(spec), points_(points), schemes_(schemes), with_pc_(with_pc), opt_(solver_options(spec))
            {
            }

            int series() const { return static_cast<int>(schemes_.size()) + (with_pc_ ? 1 : 0); }

            DropOut run(int drop) const
            {
                const int S = series();
                DropOut out;
                out.values.assign(points_.size() * idx(S), kNaN);
                out.singular.assign(points_.size(), 0);

                int cached_k = -1, cached_m = -1;
                UserDrop geo;
                std::vector<Realization> reals;
                std::map<Scheme, std::vector<double>> fixed; // per-fading value of mMIMO / NOMA
                std::vector<std::map<std::vector<std::pair<int, int>>, double>> memo;

                for (std::size_t pi = 0; pi < points_.size(); ++pi)
                {
                    const Point &pt = points_[pi];
                    const auto &cfg = pt.cfg;
                    if (std::none_of(pt.ok.begin(), pt.ok.end(), [](bool b) { return b; }))
                        continue;
                    const bool record = spec_.verbose && drop == 0;

                    if (cfg.users != cached_k)
                    {
                        auto rng = make_rng(spec_.seed, {static_cast<std::uint64_t>(drop), static_cast<std::uint64_t>(cfg.users)});
                        geo = draw_user_drop(cfg, rng);
                        cached_m = -1;
                    }
                    if (cfg.users != cached_k || cfg.antennas != cached_m)
                    {
                        cached_k = cfg.users;
                        cached_m = cfg.antennas;
                        fixed.clear();
                        if (use_closed_form(cfg))
                            reals.clear();
                        else
                            reals = realize(cfg, geo, drop);
                        memo.assign(reals.size(), {});
                    }

                    double *row = &out.values[pi * idx(S)];
                    for (std::size_t s = 0; s < schemes_.size(); ++s)
                    {
                        if (!pt.ok[s])
                            continue;
                        const Scheme scheme = schemes_[s];
                        if (use_closed_form(cfg))
                        {
                            row[s] = closed_form(cfg, pt.tau, geo, scheme, out, record ? &out.trace : nullptr);
                            continue;
                        }
                        if (scheme != Scheme::HmNoma)
                        {
                            auto it = fixed.find(scheme);
                            if (it == fixed.end())
                            {
                                std::vector<double> per(reals.size());
                                for (std::size_t f = 0; f < reals.size(); ++f)
                                    per[f] = instantaneous(cfg, pt.tau, geo, reals[f], scheme, nullptr, out,
                                                           record && f == 0 ? &out.trace : nullptr);
                                it = fixed.emplace(scheme, std::move(per)).first;
                            }
                            row[s] = fading_mean(it->second, out.singular[pi]);
                            continue;
                        }
                        std::vector<double> per(reals.size());
                        for (std::size_t f = 0; f < reals.size(); ++f)
                        {
                            const Pairing pairing = cfg.scenario == Scenario::LOS
                                                        ? pair_los(geo.angle_rad, geo.cls, pt.nu)
                                                        : pair_nlos(reals[f].mmimo_csi, geo.cls, pt.nu);
                            auto hit = memo[f].find(pairing.pairs);
                            if (hit != memo[f].end())
                            {
                                per[f] = hit->second;
                                continue;
                            }
                            per[f] = instantaneous(cfg, pt.tau, geo, reals[f], scheme, &pairing, out,
                                                   record && f == 0 ? &out.trace : nullptr);
                            memo[f].emplace(pairing.pairs, per[f]);
                        }
                        row[s] = fading_mean(per, out.singular[pi]);
                    }
                    if (with_pc_)
                    {
                        const double a = row[index_of(Scheme::MMimo)], b = row[index_of(Scheme::Noma)];
                        if (std::isfinite(a) && std::isfinite(b))
                            row[S - 1] = b > a ? 1.0 : 0.0;
                    }
                }
                return out;
            }

            bool use_closed_form(const SystemConfig &cfg) const
            {
                return cfg.scenario == Scenario::NLOS && spec_.method == RateMethod::ClosedForm;
            }

        private:
            std::size_t index_of(Scheme s) const
            {
                return idx(static_cast<int>(std::find(schemes_.begin(), schemes_.end(), s) - schemes_.begin()));
            }

            static double fading_mean(const std::vector<double> &per, int &singular)
            {
                double sum = 0.0;
                int n = 0;
                for (double v : per)
                {
                    if (std::isfinite(v))
                    {
                        sum += v;
                        ++n;
                    }
                    else
                        ++singular;
                }
                return n > 0 ? sum / n : kNaN;
            }

            std::vector<Realization> realize(const SystemConfig &cfg, const UserDrop &geo, int drop) const
            {
                const int M = cfg.antennas, K = cfg.users;
                std::vector<Realization> reals;
                if (cfg.scenario == Scenario::LOS)
                {
                    Realization r;
                    r.truth = gen_los(geo.angle_rad, M, cfg.antenna_spacing).h;
                    r.mmimo_csi = r.truth;
                    r.noma_csi = r.truth;
                    reals.push_back(std::move(r));
                    return reals;
                }
                const double q = cfg.pilot_power();
                for (int f = 0; f < spec_.fading; ++f)
                {
                    auto rng = make_rng(spec_.seed, {static_cast<std::uint64_t>(drop), static_cast<std::uint64_t>(K),
                                                     static_cast<std::uint64_t>(M), static_cast<std::uint64_t>(f)});
                    Realization r;
                    ChannelMatrix truth = gen_nlos(M, K, rng);
                    r.truth = truth.h;
                    r.mmimo_csi = truth.h;
                    r.noma_csi = truth.h;
                    if (spec_.csi == CsiMode::Estimated)
                    {
                        const auto est_m = estimate_channels(truth, geo.beta, PilotPlan::for_scheme(Scheme::MMimo, K, q), rng);
                        for (std::size_t c = 0; c < est_m.users.size(); ++c)
                            r.mmimo_csi.col(est_m.users[c]) = est_m.estimate.h.col(static_cast<Eigen::Index>(c));
                        const auto est_n = estimate_channels(truth, geo.beta, PilotPlan::for_scheme(Scheme::Noma, K, q), rng);
                        for (std::size_t c = 0; c < est_n.users.size(); ++c)
                            r.noma_csi.col(est_n.users[c]) = est_n.estimate.h.col(static_cast<Eigen::Index>(c));
                    }
                    reals.push_back(std::move(r));
                }
                return reals;
            }

            double score(const LinkGains &g, double tau, double budget, DropOut &out,
                         std::vector<std::string> *trace, std::string_view label) const
            {
                if (spec_.objective == Objective::SumRate)
                    return layout_sumrate_alloc(g, budget, tau).objective;
                const BeamSinrModel model(g, tau);
                const auto sol = maxmin_solve(model, budget, opt_);
                out.violation = std::max(out.violation, max_violation(model, sol, opt_));
                if (trace)
                    push_trace(*trace, label, sol);
                return sol.feasible ? sol.mu : 0.0;
            }

            static void push_trace(std::vector<std::string> &trace, std::string_view label, const MaxMinSolution &sol)
            {
                for (const auto &st : sol.trace)
                    trace.push_back(std::string(label) + " lo=" + fmt(st.lo) + " hi=" + fmt(st.hi) +
                                    (st.feasible ? " feasible" : " infeasible") + " iters=" + std::to_string(st.iterations));
                trace.push_back(std::string(label) + " mu=" + fmt(sol.mu));
            }

            double instantaneous(const SystemConfig &cfg, double tau, const UserDrop &geo, const Realization &r,
                                 Scheme scheme, const Pairing *pairing, DropOut &out,
                                 std::vector<std::string> *trace) const
            {
                try
                {
                    BeamLayout layout;
                    const CMatrix *csi = &r.mmimo_csi;
                    switch (scheme)
                    {
                    case Scheme::MMimo:
                        layout = BeamLayout::mmimo(cfg.users);
                        break;
                    case Scheme::Noma:
                        layout = BeamLayout::noma(cfg.users);
                        csi = &r.noma_csi;
                        break;
                    case Scheme::HmNoma:
                        layout = hmnoma_partition(*pairing, geo.cls, cfg.antennas);
                        break;
                    }
                    const auto bf = build_beamformer(*csi, layout, scheme);
                    const auto g = link_gains(r.truth, bf, geo.beta);
                    std::string label = std::string(to_string(scheme));
                    if (pairing)
                        label += " nu=" + fmt(pairing->threshold);
                    return score(g, tau, cfg.budget(), out, trace, label);
                }
                catch (const SingularBasisError &)
                {
                    return kNaN;
                }
            }

            double closed_form(const SystemConfig &cfg, double tau, const UserDrop &geo, Scheme scheme, DropOut &out,
                               std::vector<std::string> *trace) const
            {
                const int K = cfg.users, M = cfg.antennas;
                const double q = cfg.pilot_power(), P = cfg.budget();
                std::vector<double> gamma(idx(K), 1.0);
                if (spec_.csi == CsiMode::Estimated)
                    for (int k = 0; k < K; ++k)
                    {
                        if (scheme == Scheme::MMimo)
                            gamma[idx(k)] = gamma_mmimo(K, geo.beta[idx(k)], q);
                        else if (k < K / 2)
                            gamma[idx(k)] = gamma_noma(K, geo.beta[idx(k)], q);
                    }
                if (spec_.objective == Objective::SumRate)
                    return scheme == Scheme::MMimo ? mmimo_sumrate_alloc(geo.beta, gamma, M, P, tau).objective
                                                   : noma_sumrate_alloc(geo.beta, gamma, M, P, tau).objective;
                MaxMinSolution sol;
                double violation = 0.0;
                if (scheme == Scheme::MMimo)
                {
                    const ZfBoundSinrModel model(geo.beta, gamma, M, tau);
                    sol = maxmin_solve(model, P, opt_);
                    violation = max_violation(model, sol, opt_);
                }
                else
                {
                    const NomaBoundSinrModel model(geo.beta, gamma, M, tau);
                    sol = maxmin_solve(model, P, opt_);
                    violation = max_violation(model, sol, opt_);
                }
                out.violation = std::max(out.violation, violation);
                if (trace)
                    push_trace(*trace, to_string(scheme), sol);
                return sol.feasible ? sol.mu : 0.0;
            }

            const ExperimentSpec &spec_;
            const std::vector<Point> &points_;
            const std::vector<Scheme> &schemes_;
            bool with_pc_;
            MaxMinOptions opt_;
        };

        // Per-point reasons a scheme cannot be evaluated at all
        std::string point_check(const ExperimentSpec &spec, const SystemConfig &cfg, Scheme s, bool closed_form)
        {
            const int M = cfg.antennas, K = cfg.users;
            if (closed_form)
            {
                if (s == Scheme::HmNoma)
                    return "HmNOMA has no closed-form NLOS model; use the instantaneous method";
                if (s == Scheme::MMimo && M <= K)
                    return "ZF bound needs M > K";
                if (s == Scheme::Noma && M + 1 - K / 2 <= 0)
                    return "NOMA bound needs M > K/2 - 1";
                return {};
            }
            if (s == Scheme::MMimo && M < K)
                return "ZF over K beams needs M >= K";
            if (s == Scheme::Noma && M < K / 2)
                return "ZF over K/2 beams needs M >= K/2";
            if (s == Scheme::HmNoma && M < K / 2)
                return "hybrid basis needs M >= K/2";
            (void)spec;
            return {};
        }

        ResultTable run_drops(const ExperimentSpec &spec)
        {
            ResultTable table;
            table.experiment = spec.id;
            table.sweep_name = std::string(to_string(spec.sweep));

            std::vector<Scheme> schemes = spec.schemes;
            const bool with_pc = spec.crossover_probability && spec.objective == Objective::SumRate &&
                                 std::count(schemes.begin(), schemes.end(), Scheme::MMimo) &&
                                 std::count(schemes.begin(), schemes.end(), Scheme::Noma);
            if (spec.crossover_probability && !with_pc)
                table.log.push_back("crossover probability needs both mMIMO and NOMA sum-rate series; skipped");
            const bool closed = spec.config.scenario == Scenario::NLOS && spec.method == RateMethod::ClosedForm;
            if (spec.config.scenario == Scenario::LOS && spec.csi == CsiMode::Estimated)
                table.log.push_back("LOS channels are deterministic given the angles; CSI mode ignored");

            std::vector<Point> points;
            for (double x : spec.values)
            {
                Point pt;
                pt.x = x;
                pt.cfg = spec.config;
                if (spec.sweep == SweepVar::Antennas)
                    pt.cfg.antennas = static_cast<int>(std::lround(x));
                else if (spec.sweep == SweepVar::Users)
                    pt.cfg.users = static_cast<int>(std::lround(x));
                pt.nu = spec.sweep == SweepVar::Threshold ? x : (spec.threshold >= 0.0 ? spec.threshold : default_threshold(pt.cfg));
                pt.ok.assign(schemes.size(), false);
                try
                {
                    pt.cfg.validate();
                    pt.tau = overhead_factor(pt.cfg.users, pt.cfg.coherence_length, pt.cfg.scenario);
                }
                catch (const std::exception &e)
                {
                    table.log.push_back(table.sweep_name + "=" + fmt(x) + ": skipped (" + e.what() + ")");
                    points.push_back(std::move(pt));
                    continue;
                }
                for (std::size_t s = 0; s < schemes.size(); ++s)
                {
                    const auto why = point_check(spec, pt.cfg, schemes[s], closed);
                    pt.ok[s] = why.empty();
                    if (!why.empty())
                        table.log.push_back(table.sweep_name + "=" + fmt(x) + " M=" + std::to_string(pt.cfg.antennas) +
                                            " K=" + std::to_string(pt.cfg.users) + ": " +
                                            std::string(to_string(schemes[s])) + " skipped (" + why + ")");
                }
                points.push_back(std::move(pt));
            }

            const DropEvaluator eval(spec, points, schemes, with_pc);
            std::vector<DropOut> drops(idx(spec.trials));
            parallel_for(spec.trials, spec.threads, [&](int d) { drops[idx(d)] = eval.run(d); });

            const int S = eval.series();
            std::vector<int> singular(points.size(), 0);
            for (const auto &d : drops)
            {
                table.max_constraint_violation = std::max(table.max_constraint_violation, d.violation);
                for (std::size_t p = 0; p < points.size(); ++p)
                    singular[p] += d.singular[p];
            }
            if (!drops.empty())
                for (const auto &line : drops.front().trace)
                    table.log.push_back("trace drop 0: " + line);

            std::vector<double> column(drops.size());
            for (std::size_t p = 0; p < points.size(); ++p)
            {
                if (singular[p] > 0)
                    table.log.push_back(table.sweep_name + "=" + fmt(points[p].x) + ": " + std::to_string(singular[p]) +
                                        " realizations dropped on a rank-deficient beam basis");
                for (int s = 0; s < S; ++s)
                {
                    for (std::size_t d = 0; d < drops.size(); ++d)
                        column[d] = drops[d].values[p * idx(S) + idx(s)];
                    const Moments m = moments(column);
                    if (m.n == 0)
                        continue;
                    ResultRow row;
                    row.sweep = points[p].x;
                    row.series = s < static_cast<int>(schemes.size()) ? std::string(to_string(schemes[idx(s)])) : "Pc";
                    row.value = m.mean;
                    row.trials = m.n;
                    row.std_error = row.series == "Pc" ? std::sqrt(m.mean * (1.0 - m.mean) / m.n) : m.se;
                    table.rows.push_back(row);
                }
            }
            return table;
        }

        ResultTable run_rate_region(const ExperimentSpec &spec)
        {
            ResultTable table;
            table.experiment = spec.id;
            table.sweep_name = std::string(to_string(spec.sweep));
            SystemConfig cfg = spec.config;
            cfg.users = 2;
            cfg.scenario = Scenario::NLOS;
            const UserDrop geo = fixed_user_drop(cfg, spec.fixed_distances_m);
            const int M = cfg.antennas;
            const double P = cfg.budget(), q = cfg.pilot_power();
            const double tau = overhead_factor(2, cfg.coherence_length, Scenario::NLOS);

            std::vector<double> gm = {1.0, 1.0}, gn = {1.0, 1.0};
            if (spec.csi == CsiMode::Estimated)
            {
                gm = {gamma_mmimo(2, geo.beta[0], q), gamma_mmimo(2, geo.beta[1], q)};
                gn = {gamma_noma(2, geo.beta[0], q), 1.0};
            }

            // Instantaneous NOMA rates on a shared set of fading realizations
            std::vector<Realization> reals(idx(spec.trials));
            parallel_for(spec.trials, spec.threads, [&](int t)
            {
                auto rng = make_rng(spec.seed, {static_cast<std::uint64_t>(t), 2u, static_cast<std::uint64_t>(M)});
                ChannelMatrix truth = gen_nlos(M, 2, rng);
                Realization r;
                r.truth = truth.h;
                r.noma_csi = truth.h;
                if (spec.csi == CsiMode::Estimated)
                {
                    const auto est = estimate_channels(truth, geo.beta, PilotPlan::for_scheme(Scheme::Noma, 2, q), rng);
                    r.noma_csi.col(0) = est.estimate.h.col(0);
                }
                reals[idx(t)] = std::move(r);
            });

            auto add = [&](double x, const std::string &series, double value, int n, double se)
            { table.rows.push_back({x, series, value, n, se}); };

            for (double s : spec.values)
            {
                const std::vector<double> p = {s * P, (1.0 - s) * P};
                if (M > 2)
                {
                    const auto rm = rate_mmimo_nlos_lb(p, geo.beta, gm, M, tau);
                    add(s, "mMIMO_R1", rm[0], 1, 0.0);
                    add(s, "mMIMO_R2", rm[1], 1, 0.0);
                }
                const auto rn = rate_noma_nlos_ub(p, geo.beta, gn, M, tau);
                add(s, "NOMA_R1", rn[0], 1, 0.0);
                add(s, "NOMA_R2", rn[1], 1, 0.0);

                {
                    std::vector<double> r1(reals.size()), r2(reals.size());
                    for (std::size_t t = 0; t < reals.size(); ++t)
                    {
                        const auto bf = build_beamformer(reals[t].noma_csi, BeamLayout::noma(2), Scheme::Noma);
                        const auto g = link_gains(reals[t].truth, bf, geo.beta);
                        const auto rep = evaluate_rates(g, p, tau, Scheme::Noma);
                        r1[t] = rep.users[0].rate;
                        r2[t] = rep.users[1].rate;
                    }
                    const auto m1 = moments(r1), m2 = moments(r2);
                    add(s, "NOMA-inst_R1", m1.mean, m1.n, m1.se);
                    add(s, "NOMA-inst_R2", m2.mean, m2.n, m2.se);
                }
            }
            if (M <= 2)
                table.log.push_back("mMIMO rate region skipped: ZF bound needs M > 2");
            return table;
        }

        ResultTable run_two_user(const ExperimentSpec &spec)
        {
            ResultTable table;
            table.experiment = spec.id;
            table.sweep_name = std::string(to_string(spec.sweep));
            SystemConfig cfg = spec.config;
            cfg.users = 2;
            cfg.scenario = Scenario::NLOS;
            const UserDrop geo = fixed_user_drop(cfg, spec.fixed_distances_m);
            const double P = cfg.budget();
            const double tau = overhead_factor(2, cfg.coherence_length, Scenario::NLOS);
            for (double x : spec.values)
            {
                const int M = static_cast<int>(std::lround(x));
                if (M <= 2)
                {
                    table.log.push_back("M=" + std::to_string(M) + ": skipped (two-user ZF needs M > 2)");
                    continue;
                }
                const auto r = two_user_max_rates(geo.beta[0], geo.beta[1], M, P, tau);
                table.rows.push_back({x, "mMIMO", r.mmimo, 1, 0.0});
                table.rows.push_back({x, "NOMA", r.noma, 1, 0.0});
            }
            const auto roots = crossover_roots(geo.beta[0], geo.beta[1], P);
            const int mstar = crossover_antennas(geo.beta[0], geo.beta[1], P);
            table.rows.push_back({static_cast<double>(mstar), "Mstar", static_cast<double>(mstar), 1, 0.0});
            table.log.push_back("crossover roots a1=" + fmt(roots.lower) + " a2=" + fmt(roots.upper) +
                                ", M*=" + std::to_string(mstar) + ", P*beta2=" + fmt(P * geo.beta[1]) +
                                ", beta1/beta2=" + fmt(10.0 * std::log10(geo.beta[0] / geo.beta[1])) + " dB");
            return table;
        }

        std::vector<double> nu_grid(int antennas, int steps)
        {
            std::vector<double> v;
            for (int n = 0; n <= steps; ++n)
                v.push_back(n / (2.0 * antennas));
            return v;
        }

        template <class E>
        struct Names
        {
            E value;
            const char *name;
        };

        constexpr Names<Objective> kObjectives[] = {{Objective::RateRegion, "rate_region"},
                                                    {Objective::TwoUser, "two_user"},
                                                    {Objective::SumRate, "sum_rate"},
                                                    {Objective::MaxMin, "max_min"}};
        constexpr Names<SweepVar> kSweeps[] = {{SweepVar::Antennas, "M"},
                                               {SweepVar::Users, "K"},
                                               {SweepVar::Threshold, "nu"},
                                               {SweepVar::PowerSplit, "split"}};

        template <class E, std::size_t N>
        E parse_name(const Names<E> (&table)[N], const std::string &s, const char *what)
        {
            for (const auto &e : table)
                if (s == e.name)
                    return e.value;
            throw DomainError(std::string("unknown ") + what + " '" + s + "'");
        }

    } // namespace

    std::string_view to_string(SweepVar v)
    {
        for (const auto &e : kSweeps)
            if (e.value == v)
                return e.name;
        return "?";
    }

    std::string_view to_string(Objective o)
    {
        for (const auto &e : kObjectives)
            if (e.value == o)
                return e.name;
        return "?";
    }

    void ExperimentSpec::validate() const
    {
        config.validate();
        if (trials < 1)
            throw DomainError("trials must be at least 1");
        if (fading < 1)
            throw DomainError("fading realizations must be at least 1");
        if (values.empty())
            throw DomainError("experiment '" + id + "' has an empty sweep");
        if (schemes.empty() && (objective == Objective::SumRate || objective == Objective::MaxMin))
            throw DomainError("no schemes selected");
        if (objective == Objective::MaxMin && !(config.rate_ratio > 0.0 && config.rate_ratio < 1.0))
            throw DomainError("rate_ratio must lie in (0, 1)");
        if (sweep == SweepVar::PowerSplit && objective != Objective::RateRegion)
            throw DomainError("power-split sweeps are only defined for rate regions");
        if (objective == Objective::RateRegion || objective == Objective::TwoUser)
        {
            if (fixed_distances_m.size() != 2 || !(fixed_distances_m[0] < fixed_distances_m[1]))
                throw DomainError("two-user presets need two distances, near user first");
        }
        if (objective == Objective::RateRegion)
            for (double s : values)
                if (!(s >= 0.0 && s <= 1.0))
                    throw DomainError("power split must lie in [0, 1]");
        if (sweep == SweepVar::Threshold)
            for (double nu : values)
                if (nu < 0.0 || (config.scenario == Scenario::NLOS && nu > 1.0))
                    throw DomainError("threshold out of range");
    }

    std::optional<ResultRow> ResultTable::find(const std::string &name, double sweep, double tol) const
    {
        for (const auto &r : rows)
            if (r.series == name && std::abs(r.sweep - sweep) <= tol)
                return r;
        return std::nullopt;
    }

    std::vector<ResultRow> ResultTable::series(const std::string &name) const
    {
        std::vector<ResultRow> out;
        for (const auto &r : rows)
            if (r.series == name)
                out.push_back(r);
        return out;
    }

    std::vector<std::string> preset_ids()
    {
        return {"fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig8-m12", "fig9", "fig10"};
    }

    ExperimentSpec preset(const std::string &id)
    {
        ExperimentSpec s;
        s.id = id;
        s.config.coherence_length = 100;
        if (id == "fig1")
        {
            s.objective = Objective::RateRegion;
            s.sweep = SweepVar::PowerSplit;
            s.config.antennas = 25;
            s.config.users = 2;
            s.values = step_range(0.0, 1.0, 0.02);
            s.trials = 2000;
        }
        else if (id == "fig2")
        {
            s.objective = Objective::TwoUser;
            s.sweep = SweepVar::Antennas;
            s.config.users = 2;
            s.values = step_range(3, 30, 1);
            s.trials = 1;
        }
        else if (id == "fig3")
        {
            s.sweep = SweepVar::Users;
            s.config.antennas = 30;
            s.values = step_range(2, 28, 2);
        }
        else if (id == "fig4")
        {
            s.config.users = 10;
            s.values = step_range(6, 100, 2);
        }
        else if (id == "fig5")
        {
            s.config.scenario = Scenario::LOS;
            s.method = RateMethod::Instantaneous;
            s.config.users = 10;
            s.values = step_range(10, 100, 2);
        }
        else if (id == "fig6")
        {
            s.config.scenario = Scenario::LOS;
            s.method = RateMethod::Instantaneous;
            s.sweep = SweepVar::Users;
            s.config.antennas = 75;
            s.values = step_range(2, 50, 2);
        }
        else if (id == "fig7")
        {
            s.config.scenario = Scenario::LOS;
            s.method = RateMethod::Instantaneous;
            s.config.users = 6;
            s.values = step_range(6, 60, 1);
            s.crossover_probability = true;
        }
        else if (id == "fig8" || id == "fig8-m12")
        {
            s.config.scenario = Scenario::LOS;
            s.method = RateMethod::Instantaneous;
            s.sweep = SweepVar::Threshold;
            s.config.users = 6;
            s.config.antennas = id == "fig8" ? 36 : 12;
            s.values = nu_grid(s.config.antennas, 20);
            s.schemes = {Scheme::MMimo, Scheme::Noma, Scheme::HmNoma};
        }
        else if (id == "fig9")
        {
            s.objective = Objective::MaxMin;
            s.method = RateMethod::Instantaneous;
            s.sweep = SweepVar::Threshold;
            s.config.users = 10;
            s.config.antennas = 12;
            s.values = step_range(0.0, 1.0, 0.05);
            s.trials = 500;
            s.fading = 20;
            s.schemes = {Scheme::MMimo, Scheme::Noma, Scheme::HmNoma};
        }
        else if (id == "fig10")
        {
            s.objective = Objective::MaxMin;
            s.config.scenario = Scenario::LOS;
            s.method = RateMethod::Instantaneous;
            s.sweep = SweepVar::Threshold;
            s.config.users = 6;
            s.config.antennas = 36;
            s.values = nu_grid(36, 20);
            s.schemes = {Scheme::MMimo, Scheme::Noma, Scheme::HmNoma};
        }
        else
            throw DomainError("unknown experiment '" + id + "'");
        return s;
    }

    ResultTable run_experiment(const ExperimentSpec &spec)
    {
        spec.validate();
        switch (spec.objective)
        {
        case Objective::RateRegion:
            return run_rate_region(spec);
        case Objective::TwoUser:
            return run_two_user(spec);
        default:
            return run_drops(spec);
        }
    }

    std::vector<ProbabilityPoint> crossover_probability(const std::vector<int> &antennas, const SystemConfig &config,
                                                        int trials, std::uint64_t seed, int threads)
    {
        if (trials < 100)
            throw DomainError("crossover_probability needs at least 100 drops per point");
        ExperimentSpec spec;
        spec.id = "crossover_probability";
        spec.config = config;
        spec.sweep = SweepVar::Antennas;
        spec.values.assign(antennas.begin(), antennas.end());
        spec.trials = trials;
        spec.seed = seed;
        spec.threads = threads;
        spec.schemes = {Scheme::MMimo, Scheme::Noma};
        spec.method = config.scenario == Scenario::LOS ? RateMethod::Instantaneous : RateMethod::ClosedForm;
        spec.crossover_probability = true;
        const auto table = run_experiment(spec);
        std::vector<ProbabilityPoint> out;
        for (const auto &r : table.series("Pc"))
            out.push_back({static_cast<int>(std::lround(r.sweep)), r.value, r.std_error, r.trials});
        return out;
    }

    std::optional<Crossover> find_crossover(const ResultTable &table, const std::string &a, const std::string &b)
    {
        std::vector<std::pair<double, double>> diff;
        for (const auto &ra : table.series(a))
            if (const auto rb = table.find(b, ra.sweep))
                diff.emplace_back(ra.sweep, ra.value - rb->value);
        std::sort(diff.begin(), diff.end());
        std::size_t start = 0;
        while (start < diff.size() && diff[start].second == 0.0)
            ++start;
        for (std::size_t i = start + 1; i < diff.size(); ++i)
        {
            const auto [x0, d0] = diff[i - 1];
            const auto [x1, d1] = diff[i];
            if ((d0 < 0.0) != (d1 < 0.0) || d1 == 0.0)
                return Crossover{x0 + (x1 - x0) * d0 / (d0 - d1), x1};
        }
        return std::nullopt;
    }

    // ---- persistence ----

    nlohmann::json spec_to_json(const ExperimentSpec &spec)
    {
        nlohmann::json schemes = nlohmann::json::array();
        for (auto s : spec.schemes)
            schemes.push_back(std::string(to_string(s)));
        return {
            {"id", spec.id},
            {"config", config_to_json(spec.config)},
            {"objective", std::string(to_string(spec.objective))},
            {"sweep", std::string(to_string(spec.sweep))},
            {"values", spec.values},
            {"trials", spec.trials},
            {"fading", spec.fading},
            {"seed", spec.seed},
            {"schemes", schemes},
            {"csi", spec.csi == CsiMode::Estimated ? "estimated" : "perfect"},
            {"method", spec.method == RateMethod::ClosedForm ? "closed_form" : "instantaneous"},
            {"crossover_probability", spec.crossover_probability},
            {"threshold", spec.threshold},
            {"fixed_distances_m", spec.fixed_distances_m},
            {"maxmin",
             {{"mode", spec.maxmin.mode == RatioMode::Rate ? "rate" : "sinr"},
              {"sic_constraint", spec.maxmin.sic_constraint},
              {"tol", spec.maxmin.tol},
              {"max_iterations", spec.maxmin.max_iterations}}},
        };
    }

    ExperimentSpec spec_from_json(const nlohmann::json &j)
    {
        ExperimentSpec s;
        s.id = j.at("id").get<std::string>();
        s.config = config_from_json(j.at("config"));
        s.objective = parse_name(kObjectives, j.at("objective").get<std::string>(), "objective");
        s.sweep = parse_name(kSweeps, j.at("sweep").get<std::string>(), "sweep");
        s.values = j.at("values").get<std::vector<double>>();
        s.trials = j.at("trials").get<int>();
        s.fading = j.at("fading").get<int>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.schemes.clear();
        for (const auto &x : j.at("schemes"))
            s.schemes.push_back(scheme_from_string(x.get<std::string>()));
        const auto csi = j.at("csi").get<std::string>();
        if (csi != "perfect" && csi != "estimated")
            throw DomainError("unknown csi mode '" + csi + "'");
        s.csi = csi == "estimated" ? CsiMode::Estimated : CsiMode::Perfect;
        const auto method = j.at("method").get<std::string>();
        if (method != "closed_form" && method != "instantaneous")
            throw DomainError("unknown rate method '" + method + "'");
        s.method = method == "closed_form" ? RateMethod::ClosedForm : RateMethod::Instantaneous;
        s.crossover_probability = j.at("crossover_probability").get<bool>();
        s.threshold = j.at("threshold").get<double>();
        s.fixed_distances_m = j.at("fixed_distances_m").get<std::vector<double>>();
        const auto &mm = j.at("maxmin");
        s.maxmin.mode = mm.at("mode").get<std::string>() == "sinr" ? RatioMode::Sinr : RatioMode::Rate;
        s.maxmin.sic_constraint = mm.at("sic_constraint").get<bool>();
        s.maxmin.tol = mm.at("tol").get<double>();
        s.maxmin.max_iterations = mm.at("max_iterations").get<int>();
        return s;
    }

    std::string spec_hash(const ExperimentSpec &spec)
    {
        // FNV-1a, 64 bit, over the canonical JSON dump
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : spec_to_json(spec).dump())
        {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

    void write_csv(std::ostream &out, const ResultTable &table)
    {
        out << "sweep,scheme,value,trials,stderr\n";
        for (const auto &r : table.rows)
            out << fmt(r.sweep) << ',' << r.series << ',' << fmt(r.value) << ',' << r.trials << ',' << fmt(r.std_error) << '\n';
    }

    nlohmann::json table_to_json(const ResultTable &table, const ExperimentSpec &spec)
    {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : table.rows)
            rows.push_back({{"sweep", r.sweep}, {"scheme", r.series}, {"value", r.value}, {"trials", r.trials}, {"stderr", r.std_error}});
        return {
            {"experiment", table.experiment},
            {"sweep_name", table.sweep_name},
            {"spec", spec_to_json(spec)},
            {"spec_hash", spec_hash(spec)},
            {"seed", spec.seed},
            {"max_constraint_violation", table.max_constraint_violation},
            {"rows", rows},
            {"log", table.log},
        };
    }

    std::pair<std::filesystem::path, std::filesystem::path> emit(const ResultTable &table, const ExperimentSpec &spec,
                                                                 const std::filesystem::path &dir)
    {
        std::filesystem::create_directories(dir);
        const auto csv = dir / (spec.id + ".csv");
        const auto json = dir / (spec.id + ".json");
        std::ofstream c(csv);
        if (!c)
            throw std::runtime_error("cannot write " + csv.string());
        write_csv(c, table);
        std::ofstream j(json);
        if (!j)
            throw std::runtime_error("cannot write " + json.string());
        j << table_to_json(table, spec).dump(2) << '\n';
        return {csv, json};
    }

    StoredResult read_result_json(const std::filesystem::path &file)
    {
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("cannot read " + file.string());
        const auto j = nlohmann::json::parse(in);
        StoredResult out;
        out.spec = spec_from_json(j.at("spec"));
        out.stored_hash = j.at("spec_hash").get<std::string>();
        for (const auto &r : j.at("rows"))
            out.rows.push_back({r.at("sweep").get<double>(), r.at("scheme").get<std::string>(), r.at("value").get<double>(),
                                r.at("trials").get<int>(), r.at("stderr").get<double>()});
        return out;
    }

} // namespace hmnoma
