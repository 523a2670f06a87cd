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

#include "hmnoma/beamrate.hpp"
#include "hmnoma/sysmodel.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hmnoma
{
    namespace
    {
        constexpr double kRankTol = 1e-12;

        std::size_t idx(int k) { return static_cast<std::size_t>(k); }
    } // namespace

    // ---- layout ----

    BeamLayout BeamLayout::mmimo(int users)
    {
        BeamLayout l;
        l.cls = default_partition(users);
        l.sic_partner.assign(idx(users), -1);
        for (int k = 0; k < users; ++k)
        {
            l.basis.push_back(k);
            l.beam_of.push_back(k);
        }
        return l;
    }

    BeamLayout BeamLayout::noma(int users)
    {
        if (users < 2 || users % 2 != 0)
            throw ContractViolation("BeamLayout::noma: even user count required");
        BeamLayout l;
        const int half = users / 2;
        l.cls = default_partition(users);
        l.beam_of.assign(idx(users), -1);
        l.sic_partner.assign(idx(users), -1);
        for (int c = 0; c < half; ++c)
        {
            l.basis.push_back(c);
            l.beam_of[idx(c)] = c;
            l.beam_of[idx(c + half)] = c;
            l.sic_partner[idx(c)] = c + half;
            l.sic_partner[idx(c + half)] = c;
        }
        return l;
    }

    int BeamLayout::pairs() const
    {
        int n = 0;
        for (int k = 0; k < users(); ++k)
            n += is_paired_center(k) ? 1 : 0;
        return n;
    }

    bool BeamLayout::is_paired_center(int k) const
    {
        return sic_partner[idx(k)] >= 0 && cls[idx(k)] == UserClass::Center;
    }

    bool BeamLayout::is_paired_edge(int k) const
    {
        return sic_partner[idx(k)] >= 0 && cls[idx(k)] == UserClass::Edge;
    }

    void BeamLayout::validate() const
    {
        const int K = users();
        if (static_cast<int>(sic_partner.size()) != K || static_cast<int>(cls.size()) != K)
            throw ContractViolation("BeamLayout: per-user maps differ in size");
        for (int b = 0; b < beams(); ++b)
        {
            const int owner = basis[idx(b)];
            if (owner < 0 || owner >= K || beam_of[idx(owner)] != b)
                throw ContractViolation("BeamLayout: basis owner is not served by its own beam");
        }
        for (int k = 0; k < K; ++k)
        {
            if (beam_of[idx(k)] >= beams())
                throw ContractViolation("BeamLayout: beam index out of range");
            const int j = sic_partner[idx(k)];
            if (j < 0)
                continue;
            if (j >= K || sic_partner[idx(j)] != k || cls[idx(j)] == cls[idx(k)])
                throw ContractViolation("BeamLayout: pairs must be mutual (center, edge)");
            if (beam_of[idx(j)] != beam_of[idx(k)] || beam_of[idx(k)] < 0)
                throw ContractViolation("BeamLayout: paired users must share a beam");
        }
    }

    // ---- zero forcing ----

    CMatrix zf_precoder(const CMatrix &basis)
    {
        const Eigen::Index M = basis.rows();
        const Eigen::Index B = basis.cols();
        if (B == 0)
            return CMatrix(M, 0);
        if (B > M)
            throw SingularBasisError("zf_precoder: " + std::to_string(B) + " beams exceed " +
                                     std::to_string(M) + " antennas");

        // basis P = Q R  =>  basis (basis^H basis)^{-1} = Q R^{-H} P^T
        Eigen::ColPivHouseholderQR<CMatrix> qr(basis);
        const auto &r = qr.matrixR();
        const double rmax = std::abs(r(0, 0));
        const double rmin = std::abs(r(B - 1, B - 1));
        if (!(rmax > 0.0) || rmin <= kRankTol * rmax)
            throw SingularBasisError("zf_precoder: basis is rank deficient");

        const CMatrix rtop = r.topLeftCorner(B, B).template triangularView<Eigen::Upper>();
        // X = R^{-H}: solve R^H X = I
        CMatrix x = CMatrix::Identity(B, B);
        rtop.adjoint().template triangularView<Eigen::Lower>().solveInPlace(x);
        CMatrix thin_q = qr.householderQ() * CMatrix::Identity(M, B);
        CMatrix permuted = thin_q * x;
        CMatrix v(M, B);
        const auto &perm = qr.colsPermutation().indices();
        for (Eigen::Index i = 0; i < B; ++i)
            v.col(perm(i)) = permuted.col(i);
        return v;
    }

    Beamformer zf_beamformer(const CMatrix &basis)
    {
        Beamformer bf;
        bf.v = zf_precoder(basis);
        for (Eigen::Index b = 0; b < bf.v.cols(); ++b)
            bf.v.col(b).normalize();
        bf.layout = BeamLayout::mmimo(static_cast<int>(basis.cols()));
        bf.scheme = Scheme::MMimo;
        return bf;
    }

    Beamformer build_beamformer(const CMatrix &channels, const BeamLayout &layout, Scheme scheme)
    {
        layout.validate();
        CMatrix basis(channels.rows(), layout.beams());
        for (int b = 0; b < layout.beams(); ++b)
            basis.col(b) = channels.col(layout.basis[idx(b)]);
        Beamformer bf = zf_beamformer(basis);
        bf.layout = layout;
        bf.scheme = scheme;
        return bf;
    }

    Eigen::VectorXd gram_inverse_diagonal(const CMatrix &h)
    {
        // V = H (H^H H)^{-1} has V^H V = (H^H H)^{-1}
        const CMatrix v = zf_precoder(h);
        return v.colwise().squaredNorm().transpose();
    }

    // ---- SINR ----

    LinkGains link_gains(const CMatrix &h, const Beamformer &bf, std::span<const double> beta)
    {
        if (h.cols() != bf.layout.users() || static_cast<Eigen::Index>(beta.size()) != h.cols())
            throw ContractViolation("link_gains: user count mismatch");
        LinkGains g;
        g.layout = bf.layout;
        const Eigen::MatrixXd mag = (h.adjoint() * bf.v).cwiseAbs2();
        g.gain.resize(mag.rows(), mag.cols());
        for (Eigen::Index k = 0; k < mag.rows(); ++k)
            g.gain.row(k) = beta[static_cast<std::size_t>(k)] * mag.row(k);
        return g;
    }

    double sinr_instantaneous(const LinkGains &g, std::span<const double> p, int k)
    {
        const auto &l = g.layout;
        const int b = l.beam_of[idx(k)];
        if (b < 0)
            return 0.0;
        const int skip = l.is_paired_center(k) ? l.sic_partner[idx(k)] : -1;
        double interference = 1.0;
        for (int j = 0; j < g.users(); ++j)
        {
            const int bj = l.beam_of[idx(j)];
            if (j == k || j == skip || bj < 0)
                continue;
            interference += p[idx(j)] * g.gain(k, bj);
        }
        return p[idx(k)] * g.gain(k, b) / interference;
    }

    double sic_sinr(const LinkGains &g, std::span<const double> p, int center)
    {
        const auto &l = g.layout;
        if (!l.is_paired_center(center))
            throw ContractViolation("sic_sinr: user is not a paired center");
        const int edge = l.sic_partner[idx(center)];
        const int b = l.beam_of[idx(edge)];
        double interference = 1.0;
        for (int j = 0; j < g.users(); ++j)
        {
            const int bj = l.beam_of[idx(j)];
            if (j == edge || bj < 0)
                continue;
            interference += p[idx(j)] * g.gain(center, bj);
        }
        return p[idx(edge)] * g.gain(center, b) / interference;
    }

    bool sic_condition(const LinkGains &g, std::span<const double> p, int center)
    {
        const int edge = g.layout.sic_partner[idx(center)];
        return sic_sinr(g, p, center) >= sinr_instantaneous(g, p, edge);
    }

    double sinr_instantaneous(const CMatrix &h, const Beamformer &bf, std::span<const double> p,
                              std::span<const double> beta, int k)
    {
        return sinr_instantaneous(link_gains(h, bf, beta), p, k);
    }

    bool sic_condition(const CMatrix &h, const Beamformer &bf, std::span<const double> p,
                       std::span<const double> beta, int center)
    {
        return sic_condition(link_gains(h, bf, beta), p, center);
    }

    // ---- reports ----

    double RateReport::sum_rate() const
    {
        double s = 0.0;
        for (const auto &u : users)
            s += u.rate;
        return s;
    }

    RateReport evaluate_rates(const LinkGains &g, std::span<const double> p, double tau, Scheme scheme)
    {
        RateReport rep;
        rep.scheme = scheme;
        rep.tau = tau;
        const auto &l = g.layout;
        for (int k = 0; k < g.users(); ++k)
        {
            UserRate u;
            u.user = k;
            u.sinr = sinr_instantaneous(g, p, k);
            u.rate = tau * std::log2(1.0 + u.sinr);
            if (l.sic_partner[idx(k)] >= 0)
            {
                const int center = l.is_paired_center(k) ? k : l.sic_partner[idx(k)];
                u.pair_id = l.beam_of[idx(center)];
                u.sic_ok = sic_condition(g, p, center);
            }
            rep.users.push_back(u);
        }
        return rep;
    }

    void write_rate_csv_header(std::ostream &out)
    {
        out << "scheme,M,K,drop,user,rate,sinr,sic,pair\n";
    }

    void write_rate_csv(std::ostream &out, const RateReport &report, int antennas, int drop_id)
    {
        const auto old = out.precision(9);
        for (const auto &u : report.users)
            out << to_string(report.scheme) << ',' << antennas << ',' << report.users.size() << ','
                << drop_id << ',' << u.user << ',' << u.rate << ',' << u.sinr << ','
                << (u.sic_ok ? 1 : 0) << ',' << u.pair_id << '\n';
        out.precision(old);
    }

    // ---- expectations and closed forms ----

    GainStats effective_gain_stats(int antennas, int basis, int trials, std::mt19937_64 &rng, double gamma)
    {
        if (basis > antennas || basis < 1 || trials < 1)
            throw DomainError("effective_gain_stats: need 1 <= B <= M and trials >= 1");
        if (!(gamma > 0.0 && gamma <= 1.0))
            throw DomainError("effective_gain_stats: gamma must lie in (0, 1]");
        double sum = 0.0, sum2 = 0.0;
        std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
        for (int t = 0; t < trials; ++t)
        {
            CMatrix est = gen_nlos(antennas, basis, rng).h;
            CMatrix truth = est;
            if (gamma < 1.0)
            {
                est *= std::sqrt(gamma);
                const double se = std::sqrt(1.0 - gamma);
                for (Eigen::Index k = 0; k < truth.cols(); ++k)
                    for (Eigen::Index m = 0; m < truth.rows(); ++m)
                    {
                        const double re = n01(rng);
                        const double im = n01(rng);
                        truth(m, k) = est(m, k) + se * cd(re, im);
                    }
            }
            const Beamformer bf = zf_beamformer(est);
            const double x = std::norm(truth.col(0).dot(bf.v.col(0)));
            sum += x;
            sum2 += x * x;
        }
        const double mean = sum / trials;
        const double var = trials > 1 ? (sum2 - trials * mean * mean) / (trials - 1) : 0.0;
        return {mean, std::sqrt(std::max(var, 0.0) / trials)};
    }

    std::vector<double> rate_mmimo_nlos_lb(std::span<const double> p, std::span<const double> beta,
                                           std::span<const double> gamma, int antennas, double tau)
    {
        const int K = static_cast<int>(p.size());
        if (beta.size() != p.size() || gamma.size() != p.size())
            throw ContractViolation("rate_mmimo_nlos_lb: size mismatch");
        if (antennas <= K)
            throw DomainError("rate_mmimo_nlos_lb: requires M > K");
        double total = 0.0;
        for (double x : p)
        {
            if (x < 0.0)
                throw DomainError("rate_mmimo_nlos_lb: negative power");
            total += x;
        }
        std::vector<double> r(p.size());
        for (std::size_t k = 0; k < p.size(); ++k)
        {
            const double num = (antennas - K) * p[k] * beta[k] * gamma[k];
            const double den = beta[k] * (1.0 - gamma[k]) * total + 1.0;
            r[k] = tau * std::log2(1.0 + num / den);
        }
        return r;
    }

    double noma_center_gain(int antennas, int users, double gamma)
    {
        const double mbar = antennas + 1.0 - users / 2;
        if (!(mbar > 0.0))
            throw DomainError("noma_center_gain: requires M + 1 - K/2 > 0");
        return gamma * mbar + (1.0 - gamma);
    }

    std::vector<double> rate_noma_nlos_ub(std::span<const double> p, std::span<const double> beta,
                                          std::span<const double> gamma, int antennas, double tau)
    {
        const int K = static_cast<int>(p.size());
        if (K < 2 || K % 2 != 0)
            throw ContractViolation("rate_noma_nlos_ub: groups (k, k+K/2) need an even user count");
        if (beta.size() != p.size() || gamma.size() != p.size())
            throw ContractViolation("rate_noma_nlos_ub: size mismatch");
        const int half = K / 2;
        std::vector<double> r(p.size());
        for (int k = 0; k < half; ++k)
        {
            const double g = noma_center_gain(antennas, K, gamma[idx(k)]);
            r[idx(k)] = tau * std::log2(1.0 + p[idx(k)] * beta[idx(k)] * g);
        }
        for (int k = half; k < K; ++k)
        {
            const double s = p[idx(k)] * beta[idx(k)] / (p[idx(k - half)] * beta[idx(k)] + 1.0);
            r[idx(k)] = tau * std::log2(1.0 + s);
        }
        return r;
    }

    std::vector<double> rate_noma_nlos_ub(std::span<const double> p, std::span<const double> beta,
                                          int antennas, double tau)
    {
        const std::vector<double> ones(p.size(), 1.0);
        return rate_noma_nlos_ub(p, beta, ones, antennas, tau);
    }

    RateReport rate_los(const CMatrix &h, std::span<const double> p, std::span<const double> beta,
                        Scheme scheme, const BeamLayout &layout)
    {
        if (scheme == Scheme::MMimo)
        {
            const Eigen::VectorXd diag = gram_inverse_diagonal(h);
            RateReport rep;
            rep.scheme = scheme;
            rep.tau = 1.0;
            for (int k = 0; k < static_cast<int>(h.cols()); ++k)
            {
                UserRate u;
                u.user = k;
                u.sinr = p[idx(k)] * beta[idx(k)] / diag(k);
                u.rate = std::log2(1.0 + u.sinr);
                rep.users.push_back(u);
            }
            return rep;
        }
        const Beamformer bf = build_beamformer(h, layout, scheme);
        return evaluate_rates(link_gains(h, bf, beta), p, 1.0, scheme);
    }

} // namespace hmnoma
