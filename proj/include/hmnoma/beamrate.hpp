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

#ifndef HMNOMA_BEAMRATE_HPP
#define HMNOMA_BEAMRATE_HPP

#include "hmnoma/channel.hpp"

#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace hmnoma
{
    // Which channel defines each beam and which beam serves each user.
    //
    // A NOMA group (center c, edge e) shares the beam built from h_c; c cancels e's signal
    // before decoding its own, e treats everything else as noise.
    struct BeamLayout
    {
        std::vector<int> basis;       // user whose channel spans each beam
        std::vector<int> beam_of;     // beam index per user, -1 when unserved
        std::vector<int> sic_partner; // center -> its edge, edge -> its center, -1 otherwise
        std::vector<UserClass> cls;

        static BeamLayout mmimo(int users);
        /// Groups (k, k + K/2), one beam per center.
        static BeamLayout noma(int users);

        int users() const { return static_cast<int>(beam_of.size()); }
        int beams() const { return static_cast<int>(basis.size()); }
        int pairs() const;
        bool is_paired_center(int k) const;
        bool is_paired_edge(int k) const;

        // Throws ContractViolation on inconsistent maps
        void validate() const;
    };

    struct Beamformer
    {
        CMatrix v; // M x B, unit-norm columns
        BeamLayout layout;
        Scheme scheme = Scheme::MMimo;
    };

    /// Unnormalized ZF precoder B (B^H B)^{-1}. Throws SingularBasisError when B has more
    /// columns than rows or is numerically rank deficient.
    CMatrix zf_precoder(const CMatrix &basis);

    /// Normalized ZF beams over `basis`: unit-norm columns with v_j^H h_i = 0 for i != j.
    Beamformer zf_beamformer(const CMatrix &basis);

    /// Beams over the layout's basis columns of `channels` (true or estimated).
    Beamformer build_beamformer(const CMatrix &channels, const BeamLayout &layout, Scheme scheme);

    /// diag((H^H H)^{-1}).
    Eigen::VectorXd gram_inverse_diagonal(const CMatrix &h);

    // Per-user gains against every beam: gain(k, b) = beta_k |h_k^H v_b|^2.
    struct LinkGains
    {
        Eigen::MatrixXd gain;
        BeamLayout layout;

        int users() const { return static_cast<int>(gain.rows()); }
    };

    LinkGains link_gains(const CMatrix &h, const Beamformer &bf, std::span<const double> beta);

    /// SINR of user k. Paired centers drop their partner's term (SIC); other beams are noise.
    double sinr_instantaneous(const LinkGains &g, std::span<const double> p, int k);

    /// SINR at paired center c when it decodes its partner edge's symbol.
    double sic_sinr(const LinkGains &g, std::span<const double> p, int center);

    /// True iff the center's rate for the edge symbol is at least the edge's own rate.
    bool sic_condition(const LinkGains &g, std::span<const double> p, int center);

    double sinr_instantaneous(const CMatrix &h, const Beamformer &bf, std::span<const double> p,
                              std::span<const double> beta, int k);
    bool sic_condition(const CMatrix &h, const Beamformer &bf, std::span<const double> p,
                       std::span<const double> beta, int center);

    struct UserRate
    {
        int user = 0;
        double sinr = 0.0;
        double rate = 0.0;
        int pair_id = -1; // group index for paired users
        bool sic_ok = true;
    };

    struct RateReport
    {
        Scheme scheme = Scheme::MMimo;
        double tau = 1.0;
        std::vector<UserRate> users;

        double sum_rate() const;
    };

    RateReport evaluate_rates(const LinkGains &g, std::span<const double> p, double tau, Scheme scheme);

    // One CSV row per user: scheme,M,K,drop,user,rate,sinr,sic,pair
    void write_rate_csv_header(std::ostream &out);
    void write_rate_csv(std::ostream &out, const RateReport &report, int antennas, int drop_id);

    /// Monte-Carlo mean of |h_b^H v_b|^2 for normalized ZF over B i.i.d. Rayleigh users.
    /// With gamma < 1 the beams come from MMSE estimates of variance gamma.
    struct GainStats
    {
        double mean = 0.0;
        double std_error = 0.0;
    };
    GainStats effective_gain_stats(int antennas, int basis, int trials, std::mt19937_64 &rng,
                                   double gamma = 1.0);

    /// Closed-form ZF lower bound,
    /// tau log2(1 + (M-K) p_k beta_k gamma_k / (beta_k (1 - gamma_k) sum(p) + 1)).
    std::vector<double> rate_mmimo_nlos_lb(std::span<const double> p, std::span<const double> beta,
                                           std::span<const double> gamma, int antennas, double tau);

    /// NOMA upper bounds with groups (k, k+K/2), perfect CSI:
    ///   centers tau log2(1 + p_k beta_k (M + 1 - K/2)),
    ///   edges   tau log2(1 + p_k beta_k / (p_{k-K/2} beta_k + 1)).
    std::vector<double> rate_noma_nlos_ub(std::span<const double> p, std::span<const double> beta,
                                          int antennas, double tau);

    /// Same bounds with beams built from estimates of quality gamma (centers only matter):
    /// E|h_k^H v_k|^2 = gamma_k (M + 1 - K/2) + 1 - gamma_k for centers, 1 for edges.
    std::vector<double> rate_noma_nlos_ub(std::span<const double> p, std::span<const double> beta,
                                          std::span<const double> gamma, int antennas, double tau);

    double noma_center_gain(int antennas, int users, double gamma = 1.0);

    /// LOS rates, tau = 1. mMIMO uses p_k beta_k / [(H^H H)^{-1}]_kk; NOMA and HmNOMA evaluate the
    /// instantaneous SINRs of the layout's ZF beams with SIC at paired centers.
    RateReport rate_los(const CMatrix &h, std::span<const double> p, std::span<const double> beta,
                        Scheme scheme, const BeamLayout &layout);

} // namespace hmnoma

#endif
