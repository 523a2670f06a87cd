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

#include "hmnoma/pairing.hpp"

#include <algorithm>
#include <string>

namespace hmnoma
{
    namespace
    {
        std::size_t idx(int k) { return static_cast<std::size_t>(k); }

        // `score(i, j)` is lower-is-better; `keep(score)` decides whether the best pair is formed.
        template <typename Score, typename Keep>
        Pairing greedy_pairing(const std::vector<UserClass> &cls, double nu, Score score, Keep keep)
        {
            const int K = static_cast<int>(cls.size());
            Pairing out;
            out.threshold = nu;
            std::vector<bool> taken(idx(K), false);
            for (int i = 0; i < K; ++i)
            {
                if (cls[idx(i)] != UserClass::Center)
                    continue;
                int best = -1;
                double best_score = 0.0;
                for (int j = 0; j < K; ++j)
                {
                    if (cls[idx(j)] != UserClass::Edge || taken[idx(j)])
                        continue;
                    const double s = score(i, j);
                    if (best < 0 || s < best_score)
                    {
                        best = j;
                        best_score = s;
                    }
                }
                if (best >= 0 && keep(best_score))
                {
                    out.pairs.emplace_back(i, best);
                    taken[idx(i)] = true;
                    taken[idx(best)] = true;
                }
            }
            for (int k = 0; k < K; ++k)
                if (!taken[idx(k)])
                    out.unpaired.push_back(k);
            return out;
        }
    } // namespace

    Pairing pair_los(const std::vector<double> &angles, const std::vector<UserClass> &cls, double nu)
    {
        if (angles.size() != cls.size())
            throw ContractViolation("pair_los: one angle per user required");
        if (nu < 0.0)
            throw DomainError("pair_los: threshold must be non-negative");
        return greedy_pairing(
            cls, nu, [&](int i, int j) { return los_distance(angles[idx(i)], angles[idx(j)]); },
            [&](double d) { return d < nu; });
    }

    Pairing pair_nlos(const CMatrix &h, const std::vector<UserClass> &cls, double nu)
    {
        if (static_cast<std::size_t>(h.cols()) != cls.size())
            throw ContractViolation("pair_nlos: one channel per user required");
        if (nu < 0.0 || nu > 1.0)
            throw DomainError("pair_nlos: threshold must lie in [0, 1]");
        // Similarity: negate so that the greedy minimizer picks the most correlated edge
        return greedy_pairing(
            cls, nu, [&](int i, int j) { return -nlos_distance(h.col(i), h.col(j)); },
            [&](double neg_rho) { return -neg_rho > nu; });
    }

    BeamLayout hmnoma_partition(const Pairing &pairing, const std::vector<UserClass> &cls, int antennas)
    {
        const int K = static_cast<int>(cls.size());
        BeamLayout l;
        l.cls = cls;
        l.beam_of.assign(idx(K), -1);
        l.sic_partner.assign(idx(K), -1);
        for (const auto &[c, e] : pairing.pairs)
        {
            if (cls[idx(c)] != UserClass::Center || cls[idx(e)] != UserClass::Edge)
                throw ContractViolation("hmnoma_partition: pairs must be (center, edge)");
            if (l.sic_partner[idx(c)] >= 0 || l.sic_partner[idx(e)] >= 0)
                throw ContractViolation("hmnoma_partition: user appears in two pairs");
            l.sic_partner[idx(c)] = e;
            l.sic_partner[idx(e)] = c;
        }
        // Beams in ascending owner order so an empty pairing reproduces the mMIMO layout exactly
        for (int k = 0; k < K; ++k)
        {
            if (l.is_paired_edge(k))
                continue;
            l.beam_of[idx(k)] = l.beams();
            l.basis.push_back(k);
        }
        for (int k = 0; k < K; ++k)
            if (l.is_paired_edge(k))
                l.beam_of[idx(k)] = l.beam_of[idx(l.sic_partner[idx(k)])];
        if (l.beams() > antennas)
            throw SingularBasisError("hmnoma_partition: " + std::to_string(l.beams()) + " beams exceed " +
                                     std::to_string(antennas) + " antennas");
        l.validate();
        return l;
    }

} // namespace hmnoma
