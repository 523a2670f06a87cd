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

#ifndef HMNOMA_PAIRING_HPP
#define HMNOMA_PAIRING_HPP

#include "hmnoma/beamrate.hpp"

#include <utility>
#include <vector>

namespace hmnoma
{
    struct Pairing
    {
        std::vector<std::pair<int, int>> pairs; // (center, edge)
        std::vector<int> unpaired;
        double threshold = 0.0;
    };

    /// Greedy pairing over centers in index order: each center picks the unpaired edge with the
    /// smallest |sin(phi_i) - sin(phi_j)| (lowest index on ties) and keeps it iff the gap < nu.
    Pairing pair_los(const std::vector<double> &angles, const std::vector<UserClass> &cls, double nu);

    /// Same greedy order on channel correlation: the most correlated unpaired edge is kept iff
    /// rho > nu.
    Pairing pair_nlos(const CMatrix &h, const std::vector<UserClass> &cls, double nu);

    /// Beam layout of the hybrid scheme: one beam per pair (spanned by the center's channel) and
    /// one per unpaired user. Throws SingularBasisError when the basis exceeds M antennas.
    BeamLayout hmnoma_partition(const Pairing &pairing, const std::vector<UserClass> &cls, int antennas);

} // namespace hmnoma

#endif
