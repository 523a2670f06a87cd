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

#ifndef HMNOMA_CHANNEL_HPP
#define HMNOMA_CHANNEL_HPP

#include "hmnoma/common.hpp"

#include <filesystem>
#include <iosfwd>
#include <random>
#include <vector>

namespace hmnoma
{
    enum class ChannelKind
    {
        True,
        Estimate
    };

    // M x K small-scale channel, one column per user. `quality` holds the per-user
    // estimate variance (1 for true and LOS channels).
    struct ChannelMatrix
    {
        CMatrix h;
        ChannelKind kind = ChannelKind::True;
        std::vector<double> quality;

        int antennas() const { return static_cast<int>(h.rows()); }
        int users() const { return static_cast<int>(h.cols()); }
    };

    /// i.i.d. CN(0, 1) entries.
    ChannelMatrix gen_nlos(int antennas, int users, std::mt19937_64 &rng);

    /// ULA steering vector, entry m = exp(j 2 pi m (d/lambda) sin(phi)).
    CVector los_steering(double phi, int antennas, double spacing);

    ChannelMatrix gen_los(const std::vector<double> &angles, int antennas, double spacing);

    /// |h_i^H h_j| / (|h_i| |h_j|). Throws DomainError on a zero vector.
    double correlation(const CVector &hi, const CVector &hj);

    /// Closed form of `correlation` for two ULA steering vectors.
    double los_correlation(double phi_i, double phi_j, int antennas, double spacing);

    /// |sin(phi_i) - sin(phi_j)|, in [0, 2].
    double los_distance(double phi_i, double phi_j);

    /// NLOS similarity, equal to `correlation`.
    double nlos_distance(const CVector &hi, const CVector &hj);

    // Matrix dump: one CSV row per antenna, columns re_0,im_0,re_1,im_1,... per user.
    void write_matrix_csv(std::ostream &out, const CMatrix &m);
    void write_matrix_csv(const std::filesystem::path &file, const CMatrix &m);
    CMatrix read_matrix_csv(std::istream &in);
    CMatrix read_matrix_csv(const std::filesystem::path &file);

} // namespace hmnoma

#endif
