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

#ifndef HMNOMA_SYSMODEL_HPP
#define HMNOMA_SYSMODEL_HPP

#include "hmnoma/common.hpp"

#include <array>
#include <random>
#include <vector>

namespace hmnoma
{
    // Cell and radio parameters. Distances are stored in meters, powers are linear and
    // normalized to the receiver noise power.
    struct SystemConfig
    {
        int antennas = 30;          // M
        int users = 10;             // K, even: users [0, K/2) are centers, [K/2, K) are edges
        int coherence_length = 100; // T, symbols per coherence interval

        // Downlink budget. Zero means "calibrate": pick p_max so that a user at the cell edge
        // sees `edge_snr_db` at full power.
        double p_max = 0.0;
        double edge_snr_db = -5.0;

        // Per-user uplink pilot power. Zero means p_max / K.
        double q_ul = 0.0;

        double pathloss_fixed_db = 130.0;
        double pathloss_slope_db = 37.6;
        double cell_edge_m = 350.0;
        std::array<double, 2> center_ring_m = {50.0, 100.0};
        std::array<double, 2> edge_ring_m = {100.0, 350.0};

        double antenna_spacing = 0.5; // d / lambda
        Scenario scenario = Scenario::NLOS;

        // Edge-to-center rate ratio c of the max-min problem, and the SINR ratio it approximates.
        double rate_ratio = 0.05;
        double sinr_ratio = 100.0;

        // Resolved budgets (calibration applied)
        double budget() const;
        double pilot_power() const;

        // Throws DomainError on any violated invariant
        void validate() const;
    };

    struct UserDrop
    {
        std::vector<double> distance_km;
        std::vector<double> angle_rad; // empty for NLOS
        std::vector<double> beta;      // linear large-scale gain
        std::vector<UserClass> cls;

        int users() const { return static_cast<int>(beta.size()); }
    };

    /// Path and penetration loss in dB at distance `d_km`, 130 + 37.6 log10(d) with default constants.
    double pathloss_db(double d_km, double fixed_db = 130.0, double slope_db = 37.6);

    /// Linear large-scale gain 10^(-PL/10).
    double large_scale_gain(double d_km, const SystemConfig &cfg);

    double received_snr_db(double p, double beta);

    /// Budget that puts a user at the cell edge at `edge_snr_db` received SNR.
    double calibrated_pmax(const SystemConfig &cfg);

    /// Center distances uniform in the center ring, edge distances uniform in the edge ring
    /// (uniform in radius, not area). LOS drops also carry angles uniform in [0, 2 pi).
    UserDrop draw_user_drop(const SystemConfig &cfg, std::mt19937_64 &rng);

    /// User drop at fixed distances (meters); used by the two-user presets.
    UserDrop fixed_user_drop(const SystemConfig &cfg, const std::vector<double> &distances_m,
                             const std::vector<double> &angles_rad = {});

    std::vector<UserClass> default_partition(int users);

} // namespace hmnoma

#endif
