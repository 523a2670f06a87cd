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

#ifndef HMNOMA_CONFIG_IO_HPP
#define HMNOMA_CONFIG_IO_HPP

#include "hmnoma/sysmodel.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace hmnoma
{
    /*
    Config schema. Every key is optional; missing keys keep the SystemConfig default.

        antennas            M (integer)
        users               K (even integer)
        coherence_length    T (integer, symbols)
        p_max               downlink budget, linear; 0 = calibrate from edge_snr_db
        edge_snr_db         received SNR at the cell edge at full budget (calibration)
        q_ul                uplink pilot power per user, linear; 0 = p_max / K
        pathloss_fixed_db   fixed pathloss term (dB at 1 km)
        pathloss_slope_db   slope (dB per decade of km)
        cell_edge_m         cell radius (m)
        center_min_m / center_max_m / edge_min_m / edge_max_m   rings (m)
        antenna_spacing     d / lambda of the ULA
        scenario            "NLOS" | "LOS"
        rate_ratio          c of the max-min problem
        sinr_ratio          center/edge SINR ratio used by the exact SINR-ratio form

    Files are either a JSON object or plain `key = value` lines with `#` comments.
    */
    SystemConfig config_from_json(const nlohmann::json &j, SystemConfig base = {});
    nlohmann::json config_to_json(const SystemConfig &cfg);

    // Parses `key = value` text; values that parse as numbers become numbers
    nlohmann::json parse_key_value(const std::string &text);

    SystemConfig load_config(const std::filesystem::path &file, SystemConfig base = {});

} // namespace hmnoma

#endif
