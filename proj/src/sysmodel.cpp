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

#include "hmnoma/sysmodel.hpp"
#include "hmnoma/config_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hmnoma
{
    std::string_view to_string(Scenario s)
    {
        return s == Scenario::LOS ? "LOS" : "NLOS";
    }

    std::string_view to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::MMimo:
            return "mMIMO";
        case Scheme::Noma:
            return "NOMA";
        case Scheme::HmNoma:
            return "HmNOMA";
        }
        return "?";
    }

    Scenario scenario_from_string(std::string_view s)
    {
        if (s == "LOS" || s == "los")
            return Scenario::LOS;
        if (s == "NLOS" || s == "nlos")
            return Scenario::NLOS;
        throw DomainError("unknown scenario '" + std::string(s) + "'");
    }

    Scheme scheme_from_string(std::string_view s)
    {
        if (s == "mMIMO" || s == "mmimo")
            return Scheme::MMimo;
        if (s == "NOMA" || s == "noma")
            return Scheme::Noma;
        if (s == "HmNOMA" || s == "hmnoma")
            return Scheme::HmNoma;
        throw DomainError("unknown scheme '" + std::string(s) + "'");
    }

    double pathloss_db(double d_km, double fixed_db, double slope_db)
    {
        if (!(d_km > 0.0))
            throw DomainError("pathloss_db: distance must be positive");
        return fixed_db + slope_db * std::log10(d_km);
    }

    double large_scale_gain(double d_km, const SystemConfig &cfg)
    {
        return std::pow(10.0, -pathloss_db(d_km, cfg.pathloss_fixed_db, cfg.pathloss_slope_db) / 10.0);
    }

    double received_snr_db(double p, double beta)
    {
        return 10.0 * std::log10(p * beta);
    }

    double calibrated_pmax(const SystemConfig &cfg)
    {
        const double pl = pathloss_db(cfg.cell_edge_m / 1000.0, cfg.pathloss_fixed_db, cfg.pathloss_slope_db);
        return std::pow(10.0, (pl + cfg.edge_snr_db) / 10.0);
    }

    double SystemConfig::budget() const
    {
        return p_max > 0.0 ? p_max : calibrated_pmax(*this);
    }

    double SystemConfig::pilot_power() const
    {
        return q_ul > 0.0 ? q_ul : budget() / users;
    }

    void SystemConfig::validate() const
    {
        if (antennas < 1)
            throw DomainError("config: antennas must be >= 1");
        if (users < 2 || users % 2 != 0)
            throw DomainError("config: users must be an even integer >= 2");
        if (coherence_length < 1)
            throw DomainError("config: coherence_length must be >= 1");
        if (scenario == Scenario::NLOS && coherence_length < users)
            throw DomainError("config: NLOS requires coherence_length >= users");
        if (p_max < 0.0 || q_ul < 0.0)
            throw DomainError("config: powers must be positive (0 selects the default)");
        if (!(antenna_spacing > 0.0))
            throw DomainError("config: antenna_spacing must be positive");
        if (!(center_ring_m[0] > 0.0 && center_ring_m[0] <= center_ring_m[1] &&
              center_ring_m[1] <= edge_ring_m[0] && edge_ring_m[0] <= edge_ring_m[1] &&
              edge_ring_m[1] <= cell_edge_m))
            throw DomainError("config: rings must be ordered 0 < center <= edge <= cell edge");
        if (!(rate_ratio > 0.0 && rate_ratio < 1.0))
            throw DomainError("config: rate_ratio must lie in (0, 1)");
        if (!(sinr_ratio > 0.0))
            throw DomainError("config: sinr_ratio must be positive");
    }

    std::vector<UserClass> default_partition(int users)
    {
        std::vector<UserClass> cls(static_cast<std::size_t>(users), UserClass::Edge);
        for (int k = 0; k < users / 2; ++k)
            cls[static_cast<std::size_t>(k)] = UserClass::Center;
        if (users == 1)
            cls[0] = UserClass::Center;
        return cls;
    }

    UserDrop draw_user_drop(const SystemConfig &cfg, std::mt19937_64 &rng)
    {
        cfg.validate();
        const int K = cfg.users;
        UserDrop drop;
        drop.cls = default_partition(K);
        drop.distance_km.resize(static_cast<std::size_t>(K));
        drop.beta.resize(static_cast<std::size_t>(K));

        std::uniform_real_distribution<double> center(cfg.center_ring_m[0], cfg.center_ring_m[1]);
        std::uniform_real_distribution<double> edge(cfg.edge_ring_m[0], cfg.edge_ring_m[1]);
        for (int k = 0; k < K; ++k)
        {
            const double d_m = k < K / 2 ? center(rng) : edge(rng);
            drop.distance_km[static_cast<std::size_t>(k)] = d_m / 1000.0;
        }

        // An edge draw can only tie a center draw at the shared ring boundary; nudge it outward
        // so that every center gain is strictly larger than every edge gain.
        if (cfg.center_ring_m[1] == cfg.edge_ring_m[0])
        {
            const double boundary = cfg.edge_ring_m[0] / 1000.0;
            for (int k = K / 2; k < K; ++k)
            {
                auto &d = drop.distance_km[static_cast<std::size_t>(k)];
                if (d <= boundary)
                    d = std::nextafter(boundary, 1.0e9);
            }
        }

        for (int k = 0; k < K; ++k)
            drop.beta[static_cast<std::size_t>(k)] = large_scale_gain(drop.distance_km[static_cast<std::size_t>(k)], cfg);

        if (cfg.scenario == Scenario::LOS)
        {
            std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
            drop.angle_rad.resize(static_cast<std::size_t>(K));
            for (auto &phi : drop.angle_rad)
                phi = angle(rng);
        }
        return drop;
    }

    UserDrop fixed_user_drop(const SystemConfig &cfg, const std::vector<double> &distances_m,
                             const std::vector<double> &angles_rad)
    {
        UserDrop drop;
        const int K = static_cast<int>(distances_m.size());
        drop.cls = default_partition(K);
        for (double d : distances_m)
        {
            drop.distance_km.push_back(d / 1000.0);
            drop.beta.push_back(large_scale_gain(d / 1000.0, cfg));
        }
        drop.angle_rad = angles_rad;
        return drop;
    }

    // ---- config I/O ----

    SystemConfig config_from_json(const nlohmann::json &j, SystemConfig cfg)
    {
        if (!j.is_object())
            throw DomainError("config: expected an object of key/value pairs");
        for (const auto &[key, value] : j.items())
        {
            if (key == "antennas")
                cfg.antennas = value.get<int>();
            else if (key == "users")
                cfg.users = value.get<int>();
            else if (key == "coherence_length")
                cfg.coherence_length = value.get<int>();
            else if (key == "p_max")
                cfg.p_max = value.get<double>();
            else if (key == "edge_snr_db")
                cfg.edge_snr_db = value.get<double>();
            else if (key == "q_ul")
                cfg.q_ul = value.get<double>();
            else if (key == "pathloss_fixed_db")
                cfg.pathloss_fixed_db = value.get<double>();
            else if (key == "pathloss_slope_db")
                cfg.pathloss_slope_db = value.get<double>();
            else if (key == "cell_edge_m")
                cfg.cell_edge_m = value.get<double>();
            else if (key == "center_min_m")
                cfg.center_ring_m[0] = value.get<double>();
            else if (key == "center_max_m")
                cfg.center_ring_m[1] = value.get<double>();
            else if (key == "edge_min_m")
                cfg.edge_ring_m[0] = value.get<double>();
            else if (key == "edge_max_m")
                cfg.edge_ring_m[1] = value.get<double>();
            else if (key == "antenna_spacing")
                cfg.antenna_spacing = value.get<double>();
            else if (key == "scenario")
                cfg.scenario = scenario_from_string(value.get<std::string>());
            else if (key == "rate_ratio")
                cfg.rate_ratio = value.get<double>();
            else if (key == "sinr_ratio")
                cfg.sinr_ratio = value.get<double>();
            else
                throw DomainError("config: unknown key '" + key + "'");
        }
        return cfg;
    }

    nlohmann::json config_to_json(const SystemConfig &cfg)
    {
        return {
            {"antennas", cfg.antennas},
            {"users", cfg.users},
            {"coherence_length", cfg.coherence_length},
            {"p_max", cfg.p_max},
            {"edge_snr_db", cfg.edge_snr_db},
            {"q_ul", cfg.q_ul},
            {"pathloss_fixed_db", cfg.pathloss_fixed_db},
            {"pathloss_slope_db", cfg.pathloss_slope_db},
            {"cell_edge_m", cfg.cell_edge_m},
            {"center_min_m", cfg.center_ring_m[0]},
            {"center_max_m", cfg.center_ring_m[1]},
            {"edge_min_m", cfg.edge_ring_m[0]},
            {"edge_max_m", cfg.edge_ring_m[1]},
            {"antenna_spacing", cfg.antenna_spacing},
            {"scenario", std::string(to_string(cfg.scenario))},
            {"rate_ratio", cfg.rate_ratio},
            {"sinr_ratio", cfg.sinr_ratio},
        };
    }

    nlohmann::json parse_key_value(const std::string &text)
    {
        nlohmann::json out = nlohmann::json::object();
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        auto trim = [](std::string s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        while (std::getline(in, line))
        {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            try
            {
                std::size_t used = 0;
                const double x = std::stod(value, &used);
                if (used != value.size())
                    throw std::invalid_argument("trailing");
                if (value.find_first_of(".eE") == std::string::npos)
                    out[key] = static_cast<long long>(x);
                else
                    out[key] = x;
            }
            catch (const std::invalid_argument &)
            {
                out[key] = value;
            }
        }
        return out;
    }

    SystemConfig load_config(const std::filesystem::path &file, SystemConfig base)
    {
        std::ifstream in(file);
        if (!in)
            throw std::runtime_error("cannot open config file " + file.string());
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();
        const auto first = text.find_first_not_of(" \t\r\n");
        try
        {
            if (first != std::string::npos && text[first] == '{')
                return config_from_json(nlohmann::json::parse(text), base);
            return config_from_json(parse_key_value(text), base);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw DomainError(file.string() + ": " + e.what());
        }
    }

} // namespace hmnoma
