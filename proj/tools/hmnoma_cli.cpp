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

// Command-line front end for the experiment presets.
//
//   hmnoma list
//   hmnoma run fig7 --trials 500 --out results/
//   hmnoma run fig9 --csi estimated --set antennas=16 --verbose

#include "hmnoma/config_io.hpp"
#include "hmnoma/harness.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <sstream>

namespace
{
    std::vector<hmnoma::Scheme> parse_schemes(const std::string &list)
    {
        std::vector<hmnoma::Scheme> out;
        std::stringstream ss(list);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty())
                out.push_back(hmnoma::scheme_from_string(item));
        if (out.empty())
            throw hmnoma::DomainError("empty scheme list");
        return out;
    }
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Downlink NOMA / massive MIMO / hybrid comparison runs"};
    app.require_subcommand(1);

    auto *list = app.add_subcommand("list", "List experiment presets");

    auto *run = app.add_subcommand("run", "Run an experiment preset and write CSV + JSON");
    std::string id, config_file, schemes, csi, out_dir = "results";
    std::vector<std::string> overrides;
    std::uint64_t seed = 0;
    int trials = 0, fading = -1, threads = 0;
    bool verbose = false;
    run->add_option("experiment", id, "Preset id (see `list`)")->required();
    run->add_option("--config", config_file, "System config file (JSON or key = value)")->check(CLI::ExistingFile);
    run->add_option("--set", overrides, "Config override key=value (repeatable)");
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--trials", trials, "User drops per sweep point")->check(CLI::PositiveNumber);
    run->add_option("--fading", fading, "Fading realizations per drop (NLOS)")->check(CLI::PositiveNumber);
    run->add_option("--scheme", schemes, "Comma-separated subset of mMIMO,NOMA,HmNOMA");
    run->add_option("--csi", csi, "Channel knowledge")->check(CLI::IsMember({"perfect", "estimated"}));
    run->add_option("--threads", threads, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--verbose,-v", verbose, "Log solver traces of the first drop");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (list->parsed())
        {
            for (const auto &p : hmnoma::preset_ids())
            {
                const auto s = hmnoma::preset(p);
                std::cout << p << "  " << hmnoma::to_string(s.objective) << ", " << hmnoma::to_string(s.config.scenario)
                          << ", sweep " << hmnoma::to_string(s.sweep) << " (" << s.values.size() << " points)\n";
            }
            return 0;
        }

        auto spec = hmnoma::preset(id);
        if (!config_file.empty())
            spec.config = hmnoma::load_config(config_file, spec.config);
        if (!overrides.empty())
        {
            std::string text;
            for (const auto &o : overrides)
                text += o + "\n";
            spec.config = hmnoma::config_from_json(hmnoma::parse_key_value(text), spec.config);
        }
        if (run->count("--seed"))
            spec.seed = seed;
        if (trials > 0)
            spec.trials = trials;
        if (fading > 0)
            spec.fading = fading;
        if (!schemes.empty())
            spec.schemes = parse_schemes(schemes);
        if (!csi.empty())
            spec.csi = csi == "estimated" ? hmnoma::CsiMode::Estimated : hmnoma::CsiMode::Perfect;
        spec.threads = threads;
        spec.verbose = verbose;

        const auto t0 = std::chrono::steady_clock::now();
        const auto table = hmnoma::run_experiment(spec);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (const auto &line : table.log)
            std::cerr << "[" << spec.id << "] " << line << '\n';
        const auto [csv, json] = hmnoma::emit(table, spec, out_dir);
        std::cout << spec.id << ": " << table.rows.size() << " rows in " << secs << " s\n"
                  << "  " << csv.string() << "\n  " << json.string() << "\n  spec hash " << hmnoma::spec_hash(spec) << '\n';
        return 0;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
