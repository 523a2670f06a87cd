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

#ifndef HMNOMA_HARNESS_HPP
#define HMNOMA_HARNESS_HPP

#include "hmnoma/powerops.hpp"
#include "hmnoma/sysmodel.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hmnoma
{
    enum class Objective
    {
        RateRegion, // two fixed users, sweep of the power split
        TwoUser,    // two fixed users, closed-form maxima over M
        SumRate,
        MaxMin
    };

    enum class SweepVar
    {
        Antennas,
        Users,
        Threshold,
        PowerSplit
    };

    enum class CsiMode
    {
        Perfect,
        Estimated
    };

    enum class RateMethod
    {
        ClosedForm,   // NLOS bounds (mMIMO lower bound, NOMA upper bounds)
        Instantaneous // per-realization SINRs of the actual ZF beams
    };

    struct ExperimentSpec
    {
        std::string id = "custom";
        SystemConfig config;
        Objective objective = Objective::SumRate;
        SweepVar sweep = SweepVar::Antennas;
        std::vector<double> values;
        int trials = 2000; // user drops per sweep point
        int fading = 1;    // small-scale realizations per drop (NLOS instantaneous only)
        std::uint64_t seed = 1;
        std::vector<Scheme> schemes = {Scheme::MMimo, Scheme::Noma};
        CsiMode csi = CsiMode::Perfect;
        RateMethod method = RateMethod::ClosedForm;
        bool crossover_probability = false;
        double threshold = -1.0; // HmNOMA threshold when not swept; < 0 picks 1/(2M) (LOS) or 0.3 (NLOS)
        std::vector<double> fixed_distances_m = {100.0, 350.0}; // two-user presets
        MaxMinOptions maxmin;
        int threads = 0; // 0 = hardware concurrency
        bool verbose = false;

        void validate() const;
    };

    struct ResultRow
    {
        double sweep = 0.0;
        std::string series;
        double value = 0.0;
        int trials = 0;
        double std_error = 0.0;
    };

    struct ResultTable
    {
        std::string experiment;
        std::string sweep_name;
        std::vector<ResultRow> rows;
        std::vector<std::string> log;
        double max_constraint_violation = 0.0; // max-min experiments

        std::optional<ResultRow> find(const std::string &series, double sweep, double tol = 1e-9) const;
        std::vector<ResultRow> series(const std::string &name) const;
    };

    std::string_view to_string(SweepVar v);
    std::string_view to_string(Objective o);

    /// Preset for "fig1" ... "fig10" (plus "fig8-m12"). Throws DomainError for unknown ids.
    ExperimentSpec preset(const std::string &id);
    std::vector<std::string> preset_ids();

    /// Runs the sweep. Deterministic given the spec; worker count does not change the output.
    ResultTable run_experiment(const ExperimentSpec &spec);

    struct ProbabilityPoint
    {
        int antennas = 0;
        double probability = 0.0;
        double std_error = 0.0;
        int trials = 0;
    };

    /// Fraction of user drops for which the NOMA sum-rate optimum strictly beats mMIMO's.
    std::vector<ProbabilityPoint> crossover_probability(const std::vector<int> &antennas,
                                                        const SystemConfig &config, int trials,
                                                        std::uint64_t seed = 1, int threads = 0);

    /// Zero crossing of mean(a) - mean(b) along the sweep, linearly interpolated; nullopt when the
    /// sign never changes.
    struct Crossover
    {
        double interpolated = 0.0;
        double first_point = 0.0; // first sweep value where the sign has flipped
    };
    std::optional<Crossover> find_crossover(const ResultTable &table, const std::string &a, const std::string &b);

    // ---- persistence ----

    nlohmann::json spec_to_json(const ExperimentSpec &spec);
    ExperimentSpec spec_from_json(const nlohmann::json &j);
    std::string spec_hash(const ExperimentSpec &spec);

    void write_csv(std::ostream &out, const ResultTable &table);
    nlohmann::json table_to_json(const ResultTable &table, const ExperimentSpec &spec);

    /// Writes <dir>/<id>.csv and <dir>/<id>.json; returns the two paths.
    std::pair<std::filesystem::path, std::filesystem::path> emit(const ResultTable &table, const ExperimentSpec &spec,
                                                                 const std::filesystem::path &dir);

    struct StoredResult
    {
        ExperimentSpec spec;
        std::string stored_hash;
        std::vector<ResultRow> rows;
    };
    StoredResult read_result_json(const std::filesystem::path &file);

} // namespace hmnoma

#endif
