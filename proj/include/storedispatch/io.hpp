/*
 * Copyright 2026 The storedispatch Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include "storedispatch/adequacy_metrics.hpp"
#include "storedispatch/core_model.hpp"
#include "storedispatch/weighted_scheduler.hpp"

namespace storedispatch::io {

/**
 * Fleet file (JSON):
 *
 *   { "grid":   { "step_hours": 0.5, "n_steps": 8 },
 *     "stores": [ { "id": "b1", "power_mw": 200, "energy_mwh": 500 }, ... ] }
 *
 * The grid block and each of its keys are optional.
 */
struct FleetConfig {
    Fleet fleet;
    std::optional<double> step_h;
    std::optional<std::size_t> n_steps;
};

FleetConfig parse_fleet_config(std::string_view text, const std::string& source);
FleetConfig read_fleet_config(const std::filesystem::path& path);

/// `step_index,demand_mw` CSV. expected_steps, when set, must match the row count.
DemandTrace parse_demand_csv(std::istream& in, const std::string& source, double step_h,
                             std::optional<std::size_t> expected_steps = std::nullopt);
DemandTrace read_demand_csv(const std::filesystem::path& path, double step_h,
                            std::optional<std::size_t> expected_steps = std::nullopt);

/**
 * `step_index,scenario_0,scenario_1,...` CSV. An optional row whose first
 * cell is `probability` gives the scenario weights; without it, or with
 * force_uniform, scenarios are equally likely.
 */
ScenarioSet parse_scenarios_csv(std::istream& in, const std::string& source, double step_h,
                                std::optional<std::size_t> expected_steps = std::nullopt,
                                bool force_uniform = false);
ScenarioSet read_scenarios_csv(const std::filesystem::path& path, double step_h,
                               std::optional<std::size_t> expected_steps = std::nullopt,
                               bool force_uniform = false);

/// Lines of `breakpoint,slope`; `#` comments and a non-numeric header are skipped.
std::vector<PwlPiece> read_pwl_file(const std::filesystem::path& path);

/// `linear`, `power:<p>` or `pwl:<file>`.
CostFunction parse_cost_spec(std::string_view spec);

/// `step_index,<store ids...>,firm,residual`.
void write_schedule_csv(std::ostream& out, const Fleet& fleet, const DispatchSchedule& schedule);
/// Reads a schedule written by write_schedule_csv; residual is re-derived from the demand.
DispatchSchedule read_schedule_csv(const std::filesystem::path& path, const Fleet& fleet,
                                   const DemandTrace& demand);

/// `t_hours,cum_storage_mwh,cum_demand_mwh`.
void write_cumulative_csv(std::ostream& out, const FeasibilityResult& result);

/// One row per store: id, threshold, composite level, multiplier.
void write_certificate_csv(std::ostream& out, const Fleet& fleet, const ThresholdCertificate& cert);

/// Shortest round-trip decimal form.
std::string format_number(double v);

}  // namespace storedispatch::io
