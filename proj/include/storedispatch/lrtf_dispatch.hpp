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
#include <span>
#include <vector>

#include "storedispatch/core_model.hpp"

namespace storedispatch {

/// Relative tolerance under which two residual times count as equal.
inline constexpr double kResidualTimeTieTolerance = 1e-9;

/// Remaining energy per store while a fleet is being discharged.
struct FleetState {
    std::vector<double> remaining_mwh;

    static FleetState full(const Fleet& fleet);

    /// Remaining energy over power; zero for inert or empty stores.
    double residual_time_h(const Fleet& fleet, std::size_t i) const;
    bool available(const Fleet& fleet, std::size_t i) const;
};

/**
 * Splits a total rate across the fleet, longest residual time first.
 *
 * Stores with equal residual time (within kResidualTimeTieTolerance) form a
 * group. Groups run at full power in descending residual-time order; the
 * last group needed runs at a common fraction of full power so the total is
 * met exactly. Throws InfeasibleTargetError when target_mw exceeds the power
 * of the nonempty stores.
 */
std::vector<double> lrtf_allocate_step(const FleetState& state, const Fleet& fleet, double target_mw);

struct SimulationResult {
    DispatchSchedule schedule;
    /// Remaining energy at each step boundary: [0..n_steps][store].
    std::vector<std::vector<double>> remaining_mwh;
    /// Instant each store ran dry; +inf if it never did.
    std::vector<double> emptied_at_h;
    /// Membership in the set of stores emptied strictly before t_prime.
    std::vector<bool> strictly_binding;
    /// Whether demand ever exceeded the available power.
    bool loss_of_load = false;
    /// Last instant at which demand exceeded available power; 0 without loss of load.
    double t_prime_h = 0.0;
    double served_mwh = 0.0;
    double unserved_mwh = 0.0;

    std::vector<std::size_t> binding_stores() const;
    std::vector<std::size_t> nonbinding_stores() const;
};

/**
 * Greedy LRTF dispatch: at every instant serve min(demand, available power),
 * split by lrtf_allocate_step, with firm capacity ahead of every store.
 *
 * Steps are split at each instant a store empties or two residual-time
 * groups meet, so results are exact for piecewise-constant demand. Reported
 * rates are step averages.
 */
SimulationResult greedy_lrtf_simulate(const Fleet& fleet, const DemandTrace& demand, double firm_mw = 0.0);

/**
 * Fixed-priority greedy dispatch: stores earlier in `order` are drained
 * before later ones are touched. Kept as a baseline for comparison.
 */
SimulationResult priority_order_simulate(const Fleet& fleet, const DemandTrace& demand,
                                         std::span<const std::size_t> order);

/// Hours during which demand strictly exceeds the subset's total power.
double lole_of_set(const Fleet& subset, const DemandTrace& demand);

}  // namespace storedispatch
