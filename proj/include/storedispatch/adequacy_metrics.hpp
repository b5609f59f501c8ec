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

#include <vector>

#include "storedispatch/core_model.hpp"

namespace storedispatch {

struct ScenarioAdequacy {
    double eeu_mwh = 0.0;
    double lole_sne_h = 0.0;
    double served_mwh = 0.0;
};

struct AdequacyReport {
    double eeu_mwh = 0.0;
    /// Expected loss-of-load duration of the stores that never bind.
    double lole_sne_h = 0.0;
    /// Right derivative of minimised EEU with respect to added firm capacity.
    double eeu_derivative_mwh_per_mw = 0.0;
    std::vector<ScenarioAdequacy> per_scenario;
};

struct EfcResult {
    double efc_mw = 0.0;
    double delta_eeu_mwh = 0.0;
    double lole_sne_h = 0.0;
};

struct CumulativePoint {
    double t_h;
    double storage_mwh;
    double demand_mwh;
};

struct FeasibilityResult {
    bool feasible = true;
    /// Onset of the earliest interval where cumulative demand exceeds cumulative storage.
    double first_violation_h = 0.0;
    double max_deficit_mwh = 0.0;
    double max_deficit_at_h = 0.0;
    /// Both cumulative curves at every merged breakpoint in [0, T].
    std::vector<CumulativePoint> curve;
};

/**
 * Minimised EEU: probability-weighted unserved energy of the greedy LRTF
 * dispatch over every scenario. `parallelism` > 1 spreads scenarios across
 * threads; aggregation order is fixed by scenario index.
 */
double eeu(const Fleet& fleet, const ScenarioSet& scenarios, double firm_mw = 0.0,
           unsigned parallelism = 1);

AdequacyReport adequacy_report(const Fleet& fleet, const ScenarioSet& scenarios, double firm_mw = 0.0,
                               unsigned parallelism = 1);

/// Compares cumulative storage and demand profiles at every breakpoint.
FeasibilityResult feasible_by_profile(const Fleet& fleet, const DemandTrace& demand);

/// Equals minus the expected loss-of-load duration of the nonbinding stores.
double eeu_derivative(const Fleet& fleet, const ScenarioSet& scenarios, unsigned parallelism = 1);

/**
 * Equivalent firm capacity of a small store added to the fleet: the EEU
 * reduction it brings divided by the expected loss-of-load duration of the
 * existing fleet's nonbinding stores. Throws UndefinedMetric when that
 * duration is zero. Only meaningful for marginal additions.
 */
EfcResult efc_marginal(const Fleet& fleet, const Store& candidate, const ScenarioSet& scenarios,
                       unsigned parallelism = 1);

}  // namespace storedispatch
