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

#include <functional>
#include <span>
#include <vector>

#include "storedispatch/core_model.hpp"
#include "storedispatch/weighted_scheduler.hpp"

namespace storedispatch {

/// What a forecaster may look at: demand realised up to and including `step`.
struct ForecastContext {
    std::span<const double> realized_mw;  // steps 0..step
    std::size_t step;
    TimeGrid grid;
};

/// Point forecast of demand for steps step..n_steps-1. Must be stateless.
using Forecaster = std::function<std::vector<double>(const ForecastContext&)>;

/// Knows the true trace in advance. For tests and perfect-information baselines.
Forecaster perfect_forecaster(DemandTrace truth);

/**
 * Probability-weighted mean of the scenarios whose past matches the realised
 * demand; falls back to every scenario when none matches.
 */
Forecaster expected_value_forecaster(ScenarioSet model);

/// Repeats the latest realised value.
Forecaster persistence_forecaster();

struct PolicyTrace {
    std::vector<DispatchSchedule> schedules;  // per scenario
    std::vector<double> weighted_eeu;         // per scenario
    double expected_weighted_eeu = 0.0;
};

/**
 * Rolling-intrinsic dispatch. At every step of every scenario: forecast the
 * rest of the horizon, solve the deterministic problem from the current
 * remaining energies, commit only the current step, and move on.
 *
 * The deterministic solve is the sequential threshold construction, except
 * for linear w where the greedy LRTF dispatch (also optimal there) is used.
 */
PolicyTrace rolling_intrinsic(const Fleet& fleet, const ScenarioSet& scenarios,
                              const Forecaster& forecaster, const CostFunction& w,
                              unsigned parallelism = 1);

struct FirstStepSearch {
    double rate_mw = 0.0;
    double expected_cost = 0.0;
};

/**
 * Best total rate for the first step when every scenario shares its first
 * value and the rest of the trace is revealed one step later. The first-step
 * rate is split longest residual time first; each scenario's tail is then
 * solved optimally. Exact for a single store.
 */
FirstStepSearch first_step_search(const Fleet& fleet, const ScenarioSet& scenarios, const CostFunction& w);

// Two-period single-store model: store P = E = 2, demand 2 on [0,1] then
// k ~ Uniform[0,4] on [1,2], cost w(d) = d^p.

/// Expected weighted EEU when serving rate x on [0,1] then min(k, 2 - x).
double example2_objective(double p, double x);

/// Minimiser of example2_objective over x in [0, 2].
double example2_optimal_rate(double p);

}  // namespace storedispatch
