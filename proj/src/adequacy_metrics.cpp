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

#include "storedispatch/adequacy_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"
#include "storedispatch/error.hpp"
#include "storedispatch/lrtf_dispatch.hpp"

namespace storedispatch {

namespace {

ScenarioAdequacy evaluate_scenario(const Fleet& fleet, const DemandTrace& demand, double firm_mw) {
    const auto sim = greedy_lrtf_simulate(fleet, demand, firm_mw);
    const auto nonbinding = fleet.subset(sim.nonbinding_stores());
    return {sim.unserved_mwh, lole_of_set(nonbinding, demand), sim.served_mwh};
}

std::vector<ScenarioAdequacy> evaluate_all(const Fleet& fleet, const ScenarioSet& scenarios,
                                           double firm_mw, unsigned parallelism) {
    std::vector<ScenarioAdequacy> out(scenarios.size());
    detail::parallel_for(scenarios.size(), parallelism, [&](std::size_t s) {
        out[s] = evaluate_scenario(fleet, scenarios.trace(s), firm_mw);
    });
    return out;
}

}  // namespace

AdequacyReport adequacy_report(const Fleet& fleet, const ScenarioSet& scenarios, double firm_mw,
                               unsigned parallelism) {
    AdequacyReport r;
    r.per_scenario = evaluate_all(fleet, scenarios, firm_mw, parallelism);
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
        r.eeu_mwh += scenarios.probability(s) * r.per_scenario[s].eeu_mwh;
        r.lole_sne_h += scenarios.probability(s) * r.per_scenario[s].lole_sne_h;
    }
    r.eeu_derivative_mwh_per_mw = -r.lole_sne_h;
    return r;
}

double eeu(const Fleet& fleet, const ScenarioSet& scenarios, double firm_mw, unsigned parallelism) {
    return adequacy_report(fleet, scenarios, firm_mw, parallelism).eeu_mwh;
}

double eeu_derivative(const Fleet& fleet, const ScenarioSet& scenarios, unsigned parallelism) {
    return adequacy_report(fleet, scenarios, 0.0, parallelism).eeu_derivative_mwh_per_mw;
}

FeasibilityResult feasible_by_profile(const Fleet& fleet, const DemandTrace& demand) {
    const Profile supply = storage_profile(fleet);
    const Profile load = demand_profile(demand);
    const double horizon = demand.grid().horizon_h();

    std::vector<double> pts{0.0, horizon};
    for (double b : supply.breakpoints())
        if (b < horizon) pts.push_back(b);
    for (double b : load.breakpoints())
        if (b < horizon) pts.push_back(b);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    const double tol = energy_tolerance(demand.energy_mwh());
    FeasibilityResult res;
    res.curve.reserve(pts.size());
    double prev_gap = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) {
        const double t = pts[j];
        const CumulativePoint p{t, supply.integral_to(t), load.integral_to(t)};
        res.curve.push_back(p);
        const double gap = p.storage_mwh - p.demand_mwh;
        if (-gap > res.max_deficit_mwh) {
            res.max_deficit_mwh = -gap;
            res.max_deficit_at_h = t;
        }
        if (res.feasible && gap < -tol) {
            res.feasible = false;
            // The gap is linear between breakpoints; find where it crosses zero.
            const double a = j > 0 ? pts[j - 1] : 0.0;
            if (j == 0 || prev_gap <= 0.0) {
                res.first_violation_h = a;
            } else {
                res.first_violation_h = a + prev_gap / (prev_gap - gap) * (t - a);
            }
        }
        prev_gap = gap;
    }
    if (res.feasible) res.max_deficit_mwh = 0.0;
    return res;
}

EfcResult efc_marginal(const Fleet& fleet, const Store& candidate, const ScenarioSet& scenarios,
                       unsigned parallelism) {
    const Fleet extended = fleet.with(candidate);
    const auto base = adequacy_report(fleet, scenarios, 0.0, parallelism);
    const double with_candidate = eeu(extended, scenarios, 0.0, parallelism);

    EfcResult r;
    r.delta_eeu_mwh = base.eeu_mwh - with_candidate;
    r.lole_sne_h = base.lole_sne_h;
    if (!(r.lole_sne_h > 0.0))
        throw Error(ErrorCode::UndefinedMetric,
                    "system never at loss of load; EFC undefined (zero LOLE of nonbinding stores)");
    r.efc_mw = r.delta_eeu_mwh / r.lole_sne_h;
    return r;
}

}  // namespace storedispatch
