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

#include "storedispatch/lrtf_dispatch.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "storedispatch/error.hpp"

namespace storedispatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Group {
    double residual_h;
    double power_mw;
    std::vector<std::size_t> members;
};

bool same_residual(double a, double b) {
    return std::abs(a - b) <= kResidualTimeTieTolerance * std::max(1.0, std::max(a, b));
}

std::vector<Group> group_by_residual_time(const FleetState& state, const Fleet& fleet) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < fleet.size(); ++i)
        if (state.available(fleet, i)) idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return state.residual_time_h(fleet, a) > state.residual_time_h(fleet, b);
    });

    std::vector<Group> groups;
    for (auto i : idx) {
        const double r = state.residual_time_h(fleet, i);
        if (groups.empty() || !same_residual(groups.back().residual_h, r))
            groups.push_back({r, 0.0, {}});
        groups.back().power_mw += fleet[i].power_mw;
        groups.back().members.push_back(i);
    }
    return groups;
}

// Fraction of full power at which each group runs to deliver target_mw.
std::vector<double> group_fractions(const std::vector<Group>& groups, double target_mw) {
    std::vector<double> frac(groups.size(), 0.0);
    double left = target_mw;
    for (std::size_t g = 0; g < groups.size() && left > 0.0; ++g) {
        if (groups[g].power_mw <= left) {
            frac[g] = 1.0;
            left -= groups[g].power_mw;
        } else {
            frac[g] = left / groups[g].power_mw;
            left = 0.0;
        }
    }
    return frac;
}

struct Allocation {
    std::vector<double> rates_mw;
    /// Time until the allocation pattern changes for reasons other than a store emptying.
    double structural_event_h = kInf;
};

Allocation allocate_lrtf(const FleetState& state, const Fleet& fleet, double target_mw) {
    Allocation a{std::vector<double>(fleet.size(), 0.0), kInf};
    const auto groups = group_by_residual_time(state, fleet);
    const auto frac = group_fractions(groups, target_mw);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (auto i : groups[g].members) a.rates_mw[i] = frac[g] * fleet[i].power_mw;

    // Residual times fall at rate `frac`; a faster group above a slower one catches it up.
    for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
        const double closing = frac[g] - frac[g + 1];
        if (closing > 0.0) {
            const double gap = std::max(0.0, groups[g].residual_h - groups[g + 1].residual_h);
            a.structural_event_h = std::min(a.structural_event_h, gap / closing);
        }
    }
    return a;
}

Allocation allocate_priority(const FleetState& state, const Fleet& fleet,
                             std::span<const std::size_t> order, double target_mw) {
    Allocation a{std::vector<double>(fleet.size(), 0.0), kInf};
    double left = target_mw;
    for (auto i : order) {
        if (left <= 0.0) break;
        if (!state.available(fleet, i)) continue;
        const double r = std::min(fleet[i].power_mw, left);
        a.rates_mw[i] = r;
        left -= r;
    }
    return a;
}

double available_power(const FleetState& state, const Fleet& fleet) {
    double p = 0.0;
    for (std::size_t i = 0; i < fleet.size(); ++i)
        if (state.available(fleet, i)) p += fleet[i].power_mw;
    return p;
}

template <class AllocateFn>
SimulationResult run_greedy(const Fleet& fleet, const DemandTrace& demand, double firm_mw,
                            AllocateFn&& allocate) {
    if (!std::isfinite(firm_mw) || firm_mw < 0.0)
        throw Error(ErrorCode::InvalidArgument, "firm capacity must be finite and nonnegative");

    const std::size_t m = fleet.size();
    const std::size_t n = demand.size();
    const double dt = demand.grid().step_h;

    SimulationResult res;
    res.emptied_at_h.assign(m, kInf);

    FleetState state = FleetState::full(fleet);
    for (std::size_t i = 0; i < m; ++i) {
        if (state.remaining_mwh[i] <= energy_tolerance(fleet[i].energy_mwh)) {
            state.remaining_mwh[i] = 0.0;
            res.emptied_at_h[i] = 0.0;
        }
    }
    res.remaining_mwh.push_back(state.remaining_mwh);

    std::vector<std::vector<double>> rates(m, std::vector<double>(n, 0.0));
    std::vector<double> firm(n, 0.0);
    const std::size_t max_events = 64 + 8 * (m + 1);

    for (std::size_t t = 0; t < n; ++t) {
        const double d = demand[t];
        const double step_start = dt * static_cast<double>(t);
        std::vector<double> used(m, 0.0);
        double firm_used = 0.0;
        double left = dt;

        for (std::size_t iter = 0; left > 0.0; ++iter) {
            const double cap = available_power(state, fleet);
            const double firm_rate = std::min(firm_mw, d);
            const double target = std::min(std::max(0.0, d - firm_rate), cap);
            const bool short_of_power = d > firm_mw + cap + rate_tolerance(firm_mw + cap);

            Allocation a = allocate(state, target);
            double h = left;
            if (iter < max_events) h = std::min(h, a.structural_event_h);
            for (std::size_t i = 0; i < m; ++i)
                if (a.rates_mw[i] > 0.0) h = std::min(h, state.remaining_mwh[i] / a.rates_mw[i]);

            for (std::size_t i = 0; i < m; ++i) {
                const double e = std::min(a.rates_mw[i] * h, state.remaining_mwh[i]);
                state.remaining_mwh[i] -= e;
                used[i] += e;
            }
            firm_used += firm_rate * h;

            left = (h >= left) ? 0.0 : left - h;
            const double clock = step_start + (dt - left);
            for (std::size_t i = 0; i < m; ++i) {
                if (std::isinf(res.emptied_at_h[i]) &&
                    state.remaining_mwh[i] <= energy_tolerance(fleet[i].energy_mwh)) {
                    state.remaining_mwh[i] = 0.0;
                    res.emptied_at_h[i] = clock;
                }
            }
            if (short_of_power) {
                res.loss_of_load = true;
                res.t_prime_h = clock;
            }
        }

        for (std::size_t i = 0; i < m; ++i) {
            rates[i][t] = used[i] / dt;
            res.served_mwh += used[i];
        }
        firm[t] = firm_used / dt;
        res.remaining_mwh.push_back(state.remaining_mwh);
    }

    res.schedule = make_schedule(demand, std::move(rates), std::move(firm));
    for (std::size_t t = 0; t < n; ++t) {
        auto& r = res.schedule.residual_mw[t];
        if (r < 0.0 && r >= -rate_tolerance(demand[t])) r = 0.0;
    }
    res.unserved_mwh = res.schedule.unserved_mwh();

    const double time_tol = 1e-9 * std::max(1.0, demand.grid().horizon_h());
    res.strictly_binding.assign(m, false);
    if (res.loss_of_load)
        for (std::size_t i = 0; i < m; ++i)
            res.strictly_binding[i] = res.emptied_at_h[i] < res.t_prime_h - time_tol;
    return res;
}

}  // namespace

FleetState FleetState::full(const Fleet& fleet) {
    FleetState s;
    s.remaining_mwh.reserve(fleet.size());
    for (const auto& st : fleet.stores()) s.remaining_mwh.push_back(st.energy_mwh);
    return s;
}

double FleetState::residual_time_h(const Fleet& fleet, std::size_t i) const {
    if (fleet[i].inert()) return 0.0;
    return remaining_mwh[i] / fleet[i].power_mw;
}

bool FleetState::available(const Fleet& fleet, std::size_t i) const {
    return !fleet[i].inert() && remaining_mwh[i] > energy_tolerance(fleet[i].energy_mwh);
}

std::vector<double> lrtf_allocate_step(const FleetState& state, const Fleet& fleet, double target_mw) {
    if (state.remaining_mwh.size() != fleet.size())
        throw Error(ErrorCode::DimensionMismatch, "fleet state size differs from fleet size");
    if (!std::isfinite(target_mw) || target_mw < 0.0)
        throw Error(ErrorCode::InvalidArgument, "target rate must be finite and nonnegative");
    const double cap = available_power(state, fleet);
    if (target_mw > cap + rate_tolerance(cap)) {
        const double shortfall = target_mw - cap;
        throw InfeasibleTargetError(shortfall, "target rate exceeds available power by " +
                                                   std::to_string(shortfall) + " MW");
    }
    return allocate_lrtf(state, fleet, std::min(target_mw, cap)).rates_mw;
}

std::vector<std::size_t> SimulationResult::binding_stores() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < strictly_binding.size(); ++i)
        if (strictly_binding[i]) out.push_back(i);
    return out;
}

std::vector<std::size_t> SimulationResult::nonbinding_stores() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < strictly_binding.size(); ++i)
        if (!strictly_binding[i]) out.push_back(i);
    return out;
}

SimulationResult greedy_lrtf_simulate(const Fleet& fleet, const DemandTrace& demand, double firm_mw) {
    return run_greedy(fleet, demand, firm_mw, [&](const FleetState& s, double target) {
        return allocate_lrtf(s, fleet, target);
    });
}

SimulationResult priority_order_simulate(const Fleet& fleet, const DemandTrace& demand,
                                         std::span<const std::size_t> order) {
    // Validates that order is a permutation.
    (void)fleet.permuted(order);
    return run_greedy(fleet, demand, 0.0, [&](const FleetState& s, double target) {
        return allocate_priority(s, fleet, order, target);
    });
}

double lole_of_set(const Fleet& subset, const DemandTrace& demand) {
    const double p = subset.total_power_mw();
    const double tol = rate_tolerance(p);
    std::size_t count = 0;
    for (double d : demand.values())
        if (d > p + tol) ++count;
    return demand.grid().step_h * static_cast<double>(count);
}

}  // namespace storedispatch
