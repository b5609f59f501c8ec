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

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace storedispatch {

// Units are fixed throughout: MW for rates, MWh for energy, hours for time.

inline double energy_tolerance(double energy_mwh) {
    return 1e-9 * std::max(1.0, energy_mwh);
}

inline double rate_tolerance(double power_mw) {
    return 1e-9 * std::max(1.0, power_mw);
}

/**
 * A non-recharging energy store with a power limit and an energy limit.
 *
 * A store with zero power is inert and is never dispatched.
 */
struct Store {
    std::string id;
    double power_mw = 0.0;
    double energy_mwh = 0.0;

    bool inert() const { return power_mw <= 0.0; }

    /// Hours the store can sustain full power; zero for inert stores.
    double duration_h() const { return inert() ? 0.0 : energy_mwh / power_mw; }
};

/// Validating constructor for Store.
Store make_store(std::string id, double power_mw, double energy_mwh);

/// Ordered collection of stores with unique ids.
class Fleet {
public:
    Fleet() = default;
    explicit Fleet(std::vector<Store> stores);

    std::span<const Store> stores() const { return stores_; }
    std::size_t size() const { return stores_.size(); }
    bool empty() const { return stores_.empty(); }
    const Store& operator[](std::size_t i) const { return stores_[i]; }

    double total_power_mw() const;
    double total_energy_mwh() const;
    std::optional<std::size_t> index_of(const std::string& id) const;

    Fleet with(Store extra) const;
    Fleet subset(std::span<const std::size_t> indices) const;
    /// Same stores, in the given order (a permutation of 0..size-1).
    Fleet permuted(std::span<const std::size_t> order) const;

private:
    std::vector<Store> stores_;
};

struct TimeGrid {
    double step_h = 1.0;
    std::size_t n_steps = 1;

    double horizon_h() const { return step_h * static_cast<double>(n_steps); }
    bool operator==(const TimeGrid&) const = default;
};

TimeGrid make_grid(double step_h, std::size_t n_steps);

/// Nonnegative demand, constant within each step of a uniform grid.
class DemandTrace {
public:
    DemandTrace(TimeGrid grid, std::vector<double> values_mw);

    const TimeGrid& grid() const { return grid_; }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t step) const { return values_[step]; }
    std::size_t size() const { return values_.size(); }

    double energy_mwh() const;
    double peak_mw() const;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Finite set of demand scenarios on a shared grid.
class ScenarioSet {
public:
    ScenarioSet(std::vector<DemandTrace> traces, std::vector<double> probabilities);

    static ScenarioSet single(DemandTrace trace);
    static ScenarioSet uniform(std::vector<DemandTrace> traces);

    std::size_t size() const { return traces_.size(); }
    const DemandTrace& trace(std::size_t i) const { return traces_[i]; }
    double probability(std::size_t i) const { return probabilities_[i]; }
    std::span<const double> probabilities() const { return probabilities_; }
    const TimeGrid& grid() const { return traces_.front().grid(); }

private:
    std::vector<DemandTrace> traces_;
    std::vector<double> probabilities_;
};

/**
 * Per-store discharge rates on a grid, plus firm-capacity output and the
 * resulting residual (unserved) demand per step.
 */
struct DispatchSchedule {
    TimeGrid grid;
    std::vector<std::vector<double>> rates_mw;  // [store][step]
    std::vector<double> firm_mw;                // [step]
    std::vector<double> residual_mw;            // [step]

    std::size_t n_stores() const { return rates_mw.size(); }
    double served_mw(std::size_t step) const;
    double store_energy_mwh(std::size_t store) const;
    double unserved_mwh() const;
};

/// Builds a schedule and derives its residual from the demand.
DispatchSchedule make_schedule(const DemandTrace& demand,
                               std::vector<std::vector<double>> rates_mw,
                               std::vector<double> firm_mw = {});

enum class ConstraintKind {
    RateBound,    // 0 <= r_i(t) <= P_i
    EnergyBound,  // step * sum_t r_i(t) <= E_i
    DemandBound,  // sum_i r_i(t) <= d(t)
};

struct Violation {
    ConstraintKind kind;
    std::optional<std::size_t> store;
    std::optional<std::size_t> step;
    double excess = 0.0;
};

std::string describe(const Violation& v);

/// Lists every violated rate, energy and demand constraint; empty means valid.
std::vector<Violation> validate_schedule(const Fleet& fleet, const DemandTrace& demand,
                                         const DispatchSchedule& schedule);

struct ProfileSegment {
    double duration_h;
    double level_mw;
};

/**
 * Nonincreasing step function of elapsed time, stored as consecutive
 * segments. Zero beyond the last segment.
 */
class Profile {
public:
    Profile() = default;
    explicit Profile(std::vector<ProfileSegment> segments);

    std::span<const ProfileSegment> segments() const { return segments_; }
    double total_duration_h() const;

    /// Level on the segment whose closed right end covers t.
    double level_at(double t_h) const;
    /// Integral of the profile over [0, t].
    double integral_to(double t_h) const;
    /// Segment end times, ascending.
    std::vector<double> breakpoints() const;

private:
    std::vector<ProfileSegment> segments_;
};

/// Power available at elapsed time t when every store discharges flat out from t = 0.
Profile storage_profile(const Fleet& fleet);

/// Load duration curve: the demand sorted into nonincreasing order.
Profile demand_profile(const DemandTrace& demand);

}  // namespace storedispatch
