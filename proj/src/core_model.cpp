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

#include "storedispatch/core_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "storedispatch/error.hpp"

namespace storedispatch {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg);
}

[[noreturn]] void mismatch(const std::string& msg) {
    throw Error(ErrorCode::DimensionMismatch, msg);
}

}  // namespace

Store make_store(std::string id, double power_mw, double energy_mwh) {
    if (id.empty()) invalid("store id must not be empty");
    if (!std::isfinite(power_mw) || power_mw < 0.0)
        invalid("store '" + id + "': power must be finite and nonnegative");
    if (!std::isfinite(energy_mwh) || energy_mwh < 0.0)
        invalid("store '" + id + "': energy must be finite and nonnegative");
    return Store{std::move(id), power_mw, energy_mwh};
}

Fleet::Fleet(std::vector<Store> stores) : stores_(std::move(stores)) {
    std::unordered_set<std::string> seen;
    for (auto& s : stores_) {
        s = make_store(s.id, s.power_mw, s.energy_mwh);
        if (!seen.insert(s.id).second) invalid("duplicate store id '" + s.id + "'");
    }
}

double Fleet::total_power_mw() const {
    return std::accumulate(stores_.begin(), stores_.end(), 0.0,
                           [](double acc, const Store& s) { return acc + s.power_mw; });
}

double Fleet::total_energy_mwh() const {
    return std::accumulate(stores_.begin(), stores_.end(), 0.0,
                           [](double acc, const Store& s) { return acc + s.energy_mwh; });
}

std::optional<std::size_t> Fleet::index_of(const std::string& id) const {
    for (std::size_t i = 0; i < stores_.size(); ++i)
        if (stores_[i].id == id) return i;
    return std::nullopt;
}

Fleet Fleet::with(Store extra) const {
    auto copy = stores_;
    copy.push_back(std::move(extra));
    return Fleet(std::move(copy));
}

Fleet Fleet::subset(std::span<const std::size_t> indices) const {
    std::vector<Store> out;
    out.reserve(indices.size());
    for (auto i : indices) {
        if (i >= stores_.size()) mismatch("store index out of range");
        out.push_back(stores_[i]);
    }
    return Fleet(std::move(out));
}

Fleet Fleet::permuted(std::span<const std::size_t> order) const {
    if (order.size() != stores_.size()) mismatch("permutation length differs from fleet size");
    std::vector<bool> used(stores_.size(), false);
    for (auto i : order) {
        if (i >= stores_.size() || used[i]) invalid("order is not a permutation");
        used[i] = true;
    }
    return subset(order);
}

TimeGrid make_grid(double step_h, std::size_t n_steps) {
    if (!std::isfinite(step_h) || step_h <= 0.0) invalid("grid step must be positive and finite");
    if (n_steps == 0) invalid("grid must have at least one step");
    return TimeGrid{step_h, n_steps};
}

DemandTrace::DemandTrace(TimeGrid grid, std::vector<double> values_mw)
    : grid_(make_grid(grid.step_h, grid.n_steps)), values_(std::move(values_mw)) {
    if (values_.size() != grid_.n_steps)
        mismatch("demand has " + std::to_string(values_.size()) + " values but grid has " +
                 std::to_string(grid_.n_steps) + " steps");
    for (std::size_t t = 0; t < values_.size(); ++t)
        if (!std::isfinite(values_[t]) || values_[t] < 0.0)
            invalid("demand at step " + std::to_string(t) + " must be finite and nonnegative");
}

double DemandTrace::energy_mwh() const {
    return grid_.step_h * std::accumulate(values_.begin(), values_.end(), 0.0);
}

double DemandTrace::peak_mw() const {
    return *std::max_element(values_.begin(), values_.end());
}

ScenarioSet::ScenarioSet(std::vector<DemandTrace> traces, std::vector<double> probabilities)
    : traces_(std::move(traces)), probabilities_(std::move(probabilities)) {
    if (traces_.empty()) invalid("scenario set must contain at least one trace");
    if (traces_.size() != probabilities_.size())
        mismatch("scenario count differs from probability count");
    double total = 0.0;
    for (std::size_t s = 0; s < traces_.size(); ++s) {
        if (!(traces_[s].grid() == traces_.front().grid()))
            mismatch("scenario " + std::to_string(s) + " is on a different time grid");
        if (!std::isfinite(probabilities_[s]) || probabilities_[s] < 0.0)
            invalid("scenario probabilities must be nonnegative");
        total += probabilities_[s];
    }
    if (std::abs(total - 1.0) > 1e-9) invalid("scenario probabilities must sum to 1");
}

ScenarioSet ScenarioSet::single(DemandTrace trace) {
    std::vector<DemandTrace> traces;
    traces.push_back(std::move(trace));
    return ScenarioSet(std::move(traces), {1.0});
}

ScenarioSet ScenarioSet::uniform(std::vector<DemandTrace> traces) {
    if (traces.empty()) invalid("scenario set must contain at least one trace");
    std::vector<double> p(traces.size(), 1.0 / static_cast<double>(traces.size()));
    return ScenarioSet(std::move(traces), std::move(p));
}

double DispatchSchedule::served_mw(std::size_t step) const {
    double total = firm_mw.empty() ? 0.0 : firm_mw[step];
    for (const auto& row : rates_mw) total += row[step];
    return total;
}

double DispatchSchedule::store_energy_mwh(std::size_t store) const {
    const auto& row = rates_mw[store];
    return grid.step_h * std::accumulate(row.begin(), row.end(), 0.0);
}

double DispatchSchedule::unserved_mwh() const {
    return grid.step_h * std::accumulate(residual_mw.begin(), residual_mw.end(), 0.0);
}

DispatchSchedule make_schedule(const DemandTrace& demand, std::vector<std::vector<double>> rates_mw,
                               std::vector<double> firm_mw) {
    const auto n = demand.size();
    for (const auto& row : rates_mw)
        if (row.size() != n) mismatch("schedule row length differs from demand length");
    if (firm_mw.empty()) firm_mw.assign(n, 0.0);
    if (firm_mw.size() != n) mismatch("firm column length differs from demand length");

    DispatchSchedule s{demand.grid(), std::move(rates_mw), std::move(firm_mw), {}};
    s.residual_mw.resize(n);
    for (std::size_t t = 0; t < n; ++t) s.residual_mw[t] = demand[t] - s.served_mw(t);
    return s;
}

std::string describe(const Violation& v) {
    std::ostringstream os;
    switch (v.kind) {
    case ConstraintKind::RateBound: os << "rate bound"; break;
    case ConstraintKind::EnergyBound: os << "energy bound"; break;
    case ConstraintKind::DemandBound: os << "demand bound"; break;
    }
    if (v.store) os << " store=" << *v.store;
    if (v.step) os << " step=" << *v.step;
    os << " excess=" << v.excess;
    return os.str();
}

std::vector<Violation> validate_schedule(const Fleet& fleet, const DemandTrace& demand,
                                         const DispatchSchedule& schedule) {
    const auto n = demand.size();
    if (schedule.n_stores() != fleet.size())
        mismatch("schedule has " + std::to_string(schedule.n_stores()) + " store rows but fleet has " +
                 std::to_string(fleet.size()) + " stores");
    if (!(schedule.grid == demand.grid())) mismatch("schedule and demand grids differ");
    for (const auto& row : schedule.rates_mw)
        if (row.size() != n) mismatch("schedule row length differs from demand length");
    if (!schedule.firm_mw.empty() && schedule.firm_mw.size() != n)
        mismatch("firm column length differs from demand length");

    std::vector<Violation> out;
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        const auto& st = fleet[i];
        const double rtol = rate_tolerance(st.power_mw);
        for (std::size_t t = 0; t < n; ++t) {
            const double r = schedule.rates_mw[i][t];
            if (!std::isfinite(r) || r < -rtol)
                out.push_back({ConstraintKind::RateBound, i, t, -r});
            else if (r > st.power_mw + rtol)
                out.push_back({ConstraintKind::RateBound, i, t, r - st.power_mw});
        }
        const double used = schedule.store_energy_mwh(i);
        if (used > st.energy_mwh + energy_tolerance(st.energy_mwh))
            out.push_back({ConstraintKind::EnergyBound, i, std::nullopt, used - st.energy_mwh});
    }
    for (std::size_t t = 0; t < n; ++t) {
        const double served = schedule.served_mw(t);
        if (served > demand[t] + rate_tolerance(demand[t]))
            out.push_back({ConstraintKind::DemandBound, std::nullopt, t, served - demand[t]});
    }
    return out;
}

Profile::Profile(std::vector<ProfileSegment> segments) : segments_(std::move(segments)) {
    for (std::size_t j = 0; j < segments_.size(); ++j) {
        const auto& s = segments_[j];
        if (!(s.duration_h > 0.0) || !std::isfinite(s.duration_h))
            invalid("profile segment durations must be positive and finite");
        if (!(s.level_mw >= 0.0) || !std::isfinite(s.level_mw))
            invalid("profile levels must be nonnegative and finite");
        if (j > 0 && s.level_mw > segments_[j - 1].level_mw)
            invalid("profile levels must be nonincreasing");
    }
}

double Profile::total_duration_h() const {
    double t = 0.0;
    for (const auto& s : segments_) t += s.duration_h;
    return t;
}

double Profile::level_at(double t_h) const {
    if (segments_.empty()) return 0.0;
    if (t_h <= 0.0) return segments_.front().level_mw;
    double end = 0.0;
    for (const auto& s : segments_) {
        end += s.duration_h;
        if (t_h <= end) return s.level_mw;
    }
    return 0.0;
}

double Profile::integral_to(double t_h) const {
    double acc = 0.0;
    double start = 0.0;
    for (const auto& s : segments_) {
        if (t_h <= start) break;
        const double span = std::min(s.duration_h, t_h - start);
        acc += span * s.level_mw;
        start += s.duration_h;
    }
    return acc;
}

std::vector<double> Profile::breakpoints() const {
    std::vector<double> out;
    out.reserve(segments_.size());
    double end = 0.0;
    for (const auto& s : segments_) {
        end += s.duration_h;
        out.push_back(end);
    }
    return out;
}

Profile storage_profile(const Fleet& fleet) {
    std::vector<const Store*> active;
    for (const auto& s : fleet.stores())
        if (!s.inert() && s.energy_mwh > 0.0) active.push_back(&s);
    std::sort(active.begin(), active.end(),
              [](const Store* a, const Store* b) { return a->duration_h() < b->duration_h(); });

    double level = 0.0;
    for (const auto* s : active) level += s->power_mw;

    std::vector<ProfileSegment> segs;
    double start = 0.0;
    for (std::size_t j = 0; j < active.size();) {
        const double end = active[j]->duration_h();
        if (end > start) {
            segs.push_back({end - start, level});
            start = end;
        }
        // Drop every store whose duration ends here.
        while (j < active.size() && active[j]->duration_h() == end) {
            level -= active[j]->power_mw;
            ++j;
        }
        if (level < 0.0) level = 0.0;
    }
    return Profile(std::move(segs));
}

Profile demand_profile(const DemandTrace& demand) {
    std::vector<double> sorted(demand.values().begin(), demand.values().end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double dt = demand.grid().step_h;

    std::vector<ProfileSegment> segs;
    for (std::size_t j = 0; j < sorted.size();) {
        std::size_t k = j;
        while (k < sorted.size() && sorted[k] == sorted[j]) ++k;
        segs.push_back({dt * static_cast<double>(k - j), sorted[j]});
        j = k;
    }
    return Profile(std::move(segs));
}

}  // namespace storedispatch
