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

#include "storedispatch/weighted_scheduler.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "storedispatch/error.hpp"

namespace storedispatch {

namespace {

[[noreturn]] void invalid(const std::string& msg) {
    throw Error(ErrorCode::InvalidArgument, msg);
}

double served_energy(std::span<const double> demand, double dt, double power, double k) {
    double acc = 0.0;
    for (double d : demand) acc += clipped_excess(d, power, k);
    return dt * acc;
}

// Rate of change of -served_energy with respect to k, at k from the right.
double active_slope(std::span<const double> demand, double dt, double power, double k) {
    std::size_t active = 0;
    for (double d : demand)
        if (d - power <= k && k < d) ++active;
    return dt * static_cast<double>(active);
}

double threshold_for(std::span<const double> demand, double dt, double power, double energy) {
    if (power <= 0.0) return 0.0;
    if (served_energy(demand, dt, power, 0.0) <= energy) return 0.0;

    std::vector<double> cand{0.0};
    for (double d : demand) {
        if (d > 0.0) cand.push_back(d);
        if (d - power > 0.0) cand.push_back(d - power);
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

    std::size_t j = 1;
    while (j < cand.size() && served_energy(demand, dt, power, cand[j]) > energy) ++j;
    if (j == cand.size()) return cand.back();  // unreachable: served is 0 at max demand

    const double lo = cand[j - 1];
    const double hi = cand[j];
    const double s_lo = served_energy(demand, dt, power, lo);
    const double s_hi = served_energy(demand, dt, power, hi);
    double k = lo + (s_lo - energy) / (s_lo - s_hi) * (hi - lo);
    k = std::clamp(k, lo, hi);

    // One Newton correction on the active linear piece absorbs rounding.
    const double excess = served_energy(demand, dt, power, k) - energy;
    const double slope = active_slope(demand, dt, power, k);
    if (excess > 0.0 && slope > 0.0) k = std::min(hi, k + excess / slope);
    return k;
}

void check_schedule_against_demand(const DispatchSchedule& schedule, const DemandTrace& demand) {
    if (!(schedule.grid == demand.grid()))
        throw Error(ErrorCode::DimensionMismatch, "schedule and demand grids differ");
    if (schedule.residual_mw.size() != demand.size())
        throw Error(ErrorCode::DimensionMismatch, "schedule residual length differs from demand");
    for (const auto& row : schedule.rates_mw) {
        if (row.size() != demand.size())
            throw Error(ErrorCode::DimensionMismatch, "schedule row length differs from demand");
        for (std::size_t t = 0; t < row.size(); ++t)
            if (!(row[t] >= -rate_tolerance(0.0)))
                invalid("invalid schedule: negative rate at step " + std::to_string(t));
    }
    for (std::size_t t = 0; t < demand.size(); ++t)
        if (schedule.served_mw(t) > demand[t] + rate_tolerance(demand[t]))
            invalid("invalid schedule: serves more than demand at step " + std::to_string(t));
}

}  // namespace

CostFunction CostFunction::linear() {
    return CostFunction{};
}

CostFunction CostFunction::power(double p) {
    if (!std::isfinite(p) || p < 1.0) invalid("power cost exponent must be finite and >= 1");
    CostFunction w;
    w.kind_ = Kind::Power;
    w.exponent_ = p;
    return w;
}

CostFunction CostFunction::piecewise_linear(std::vector<PwlPiece> pieces) {
    if (pieces.empty()) invalid("piecewise-linear cost needs at least one piece");
    if (pieces.front().breakpoint_mw != 0.0) invalid("first piecewise-linear breakpoint must be 0");
    for (std::size_t j = 0; j < pieces.size(); ++j) {
        const auto& pc = pieces[j];
        if (!std::isfinite(pc.breakpoint_mw) || !std::isfinite(pc.slope) || pc.slope < 0.0)
            invalid("piecewise-linear slopes must be finite and nonnegative");
        if (j > 0 && !(pc.breakpoint_mw > pieces[j - 1].breakpoint_mw))
            invalid("piecewise-linear breakpoints must be strictly increasing");
        if (j > 0 && pc.slope < pieces[j - 1].slope)
            invalid("piecewise-linear slopes must be nondecreasing (convexity)");
    }
    CostFunction w;
    w.kind_ = Kind::PiecewiseLinear;
    w.pieces_ = std::move(pieces);
    return w;
}

bool CostFunction::is_linear() const {
    switch (kind_) {
    case Kind::Linear: return true;
    case Kind::Power: return exponent_ == 1.0;
    case Kind::PiecewiseLinear: return pieces_.size() == 1;
    }
    return false;
}

double CostFunction::value(double d) const {
    d = std::max(0.0, d);
    switch (kind_) {
    case Kind::Linear: return d;
    case Kind::Power: return std::pow(d, exponent_);
    case Kind::PiecewiseLinear: {
        double acc = 0.0;
        for (std::size_t j = 0; j < pieces_.size(); ++j) {
            const double lo = pieces_[j].breakpoint_mw;
            if (d <= lo) break;
            const double hi = j + 1 < pieces_.size() ? pieces_[j + 1].breakpoint_mw : d;
            acc += pieces_[j].slope * (std::min(d, hi) - lo);
        }
        return acc;
    }
    }
    return 0.0;
}

double CostFunction::left_derivative(double d) const {
    if (d <= 0.0) return 0.0;
    switch (kind_) {
    case Kind::Linear: return 1.0;
    case Kind::Power: return exponent_ * std::pow(d, exponent_ - 1.0);
    case Kind::PiecewiseLinear: {
        double slope = 0.0;
        for (const auto& pc : pieces_) {
            if (pc.breakpoint_mw < d) slope = pc.slope;
            else break;
        }
        return slope;
    }
    }
    return 0.0;
}

std::string CostFunction::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Linear: os << "linear"; break;
    case Kind::Power: os << "power:" << exponent_; break;
    case Kind::PiecewiseLinear:
        os << "pwl";
        for (const auto& pc : pieces_) os << ' ' << pc.breakpoint_mw << ':' << pc.slope;
        break;
    }
    return os.str();
}

double min_feasible_threshold(const Store& store, const DemandTrace& residual_demand) {
    return threshold_for(residual_demand.values(), residual_demand.grid().step_h, store.power_mw,
                         store.energy_mwh);
}

ThresholdSchedule sequential_threshold_schedule(const Fleet& fleet, const DemandTrace& demand,
                                                const CostFunction& w) {
    const std::size_t m = fleet.size();
    const std::size_t n = demand.size();
    const double dt = demand.grid().step_h;

    std::vector<double> residual(demand.values().begin(), demand.values().end());
    std::vector<std::vector<double>> rates(m, std::vector<double>(n, 0.0));
    ThresholdCertificate cert;
    cert.order.resize(m);
    std::iota(cert.order.begin(), cert.order.end(), std::size_t{0});
    cert.thresholds_mw.assign(m, 0.0);

    for (std::size_t i = 0; i < m; ++i) {
        const auto& st = fleet[i];
        const double k = threshold_for(residual, dt, st.power_mw, st.energy_mwh);
        cert.thresholds_mw[i] = k;
        if (st.inert()) continue;
        for (std::size_t t = 0; t < n; ++t) {
            const double r = clipped_excess(residual[t], st.power_mw, k);
            rates[i][t] = r;
            residual[t] = std::max(0.0, residual[t] - r);
        }
    }

    cert.composite_mw.assign(m, 0.0);
    cert.multipliers.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        double level = cert.thresholds_mw[i];
        for (std::size_t j = i + 1; j < m; ++j)
            level = clipped_remainder(level, fleet[j].power_mw, cert.thresholds_mw[j]);
        cert.composite_mw[i] = level;
        cert.multipliers[i] = w.left_derivative(level);
    }
    cert.final_residual_mw = residual;
    cert.step_multipliers.resize(n);
    for (std::size_t t = 0; t < n; ++t) cert.step_multipliers[t] = w.left_derivative(residual[t]);

    ThresholdSchedule out{make_schedule(demand, std::move(rates)), std::move(cert)};
    for (std::size_t t = 0; t < n; ++t)
        out.schedule.residual_mw[t] = std::max(0.0, out.schedule.residual_mw[t]);
    return out;
}

double weighted_eeu(const DispatchSchedule& schedule, const DemandTrace& demand, const CostFunction& w) {
    check_schedule_against_demand(schedule, demand);
    double acc = 0.0;
    for (std::size_t t = 0; t < demand.size(); ++t)
        acc += w.value(std::max(0.0, demand[t] - schedule.served_mw(t)));
    return demand.grid().step_h * acc;
}

double weighted_eeu(const Fleet& fleet, const DispatchSchedule& schedule, const DemandTrace& demand,
                    const CostFunction& w) {
    const auto violations = validate_schedule(fleet, demand, schedule);
    if (!violations.empty()) invalid("invalid schedule: " + describe(violations.front()));
    return weighted_eeu(schedule, demand, w);
}

}  // namespace storedispatch
