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

#include "storedispatch/stochastic_policies.hpp"

#include <cmath>

#include "parallel.hpp"
#include "storedispatch/error.hpp"
#include "storedispatch/lrtf_dispatch.hpp"

namespace storedispatch {

namespace {

Fleet with_remaining(const Fleet& fleet, std::span<const double> remaining) {
    std::vector<Store> stores(fleet.stores().begin(), fleet.stores().end());
    for (std::size_t i = 0; i < stores.size(); ++i) stores[i].energy_mwh = std::max(0.0, remaining[i]);
    return Fleet(std::move(stores));
}

std::vector<double> column(const DispatchSchedule& s, std::size_t step) {
    std::vector<double> col(s.n_stores());
    for (std::size_t i = 0; i < col.size(); ++i) col[i] = s.rates_mw[i][step];
    return col;
}

bool matches_past(const DemandTrace& trace, std::span<const double> realized) {
    for (std::size_t u = 0; u < realized.size(); ++u) {
        const double tol = 1e-12 * std::max(1.0, std::abs(realized[u]));
        if (std::abs(trace[u] - realized[u]) > tol) return false;
    }
    return true;
}

// Greedy LRTF is causal, so a one-step simulation gives its first-step rates.
std::vector<double> greedy_first_step(const Fleet& fleet, double dt, double demand_mw) {
    const DemandTrace one(TimeGrid{dt, 1}, {demand_mw});
    return column(greedy_lrtf_simulate(fleet, one).schedule, 0);
}

void require_example2_domain(double p) {
    if (!std::isfinite(p) || p < 1.0) throw Error(ErrorCode::InvalidArgument, "exponent p must be >= 1");
}

}  // namespace

Forecaster perfect_forecaster(DemandTrace truth) {
    return [truth = std::move(truth)](const ForecastContext& ctx) {
        auto v = truth.values().subspan(ctx.step);
        return std::vector<double>(v.begin(), v.end());
    };
}

Forecaster expected_value_forecaster(ScenarioSet model) {
    return [model = std::move(model)](const ForecastContext& ctx) {
        const std::size_t n = model.grid().n_steps;
        if (ctx.grid.n_steps != n)
            throw Error(ErrorCode::DimensionMismatch, "forecast model and realised trace differ in length");
        std::vector<double> out(n - ctx.step, 0.0);

        double weight = 0.0;
        for (std::size_t s = 0; s < model.size(); ++s)
            if (matches_past(model.trace(s), ctx.realized_mw)) weight += model.probability(s);
        const bool any = weight > 0.0;
        if (!any) weight = 1.0;

        for (std::size_t s = 0; s < model.size(); ++s) {
            if (any && !matches_past(model.trace(s), ctx.realized_mw)) continue;
            const double p = model.probability(s) / weight;
            for (std::size_t u = ctx.step; u < n; ++u) out[u - ctx.step] += p * model.trace(s)[u];
        }
        out[0] = ctx.realized_mw[ctx.step];
        return out;
    };
}

Forecaster persistence_forecaster() {
    return [](const ForecastContext& ctx) {
        return std::vector<double>(ctx.grid.n_steps - ctx.step, ctx.realized_mw[ctx.step]);
    };
}

PolicyTrace rolling_intrinsic(const Fleet& fleet, const ScenarioSet& scenarios, const Forecaster& forecaster,
                              const CostFunction& w, unsigned parallelism) {
    const TimeGrid grid = scenarios.grid();
    const std::size_t n = grid.n_steps;
    const std::size_t m = fleet.size();

    PolicyTrace out;
    out.schedules.resize(scenarios.size());
    out.weighted_eeu.resize(scenarios.size());

    detail::parallel_for(scenarios.size(), parallelism, [&](std::size_t s) {
        const DemandTrace& trace = scenarios.trace(s);
        std::vector<double> remaining(m);
        for (std::size_t i = 0; i < m; ++i) remaining[i] = fleet[i].energy_mwh;
        std::vector<std::vector<double>> rates(m, std::vector<double>(n, 0.0));

        for (std::size_t t = 0; t < n; ++t) {
            const ForecastContext ctx{trace.values().first(t + 1), t, grid};
            auto forecast = forecaster(ctx);
            if (forecast.size() != n - t)
                throw Error(ErrorCode::DimensionMismatch, "forecaster returned " +
                                                              std::to_string(forecast.size()) +
                                                              " values, expected " + std::to_string(n - t));
            forecast[0] = trace[t];
            for (auto& v : forecast) v = std::max(0.0, v);

            const Fleet current = with_remaining(fleet, remaining);
            std::vector<double> commit;
            if (w.is_linear()) {
                commit = greedy_first_step(current, grid.step_h, forecast[0]);
            } else {
                const DemandTrace ahead(TimeGrid{grid.step_h, n - t}, std::move(forecast));
                commit = column(sequential_threshold_schedule(current, ahead, w).schedule, 0);
            }
            for (std::size_t i = 0; i < m; ++i) {
                rates[i][t] = commit[i];
                remaining[i] = std::max(0.0, remaining[i] - commit[i] * grid.step_h);
            }
        }

        auto sched = make_schedule(trace, std::move(rates));
        for (auto& r : sched.residual_mw) r = std::max(0.0, r);
        out.weighted_eeu[s] = weighted_eeu(sched, trace, w);
        out.schedules[s] = std::move(sched);
    });

    for (std::size_t s = 0; s < scenarios.size(); ++s)
        out.expected_weighted_eeu += scenarios.probability(s) * out.weighted_eeu[s];
    return out;
}

FirstStepSearch first_step_search(const Fleet& fleet, const ScenarioSet& scenarios, const CostFunction& w) {
    const TimeGrid grid = scenarios.grid();
    const double dt = grid.step_h;
    const double d0 = scenarios.trace(0)[0];
    for (std::size_t s = 1; s < scenarios.size(); ++s)
        if (std::abs(scenarios.trace(s)[0] - d0) > 1e-12 * std::max(1.0, d0))
            throw Error(ErrorCode::InvalidArgument, "scenarios disagree on first-step demand");

    auto first = [&](double x) { return greedy_first_step(fleet, dt, x); };
    auto served = [](const std::vector<double>& r) {
        double acc = 0.0;
        for (double v : r) acc += v;
        return acc;
    };

    auto expected_cost = [&](double x) {
        const auto r0 = first(x);
        const double s0 = served(r0);
        double cost = dt * w.value(std::max(0.0, d0 - s0));
        if (grid.n_steps > 1) {
            std::vector<double> remaining(fleet.size());
            for (std::size_t i = 0; i < fleet.size(); ++i)
                remaining[i] = std::max(0.0, fleet[i].energy_mwh - r0[i] * dt);
            const Fleet rest = with_remaining(fleet, remaining);
            const TimeGrid tail_grid{dt, grid.n_steps - 1};
            for (std::size_t s = 0; s < scenarios.size(); ++s) {
                auto v = scenarios.trace(s).values().subspan(1);
                const DemandTrace tail(tail_grid, std::vector<double>(v.begin(), v.end()));
                const auto plan = sequential_threshold_schedule(rest, tail, w);
                cost += scenarios.probability(s) * weighted_eeu(plan.schedule, tail, w);
            }
        }
        return cost;
    };

    const double x_max = served(first(d0));
    // Golden-section search; the expected cost is convex in x for a single store.
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0;
    double hi = x_max;
    double a = hi - phi * (hi - lo);
    double b = lo + phi * (hi - lo);
    double fa = expected_cost(a);
    double fb = expected_cost(b);
    while (hi - lo > 1e-10 * std::max(1.0, x_max)) {
        if (fa <= fb) {
            hi = b;
            b = a;
            fb = fa;
            a = hi - phi * (hi - lo);
            fa = expected_cost(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + phi * (hi - lo);
            fb = expected_cost(b);
        }
    }

    FirstStepSearch best{0.5 * (lo + hi), expected_cost(0.5 * (lo + hi))};
    for (double x : {0.0, x_max}) {
        const double c = expected_cost(x);
        if (c < best.expected_cost) best = {x, c};
    }
    best.rate_mw = served(first(best.rate_mw));
    return best;
}

double example2_objective(double p, double x) {
    require_example2_domain(p);
    if (!std::isfinite(x) || x < 0.0 || x > 2.0)
        throw Error(ErrorCode::InvalidArgument, "first-period rate x must lie in [0, 2]");
    return std::pow(2.0 - x, p) + std::pow(x + 2.0, p + 1.0) / (4.0 * (p + 1.0));
}

double example2_optimal_rate(double p) {
    require_example2_domain(p);
    // Derivative of the objective; strictly increasing in x for p > 1.
    auto slope = [p](double x) { return -p * std::pow(2.0 - x, p - 1.0) + std::pow(x + 2.0, p) / 4.0; };
    if (slope(2.0) <= 0.0) return 2.0;
    if (slope(0.0) >= 0.0) return 0.0;
    double lo = 0.0;
    double hi = 2.0;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace storedispatch
