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

#include "storedispatch/storedispatch.h"

#include <fstream>
#include <limits>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "storedispatch/adequacy_metrics.hpp"
#include "storedispatch/error.hpp"
#include "storedispatch/io.hpp"
#include "storedispatch/lrtf_dispatch.hpp"
#include "storedispatch/stochastic_policies.hpp"
#include "storedispatch/weighted_scheduler.hpp"

using namespace storedispatch;

struct sd_fleet {
    Fleet fleet;
};

struct sd_scenarios {
    ScenarioSet set;
};

struct sd_cost {
    CostFunction cost;
};

struct sd_dispatch {
    Fleet fleet;
    SimulationResult result;
    double lole_sne_h;
    double firm_mwh;
};

struct sd_weighted {
    Fleet fleet;
    ThresholdSchedule plan;
    double objective;
};

struct sd_policy {
    ScenarioSet set;
    PolicyTrace trace;
};

struct sd_schedule {
    std::vector<std::string> violations;
};

namespace {

thread_local std::string last_error;

sd_status to_status(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return SD_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return SD_ERR_DIMENSION;
    case ErrorCode::Parse: return SD_ERR_PARSE;
    case ErrorCode::Io: return SD_ERR_IO;
    case ErrorCode::InfeasibleTarget: return SD_ERR_INFEASIBLE_TARGET;
    case ErrorCode::UndefinedMetric: return SD_ERR_UNDEFINED_METRIC;
    }
    return SD_ERR_INTERNAL;
}

sd_status fail(sd_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

template <class Fn>
sd_status guarded(Fn&& fn) {
    try {
        fn();
        return SD_OK;
    } catch (const Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(SD_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(SD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SD_ERR_INTERNAL, "unknown error");
    }
}

void require(bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

const DemandTrace& pick(const sd_scenarios* set, std::size_t scenario) {
    require(set != nullptr, "scenario set is null");
    if (scenario >= set->set.size())
        throw Error(ErrorCode::InvalidArgument, "scenario index " + std::to_string(scenario) + " out of range");
    return set->set.trace(scenario);
}

void copy_out(const std::vector<double>& src, double* out, std::size_t n) {
    require(out != nullptr, "output buffer is null");
    if (n < src.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "output buffer holds " + std::to_string(n) + " values, need " + std::to_string(src.size()));
    std::copy(src.begin(), src.end(), out);
}

void write_file(const char* path, auto&& writer) {
    require(path != nullptr, "path is null");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, std::string("cannot write '") + path + "'");
    writer(out);
    if (!out) throw Error(ErrorCode::Io, std::string("error writing '") + path + "'");
}

std::optional<std::size_t> expected(std::size_t n) {
    return n == 0 ? std::nullopt : std::optional<std::size_t>(n);
}

}  // namespace

extern "C" {

const char* sd_last_error(void) {
    return last_error.c_str();
}

const char* sd_version(void) {
    return "1.0.0";
}

sd_status sd_fleet_new(sd_fleet** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = new sd_fleet{};
    });
}

sd_status sd_fleet_add_store(sd_fleet* fleet, const char* id, double power_mw, double energy_mwh) {
    return guarded([&] {
        require(fleet != nullptr && id != nullptr, "fleet or id is null");
        fleet->fleet = fleet->fleet.with(make_store(id, power_mw, energy_mwh));
    });
}

sd_status sd_fleet_load(const char* path, sd_fleet** out, sd_grid* grid, int* has_step, int* has_n_steps) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path or out is null");
        auto cfg = io::read_fleet_config(path);
        if (grid) {
            grid->step_hours = cfg.step_h.value_or(0.0);
            grid->n_steps = cfg.n_steps.value_or(0);
        }
        if (has_step) *has_step = cfg.step_h.has_value();
        if (has_n_steps) *has_n_steps = cfg.n_steps.has_value();
        *out = new sd_fleet{std::move(cfg.fleet)};
    });
}

size_t sd_fleet_size(const sd_fleet* fleet) {
    return fleet ? fleet->fleet.size() : 0;
}

const char* sd_fleet_store_id(const sd_fleet* fleet, size_t index) {
    if (!fleet || index >= fleet->fleet.size()) return nullptr;
    return fleet->fleet[index].id.c_str();
}

sd_status sd_fleet_store(const sd_fleet* fleet, size_t index, double* power_mw, double* energy_mwh) {
    return guarded([&] {
        require(fleet != nullptr && index < fleet->fleet.size(), "store index out of range");
        if (power_mw) *power_mw = fleet->fleet[index].power_mw;
        if (energy_mwh) *energy_mwh = fleet->fleet[index].energy_mwh;
    });
}

void sd_fleet_free(sd_fleet* fleet) {
    delete fleet;
}

sd_status sd_scenarios_from_values(sd_grid grid, const double* values, size_t n_scenarios,
                                   const double* probabilities, sd_scenarios** out) {
    return guarded([&] {
        require(values != nullptr && out != nullptr, "values or out is null");
        const TimeGrid g = make_grid(grid.step_hours, grid.n_steps);
        std::vector<DemandTrace> traces;
        for (std::size_t s = 0; s < n_scenarios; ++s) {
            const double* row = values + s * g.n_steps;
            traces.emplace_back(g, std::vector<double>(row, row + g.n_steps));
        }
        if (probabilities) {
            std::vector<double> p(probabilities, probabilities + n_scenarios);
            *out = new sd_scenarios{ScenarioSet(std::move(traces), std::move(p))};
        } else {
            *out = new sd_scenarios{ScenarioSet::uniform(std::move(traces))};
        }
    });
}

sd_status sd_demand_load(const char* path, double step_hours, size_t expected_steps, sd_scenarios** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path or out is null");
        *out = new sd_scenarios{ScenarioSet::single(io::read_demand_csv(path, step_hours, expected(expected_steps)))};
    });
}

sd_status sd_scenarios_load(const char* path, double step_hours, size_t expected_steps, int force_uniform,
                            sd_scenarios** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "path or out is null");
        *out = new sd_scenarios{
            io::read_scenarios_csv(path, step_hours, expected(expected_steps), force_uniform != 0)};
    });
}

size_t sd_scenarios_count(const sd_scenarios* set) {
    return set ? set->set.size() : 0;
}

sd_grid sd_scenarios_grid(const sd_scenarios* set) {
    if (!set) return sd_grid{0.0, 0};
    return sd_grid{set->set.grid().step_h, set->set.grid().n_steps};
}

double sd_scenarios_probability(const sd_scenarios* set, size_t scenario) {
    if (!set || scenario >= set->set.size()) return std::numeric_limits<double>::quiet_NaN();
    return set->set.probability(scenario);
}

sd_status sd_scenarios_values(const sd_scenarios* set, size_t scenario, double* out, size_t n) {
    return guarded([&] {
        const auto v = pick(set, scenario).values();
        copy_out(std::vector<double>(v.begin(), v.end()), out, n);
    });
}

void sd_scenarios_free(sd_scenarios* set) {
    delete set;
}

sd_status sd_cost_parse(const char* spec, sd_cost** out) {
    return guarded([&] {
        require(spec != nullptr && out != nullptr, "spec or out is null");
        *out = new sd_cost{io::parse_cost_spec(spec)};
    });
}

sd_status sd_cost_eval(const sd_cost* cost, double residual_mw, double* value) {
    return guarded([&] {
        require(cost != nullptr && value != nullptr, "cost or value is null");
        *value = cost->cost.value(residual_mw);
    });
}

int sd_cost_is_linear(const sd_cost* cost) {
    return cost && cost->cost.is_linear() ? 1 : 0;
}

void sd_cost_free(sd_cost* cost) {
    delete cost;
}

sd_status sd_feasibility_check(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario,
                               sd_feasibility* out) {
    return guarded([&] {
        require(fleet != nullptr && out != nullptr, "fleet or out is null");
        const auto r = feasible_by_profile(fleet->fleet, pick(set, scenario));
        *out = sd_feasibility{r.feasible ? 1 : 0, r.first_violation_h, r.max_deficit_mwh, r.max_deficit_at_h};
    });
}

sd_status sd_feasibility_write_csv(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario,
                                   const char* path) {
    return guarded([&] {
        require(fleet != nullptr, "fleet is null");
        const auto r = feasible_by_profile(fleet->fleet, pick(set, scenario));
        write_file(path, [&](std::ostream& os) { io::write_cumulative_csv(os, r); });
    });
}

sd_status sd_dispatch_run(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario, double firm_mw,
                          sd_dispatch** out) {
    return guarded([&] {
        require(fleet != nullptr && out != nullptr, "fleet or out is null");
        const auto& trace = pick(set, scenario);
        auto res = greedy_lrtf_simulate(fleet->fleet, trace, firm_mw);
        const double lole = lole_of_set(fleet->fleet.subset(res.nonbinding_stores()), trace);
        double firm_mwh = 0.0;
        for (double f : res.schedule.firm_mw) firm_mwh += f * trace.grid().step_h;
        *out = new sd_dispatch{fleet->fleet, std::move(res), lole, firm_mwh};
    });
}

sd_status sd_dispatch_summary_get(const sd_dispatch* run, sd_dispatch_summary* out) {
    return guarded([&] {
        require(run != nullptr && out != nullptr, "run or out is null");
        const auto& r = run->result;
        *out = sd_dispatch_summary{r.unserved_mwh, r.served_mwh,       run->firm_mwh,
                                   r.t_prime_h,    r.loss_of_load ? 1 : 0, run->lole_sne_h};
    });
}

int sd_dispatch_store_binding(const sd_dispatch* run, size_t store) {
    if (!run || store >= run->result.strictly_binding.size()) return -1;
    return run->result.strictly_binding[store] ? 1 : 0;
}

double sd_dispatch_emptied_at(const sd_dispatch* run, size_t store) {
    if (!run || store >= run->result.emptied_at_h.size()) return std::numeric_limits<double>::quiet_NaN();
    return run->result.emptied_at_h[store];
}

sd_status sd_dispatch_rates(const sd_dispatch* run, size_t store, double* out, size_t n) {
    return guarded([&] {
        require(run != nullptr && store < run->result.schedule.n_stores(), "store index out of range");
        copy_out(run->result.schedule.rates_mw[store], out, n);
    });
}

sd_status sd_dispatch_residual(const sd_dispatch* run, double* out, size_t n) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        copy_out(run->result.schedule.residual_mw, out, n);
    });
}

sd_status sd_dispatch_write_schedule(const sd_dispatch* run, const char* path) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        write_file(path, [&](std::ostream& os) { io::write_schedule_csv(os, run->fleet, run->result.schedule); });
    });
}

void sd_dispatch_free(sd_dispatch* run) {
    delete run;
}

sd_status sd_adequacy_eval(const sd_fleet* fleet, const sd_scenarios* set, double firm_mw, unsigned parallelism,
                           sd_adequacy* out, double* per_scenario_eeu) {
    return guarded([&] {
        require(fleet != nullptr && set != nullptr && out != nullptr, "fleet, set or out is null");
        const auto r = adequacy_report(fleet->fleet, set->set, firm_mw, parallelism);
        *out = sd_adequacy{r.eeu_mwh, r.lole_sne_h, r.eeu_derivative_mwh_per_mw};
        if (per_scenario_eeu)
            for (std::size_t s = 0; s < r.per_scenario.size(); ++s) per_scenario_eeu[s] = r.per_scenario[s].eeu_mwh;
    });
}

sd_status sd_efc_eval(const sd_fleet* fleet, const char* id, double power_mw, double energy_mwh,
                      const sd_scenarios* set, unsigned parallelism, sd_efc* out) {
    return guarded([&] {
        require(fleet != nullptr && set != nullptr && out != nullptr && id != nullptr, "null argument");
        const auto r = efc_marginal(fleet->fleet, make_store(id, power_mw, energy_mwh), set->set, parallelism);
        *out = sd_efc{r.efc_mw, r.delta_eeu_mwh, r.lole_sne_h};
    });
}

sd_status sd_weighted_run(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario, const sd_cost* cost,
                          sd_weighted** out) {
    return guarded([&] {
        require(fleet != nullptr && cost != nullptr && out != nullptr, "fleet, cost or out is null");
        const auto& trace = pick(set, scenario);
        auto plan = sequential_threshold_schedule(fleet->fleet, trace, cost->cost);
        const double objective = weighted_eeu(fleet->fleet, plan.schedule, trace, cost->cost);
        *out = new sd_weighted{fleet->fleet, std::move(plan), objective};
    });
}

double sd_weighted_objective(const sd_weighted* run) {
    return run ? run->objective : std::numeric_limits<double>::quiet_NaN();
}

sd_status sd_weighted_threshold(const sd_weighted* run, size_t store, double* threshold_mw, double* composite_mw,
                                double* multiplier) {
    return guarded([&] {
        require(run != nullptr && store < run->fleet.size(), "store index out of range");
        const auto& c = run->plan.certificate;
        if (threshold_mw) *threshold_mw = c.thresholds_mw[store];
        if (composite_mw) *composite_mw = c.composite_mw[store];
        if (multiplier) *multiplier = c.multipliers[store];
    });
}

sd_status sd_weighted_rates(const sd_weighted* run, size_t store, double* out, size_t n) {
    return guarded([&] {
        require(run != nullptr && store < run->fleet.size(), "store index out of range");
        copy_out(run->plan.schedule.rates_mw[store], out, n);
    });
}

sd_status sd_weighted_residual(const sd_weighted* run, double* out, size_t n) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        copy_out(run->plan.certificate.final_residual_mw, out, n);
    });
}

sd_status sd_weighted_write_schedule(const sd_weighted* run, const char* path) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        write_file(path, [&](std::ostream& os) { io::write_schedule_csv(os, run->fleet, run->plan.schedule); });
    });
}

sd_status sd_weighted_write_certificate(const sd_weighted* run, const char* path) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        write_file(path,
                   [&](std::ostream& os) { io::write_certificate_csv(os, run->fleet, run->plan.certificate); });
    });
}

void sd_weighted_free(sd_weighted* run) {
    delete run;
}

sd_status sd_policy_run(const sd_fleet* fleet, const sd_scenarios* set, const sd_cost* cost,
                        sd_forecaster forecaster, unsigned parallelism, sd_policy** out) {
    return guarded([&] {
        require(fleet != nullptr && set != nullptr && cost != nullptr && out != nullptr, "null argument");
        Forecaster f;
        switch (forecaster) {
        case SD_FORECAST_EXPECTED: f = expected_value_forecaster(set->set); break;
        case SD_FORECAST_PERSISTENCE: f = persistence_forecaster(); break;
        default: throw Error(ErrorCode::InvalidArgument, "unknown forecaster");
        }
        auto trace = rolling_intrinsic(fleet->fleet, set->set, f, cost->cost, parallelism);
        *out = new sd_policy{set->set, std::move(trace)};
    });
}

double sd_policy_expected_cost(const sd_policy* run) {
    return run ? run->trace.expected_weighted_eeu : std::numeric_limits<double>::quiet_NaN();
}

sd_status sd_policy_scenario_cost(const sd_policy* run, size_t scenario, double* cost) {
    return guarded([&] {
        require(run != nullptr && cost != nullptr && scenario < run->trace.weighted_eeu.size(),
                "scenario index out of range");
        *cost = run->trace.weighted_eeu[scenario];
    });
}

sd_status sd_policy_first_rate(const sd_policy* run, size_t scenario, double* rate_mw) {
    return guarded([&] {
        require(run != nullptr && rate_mw != nullptr && scenario < run->trace.schedules.size(),
                "scenario index out of range");
        *rate_mw = run->trace.schedules[scenario].served_mw(0);
    });
}

sd_status sd_policy_write_csv(const sd_policy* run, const char* path) {
    return guarded([&] {
        require(run != nullptr, "run is null");
        write_file(path, [&](std::ostream& os) {
            os << "scenario,probability,weighted_eeu,first_step_rate_mw\n";
            for (std::size_t s = 0; s < run->trace.schedules.size(); ++s)
                os << s << ',' << io::format_number(run->set.probability(s)) << ','
                   << io::format_number(run->trace.weighted_eeu[s]) << ','
                   << io::format_number(run->trace.schedules[s].served_mw(0)) << '\n';
        });
    });
}

void sd_policy_free(sd_policy* run) {
    delete run;
}

sd_status sd_first_step_search(const sd_fleet* fleet, const sd_scenarios* set, const sd_cost* cost,
                               double* rate_mw, double* expected_cost) {
    return guarded([&] {
        require(fleet != nullptr && set != nullptr && cost != nullptr, "null argument");
        const auto r = first_step_search(fleet->fleet, set->set, cost->cost);
        if (rate_mw) *rate_mw = r.rate_mw;
        if (expected_cost) *expected_cost = r.expected_cost;
    });
}

sd_status sd_schedule_load(const char* path, const sd_fleet* fleet, const sd_scenarios* set, size_t scenario,
                           sd_schedule** out) {
    return guarded([&] {
        require(path != nullptr && fleet != nullptr && out != nullptr, "null argument");
        const auto& trace = pick(set, scenario);
        const auto schedule = io::read_schedule_csv(path, fleet->fleet, trace);
        auto result = std::make_unique<sd_schedule>();
        for (const auto& v : validate_schedule(fleet->fleet, trace, schedule)) {
            auto text = describe(v);
            if (v.store) text += " (" + fleet->fleet[*v.store].id + ")";
            result->violations.push_back(std::move(text));
        }
        *out = result.release();
    });
}

size_t sd_schedule_violation_count(const sd_schedule* schedule) {
    return schedule ? schedule->violations.size() : 0;
}

const char* sd_schedule_violation(const sd_schedule* schedule, size_t index) {
    if (!schedule || index >= schedule->violations.size()) return nullptr;
    return schedule->violations[index].c_str();
}

void sd_schedule_free(sd_schedule* schedule) {
    delete schedule;
}

sd_status sd_example2_objective(double p, double x, double* out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = example2_objective(p, x);
    });
}

sd_status sd_example2_optimal_rate(double p, double* out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = example2_optimal_rate(p);
    });
}

}  // extern "C"
