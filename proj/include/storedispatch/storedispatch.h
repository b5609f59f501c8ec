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

/*
 * C interface to the storedispatch library.
 *
 * Every object is an opaque handle created by a *_new / *_load / *_run call
 * and released with the matching *_free. Functions that can fail return an
 * sd_status; on failure sd_last_error() describes what went wrong (the
 * message is per thread and valid until the next failing call on that
 * thread). Units are MW, MWh and hours throughout.
 */

#ifndef STOREDISPATCH_H
#define STOREDISPATCH_H

#include <stddef.h>

#if defined(_WIN32)
#  define SD_API __declspec(dllexport)
#else
#  define SD_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sd_status {
    SD_OK = 0,
    SD_ERR_INVALID_ARGUMENT = 1,
    SD_ERR_DIMENSION = 2,
    SD_ERR_PARSE = 3,
    SD_ERR_IO = 4,
    SD_ERR_INFEASIBLE_TARGET = 5,
    SD_ERR_UNDEFINED_METRIC = 6,
    SD_ERR_INTERNAL = 99
} sd_status;

typedef struct sd_fleet sd_fleet;
typedef struct sd_scenarios sd_scenarios;
typedef struct sd_cost sd_cost;
typedef struct sd_dispatch sd_dispatch;
typedef struct sd_weighted sd_weighted;
typedef struct sd_policy sd_policy;
typedef struct sd_schedule sd_schedule;

typedef struct sd_grid {
    double step_hours;
    size_t n_steps;
} sd_grid;

SD_API const char* sd_last_error(void);
SD_API const char* sd_version(void);

/* ---- fleet ---------------------------------------------------------- */

SD_API sd_status sd_fleet_new(sd_fleet** out);
SD_API sd_status sd_fleet_add_store(sd_fleet* fleet, const char* id, double power_mw, double energy_mwh);
/* Reads a JSON fleet file. has_step / has_n_steps report which grid keys were present. */
SD_API sd_status sd_fleet_load(const char* path, sd_fleet** out, sd_grid* grid, int* has_step, int* has_n_steps);
SD_API size_t sd_fleet_size(const sd_fleet* fleet);
SD_API const char* sd_fleet_store_id(const sd_fleet* fleet, size_t index);
SD_API sd_status sd_fleet_store(const sd_fleet* fleet, size_t index, double* power_mw, double* energy_mwh);
SD_API void sd_fleet_free(sd_fleet* fleet);

/* ---- demand --------------------------------------------------------- */

/* values is row-major [scenario][step]; probabilities may be NULL for uniform weights. */
SD_API sd_status sd_scenarios_from_values(sd_grid grid, const double* values, size_t n_scenarios,
                                          const double* probabilities, sd_scenarios** out);
/* `step_index,demand_mw` CSV as a one-scenario set. expected_steps 0 accepts any length. */
SD_API sd_status sd_demand_load(const char* path, double step_hours, size_t expected_steps, sd_scenarios** out);
/* `step_index,scenario_0,...` CSV with an optional `probability` row. */
SD_API sd_status sd_scenarios_load(const char* path, double step_hours, size_t expected_steps, int force_uniform,
                                   sd_scenarios** out);
SD_API size_t sd_scenarios_count(const sd_scenarios* set);
SD_API sd_grid sd_scenarios_grid(const sd_scenarios* set);
SD_API double sd_scenarios_probability(const sd_scenarios* set, size_t scenario);
SD_API sd_status sd_scenarios_values(const sd_scenarios* set, size_t scenario, double* out, size_t n);
SD_API void sd_scenarios_free(sd_scenarios* set);

/* ---- cost of residual demand ----------------------------------------- */

/* "linear", "power:<p>" or "pwl:<file>". */
SD_API sd_status sd_cost_parse(const char* spec, sd_cost** out);
SD_API sd_status sd_cost_eval(const sd_cost* cost, double residual_mw, double* value);
SD_API int sd_cost_is_linear(const sd_cost* cost);
SD_API void sd_cost_free(sd_cost* cost);

/* ---- feasibility ---------------------------------------------------- */

typedef struct sd_feasibility {
    int feasible;
    double first_violation_h;
    double max_deficit_mwh;
    double max_deficit_at_h;
} sd_feasibility;

SD_API sd_status sd_feasibility_check(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario,
                                      sd_feasibility* out);
/* Writes `t_hours,cum_storage_mwh,cum_demand_mwh`. */
SD_API sd_status sd_feasibility_write_csv(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario,
                                          const char* path);

/* ---- greedy LRTF dispatch ------------------------------------------- */

typedef struct sd_dispatch_summary {
    double eeu_mwh;
    double served_mwh;
    double firm_mwh;
    double t_prime_h;
    int loss_of_load;
    double lole_sne_h;
} sd_dispatch_summary;

SD_API sd_status sd_dispatch_run(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario, double firm_mw,
                                 sd_dispatch** out);
SD_API sd_status sd_dispatch_summary_get(const sd_dispatch* run, sd_dispatch_summary* out);
/* 1 if the store emptied strictly before the last loss-of-load instant, 0 if not, -1 on a bad index. */
SD_API int sd_dispatch_store_binding(const sd_dispatch* run, size_t store);
SD_API double sd_dispatch_emptied_at(const sd_dispatch* run, size_t store);
SD_API sd_status sd_dispatch_rates(const sd_dispatch* run, size_t store, double* out, size_t n);
SD_API sd_status sd_dispatch_residual(const sd_dispatch* run, double* out, size_t n);
SD_API sd_status sd_dispatch_write_schedule(const sd_dispatch* run, const char* path);
SD_API void sd_dispatch_free(sd_dispatch* run);

/* ---- adequacy metrics ----------------------------------------------- */

typedef struct sd_adequacy {
    double eeu_mwh;
    double lole_sne_h;
    double eeu_derivative_mwh_per_mw;
} sd_adequacy;

/* per_scenario_eeu may be NULL; otherwise it receives sd_scenarios_count() values. */
SD_API sd_status sd_adequacy_eval(const sd_fleet* fleet, const sd_scenarios* set, double firm_mw,
                                  unsigned parallelism, sd_adequacy* out, double* per_scenario_eeu);

typedef struct sd_efc {
    double efc_mw;
    double delta_eeu_mwh;
    double lole_sne_h;
} sd_efc;

/* Fails with SD_ERR_UNDEFINED_METRIC when the fleet never reaches loss of load. */
SD_API sd_status sd_efc_eval(const sd_fleet* fleet, const char* id, double power_mw, double energy_mwh,
                             const sd_scenarios* set, unsigned parallelism, sd_efc* out);

/* ---- weighted EEU: sequential threshold schedule --------------------- */

SD_API sd_status sd_weighted_run(const sd_fleet* fleet, const sd_scenarios* set, size_t scenario,
                                 const sd_cost* cost, sd_weighted** out);
SD_API double sd_weighted_objective(const sd_weighted* run);
SD_API sd_status sd_weighted_threshold(const sd_weighted* run, size_t store, double* threshold_mw,
                                       double* composite_mw, double* multiplier);
SD_API sd_status sd_weighted_rates(const sd_weighted* run, size_t store, double* out, size_t n);
SD_API sd_status sd_weighted_residual(const sd_weighted* run, double* out, size_t n);
SD_API sd_status sd_weighted_write_schedule(const sd_weighted* run, const char* path);
SD_API sd_status sd_weighted_write_certificate(const sd_weighted* run, const char* path);
SD_API void sd_weighted_free(sd_weighted* run);

/* ---- stochastic policies -------------------------------------------- */

typedef enum sd_forecaster {
    SD_FORECAST_EXPECTED = 0,
    SD_FORECAST_PERSISTENCE = 1
} sd_forecaster;

SD_API sd_status sd_policy_run(const sd_fleet* fleet, const sd_scenarios* set, const sd_cost* cost,
                               sd_forecaster forecaster, unsigned parallelism, sd_policy** out);
SD_API double sd_policy_expected_cost(const sd_policy* run);
SD_API sd_status sd_policy_scenario_cost(const sd_policy* run, size_t scenario, double* cost);
/* Total rate committed in the first step of a scenario. */
SD_API sd_status sd_policy_first_rate(const sd_policy* run, size_t scenario, double* rate_mw);
/* `scenario,probability,weighted_eeu,first_step_rate_mw`. */
SD_API sd_status sd_policy_write_csv(const sd_policy* run, const char* path);
SD_API void sd_policy_free(sd_policy* run);

/* Best first-step rate when later demand is revealed after the first step. */
SD_API sd_status sd_first_step_search(const sd_fleet* fleet, const sd_scenarios* set, const sd_cost* cost,
                                      double* rate_mw, double* expected_cost);

/* ---- schedule files ------------------------------------------------- */

SD_API sd_status sd_schedule_load(const char* path, const sd_fleet* fleet, const sd_scenarios* set,
                                  size_t scenario, sd_schedule** out);
SD_API size_t sd_schedule_violation_count(const sd_schedule* schedule);
SD_API const char* sd_schedule_violation(const sd_schedule* schedule, size_t index);
SD_API void sd_schedule_free(sd_schedule* schedule);

/* ---- two-period single-store model ----------------------------------- */

SD_API sd_status sd_example2_objective(double p, double x, double* out);
SD_API sd_status sd_example2_optimal_rate(double p, double* out);

#ifdef __cplusplus
}
#endif

#endif /* STOREDISPATCH_H */
