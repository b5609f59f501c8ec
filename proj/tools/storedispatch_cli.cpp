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

// storedispatch command-line front end. Talks to the library only through
// the C interface in storedispatch.h.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "storedispatch/storedispatch.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;
constexpr int kExitUndefined = 3;

struct Failure {
    sd_status status;
    std::string message;
};

void check(sd_status st) {
    if (st != SD_OK) throw Failure{st, sd_last_error()};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
template <class T, void (*Free)(T*)>
using Handle = std::unique_ptr<T, Deleter<T, Free>>;

using FleetPtr = Handle<sd_fleet, sd_fleet_free>;
using ScenariosPtr = Handle<sd_scenarios, sd_scenarios_free>;
using CostPtr = Handle<sd_cost, sd_cost_free>;
using DispatchPtr = Handle<sd_dispatch, sd_dispatch_free>;
using WeightedPtr = Handle<sd_weighted, sd_weighted_free>;
using PolicyPtr = Handle<sd_policy, sd_policy_free>;
using SchedulePtr = Handle<sd_schedule, sd_schedule_free>;

std::string num(double v) {
    if (v == 0.0) v = 0.0;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

json jnum(double v) {
    if (std::isfinite(v)) return v == 0.0 ? 0.0 : v;
    return nullptr;
}

struct Options {
    std::string fleet;
    std::string demand;
    std::string scenarios;
    std::optional<double> step_hours;
    std::string out;
    std::string cost = "linear";
    double firm = 0.0;
    unsigned parallel = 1;
    std::size_t scenario = 0;
    bool uniform = false;
    double cand_power = 0.0;
    double cand_energy = 0.0;
    std::string cand_id = "candidate";
    std::string forecaster = "expected";
    std::string schedule;
};

struct Inputs {
    FleetPtr fleet;
    ScenariosPtr set;
};

Inputs load(const Options& o) {
    sd_fleet* f = nullptr;
    sd_grid grid{};
    int has_step = 0;
    int has_n = 0;
    check(sd_fleet_load(o.fleet.c_str(), &f, &grid, &has_step, &has_n));
    Inputs in{FleetPtr(f), nullptr};

    double step = o.step_hours.value_or(grid.step_hours);
    if (!o.step_hours && !has_step) step = 1.0;
    const std::size_t expected = has_n ? grid.n_steps : 0;

    sd_scenarios* s = nullptr;
    if (!o.demand.empty()) {
        check(sd_demand_load(o.demand.c_str(), step, expected, &s));
    } else {
        check(sd_scenarios_load(o.scenarios.c_str(), step, expected, o.uniform ? 1 : 0, &s));
    }
    in.set.reset(s);
    if (o.scenario >= sd_scenarios_count(s))
        throw Failure{SD_ERR_INVALID_ARGUMENT, "--scenario " + std::to_string(o.scenario) + " out of range (" +
                                                   std::to_string(sd_scenarios_count(s)) + " scenarios)"};
    return in;
}

CostPtr load_cost(const std::string& spec) {
    sd_cost* c = nullptr;
    check(sd_cost_parse(spec.c_str(), &c));
    return CostPtr(c);
}

fs::path out_dir(const Options& o) {
    if (o.out.empty()) return {};
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Failure{SD_ERR_IO, "cannot create output directory '" + o.out + "': " + ec.message()};
    return fs::path(o.out);
}

void write_report(const fs::path& dir, const json& report) {
    if (dir.empty()) return;
    std::ofstream os(dir / "report.json", std::ios::binary);
    if (!os) throw Failure{SD_ERR_IO, "cannot write '" + (dir / "report.json").string() + "'"};
    os << report.dump(2) << '\n';
}

std::vector<std::string> store_ids(const sd_fleet* f) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < sd_fleet_size(f); ++i) ids.emplace_back(sd_fleet_store_id(f, i));
    return ids;
}

int cmd_feasibility(const Options& o) {
    auto in = load(o);
    sd_feasibility r{};
    check(sd_feasibility_check(in.fleet.get(), in.set.get(), o.scenario, &r));
    std::cout << "verdict=" << (r.feasible ? "feasible" : "infeasible") << '\n';
    if (!r.feasible) {
        std::cout << "first_violation_h=" << num(r.first_violation_h) << '\n'
                  << "max_deficit_mwh=" << num(r.max_deficit_mwh) << '\n'
                  << "max_deficit_at_h=" << num(r.max_deficit_at_h) << '\n';
    }
    const auto dir = out_dir(o);
    if (!dir.empty()) {
        check(sd_feasibility_write_csv(in.fleet.get(), in.set.get(), o.scenario,
                                       (dir / "cumulative_profiles.csv").string().c_str()));
        json rep{{"command", "feasibility"}, {"feasible", r.feasible != 0}};
        if (!r.feasible) {
            rep["first_violation_h"] = jnum(r.first_violation_h);
            rep["max_deficit_mwh"] = jnum(r.max_deficit_mwh);
            rep["max_deficit_at_h"] = jnum(r.max_deficit_at_h);
        }
        write_report(dir, rep);
    }
    return kExitOk;
}

int cmd_dispatch(const Options& o) {
    auto in = load(o);
    sd_dispatch* raw = nullptr;
    check(sd_dispatch_run(in.fleet.get(), in.set.get(), o.scenario, o.firm, &raw));
    DispatchPtr run(raw);
    sd_dispatch_summary s{};
    check(sd_dispatch_summary_get(run.get(), &s));

    const auto ids = store_ids(in.fleet.get());
    std::vector<std::string> se, sne;
    for (std::size_t i = 0; i < ids.size(); ++i)
        (sd_dispatch_store_binding(run.get(), i) == 1 ? se : sne).push_back(ids[i]);
    auto join = [](const std::vector<std::string>& v) {
        std::string r;
        for (const auto& x : v) r += (r.empty() ? "" : ",") + x;
        return r;
    };

    std::cout << "eeu_mwh=" << num(s.eeu_mwh) << '\n'
              << "served_mwh=" << num(s.served_mwh) << '\n';
    if (o.firm > 0.0) std::cout << "firm_mwh=" << num(s.firm_mwh) << '\n';
    std::cout << "loss_of_load=" << (s.loss_of_load ? "yes" : "no") << '\n'
              << "t_prime_h=" << num(s.t_prime_h) << '\n'
              << "binding=" << join(se) << '\n'
              << "nonbinding=" << join(sne) << '\n'
              << "lole_sne_h=" << num(s.lole_sne_h) << '\n';

    const auto dir = out_dir(o);
    if (!dir.empty()) {
        check(sd_dispatch_write_schedule(run.get(), (dir / "schedule.csv").string().c_str()));
        json stores = json::array();
        for (std::size_t i = 0; i < ids.size(); ++i)
            stores.push_back({{"id", ids[i]},
                              {"binding", sd_dispatch_store_binding(run.get(), i) == 1},
                              {"emptied_at_h", jnum(sd_dispatch_emptied_at(run.get(), i))}});
        write_report(dir, json{{"command", "dispatch"},
                               {"eeu_mwh", jnum(s.eeu_mwh)},
                               {"served_mwh", jnum(s.served_mwh)},
                               {"firm_mw", jnum(o.firm)},
                               {"firm_mwh", jnum(s.firm_mwh)},
                               {"loss_of_load", s.loss_of_load != 0},
                               {"t_prime_h", jnum(s.t_prime_h)},
                               {"lole_sne_h", jnum(s.lole_sne_h)},
                               {"stores", stores}});
    }
    return kExitOk;
}

int cmd_metrics(const Options& o) {
    auto in = load(o);
    const std::size_t n = sd_scenarios_count(in.set.get());
    std::vector<double> per(n);
    sd_adequacy a{};
    check(sd_adequacy_eval(in.fleet.get(), in.set.get(), o.firm, o.parallel, &a, per.data()));
    std::cout << "scenarios=" << n << '\n'
              << "eeu_mwh=" << num(a.eeu_mwh) << '\n'
              << "lole_sne_h=" << num(a.lole_sne_h) << '\n'
              << "eeu_derivative_mwh_per_mw=" << num(a.eeu_derivative_mwh_per_mw) << '\n';
    const auto dir = out_dir(o);
    if (!dir.empty()) {
        json scen = json::array();
        for (std::size_t s = 0; s < n; ++s)
            scen.push_back({{"index", s},
                            {"probability", jnum(sd_scenarios_probability(in.set.get(), s))},
                            {"eeu_mwh", jnum(per[s])}});
        write_report(dir, json{{"command", "metrics"},
                               {"firm_mw", jnum(o.firm)},
                               {"eeu_mwh", jnum(a.eeu_mwh)},
                               {"lole_sne_h", jnum(a.lole_sne_h)},
                               {"eeu_derivative_mwh_per_mw", jnum(a.eeu_derivative_mwh_per_mw)},
                               {"scenarios", scen}});
    }
    return kExitOk;
}

int cmd_efc(const Options& o) {
    auto in = load(o);
    sd_efc r{};
    const sd_status st = sd_efc_eval(in.fleet.get(), o.cand_id.c_str(), o.cand_power, o.cand_energy,
                                     in.set.get(), o.parallel, &r);
    if (st == SD_ERR_UNDEFINED_METRIC) {
        std::cerr << "error: EFC undefined: " << sd_last_error() << '\n';
        return kExitUndefined;
    }
    check(st);
    std::cout << "efc_mw=" << num(r.efc_mw) << '\n'
              << "delta_eeu_mwh=" << num(r.delta_eeu_mwh) << '\n'
              << "lole_sne_h=" << num(r.lole_sne_h) << '\n';
    write_report(out_dir(o), json{{"command", "efc"},
                                  {"candidate", {{"id", o.cand_id},
                                                 {"power_mw", jnum(o.cand_power)},
                                                 {"energy_mwh", jnum(o.cand_energy)}}},
                                  {"efc_mw", jnum(r.efc_mw)},
                                  {"delta_eeu_mwh", jnum(r.delta_eeu_mwh)},
                                  {"lole_sne_h", jnum(r.lole_sne_h)}});
    return kExitOk;
}

int cmd_weighted(const Options& o) {
    auto in = load(o);
    auto cost = load_cost(o.cost);
    sd_weighted* raw = nullptr;
    check(sd_weighted_run(in.fleet.get(), in.set.get(), o.scenario, cost.get(), &raw));
    WeightedPtr run(raw);

    const auto ids = store_ids(in.fleet.get());
    std::cout << "cost=" << o.cost << '\n' << "objective=" << num(sd_weighted_objective(run.get())) << '\n';
    json thresholds = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        double k = 0, ks = 0, lam = 0;
        check(sd_weighted_threshold(run.get(), i, &k, &ks, &lam));
        std::cout << "threshold." << ids[i] << '=' << num(k) << '\n';
        thresholds.push_back({{"id", ids[i]}, {"threshold_mw", jnum(k)}, {"composite_mw", jnum(ks)},
                              {"multiplier", jnum(lam)}});
    }
    const std::size_t n = sd_scenarios_grid(in.set.get()).n_steps;
    std::vector<double> residual(n);
    check(sd_weighted_residual(run.get(), residual.data(), n));
    std::string res;
    for (double v : residual) res += (res.empty() ? "" : ",") + num(v);
    std::cout << "residual_mw=" << res << '\n';

    const auto dir = out_dir(o);
    if (!dir.empty()) {
        check(sd_weighted_write_schedule(run.get(), (dir / "schedule.csv").string().c_str()));
        check(sd_weighted_write_certificate(run.get(), (dir / "certificate.csv").string().c_str()));
        json jr = json::array();
        for (double v : residual) jr.push_back(jnum(v));
        write_report(dir, json{{"command", "weighted"},
                               {"cost", o.cost},
                               {"objective", jnum(sd_weighted_objective(run.get()))},
                               {"stores", thresholds},
                               {"residual_mw", jr}});
    }
    return kExitOk;
}

int cmd_simulate(const Options& o) {
    auto in = load(o);
    auto cost = load_cost(o.cost);
    sd_forecaster fc;
    if (o.forecaster == "expected") fc = SD_FORECAST_EXPECTED;
    else if (o.forecaster == "persistence") fc = SD_FORECAST_PERSISTENCE;
    else throw Failure{SD_ERR_INVALID_ARGUMENT, "unknown forecaster '" + o.forecaster + "'"};

    sd_policy* raw = nullptr;
    check(sd_policy_run(in.fleet.get(), in.set.get(), cost.get(), fc, o.parallel, &raw));
    PolicyPtr run(raw);

    const std::size_t n = sd_scenarios_count(in.set.get());
    double mean_first = 0.0;
    json scen = json::array();
    for (std::size_t s = 0; s < n; ++s) {
        double c = 0, r = 0;
        check(sd_policy_scenario_cost(run.get(), s, &c));
        check(sd_policy_first_rate(run.get(), s, &r));
        const double p = sd_scenarios_probability(in.set.get(), s);
        mean_first += p * r;
        scen.push_back({{"index", s}, {"probability", jnum(p)}, {"weighted_eeu", jnum(c)},
                        {"first_step_rate_mw", jnum(r)}});
    }
    std::cout << "scenarios=" << n << '\n'
              << "cost=" << o.cost << '\n'
              << "forecaster=" << o.forecaster << '\n'
              << "expected_weighted_eeu=" << num(sd_policy_expected_cost(run.get())) << '\n'
              << "rolling_first_rate_mw=" << num(mean_first) << '\n';

    json rep{{"command", "simulate"},
             {"cost", o.cost},
             {"forecaster", o.forecaster},
             {"expected_weighted_eeu", jnum(sd_policy_expected_cost(run.get()))},
             {"rolling_first_rate_mw", jnum(mean_first)}};

    // The exact search needs a common first-step demand; skip it otherwise.
    double rate = 0, best = 0;
    if (sd_first_step_search(in.fleet.get(), in.set.get(), cost.get(), &rate, &best) == SD_OK) {
        std::cout << "optimal_first_rate_mw=" << num(rate) << '\n' << "optimal_expected_cost=" << num(best) << '\n';
        rep["optimal_first_rate_mw"] = jnum(rate);
        rep["optimal_expected_cost"] = jnum(best);
    }
    rep["scenarios"] = scen;

    const auto dir = out_dir(o);
    if (!dir.empty()) {
        check(sd_policy_write_csv(run.get(), (dir / "scenarios.csv").string().c_str()));
        write_report(dir, rep);
    }
    return kExitOk;
}

int cmd_validate(const Options& o) {
    auto in = load(o);
    sd_schedule* raw = nullptr;
    check(sd_schedule_load(o.schedule.c_str(), in.fleet.get(), in.set.get(), o.scenario, &raw));
    SchedulePtr sched(raw);
    const std::size_t n = sd_schedule_violation_count(sched.get());
    std::cout << "violations=" << n << '\n';
    for (std::size_t i = 0; i < n; ++i) std::cout << "violation=" << sd_schedule_violation(sched.get(), i) << '\n';
    return n == 0 ? kExitOk : kExitInput;
}

int exit_code(sd_status st) {
    switch (st) {
    case SD_ERR_UNDEFINED_METRIC: return kExitUndefined;
    case SD_ERR_INTERNAL: return kExitInternal;
    default: return kExitInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dispatch and adequacy analysis for fleets of energy stores"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sd_version()));
    Options o;

    auto add_inputs = [&](CLI::App* sub) {
        sub->add_option("--fleet", o.fleet, "Fleet JSON file")->required()->check(CLI::ExistingFile);
        auto* d = sub->add_option("--demand", o.demand, "Demand CSV (step_index,demand_mw)");
        auto* s = sub->add_option("--scenarios", o.scenarios, "Scenario CSV (step_index,scenario_0,...)");
        d->excludes(s);
        s->excludes(d);
        sub->add_option("--step-hours", o.step_hours, "Step length in hours (overrides the fleet file)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--scenario", o.scenario, "Scenario index for single-trace commands");
        sub->add_flag("--uniform", o.uniform, "Ignore scenario probabilities and weight equally");
        sub->add_option("--out", o.out, "Output directory");
        sub->callback([&, d, s] {
            if (d->count() + s->count() == 0) throw CLI::RequiredError("--demand or --scenarios");
        });
    };

    auto* feas = app.add_subcommand("feasibility", "Check whether the fleet can cover all demand");
    add_inputs(feas);

    auto* disp = app.add_subcommand("dispatch", "Greedy longest-residual-time-first dispatch");
    add_inputs(disp);
    disp->add_option("--firm", o.firm, "Firm capacity in MW")->check(CLI::NonNegativeNumber);

    auto* met = app.add_subcommand("metrics", "EEU, LOLE of non-binding stores and the EEU derivative");
    add_inputs(met);
    met->add_option("--firm", o.firm, "Firm capacity in MW")->check(CLI::NonNegativeNumber);
    met->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);

    auto* efc = app.add_subcommand("efc", "Equivalent firm capacity of a marginal store");
    add_inputs(efc);
    efc->add_option("--candidate-power", o.cand_power, "Candidate power in MW")
        ->required()
        ->check(CLI::NonNegativeNumber);
    efc->add_option("--candidate-energy", o.cand_energy, "Candidate energy in MWh")
        ->required()
        ->check(CLI::NonNegativeNumber);
    efc->add_option("--candidate-id", o.cand_id, "Candidate id");
    efc->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);

    auto* wt = app.add_subcommand("weighted", "Threshold schedule minimising weighted EEU");
    add_inputs(wt);
    wt->add_option("--cost", o.cost, "linear | power:<p> | pwl:<file>");

    auto* sim = app.add_subcommand("simulate", "Rolling re-optimisation over demand scenarios");
    add_inputs(sim);
    sim->add_option("--cost", o.cost, "linear | power:<p> | pwl:<file>");
    sim->add_option("--forecaster", o.forecaster, "expected | persistence")
        ->check(CLI::IsMember({"expected", "persistence"}));
    sim->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);

    auto* val = app.add_subcommand("validate", "Check a schedule CSV against fleet and demand");
    add_inputs(val);
    val->add_option("--schedule", o.schedule, "Schedule CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*feas) return cmd_feasibility(o);
        if (*disp) return cmd_dispatch(o);
        if (*met) return cmd_metrics(o);
        if (*efc) return cmd_efc(o);
        if (*wt) return cmd_weighted(o);
        if (*sim) return cmd_simulate(o);
        if (*val) return cmd_validate(o);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << '\n';
        return exit_code(f.status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}
