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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dispatch_oracle.hpp"
#include "storedispatch/adequacy_metrics.hpp"
#include "storedispatch/lrtf_dispatch.hpp"
#include "storedispatch/stochastic_policies.hpp"
#include "storedispatch/weighted_scheduler.hpp"

using namespace storedispatch;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Fleet example1_fleet() {
    return Fleet({make_store("b1", 200, 500), make_store("b2", 200, 400), make_store("b3", 200, 400),
                  make_store("b4", 200, 300), make_store("b5", 200, 200)});
}

DemandTrace example1_demand() {
    return DemandTrace(make_grid(0.5, 8), {400, 400, 400, 400, 1000, 1000, 200, 200});
}

Outcome example1_greedy() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = greedy_lrtf_simulate(example1_fleet(), example1_demand());
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    o.require(std::abs(r.served_mwh - 1800.0) <= 1e-6, fmt("served %.12g MWh", r.served_mwh));
    o.require(std::abs(r.unserved_mwh - 200.0) <= 1e-6, fmt("EEU %.12g MWh", r.unserved_mwh));
    for (std::size_t i = 0; i < 5; ++i)
        o.require(r.remaining_mwh[6][i] <= 1e-6, fmt("store %zu holds %.9g MWh after step 6", i, r.remaining_mwh[6][i]));
    for (std::size_t t = 0; t < 6; ++t)
        o.require(r.schedule.residual_mw[t] <= 1e-6, fmt("residual %.9g MW in step %zu", r.schedule.residual_mw[t], t + 1));
    o.require(secs < 1.0, fmt("took %.3f s", secs));
    if (o.pass) o.detail = fmt("served=%.6f eeu=%.6f residual(7,8)=(%g,%g) MW", r.served_mwh, r.unserved_mwh,
                               r.schedule.residual_mw[6], r.schedule.residual_mw[7]);
    return o;
}

Outcome example1_threshold() {
    Outcome o;
    const auto fleet = example1_fleet();
    const auto d = example1_demand();
    const CostFunction costs[] = {CostFunction::linear(), CostFunction::power(2.0), CostFunction::power(1.5),
                                  CostFunction::power(4.0),
                                  CostFunction::piecewise_linear({{0, 1}, {30, 2}, {120, 5}})};
    for (const auto& w : costs) {
        const auto plan = sequential_threshold_schedule(fleet, d, w);
        for (std::size_t t = 0; t < d.size(); ++t) {
            const double want = std::min(d[t], 50.0);
            o.require(std::abs(plan.certificate.final_residual_mw[t] - want) <= 1e-6,
                      fmt("w=%s: residual %.12g at step %zu", w.describe().c_str(),
                          plan.certificate.final_residual_mw[t], t + 1));
        }
        for (std::size_t i = 0; i < fleet.size(); ++i)
            o.require(std::abs(plan.schedule.store_energy_mwh(i) - fleet[i].energy_mwh) <= 1e-6,
                      fmt("w=%s: store %zu not emptied", w.describe().c_str(), i));
    }
    const auto linear = sequential_threshold_schedule(fleet, d, CostFunction::linear());
    const double cost = weighted_eeu(fleet, linear.schedule, d, CostFunction::linear());
    o.require(std::abs(cost - 200.0) <= 1e-6, fmt("linear weighted EEU %.12g", cost));
    if (o.pass) o.detail = fmt("residual=50 MW on all 8 steps for 5 cost functions; linear objective=%.9f", cost);
    return o;
}

Outcome example1_priority() {
    Outcome o;
    const auto fleet = example1_fleet();
    const auto d = example1_demand();
    std::vector<std::size_t> desc(fleet.size());
    std::iota(desc.begin(), desc.end(), 0);
    std::stable_sort(desc.begin(), desc.end(),
                     [&](std::size_t a, std::size_t b) { return fleet[a].energy_mwh > fleet[b].energy_mwh; });
    std::vector<std::size_t> asc(desc.rbegin(), desc.rend());

    auto stranded = [&](const std::vector<std::size_t>& order) {
        const auto r = priority_order_simulate(fleet, d, order);
        double left = 0.0;
        for (double e : r.remaining_mwh.back()) left += e;
        return left;
    };
    const double s_desc = stranded(desc);
    const double s_asc = stranded(asc);
    o.require(std::abs(s_desc - 100.0) <= 1e-9, fmt("descending strands %.12g MWh", s_desc));
    o.require(std::abs(s_asc - 200.0) <= 1e-9, fmt("ascending strands %.12g MWh", s_asc));
    if (o.pass) o.detail = fmt("descending=%.6f MWh ascending=%.6f MWh", s_desc, s_asc);
    return o;
}

Outcome example2_closed_form() {
    Outcome o;
    const double x179 = example2_optimal_rate(1.79);
    o.require(std::abs(x179 - 1.0) <= 0.02, fmt("x*(1.79)=%.9f", x179));
    const double grid[] = {1.01, 1.5, 2, 3, 5, 10};
    double prev = 2.0;
    for (double p : grid) {
        const double x = example2_optimal_rate(p);
        o.require(x <= prev + 1e-12, fmt("x*(%g)=%.9f exceeds previous %.9f", p, x, prev));
        prev = x;
    }
    const double x1 = example2_optimal_rate(1.0);
    o.require(std::abs(x1 - 2.0) <= 1e-12, fmt("x*(1)=%.12g", x1));
    // x = 2 really is a minimiser at p = 1.
    for (double x = 0.0; x <= 2.0; x += 0.01)
        o.require(example2_objective(1.0, 2.0) <= example2_objective(1.0, x) + 1e-12, fmt("p=1 beaten at x=%g", x));
    if (o.pass)
        o.detail = fmt("x*(1.79)=%.6f x*(1)=%.1f x*(10)=%.6f", x179, x1, example2_optimal_rate(10.0));
    return o;
}

struct RandomRun {
    std::vector<oracle::Instance> instances;
    std::vector<double> oracle_eeu;
};

RandomRun random_run() {
    std::mt19937_64 rng(20260101);
    RandomRun run;
    for (int k = 0; k < 300; ++k) {
        run.instances.push_back(oracle::random_instance(rng));
        run.oracle_eeu.push_back(oracle::min_eeu(run.instances.back().fleet, run.instances.back().demand));
    }
    return run;
}

Outcome greedy_vs_oracle(const RandomRun& run, double oracle_secs) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::size_t k = 0; k < run.instances.size(); ++k) {
        const auto& in = run.instances[k];
        const double g = greedy_lrtf_simulate(in.fleet, in.demand).unserved_mwh;
        const double err = std::abs(g - run.oracle_eeu[k]) / std::max(1.0, std::abs(run.oracle_eeu[k]));
        worst = std::max(worst, err);
        o.require(err <= 1e-6, fmt("instance %zu: greedy %.12g oracle %.12g", k, g, run.oracle_eeu[k]));
    }
    const double secs = oracle_secs + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(run.instances.size() >= 200, "too few instances");
    o.require(secs < 60.0, fmt("took %.2f s", secs));
    if (o.pass) o.detail = fmt("%zu instances, worst rel err %.2e, %.2f s", run.instances.size(), worst, secs);
    return o;
}

Outcome profile_vs_oracle(const RandomRun& run) {
    Outcome o;
    std::size_t feasible = 0;
    for (std::size_t k = 0; k < run.instances.size(); ++k) {
        const auto& in = run.instances[k];
        const bool by_profile = feasible_by_profile(in.fleet, in.demand).feasible;
        const bool by_oracle = run.oracle_eeu[k] <= 1e-9;
        feasible += by_oracle;
        o.require(by_profile == by_oracle, fmt("instance %zu: profile says %d, oracle EEU %.3g", k, by_profile,
                                               run.oracle_eeu[k]));
    }
    if (o.pass) o.detail = fmt("%zu/%zu agree (%zu feasible)", run.instances.size(), run.instances.size(), feasible);
    return o;
}

Outcome finite_differences() {
    Outcome o;
    std::mt19937_64 rng(777);
    std::size_t checked = 0;
    std::size_t attempts = 0;
    double worst = 0.0;
    while (checked < 60 && attempts < 5000) {
        ++attempts;
        const auto in = oracle::random_instance(rng);
        const auto base = greedy_lrtf_simulate(in.fleet, in.demand);
        const double lole = lole_of_set(in.fleet.subset(base.nonbinding_stores()), in.demand);
        if (lole <= 0.0) continue;

        double delta = 1e-4 * std::max(1.0, in.demand.peak_mw());
        double prev = std::numeric_limits<double>::quiet_NaN();
        double fd = prev;
        bool stable = false;
        for (int h = 0; h < 40 && !stable; ++h, delta *= 0.5) {
            const auto moved = greedy_lrtf_simulate(in.fleet, in.demand, delta);
            fd = (base.unserved_mwh - moved.unserved_mwh) / delta;
            const bool same_partition = moved.strictly_binding == base.strictly_binding;
            stable = same_partition && std::abs(fd - prev) <= 1e-9 * std::max(1.0, std::abs(fd));
            prev = fd;
        }
        ++checked;
        const double err = std::abs(fd - lole) / std::max(1.0, lole);
        worst = std::max(worst, err);
        o.require(stable, fmt("instance %zu: difference quotient never stabilised", checked));
        o.require(err <= 1e-6, fmt("instance %zu: FD %.12g vs LOLE %.12g", checked, fd, lole));
    }
    o.require(checked >= 50, fmt("only %zu instances with loss of load", checked));
    if (o.pass) o.detail = fmt("%zu instances, worst rel err %.2e", checked, worst);
    return o;
}

Outcome threshold_properties() {
    Outcome o;
    std::mt19937_64 rng(4242);
    const CostFunction costs[] = {CostFunction::linear(), CostFunction::power(2.0),
                                  CostFunction::piecewise_linear({{0, 0.5}, {3, 1.5}, {9, 4}})};
    std::size_t instances = 0;
    std::size_t dominance_checks = 0;
    double worst_oracle = 0.0;

    for (int k = 0; k < 60; ++k) {
        const auto in = oracle::random_instance(rng, 4, 8);
        const auto& fleet = in.fleet;
        const auto& d = in.demand;
        const std::size_t m = fleet.size();
        const std::size_t n = d.size();
        ++instances;

        for (const auto& w : costs) {
            const auto plan = sequential_threshold_schedule(fleet, d, w);
            const auto& cert = plan.certificate;
            const double objective = weighted_eeu(fleet, plan.schedule, d, w);
            const std::string tag = fmt("instance %d w=%s", k, w.describe().c_str());

            // Order invariance of per-step totals.
            std::vector<std::size_t> perm(m);
            std::iota(perm.begin(), perm.end(), 0);
            for (int rep = 0; rep < 10; ++rep) {
                std::shuffle(perm.begin(), perm.end(), rng);
                const auto other = sequential_threshold_schedule(fleet.permuted(perm), d, w);
                for (std::size_t t = 0; t < n; ++t) {
                    const double a = plan.schedule.served_mw(t);
                    const double b = other.schedule.served_mw(t);
                    o.require(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)),
                              tag + fmt(": step %zu total %.15g vs %.15g after permutation", t, a, b));
                }
            }

            const double margin = 1e-7;
            for (std::size_t i = 0; i < m; ++i) {
                const double k_i = cert.thresholds_mw[i];
                const double ks = cert.composite_mw[i];
                const double tol = 1e-9 * std::max(1.0, k_i);
                o.require(ks >= -tol && ks <= k_i + tol, tag + fmt(": k*=%.12g outside [0, k=%.12g]", ks, k_i));

                const double used = plan.schedule.store_energy_mwh(i);
                if (used < fleet[i].energy_mwh - energy_tolerance(fleet[i].energy_mwh))
                    o.require(k_i <= 1e-9 * std::max(1.0, d.peak_mw()),
                              tag + fmt(": slack store %zu has k=%.12g", i, k_i));

                for (std::size_t t = 0; t < n; ++t) {
                    const double r = plan.schedule.rates_mw[i][t];
                    const double lam = cert.multipliers[i];
                    const double bar = cert.step_multipliers[t];
                    const double scale = margin * std::max(1.0, std::abs(lam));
                    const double rtol = rate_tolerance(fleet[i].power_mw);
                    if (bar > lam + scale)
                        o.require(r >= fleet[i].power_mw - rtol, tag + fmt(": store %zu step %zu not at full rate", i, t));
                    if (bar < lam - scale)
                        o.require(r <= rtol, tag + fmt(": store %zu step %zu should idle", i, t));
                }
            }

            // Dominance over random feasible schedules.
            for (int s = 0; s < 1000; ++s) {
                const auto rates = oracle::random_feasible_rates(rng, fleet, d);
                const auto sched = make_schedule(d, rates);
                const double c = weighted_eeu(sched, d, w);
                ++dominance_checks;
                o.require(objective <= c + 1e-9 * std::max(1.0, c),
                          tag + fmt(": random schedule %d beats it (%.12g < %.12g)", s, c, objective));
            }

            // Independent optimum.
            const auto best = oracle::min_weighted(fleet, d, w);
            const double err = std::abs(objective - best.value) / std::max(1.0, best.value);
            worst_oracle = std::max(worst_oracle, err);
            o.require(objective <= best.value + 1e-6 * std::max(1.0, best.value) && err <= 1e-6,
                      tag + fmt(": objective %.12g vs oracle %.12g", objective, best.value));
        }
    }
    if (o.pass)
        o.detail = fmt("%zu instances x 3 costs, %zu random schedules dominated, worst oracle gap %.2e", instances,
                       dominance_checks, worst_oracle);
    return o;
}

Outcome example2_monte_carlo() {
    Outcome o;
    std::mt19937_64 rng(1234567);
    std::uniform_real_distribution<double> k(0.0, 4.0);
    const std::size_t draws = 1000000;
    std::string summary;
    for (const auto& [p, x] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {1.79, 1.0}, {2.0, 1.0}, {3.0, 0.5}}) {
        double sum = 0.0;
        double sum2 = 0.0;
        for (std::size_t s = 0; s < draws; ++s) {
            // First step: serve x of the unit demand 2. Second step: the rest of the energy against k.
            const double leftover = 2.0 - x;
            const double v = std::pow(2.0 - x, p) + std::pow(std::max(0.0, k(rng) - leftover), p);
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / draws;
        const double se = std::sqrt(std::max(0.0, sum2 / draws - mean * mean) / draws);
        const double exact = example2_objective(p, x);
        o.require(std::abs(mean - exact) <= 3.0 * se,
                  fmt("p=%g x=%g: MC %.6f +- %.6f vs %.6f", p, x, mean, se, exact));
        summary += fmt("%sp=%g: %.4f vs %.4f (%.2f se)", summary.empty() ? "" : ", ", p, mean, exact,
                       std::abs(mean - exact) / se);
    }
    if (o.pass) o.detail = summary;
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };

    const auto t0 = std::chrono::steady_clock::now();
    const RandomRun run = random_run();
    const double oracle_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::vector<Criterion> criteria = {
        {1, "example 1 greedy dispatch", example1_greedy},
        {2, "example 1 threshold policy", example1_threshold},
        {3, "example 1 priority-order stranding", example1_priority},
        {4, "example 2 optimal first-period rate", example2_closed_form},
        {5, "greedy EEU equals LP optimum", [&] { return greedy_vs_oracle(run, oracle_secs); }},
        {6, "profile feasibility equals zero LP EEU", [&] { return profile_vs_oracle(run); }},
        {7, "EEU derivative by finite differences", finite_differences},
        {8, "threshold schedule properties", threshold_properties},
        {9, "example 2 Monte Carlo consistency", example2_monte_carlo},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("%s criterion %d: %s -- %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name, out.detail.c_str());
        std::fflush(stdout);
        failed += !out.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
