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

#include <cmath>
#include <numeric>
#include <random>

#include "dispatch_oracle.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "storedispatch/error.hpp"
#include "storedispatch/lrtf_dispatch.hpp"

using namespace storedispatch;
using testing::trace;

namespace {

FleetState state_of(const Fleet& fleet) {
    return FleetState::full(fleet);
}

}  // namespace

TEST_CASE("one-step allocation groups stores by residual time") {
    const Fleet two({make_store("long", 1, 2), make_store("short", 1, 1)});
    auto r = lrtf_allocate_step(state_of(two), two, 1.0);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(0.0));

    r = lrtf_allocate_step(state_of(two), two, 2.0);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));

    const Fleet three({make_store("a", 1, 2), make_store("b", 1, 2), make_store("c", 2, 2)});
    r = lrtf_allocate_step(state_of(three), three, 3.0);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[1] == doctest::Approx(1.0));
    CHECK(r[2] == doctest::Approx(1.0));

    // A tied group shares the fraction.
    r = lrtf_allocate_step(state_of(three), three, 1.0);
    CHECK(r[0] == doctest::Approx(0.5));
    CHECK(r[1] == doctest::Approx(0.5));
    CHECK(r[2] == doctest::Approx(0.0));
}

TEST_CASE("allocation beyond available power reports the shortfall") {
    const Fleet two({make_store("a", 1, 2), make_store("b", 1, 0)});
    try {
        lrtf_allocate_step(state_of(two), two, 1.5);
        FAIL("expected an exception");
    } catch (const InfeasibleTargetError& e) {
        CHECK(e.code() == ErrorCode::InfeasibleTarget);
        CHECK(e.shortfall_mw() == doctest::Approx(0.5));
    }
    CHECK_THROWS_AS(lrtf_allocate_step(state_of(two), two, -1.0), Error);
}

TEST_CASE("greedy dispatch on the five-store example") {
    const auto fleet = testing::example1_fleet();
    const auto d = testing::example1_demand();
    const auto r = greedy_lrtf_simulate(fleet, d);

    CHECK(r.served_mwh == doctest::Approx(1800.0));
    CHECK(r.unserved_mwh == doctest::Approx(200.0));
    CHECK(r.loss_of_load);
    CHECK(r.t_prime_h == doctest::Approx(4.0));
    CHECK(r.binding_stores().size() == 5);
    CHECK(r.nonbinding_stores().empty());
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(r.emptied_at_h[i] == doctest::Approx(3.0));
        CHECK(r.remaining_mwh[6][i] <= 1e-9);
    }
    // Residual times meet at t = 1 h (b2, b3 join b1) and t = 2 h (b4 joins).
    CHECK(r.remaining_mwh[2][0] == doctest::Approx(300.0));
    CHECK(r.remaining_mwh[2][1] == doctest::Approx(300.0));
    CHECK(r.remaining_mwh[2][3] == doctest::Approx(300.0));
    CHECK(r.remaining_mwh[2][4] == doctest::Approx(200.0));
    for (std::size_t t = 0; t < 6; ++t) CHECK(r.schedule.residual_mw[t] == doctest::Approx(0.0));
    CHECK(r.schedule.residual_mw[6] == doctest::Approx(200.0));
    CHECK(r.schedule.residual_mw[7] == doctest::Approx(200.0));
    CHECK(validate_schedule(fleet, d, r.schedule).empty());
    CHECK(lole_of_set(fleet.subset(r.nonbinding_stores()), d) == doctest::Approx(4.0));
}

TEST_CASE("greedy dispatch edge cases") {
    SUBCASE("zero demand") {
        const auto r = greedy_lrtf_simulate(testing::example1_fleet(), trace(1, {0, 0, 0}));
        CHECK(r.unserved_mwh == 0.0);
        CHECK(r.served_mwh == 0.0);
        CHECK_FALSE(r.loss_of_load);
        CHECK(r.t_prime_h == 0.0);
        CHECK(r.binding_stores().empty());
        for (const auto& row : r.schedule.rates_mw)
            for (double v : row) CHECK(v == 0.0);
    }
    SUBCASE("single store emptied before the last shortfall instant") {
        // P = 2, E = 2 against (2, 2): it runs flat out for an hour and is empty from t = 1,
        // so the second hour is unserved and T' = 2 h > 1 h.
        const Fleet one({make_store("s", 2, 2)});
        const auto r = greedy_lrtf_simulate(one, trace(1, {2, 2}));
        CHECK(r.schedule.rates_mw[0][0] == doctest::Approx(2.0));
        CHECK(r.schedule.rates_mw[0][1] == doctest::Approx(0.0));
        CHECK(r.emptied_at_h[0] == doctest::Approx(1.0));
        CHECK(r.t_prime_h == doctest::Approx(2.0));
        CHECK(r.strictly_binding[0]);
    }
    SUBCASE("store emptying exactly at the last shortfall instant is not binding") {
        // Demand 3 against P = 2 for one hour; the store (E = 2) empties at t = 1 = T'.
        const Fleet one({make_store("s", 2, 2)});
        const auto r = greedy_lrtf_simulate(one, trace(1, {3, 0}));
        CHECK(r.emptied_at_h[0] == doctest::Approx(1.0));
        CHECK(r.t_prime_h == doctest::Approx(1.0));
        CHECK_FALSE(r.strictly_binding[0]);
    }
    SUBCASE("no loss of load leaves every store non-binding") {
        const Fleet one({make_store("s", 2, 2)});
        const auto r = greedy_lrtf_simulate(one, trace(1, {1, 1}));
        CHECK_FALSE(r.loss_of_load);
        CHECK(r.emptied_at_h[0] == doctest::Approx(2.0));
        CHECK_FALSE(r.strictly_binding[0]);
        CHECK(r.unserved_mwh == doctest::Approx(0.0));
    }
    SUBCASE("empty fleet leaves all demand unserved") {
        const auto d = testing::example1_demand();
        const auto r = greedy_lrtf_simulate(Fleet(), d);
        CHECK(r.unserved_mwh == doctest::Approx(d.energy_mwh()));
        CHECK(r.t_prime_h == doctest::Approx(4.0));
    }
    SUBCASE("firm capacity covering the peak removes all shortfall") {
        const auto r = greedy_lrtf_simulate(testing::example1_fleet(), testing::example1_demand(), 1000.0);
        CHECK(r.unserved_mwh == doctest::Approx(0.0));
        CHECK(r.served_mwh == doctest::Approx(0.0));
        CHECK_FALSE(r.loss_of_load);
    }
    SUBCASE("firm capacity is used before any store") {
        const Fleet one({make_store("s", 5, 5)});
        const auto r = greedy_lrtf_simulate(one, trace(1, {3, 3}), 2.0);
        CHECK(r.schedule.firm_mw[0] == doctest::Approx(2.0));
        CHECK(r.schedule.rates_mw[0][0] == doctest::Approx(1.0));
        CHECK_THROWS_AS(greedy_lrtf_simulate(one, trace(1, {1}), -1.0), Error);
    }
    SUBCASE("zero-energy and zero-power stores never dispatch") {
        const Fleet f({make_store("e", 3, 0), make_store("p", 0, 3)});
        const auto r = greedy_lrtf_simulate(f, trace(1, {1}));
        CHECK(r.served_mwh == 0.0);
        CHECK(r.unserved_mwh == doctest::Approx(1.0));
    }
}

TEST_CASE("loss-of-load duration of a power-only subset") {
    const auto d = testing::example1_demand();
    CHECK(lole_of_set(Fleet(), d) == doctest::Approx(4.0));
    CHECK(lole_of_set(Fleet({make_store("x", 1000, 0)}), d) == doctest::Approx(0.0));
    CHECK(lole_of_set(Fleet({make_store("x", 400, 0)}), d) == doctest::Approx(1.0));
    CHECK(lole_of_set(Fleet({make_store("x", 1, 1)}), trace(1, {0, 0})) == 0.0);
}

TEST_CASE("priority-order dispatch strands energy") {
    const auto fleet = testing::example1_fleet();
    const auto d = testing::example1_demand();
    const std::vector<std::size_t> desc = {0, 1, 2, 3, 4};
    const std::vector<std::size_t> asc = {4, 3, 2, 1, 0};
    auto left = [](const SimulationResult& r) {
        return std::accumulate(r.remaining_mwh.back().begin(), r.remaining_mwh.back().end(), 0.0);
    };
    const auto rd = priority_order_simulate(fleet, d, desc);
    const auto ra = priority_order_simulate(fleet, d, asc);
    CHECK(left(rd) == doctest::Approx(100.0));
    CHECK(left(ra) == doctest::Approx(200.0));
    CHECK(rd.unserved_mwh == doctest::Approx(300.0));
    CHECK(validate_schedule(fleet, d, rd.schedule).empty());
    CHECK_THROWS_AS(priority_order_simulate(fleet, d, std::vector<std::size_t>{0, 1}), Error);
    CHECK_THROWS_AS(priority_order_simulate(fleet, d, std::vector<std::size_t>{0, 0, 1, 2, 3}), Error);
}

TEST_CASE("greedy dispatch properties on random instances") {
    std::mt19937_64 rng(31337);
    for (int k = 0; k < 200; ++k) {
        const auto in = oracle::random_instance(rng, 4, 7);
        const auto& fleet = in.fleet;
        const auto& d = in.demand;
        const auto r = greedy_lrtf_simulate(fleet, d);
        const std::size_t m = fleet.size();
        const std::size_t n = d.size();
        CAPTURE(k);

        REQUIRE(validate_schedule(fleet, d, r.schedule).empty());

        auto rt = [&](std::size_t t, std::size_t i) {
            return fleet[i].power_mw > 0 ? r.remaining_mwh[t][i] / fleet[i].power_mw : 0.0;
        };
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t t = 0; t <= n; ++t)
                    for (std::size_t u = t + 1; u <= n; ++u) {
                        const double tol = 1e-9 * std::max(1.0, rt(t, i));
                        if (rt(t, i) >= rt(t, j) - tol) CHECK(rt(u, i) >= rt(u, j) - 1e-7 * std::max(1.0, rt(u, j)));
                        if (std::abs(rt(t, i) - rt(t, j)) <= tol)
                            CHECK(std::abs(rt(u, i) - rt(u, j)) <= 1e-7 * std::max(1.0, rt(u, i)));
                    }

        // Served rate equals min(d, available power) whenever no store empties mid-step.
        for (std::size_t t = 0; t < n; ++t) {
            double avail = 0.0;
            bool stays = true;
            for (std::size_t i = 0; i < m; ++i) {
                if (r.remaining_mwh[t][i] > energy_tolerance(fleet[i].energy_mwh) && fleet[i].power_mw > 0) {
                    avail += fleet[i].power_mw;
                    stays = stays && r.remaining_mwh[t + 1][i] > energy_tolerance(fleet[i].energy_mwh);
                }
            }
            CHECK(r.schedule.served_mw(t) <= std::min(d[t], avail) + 1e-9 * std::max(1.0, avail));
            if (stays) CHECK(r.schedule.served_mw(t) == doctest::Approx(std::min(d[t], avail)).epsilon(1e-9));
        }

        // Non-binding stores behave as if they were alone.
        const auto sne = r.nonbinding_stores();
        const auto alone = greedy_lrtf_simulate(fleet.subset(sne), d);
        for (std::size_t t = 0; t < n; ++t) {
            double together = 0.0;
            for (std::size_t i : sne) together += r.schedule.rates_mw[i][t];
            CHECK(together == doctest::Approx(alone.schedule.served_mw(t)).epsilon(1e-7));
        }

        // Agrees with the LP optimum.
        CHECK(r.unserved_mwh == doctest::Approx(oracle::min_eeu(fleet, d)).epsilon(1e-6));
    }
}

TEST_CASE("allocation depends only on the past") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 20.0);
    for (int k = 0; k < 50; ++k) {
        const auto in = oracle::random_instance(rng, 3, 6);
        const std::size_t n = in.demand.size();
        if (n < 2) continue;
        const std::size_t cut = n / 2;
        std::vector<double> v(in.demand.values().begin(), in.demand.values().end());
        for (std::size_t t = cut; t < n; ++t) v[t] = u(rng);
        const auto a = greedy_lrtf_simulate(in.fleet, in.demand);
        const auto b = greedy_lrtf_simulate(in.fleet, DemandTrace(in.demand.grid(), v));
        for (std::size_t i = 0; i < in.fleet.size(); ++i)
            for (std::size_t t = 0; t < cut; ++t) CHECK(a.schedule.rates_mw[i][t] == b.schedule.rates_mw[i][t]);
    }
}
