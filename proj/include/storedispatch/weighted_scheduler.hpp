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
#include <string>
#include <vector>

#include "storedispatch/core_model.hpp"

namespace storedispatch {

/// One piece of a piecewise-linear cost: `slope` applies from `breakpoint_mw` up.
struct PwlPiece {
    double breakpoint_mw;
    double slope;
};

/**
 * Convex nondecreasing cost of residual demand with w(0) = 0.
 *
 * Derivatives are left derivatives, and w'(0) is taken as 0.
 */
class CostFunction {
public:
    enum class Kind { Linear, Power, PiecewiseLinear };

    static CostFunction linear();
    /// w(d) = d^p, p >= 1.
    static CostFunction power(double p);
    /// First breakpoint must be 0; slopes nonnegative and nondecreasing.
    static CostFunction piecewise_linear(std::vector<PwlPiece> pieces);

    Kind kind() const { return kind_; }
    bool is_linear() const;
    double exponent() const { return exponent_; }
    const std::vector<PwlPiece>& pieces() const { return pieces_; }

    double value(double d_mw) const;
    double left_derivative(double d_mw) const;
    std::string describe() const;

private:
    CostFunction() = default;

    Kind kind_ = Kind::Linear;
    double exponent_ = 1.0;
    std::vector<PwlPiece> pieces_;
};

/// Demand above `threshold` served up to `power`: clamp(d - k, 0, P).
inline double clipped_excess(double demand_mw, double power_mw, double threshold_mw) {
    return std::clamp(demand_mw - threshold_mw, 0.0, power_mw);
}

/// What clipped_excess leaves unserved.
inline double clipped_remainder(double demand_mw, double power_mw, double threshold_mw) {
    return demand_mw - clipped_excess(demand_mw, power_mw, threshold_mw);
}

/**
 * Smallest k >= 0 such that serving clipped_excess(d(t), P, k) at every step
 * stays within the store's energy. Served energy is piecewise linear and
 * nonincreasing in k, so the root is located on its breakpoints and solved
 * exactly on the active piece.
 */
double min_feasible_threshold(const Store& store, const DemandTrace& residual_demand);

struct ThresholdCertificate {
    std::vector<std::size_t> order;         // fleet indices in construction order
    std::vector<double> thresholds_mw;      // k_i, by fleet index
    std::vector<double> composite_mw;       // k*_i: k_i pushed through every later store
    std::vector<double> multipliers;        // w'(k*_i)
    std::vector<double> final_residual_mw;  // per step
    std::vector<double> step_multipliers;   // w'(final residual) per step
};

struct ThresholdSchedule {
    DispatchSchedule schedule;
    ThresholdCertificate certificate;
};

/**
 * Takes the stores in fleet order, each serving the demand left by the
 * previous ones above its minimal feasible threshold. Optimal for every
 * convex nondecreasing w on a known demand trace; the per-step total does not
 * depend on the order. `w` only enters the certificate multipliers.
 */
ThresholdSchedule sequential_threshold_schedule(const Fleet& fleet, const DemandTrace& demand,
                                                const CostFunction& w);

/// step * sum_t w(residual(t)). Throws if the schedule over-serves demand or has negative rates.
double weighted_eeu(const DispatchSchedule& schedule, const DemandTrace& demand, const CostFunction& w);

/// As above, also checking the fleet's rate and energy limits.
double weighted_eeu(const Fleet& fleet, const DispatchSchedule& schedule, const DemandTrace& demand,
                    const CostFunction& w);

}  // namespace storedispatch
