/*
 Copyright 2026 The oed Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "oed/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace oed {

namespace {

constexpr int kMaxHalvings = 40;

Mat clip_box(const Mat& u) {
    return u.cwiseMax(-1.0).cwiseMin(1.0);
}

}  // namespace

void OptimizerConfig::validate() const {
    if (steps < 1) throw DimensionMismatch("optimizer needs at least one step");
    if (step_size <= 0.0) throw DimensionMismatch("step size must be positive");
    if (eta < 0.0) throw DimensionMismatch("eta must be nonnegative");
    if (eta > 0.0 && !u_ref) throw DimensionMismatch("eta > 0 requires a reference control");
}

ControlGrid initial_guess(const Discretization& disc, const DesignContext& ctx) {
    const int m = ctx.psi.channels();
    ControlGrid u;
    u.T = ctx.psi.T;
    u.values = Mat(disc.K, m);
    for (int k = 0; k < disc.K; ++k)
        for (int i = 0; i < m; ++i) {
            const double avg = 0.5 * (ctx.psi.psi(k, i) + ctx.psi.psi(k + 1, i));
            u.values(k, i) = avg < 0.0 ? -1.0 : 1.0;
        }
    return u;
}

OptimizeResult solve(const LinearParamSystem& sys, const Discretization& disc,
                     const DesignContext& ctx, const Weighting& weighting,
                     const OptimizerConfig& cfg,
                     const std::optional<ControlGrid>& start) {
    cfg.validate();
    ctx.validate();

    const double eta = cfg.eta > 0.0 ? cfg.eta : ctx.eta;
    const ControlGrid* anchor = nullptr;
    if (eta > 0.0) {
        anchor = cfg.eta > 0.0 ? &*cfg.u_ref : &*ctx.u_ref;
        if (anchor->K() != disc.K || anchor->channels() != sys.m())
            throw DimensionMismatch("reference control does not match the grid");
    }

    // Objective actually ascended: J(u) - (eta/2T) |u - u_ref|_{L2}^2.
    const auto objective = [&](const ControlGrid& u) {
        double value = cost(sys, disc, ctx, weighting, u);
        if (anchor)
            value -= 0.5 * eta * disc.dt / sys.T *
                     (u.values - anchor->values).squaredNorm();
        return value;
    };

    ControlGrid u = start ? *start : initial_guess(disc, ctx);
    if (u.K() != disc.K || u.channels() != sys.m())
        throw DimensionMismatch("starting control does not match the grid");
    u.values = clip_box(u.values);

    OptimizeResult res;
    double current = objective(u);
    if (!std::isfinite(current)) throw NonFiniteCost("at the starting control");
    if (cfg.record_history) res.cost_history.push_back(current);

    ControlGrid best = u;
    double best_cost = current;

    // The adaptive base step persists across iterations: it doubles after a
    // clean first-try acceptance and halves inside an iteration on failure.
    double base_step = cfg.step_size;

    for (int it = 0; it < cfg.steps; ++it) {
        Mat g = gradient(sys, disc, ctx, weighting, u);
        if (anchor) g -= eta * disc.dt / sys.T * (u.values - anchor->values);

        ControlGrid trial = u;
        double trial_cost;
        if (cfg.backtracking) {
            bool accepted = false;
            bool first_try = true;
            for (int halving = 0; halving <= kMaxHalvings; ++halving) {
                trial.values = clip_box(u.values + base_step * g);
                trial_cost = objective(trial);
                if (trial_cost >= current) {
                    accepted = true;
                    if (first_try) base_step = std::min(base_step * 2.0, 1e12);
                    break;
                }
                base_step *= 0.5;
                first_try = false;
            }
            if (!accepted) {  // no admissible step; stay put
                trial = u;
                trial_cost = current;
            }
        } else {
            trial.values = clip_box(u.values + cfg.step_size * g);
            trial_cost = objective(trial);
        }

        if (!std::isfinite(trial_cost))
            throw NonFiniteCost("at iteration " + std::to_string(it));

        u = trial;
        current = trial_cost;
        res.iterations_run = it + 1;
        if (cfg.record_history) res.cost_history.push_back(current);
        if (current > best_cost) {
            best = u;
            best_cost = current;
        }

        if (cfg.tol_grad > 0.0) {
            const Mat step = clip_box(u.values + g) - u.values;
            if (std::sqrt(step.squaredNorm() * disc.dt) < cfg.tol_grad) break;
        }
    }

    res.u_opt = best;
    res.final_cost = best_cost;
    const int entries = disc.K * sys.m();
    int at_bound = 0;
    for (int k = 0; k < disc.K; ++k)
        for (int i = 0; i < sys.m(); ++i)
            if (std::abs(best.values(k, i)) >= 1.0 - 1e-9) ++at_bound;
    res.active_set_fraction = static_cast<double>(at_bound) / entries;
    return res;
}

}  // namespace oed
