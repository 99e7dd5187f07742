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

#pragma once

#include <optional>
#include <variant>

#include "oed/belief.hpp"
#include "oed/system.hpp"

namespace oed {

/// Everything the design cost needs besides the control: kernels, direction,
/// state penalty, and the optional proximal anchor.
struct DesignContext {
    PsiFamily psi;
    Vec V;
    double alpha = 1.0;
    double eta = 0.0;
    std::optional<ControlGrid> u_ref;

    void validate() const;
};

/// Finitely supported approximation of the prior.
struct AtomicPrior {
    Mat atoms;    // N x p
    Vec weights;  // N, nonnegative, summing to 1

    int size() const { return static_cast<int>(weights.size()); }
    void validate() const;
};

/// How the state penalty is averaged over the parameter: a fixed theta, a
/// finite atom set, or the exact Gaussian prior (via the augmented system).
struct Weighting {
    std::variant<Vec, AtomicPrior, GaussianBelief> value;

    static Weighting single(Vec theta) { return {std::move(theta)}; }
    static Weighting atoms(AtomicPrior a) { return {std::move(a)}; }
    static Weighting exact(GaussianBelief prior) { return {std::move(prior)}; }

    bool is_single() const { return std::holds_alternative<Vec>(value); }
    bool is_atoms() const { return std::holds_alternative<AtomicPrior>(value); }
    bool is_exact() const { return std::holds_alternative<GaussianBelief>(value); }
};

/// J_alpha(u, theta) = (1/T) int psi^T u - (alpha/T) int |x^theta|^2.
double cost_classical(const LinearParamSystem& sys, const Discretization& disc,
                      const DesignContext& ctx, const Vec& theta, const ControlGrid& u);

/// Prior-averaged cost via one pass over the augmented z-system; no sampling.
double cost_ensemble_exact(const LinearParamSystem& sys, const Discretization& disc,
                           const DesignContext& ctx, const GaussianBelief& prior,
                           const ControlGrid& u);

/// Equi-spaced atoms on [mean - radius sd, mean + radius sd] with normalized
/// Gaussian density weights. p = 1 only; N = 1 degenerates to the mean atom.
AtomicPrior atomize_prior(const GaussianBelief& prior, int N, double radius);

/// Truncation radius for a refinement sweep over N: the support grows like
/// sqrt(N) so the spacing and the truncated tail shrink together, anchored at
/// (N_ref, radius_ref). With a fixed radius the atomized costs stall at the
/// truncation bias instead of converging.
double refinement_radius(int N, int N_ref, double radius_ref);

double cost_ensemble_atoms(const LinearParamSystem& sys, const Discretization& disc,
                           const DesignContext& ctx, const AtomicPrior& atoms,
                           const ControlGrid& u);

double cost(const LinearParamSystem& sys, const Discretization& disc,
            const DesignContext& ctx, const Weighting& weighting, const ControlGrid& u);

/// Exact gradient of the discretized cost with respect to every u_k[i],
/// computed by the discrete adjoint of the chosen weighting.
Mat gradient(const LinearParamSystem& sys, const Discretization& disc,
             const DesignContext& ctx, const Weighting& weighting, const ControlGrid& u);

}  // namespace oed
