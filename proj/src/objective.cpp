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

#include "oed/objective.hpp"

#include <cmath>
#include <string>

namespace oed {

namespace {

// Trapezoid node weight for the running-cost quadrature.
double node_weight(int k, int K) { return (k == 0 || k == K) ? 0.5 : 1.0; }

// (1/T) int psi^T u dt with interval averages of the node values of psi.
double linear_term(const PsiFamily& fam, const Discretization& disc, const ControlGrid& u) {
    double acc = 0.0;
    for (int k = 0; k < disc.K; ++k)
        acc += 0.5 * (fam.psi.row(k) + fam.psi.row(k + 1)).dot(u.values.row(k));
    return acc * disc.dt / fam.T;
}

// (alpha/T) int x^T W x dt by the node trapezoid rule; W = I when absent.
double quadratic_term(const Mat& path, const Mat* W, double alpha, const Discretization& disc,
                      double T) {
    double acc = 0.0;
    for (int k = 0; k <= disc.K; ++k) {
        const Vec xk = path.row(k).transpose();
        const double v = W ? xk.dot(*W * xk) : xk.squaredNorm();
        acc += node_weight(k, disc.K) * v;
    }
    return acc * alpha * disc.dt / T;
}

// Backward discrete adjoint of the trapezoid quadratic term: returns the
// K x m array of contributions lambda_k^T Gamma Bmat, with
// lambda_k = Phi^T lambda_{k+1} + 2 alpha w_{k+1} W x_{k+1}.
Mat adjoint_contribution(const Mat& path, const Mat* W, double alpha, const Mat& Phi,
                         const Mat& Gamma, const Mat& Bmat, int K) {
    const Mat GB = Gamma * Bmat;
    const Mat PhiT = Phi.transpose();
    Mat out(K, Bmat.cols());
    Vec lambda = Vec::Zero(Phi.rows());
    for (int k = K - 1; k >= 0; --k) {
        const Vec xk1 = path.row(k + 1).transpose();
        lambda = PhiT * lambda + (2.0 * alpha * node_weight(k + 1, K)) * (W ? (*W * xk1).eval() : xk1);
        out.row(k) = lambda.transpose() * GB;
    }
    return out;
}

void check_sizes(const LinearParamSystem& sys, const Discretization& disc,
                 const DesignContext& ctx, const ControlGrid& u) {
    if (ctx.psi.K() != disc.K || ctx.psi.channels() != sys.m())
        throw DimensionMismatch("design context kernels do not match the grid");
    if (u.K() != disc.K || u.channels() != sys.m())
        throw DimensionMismatch("control grid does not match the system");
}

}  // namespace

void DesignContext::validate() const {
    if (alpha <= 0.0) throw DimensionMismatch("alpha must be positive");
    if (eta < 0.0) throw DimensionMismatch("eta must be nonnegative");
    if (eta > 0.0 && !u_ref) throw DimensionMismatch("eta > 0 requires a reference control");
}

void AtomicPrior::validate() const {
    if (atoms.rows() != weights.size())
        throw DimensionMismatch("atom/weight counts differ");
    if (weights.minCoeff() < 0.0)
        throw DimensionMismatch("atom weights must be nonnegative");
    if (std::abs(weights.sum() - 1.0) > 1e-12)
        throw DimensionMismatch("atom weights must sum to 1");
}

double cost_classical(const LinearParamSystem& sys, const Discretization& disc,
                      const DesignContext& ctx, const Vec& theta, const ControlGrid& u) {
    check_sizes(sys, disc, ctx, u);
    const Mat x = simulate_trajectory(sys, disc, theta, u);
    return linear_term(ctx.psi, disc, u) - quadratic_term(x, nullptr, ctx.alpha, disc, sys.T);
}

double cost_ensemble_exact(const LinearParamSystem& sys, const Discretization& disc,
                           const DesignContext& ctx, const GaussianBelief& prior,
                           const ControlGrid& u) {
    check_sizes(sys, disc, ctx, u);
    const AugmentedSystem aug = augment_ensemble_system(sys, prior);
    const Discretization disc_aug = augment_discretization(disc, sys.p());
    const Mat z = simulate_augmented(aug, disc_aug, u);
    return linear_term(ctx.psi, disc, u) -
           quadratic_term(z, &aug.Qbar, ctx.alpha, disc, sys.T);
}

AtomicPrior atomize_prior(const GaussianBelief& prior, int N, double radius) {
    prior.validate();
    if (prior.dim() != 1)
        throw UnsupportedDimension("atomization implemented for p = 1 only");
    if (N < 1) throw DimensionMismatch("need at least one atom");
    if (radius <= 0.0) throw DimensionMismatch("truncation radius must be positive");

    const double mean = prior.mean(0);
    const double sd = std::sqrt(prior.cov(0, 0));
    AtomicPrior out;
    out.atoms = Mat(N, 1);
    out.weights = Vec(N);
    if (N == 1) {
        out.atoms(0, 0) = mean;
        out.weights(0) = 1.0;
        return out;
    }
    for (int i = 0; i < N; ++i) {
        const double a = mean - radius * sd + 2.0 * radius * sd * i / (N - 1);
        out.atoms(i, 0) = a;
        const double zscore = (a - mean) / sd;
        out.weights(i) = std::exp(-0.5 * zscore * zscore);
    }
    out.weights /= out.weights.sum();
    return out;
}

double refinement_radius(int N, int N_ref, double radius_ref) {
    if (N < 1 || N_ref < 1) throw DimensionMismatch("atom counts must be positive");
    return radius_ref * std::sqrt(static_cast<double>(N) / N_ref);
}

double cost_ensemble_atoms(const LinearParamSystem& sys, const Discretization& disc,
                           const DesignContext& ctx, const AtomicPrior& atoms,
                           const ControlGrid& u) {
    check_sizes(sys, disc, ctx, u);
    atoms.validate();
    double quad = 0.0;
    for (int a = 0; a < atoms.size(); ++a) {
        const Mat x = simulate_trajectory(sys, disc, atoms.atoms.row(a).transpose(), u);
        quad += atoms.weights(a) * quadratic_term(x, nullptr, ctx.alpha, disc, sys.T);
    }
    return linear_term(ctx.psi, disc, u) - quad;
}

double cost(const LinearParamSystem& sys, const Discretization& disc,
            const DesignContext& ctx, const Weighting& weighting, const ControlGrid& u) {
    if (weighting.is_single())
        return cost_classical(sys, disc, ctx, std::get<Vec>(weighting.value), u);
    if (weighting.is_atoms())
        return cost_ensemble_atoms(sys, disc, ctx, std::get<AtomicPrior>(weighting.value), u);
    return cost_ensemble_exact(sys, disc, ctx, std::get<GaussianBelief>(weighting.value), u);
}

Mat gradient(const LinearParamSystem& sys, const Discretization& disc,
             const DesignContext& ctx, const Weighting& weighting, const ControlGrid& u) {
    check_sizes(sys, disc, ctx, u);
    const double scale = disc.dt / sys.T;

    Mat g(disc.K, sys.m());
    for (int k = 0; k < disc.K; ++k)
        g.row(k) = scale * 0.5 * (ctx.psi.psi.row(k) + ctx.psi.psi.row(k + 1));

    if (weighting.is_single()) {
        const Vec& theta = std::get<Vec>(weighting.value);
        const Mat x = simulate_trajectory(sys, disc, theta, u);
        g -= scale * adjoint_contribution(x, nullptr, ctx.alpha, disc.Phi, disc.Gamma,
                                          sys.input_matrix(theta), disc.K);
    } else if (weighting.is_atoms()) {
        const AtomicPrior& atoms = std::get<AtomicPrior>(weighting.value);
        atoms.validate();
        for (int a = 0; a < atoms.size(); ++a) {
            const Vec theta = atoms.atoms.row(a).transpose();
            const Mat x = simulate_trajectory(sys, disc, theta, u);
            g -= scale * atoms.weights(a) *
                 adjoint_contribution(x, nullptr, ctx.alpha, disc.Phi, disc.Gamma,
                                      sys.input_matrix(theta), disc.K);
        }
    } else {
        const GaussianBelief& prior = std::get<GaussianBelief>(weighting.value);
        const AugmentedSystem aug = augment_ensemble_system(sys, prior);
        const Discretization disc_aug = augment_discretization(disc, sys.p());
        const Mat z = simulate_augmented(aug, disc_aug, u);
        g -= scale * adjoint_contribution(z, &aug.Qbar, ctx.alpha, disc_aug.Phi,
                                          disc_aug.Gamma, aug.Btilde, disc.K);
    }
    return g;
}

}  // namespace oed
