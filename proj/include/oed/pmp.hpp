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

#include <utility>
#include <vector>

#include "oed/objective.hpp"

namespace oed {

enum class ArcLabel { BangPlus, BangMinus, Singular, Indeterminate };

struct Arc {
    int first_node = 0;
    int last_node = 0;  // inclusive
    ArcLabel label = ArcLabel::Indeterminate;
};

struct GramMatrices {
    Mat classical;  // Gbar, Euclidean Gram of the nominal input columns
    Mat sigma;      // Sigma_prior-weighted Frobenius Gram of the (B^i)
    Mat ensemble;   // classical + sigma
};

/// State and covector paths for one weighting, plus the per-node averaged
/// input products E_mu[p^theta (B^theta)^i] that enter the switching function.
struct CovectorData {
    Mat products;                     // (K+1) x m
    Mat state;                        // x path (single) or z path (exact)
    Mat covector;                     // p path (single) or xi path (exact)
    std::vector<Mat> atom_states;     // atoms weighting only
    std::vector<Mat> atom_covectors;  // atoms weighting only
};

struct SingularSolve {
    Vec values;            // m entries; non-singular channels are zero
    bool feasible = true;  // all requested |u^s_i| <= 1
};

struct PmpReport {
    Mat switching;                       // (K+1) x m
    std::vector<std::vector<Arc>> arcs;  // per channel
    GramMatrices gram;
    double consistency = 0.0;
    double lc_min_eig = 0.0;
    bool lc_pass = false;
    double delta_sw = 1e-3;
    std::vector<int> singular_nodes;
    Mat singular_values;                 // one row per singular node
    std::vector<bool> singular_feasible;
};

/// Discrete covector of the classical problem for a given state path: the
/// node values whose interval averages reproduce the discrete cost gradient
/// exactly, with p(T) = 0. Rows are p(t_0)..p(t_K).
Mat integrate_covector(const LinearParamSystem& sys, const Discretization& disc,
                       const Mat& x_path, double alpha);

/// Simulates the weighting's state, integrates its covector, and forms the
/// averaged products; the exact prior runs on the augmented z-adjoint.
CovectorData compute_covector_data(const LinearParamSystem& sys, const Discretization& disc,
                                   const Weighting& weighting, const ControlGrid& u,
                                   double alpha);

/// phi_i = E_mu[p (B^theta)^i] + psi^i at every node; phi(T) = 0 always.
Mat switching_functions(const PsiFamily& fam, const Mat& products);

/// Maximal runs against the per-channel threshold delta_sw * max|phi_i|;
/// near-zero runs of at least 3 nodes are singular, shorter ones indeterminate.
std::vector<std::vector<Arc>> classify_arcs(const Mat& switching, const ControlGrid& u,
                                            double delta_sw);

/// Fraction of nodes with |phi_i| above threshold where sign(phi_i) = sign(u_i).
double pmp_consistency(const Mat& switching, const ControlGrid& u, double delta_sw);

GramMatrices gram_matrices(const LinearParamSystem& sys, const GaussianBelief& prior,
                           const Vec& theta_nominal);

/// The Gram matrix the weighting's tangency system actually uses.
Mat weighting_gram(const LinearParamSystem& sys, const Weighting& weighting);

/// Solves the k x k tangency system for the singular controls at one node;
/// bang channels enter with their fixed signs epsilon_j.
SingularSolve singular_feedback(const LinearParamSystem& sys, const Discretization& disc,
                                const DesignContext& ctx, const Weighting& weighting,
                                const CovectorData& data, int node,
                                const std::vector<int>& singular_channels,
                                const std::vector<std::pair<int, double>>& bang_channels);

/// pass iff the smallest eigenvalue of 2 alpha G restricted to the given
/// channels is positive; empty channel list means all channels.
std::pair<bool, double> legendre_clebsch_check(const Mat& gram, double alpha,
                                               const std::vector<int>& singular_channels);

PmpReport build_pmp_report(const LinearParamSystem& sys, const Discretization& disc,
                           const DesignContext& ctx, const Weighting& weighting,
                           const ControlGrid& u, const GaussianBelief& prior,
                           const Vec& theta_nominal, double delta_sw = 1e-3);

}  // namespace oed
