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

#include <vector>

#include <Eigen/Dense>

#include "oed/belief.hpp"
#include "oed/errors.hpp"

namespace oed {

// ============================================================================
// Parameter-affine linear system  x' = A x + B^theta u,  y = C x,
// with B^theta = B[0] + theta_1 B[1] + ... + theta_p B[p].
// ============================================================================
struct LinearParamSystem {
    Mat A;                // n x n drift
    std::vector<Mat> B;   // p+1 input maps, each n x m
    Mat C;                // q x n observation
    Mat sigma;            // q x q noise scale, full rank
    double T = 0.0;       // horizon

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return B.empty() ? 0 : static_cast<int>(B[0].cols()); }
    int p() const { return static_cast<int>(B.size()) - 1; }
    int q() const { return static_cast<int>(C.rows()); }

    /// B^theta for a concrete parameter value.
    Mat input_matrix(const Vec& theta) const;

    /// The n x p matrix whose columns are the i-th columns of B_1..B_p
    /// (written B^i elsewhere); the family over i must be free.
    Mat param_columns(int i) const;

    // Enforces q <= p <= n, m <= n, full-rank sigma, and linear independence
    // of the stacked (B^i) family.
    void validate() const;
};

/// Piecewise-constant control on a uniform grid: row k holds u on [t_k, t_{k+1}).
struct ControlGrid {
    double T = 0.0;
    Mat values;  // K x m

    int K() const { return static_cast<int>(values.rows()); }
    int channels() const { return static_cast<int>(values.cols()); }

    static ControlGrid constant(int K, int m, double T, double value);

    void validate() const;  // K >= 2 and sup-norm bound <= 1
};

/// Exact one-step transition data for the uniform grid.
struct Discretization {
    int K = 0;
    double dt = 0.0;
    Mat Phi;     // e^{A dt}
    Mat Gamma;   // int_0^dt e^{As} ds
    Mat Gamma2;  // int_0^dt Gamma(s) ds, for exact interval integrals
    Vec nodes;   // K+1 grid times
};

/// Measurement kernels psi_j and their first two time derivatives at the
/// grid nodes, plus the combined design kernel psi = S * sum_j psi_j V_j.
struct PsiFamily {
    double T = 0.0;
    double S = 0.0;                // sqrt(T)/sigma for q = 1
    std::vector<Mat> psi_j;        // p+1 entries, each (K+1) x m
    std::vector<Mat> dpsi_j;
    std::vector<Mat> ddpsi_j;
    Mat psi;                       // (K+1) x m combined kernel

    int K() const { return static_cast<int>(psi.rows()) - 1; }
    int channels() const { return static_cast<int>(psi.cols()); }
};

/// Averaged measurement map: Y_avg = Y0 + Y theta + noise.
struct MeasurementMap {
    Vec Y0;  // q
    Mat Y;   // q x p
};

/// Deterministic n(p+1)-dimensional reformulation of the parameter ensemble:
/// z' = Atilde z + Btilde u with E|x^theta|^2 = z^T Qbar z.
struct AugmentedSystem {
    Mat Atilde;  // n(p+1) square, block-diagonal copies of A
    Mat Btilde;  // stacked B_0..B_p
    Mat Qbar;    // E[ (1,theta)(1,theta)^T ] (x) I_n, symmetric PSD
    int n = 0;
    int p = 0;
};

// ----------------------------------------------------------------------------

/// Exact transition matrices via the exponential of [[A, I], [0, 0]] dt.
Discretization discretize(const LinearParamSystem& sys, int K);

/// Block-diagonal lift of a base discretization to the augmented z-system.
Discretization augment_discretization(const Discretization& disc, int p);

/// Exact state path under piecewise-constant u: rows are x(t_0)..x(t_K).
Mat simulate_trajectory(const LinearParamSystem& sys, const Discretization& disc,
                        const Vec& theta, const ControlGrid& u);

/// z-path of an augmented system (x(0) = 0 blockwise).
Mat simulate_augmented(const AugmentedSystem& aug, const Discretization& disc,
                       const ControlGrid& u);

/// Closed-form kernels psi_j(s) = B_j^T (int_0^{T-s} e^{A^T tau} dtau) C^T at
/// the nodes, with analytic first and second derivatives. Requires q = 1.
PsiFamily compute_psi_family(const LinearParamSystem& sys, const Discretization& disc,
                             const Vec& V);

/// Quadrature of Y_j = (1/T) int psi_j^T u dt using interval averages of the
/// node values of psi_j against the piecewise-constant u.
MeasurementMap compute_Y(const LinearParamSystem& sys, const Discretization& disc,
                         const PsiFamily& fam, const ControlGrid& u);

AugmentedSystem augment_ensemble_system(const LinearParamSystem& sys,
                                        const GaussianBelief& prior);

}  // namespace oed
