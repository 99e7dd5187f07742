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

#include "oed/system.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace oed {

namespace {

constexpr double kRankTol = 1e-10;
constexpr double kBoxSlack = 1e-12;

bool all_finite(const Mat& M) { return M.allFinite(); }

}  // namespace

Mat LinearParamSystem::input_matrix(const Vec& theta) const {
    if (theta.size() != p())
        throw DimensionMismatch("theta has size " + std::to_string(theta.size()) +
                                ", expected " + std::to_string(p()));
    Mat Bt = B[0];
    for (int i = 0; i < p(); ++i) Bt += theta(i) * B[i + 1];
    return Bt;
}

Mat LinearParamSystem::param_columns(int i) const {
    Mat Bi(n(), p());
    for (int j = 0; j < p(); ++j) Bi.col(j) = B[j + 1].col(i);
    return Bi;
}

void LinearParamSystem::validate() const {
    if (A.rows() != A.cols()) throw DimensionMismatch("A must be square");
    if (B.empty()) throw DimensionMismatch("B must contain B_0..B_p");
    for (const Mat& Bi : B)
        if (Bi.rows() != n() || Bi.cols() != m())
            throw DimensionMismatch("all B_j must be n x m");
    if (C.cols() != n()) throw DimensionMismatch("C must have n columns");
    if (sigma.rows() != q() || sigma.cols() != q())
        throw DimensionMismatch("sigma must be q x q");
    if (T <= 0.0) throw DimensionMismatch("horizon T must be positive");
    if (!(q() <= p() && p() <= n() && m() <= n()))
        throw DimensionMismatch("need q <= p <= n and m <= n");

    Eigen::JacobiSVD<Mat> sigma_svd(sigma);
    if (sigma_svd.singularValues().minCoeff() <=
        kRankTol * std::max(1.0, sigma_svd.singularValues().maxCoeff()))
        throw SingularCovariance("sigma is rank deficient");

    // No control redundancy: the vectorized B^i stack must have full column rank.
    Mat stacked(n() * p(), m());
    for (int i = 0; i < m(); ++i) {
        const Mat Bi = param_columns(i);
        stacked.col(i) = Eigen::Map<const Vec>(Bi.data(), Bi.size());
    }
    Eigen::JacobiSVD<Mat> svd(stacked);
    if (svd.singularValues().minCoeff() <=
        kRankTol * std::max(1.0, svd.singularValues().maxCoeff()))
        throw DimensionMismatch("the family (B^i) is linearly dependent");
}

ControlGrid ControlGrid::constant(int K, int m, double T, double value) {
    ControlGrid u;
    u.T = T;
    u.values = Mat::Constant(K, m, value);
    return u;
}

void ControlGrid::validate() const {
    if (K() < 2) throw DimensionMismatch("control grid needs K >= 2");
    if (values.cwiseAbs().maxCoeff() > 1.0 + kBoxSlack)
        throw DimensionMismatch("control violates the sup-norm bound |u| <= 1");
}

Discretization discretize(const LinearParamSystem& sys, int K) {
    if (K < 2) throw DimensionMismatch("need K >= 2 grid intervals");
    const int n = sys.n();
    const double dt = sys.T / K;

    // exp([[A, I], [0, 0]] dt) = [[e^{A dt}, int_0^dt e^{As} ds], [0, I]]
    Mat block = Mat::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = sys.A * dt;
    block.topRightCorner(n, n) = Mat::Identity(n, n) * dt;
    const Mat E = block.exp();

    Discretization disc;
    disc.K = K;
    disc.dt = dt;
    disc.Phi = E.topLeftCorner(n, n);
    disc.Gamma = E.topRightCorner(n, n);
    if (!all_finite(disc.Phi) || !all_finite(disc.Gamma))
        throw NonFiniteMatrix("matrix exponential overflowed, |A dt| = " +
                              std::to_string((sys.A * dt).norm()));
    disc.nodes = Vec::LinSpaced(K + 1, 0.0, sys.T);
    return disc;
}

Discretization augment_discretization(const Discretization& disc, int p) {
    const int n = static_cast<int>(disc.Phi.rows());
    Discretization out;
    out.K = disc.K;
    out.dt = disc.dt;
    out.nodes = disc.nodes;
    out.Phi = Mat::Zero(n * (p + 1), n * (p + 1));
    out.Gamma = Mat::Zero(n * (p + 1), n * (p + 1));
    for (int b = 0; b <= p; ++b) {
        out.Phi.block(b * n, b * n, n, n) = disc.Phi;
        out.Gamma.block(b * n, b * n, n, n) = disc.Gamma;
    }
    return out;
}

Mat simulate_trajectory(const LinearParamSystem& sys, const Discretization& disc,
                        const Vec& theta, const ControlGrid& u) {
    if (u.K() != disc.K || u.channels() != sys.m())
        throw DimensionMismatch("control grid does not match discretization/system");
    const Mat Bt = sys.input_matrix(theta);
    const Mat GB = disc.Gamma * Bt;

    Mat x = Mat::Zero(disc.K + 1, sys.n());
    Vec xk = Vec::Zero(sys.n());
    for (int k = 0; k < disc.K; ++k) {
        xk = disc.Phi * xk + GB * u.values.row(k).transpose();
        x.row(k + 1) = xk.transpose();
    }
    return x;
}

Mat simulate_augmented(const AugmentedSystem& aug, const Discretization& disc,
                       const ControlGrid& u) {
    const int dim = static_cast<int>(aug.Atilde.rows());
    if (disc.Phi.rows() != dim)
        throw DimensionMismatch("discretization does not match the augmented system");
    if (u.K() != disc.K || u.channels() != aug.Btilde.cols())
        throw DimensionMismatch("control grid does not match the augmented system");
    const Mat GB = disc.Gamma * aug.Btilde;

    Mat z = Mat::Zero(disc.K + 1, dim);
    Vec zk = Vec::Zero(dim);
    for (int k = 0; k < disc.K; ++k) {
        zk = disc.Phi * zk + GB * u.values.row(k).transpose();
        z.row(k + 1) = zk.transpose();
    }
    return z;
}

PsiFamily compute_psi_family(const LinearParamSystem& sys, const Discretization& disc,
                             const Vec& V) {
    if (sys.q() != 1)
        throw UnsupportedDimension("combined design kernel requires q = 1, got q = " +
                                   std::to_string(sys.q()));
    if (V.size() != sys.p()) throw DimensionMismatch("V must have p entries");

    const int K = disc.K;
    const int m = sys.m();
    const int p = sys.p();
    const Mat At = sys.A.transpose();
    const Mat Ct = sys.C.transpose();  // n x 1

    PsiFamily fam;
    fam.T = sys.T;
    fam.S = std::sqrt(sys.T) / std::abs(sys.sigma(0, 0));
    fam.psi_j.assign(p + 1, Mat::Zero(K + 1, m));
    fam.dpsi_j.assign(p + 1, Mat::Zero(K + 1, m));
    fam.ddpsi_j.assign(p + 1, Mat::Zero(K + 1, m));

    // Walk l = K - k upward: G_l = int_0^{l dt} e^{A^T tau} dtau, P_l = e^{A^T l dt}.
    Mat G = Mat::Zero(sys.n(), sys.n());
    Mat P = Mat::Identity(sys.n(), sys.n());
    const Mat GammaT = disc.Gamma.transpose();
    const Mat PhiT = disc.Phi.transpose();
    for (int l = 0; l <= K; ++l) {
        const int k = K - l;
        const Vec gC = G * Ct;
        const Vec pC = P * Ct;
        const Vec apC = At * pC;
        for (int j = 0; j <= p; ++j) {
            fam.psi_j[j].row(k) = (sys.B[j].transpose() * gC).transpose();
            fam.dpsi_j[j].row(k) = -(sys.B[j].transpose() * pC).transpose();
            fam.ddpsi_j[j].row(k) = (sys.B[j].transpose() * apC).transpose();
        }
        if (l < K) {
            G += P * GammaT;
            P = PhiT * P;
        }
    }

    fam.psi = Mat::Zero(K + 1, m);
    for (int j = 0; j < p; ++j) fam.psi += V(j) * fam.psi_j[j + 1];
    fam.psi *= fam.S;
    return fam;
}

MeasurementMap compute_Y(const LinearParamSystem& sys, const Discretization& disc,
                         const PsiFamily& fam, const ControlGrid& u) {
    if (fam.K() != disc.K || u.K() != disc.K || u.channels() != sys.m())
        throw DimensionMismatch("psi family / control / discretization sizes differ");

    MeasurementMap map;
    map.Y0 = Vec::Zero(1);
    map.Y = Mat::Zero(1, sys.p());
    for (int j = 0; j <= sys.p(); ++j) {
        double acc = 0.0;
        const Mat& psi = fam.psi_j[j];
        for (int k = 0; k < disc.K; ++k)
            acc += 0.5 * (psi.row(k) + psi.row(k + 1)).dot(u.values.row(k));
        acc *= disc.dt / sys.T;
        if (j == 0)
            map.Y0(0) = acc;
        else
            map.Y(0, j - 1) = acc;
    }
    return map;
}

AugmentedSystem augment_ensemble_system(const LinearParamSystem& sys,
                                        const GaussianBelief& prior) {
    prior.validate();
    if (prior.dim() != sys.p())
        throw DimensionMismatch("prior dimension must equal p");
    Eigen::LLT<Mat> llt(prior.cov);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("prior covariance is not positive definite");

    const int n = sys.n();
    const int p = sys.p();
    AugmentedSystem aug;
    aug.n = n;
    aug.p = p;
    aug.Atilde = Mat::Zero(n * (p + 1), n * (p + 1));
    aug.Btilde = Mat::Zero(n * (p + 1), sys.m());
    for (int b = 0; b <= p; ++b) {
        aug.Atilde.block(b * n, b * n, n, n) = sys.A;
        aug.Btilde.middleRows(b * n, n) = sys.B[b];
    }

    // E[(1, theta)(1, theta)^T] kron I_n
    Mat M(p + 1, p + 1);
    M(0, 0) = 1.0;
    M.block(1, 0, p, 1) = prior.mean;
    M.block(0, 1, 1, p) = prior.mean.transpose();
    M.block(1, 1, p, p) = prior.cov + prior.mean * prior.mean.transpose();

    aug.Qbar = Mat::Zero(n * (p + 1), n * (p + 1));
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= p; ++b)
            aug.Qbar.block(a * n, b * n, n, n) = M(a, b) * Mat::Identity(n, n);
    return aug;
}

}  // namespace oed
