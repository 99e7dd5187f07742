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

#include "oed/bayes.hpp"

#include <cmath>
#include <string>

#include "oed/rng.hpp"

namespace oed {

namespace {

constexpr double kConditionLimit = 1e12;

double logdet_spd(const Mat& M) {
    Eigen::LLT<Mat> llt(M);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("log det requested for a non-SPD matrix");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace

Mat noise_precision(const LinearParamSystem& sys) {
    const Mat cov = sys.sigma * sys.sigma.transpose();
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("sigma sigma^T is not positive definite");
    return sys.T * llt.solve(Mat::Identity(sys.q(), sys.q()));
}

PosteriorUpdate posterior_update(const GaussianBelief& prior, const Vec& Y0, const Mat& Y,
                                 const LinearParamSystem& sys, const Vec& y_avg) {
    prior.validate();
    const int p = prior.dim();
    const int q = sys.q();
    if (Y.rows() != q || Y.cols() != p)
        throw DimensionMismatch("Y must be q x p");
    if (Y0.size() != q || y_avg.size() != q)
        throw DimensionMismatch("Y0 and y_avg must have q entries");

    Eigen::SelfAdjointEigenSolver<Mat> es(prior.cov);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    if (lmin <= 0.0 || lmax / lmin > kConditionLimit)
        throw SingularCovariance("prior covariance condition number exceeds 1e12");

    const Mat S2 = noise_precision(sys);
    Eigen::LLT<Mat> prior_llt(prior.cov);
    const Mat prior_inv = prior_llt.solve(Mat::Identity(p, p));

    // One factorization of the posterior precision serves both solves.
    const Mat precision = Y.transpose() * S2 * Y + prior_inv;
    Eigen::LLT<Mat> post_llt(precision);
    if (post_llt.info() != Eigen::Success)
        throw SingularCovariance("posterior precision is not positive definite");

    PosteriorUpdate out;
    out.S2 = S2;
    out.belief.cov = post_llt.solve(Mat::Identity(p, p));
    out.belief.cov = 0.5 * (out.belief.cov + out.belief.cov.transpose());
    out.belief.mean =
        post_llt.solve(Y.transpose() * S2 * (y_avg - Y0) + prior_inv * prior.mean);
    out.information_gain = logdet_spd(prior.cov) - logdet_spd(out.belief.cov);
    return out;
}

double trace_objective(const GaussianBelief& prior, const Mat& Y,
                       const LinearParamSystem& sys) {
    prior.validate();
    if (Y.rows() != sys.q() || Y.cols() != prior.dim())
        throw DimensionMismatch("Y must be q x p");
    Eigen::SelfAdjointEigenSolver<Mat> es(prior.cov);
    const Mat root = es.operatorSqrt();
    const Mat S2 = noise_precision(sys);
    return (root * Y.transpose() * S2 * Y * root).trace();
}

EoptDirection eopt_direction(const GaussianBelief& prior) {
    prior.validate();
    const int p = prior.dim();
    Eigen::SelfAdjointEigenSolver<Mat> es(prior.cov);
    // Largest eigenvalue of Sigma_prior = smallest of Sigma_prior^{-1}.
    const double top = es.eigenvalues()(p - 1);
    EoptDirection dir;
    dir.V = es.eigenvectors().col(p - 1);
    dir.gap = p == 1 ? 1.0 : (top - es.eigenvalues()(p - 2)) / top;
    if (dir.gap < 1e-8)
        throw DegenerateEigenvalue("top prior eigenvalue has numerical multiplicity");

    int imax = 0;
    dir.V.cwiseAbs().maxCoeff(&imax);
    if (dir.V(imax) < 0.0) dir.V = -dir.V;
    return dir;
}

Vec simulate_measurement(const LinearParamSystem& sys, const Discretization& disc,
                         const Vec& theta_true, const ControlGrid& u, std::uint64_t seed) {
    const Mat x = simulate_trajectory(sys, disc, theta_true, u);
    Vec avg = Vec::Zero(sys.q());
    for (int k = 0; k < disc.K; ++k) {
        const Vec yk = sys.C * x.row(k).transpose();
        const Vec yk1 = sys.C * x.row(k + 1).transpose();
        avg += 0.5 * (yk + yk1);
    }
    avg *= disc.dt / sys.T;

    CounterRng rng(seed);
    Vec g(sys.q());
    for (int i = 0; i < sys.q(); ++i) g(i) = rng.next_gaussian();
    return avg + sys.sigma * g / std::sqrt(sys.T);
}

}  // namespace oed
